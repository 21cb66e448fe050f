"""Two-level staged language compiled to generalized-arrow combinators."""

__version__ = "0.1.0"
