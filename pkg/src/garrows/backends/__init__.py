"""Interpretations of combinator terms."""
from .bi import BiMorphism, bi_interpret, bi_inv
from .dot import to_dot
from .evaluate import compile_term, eval_interpret
from .residual import residualize

__all__ = ["BiMorphism", "bi_interpret", "bi_inv", "to_dot", "compile_term",
           "eval_interpret", "residualize"]
