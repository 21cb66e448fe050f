"""Exception hierarchy shared by every stage of the pipeline.

Each error carries a short ``code`` (the class name by default) so the CLI and
the HTTP service can report it uniformly.  ``UserError`` subclasses map to exit
status 1, ``InternalError`` to exit status 2.
"""
from __future__ import annotations


class GarrowError(Exception):
    code = "GarrowError"

    def __init__(self, message: str = "", pos: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        cls.code = cls.__name__

    def render(self, filename: str | None = None) -> str:
        where = ""
        if self.pos is not None:
            line, col = self.pos
            where = f"{filename or '<input>'}:{line}:{col}: "
        elif filename:
            where = f"{filename}: "
        return f"{where}{self.code}: {self.message}"


class UserError(GarrowError):
    pass


class InternalError(GarrowError):
    pass


# --- IR ---------------------------------------------------------------------

class IllTyped(UserError):
    def __init__(self, path: str, expected, actual, message: str = ""):
        self.path = path
        self.expected = expected
        self.actual = actual
        super().__init__(message or f"at {path or 'root'}: expected {expected}, got {actual}")


class IRSyntaxError(UserError):
    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"offset {position}: {message}")


# --- backends -----------------------------------------------------------------

class EvalError(UserError):
    pass


class ShapeMismatch(EvalError):
    pass


class Unreachable(EvalError):
    pass


class PrimUndefined(EvalError):
    pass


class FuelExhausted(EvalError):
    pass


class Overflow(EvalError):
    pass


class NonInvertible(EvalError):
    pass


class Unresidualizable(UserError):
    pass


# --- frontend -----------------------------------------------------------------

class SyntaxError_(UserError):
    """Surface-language parse error; ``pos`` is (line, col)."""

    def __init__(self, line: int, col: int, expected: str):
        self.expected = expected
        super().__init__(f"expected {expected}", (line, col))


SyntaxError_.code = "SyntaxError"


class TypeError_(UserError):
    pass


TypeError_.code = "TypeError"


class UnboundVar(TypeError_):
    pass


class LevelMismatch(TypeError_):
    pass


class EscapeAtLevelZero(TypeError_):
    pass


class ClassifierMismatch(TypeError_):
    pass


class TypeMismatch(TypeError_):
    pass


class OccursCheck(TypeError_):
    pass


# --- derivation / flattening --------------------------------------------------

class MissingLeaf(UserError):
    pass


class OpenSplice(UserError):
    pass


class SpliceNotCode(UserError):
    pass


class NestedBracketUnsupported(UserError):
    pass
