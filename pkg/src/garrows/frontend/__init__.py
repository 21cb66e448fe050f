"""Surface language: parser, AST and level-aware typechecker."""
from .parser import parse, parse_expr, parse_type
from .typecheck import Typed, TypedDef, alpha_equal, show_scheme, typecheck, typecheck_expr

__all__ = ["parse", "parse_expr", "parse_type", "Typed", "TypedDef", "alpha_equal",
           "show_scheme", "typecheck", "typecheck_expr"]
