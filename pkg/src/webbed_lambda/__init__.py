"""Webbed models of the untyped lambda calculus at desk scale.

Information systems and their morphisms, i-webs (graph, Krivine, pc and
filter webs), bounded interpretation of lambda terms, the staged completion
of a product of webs, principal ultraproducts of webs and a Horn
presentation of finite information systems.
"""

from .tokens import NU, Arrow, Atom, Pair, Seq, parse_token, show
from .kernel_is import check_is_axioms, flat_system, product, terminal
from .webs import graph_web, krivine_web, pcs_web, filter_web
from .lambda_syntax import parse, beta_normalize
from .interp import interpret, separate

__all__ = [
    "NU", "Arrow", "Atom", "Pair", "Seq", "parse_token", "show",
    "check_is_axioms", "flat_system", "product", "terminal",
    "graph_web", "krivine_web", "pcs_web", "filter_web",
    "parse", "beta_normalize", "interpret", "separate",
]

__version__ = "0.1.0"
