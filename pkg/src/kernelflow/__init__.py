"""Local normal forms, codimensions and unfoldings of planar fields in the kernel of a 1-form."""

from kernelflow.classifier import NormalForm, classify
from kernelflow.forms import JetDiffeo, OneForm, PlaneField, field_of_form, lie_derivative
from kernelflow.jet import Jet, JetError, compose
from kernelflow.local_algebra import LocalIdeal, codim_of, codimension, tangent_ideal
from kernelflow.parse import ParseError, parse_expr
from kernelflow.unfolding import UnfoldingFamily, build_unfolding, check_transversality, member

__version__ = "0.1.0"

__all__ = [
    "Jet", "JetError", "compose", "parse_expr", "ParseError",
    "OneForm", "PlaneField", "JetDiffeo", "field_of_form", "lie_derivative",
    "LocalIdeal", "tangent_ideal", "codimension", "codim_of",
    "NormalForm", "classify",
    "UnfoldingFamily", "build_unfolding", "check_transversality", "member",
    "__version__",
]
