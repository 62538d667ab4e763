"""Exact formal tensor calculus for ambient metric expansions on truncated jets."""

from .rationals import QQ, Dual
from .jets import JetScalar, JetSpec, base_spec, chart_spec
from .linalg import Inconsistent, QMatrix, nullspace, rank, rref, solve
from .tensors import ConstTensor, ReferenceForm, TensorJet

__all__ = [
    "QQ",
    "Dual",
    "JetScalar",
    "JetSpec",
    "base_spec",
    "chart_spec",
    "Inconsistent",
    "QMatrix",
    "nullspace",
    "rank",
    "rref",
    "solve",
    "ConstTensor",
    "ReferenceForm",
    "TensorJet",
]
