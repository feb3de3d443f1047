"""Spectral sum rules Z(s) = sum_n E_n^-s from Green's functions, perturbation theory and exact impurity models."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BOX,
    SHO,
    BracketError,
    DivergentOrderError,
    PoleError,
    RationalOrder,
    SumRuleError,
    SumRuleEvaluation,
    UnperturbedBasis,
    zeta_unperturbed,
)
from .perturbative import (  # noqa: E402
    DeltaInBox,
    DoubleDeltaInBox,
    LinearInBox,
    PadeForm,
    PerturbationSpec,
    QuarticSHO,
    pade_extend,
    sum_rule_perturbative,
)
