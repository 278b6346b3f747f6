"""Exact calculator for torsion-sensitive intersection cohomology over the integers."""

from tsdeligne.fgmod import F, FgModule, GradedModule, PrimeSet, cokernel, smith_normal_form
from tsdeligne.perversity import (
    INF,
    NEG_INF,
    CodimPerversity,
    CoefficientData,
    PervValue,
    StratumPerversity,
    classify,
    dual,
    is_adapted,
    p_inverse,
)
from tsdeligne.space import Cone, Leaf, ProdR, SphereJoin, Susp, strata, validate
from tsdeligne.syntax import parse_group, parse_perversity, parse_prime_set, parse_space
from tsdeligne.sheafcalc import costalk, hyper, stalk, truncate

__version__ = "0.1.0"

__all__ = [
    "F",
    "FgModule",
    "GradedModule",
    "PrimeSet",
    "cokernel",
    "smith_normal_form",
    "INF",
    "NEG_INF",
    "CodimPerversity",
    "CoefficientData",
    "PervValue",
    "StratumPerversity",
    "classify",
    "dual",
    "is_adapted",
    "p_inverse",
    "Cone",
    "Leaf",
    "ProdR",
    "SphereJoin",
    "Susp",
    "strata",
    "validate",
    "parse_group",
    "parse_perversity",
    "parse_prime_set",
    "parse_space",
    "costalk",
    "hyper",
    "stalk",
    "truncate",
]
