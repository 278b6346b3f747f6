"""Hypercohomology, stalks and costalks of ts-Deligne sheaves on grammar spaces.

Everything here is structural recursion over the space expression.  The
suspension and sphere-join steps split the degree ``p+1`` group of the inner
space into its ``p2``-torsion part, which stays, and the torsion-free-ish
quotient, which moves up past the new cone points.
"""

from __future__ import annotations

from functools import lru_cache

from tsdeligne.errors import PreconditionError
from tsdeligne.fgmod import FgModule, GradedModule, PrimeSet
from tsdeligne.perversity import CoefficientData, Perversity, PervValue
from tsdeligne.space import (
    Cone,
    Leaf,
    ProdR,
    SpaceExpr,
    SphereJoin,
    Stratum,
    Susp,
    dim,
    find_stratum,
    is_compact,
    kind_name,
    leaf_of,
    strata,
)


def truncate(G: GradedModule, p1: int, p2: PrimeSet) -> GradedModule:
    """Torsion-tipped truncation: keep degrees <= p1, the p2-torsion in p1+1, nothing above."""
    if p2.includes_f:
        raise PreconditionError("truncation prime sets cannot contain f")
    kept = [(d, A) for d, A in G if d <= p1]
    kept.append((p1 + 1, G[p1 + 1].torsion_part(p2)))
    return GradedModule(tuple(kept))


def _split_shift(H: GradedModule, p: int, wp: PrimeSet, gap: int) -> GradedModule:
    # Degrees <= p stay; degree p+1 keeps its wp-torsion and sends the
    # quotient to p+1+gap; higher degrees move up by gap.
    out: list[tuple[int, FgModule]] = []
    for d, A in H:
        if d <= p:
            out.append((d, A))
        elif d == p + 1:
            out.append((d, A.torsion_part(wp)))
            out.append((d + gap, A.quotient_by_torsion(wp)))
        else:
            out.append((d + gap, A))
    return GradedModule(tuple(out))


def suspension_formula(H: GradedModule, value: PervValue) -> GradedModule:
    """Hypercohomology of a suspension from that of the base."""
    return _split_shift(H, value.p1, value.p2, 1)


def join_formula(H: GradedModule, k: int, value: PervValue) -> GradedModule:
    """Hypercohomology of ``S^k * X`` from that of ``X``."""
    return _split_shift(H, value.p1, value.p2, k + 1)


@lru_cache(maxsize=4096)
def _hyper(node: SpaceExpr, prefix: str, perv: Perversity) -> GradedModule:
    if isinstance(node, Leaf):
        return node.cohom
    if isinstance(node, ProdR):
        return _hyper(node.inner, prefix, perv)
    sid = prefix + kind_name(node)
    value = perv.value_for(sid, dim(node.inner) + 1)
    H = _hyper(node.inner, sid + "/", perv)
    if isinstance(node, Cone):
        return truncate(H, value.p1, value.p2)
    if isinstance(node, Susp):
        return suspension_formula(H, value)
    if isinstance(node, SphereJoin):
        return join_formula(H, node.k, value)
    raise TypeError(f"not a space expression: {node!r}")


def hyper(space: SpaceExpr, perv: Perversity, prefix: str = "") -> GradedModule:
    """Hypercohomology of the ts-Deligne sheaf on ``space``.

    A cone is treated through its vertex stalk and ``prod`` is transparent.
    ``prefix`` is the stratum-id prefix of ``space`` when it sits inside a
    larger expression; per-stratum perversities are looked up with it.
    """
    return _hyper(space, prefix, perv)


def coefficient_stalk(coeffs: CoefficientData) -> GradedModule:
    return GradedModule(((0, coeffs.h0), (1, coeffs.h1)))


def _stratum(space: SpaceExpr, stratum: Stratum | str) -> Stratum:
    return stratum if isinstance(stratum, Stratum) else find_stratum(space, stratum)


def stalk(space: SpaceExpr, perv: Perversity, stratum: Stratum | str) -> GradedModule:
    """Stalk cohomology at a point of ``stratum``."""
    s = _stratum(space, stratum)
    if s.is_regular:
        return coefficient_stalk(leaf_of(space).coeffs)
    value = perv.value_for(s.id, s.codim)
    return truncate(hyper(s.link, perv, s.id + "/"), value.p1, value.p2)


def costalk(space: SpaceExpr, perv: Perversity, stratum: Stratum | str) -> GradedModule:
    """Costalk cohomology at a point of ``stratum``.

    At a singular stratum of codimension k in an n-dimensional space with
    value (p, P) and link L, with s = n - k::

        i <= p + s + 1   0
        i == p + s + 2   H^{p+1}(L) / T^P
        i >= p + s + 3   H^{i-s-1}(L)

    At a regular stratum it is the coefficient stalk shifted up by n.
    """
    s = _stratum(space, stratum)
    n = dim(space)
    if s.is_regular:
        return coefficient_stalk(leaf_of(space).coeffs).shift(n)
    p, wp = perv.value_for(s.id, s.codim)
    shift = n - s.codim
    H = hyper(s.link, perv, s.id + "/")
    out: list[tuple[int, FgModule]] = []
    for d, A in H:
        if d == p + 1:
            out.append((p + shift + 2, A.quotient_by_torsion(wp)))
        elif d > p + 1:
            out.append((d + shift + 1, A))
    result = GradedModule(tuple(out))
    # The closed form must satisfy the costalk vanishing axiom by construction.
    low = result.min_degree()
    if low is not None and (low < p + shift + 2 or not result[p + shift + 2].is_torsion_free_for(wp)):
        raise AssertionError(f"costalk closed form violates the vanishing axiom at {s.id}")
    return result


def stalks(space: SpaceExpr, perv: Perversity) -> dict[str, GradedModule]:
    return {s.id: stalk(space, perv, s) for s in strata(space)}


def costalks(space: SpaceExpr, perv: Perversity) -> dict[str, GradedModule]:
    return {s.id: costalk(space, perv, s) for s in strata(space)}


def require_compact(space: SpaceExpr) -> None:
    if not is_compact(space):
        raise PreconditionError("expected a compact space expression")
