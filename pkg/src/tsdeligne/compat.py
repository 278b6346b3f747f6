"""Compatibility of perversities across a coarsening, and the demonstration drivers.

A :class:`CoarseningMap` records, for every singular stratum ``S`` of a
refined stratification, the stratum ``S̄`` of the coarser one containing it.
Maps are data supplied by the caller; :meth:`CoarseningMap.from_spaces`
fills in dimensions and codimensions from two grammar expressions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

from tsdeligne.errors import PreconditionError, TsError
from tsdeligne.fgmod import GradedModule, PrimeSet
from tsdeligne.perversity import (
    CodimPerversity,
    CoefficientData,
    Perversity,
    PervValue,
    StratumPerversity,
    classify,
    is_adapted,
)
from tsdeligne.sheafcalc import coefficient_stalk, hyper, truncate
from tsdeligne.space import SpaceExpr, SphereJoin, Susp, dim, find_stratum, is_compact, strata, susp_power


@dataclass(frozen=True)
class MapEntry:
    source: str
    source_codim: int
    target: str
    target_codim: int
    target_regular: bool = False
    source_dim: Optional[int] = None
    target_dim: Optional[int] = None


@dataclass(frozen=True)
class CoarseningMap:
    entries: tuple[MapEntry, ...]
    target_singular: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for e in self.entries:
            if e.source in seen:
                raise ValueError(f"stratum {e.source!r} is mapped twice")
            seen.add(e.source)
            if e.source_codim < 1:
                raise ValueError(f"source {e.source!r} is not a singular stratum")
            if e.target_regular:
                if e.target_codim != 0:
                    raise ValueError(f"regular target {e.target!r} must have codim 0")
            elif e.target_codim > e.source_codim:
                raise ValueError(
                    f"{e.source!r} (codim {e.source_codim}) cannot lie in {e.target!r} (codim {e.target_codim})"
                )
        images = {e.target for e in self.entries if not e.target_regular}
        missed = sorted(set(self.target_singular) - images)
        if missed:
            raise ValueError(f"singular strata {missed} of the coarsening are not images of any stratum")

    @classmethod
    def from_spaces(cls, refined: SpaceExpr, coarse: SpaceExpr, pairs: dict[str, str]) -> CoarseningMap:
        """Build a map from stratum-id pairs between two expressions of the same dimension."""
        if dim(refined) != dim(coarse):
            raise ValueError("a coarsening must have the same dimension as the refinement")
        entries = []
        src_sing = {s.id for s in strata(refined) if s.is_singular}
        unmapped = sorted(src_sing - set(pairs))
        if unmapped:
            raise ValueError(f"singular strata {unmapped} are not mapped")
        for src, tgt in pairs.items():
            s = find_stratum(refined, src)
            t = find_stratum(coarse, tgt)
            if s.is_regular:
                continue
            if t.dim < s.dim:
                raise ValueError(f"{src!r} has larger dimension than its image {tgt!r}")
            entries.append(MapEntry(s.id, s.codim, t.id, t.codim, t.is_regular, s.dim, t.dim))
        sing = tuple(t.id for t in strata(coarse) if t.is_singular)
        return cls(tuple(entries), sing)

    def to_json(self) -> dict:
        return {"entries": [asdict(e) for e in self.entries], "target_singular": list(self.target_singular)}


@dataclass
class CompatOutcome:
    source: str
    target: str
    condition: str
    passed: bool
    detail: str = ""


@dataclass
class CompatReport:
    outcomes: list[CompatOutcome] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def compatible(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def failures(self) -> list[CompatOutcome]:
        return [o for o in self.outcomes if not o.passed]

    def failed_conditions(self) -> set[str]:
        return {o.condition for o in self.failures()}

    def to_json(self) -> dict:
        return {
            "compatible": self.compatible,
            "outcomes": [asdict(o) for o in self.outcomes],
            "notes": list(self.notes),
        }


def sing_in_sing_conditions(v: PervValue, vbar: PervValue, codim: int, codim_bar: int) -> dict[str, tuple[bool, str]]:
    """Condition 1 clauses for a singular stratum inside a singular stratum.

    Clauses whose hypothesis does not hold are reported as passing.
    """
    gap = codim - codim_bar
    lo, hi = vbar.p1, vbar.p1 + gap
    out = {"1.range": (lo <= v.p1 <= hi, f"need {lo} <= p1 = {v.p1} <= {hi}")}
    if v.p1 == lo:
        out["1a"] = (v.p2.issuperset(vbar.p2), f"need {v.p2} to contain {vbar.p2}")
    if v.p1 == hi:
        out["1b"] = (v.p2.issubset(vbar.p2), f"need {v.p2} inside {vbar.p2}")
    return out


def sing_in_reg_conditions(v: PervValue, codim: int, coeffs: CoefficientData) -> dict[str, tuple[bool, str]]:
    """Condition 2 clauses for a singular stratum inside a regular stratum."""
    h0, h1 = coeffs.h0, coeffs.h1
    p1, p2 = v
    out = {"2.range": (-1 <= p1 <= codim - 1, f"need -1 <= p1 = {p1} <= {codim - 1}")}
    if p1 == -1:
        out["2a"] = (h1.is_zero() and h0.is_torsion_for(p2), f"need h1 = 0 and h0 {p2}-torsion")
    if p1 == 0:
        out["2b"] = (h1.is_torsion_for(p2), f"need h1 {p2}-torsion")
    if p1 == codim - 2:
        out["2c"] = (h0.is_torsion_free_for(p2), f"need h0 {p2}-torsion free")
    if p1 == codim - 1:
        out["2d"] = (h0.is_zero() and h1.is_torsion_free_for(p2), f"need h0 = 0 and h1 {p2}-torsion free")
    return out


def check_E_compatible(
    perv: Perversity, perv_bar: Perversity, cmap: CoarseningMap, coeffs: CoefficientData
) -> CompatReport:
    """Evaluate every compatibility clause for every pair of the map."""
    rep = CompatReport()
    for e in cmap.entries:
        v = perv.value_for(e.source, e.source_codim)
        if e.target_regular:
            conds = sing_in_reg_conditions(v, e.source_codim, coeffs)
        else:
            vbar = perv_bar.value_for(e.target, e.target_codim)
            conds = sing_in_sing_conditions(v, vbar, e.source_codim, e.target_codim)
        for name, (ok, why) in conds.items():
            rep.outcomes.append(CompatOutcome(e.source, e.target, name, ok, "" if ok else why))
    return rep


def pullback(perv_bar: Perversity, cmap: CoarseningMap, coeffs: CoefficientData) -> StratumPerversity:
    """Pullback perversity: copy values from singular images, ``(0, primes(h1))`` on regular ones."""
    bad = [e.source for e in cmap.entries if e.target_regular and e.source_codim == 1]
    if bad:
        raise PreconditionError(f"codimension-one strata {bad} lie in regular strata", bad)
    minimal = coeffs.minimal_primes()
    values = {}
    for e in cmap.entries:
        if e.target_regular:
            values[e.source] = PervValue(0, minimal)
        else:
            values[e.source] = perv_bar.value_for(e.target, e.target_codim)
    return StratumPerversity.from_dict(values)


class NotPushableError(TsError):
    """Two same-dimension source strata with one singular image disagree."""

    def __init__(self, first: str, second: str, target: str):
        self.witnesses = (first, second)
        self.target = target
        super().__init__(f"strata {first!r} and {second!r} both fill {target!r} but have different values")


def pushforward(perv: Perversity, cmap: CoarseningMap) -> Perversity:
    """Pushforward perversity on the coarsening.

    Codimension-indexed perversities push forward unchanged.  Otherwise the
    value on each singular target is read from a source of the same
    dimension, after checking all such sources agree.
    """
    if isinstance(perv, CodimPerversity):
        return perv
    chosen: dict[str, tuple[str, PervValue]] = {}
    for e in cmap.entries:
        if e.target_regular:
            continue
        if e.source_dim is None or e.target_dim is None:
            raise PreconditionError("pushforward needs stratum dimensions in the map")
        if e.source_dim != e.target_dim:
            continue
        v = perv.value_for(e.source, e.source_codim)
        if e.target in chosen and chosen[e.target][1] != v:
            raise NotPushableError(chosen[e.target][0], e.source, e.target)
        chosen.setdefault(e.target, (e.source, v))
    targets = set(cmap.target_singular) or {e.target for e in cmap.entries if not e.target_regular}
    missing = sorted(targets - set(chosen))
    if missing:
        raise PreconditionError(f"singular strata {missing} contain no source stratum of equal dimension")
    return StratumPerversity.from_dict({t: v for t, (_, v) in chosen.items()})


@dataclass
class SelfCompatReport:
    route: Optional[str]
    route_reasons: dict[str, list[str]]
    compat: CompatReport

    @property
    def compatible(self) -> bool:
        return self.compat.compatible

    def to_json(self) -> dict:
        return {
            "route": self.route,
            "route_reasons": self.route_reasons,
            "compatible": self.compatible,
            "compat": self.compat.to_json(),
        }


def self_compat_constrained(perv: CodimPerversity, cmap: CoarseningMap, coeffs: CoefficientData) -> SelfCompatReport:
    """Compatibility of a codimension-indexed perversity with itself across ``cmap``.

    Route 1 asks for a constrained perversity adapted to the coefficients
    with no codimension-one stratum inside a regular stratum.  Route 2 asks
    for a weakly constrained perversity with every singular stratum landing
    in a singular stratum.  The verdict always comes from the clause check.
    """
    cls = classify(perv)
    r1: list[str] = []
    if not cls.constrained:
        r1.append(f"not constrained (label {cls.label})")
    else:
        ok, why = is_adapted(perv, coeffs)
        r1.extend(why)
    if any(e.target_regular and e.source_codim == 1 for e in cmap.entries):
        r1.append("a codimension-one stratum lies in a regular stratum")
    r2: list[str] = []
    if not cls.weakly_constrained:
        r2.append(f"not weakly constrained (label {cls.label})")
    into_reg = [e.source for e in cmap.entries if e.target_regular]
    if into_reg:
        r2.append(f"singular strata {into_reg} lie in regular strata")
    route = "1" if not r1 else "2" if not r2 else None
    rep = check_E_compatible(perv, perv, cmap, coeffs)
    if route is not None and not rep.compatible:
        rep.notes.append(f"route {route} hypotheses hold but a clause failed")
    return SelfCompatReport(route, {"1": r1, "2": r2}, rep)


# ---------------------------------------------------------------------------
# Demonstrations


def _embed(perv: Perversity | None, space: SpaceExpr, prefix: str) -> dict[str, PervValue]:
    """Per-stratum values for ``space``'s singular strata, re-keyed under ``prefix``."""
    out = {}
    for s in strata(space):
        if s.is_singular:
            if perv is None:
                raise PreconditionError(f"stratum {s.id!r} of the inner space needs a perversity")
            out[prefix + s.id] = perv.value_for(s.id, s.codim)
    return out


@dataclass
class JoinSuspReport:
    join: GradedModule
    susp: GradedModule
    compat: CompatReport

    @property
    def equal(self) -> bool:
        return self.join == self.susp

    @property
    def passed(self) -> bool:
        return self.equal and self.compat.compatible

    def to_json(self) -> dict:
        return {
            "join": self.join.to_text(),
            "susp": self.susp.to_text(),
            "equal": self.equal,
            "compatible": self.compat.compatible,
            "compat": self.compat.to_json(),
        }


def join_susp_setup(k: int, X: SpaceExpr, value: PervValue, inner: Perversity | None = None):
    """Both spaces, their per-stratum perversities, and the coarsening between them."""
    J = SphereJoin(k, X)
    S = susp_power(X, k + 1)
    pj = {"join": value, **_embed(inner, X, "join/")}
    chain = ["/".join(["susp"] * i) for i in range(1, k + 2)]
    ps = {sid: value for sid in chain}
    ps.update(_embed(inner, X, chain[-1] + "/"))
    pairs = {sid: "join" for sid in chain}
    for s in strata(X):
        pairs[chain[-1] + "/" + s.id] = "join/" + s.id
    cmap = CoarseningMap.from_spaces(S, J, pairs)
    return J, S, StratumPerversity.from_dict(pj), StratumPerversity.from_dict(ps), cmap


def demo_join_vs_susp(
    k: int, X: SpaceExpr, p1: int, p2: PrimeSet, inner: Perversity | None = None, coeffs: CoefficientData | None = None
) -> JoinSuspReport:
    """Compare the sphere join with the iterated suspension.

    ``(p1, p2)`` sits on the sphere stratum and on every suspension stratum;
    ``inner`` supplies values for singular strata of ``X`` itself.
    """
    if k < 1:
        raise PreconditionError("the sphere join needs k >= 1")
    if not is_compact(X):
        raise PreconditionError("X must be compact")
    value = PervValue(p1, p2)
    J, S, pj, ps, cmap = join_susp_setup(k, X, value, inner)
    HJ = hyper(J, pj)
    HS = hyper(S, ps)
    rep = check_E_compatible(ps, pj, cmap, coeffs or CoefficientData())
    return JoinSuspReport(HJ, HS, rep)


@dataclass
class SingInSingReport:
    coarse: GradedModule
    refined: GradedModule
    conditions: dict[str, bool]

    @property
    def match(self) -> bool:
        return self.coarse == self.refined

    @property
    def condition1(self) -> bool:
        return all(self.conditions.values())

    def mismatched_degrees(self) -> list[int]:
        degs = set(self.coarse.degrees()) | set(self.refined.degrees())
        return sorted(d for d in degs if self.coarse[d] != self.refined[d])

    def to_json(self) -> dict:
        return {
            "coarse": self.coarse.to_text(),
            "refined": self.refined.to_text(),
            "match": self.match,
            "mismatched_degrees": self.mismatched_degrees(),
            "conditions": dict(self.conditions),
        }


def demo_necessity_sing_in_sing(
    k: int, L: SpaceExpr, p_v: PervValue, p_bar: PervValue, inner: Perversity | None = None
) -> SingInSingReport:
    """Vertex stalks of the cone on ``S^k * L`` under the coarse and refined stratifications.

    The coarse stratification sees ``R^{k+1} x cL`` with value ``p_bar``; the
    refined one adds the vertex ``V`` with value ``p_v`` and keeps ``p_bar``
    on the sphere stratum.  For ``k = 0`` the join is replaced by the
    suspension.
    """
    if k < 0:
        raise PreconditionError("k must be non-negative")
    if not is_compact(L):
        raise PreconditionError("L must be compact")
    p_v, p_bar = PervValue(*p_v), PervValue(*p_bar)
    lvals = _embed(inner, L, "")
    base = StratumPerversity.from_dict(lvals)
    coarse = truncate(hyper(L, base), p_bar.p1, p_bar.p2)
    outer = SphereJoin(k, L) if k >= 1 else Susp(L)
    head = "join" if k >= 1 else "susp"
    pj = StratumPerversity.from_dict({head: p_bar, **_embed(inner, L, head + "/")})
    refined = truncate(hyper(outer, pj), p_v.p1, p_v.p2)
    codim_bar = dim(L) + 1
    codim_v = dim(outer) + 1
    conds = {name: ok for name, (ok, _) in sing_in_sing_conditions(p_v, p_bar, codim_v, codim_bar).items()}
    return SingInSingReport(coarse, refined, conds)


def sphere_link_cohomology(k: int, coeffs: CoefficientData) -> GradedModule:
    """Hypercohomology of a (k-1)-dimensional homology sphere link with coefficients ``coeffs``.

    For ``k = 2`` the extension in degree 1 is taken to be split.
    """
    h0, h1 = coeffs.h0, coeffs.h1
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if k == 1:
        return GradedModule(((0, h0 + h0), (1, h1 + h1)))
    if k == 2:
        return GradedModule(((0, h0), (1, h0 + h1), (2, h1)))
    return GradedModule(((0, h0), (1, h1), (k - 1, h0), (k, h1)))


def sing_in_reg_scenarios(k: int, coeffs: CoefficientData, p_s: PervValue) -> list[int]:
    """Which entries of the five-case list for k >= 3 hold (numbered 1 to 5)."""
    h0, h1 = coeffs.h0, coeffs.h1
    p1, p2 = p_s
    hits = []
    if p1 == -1 and h0.is_torsion_for(p2) and h1.is_zero():
        hits.append(1)
    if p1 == 0 and h1.is_torsion_for(p2):
        hits.append(2)
    if 1 <= p1 <= k - 3:
        hits.append(3)
    if p1 == k - 2 and h0.is_torsion_free_for(p2):
        hits.append(4)
    if p1 == k - 1 and h0.is_zero() and h1.is_torsion_free_for(p2):
        hits.append(5)
    return hits


@dataclass
class SingInRegReport:
    k: int
    link: GradedModule
    stalk: GradedModule
    expected: GradedModule
    conditions: dict[str, bool]
    scenarios: list[int]

    @property
    def match(self) -> bool:
        return self.stalk == self.expected

    @property
    def condition2(self) -> bool:
        return all(self.conditions.values())

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "link": self.link.to_text(),
            "stalk": self.stalk.to_text(),
            "expected": self.expected.to_text(),
            "match": self.match,
            "conditions": dict(self.conditions),
            "scenarios": list(self.scenarios),
        }


def demo_necessity_sing_in_reg(k: int, coeffs: CoefficientData, p_s: PervValue) -> SingInRegReport:
    """Stalk at a codim-k singular stratum sitting inside a regular stratum of the coarsening."""
    p_s = PervValue(*p_s)
    link = sphere_link_cohomology(k, coeffs)
    got = truncate(link, p_s.p1, p_s.p2)
    conds = {name: ok for name, (ok, _) in sing_in_reg_conditions(p_s, k, coeffs).items()}
    scen = sing_in_reg_scenarios(k, coeffs, p_s) if k >= 3 else []
    return SingInRegReport(k, link, got, coefficient_stalk(coeffs), conds, scen)
