"""Machine checks of the stalk/costalk axioms and the support/cosupport axioms.

Both checkers work from the stalk and costalk tables produced by
:mod:`tsdeligne.sheafcalc`.  Callers may pass their own tables instead, which
is how the tests inject faults.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from tsdeligne.errors import PreconditionError
from tsdeligne.fgmod import F, GradedModule, Prime, PrimeSet
from tsdeligne.perversity import (
    INF,
    NEG_INF,
    CodimPerversity,
    CoefficientData,
    Extended,
    Perversity,
    classify,
    dual,
    is_adapted,
    p_inverse,
)
from tsdeligne.sheafcalc import coefficient_stalk, costalks as all_costalks, stalks as all_stalks
from tsdeligne.space import SpaceExpr, Stratum, dim, leaf_of, strata


@dataclass(frozen=True)
class ClauseOutcome:
    clause: str
    stratum: Optional[str]
    degree: Optional[int]
    passed: bool
    detail: str = ""
    prime: Optional[str] = None


@dataclass
class AxiomReport:
    axiom: str
    outcomes: list[ClauseOutcome] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def failures(self) -> list[ClauseOutcome]:
        return [o for o in self.outcomes if not o.passed]

    def failed_clauses(self) -> set[str]:
        return {o.clause for o in self.failures()}

    def add(self, clause: str, stratum, degree, passed: bool, detail: str = "", prime=None) -> None:
        self.outcomes.append(
            ClauseOutcome(clause, stratum, degree, bool(passed), detail, None if prime is None else str(prime))
        )

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "verdict": self.passed,
            "outcomes": [asdict(o) for o in self.outcomes],
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data: dict) -> AxiomReport:
        rep = cls(data["axiom"], [ClauseOutcome(**o) for o in data["outcomes"]], list(data["notes"]))
        if rep.passed != data["verdict"]:
            raise ValueError("verdict does not match clause outcomes")
        return rep

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        lines = [f"{self.axiom}: {verdict} ({len(self.outcomes)} clause checks, {len(self.failures())} failed)"]
        for o in self.failures():
            where = o.stratum or "-"
            prime = f" q={o.prime}" if o.prime is not None else ""
            lines.append(f"  clause {o.clause} at {where} degree {o.degree}{prime}: {o.detail}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _tables(space, perv, stalks, costalks):
    st = stalks if stalks is not None else all_stalks(space, perv)
    co = costalks if costalks is not None else all_costalks(space, perv)
    return st, co


def check_tax1prime(
    space: SpaceExpr,
    perv: Perversity,
    coeffs: CoefficientData | None = None,
    *,
    stalks: dict[str, GradedModule] | None = None,
    costalks: dict[str, GradedModule] | None = None,
) -> AxiomReport:
    """Evaluate clauses (a) to (d) of the stalk/costalk axioms stratum by stratum."""
    coeffs = coeffs if coeffs is not None else leaf_of(space).coeffs
    st, co = _tables(space, perv, stalks, costalks)
    n = dim(space)
    rep = AxiomReport("TAx1'")
    for s in strata(space):
        H = st[s.id]
        low = H.min_degree()
        rep.add("a", s.id, low, low is None or low >= 0, "stalk has negative degrees" if low is not None and low < 0 else "")
        if s.is_regular:
            want = coefficient_stalk(coeffs)
            rep.add("b", s.id, None, H == want, "" if H == want else f"stalk {H} differs from coefficients {want}")
            continue
        p, wp = perv.value_for(s.id, s.codim)
        top = p + 1
        for d in sorted(set(H.degrees()) | {top}):
            if d < top:
                continue
            if d > top:
                rep.add("c", s.id, d, False, f"stalk {H[d]} nonzero above degree {top}")
            else:
                ok = H[d].is_torsion_for(wp)
                rep.add("c", s.id, d, ok, "" if ok else f"{H[d]} is not {wp}-torsion")
        C = co[s.id]
        edge = p + n - s.codim + 2
        for d in sorted(set(C.degrees()) | {edge}):
            if d > edge:
                continue
            if d < edge:
                rep.add("d", s.id, d, False, f"costalk {C[d]} nonzero at or below degree {edge - 1}")
            else:
                ok = C[d].is_torsion_free_for(wp)
                rep.add("d", s.id, d, ok, "" if ok else f"{C[d]} is not {wp}-torsion free")
    return rep


def _support(table: dict[str, GradedModule], strata_list: list[Stratum], j: int, q: Prime, singular_only: bool) -> Extended:
    best: Extended = NEG_INF
    wp = PrimeSet.of(q)
    for s in strata_list:
        if singular_only and s.is_regular:
            continue
        if not table[s.id][j].torsion_part(wp).is_zero():
            if best == NEG_INF or s.dim > best:
                best = s.dim
    return best


def support_dim(
    space: SpaceExpr,
    perv: Perversity,
    coeffs: CoefficientData | None = None,
    j: int = 0,
    q: Prime = F,
    *,
    stalks: dict[str, GradedModule] | None = None,
    singular_only: bool = False,
) -> Extended:
    """Largest stratum dimension where the degree-j stalk has nonzero T^{q}; -inf if none."""
    st = stalks if stalks is not None else all_stalks(space, perv)
    if coeffs is not None:
        st = dict(st)
        for s in strata(space):
            if s.is_regular:
                st[s.id] = coefficient_stalk(coeffs)
    return _support(st, strata(space), j, q, singular_only)


def cosupport_dim(
    space: SpaceExpr,
    perv: Perversity,
    coeffs: CoefficientData | None = None,
    j: int = 0,
    q: Prime = F,
    *,
    costalks: dict[str, GradedModule] | None = None,
    singular_only: bool = False,
) -> Extended:
    co = costalks if costalks is not None else all_costalks(space, perv)
    if coeffs is not None:
        co = dict(co)
        n = dim(space)
        for s in strata(space):
            if s.is_regular:
                co[s.id] = coefficient_stalk(coeffs).shift(n)
    return _support(co, strata(space), j, q, singular_only)


def occurring_primes(*tables: dict[str, GradedModule]) -> list[int]:
    out: set[int] = set()
    for table in tables:
        for G in table.values():
            out |= G.primes()
    return sorted(out)


def tax2_preconditions(space: SpaceExpr, perv: Perversity, coeffs: CoefficientData, weak: bool) -> list[str]:
    reasons: list[str] = []
    if not isinstance(perv, CodimPerversity):
        return ["support axioms need a codimension-indexed perversity"]
    cls = classify(perv)
    codims = {s.codim for s in strata(space) if s.is_singular}
    missing = sorted(k for k in codims if k not in perv)
    if missing:
        reasons.append(f"perversity table does not cover codimensions {missing}")
    if weak:
        if not cls.weakly_constrained:
            reasons.append(f"perversity is not weakly constrained (label {cls.label})")
        return reasons
    if not cls.strongly_constrained:
        reasons.append(f"perversity is not strongly constrained (label {cls.label})")
    elif 2 in perv:
        ok, why = is_adapted(perv, coeffs)
        if not ok:
            reasons.extend(f"not adapted: {w}" for w in why)
    if 1 in codims:
        reasons.append("space has codimension-one strata")
    return reasons


def _bound_text(b: Extended) -> str:
    return str(b)


def check_tax2(
    space: SpaceExpr,
    perv: Perversity,
    coeffs: CoefficientData | None = None,
    *,
    weak: bool = False,
    stalks: dict[str, GradedModule] | None = None,
    costalks: dict[str, GradedModule] | None = None,
    extra_primes: tuple[int, ...] = (),
) -> AxiomReport:
    """Evaluate the support and cosupport dimension bounds.

    The default form needs a strongly constrained perversity adapted to the
    coefficients and a space without codimension-one strata; violations raise
    :class:`PreconditionError`.  With ``weak=True`` only the growth, flat and
    step conditions are required, dimensions are taken over singular strata
    only and the inverse perversity uses its extended form.
    """
    coeffs = coeffs if coeffs is not None else leaf_of(space).coeffs
    reasons = tax2_preconditions(space, perv, coeffs, weak)
    if reasons:
        raise PreconditionError("; ".join(reasons), reasons)
    assert isinstance(perv, CodimPerversity)
    st, co = _tables(space, perv, stalks, costalks)
    n = dim(space)
    sl = strata(space)
    qperv = dual(perv)
    assert isinstance(qperv, CodimPerversity)
    rep = AxiomReport("TAx2" + (" (weak)" if weak else ""))
    primes: list[Prime] = [*sorted(set(occurring_primes(st, co)) | set(extra_primes)), F]
    p2_at_2 = perv.p2(2) if 2 in perv else PrimeSet.empty()

    for s in sl:
        low = st[s.id].min_degree()
        rep.add("a", s.id, low, low is None or low >= 0)
    for s in sl:
        if s.is_regular and not weak:
            want = coefficient_stalk(coeffs)
            rep.add("b", s.id, None, st[s.id] == want, "" if st[s.id] == want else f"stalk {st[s.id]} differs from {want}")

    def pinv(m: int, q: Prime) -> Extended:
        return p_inverse(perv, m, q, weak=weak)

    def qinv(m: int, q: Prime) -> Extended:
        return p_inverse(qperv, m, q, weak=weak)

    def record(clause, j, q, found, bound_inv, what):
        bound = n - bound_inv
        ok = found <= bound
        detail = f"{what} dim {found} vs bound {_bound_text(bound)}"
        rep.add(clause, None, j, ok, "" if ok else detail, q)

    stalk_degrees = sorted({d for G in st.values() for d in G.degrees()})
    for j in stalk_degrees:
        for q in primes:
            if weak:
                clause = "c"
            elif j > 1:
                clause = "c.a"
            elif j == 1 and q not in p2_at_2:
                clause = "c.b"
            else:
                continue
            found = _support(st, sl, j, q, weak)
            record(clause, j, q, found, pinv(j, q), "support")

    costalk_degrees = sorted({d for G in co.values() for d in G.degrees()})
    unbounded: list[str] = []
    for j in costalk_degrees:
        for q in primes:
            if weak:
                clause = "d"
                m = n - j if q == F else n - j + 1
            elif j < n:
                clause = "d.a"
                m = n - j if q == F else n - j + 1
            elif j == n and q != F and q in p2_at_2:
                clause = "d.b"
                m = 1
            else:
                found = _support(co, sl, j, q, weak)
                if found != NEG_INF:
                    unbounded.append(f"j={j} q={q}")
                continue
            found = _support(co, sl, j, q, weak)
            record(clause, j, q, found, qinv(m, q), "cosupport")
    if unbounded:
        rep.notes.append(
            "no cosupport bound is stated in these cases, so they are not checked: " + ", ".join(unbounded)
        )
    return rep


def tax_verdicts_agree(space: SpaceExpr, perv: CodimPerversity, coeffs: CoefficientData | None = None, **kw) -> bool:
    a = check_tax1prime(space, perv, coeffs, **kw)
    b = check_tax2(space, perv, coeffs, **kw)
    return a.passed == b.passed


__all__ = [
    "AxiomReport",
    "ClauseOutcome",
    "INF",
    "NEG_INF",
    "check_tax1prime",
    "check_tax2",
    "cosupport_dim",
    "occurring_primes",
    "support_dim",
    "tax2_preconditions",
]
