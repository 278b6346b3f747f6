"""ts-perversities: representation, duality, classification and the inverse function.

A perversity value is a pair ``(p1, p2)`` of an integer cutoff and a set of
primes whose torsion survives one degree past the cutoff.  Perversities come
in two flavours.  :class:`CodimPerversity` is a table indexed by codimension;
:class:`StratumPerversity` assigns values to named strata.  Both answer
``value_for(stratum_id, codim)`` so the calculators do not care which one
they were handed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from collections.abc import Iterable, Mapping
from typing import NamedTuple, Union

from tsdeligne.errors import MissingPerversityError, PreconditionError
from tsdeligne.fgmod import F, FgModule, Prime, PrimeSet


@total_ordering
class _Infinity:
    """Signed infinity used for inverse-perversity values and empty supports."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self) -> int:
        return hash(("inf", self.sign))

    def __lt__(self, other: object) -> bool:
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        if isinstance(other, int):
            return self.sign < 0
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        if isinstance(other, int):
            return self.sign > 0
        return NotImplemented

    def __neg__(self) -> _Infinity:
        return NEG_INF if self.sign > 0 else INF

    def __add__(self, other: object) -> _Infinity:
        if isinstance(other, int):
            return self
        if isinstance(other, _Infinity) and other.sign == self.sign:
            return self
        return NotImplemented

    __radd__ = __add__

    def __rsub__(self, other: object) -> _Infinity:
        # n - inf
        if isinstance(other, int):
            return -self
        return NotImplemented

    def __sub__(self, other: object) -> _Infinity:
        if isinstance(other, int):
            return self
        return NotImplemented

    def __repr__(self) -> str:
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self) -> str:
        return "inf" if self.sign > 0 else "-inf"


INF = _Infinity(1)
NEG_INF = _Infinity(-1)

Extended = Union[int, _Infinity]


def is_infinite(x: object) -> bool:
    return isinstance(x, _Infinity)


class PervValue(NamedTuple):
    p1: int
    p2: PrimeSet

    def to_text(self) -> str:
        return f"({self.p1}, {self.p2.to_text()})"


def _as_value(v) -> PervValue:
    if isinstance(v, PervValue):
        val = v
    else:
        p1, p2 = v
        if not isinstance(p2, PrimeSet):
            p2 = PrimeSet.of(*p2)
        val = PervValue(int(p1), p2)
    if val.p2.includes_f:
        raise ValueError("perversity prime sets never contain f")
    return val


@dataclass(frozen=True)
class CodimPerversity:
    """Perversity depending only on codimension, tabulated on ``start..max_codim``."""

    values: tuple[PervValue, ...]
    start: int = 2

    def __post_init__(self) -> None:
        if self.start < 1:
            raise ValueError("codimension tables start at 1 or later")
        if not self.values:
            raise ValueError("empty perversity table")
        object.__setattr__(self, "values", tuple(_as_value(v) for v in self.values))

    @classmethod
    def from_dict(cls, table: Mapping[int, object]) -> CodimPerversity:
        keys = sorted(table)
        if not keys:
            raise ValueError("empty perversity table")
        if keys != list(range(keys[0], keys[-1] + 1)):
            raise ValueError(f"codimension table has gaps: {keys}")
        return cls(tuple(table[k] for k in keys), keys[0])

    @classmethod
    def constant(cls, p1: int, p2: PrimeSet | None = None, max_codim: int = 8, start: int = 2) -> CodimPerversity:
        v = PervValue(p1, p2 or PrimeSet.empty())
        return cls((v,) * (max_codim - start + 1), start)

    @classmethod
    def from_function(cls, fn, max_codim: int, start: int = 2) -> CodimPerversity:
        return cls(tuple(fn(k) for k in range(start, max_codim + 1)), start)

    @classmethod
    def parse(cls, text: str) -> CodimPerversity:
        from tsdeligne.syntax import parse_perversity

        perv = parse_perversity(text)
        if not isinstance(perv, CodimPerversity):
            raise ValueError("expected a codimension-indexed table")
        return perv

    @property
    def max_codim(self) -> int:
        return self.start + len(self.values) - 1

    def codims(self) -> range:
        return range(self.start, self.max_codim + 1)

    def __contains__(self, k: int) -> bool:
        return self.start <= k <= self.max_codim

    def __call__(self, k: int) -> PervValue:
        if k not in self:
            raise MissingPerversityError(f"codim {k}", k)
        return self.values[k - self.start]

    def p1(self, k: int) -> int:
        return self(k).p1

    def p2(self, k: int) -> PrimeSet:
        return self(k).p2

    def value_for(self, stratum_id: str, codim: int) -> PervValue:
        if codim not in self:
            raise MissingPerversityError(stratum_id, codim)
        return self(codim)

    def items(self) -> list[tuple[int, PervValue]]:
        return list(zip(self.codims(), self.values))

    def to_text(self) -> str:
        body = " ".join(f"{k} = {v.to_text()};" for k, v in self.items())
        return "perversity { " + body + " }"

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class StratumPerversity:
    """Perversity given stratum by stratum, keyed on stratum ids."""

    values: tuple[tuple[str, PervValue], ...] = field(default=())

    def __post_init__(self) -> None:
        seen: dict[str, PervValue] = {}
        for sid, v in self.values:
            if sid in seen:
                raise ValueError(f"duplicate stratum id {sid!r}")
            seen[sid] = _as_value(v)
        object.__setattr__(self, "values", tuple(sorted(seen.items())))

    @classmethod
    def from_dict(cls, table: Mapping[str, object]) -> StratumPerversity:
        return cls(tuple(table.items()))

    def as_dict(self) -> dict[str, PervValue]:
        return dict(self.values)

    def __contains__(self, sid: str) -> bool:
        return sid in self.as_dict()

    def __call__(self, sid: str) -> PervValue:
        d = self.as_dict()
        if sid not in d:
            raise MissingPerversityError(sid)
        return d[sid]

    def value_for(self, stratum_id: str, codim: int) -> PervValue:
        d = self.as_dict()
        if stratum_id not in d:
            raise MissingPerversityError(stratum_id, codim)
        return d[stratum_id]

    def items(self) -> list[tuple[str, PervValue]]:
        return list(self.values)

    def to_text(self) -> str:
        body = " ".join(f'"{k}" = {v.to_text()};' for k, v in self.values)
        return "perversity { " + body + " }"

    def __str__(self) -> str:
        return self.to_text()


Perversity = Union[CodimPerversity, StratumPerversity]


@dataclass(frozen=True)
class CoefficientData:
    """Stalk data of a ts-coefficient system: ``h0`` in degree 0, ``h1`` in degree 1."""

    h0: FgModule = field(default_factory=lambda: FgModule(1))
    h1: FgModule = field(default_factory=FgModule)

    def __post_init__(self) -> None:
        if self.h1.free_rank:
            raise ValueError("h1 of a coefficient system must be a torsion module")
        shared = self.h0.primes() & self.h1.primes()
        if shared:
            raise ValueError(f"h0 and h1 share torsion primes {sorted(shared)}")

    @classmethod
    def trivial(cls) -> CoefficientData:
        return cls(FgModule(1), FgModule())

    def minimal_primes(self) -> PrimeSet:
        """Smallest prime set for which h1 is torsion and h0 torsion free."""
        return PrimeSet.of(*sorted(self.h1.primes()))

    def is_zero(self) -> bool:
        return self.h0.is_zero() and self.h1.is_zero()

    def is_standard(self) -> bool:
        return self == CoefficientData.trivial()

    def to_text(self) -> str:
        return f"[{self.h0}, {self.h1}]"


# ---------------------------------------------------------------------------
# Duality


def dual_value(v: PervValue, codim: int) -> PervValue:
    return PervValue(codim - 2 - v.p1, v.p2.prime_complement())


def dual(perv: Perversity, codims: Mapping[str, int] | None = None) -> Perversity:
    """Complementary perversity ``(codim - 2 - p1, primes - p2)``.

    Per-stratum perversities need ``codims``, mapping stratum id to codimension.
    """
    if isinstance(perv, CodimPerversity):
        return CodimPerversity(tuple(dual_value(v, k) for k, v in perv.items()), perv.start)
    if codims is None:
        raise PreconditionError("dual of a per-stratum perversity needs stratum codimensions")
    out = {}
    for sid, v in perv.items():
        if sid not in codims:
            raise PreconditionError(f"no codimension given for stratum {sid!r}")
        out[sid] = dual_value(v, codims[sid])
    return StratumPerversity.from_dict(out)


# ---------------------------------------------------------------------------
# Classification

CONDITION_NAMES = {
    "1": "depends only on codimension",
    "2": "growth: p1(k) <= p1(k+1) <= p1(k)+1",
    "3": "p1(2) in {-1, 0, 1}",
    "4": "p1 flat implies p2 grows",
    "5": "p1 steps up implies p2 shrinks",
}

LABELS = ("general", "weakly_constrained", "constrained", "strongly_constrained")


@dataclass(frozen=True)
class Classification:
    label: str
    conditions: dict[str, bool]
    failures: dict[str, list[int]]
    efficient: dict[int, bool]

    @property
    def is_efficient(self) -> bool:
        return all(self.efficient.values())

    @property
    def weakly_constrained(self) -> bool:
        return self.label != "general"

    @property
    def constrained(self) -> bool:
        return self.label in ("constrained", "strongly_constrained")

    @property
    def strongly_constrained(self) -> bool:
        return self.label == "strongly_constrained"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "conditions": dict(self.conditions),
            "failures": {k: list(v) for k, v in self.failures.items()},
            "efficient": {str(k): v for k, v in self.efficient.items()},
        }


def classify(perv: CodimPerversity) -> Classification:
    """Strongest constrained-ness label plus a per-condition breakdown.

    Conditions are numbered 1..5 in the usual order: codimension dependence,
    growth, the value at codimension 2, the flat rule and the step rule.
    Failures list the codimension ``k`` at which the (k, k+1) check failed.
    """
    if not isinstance(perv, CodimPerversity):
        raise PreconditionError("classification needs a codimension-indexed perversity")
    fails: dict[str, list[int]] = {c: [] for c in CONDITION_NAMES}
    for k in range(perv.start, perv.max_codim):
        a, b = perv(k), perv(k + 1)
        if not (a.p1 <= b.p1 <= a.p1 + 1):
            fails["2"].append(k)
        if b.p1 == a.p1 and not b.p2.issuperset(a.p2):
            fails["4"].append(k)
        if b.p1 == a.p1 + 1 and not b.p2.issubset(a.p2):
            fails["5"].append(k)
    if 2 not in perv or perv.p1(2) not in (-1, 0, 1):
        fails["3"].append(2)
    conds = {c: not v for c, v in fails.items()}
    weak = conds["2"] and conds["4"] and conds["5"]
    if not weak:
        label = "general"
    elif not conds["3"]:
        label = "weakly_constrained"
    elif perv.p1(2) == 0:
        label = "strongly_constrained"
    else:
        label = "constrained"
    eff = {k: -1 <= v.p1 <= k for k, v in perv.items()}
    return Classification(label, conds, {k: v for k, v in fails.items() if v}, eff)


def is_efficient_value(v: PervValue, codim: int) -> bool:
    return -1 <= v.p1 <= codim


# ---------------------------------------------------------------------------
# Adaptedness


def is_adapted(perv: CodimPerversity, coeffs: CoefficientData) -> tuple[bool, list[str]]:
    """Whether ``perv`` is adapted to ``coeffs``; returns the verdict and reasons."""
    if 2 not in perv:
        raise PreconditionError("adaptedness needs a value at codimension 2")
    p1, p2 = perv(2)
    h0, h1 = coeffs.h0, coeffs.h1
    reasons: list[str] = []
    if p1 == -1:
        if not h1.is_zero():
            reasons.append("p1(2) = -1 but h1 is nonzero")
        if not h0.is_torsion_for(p2):
            reasons.append(f"p1(2) = -1 but h0 is not {p2}-torsion")
    elif p1 == 0:
        if not h1.is_torsion_for(p2):
            reasons.append(f"p1(2) = 0 but h1 is not {p2}-torsion")
        if not h0.is_torsion_free_for(p2):
            reasons.append(f"p1(2) = 0 but h0 is not {p2}-torsion free")
    elif p1 == 1:
        if not h0.is_zero():
            reasons.append("p1(2) = 1 but h0 is nonzero")
        if not h1.is_torsion_free_for(p2):
            reasons.append(f"p1(2) = 1 but h1 is not {p2}-torsion free")
    else:
        raise PreconditionError(f"adaptedness is only defined for p1(2) in {{-1,0,1}}, got {p1}")
    return (not reasons, reasons)


# ---------------------------------------------------------------------------
# Inverse perversity


def _prime_in(q: Prime, s: PrimeSet) -> bool:
    # p2 never contains f, so f is never a member.
    return q != F and q in s


def p_inverse(perv: CodimPerversity, m: int, q: Prime, *, weak: bool = False, literal: bool = False) -> Extended:
    """The inverse perversity: the first codimension where degree ``m`` survives for ``q``.

    Returns ``min{c : p1(c) = m-1, q in p2(c)}`` when that set is nonempty,
    otherwise ``min{c : p1(c) = m}``, and :data:`INF` when both are empty.
    Codimensions range over the table from 2 on, or from the table's first
    codimension when ``weak`` is set; in the weak form any ``m`` below the
    first value of p1 maps to that first codimension.

    With ``literal`` the infinity rule is applied as the two explicit clauses
    ``m > p1(top) + 1`` or ``m == p1(top)`` with ``q`` outside ``p2(top)``,
    where ``top`` is the largest tabulated codimension.
    """
    cls = classify(perv)
    if not cls.weakly_constrained:
        raise PreconditionError(
            "the inverse perversity needs the growth, flat and step conditions",
            [f"condition {c} fails at codim {ks}" for c, ks in cls.failures.items() if c != "3"],
        )
    if q != F:
        if isinstance(q, bool) or not isinstance(q, int) or q not in PrimeSet.all_primes():
            raise ValueError(f"{q!r} is neither a prime nor f")
    lo = perv.start if weak else 2
    if lo not in perv:
        raise PreconditionError("the inverse perversity needs a value at codimension 2")
    if weak:
        if m < perv.p1(lo):
            return lo
    elif m < 0:
        raise PreconditionError("the inverse perversity is defined for m >= 0")
    top = perv.max_codim
    if literal:
        p1n, p2n = perv(top)
        if m > p1n + 1 or (m == p1n and not _prime_in(q, p2n)):
            return INF
    codims = range(lo, top + 1)
    first = [c for c in codims if perv.p1(c) == m - 1 and _prime_in(q, perv.p2(c))]
    if first:
        return first[0]
    second = [c for c in codims if perv.p1(c) == m]
    if second:
        return second[0]
    return INF


def q_inverse(perv: CodimPerversity, m: int, q: Prime, **kw) -> Extended:
    """Inverse of the dual perversity."""
    return p_inverse(dual(perv), m, q, **kw)


def monotone_holds(perv: CodimPerversity, k: int, m: int, q: Prime) -> bool:
    """Right-hand side of the monotone characterization of the inverse."""
    v = perv(k)
    return v.p1 >= m or (v.p1 == m - 1 and _prime_in(q, v.p2))


def perversity_primes(perv: Perversity) -> set[int]:
    """Primes listed explicitly in any value (members or cofinite exclusions)."""
    out: set[int] = set()
    for _, v in perv.items():
        out.update(v.p2.elements)
    return out


def codim_table(values: Iterable, start: int = 2) -> CodimPerversity:
    return CodimPerversity(tuple(values), start)
