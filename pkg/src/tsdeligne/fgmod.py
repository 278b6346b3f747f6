"""Finitely generated abelian groups, (co)finite prime sets, and Smith normal form.

Modules are kept in primary-decomposition form: a free rank plus a sorted
multiset of prime powers.  Two values compare equal exactly when the groups
are isomorphic, so structural equality is the isomorphism test everywhere in
the package.

>>> A = FgModule.parse("Z + Z/12")
>>> str(A.torsion_part(PrimeSet.of(2)))
'Z/4'
>>> str(A.quotient_by_torsion(PrimeSet.of(2)))
'Z + Z/3'
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

from sympy import factorint, isprime

# The formally adjoined element of P_+(Z).
F = "f"

Prime = Union[int, str]


def _check_prime(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
        raise ValueError(f"{p!r} is not a rational prime")
    return p


@dataclass(frozen=True)
class PrimeSet:
    """A finite or cofinite set of rational primes, optionally containing ``F``.

    ``elements`` lists the members when ``cofinite`` is false and the excluded
    primes when it is true.
    """

    elements: tuple[int, ...] = ()
    cofinite: bool = False
    includes_f: bool = False

    def __post_init__(self) -> None:
        elems = tuple(sorted({_check_prime(int(p)) for p in self.elements}))
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, *primes: Prime) -> PrimeSet:
        """Finite set from a list of primes; ``F`` may be among them."""
        has_f = any(p == F for p in primes)
        return cls(tuple(p for p in primes if p != F), False, has_f)

    @classmethod
    def empty(cls) -> PrimeSet:
        return cls()

    @classmethod
    def all_primes(cls, excluding: Iterable[int] = (), *, with_f: bool = False) -> PrimeSet:
        return cls(tuple(excluding), True, with_f)

    @property
    def is_finite(self) -> bool:
        return not self.cofinite

    def __contains__(self, q: object) -> bool:
        if q == F:
            return self.includes_f
        if not isinstance(q, int) or isinstance(q, bool):
            return False
        if self.cofinite:
            return q not in self.elements and isprime(q)
        return q in self.elements

    def member(self, q: Prime) -> bool:
        return q in self

    def complement(self) -> PrimeSet:
        """Complement inside P_+(Z); toggles finiteness and membership of F."""
        return PrimeSet(self.elements, not self.cofinite, not self.includes_f)

    def prime_complement(self) -> PrimeSet:
        """Complement inside P(Z); the result never contains F."""
        return PrimeSet(self.elements, not self.cofinite, False)

    def without_f(self) -> PrimeSet:
        return PrimeSet(self.elements, self.cofinite, False)

    def with_f(self) -> PrimeSet:
        return PrimeSet(self.elements, self.cofinite, True)

    def union(self, other: PrimeSet) -> PrimeSet:
        a, b = set(self.elements), set(other.elements)
        f = self.includes_f or other.includes_f
        if self.cofinite and other.cofinite:
            return PrimeSet(tuple(a & b), True, f)
        if self.cofinite:
            return PrimeSet(tuple(a - b), True, f)
        if other.cofinite:
            return PrimeSet(tuple(b - a), True, f)
        return PrimeSet(tuple(a | b), False, f)

    def intersect(self, other: PrimeSet) -> PrimeSet:
        # De Morgan keeps the case analysis in one place.
        return self.complement().union(other.complement()).complement()

    def difference(self, other: PrimeSet) -> PrimeSet:
        return self.intersect(other.complement())

    def issubset(self, other: PrimeSet) -> bool:
        if self.includes_f and not other.includes_f:
            return False
        a, b = set(self.elements), set(other.elements)
        if not self.cofinite and not other.cofinite:
            return a <= b
        if not self.cofinite:
            return not (a & b)
        if not other.cofinite:
            return False
        return b <= a

    def issuperset(self, other: PrimeSet) -> bool:
        return other.issubset(self)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __le__ = issubset
    __ge__ = issuperset

    def __invert__(self) -> PrimeSet:
        return self.complement()

    def to_text(self) -> str:
        listed = ",".join(str(p) for p in self.elements)
        if self.cofinite:
            head = "all+f" if self.includes_f else "all"
            return f"{head} \\ {{{listed}}}" if self.elements else head
        items = [str(p) for p in self.elements] + ([F] if self.includes_f else [])
        return "{" + ",".join(items) + "}"

    def __str__(self) -> str:
        return self.to_text()

    @classmethod
    def parse(cls, text: str) -> PrimeSet:
        from tsdeligne.syntax import parse_prime_set

        return parse_prime_set(text)


def pset_op(op: str, *args):
    """Dispatch one of the five prime-set operations by name."""
    if op == "complement":
        (a,) = args
        return a.complement()
    if op == "union":
        a, b = args
        return a.union(b)
    if op == "intersect":
        a, b = args
        return a.intersect(b)
    if op == "member":
        a, q = args
        return a.member(q)
    if op == "subset":
        a, b = args
        return a.issubset(b)
    raise ValueError(f"unknown prime-set operation {op!r}")


def prime_power_factors(n: int) -> list[tuple[int, int]]:
    """Primary decomposition of Z/n as a list of (p, e), n >= 1."""
    if n < 1:
        raise ValueError(f"cyclic order must be positive, got {n}")
    return sorted(factorint(n).items())


@dataclass(frozen=True)
class FgModule:
    """A finitely generated Z-module ``Z^free_rank + sum Z/p^e``."""

    free_rank: int = 0
    torsion: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        entries = []
        for p, e in self.torsion:
            _check_prime(int(p))
            if e < 1:
                raise ValueError(f"torsion exponent must be >= 1, got {p}^{e}")
            entries.append((int(p), int(e)))
        object.__setattr__(self, "torsion", tuple(sorted(entries)))

    @classmethod
    def zero(cls) -> FgModule:
        return cls()

    @classmethod
    def free(cls, rank: int = 1) -> FgModule:
        return cls(rank)

    @classmethod
    def cyclic(cls, n: int) -> FgModule:
        """Z/n for n >= 1 (Z/1 = 0); ``n == 0`` gives Z."""
        if n == 0:
            return cls(1)
        return cls(0, tuple(prime_power_factors(abs(n))))

    @classmethod
    def from_orders(cls, free_rank: int, orders: Iterable[int] = ()) -> FgModule:
        torsion: list[tuple[int, int]] = []
        for n in orders:
            torsion.extend(prime_power_factors(n))
        return cls(free_rank, tuple(torsion))

    @classmethod
    def parse(cls, text: str) -> FgModule:
        from tsdeligne.syntax import parse_group

        return parse_group(text)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __bool__(self) -> bool:
        return not self.is_zero()

    def primes(self) -> frozenset[int]:
        return frozenset(p for p, _ in self.torsion)

    def is_torsion(self) -> bool:
        return self.free_rank == 0

    def torsion_order(self) -> int:
        return math.prod(p**e for p, e in self.torsion)

    def direct_sum(self, other: FgModule) -> FgModule:
        return FgModule(self.free_rank + other.free_rank, self.torsion + other.torsion)

    __add__ = direct_sum

    def torsion_part(self, wp: PrimeSet) -> FgModule:
        """T^wp of this module.

        Without F in ``wp`` this is the wp-torsion submodule; with F it is the
        quotient by the complementary torsion, which keeps the free part.
        """
        kept = tuple((p, e) for p, e in self.torsion if p in wp)
        return FgModule(self.free_rank if wp.includes_f else 0, kept)

    def quotient_by_torsion(self, wp: PrimeSet) -> FgModule:
        if wp.includes_f:
            raise ValueError("quotient_by_torsion needs a prime set without F")
        return self.torsion_part(wp.complement())

    def is_torsion_for(self, wp: PrimeSet) -> bool:
        """True when this module is wp-torsion."""
        return self.torsion_part(wp) == self

    def is_torsion_free_for(self, wp: PrimeSet) -> bool:
        return self.torsion_part(wp).is_zero()

    def invariant_factors(self) -> tuple[int, ...]:
        """Invariant factors d1 | d2 | ... of the torsion part (all > 1)."""
        by_prime: dict[int, list[int]] = {}
        for p, e in self.torsion:
            by_prime.setdefault(p, []).append(e)
        length = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * length
        for p, exps in by_prime.items():
            exps = sorted(exps, reverse=True)
            for i, e in enumerate(exps):
                factors[length - 1 - i] *= p**e
        return tuple(factors)

    def to_text(self, unicode: bool = False) -> str:
        z = "ℤ" if unicode else "Z"
        parts = []
        if self.free_rank == 1:
            parts.append(z)
        elif self.free_rank > 1:
            parts.append(f"{z}^{self.free_rank}")
        parts.extend(f"{z}/{n}" for n in sorted(p**e for p, e in self.torsion))
        if not parts:
            return "0"
        return (" ⊕ " if unicode else " + ").join(parts)

    def __str__(self) -> str:
        return self.to_text()


def direct_sum(a: FgModule, b: FgModule) -> FgModule:
    return a.direct_sum(b)


def torsion_part(a: FgModule, wp: PrimeSet) -> FgModule:
    return a.torsion_part(wp)


def quotient_by_torsion(a: FgModule, wp: PrimeSet) -> FgModule:
    return a.quotient_by_torsion(wp)


ZERO = FgModule()
Z = FgModule(1)


@dataclass(frozen=True)
class GradedModule:
    """Sparse degree -> FgModule map; zero entries are never stored."""

    entries: tuple[tuple[int, FgModule], ...] = ()

    def __post_init__(self) -> None:
        acc: dict[int, FgModule] = {}
        for deg, mod in self.entries:
            acc[int(deg)] = acc.get(int(deg), ZERO) + mod
        clean = tuple(sorted((d, m) for d, m in acc.items() if not m.is_zero()))
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dict(cls, d: Mapping[int, FgModule]) -> GradedModule:
        return cls(tuple(d.items()))

    @classmethod
    def from_list(cls, mods: Sequence[FgModule | str], start: int = 0) -> GradedModule:
        """Degrees ``start, start+1, ...``; strings are parsed as groups."""
        items = [(start + i, FgModule.parse(m) if isinstance(m, str) else m) for i, m in enumerate(mods)]
        return cls(tuple(items))

    @classmethod
    def zero(cls) -> GradedModule:
        return cls()

    def __getitem__(self, deg: int) -> FgModule:
        for d, m in self.entries:
            if d == deg:
                return m
        return ZERO

    def __iter__(self) -> Iterator[tuple[int, FgModule]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def degrees(self) -> list[int]:
        return [d for d, _ in self.entries]

    def is_zero(self) -> bool:
        return not self.entries

    def min_degree(self) -> int | None:
        return self.entries[0][0] if self.entries else None

    def max_degree(self) -> int | None:
        return self.entries[-1][0] if self.entries else None

    def shift(self, n: int) -> GradedModule:
        """Entry of degree d moves to degree d + n."""
        return GradedModule(tuple((d + n, m) for d, m in self.entries))

    def direct_sum(self, other: GradedModule) -> GradedModule:
        return GradedModule(self.entries + other.entries)

    __add__ = direct_sum

    def as_dict(self) -> dict[int, FgModule]:
        return dict(self.entries)

    def primes(self) -> frozenset[int]:
        out: set[int] = set()
        for _, m in self.entries:
            out |= m.primes()
        return frozenset(out)

    def to_list(self) -> list[FgModule]:
        """Dense list from degree 0 to the top degree; needs no negative degrees."""
        if not self.entries:
            return []
        if self.entries[0][0] < 0:
            raise ValueError("graded module has negative degrees")
        return [self[d] for d in range(self.entries[-1][0] + 1)]

    def to_text(self, unicode: bool = False) -> str:
        if not self.entries:
            return "0"
        lo, hi = self.entries[0][0], self.entries[-1][0]
        return " | ".join(f"{d}: {self[d].to_text(unicode)}" for d in range(lo, hi + 1))

    def __str__(self) -> str:
        return self.to_text()


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with U, V unimodular and D diagonal."""

    diagonal: tuple[int, ...]
    D: tuple[tuple[int, ...], ...]
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    shape: tuple[int, int] = field(default=(0, 0))


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _as_int_matrix(M) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in M]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def smith_normal_form(M) -> SmithForm:
    """Smith normal form over Z with unimodular transforms.

    Pivots on the smallest nonzero absolute value in the remaining block.
    Entries are Python ints throughout, so nothing overflows.
    """
    A = _as_int_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, c: int) -> None:
        # row_dst += c * row_src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, c: int) -> None:
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            piv = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
            # Remainders are smaller than the pivot; move the smallest in.
            cand = None
            for i in range(t + 1, m):
                if A[i][t] and (cand is None or abs(A[i][t]) < abs(cand[2])):
                    cand = ("r", i, A[i][t])
            for j in range(t + 1, n):
                if A[t][j] and (cand is None or abs(A[t][j]) < abs(cand[2])):
                    cand = ("c", j, A[t][j])
            if cand is not None:
                if cand[0] == "r":
                    swap_rows(t, cand[1])
                else:
                    swap_cols(t, cand[1])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]

    diag = tuple(A[i][i] for i in range(min(m, n)))
    freeze = lambda X: tuple(tuple(r) for r in X)  # noqa: E731
    return SmithForm(diag, freeze(A), freeze(U), freeze(V), (m, n))


def cokernel(M, ambient_rank: int) -> FgModule:
    """Z^ambient_rank modulo the column span of ``M`` (ambient_rank rows)."""
    A = _as_int_matrix(M)
    if ambient_rank < 0:
        raise ValueError("ambient rank must be non-negative")
    if not A:
        # No relations at all.
        return FgModule(ambient_rank)
    if len(A) != ambient_rank:
        raise ValueError(f"matrix has {len(A)} rows but ambient rank is {ambient_rank}")
    if not A[0]:
        return FgModule(ambient_rank)
    snf = smith_normal_form(A)
    nonzero = [d for d in snf.diagonal if d]
    return FgModule.from_orders(ambient_rank - len(nonzero), nonzero)


def module_counts(a: FgModule) -> Counter:
    """Multiset view of the summands, handy for comparisons in reports."""
    c = Counter({"Z": a.free_rank}) if a.free_rank else Counter()
    c.update(p**e for p, e in a.torsion)
    return c
