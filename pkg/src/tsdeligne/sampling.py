"""Seeded random generators for modules, matrices, perversities and spaces.

All generators take a :class:`random.Random` so sweeps are reproducible.
"""

from __future__ import annotations

import random
from collections.abc import Sequence

from tsdeligne.fgmod import FgModule, GradedModule, PrimeSet
from tsdeligne.perversity import CodimPerversity, CoefficientData, PervValue
from tsdeligne.space import Cone, Leaf, ProdR, SpaceExpr, SphereJoin, Susp, dim, strata

SMALL_PRIMES = (2, 3, 5, 7)


def random_module(
    rng: random.Random,
    max_rank: int = 4,
    primes: Sequence[int] = SMALL_PRIMES,
    max_exp: int = 4,
    max_torsion: int = 4,
) -> FgModule:
    rank = rng.randint(0, max_rank)
    torsion = tuple((rng.choice(primes), rng.randint(1, max_exp)) for _ in range(rng.randint(0, max_torsion)))
    return FgModule(rank, torsion)


def random_prime_set(
    rng: random.Random, primes: Sequence[int] = SMALL_PRIMES, allow_f: bool = True, allow_cofinite: bool = True
) -> PrimeSet:
    chosen = tuple(p for p in primes if rng.random() < 0.5)
    cof = allow_cofinite and rng.random() < 0.3
    with_f = allow_f and rng.random() < 0.5
    return PrimeSet(chosen, cof, with_f)


def random_matrix(rng: random.Random, max_rows: int = 5, max_cols: int = 5, bound: int = 9) -> list[list[int]]:
    m, n = rng.randint(1, max_rows), rng.randint(1, max_cols)
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)]


def random_graded(
    rng: random.Random, max_degree: int = 4, primes: Sequence[int] = (2, 3, 5), density: float = 0.7
) -> GradedModule:
    entries = []
    for d in range(max_degree + 1):
        if rng.random() < density:
            entries.append((d, random_module(rng, 2, primes, 2, 2)))
    return GradedModule(tuple(entries))


def random_perversity(rng: random.Random, max_codim: int = 8, primes: Sequence[int] = SMALL_PRIMES) -> CodimPerversity:
    """Either an unconstrained table or a strongly constrained one, half the time each."""
    if rng.random() < 0.5:
        return random_strong_perversity(rng, max_codim, primes)
    vals = [
        PervValue(rng.randint(-2, k), random_prime_set(rng, primes, allow_f=False))
        for k in range(2, max_codim + 1)
    ]
    return CodimPerversity(tuple(vals), 2)


def _grow(rng: random.Random, s: PrimeSet, primes: Sequence[int]) -> PrimeSet:
    return s.union(PrimeSet.of(*[p for p in primes if rng.random() < 0.3]))


def _shrink(rng: random.Random, s: PrimeSet, primes: Sequence[int]) -> PrimeSet:
    return s.difference(PrimeSet.of(*[p for p in primes if rng.random() < 0.3]))


def random_strong_perversity(
    rng: random.Random, max_codim: int = 8, primes: Sequence[int] = SMALL_PRIMES, p1_at_2: int = 0, start: int = 2
) -> CodimPerversity:
    """A table satisfying the growth, flat and step rules with the given value at codim 2."""
    values: list[PervValue] = []
    if start == 1:
        # Walk backwards one step so codim 2 still gets p1_at_2.
        p1 = p1_at_2 - rng.randint(0, 1)
    else:
        p1 = p1_at_2
    p2 = random_prime_set(rng, primes, allow_f=False)
    values.append(PervValue(p1, p2))
    for k in range(start + 1, max_codim + 1):
        if k == 2:
            step = p1_at_2 - p1
        else:
            step = rng.randint(0, 1)
        p1 += step
        p2 = _shrink(rng, p2, primes) if step else _grow(rng, p2, primes)
        values.append(PervValue(p1, p2))
    return CodimPerversity(tuple(values), start)


def random_coeffs_adapted(rng: random.Random, perv: CodimPerversity, primes: Sequence[int] = (2, 3, 5)) -> CoefficientData:
    """Coefficient data adapted to a strongly constrained ``perv`` (so p1(2) = 0)."""
    p2 = perv.p2(2)
    inside = [p for p in primes if p in p2]
    outside = [p for p in primes if p not in p2]
    h0 = FgModule(rng.randint(0, 2), tuple((p, rng.randint(1, 2)) for p in outside if rng.random() < 0.4))
    h1 = FgModule(0, tuple((p, rng.randint(1, 2)) for p in inside if rng.random() < 0.4))
    return CoefficientData(h0, h1)


def random_leaf(
    rng: random.Random,
    max_dim: int = 4,
    primes: Sequence[int] = (2, 3, 5),
    coeffs: CoefficientData | None = None,
    min_dim: int = 0,
) -> Leaf:
    d = rng.randint(min_dim, max_dim)
    return Leaf(d, random_graded(rng, d, primes), coeffs or CoefficientData())


def random_space(
    rng: random.Random,
    max_depth: int = 4,
    max_leaf_dim: int = 3,
    primes: Sequence[int] = (2, 3, 5),
    coeffs: CoefficientData | None = None,
    allow_codim_one: bool = True,
) -> SpaceExpr:
    """A nested composition of susp/join over a leaf, optionally wrapped in cone and prod."""
    min_dim = 0 if allow_codim_one else 1
    node: SpaceExpr = random_leaf(rng, max_leaf_dim, primes, coeffs, min_dim)
    depth = rng.randint(0, max_depth)
    wrap_cone = depth > 0 and rng.random() < 0.3
    wrap_prod = depth > 0 and rng.random() < 0.3
    core = depth - int(wrap_cone) - int(wrap_prod)
    for _ in range(max(core, 0)):
        if rng.random() < 0.5:
            node = Susp(node)
        else:
            node = SphereJoin(rng.randint(1, 3), node)
    if wrap_cone:
        node = Cone(node)
    if wrap_prod:
        node = ProdR(rng.randint(1, 2), node)
    return node


def max_codim(space: SpaceExpr) -> int:
    return max([s.codim for s in strata(space)] + [2])


def random_value(rng: random.Random, lo: int, hi: int, primes: Sequence[int] = (2, 3, 5)) -> PervValue:
    return PervValue(rng.randint(lo, hi), random_prime_set(rng, primes, allow_f=False, allow_cofinite=True))


def perversity_covering(perv_fn, space: SpaceExpr) -> CodimPerversity:
    return perv_fn(max(dim(space), max_codim(space)))
