"""Independent reference computations used to cross-check the package.

Nothing here imports the package's algebra; the oracles work from raw
integer data only.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter


def bareiss_det(M: list[list[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    A = [row[:] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def minor_gcd(M: list[list[int]], j: int) -> int:
    """gcd of all j x j minors of M (0 if every minor vanishes)."""
    rows, cols = len(M), len(M[0]) if M else 0
    g = 0
    for rs in itertools.combinations(range(rows), j):
        for cs in itertools.combinations(range(cols), j):
            g = math.gcd(g, bareiss_det([[M[r][c] for c in cs] for r in rs]))
            if g == 1:
                return 1
    return g


def invariant_factors_by_minors(M: list[list[int]]) -> list[int]:
    """d_j = D_j / D_{j-1} where D_j is the gcd of j x j minors."""
    rows, cols = len(M), len(M[0]) if M else 0
    out, prev = [], 1
    for j in range(1, min(rows, cols) + 1):
        D = minor_gcd(M, j)
        if D == 0:
            out.extend([0] * (min(rows, cols) - j + 1))
            break
        out.append(D // prev)
        prev = D
    return out


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def element_orders(orders: list[int]) -> Counter:
    """Multiset of element orders of Z/n1 x Z/n2 x ... by enumeration."""
    c: Counter = Counter()
    for elem in itertools.product(*[range(n) for n in orders]):
        o = 1
        for x, n in zip(elem, orders):
            o = math.lcm(o, n // math.gcd(x, n))
        c[o] += 1
    return c


def prime_divisors(n: int) -> set[int]:
    out, p = set(), 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


def torsion_subgroup_orders(orders: list[int], primes: set[int]) -> Counter:
    """Element-order multiset of the subgroup of elements whose order uses only ``primes``."""
    full = element_orders(orders)
    return Counter({o: c for o, c in full.items() if prime_divisors(o) <= primes})


def orders_from_prime_powers(powers: list[int]) -> Counter:
    """Element-order multiset of a direct sum of cyclic groups of the given orders."""
    return element_orders(powers)
