"""Acceptance suite: one test per criterion, each recording a pass/fail line.

Run under pytest to get the summary section, or directly with
``python tests/test_acceptance.py`` to print the lines to stdout.
"""

from __future__ import annotations

import io
import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import bareiss_det, matmul, minor_gcd  # noqa: E402

from tsdeligne.axioms import check_tax1prime, check_tax2  # noqa: E402
from tsdeligne.cli import NECESSITY_E, NECESSITY_P2, run  # noqa: E402
from tsdeligne.compat import (  # noqa: E402
    demo_join_vs_susp,
    demo_necessity_sing_in_reg,
    demo_necessity_sing_in_sing,
    join_susp_setup,
)
from tsdeligne.fgmod import F, GradedModule, PrimeSet, smith_normal_form  # noqa: E402
from tsdeligne.perversity import (  # noqa: E402
    CodimPerversity,
    PervValue,
    classify,
    dual,
    is_adapted,
    is_efficient_value,
    p_inverse,
)
from tsdeligne.sampling import (  # noqa: E402
    random_coeffs_adapted,
    random_graded,
    random_matrix,
    random_module,
    random_perversity,
    random_prime_set,
    random_space,
    random_strong_perversity,
)
from tsdeligne.sheafcalc import stalk  # noqa: E402
from tsdeligne.space import Leaf, has_codim_one, leaf_of, strata  # noqa: E402
from tsdeligne.syntax import parse_perversity, parse_space  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
GOLDEN = Path(__file__).parent / "golden"

PERV_TABLE = parse_perversity(
    "perversity { 2 = (0, {}); 3 = (0, {2}); 4 = (0, {2,3}); 5 = (1, {}); 6 = (1, {});"
    " 7 = (1, {2,5}); 8 = (2, {5}); 9 = (3, {5}); 10 = (3, {2,5,7}); 11 = (4, {}); }"
)


def _timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


# ---------------------------------------------------------------------------


def criterion_1():
    rng = random.Random(1001)
    for _ in range(1000):
        A = random_module(rng, 4, (2, 3, 5, 7), 4)
        wp = random_prime_set(rng, (2, 3, 5, 7))
        if A.torsion_part(wp) + A.torsion_part(wp.complement()) != A:
            return False, f"decomposition fails for {A} and {wp}"
    return True, "1000 modules"


def criterion_2():
    rng = random.Random(2002)
    for _ in range(500):
        M = random_matrix(rng, 5, 5, 9)
        snf = smith_normal_form(M)
        U, V, D = [list(r) for r in snf.U], [list(r) for r in snf.V], [list(r) for r in snf.D]
        if matmul(matmul(U, M), V) != D:
            return False, f"U M V != D for {M}"
        if abs(bareiss_det(U)) != 1 or abs(bareiss_det(V)) != 1:
            return False, f"transforms not unimodular for {M}"
        m, n = len(M), len(M[0])
        if any(D[i][j] for i in range(m) for j in range(n) if i != j):
            return False, f"D not diagonal for {M}"
        d = snf.diagonal
        if any(x < 0 for x in d):
            return False, f"negative invariant factor for {M}"
        for a, b in zip(d, d[1:]):
            if (a == 0 and b != 0) or (a != 0 and b % a):
                return False, f"divisibility chain broken for {M}: {d}"
        prod = 1
        for j in range(1, len(d) + 1):
            prod *= d[j - 1]
            if prod != minor_gcd(M, j):
                return False, f"minor gcd mismatch at j={j} for {M}"
    return True, "500 matrices"


def criterion_3():
    got = (
        p_inverse(PERV_TABLE, 1, 2),
        p_inverse(PERV_TABLE, 1, 5),
        [p_inverse(PERV_TABLE, 0, q) for q in (2, 3, F)],
    )
    want = (3, 5, [2, 2, 2])
    return got == want, f"got {got}"


def criterion_4():
    rng = random.Random(4004)
    strong = 0
    for _ in range(500):
        P = random_perversity(rng, 8)
        D = dual(P)
        if dual(D) != P:
            return False, f"dual is not an involution on {P}"
        a, b = classify(P).strongly_constrained, classify(D).strongly_constrained
        if a != b:
            return False, f"strong constraint not preserved by duality for {P}"
        strong += a
    return True, f"500 tables, {strong} strongly constrained"


def invariance_instances(seed: int = 5005, n: int = 200):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        d = rng.randint(0, 4)
        X = Leaf(d, random_graded(rng, d, (2, 3, 5)))
        k = rng.choice((1, 2, 3))
        p1 = rng.randint(-1, d + 1)
        p2 = random_prime_set(rng, (2, 3, 5), allow_f=False)
        out.append((k, X, p1, p2))
    return out


def criterion_5():
    for k, X, p1, p2 in invariance_instances():
        rep = demo_join_vs_susp(k, X, p1, p2)
        if not rep.equal:
            return False, f"join {rep.join} != susp {rep.susp} for k={k} X={X.cohom} p=({p1}, {p2})"
    return True, "200 instances"


def nested_instances(seed: int = 6006, n: int = 200):
    """Nested spaces paired with codimension-indexed perversities.

    Half of the perversities are strongly constrained with adapted
    coefficients; the rest are arbitrary tables.
    """
    rng = random.Random(seed)
    out = []
    for i in range(n):
        if i % 2 == 0:
            perv = random_strong_perversity(rng, 18, (2, 3, 5), start=1)
            coeffs = random_coeffs_adapted(rng, perv)
        else:
            perv = CodimPerversity.from_function(
                lambda k: PervValue(rng.randint(-2, k + 1), random_prime_set(rng, (2, 3, 5), allow_f=False)), 18, 1
            )
            coeffs = None
        X = random_space(rng, 4, 3, coeffs=coeffs)
        out.append((X, perv))
    return out


def axiom_instance_set():
    inst = []
    for k, X, p1, p2 in invariance_instances():
        J, S, pj, ps, _ = join_susp_setup(k, X, PervValue(p1, p2))
        inst.append((J, pj))
        inst.append((S, ps))
    inst.extend(nested_instances())
    return inst


def criterion_6():
    tax2_count = 0
    for X, perv in axiom_instance_set():
        a = check_tax1prime(X, perv)
        if not a.passed:
            return False, f"stalk/costalk axioms fail: {a.summary()}"
        if not isinstance(perv, CodimPerversity) or has_codim_one(X):
            continue
        if not classify(perv).strongly_constrained or not is_adapted(perv, leaf_of(X).coeffs)[0]:
            continue
        b = check_tax2(X, perv, extra_primes=(7,))
        tax2_count += 1
        if not b.passed or b.passed != a.passed:
            return False, f"support axioms disagree: {b.summary()}"
    if tax2_count < 50:
        return False, f"only {tax2_count} instances reached the support axioms"
    return True, f"{tax2_count} instances checked against both axiom systems"


def criterion_7():
    checked = 0
    for X, perv in axiom_instance_set():
        for s in strata(X):
            if s.is_regular:
                continue
            if not is_efficient_value(perv.value_for(s.id, s.codim), s.codim):
                continue
            checked += 1
            H = stalk(X, perv, s)
            top = H.max_degree()
            if top is not None and top > s.codim:
                return False, f"stalk {H} at codim {s.codim} in {X}"
    return checked > 0, f"{checked} efficient strata"


def criterion_8():
    count = 0
    for k in (1, 3, 4):
        for p1 in range(-2, k + 2):
            for p2 in NECESSITY_P2:
                for E in NECESSITY_E:
                    rep = demo_necessity_sing_in_reg(k, E, PervValue(p1, p2))
                    count += 1
                    if k == 1:
                        if rep.match:
                            return False, f"k=1 matched for E={E.to_text()} p=({p1}, {p2})"
                        continue
                    on_list = bool(rep.scenarios)
                    if rep.match != on_list or rep.condition2 != on_list:
                        return False, f"k={k} E={E.to_text()} p=({p1}, {p2}): match {rep.match}, list {rep.scenarios}"
    return True, f"{count} cases"


def criterion_9():
    L = parse_space("leaf(dim=1, H=[Z, Z/6])")
    bar = PervValue(0, PrimeSet.of(2))
    g = GradedModule.from_list
    expected = [
        ((2, PrimeSet.of(2)), g(["Z", "Z/2"]), g(["Z", "Z/2"]), True),
        ((2, PrimeSet.of(2, 3)), g(["Z", "Z/2", "0", "Z/3"]), g(["Z", "Z/2"]), False),
        ((-1, PrimeSet.of(2)), GradedModule(), g(["Z", "Z/2"]), False),
    ]
    for pv, refined, coarse, match in expected:
        rep = demo_necessity_sing_in_sing(1, L, PervValue(*pv), bar)
        if (rep.refined, rep.coarse, rep.match) != (refined, coarse, match):
            return False, f"p_V={pv}: refined {rep.refined} coarse {rep.coarse}"
    return True, "3 worked examples"


GOLDEN_CASES = [
    ("compute", "susp_compute"),
    ("compute", "join_compute"),
    ("pinv", "perv_table"),
    ("pinv", "perv_table_q5"),
    ("classify", "perv_table"),
    ("classify", "zero_perv"),
    ("classify", "general_perv"),
]


def criterion_10(tmp_dir: Path):
    for cmd, name in GOLDEN_CASES:
        for attempt in range(2):
            buf = io.StringIO()
            path = tmp_dir / f"{cmd}_{name}_{attempt}.json"
            code, report = run([cmd, str(SCENARIOS / f"{name}.scn"), "--json", str(path)], out=buf)
            if code != 0:
                return False, f"{cmd} {name} exited {code}"
            want = (GOLDEN / f"{cmd}_{name}.txt").read_text(encoding="utf-8")
            if buf.getvalue() != want:
                return False, f"{cmd} {name} output differs from golden file"
            if json.loads(path.read_text(encoding="utf-8")) != report:
                return False, f"{cmd} {name} JSON does not round-trip"
    return True, f"{len(GOLDEN_CASES)} golden files"


# ---------------------------------------------------------------------------

LIMITS = {1: 1.0, 2: 5.0, 4: 1.0, 5: 5.0, 6: 10.0, 8: 5.0}
TITLES = {
    1: "torsion decomposition",
    2: "Smith normal form against minors",
    3: "inverse perversity golden values",
    4: "duality involution and strong constraint",
    5: "sphere join equals iterated suspension",
    6: "axiom conformance and agreement",
    7: "efficiency vanishing",
    8: "singular-in-regular necessity sweep",
    9: "singular-in-singular worked examples",
    10: "CLI golden files and JSON round-trip",
}
FUNCS = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def evaluate(n: int, tmp_dir: Path | None = None):
    fn = FUNCS.get(n) or (lambda: criterion_10(tmp_dir))
    ok, detail, elapsed = _timed(fn)
    limit = LIMITS.get(n)
    if limit is not None:
        detail = f"{detail}; {elapsed:.2f}s of {limit:.0f}s"
        if elapsed >= limit:
            ok = False
    return ok, detail


@pytest.mark.parametrize("n", list(range(1, 11)))
def test_acceptance_criterion(n, record_acceptance, tmp_path):
    ok, detail = evaluate(n, tmp_path)
    record_acceptance(n, TITLES[n], ok, detail)
    print(f"criterion {n} {'PASS' if ok else 'FAIL'}: {TITLES[n]} ({detail})")
    assert ok, detail


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        results = [(n, *evaluate(n, Path(d))) for n in range(1, 11)]
    for n, ok, detail in results:
        print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {TITLES[n]} ({detail})")
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)
