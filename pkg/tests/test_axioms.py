import json
import random

import pytest

from tsdeligne.axioms import (
    AxiomReport,
    check_tax1prime,
    check_tax2,
    cosupport_dim,
    support_dim,
)
from tsdeligne.errors import PreconditionError
from tsdeligne.fgmod import F, FgModule, GradedModule, PrimeSet
from tsdeligne.perversity import NEG_INF, CodimPerversity, CoefficientData, PervValue, StratumPerversity
from tsdeligne.sampling import random_coeffs_adapted, random_space, random_strong_perversity
from tsdeligne.sheafcalc import costalks, stalks
from tsdeligne.space import Cone, Leaf, SphereJoin, Susp, has_codim_one

g = GradedModule.from_list
L6 = Leaf(1, g(["Z", "Z/6"]))
L2 = Leaf(2, g(["Z", "Z/6", "Z"]))
# Torsion in the middle degree puts stalk and costalk classes below the top.
L3 = Leaf(3, g(["Z", "0", "Z/15", "Z"]))
STRONG = CodimPerversity.from_dict(
    {2: PervValue(0, PrimeSet.of(2)), 3: PervValue(0, PrimeSet.of(2, 3)), 4: PervValue(1, PrimeSet.of(3)), 5: PervValue(1, PrimeSet.of(3))}
)


# -- stalk/costalk axioms


@pytest.mark.parametrize(
    "X",
    [Susp(L6), SphereJoin(1, L6), Cone(Susp(L2)), SphereJoin(2, Susp(L6)), Leaf(0, g(["Z"]))],
)
def test_tax1prime_passes_on_computed_tables(X):
    rep = check_tax1prime(X, STRONG)
    assert rep.passed, rep.summary()


def test_point_leaf_is_vacuous():
    rep = check_tax1prime(Leaf(0, g(["Z"])), CodimPerversity.constant(0))
    assert rep.passed
    assert {o.clause for o in rep.outcomes} <= {"a", "b"}


def test_tampered_stalk_fails_clause_c():
    X = Susp(L2)
    st = stalks(X, STRONG)
    st["susp"] = st["susp"].direct_sum(GradedModule.from_dict({2: FgModule.free()}))
    rep = check_tax1prime(X, STRONG, stalks=st)
    assert not rep.passed
    assert rep.failed_clauses() == {"c"}
    assert [(o.stratum, o.degree) for o in rep.failures()] == [("susp", 2)]


def test_tampered_costalk_fails_clause_d():
    X = Susp(L2)
    co = costalks(X, STRONG)
    co["susp"] = co["susp"].direct_sum(GradedModule.from_dict({0: FgModule.cyclic(5)}))
    rep = check_tax1prime(X, STRONG, costalks=co)
    assert rep.failed_clauses() == {"d"}


def test_tampered_regular_stalk_fails_clause_b():
    X = Susp(L2)
    st = stalks(X, STRONG)
    st["susp/leaf"] = g(["Z", "Z/2"])
    assert check_tax1prime(X, STRONG, stalks=st).failed_clauses() == {"b"}


# -- support dimensions


def test_support_of_regular_h0():
    X = Susp(L2)
    assert support_dim(X, STRONG, j=0, q=F) == 3


def test_support_above_everything_is_empty():
    assert support_dim(Susp(L2), STRONG, j=9, q=F) == NEG_INF


def test_support_of_tipped_torsion_is_the_vertex():
    P = StratumPerversity.from_dict({"cone": PervValue(0, PrimeSet.of(2))})
    assert support_dim(Cone(L6), P, j=1, q=2) == 0
    assert support_dim(Cone(L6), P, j=1, q=3) == NEG_INF


def test_cosupport_of_regular_stratum():
    assert cosupport_dim(Susp(L2), STRONG, j=3, q=F) == 3


# -- support/cosupport axioms


TAX2_SPACES = [SphereJoin(2, Susp(L6)), SphereJoin(1, Susp(L2)), Cone(SphereJoin(1, L2)), Cone(L3)]


@pytest.mark.parametrize("X", TAX2_SPACES)
def test_tax2_passes_for_strong_adapted(X):
    rep = check_tax2(X, STRONG, extra_primes=(7,))
    assert rep.passed, rep.summary()
    assert {o.clause for o in rep.outcomes} <= {"a", "b", "c.a", "c.b", "d.a", "d.b"}


def test_tax2_clause_coverage():
    seen = set()
    for X in TAX2_SPACES:
        seen |= {o.clause for o in check_tax2(X, STRONG).outcomes}
    assert seen == {"a", "b", "c.a", "c.b", "d.a", "d.b"}


def test_tax2_rejects_weak_only_perversity():
    weak = CodimPerversity.constant(1, max_codim=5)
    with pytest.raises(PreconditionError) as exc:
        check_tax2(Susp(L2), weak)
    assert any("strongly" in r for r in exc.value.reasons)


def test_tax2_rejects_codim_one():
    with pytest.raises(PreconditionError):
        check_tax2(Susp(Leaf(0, g(["Z^2"]))), CodimPerversity.constant(0, max_codim=3, start=1))


def test_tax2_rejects_unadapted_coefficients():
    E = CoefficientData(FgModule.free(), FgModule.cyclic(3))
    with pytest.raises(PreconditionError):
        check_tax2(Susp(Leaf(2, g(["Z", "0", "Z"]), E)), STRONG)


def test_tax2_fault_injection():
    X = Susp(L2)
    st = stalks(X, STRONG)
    st["susp"] = st["susp"].direct_sum(GradedModule.from_dict({2: FgModule.free()}))
    rep = check_tax2(X, STRONG, stalks=st)
    assert not rep.passed
    assert "c.a" in rep.failed_clauses()
    assert check_tax1prime(X, STRONG, stalks=st).passed is False


def test_unlisted_prime_has_empty_support():
    X = SphereJoin(1, Susp(L6))
    for j in range(0, 6):
        assert support_dim(X, STRONG, j=j, q=11) == NEG_INF
        assert cosupport_dim(X, STRONG, j=j, q=11) == NEG_INF


def test_weak_variant_runs_on_weak_perversity():
    weak = CodimPerversity.constant(1, max_codim=5)
    rep = check_tax2(Susp(L2), weak, weak=True)
    assert {o.clause for o in rep.outcomes} <= {"a", "c", "d"}
    assert rep.passed, rep.summary()


def test_axiom_systems_agree_on_random_instances():
    rng = random.Random(77)
    checked = 0
    while checked < 40:
        perv = random_strong_perversity(rng, 14, (2, 3, 5))
        X = random_space(rng, 3, 3, coeffs=random_coeffs_adapted(rng, perv), allow_codim_one=False)
        if has_codim_one(X):
            continue
        a, b = check_tax1prime(X, perv), check_tax2(X, perv, extra_primes=(7,))
        assert a.passed and b.passed, (a.summary(), b.summary())
        checked += 1


def test_report_json_round_trip():
    rep = check_tax2(SphereJoin(2, Susp(L6)), STRONG)
    data = json.loads(json.dumps(rep.to_json()))
    back = AxiomReport.from_json(data)
    assert back.to_json() == rep.to_json()
    assert back.passed == rep.passed
