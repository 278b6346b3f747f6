import pytest

from test_acceptance import PERV_TABLE

from tsdeligne.errors import PreconditionError
from tsdeligne.fgmod import F, FgModule, PrimeSet
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
    is_efficient_value,
    monotone_holds,
    p_inverse,
    q_inverse,
)


def table(d):
    return CodimPerversity.from_dict({k: PervValue(p1, PrimeSet.of(*ps)) for k, (p1, ps) in d.items()})


# -- dual


def test_dual_of_zero_perversity():
    D = dual(CodimPerversity.constant(0, max_codim=6))
    for k in range(2, 7):
        assert D(k) == PervValue(k - 2, PrimeSet.all_primes())


def test_dual_of_table_row():
    assert dual(PERV_TABLE)(7) == PervValue(4, PrimeSet.all_primes(excluding=[2, 5]))


def test_dual_is_involution_on_table():
    assert dual(dual(PERV_TABLE)) == PERV_TABLE


def test_dual_of_stratum_perversity_needs_codims():
    P = StratumPerversity.from_dict({"susp": PervValue(0, PrimeSet.of(2))})
    assert dual(P, {"susp": 3})("susp") == PervValue(1, PrimeSet.all_primes(excluding=[2]))
    with pytest.raises(PreconditionError):
        dual(P)


# -- classify


def test_table_is_strongly_constrained():
    c = classify(PERV_TABLE)
    assert c.label == "strongly_constrained"
    assert all(c.conditions.values())
    assert c.is_efficient


def test_constant_zero_is_strongly_constrained():
    assert classify(CodimPerversity.constant(0)).label == "strongly_constrained"


def test_step_rule_failure_flags_condition_five():
    c = classify(table({2: (0, [2]), 3: (1, [3])}))
    assert c.label == "general"
    assert c.conditions["5"] is False
    assert c.failures == {"5": [2]}


def test_label_hierarchy():
    assert classify(table({2: (1, []), 3: (1, [])})).label == "constrained"
    assert classify(table({2: (2, []), 3: (2, [])})).label == "weakly_constrained"
    # Growth by two at once breaks the first condition.
    assert classify(table({2: (0, []), 3: (2, [])})).label == "general"


def test_efficiency_flags():
    c = classify(table({2: (3, []), 3: (3, [])}))
    assert c.efficient == {2: False, 3: True}
    assert is_efficient_value(PervValue(-1, PrimeSet.empty()), 4)
    assert not is_efficient_value(PervValue(-2, PrimeSet.empty()), 4)


# -- adaptedness


def test_adapted_examples():
    p = table({2: (0, [2]), 3: (0, [2])})
    assert is_adapted(p, CoefficientData(FgModule.free(), FgModule.cyclic(4)))[0]
    assert is_adapted(CodimPerversity.constant(0), CoefficientData())[0]
    ok, reasons = is_adapted(CodimPerversity.constant(1), CoefficientData())
    assert not ok and reasons


def test_adapted_minus_one_case():
    p = table({2: (-1, [3]), 3: (0, [3])})
    assert is_adapted(p, CoefficientData(FgModule.cyclic(9), FgModule()))[0]
    assert not is_adapted(p, CoefficientData(FgModule.free(), FgModule()))[0]


def test_adaptedness_undefined_outside_range():
    with pytest.raises(PreconditionError):
        is_adapted(CodimPerversity.constant(3), CoefficientData())


def test_coefficient_invariants():
    with pytest.raises(ValueError):
        CoefficientData(FgModule.free(), FgModule.free())
    with pytest.raises(ValueError):
        CoefficientData(FgModule.cyclic(2), FgModule.cyclic(4))
    assert CoefficientData(FgModule.free(), FgModule.cyclic(12)).minimal_primes() == PrimeSet.of(2, 3)


# -- inverse perversity


def test_inverse_golden_values():
    assert p_inverse(PERV_TABLE, 1, 2) == 3
    assert p_inverse(PERV_TABLE, 1, 5) == 5
    for q in (2, 3, 5, 7, 11, F):
        assert p_inverse(PERV_TABLE, 0, q) == 2


def test_inverse_at_f_ignores_torsion_rows():
    assert p_inverse(PERV_TABLE, 1, F) == 5
    assert p_inverse(PERV_TABLE, 4, F) == 11


def test_inverse_infinity_is_a_sentinel():
    r = p_inverse(PERV_TABLE, 6, 2)
    assert r is INF and r > 10**100
    assert 5 - r == NEG_INF


def test_literal_infinity_rule_diverges():
    # p1(11) = 4 and 2 is not in p2(11); the as-written clause gives infinity
    # even though p1(10) = 3 with 2 in p2(10).
    assert p_inverse(PERV_TABLE, 4, 2) == 10
    assert p_inverse(PERV_TABLE, 4, 2, literal=True) is INF


def test_monotone_characterization_on_table():
    for q in (2, 3, 5, 7, F):
        for m in range(0, 7):
            inv = p_inverse(PERV_TABLE, m, q)
            for k in range(2, PERV_TABLE.max_codim + 1):
                assert (k >= inv) == monotone_holds(PERV_TABLE, k, m, q), (m, q, k)


def test_weak_form_starts_at_first_codim():
    w = table({1: (-1, []), 2: (0, []), 3: (1, [])})
    assert p_inverse(w, -3, 2, weak=True) == 1
    assert p_inverse(w, 0, F, weak=True) == 2


def test_inverse_needs_growth_conditions():
    with pytest.raises(PreconditionError):
        p_inverse(table({2: (0, []), 3: (3, [])}), 1, 2)


def test_q_inverse_uses_dual():
    assert q_inverse(PERV_TABLE, 1, 2) == p_inverse(dual(PERV_TABLE), 1, 2)
