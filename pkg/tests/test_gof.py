import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ordr2 import gof
from ordr2.errors import InapplicableMeasureError, UndefinedMeasureError
from ordr2.estimation import fit_clm, fit_null
from ordr2.gof import CANDIDATES, L0, PenaltyKind, PenaltySpec

from conftest import random_ordinal_dataset

loglik_pairs = st.tuples(
    st.floats(-5000, -1e-3), st.floats(0.0, 1.0)
).map(lambda t: (t[0] * t[1], t[0]))  # (full, null) with null <= full <= 0


def test_penalty_values():
    assert gof.penalty("l2", 2) == 2
    assert gof.penalty("l1", 5) == 5
    assert gof.penalty("l6", 10) == pytest.approx(2 + 8**1.5)
    assert gof.penalty("l6", 10) == pytest.approx(24.6274, abs=1e-4)
    assert gof.penalty("l6", 4) == pytest.approx(4.8284, abs=1e-4)
    assert gof.penalty("l3", 6) == 4.0
    assert gof.penalty("l4", 8) == 4.0
    assert gof.penalty("l5", 9) == 5.0
    assert gof.penalty("l0", 7) == 1.0
    assert gof.penalty(PenaltySpec.constant(3), 2) == 3.0


@pytest.mark.parametrize("spec", CANDIDATES)
def test_candidates_start_at_two_and_increase(spec):
    assert gof.penalty(spec, 2) == 2.0
    vals = [gof.penalty(spec, r) for r in range(2, 40)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_penalty_domain():
    with pytest.raises(ValueError):
        gof.penalty("l1", 1)
    with pytest.raises(ValueError):
        PenaltySpec.constant(0)
    with pytest.raises(ValueError):
        PenaltySpec(PenaltyKind.L1, 2.0)


def test_penalty_parse_and_ids():
    assert PenaltySpec.parse("L2").measure_id == "ug:l2"
    assert PenaltySpec.parse("ug:l4") == PenaltySpec(PenaltyKind.L4)
    assert PenaltySpec.parse("const:3").measure_id == "ug:const:3"
    assert PenaltySpec.parse("const:2.5").constant_value == 2.5


def test_mcfadden_examples():
    assert gof.r2_mcfadden(-100, -100) == 0
    assert gof.r2_mcfadden(-80, -100) == pytest.approx(0.2)
    with pytest.raises(UndefinedMeasureError):
        gof.r2_mcfadden(0.0, 0.0)


def test_modified_table_values():
    # binary column of the sensory table: mf 0.159 -> 0.293 for every penalty
    full, null = -0.841, -1.0
    for spec in CANDIDATES:
        assert gof.r2_modified(full, null, 2, spec) == pytest.approx(1 - 0.841**2)
        assert gof.r2_modified(full, null, 2, spec) == pytest.approx(0.293, abs=5e-4)
    assert gof.r2_modified(-0.861, -1.0, 5, "l2") == pytest.approx(0.377, abs=5e-4)
    assert gof.r2_modified(-0.861, -1.0, 5, "l1") == pytest.approx(0.527, abs=5e-4)
    for spec in (*CANDIDATES, L0, PenaltySpec.constant(3)):
        assert gof.r2_modified(-50.0, -50.0, 4, spec) == 0.0


def test_coxsnell_nagelkerke_examples():
    assert gof.r2_coxsnell(-100, -100, 100) == 0
    assert gof.r2_coxsnell(-80, -100, 100) == pytest.approx(1 - math.exp(-0.4), abs=1e-12)
    assert gof.r2_coxsnell(-80, -100, 100) == pytest.approx(0.32968, abs=1e-5)
    assert gof.r2_nagelkerke(-100, -100, 100) == 0
    cs = gof.r2_coxsnell(-80, -100, 100)
    assert gof.r2_nagelkerke(-80, -100, 100) == pytest.approx(cs / (1 - math.exp(-2.0)))


def test_mckelvey_zavoina_examples():
    assert gof.r2_mckelvey_zavoina(np.full(10, 3.0), "probit") == 0
    eta = np.array([-1.0, 1.0])  # population variance 1
    assert gof.r2_mckelvey_zavoina(eta, "probit") == pytest.approx(0.5)
    assert gof.r2_mckelvey_zavoina(eta, "logit") == pytest.approx(1 / (1 + math.pi**2 / 3))
    with pytest.raises(UndefinedMeasureError):
        gof.r2_mckelvey_zavoina([1.0], "probit")


def test_tjur_examples():
    assert gof.r2_tjur([0.8, 0.2], [1, 0]) == pytest.approx(0.6)
    y = np.array([0, 1, 1, 0, 1])
    assert gof.r2_tjur(y.astype(float), y) == 1.0
    assert gof.r2_tjur([0.2, 0.8], [2, 1]) == 0.0
    assert gof.tjur([0.2, 0.8], [2, 1]).raw == pytest.approx(-0.6)
    with pytest.raises(UndefinedMeasureError):
        gof.r2_tjur([0.3, 0.4], [1, 1])
    with pytest.raises(InapplicableMeasureError):
        gof.r2_tjur([0.3, 0.4, 0.5], [1, 2, 3])


@given(loglik_pairs, st.integers(2, 12))
def test_l0_collapse_and_binary_identity(pair, r):
    full, null = pair
    mf = gof.r2_mcfadden(full, null)
    assert abs(gof.r2_modified(full, null, r, L0) - mf) <= 1e-15
    for spec in CANDIDATES:
        assert abs(gof.r2_modified(full, null, 2, spec) - (1 - (1 - mf) ** 2)) <= 1e-12


@given(loglik_pairs, st.integers(1, 10_000))
def test_bounds_and_cs_nk_order(pair, n):
    full, null = pair
    cs = gof.r2_coxsnell(full, null, n)
    nk = gof.r2_nagelkerke(full, null, n)
    assert 0 <= cs <= nk <= 1
    if full == null:
        assert cs == nk == 0


@given(st.floats(-1000, -1), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(2, 10))
def test_order_preservation(null, a, b, r):
    ma, mb = gof.r2_mcfadden(a * null, null), gof.r2_mcfadden(b * null, null)
    for spec in CANDIDATES:
        ua, ub = gof.r2_modified(a * null, null, r, spec), gof.r2_modified(b * null, null, r, spec)
        # monotone in gamma; ties are allowed only where gamma**lambda underflows relative to 1
        if ua > ub:
            assert ma > mb
        if ma > mb:
            assert ua >= ub


@given(st.floats(0.3, 0.99))  # smaller gamma saturates 1 - gamma**24.6 at 1.0 in double precision
def test_modified_increases_with_r(gamma):
    for spec in CANDIDATES:
        vals = [gof.r2_modified(-gamma, -1.0, r, spec) for r in range(2, 11)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_report_null_model_as_full_is_all_zero():
    m = fit_null([1, 2, 2, 3, 3, 3, 1, 2], "probit")
    rep = gof.gof_report(m)
    assert rep.measures
    assert all(v == 0 for v in rep.measures.values())
    assert rep.gamma_r == 1.0 and rep.g_statistic == 0.0


def test_report_contents_binary(rng):
    d = random_ordinal_dataset(rng, 200, 2, 2)
    m = fit_clm(d)
    rep = gof.gof_report(m, [*CANDIDATES, PenaltySpec.constant(3)])
    for key in ("mf", "cs", "nk", "mz", "tj", "ug:l1", "ug:l6", "ug:const:3"):
        assert key in rep
    assert rep["ug:l2"] == pytest.approx(1 - (1 - rep["mf"]) ** 2, abs=1e-12)
    assert rep.gamma_r == pytest.approx(m.loglik / m.null_loglik)
    assert rep.g_statistic == pytest.approx(-2 * (m.null_loglik - m.loglik))
    assert rep["mf"] == pytest.approx(rep.g_statistic / (-2 * m.null_loglik))
    assert "mz" not in rep.flags


def test_report_ordinal_marks_extended_and_omits_tjur(rng):
    d = random_ordinal_dataset(rng, 200, 2, 5)
    rep = gof.gof_report(fit_clm(d))
    assert rep.flags["mz"] == "extended"
    assert "tj" not in rep.measures
    assert rep.missing["tj"].startswith("inapplicable")


def test_report_undefined_measures_become_missing_entries():
    rep = gof.report_from_logliks(0.0, 0.0, 10, 2)
    assert "mf" not in rep.measures and "mf" in rep.missing
    assert rep.missing["tj"]


def test_report_clamps_negative_tjur():
    rep = gof.report_from_logliks(-9.0, -10.0, 4, 2, fitted_p1=[0.9, 0.8, 0.1, 0.2], response=[1, 1, 2, 2],
                                  linear_predictors=[1.0, 0.5, -1.0, -0.5], link="probit")
    assert rep["tj"] == 0.0
    assert "clamped" in rep.flags["tj"]
