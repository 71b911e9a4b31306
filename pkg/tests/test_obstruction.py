import json

from hypothesis import given, settings
from hypothesis import strategies as st

import numpy as np
import pytest

from caustics.fourier import FourierSeries
from caustics.obstruction import (HypothesisViolation, SingularResidueError, auxiliary_series,
                                  bare_sum, block_sums, check_hypotheses, poly_P,
                                  quadratic_obstruction, random_admissible, relevant_modes,
                                  residues, rigidity_sweep, split_constants, split_form,
                                  triviality_certificate)
from oracles import brute_bare_sum, expanded_P, series_modes


def cos57():
    return FourierSeries.cos(5, K=8) + FourierSeries.cos(7, K=8)


def test_residues():
    assert residues(1) == [1, 2, 4, 5]
    assert residues(2) == [1, 2, 3, 4, 6, 7, 8, 9]
    with pytest.raises(ValueError):
        residues(0)
    with pytest.raises(SingularResidueError):
        split_constants(1, 3)


def test_poly_P_matches_expanded_polynomial():
    for l in (1, 2, 3):
        for r in residues(l):
            for n, k in ((0, 0), (2, -1), (-3, 4), (5, 5)):
                assert poly_P(l, r, n, k) == pytest.approx(expanded_P(l, r, n, k), rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_splitting_identity(l):
    for r in residues(l):
        for n in range(-8, 9):
            for k in range(-8, 9):
                a, b = poly_P(l, r, n, k), split_form(l, r, n, k)
                assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


def test_split_constants_values():
    cs, css = split_constants(1, 1)
    assert css == pytest.approx(0, abs=1e-12)
    assert split_constants(1, 2)[1] == pytest.approx(-0.5)
    assert split_constants(1, 2)[0] == pytest.approx(cs)


def test_bare_sum_hand_value():
    p1 = cos57()
    assert brute_bare_sum(series_modes(p1), 2) == pytest.approx(-0.25, abs=1e-15)
    assert bare_sum(p1, 2) == pytest.approx(-0.25, abs=1e-15)


def test_bare_sum_against_oracle(rng):
    p1 = random_admissible(1, 30, rng)
    modes = series_modes(p1)
    for n in range(-5, 6):
        assert bare_sum(p1, n) == pytest.approx(brute_bare_sum(modes, n), abs=1e-14)


def test_full_system_is_bare_sum_times_constant(rng):
    # for l = 1 the split form reduces the system to 2 c*^2 * bare sum
    p1 = random_admissible(1, 30, rng)
    rep = quadratic_obstruction(1, p1)
    c = split_constants(1, 1)[0]
    for n, v in rep.values.items():
        assert v == pytest.approx(2 * c * c * bare_sum(p1, n), abs=1e-12)


def test_block_sums_brute(rng):
    p1 = random_admissible(2, 24, rng)
    sums = block_sums(2, p1, [-2, 1, 3])
    for i, n in enumerate([-2, 1, 3]):
        for j, r in enumerate(residues(2)):
            ref = sum(poly_P(2, r, n, k) * p1.coeff(10 * k + r) * p1.coeff(10 * (n - k) - r)
                      for k in range(-5, 6))
            assert sums[i, j] == pytest.approx(ref, abs=1e-12)


def test_obstruction_report_cos57():
    rep = quadratic_obstruction(1, cos57(), tol=1e-10)
    assert not rep.trivial_verdict
    assert abs(rep.witness_n) == 2
    assert rep.bare_values[2] == pytest.approx(-0.25)
    d = rep.to_dict()
    json.dumps(d)
    assert d["bare_values"][[row[0] for row in d["bare_values"]].index(2)][1] == pytest.approx(-0.25)
    rows = rep.csv_rows()
    assert len(rows[0]) == 6


def test_hypotheses_enforced():
    with pytest.raises(HypothesisViolation, match="no_even_modes"):
        quadratic_obstruction(1, FourierSeries.cos(2, K=4))
    with pytest.raises(HypothesisViolation, match="3"):
        quadratic_obstruction(1, FourierSeries.cos(9, K=10))
    h = check_hypotheses(1, FourierSeries.cos(1, K=5))
    assert h["translation_modes_zero"] is False
    rep = quadratic_obstruction(1, FourierSeries.cos(2, K=4), strict=False)
    assert rep.hypotheses["no_even_modes"] is False


def test_translation_only_is_trivial():
    rep = quadratic_obstruction(1, FourierSeries.cos(1, K=5))
    assert rep.max_abs == 0 and rep.trivial_verdict


def test_certificate_verdicts():
    cert = triviality_certificate(1, cos57())
    assert cert.verdict == "obstructed"
    assert cert.witness[1] == 2
    assert triviality_certificate(1, FourierSeries.zeros(9)).verdict == "forced-trivial"
    # a single relevant mode has vanishing autocorrelations away from 0
    single = triviality_certificate(1, FourierSeries.cos(7, K=8))
    assert single.verdict == "undetermined"
    assert quadratic_obstruction(1, FourierSeries.cos(7, K=8)).trivial_verdict
    json.dumps(cert.to_dict())


def test_block_is_autocorrelation_of_auxiliary_series(rng):
    # sum_k P_r(n,k) p_{2Mk+r} p_{2M(n-k)-r} = 16 i * autocorrelation for real p1
    p1 = random_admissible(1, 30, rng)
    for j, r in enumerate(residues(1)):
        f = auxiliary_series(1, r, p1)
        for n in (1, 2, 3):
            s = block_sums(1, p1, [n])[0, j]
            assert s == pytest.approx(16j * f.autocorrelation(n), abs=1e-10)


def test_relevant_modes():
    rel = relevant_modes(1, 13)
    assert 5 in rel and 7 in rel and 1 not in rel and 13 in rel


def test_sweep_and_archive(tmp_path):
    res = rigidity_sweep(1, 20, 30, seed=3, archive=str(tmp_path / "bad.json"))
    assert res.failed_triviality == 30 and not res.counterexamples
    assert not (tmp_path / "bad.json").exists()
    assert res.min_max_abs > 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3).filter(lambda x: abs(x) > 1e-3), st.sampled_from([1, 2]))
def test_obstruction_invariants(seed, lam, l):
    p1 = random_admissible(l, 24, np.random.default_rng(seed))
    rep = quadratic_obstruction(l, p1)
    scaled = quadratic_obstruction(l, p1 * lam)
    for n, v in rep.values.items():
        # quadratic in p1
        assert scaled.values[n] == pytest.approx(lam ** 2 * v, abs=1e-10 * max(1, abs(v)))
        # Hermitian symmetry for real p1
        assert rep.values[-n] == pytest.approx(np.conj(v), abs=1e-10)
    assert rep.skipped_residue_bound < 1e-14


def test_zero_input_zero_output():
    rep = quadratic_obstruction(2, FourierSeries.zeros(20))
    assert rep.max_abs == 0 and rep.trivial_verdict and rep.n0_value == 0
