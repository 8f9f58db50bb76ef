"""Smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import polyurn as pu


@pytest.fixture(scope="module")
def rule_422():
    rule, initial = pu.catalogue_rule("4.2.2")
    return rule, initial


def test_compositions_enumeration():
    comps = pu.enumerate_compositions(3, 2)
    assert comps == [[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]


def test_catalogue_names():
    names = pu.catalogue_names()
    assert len(names) == 13
    assert "4.1.5" in names


def test_rule_structure(rule_422):
    rule, initial = rule_422
    assert rule.colours == 3
    assert rule.draws == 2
    assert initial == [10, 3, 3]
    assert pu.check_balance(rule) == 2
    assert pu.check_diagonal(rule) is None


def test_draw_probabilities():
    rule, _ = pu.catalogue_rule("4.1.1")
    probs = pu.draw_probabilities(rule, [2, 2], pu.SamplingMode.WITHOUT_REPLACEMENT)
    assert probs == pytest.approx([1 / 6, 2 / 3, 1 / 6])
    assert pu.draw_probability([2, 2], [1, 1], pu.SamplingMode.WITHOUT_REPLACEMENT) == pytest.approx(2 / 3)


def test_zeros_and_stability(rule_422):
    rule, _ = rule_422
    result = pu.find_zeros(rule)
    stable = [z for z in result.zeros if z.stability == pu.Stability.STABLE]
    assert len(stable) == 1
    assert stable[0].location.coords == pytest.approx([0.2, 0.4, 0.4], abs=1e-10)
    eigs = sorted(ev.real for ev in stable[0].tangent_eigenvalues)
    assert eigs == pytest.approx([-3.6, -2.0], abs=1e-10)


def test_two_colour_reports():
    rule, _ = pu.catalogue_rule("4.1.1")
    (report,) = pu.two_colour_clt(rule)
    assert report.theta == pytest.approx(0.5)
    assert report.Gamma == pytest.approx(1 / 36)
    assert report.limit_variance == pytest.approx(1 / 36)
    assert report.regime == pu.Regime.GAUSSIAN_SQRT_N


def test_gamma_sigma_matrices(rule_422):
    rule, _ = rule_422
    theta = [0.2, 0.4, 0.4]
    gamma = pu.gamma_matrix(rule, theta)
    assert gamma * 25 == pytest.approx(np.array([[2, -1, -1], [-1, 3, -2], [-1, -2, 3]]), abs=1e-10)
    sigma = pu.sigma_matrix(rule, theta)
    assert sigma @ np.ones(3) == pytest.approx(np.zeros(3), abs=1e-10)
    assert sigma[0, 0] == pytest.approx(2 / 25)


def test_non_balanced_params():
    rule, _ = pu.catalogue_rule("5.1")
    nb = pu.non_balanced_params(rule, 0.5)
    assert nb.omega == pytest.approx(2.5)
    assert nb.lambda_ == pytest.approx(0.6)
    assert nb.clt_variance == pytest.approx(0.1)


def test_drift_and_flow():
    rule, _ = pu.catalogue_rule("4.1.5")
    g = pu.drift_g(rule, 0.25)
    assert g == pytest.approx(-200 * (0.25 - 0.1) * (0.25 - 0.5) * (0.25 - 0.9), abs=1e-9)

    rule3, _ = pu.catalogue_rule("4.2.2")
    trajectory = pu.flow_integrate(rule3, [10 / 16, 3 / 16, 3 / 16], 50.0)
    assert trajectory.terminal.coords == pytest.approx([0.2, 0.4, 0.4], abs=1e-6)


def test_tenability():
    rule, initial = pu.catalogue_rule("4.2.2")
    report = pu.check_tenability(rule, initial, pu.SamplingMode.WITH_REPLACEMENT)
    assert report.tenable


def test_ensemble_reproducibility():
    rule, initial = pu.catalogue_rule("4.1.1")
    kwargs = dict(
        rule=rule,
        initial_counts=initial,
        mode=pu.SamplingMode.WITH_REPLACEMENT,
        n_steps=2000,
        n_reps=64,
        seed=7,
    )
    a = pu.run_ensemble(**kwargs, threads=1)
    b = pu.run_ensemble(**kwargs, threads=2)
    assert np.array_equal(a.terminals(), b.terminals())
    assert a.n_ok == 64
    assert abs(a.mean_composition()[0] - 0.5) < 0.1


def test_estimate_limits():
    rule, _ = pu.catalogue_rule("4.1.5")
    result = pu.run_ensemble(
        rule=rule,
        initial_counts=[4, 6],
        mode=pu.SamplingMode.WITH_REPLACEMENT,
        n_steps=10000,
        n_reps=200,
        seed=3,
    )
    limits = pu.estimate_limits(result, [[0.1, 0.9], [0.9, 0.1]])
    assert limits.frequencies[0] > 0
    assert limits.frequencies[1] > 0
    assert limits.frequencies[0] + limits.frequencies[1] >= 0.95


def test_errors_translate():
    with pytest.raises(ValueError):
        pu.catalogue_description("bogus")
    rule, _ = pu.catalogue_rule("4.2.1")
    with pytest.raises(Exception):
        pu.sigma_matrix(rule, [1.0, 0.0, 0.0])  # unstable vertex, not a sqrt(n) zero
