import numpy as np
import pytest

from bklab import GradeError, from_polynomial, run_pipeline
from bklab.experiments import (ExperimentConfig, generate_trial,
                               random_pencil_perturbation, random_polynomial,
                               random_singular_polynomial,
                               run_backward_error_batch, split_for_placement,
                               trial_rng)
from bklab.tolerances import ENV_EPS, rank_tolerance, working_eps


def test_trial_rng_is_order_independent():
    a = trial_rng(7, 3).standard_normal(4)
    _ = trial_rng(7, 0).standard_normal(10)
    b = trial_rng(7, 3).standard_normal(4)
    assert np.array_equal(a, b)


def test_random_polynomial_normalization():
    P = random_polynomial(3, 2, 4, trial_rng(0, 0), norm=1.0)
    assert P.frobenius_norm() == pytest.approx(1.0)
    assert P.shape == (3, 2) and P.grade == 4


def test_random_singular_polynomial_is_rank_deficient():
    rng = trial_rng(1, 0)
    P = random_singular_polynomial(3, 3, 4, 2, rng)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    s = np.linalg.svd(P.eval(lam), compute_uv=False)
    assert s[-1] <= 1e-12 * s[0]


def test_perturbation_norm_is_exact():
    dL = random_pencil_perturbation((3, 4), 1e-7, trial_rng(2, 0))
    assert dL.frobenius_norm() == pytest.approx(1e-7)


def test_split_for_placement():
    assert split_for_placement("frobenius1", 4) == (3, 0)
    assert split_for_placement("frobenius2", 4) == (0, 3)
    assert split_for_placement("hook", 5) == (2, 2)
    assert split_for_placement("hook", 5, epsilon=3) == (3, 1)


def test_generated_trials_respect_grade_invariant():
    config = ExperimentConfig(seed=5, trials=4, d=(2, 5))
    for index in range(config.trials):
        L, dL, _ = generate_trial(config, index)
        assert L.eps + L.eta + 1 == L.grade
        assert dL.shape == L.shape


def test_config_reconciles_explicit_split_with_d():
    config = ExperimentConfig(epsilon=2, eta=1, d=(4, 4))
    assert config.d == (4, 4)
    with pytest.raises(GradeError):
        ExperimentConfig(epsilon=2, eta=1, d=(5, 6))


def test_batch_summary_counts():
    config = ExperimentConfig(seed=11, trials=3, magnitude=1e-8,
                              check_eigen=False)
    result = run_backward_error_batch(config)
    summary = result["summary"]
    assert summary["passed"] == 3 and summary["failed"] == 0
    assert summary["max_ratio_over_bound"] <= 1.0


def test_grade_one_pipeline_maps_perturbation_through():
    # with eps = eta = 0 the pencil is the polynomial itself and dP == dL
    rng = trial_rng(12, 0)
    P = random_polynomial(2, 2, 1, rng)
    bk = from_polynomial(P, 0, 0, "hook")
    dL = random_pencil_perturbation(bk.shape, 1e-3, rng)
    report = run_pipeline(bk, dL, check_eigen=False)
    # dP == dL up to the (M + dL) - M cancellation roundoff
    assert (report.dP - dL).frobenius_norm() <= 1e-15 * bk.frobenius_norm()
    assert report.bound_label == "degenerate" and report.bound_holds


def test_working_eps_env_override(monkeypatch):
    monkeypatch.setenv(ENV_EPS, "1e-8")
    assert working_eps() == 1e-8
    assert rank_tolerance((4, 2), 1.0) == pytest.approx(4e-8)
    monkeypatch.delenv(ENV_EPS)
    assert working_eps() == np.finfo(float).eps
