"""Seeded random experiment generation and batch backward-error studies.

Per-trial randomness is derived deterministically from ``(master seed,
trial index)`` through :class:`numpy.random.SeedSequence`, so serial and
parallel execution orders produce the same trials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backward_error import run_pipeline
from .block_kronecker import from_polynomial
from .errors import GradeError, PreconditionError, ShapeError
from .matpoly import MatrixPolynomial, Pencil


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Deterministic per-trial generator (stable across execution order)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def complex_gaussian(shape, rng) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_polynomial(m: int, n: int, d: int, rng,
                      norm: float | None = 1.0) -> MatrixPolynomial:
    """I.i.d. standard complex Gaussian coefficients, optionally scaled to a
    prescribed Frobenius norm."""
    coeffs = [complex_gaussian((m, n), rng) for _ in range(d + 1)]
    P = MatrixPolynomial(coeffs, grade=d)
    if norm is not None:
        P = (norm / P.frobenius_norm()) * P
    return P


def random_singular_polynomial(m: int, n: int, d: int, rank: int, rng,
                               norm: float | None = 1.0) -> MatrixPolynomial:
    """Singular by construction: a product of an ``m x rank`` and a
    ``rank x n`` random polynomial whose grades add up to ``d``."""
    if rank >= min(m, n):
        raise ShapeError("rank must be below min(m, n) to force singularity")
    if d < 2:
        raise GradeError("the product construction needs grade at least 2")
    d_left = d // 2
    left = random_polynomial(m, rank, d_left, rng, norm=None)
    right = random_polynomial(rank, n, d - d_left, rng, norm=None)
    P = left @ right
    if norm is not None:
        P = (norm / P.frobenius_norm()) * P
    return P


def random_pencil_perturbation(shape, magnitude: float, rng) -> Pencil:
    """Dense Gaussian pencil scaled to the requested Frobenius norm."""
    A = complex_gaussian(shape, rng)
    B = complex_gaussian(shape, rng)
    total = np.hypot(np.linalg.norm(A), np.linalg.norm(B))
    if total == 0 or magnitude == 0:
        return Pencil.from_parts(np.zeros(shape, dtype=complex),
                                 np.zeros(shape, dtype=complex))
    scale = magnitude / total
    return Pencil.from_parts(scale * A, scale * B)


def split_for_placement(placement: str, d: int, epsilon=None, eta=None):
    """The ``(eps, eta)`` pair a placement uses at grade ``d``."""
    if epsilon is not None or eta is not None:
        eps = int(epsilon) if epsilon is not None else d - 1 - int(eta)
        et = int(eta) if eta is not None else d - 1 - eps
        return eps, et
    if placement == "frobenius1":
        return d - 1, 0
    if placement == "frobenius2":
        return 0, d - 1
    # balanced hook split
    eps = d // 2
    return eps, d - 1 - eps


@dataclass
class ExperimentConfig:
    """Batch study parameters.  Size fields are inclusive ``(lo, hi)``
    ranges; every generated trial satisfies ``eps + eta + 1 == d``."""

    seed: int = 0
    trials: int = 10
    m: tuple[int, int] = (2, 2)
    n: tuple[int, int] = (2, 2)
    d: tuple[int, int] = (3, 3)
    epsilon: int | None = None
    eta: int | None = None
    magnitude: float = 1e-8
    placement: str = "hook"
    tol: float | None = None
    fmt: str = "json"
    force: bool = False
    check_eigen: bool = True

    def __post_init__(self):
        if self.epsilon is not None and self.eta is not None:
            want = self.epsilon + self.eta + 1
            if not (self.d[0] <= want <= self.d[1]) and self.d != (want, want):
                raise GradeError(
                    f"epsilon + eta + 1 = {want} conflicts with d range {self.d}")
            self.d = (want, want)

    def to_json(self) -> dict:
        return {
            "seed": self.seed, "trials": self.trials,
            "m": list(self.m), "n": list(self.n), "d": list(self.d),
            "epsilon": self.epsilon, "eta": self.eta,
            "magnitude": self.magnitude, "placement": self.placement,
            "tol": self.tol, "format": self.fmt, "force": self.force,
            "check_eigen": self.check_eigen,
        }


def _draw(rng, lohi) -> int:
    lo, hi = lohi
    return int(rng.integers(lo, hi + 1))


def generate_trial(config: ExperimentConfig, index: int):
    """Deterministic trial data: ``(pencil, perturbation, rng)``."""
    rng = trial_rng(config.seed, index)
    m = _draw(rng, config.m)
    n = _draw(rng, config.n)
    d = _draw(rng, config.d)
    eps, eta = split_for_placement(config.placement, d, config.epsilon, config.eta)
    if eps + eta + 1 != d or eps < 0 or eta < 0:
        raise GradeError(f"invalid split eps={eps}, eta={eta} for d={d}")
    P = random_polynomial(m, n, d, rng, norm=1.0)
    L = from_polynomial(P, eps, eta, config.placement)
    dL = random_pencil_perturbation(L.shape, config.magnitude, rng)
    return L, dL, rng


def run_backward_error_batch(config: ExperimentConfig) -> dict:
    """Run the batch and return per-trial rows plus a summary.

    Trials whose perturbation violates the guaranteed radius are marked
    skipped, not failed.
    """
    rows = []
    passed = skipped = failed = 0
    worst_quotient = 0.0
    for index in range(config.trials):
        L, dL, _ = generate_trial(config, index)
        row = {"trial": index, "epsilon": L.eps, "eta": L.eta,
               "m": L.m, "n": L.n, "grade": L.grade}
        try:
            report = run_pipeline(L, dL, force=config.force,
                                  check_eigen=config.check_eigen)
        except PreconditionError as exc:
            skipped += 1
            row.update({"status": "skipped", "reason": str(exc)})
            rows.append(row)
            continue
        quotient = report.ratio / report.bound if report.bound > 0 else 0.0
        worst_quotient = max(worst_quotient, quotient)
        ok = report.bound_holds and (report.step1 is None
                                     or report.step1.gauge is None
                                     or report.step1.gauge.solvable)
        if ok:
            passed += 1
        else:
            failed += 1
        row.update({
            "status": "passed" if ok else "failed",
            "ratio": report.ratio,
            "bound": report.bound,
            "bound_label": report.bound_label,
            "bound_informal": report.bound_informal,
            "margin": report.bound - report.ratio,
            "ratio_over_bound": quotient,
            "norm_M": report.norm_M,
            "norm_L": report.norm_L,
            "norm_dL": report.norm_dL,
            "step1_residual": report.step1.residual if report.step1 else None,
            "step1_iterations": report.step1.iterations if report.step1 else None,
            "step2_residual_eps": report.step2_residual_eps,
            "step2_residual_eta": report.step2_residual_eta,
            "eigen_checked": report.eigen_checked,
            "eigen_max_distance": report.eigen_max_distance,
            "eigen_consistent": report.eigen_consistent,
            "shift_consistent": report.shift_consistent,
        })
        rows.append(row)
    return {
        "config": config.to_json(),
        "trials": rows,
        "summary": {
            "trials": config.trials,
            "passed": passed,
            "skipped": skipped,
            "failed": failed,
            "max_ratio_over_bound": worst_quotient,
        },
    }
