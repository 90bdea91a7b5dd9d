"""Working precision and the repo-wide numerical rank policy.

Every rank decision in the package goes through :func:`numerical_rank`, which
counts singular values above ``max(rows, cols) * eps * sigma_max`` unless the
caller supplies an explicit tolerance.  The unit roundoff ``eps`` can be
overridden through the ``BKLAB_EPS`` environment variable, which is read on
every call so tests can monkeypatch it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

ENV_EPS = "BKLAB_EPS"


def working_eps() -> float:
    """Unit roundoff used in tolerance formulas (``BKLAB_EPS`` overrides)."""
    raw = os.environ.get(ENV_EPS)
    if raw is None:
        return float(np.finfo(float).eps)
    return float(raw)


def rank_tolerance(shape, sigma_max, eps=None) -> float:
    """Default threshold: ``max(shape) * eps * sigma_max``."""
    if eps is None:
        eps = working_eps()
    dim = max(int(shape[0]), int(shape[1]), 1)
    return dim * eps * float(sigma_max)


@dataclass
class RankDecision:
    """Record of one numerical rank decision.

    ``is_borderline`` flags decisions where some singular value sits within a
    multiplicative ``window`` of the threshold, i.e. where a slightly
    different tolerance would have changed the outcome.
    """

    context: str
    shape: tuple[int, int]
    singular_values: np.ndarray
    rank: int
    tolerance: float

    def is_borderline(self, window: float = 32.0) -> bool:
        s = np.asarray(self.singular_values, dtype=float)
        if s.size == 0 or self.tolerance == 0.0:
            return False
        lo, hi = self.tolerance / window, self.tolerance * window
        return bool(np.any((s >= lo) & (s <= hi)))

    def to_json(self) -> dict:
        return {
            "context": self.context,
            "shape": [int(self.shape[0]), int(self.shape[1])],
            "singular_values": [float(x) for x in self.singular_values],
            "rank": int(self.rank),
            "tolerance": float(self.tolerance),
            "borderline": self.is_borderline(),
        }


def svd_with_rank(M, tol=None, scale=None, context="", log=None):
    """Full SVD of ``M`` plus a rank decision under the repo policy.

    Returns ``(rank, s, U, V)`` with ``U`` (m x m) and ``V`` (n x n) unitary.
    ``scale`` replaces ``sigma_max(M)`` as the reference scale in the default
    tolerance; an explicit ``tol`` wins over both.  The decision is appended
    to ``log`` when one is given.
    """
    M = np.asarray(M)
    m, n = M.shape
    if M.size == 0:
        s = np.zeros(0)
        U = np.eye(m, dtype=complex)
        V = np.eye(n, dtype=complex)
        rank = 0
        used_tol = 0.0 if tol is None else float(tol)
    else:
        U, s, Vh = np.linalg.svd(M, full_matrices=True)
        V = Vh.conj().T
        if tol is None:
            ref = float(s[0]) if scale is None else float(scale)
            used_tol = rank_tolerance((m, n), ref)
        else:
            used_tol = float(tol)
        rank = int(np.sum(s > used_tol))
    if log is not None:
        log.append(RankDecision(context, (m, n), np.array(s, copy=True), rank, used_tol))
    return rank, s, U, V


def numerical_rank(M, tol=None, scale=None, context="", log=None) -> int:
    rank, _, _, _ = svd_with_rank(M, tol=tol, scale=scale, context=context, log=log)
    return rank


def pseudoinverse(M, tol=None, scale=None, context="", log=None):
    """SVD pseudoinverse truncated by the rank policy."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=complex)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    if tol is None:
        ref = float(s[0]) if scale is None else float(scale)
        used_tol = rank_tolerance(M.shape, ref)
    else:
        used_tol = float(tol)
    rank = int(np.sum(s > used_tol))
    if log is not None:
        log.append(RankDecision(context, M.shape, np.array(s, copy=True), rank, used_tol))
    inv = np.zeros_like(s)
    inv[:rank] = 1.0 / s[:rank]
    return (Vh.conj().T * inv) @ U.conj().T
