"""Complete eigenstructure of matrix pencils.

The staircase reduction alternates unitary column compressions of the
leading coefficient with row compressions of the trailing coefficient
restricted to the compressed columns.  One pass extracts the right minimal
indices together with the infinite elementary divisors; a second pass on the
conjugate transpose of the remainder extracts the left minimal indices; QZ on
the square regular core delivers the finite eigenvalues.

Rank decisions inside the staircase use one absolute threshold derived from
the input pencil, ``max(rows, cols)^3 * eps * scale`` with ``scale`` the
pencil's spectral norm: each deflation stage feeds its projection error into
the next, amplified by the inverse of the local singular-value gap, so the
allowance must cover the accumulated error of the whole reduction rather
than a single SVD (the cubic dimension factor was calibrated on the random
singular-product population used by the tests).  Stage-local thresholds
would misread that noise as structure.  Every decision is logged so
borderline outcomes are diagnosable; the problem is intrinsically ill-posed
and a tolerance-free answer does not exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import EigenstructureShiftError, InconclusiveError, ShapeError
from .matpoly import MatrixPolynomial, Pencil, as_pencil, convolution
from .tolerances import (RankDecision, numerical_rank, svd_with_rank,
                         working_eps)


@dataclass
class Eigenstructure:
    """Finite eigenvalues (with multiplicity, one list entry each), infinite
    elementary divisor degrees, and sorted left/right minimal indices."""

    finite: list[complex] = field(default_factory=list)
    infinite: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    rank_log: list[RankDecision] = field(default_factory=list)

    def index_sum(self) -> int:
        return len(self.finite) + sum(self.infinite) + sum(self.right) + sum(self.left)

    def has_borderline_decision(self, window: float = 32.0) -> bool:
        return any(d.is_borderline(window) for d in self.rank_log)

    def to_json(self) -> dict:
        grouped: list[list[float]] = []
        for lam in self.finite:
            for entry in grouped:
                if entry[0] == lam.real and entry[1] == lam.imag:
                    entry[2] += 1
                    break
            else:
                grouped.append([float(lam.real), float(lam.imag), 1])
        return {
            "finite": [[re, im, int(mult)] for re, im, mult in grouped],
            "infinite": [int(k) for k in self.infinite],
            "right": [int(k) for k in self.right],
            "left": [int(k) for k in self.left],
            "rank_log": [d.to_json() for d in self.rank_log],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Eigenstructure":
        finite = []
        for re, im, mult in obj.get("finite", []):
            finite.extend([complex(re, im)] * int(mult))
        return cls(
            finite=finite,
            infinite=[int(k) for k in obj.get("infinite", [])],
            right=[int(k) for k in obj.get("right", [])],
            left=[int(k) for k in obj.get("left", [])],
        )


def chordal_distance(a: complex, b: complex) -> float:
    """Distance on the Riemann sphere; ``inf`` inputs are supported."""
    a_inf = np.isinf(a)
    b_inf = np.isinf(b)
    if a_inf and b_inf:
        return 0.0
    if a_inf:
        return 1.0 / np.sqrt(1.0 + abs(b) ** 2)
    if b_inf:
        return 1.0 / np.sqrt(1.0 + abs(a) ** 2)
    return abs(a - b) / np.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2))


def match_eigenvalues(first, second) -> float:
    """Largest chordal distance in a minimal-cost pairing of two multisets.

    Raises :class:`ShapeError` when the multisets have different sizes.
    """
    from scipy.optimize import linear_sum_assignment

    first = list(first)
    second = list(second)
    if len(first) != len(second):
        raise ShapeError(
            f"cannot match multisets of sizes {len(first)} and {len(second)}"
        )
    if not first:
        return 0.0
    cost = np.array([[chordal_distance(a, b) for b in second] for a in first])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def _is_regular(pencil: Pencil, rng_seed: int = 12345) -> bool:
    if pencil.rows != pencil.cols:
        return False
    rng = np.random.default_rng(rng_seed)
    for _ in range(2):
        lam = complex(rng.standard_normal(), rng.standard_normal())
        if numerical_rank(pencil.eval(lam)) == pencil.rows:
            return True
    return False


def generalized_eigenvalues(pencil, tol=None):
    """Finite eigenvalue list and infinite eigenvalue count of a regular pencil.

    Implemented through the QZ factorization in homogeneous form; an
    eigenvalue is classified infinite when its ``beta`` is negligible
    against ``(alpha, beta)``.
    """
    pencil = as_pencil(pencil)
    if pencil.rows != pencil.cols:
        raise ShapeError("generalized eigenvalues need a square pencil")
    if not _is_regular(pencil):
        raise ShapeError("singular pencil: use staircase_eigenstructure")
    if pencil.rows == 0:
        return [], 0
    # det(M0 + lam*M1) = 0  <=>  lam is an eigenvalue of (M0, -M1) in the
    # scipy convention det(a - mu*b) = 0.
    w = scipy.linalg.eig(pencil.M0, -pencil.M1, right=False,
                         homogeneous_eigvals=True)
    alpha, beta = np.asarray(w[0]), np.asarray(w[1])
    eps = working_eps() if tol is None else tol
    finite = []
    infinite = 0
    for a, b in zip(alpha, beta):
        if abs(b) <= 10.0 * eps * np.hypot(abs(a), abs(b)):
            infinite += 1
        else:
            finite.append(complex(a / b))
    return finite, infinite


def _staircase_pass(A, B, threshold, log, label):
    """One staircase pass; returns stage counts and the deflated remainder.

    Stage ``j`` compresses the columns onto ``null(B)`` (``s_j`` of them) and
    the rows onto the range of ``A`` restricted to those columns (``r_j``).
    ``s_j - r_j`` minimal indices of value ``j - 1`` and, after the pass,
    ``r_j - s_{j+1}`` divisors of degree ``j`` at infinity are read off.
    """
    ss, rr = [], []
    A_cur = np.array(A, dtype=complex)
    B_cur = np.array(B, dtype=complex)
    stage = 0
    while A_cur.shape[1] > 0:
        stage += 1
        p, q = A_cur.shape
        rank_b, _, _, Vb = svd_with_rank(
            B_cur, tol=threshold, context=f"{label}:stage{stage}:B", log=log)
        s_j = q - rank_b
        if s_j == 0:
            break
        V_null = Vb[:, rank_b:]
        V_keep = Vb[:, :rank_b]
        A_null = A_cur @ V_null
        rank_a, _, Ua, _ = svd_with_rank(
            A_null, tol=threshold, context=f"{label}:stage{stage}:A", log=log)
        ss.append(s_j)
        rr.append(rank_a)
        U_rest = Ua[:, rank_a:]
        A_cur = U_rest.conj().T @ A_cur @ V_keep
        B_cur = U_rest.conj().T @ B_cur @ V_keep
    return ss, rr, A_cur, B_cur


def _counts_to_structure(ss, rr):
    minimal, divisors = [], []
    for j in range(1, len(ss) + 1):
        minimal.extend([j - 1] * (ss[j - 1] - rr[j - 1]))
        s_next = ss[j] if j < len(ss) else 0
        divisors.extend([j] * (rr[j - 1] - s_next))
    return minimal, divisors


def staircase_eigenstructure(pencil, tol=None) -> Eigenstructure:
    """Complete eigenstructure of an arbitrary (possibly singular,
    rectangular) pencil ``M0 + lambda*M1`` by unitary staircase reduction."""
    pencil = as_pencil(pencil)
    A, B = pencil.M0, pencil.M1
    log: list[RankDecision] = []
    scale = max(
        float(np.linalg.norm(A, 2)) if A.size else 0.0,
        float(np.linalg.norm(B, 2)) if B.size else 0.0,
    )
    if tol is None:
        # max(dim)^3 * eps * scale: the cubic factor absorbs the error the
        # successive deflation stages accumulate and amplify.
        dim = max(A.shape[0], A.shape[1], 1)
        threshold = dim ** 3 * working_eps() * scale if scale > 0.0 else 0.0
    else:
        threshold = float(tol)

    ss, rr, A1, B1 = _staircase_pass(A, B, threshold, log, "right")
    right, infinite = _counts_to_structure(ss, rr)

    ss2, rr2, A2h, B2h = _staircase_pass(
        A1.conj().T, B1.conj().T, threshold, log, "left")
    left, leftover = _counts_to_structure(ss2, rr2)
    # All infinite structure is consumed by the first pass; anything the
    # second pass reports came from a near-threshold decision.
    infinite.extend(leftover)

    finite: list[complex] = []
    if A2h.shape[0] != A2h.shape[1]:
        raise ShapeError(
            f"staircase core is not square ({A2h.shape}); inconsistent rank "
            "decisions, try an explicit tolerance")
    if A2h.shape[0] > 0:
        w = scipy.linalg.eig(A2h, -B2h, right=False, homogeneous_eigvals=True)
        alpha, beta = np.asarray(w[0]), np.asarray(w[1])
        eps = working_eps()
        for a, b in zip(alpha, beta):
            if abs(b) <= 10.0 * eps * np.hypot(abs(a), abs(b)):
                # The staircase certified the core's leading coefficient as
                # full rank, so this is a borderline artifact; keep it as a
                # degree-1 divisor at infinity and leave a log entry.
                log.append(RankDecision("core:qz-beta", (1, 1),
                                        np.array([abs(b)]), 0,
                                        10.0 * eps * np.hypot(abs(a), abs(b))))
                infinite.append(1)
            else:
                # The core pass ran on the conjugate transpose, which
                # conjugates the spectrum.
                finite.append(complex(a / b).conjugate())
    return Eigenstructure(
        finite=finite,
        infinite=sorted(infinite),
        right=sorted(right),
        left=sorted(left),
        rank_log=log,
    )


def right_minimal_indices_by_convolution(Q: MatrixPolynomial, j_max=None,
                                         tol=None) -> list[int]:
    """Right minimal indices of a matrix polynomial from the nullities of its
    convolution matrices.

    ``nullity(C_j) - nullity(C_{j-1})`` counts the indices that are at most
    ``j``; the scan stops once the count reaches ``cols - rank`` and raises
    :class:`InconclusiveError` if ``j_max`` is hit first.
    """
    total = Q.cols - _normal_rank(Q, tol)
    if total == 0:
        return []
    if j_max is None:
        j_max = Q.cols * max(Q.grade, 1) + 1
    indices: list[int] = []
    prev_nullity = 0
    prev_leq = 0
    for j in range(j_max + 1):
        C = convolution(Q, j).matrix
        rank = numerical_rank(C, tol=tol, context=f"convolution:j={j}")
        nullity = C.shape[1] - rank
        leq = nullity - prev_nullity
        indices.extend([j] * (leq - prev_leq))
        if leq == total:
            return sorted(indices)
        prev_nullity, prev_leq = nullity, leq
    raise InconclusiveError(
        f"scan cap j_max={j_max} reached with {len(indices)} of {total} "
        "right minimal indices found")


def _normal_rank(Q: MatrixPolynomial, tol=None, samples: int = 3) -> int:
    rng = np.random.default_rng(2718281828)
    best = 0
    for _ in range(samples):
        lam = complex(rng.standard_normal(), rng.standard_normal())
        best = max(best, numerical_rank(Q.eval(lam), tol=tol))
    return best


def shift_recovery(structure: Eigenstructure, eps: int, eta: int) -> Eigenstructure:
    """Map a linearization's eigenstructure to the polynomial's: right
    minimal indices drop by ``eps``, left ones by ``eta``, eigenvalue content
    is shared."""
    for idx in structure.right:
        if idx < eps:
            raise EigenstructureShiftError(
                f"right minimal index {idx} is below the shift {eps}")
    for idx in structure.left:
        if idx < eta:
            raise EigenstructureShiftError(
                f"left minimal index {idx} is below the shift {eta}")
    return Eigenstructure(
        finite=list(structure.finite),
        infinite=list(structure.infinite),
        right=sorted(i - eps for i in structure.right),
        left=sorted(i - eta for i in structure.left),
        rank_log=list(structure.rank_log),
    )


def det_roots(P: MatrixPolynomial, trim_tol: float = 1e-10) -> np.ndarray:
    """Finite roots of ``det P(lambda)`` via exact coefficient expansion.

    The reference oracle for regular-polynomial eigenvalues at tiny sizes.
    Trailing coefficients below ``trim_tol`` times the largest one are
    dropped (they encode eigenvalues at infinity).
    """
    from .matpoly import determinant

    coeffs = determinant(P)
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise ShapeError("det is identically zero: the polynomial is singular")
    trimmed = np.trim_zeros(np.where(np.abs(coeffs) > trim_tol * scale, coeffs, 0.0), "b")
    if len(trimmed) <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(trimmed[::-1])
