"""Construction, validation, recovery and reduction of block Kronecker
pencils.

An ``(eps, n, eta, m)``-block Kronecker pencil consists of an arbitrary
``(eta+1)m x (eps+1)n`` pencil ``M0 + lambda*M1`` in the (1,1) block, the
fixed singular blocks ``L_eta^T (x) I_m`` and ``L_eps (x) I_n`` on the
antidiagonal, and a zero (2,2) block.  It represents the polynomial

    ``(Lambda_eta^T (x) I_m) (M0 + lambda*M1) (Lambda_eps (x) I_n)``

of grade ``eps + eta + 1``, and its minimal indices are those of the
polynomial shifted by ``eps`` (right) and ``eta`` (left).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GradeError, LayoutError, PlacementError, ShapeError
from .matpoly import (MatrixPolynomial, Pencil, build_L, build_Lambda,
                      kron_constant, multiply, pair_norm, vstack,
                      _matrix_from_json, _matrix_to_json)
from .minimal_bases import build_V_inverse

PLACEMENT_TAGS = ("frobenius1", "frobenius2", "hook", "custom")


@dataclass
class PlacementSpec:
    """Which (1,1)-block pattern to synthesize a polynomial into.

    ``frobenius1`` needs ``eta == 0`` and ``eps == d-1``; ``frobenius2``
    needs ``eps == 0`` and ``eta == d-1``; ``hook`` works for every split
    with ``eps + eta + 1 == d``; ``custom`` carries explicit ``M0, M1``
    whose antidiagonal sums are checked rather than assumed.
    """

    tag: str
    M0: np.ndarray | None = None
    M1: np.ndarray | None = None

    def __post_init__(self):
        if self.tag not in PLACEMENT_TAGS:
            raise PlacementError(f"unknown placement tag {self.tag!r}")
        if self.tag == "custom" and (self.M0 is None or self.M1 is None):
            raise PlacementError("custom placement requires M0 and M1")


class BlockKroneckerPencil:
    """The data ``(eps, eta, m, n, M0, M1)`` plus exact assembly."""

    def __init__(self, M0, M1, eps: int, eta: int, m: int, n: int):
        if eps < 0 or eta < 0 or m < 1 or n < 1:
            raise ShapeError("need eps, eta >= 0 and m, n >= 1")
        M0 = np.array(M0, dtype=complex)
        M1 = np.array(M1, dtype=complex)
        want = ((eta + 1) * m, (eps + 1) * n)
        if M0.shape != want or M1.shape != want:
            raise ShapeError(
                f"M0/M1 must be {want}, got {M0.shape} and {M1.shape}")
        M0.setflags(write=False)
        M1.setflags(write=False)
        self.M0, self.M1 = M0, M1
        self.eps, self.eta, self.m, self.n = eps, eta, m, n

    @property
    def grade(self) -> int:
        return self.eps + self.eta + 1

    @property
    def shape(self) -> tuple[int, int]:
        return ((self.eta + 1) * self.m + self.eps * self.n,
                (self.eps + 1) * self.n + self.eta * self.m)

    def one_one_block(self) -> Pencil:
        return Pencil.from_parts(self.M0, self.M1)

    def assemble(self) -> Pencil:
        """Full pencil with exact L blocks and an exact zero (2,2) block."""
        rows, cols = self.shape
        r1 = (self.eta + 1) * self.m
        c1 = (self.eps + 1) * self.n
        A = np.zeros((rows, cols), dtype=complex)
        B = np.zeros((rows, cols), dtype=complex)
        A[:r1, :c1] = self.M0
        B[:r1, :c1] = self.M1
        if self.eta:
            Lt = build_L(self.eta, self.m)
            A[:r1, c1:] = Lt.M0.T
            B[:r1, c1:] = Lt.M1.T
        if self.eps:
            Le = build_L(self.eps, self.n)
            A[r1:, :c1] = Le.M0
            B[r1:, :c1] = Le.M1
        return Pencil.from_parts(A, B)

    def frobenius_norm(self) -> float:
        return self.assemble().frobenius_norm()

    def one_one_norm(self) -> float:
        return pair_norm(self.M0, self.M1)

    def block(self, which: str, i: int, j: int) -> np.ndarray:
        """``m x n`` block ``(i, j)`` (one-based) of ``M0`` or ``M1``."""
        M = self.M0 if which == "M0" else self.M1
        return M[(i - 1) * self.m:i * self.m, (j - 1) * self.n:j * self.n]

    def to_json(self) -> dict:
        return {
            "epsilon": self.eps,
            "eta": self.eta,
            "m": self.m,
            "n": self.n,
            "M0": _matrix_to_json(self.M0),
            "M1": _matrix_to_json(self.M1),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BlockKroneckerPencil":
        eps, eta = int(obj["epsilon"]), int(obj["eta"])
        m, n = int(obj["m"]), int(obj["n"])
        M0 = _matrix_from_json(obj["M0"], (eta + 1) * m, (eps + 1) * n)
        M1 = _matrix_from_json(obj["M1"], (eta + 1) * m, (eps + 1) * n)
        return cls(M0, M1, eps, eta, m, n)

    def __repr__(self) -> str:
        return (f"BlockKroneckerPencil(eps={self.eps}, eta={self.eta}, "
                f"m={self.m}, n={self.n})")


def make_pencil(M0, M1, eps: int, eta: int, m: int, n: int) -> BlockKroneckerPencil:
    return BlockKroneckerPencil(M0, M1, eps, eta, m, n)


def from_polynomial(P: MatrixPolynomial, eps: int, eta: int,
                    placement="hook", tol: float = 1e-12) -> BlockKroneckerPencil:
    """Block Kronecker pencil whose antidiagonal coefficient sums reproduce
    the coefficients of ``P``."""
    if isinstance(placement, str):
        placement = PlacementSpec(placement)
    d = P.grade
    m, n = P.shape
    if eps + eta + 1 != d:
        raise GradeError(f"eps + eta + 1 = {eps + eta + 1} but the grade is {d}")
    if placement.tag == "frobenius1" and (eta != 0 or eps != d - 1):
        raise PlacementError("frobenius1 requires eta = 0 and eps = d - 1")
    if placement.tag == "frobenius2" and (eps != 0 or eta != d - 1):
        raise PlacementError("frobenius2 requires eps = 0 and eta = d - 1")

    shape = ((eta + 1) * m, (eps + 1) * n)
    M0 = np.zeros(shape, dtype=complex)
    M1 = np.zeros(shape, dtype=complex)
    if placement.tag == "frobenius1":
        M1[:, :n] = P.coeff(d)
        for j in range(1, eps + 2):
            M0[:, (j - 1) * n:j * n] = P.coeff(d - j)
    elif placement.tag == "frobenius2":
        M1[:m, :] = P.coeff(d)
        for i in range(1, eta + 2):
            M0[(i - 1) * m:i * m, :] = P.coeff(d - i)
    elif placement.tag == "hook":
        # First block row carries P_{d-1} .. P_{d-eps-1}; the last block
        # column continues with P_{d-eps-2} .. P_0; P_d rides on lambda.
        M1[:m, :n] = P.coeff(d)
        for j in range(1, eps + 2):
            M0[:m, (j - 1) * n:j * n] = P.coeff(d - j)
        for i in range(2, eta + 2):
            M0[(i - 1) * m:i * m, eps * n:(eps + 1) * n] = P.coeff(d - eps - i)
    else:
        M0 = np.array(placement.M0, dtype=complex)
        M1 = np.array(placement.M1, dtype=complex)
        if M0.shape != shape or M1.shape != shape:
            raise ShapeError(f"custom blocks must have shape {shape}")
    pencil = BlockKroneckerPencil(M0, M1, eps, eta, m, n)
    residuals = validate_placement(pencil, P)
    if np.max(residuals) > tol * max(1.0, P.frobenius_norm()):
        raise PlacementError(
            f"antidiagonal sums do not reproduce the polynomial "
            f"(max residual {np.max(residuals):.3e})")
    return pencil


def validate_placement(L: BlockKroneckerPencil, P: MatrixPolynomial) -> np.ndarray:
    """Per-coefficient residuals of the antidiagonal sum condition: entry
    ``k`` is the Frobenius distance between the ``k``-th coefficient of the
    represented polynomial and ``P_k``."""
    d = L.grade
    if P.grade != d:
        raise GradeError(f"pencil represents grade {d}, polynomial has {P.grade}")
    m, n = L.m, L.n
    res = np.zeros(d + 1)
    for k in range(d + 1):
        acc = np.zeros((m, n), dtype=complex)
        for i in range(1, L.eta + 2):
            j1 = d + 2 - k - i
            if 1 <= j1 <= L.eps + 1:
                acc += L.block("M1", i, j1)
            j0 = d + 1 - k - i
            if 1 <= j0 <= L.eps + 1:
                acc += L.block("M0", i, j0)
        res[k] = np.linalg.norm(acc - P.coeff(k))
    return res


def recover_polynomial(L: BlockKroneckerPencil) -> MatrixPolynomial:
    """``(Lambda_eta^T (x) I_m) (M0 + lambda*M1) (Lambda_eps (x) I_n)`` by
    exact polynomial multiplication, declared at grade ``eps + eta + 1``."""
    left = build_Lambda(L.eta, L.m).transpose()
    right = build_Lambda(L.eps, L.n)
    return multiply(multiply(left, L.one_one_block()), right)


@dataclass
class AntiTriangularForm:
    form: MatrixPolynomial
    Z: MatrixPolynomial
    X: MatrixPolynomial
    Y: MatrixPolynomial
    middle: MatrixPolynomial
    left_factor: MatrixPolynomial
    right_factor: MatrixPolynomial


def anti_triangularize(L: BlockKroneckerPencil, tol: float = 1e-12) -> AntiTriangularForm:
    """Unimodular reduction to the block anti-triangular form.

    Multiplies the assembled pencil by the explicit inverse completions of
    the L blocks and asserts the resulting layout: identity corner blocks,
    zero blocks below the anti-diagonal, and the represented polynomial in
    the middle.  A failed assertion means a construction bug, not bad input.
    """
    from .matpoly import direct_sum, identity

    eps, eta, m, n = L.eps, L.eta, L.m, L.n
    v_eta_inv_T = kron_constant(build_V_inverse(eta).transpose(), np.eye(m))
    v_eps_inv = kron_constant(build_V_inverse(eps), np.eye(n))
    left = direct_sum(v_eta_inv_T, identity(eps * n))
    right = direct_sum(v_eps_inv, identity(eta * m))
    form = multiply(multiply(left, L.assemble()), right)

    rows = [eta * m, m, eps * n]
    cols = [eps * n, n, eta * m]
    r_ofs = np.cumsum([0] + rows)
    c_ofs = np.cumsum([0] + cols)

    def blk(i, j):
        return form.submatrix(range(r_ofs[i], r_ofs[i + 1]),
                              range(c_ofs[j], c_ofs[j + 1]))

    scale = max(1.0, form.frobenius_norm())
    middle = blk(1, 1)
    recovered = recover_polynomial(L)
    checks = {
        "(1,3) identity": _poly_minus_identity(blk(0, 2)),
        "(3,1) identity": _poly_minus_identity(blk(2, 0)),
        "(2,3) zero": blk(1, 2).frobenius_norm(),
        "(3,2) zero": blk(2, 1).frobenius_norm(),
        "(3,3) zero": blk(2, 2).frobenius_norm(),
        "middle equals recovered": (middle.with_grade(max(middle.grade, recovered.grade))
                                    - recovered.with_grade(max(middle.grade, recovered.grade))
                                    ).frobenius_norm(),
    }
    for name, value in checks.items():
        if value > tol * scale:
            raise LayoutError(f"anti-triangular layout check failed: {name} "
                              f"residual {value:.3e}")
    return AntiTriangularForm(form=form, Z=blk(0, 0), X=blk(0, 1), Y=blk(1, 0),
                              middle=middle, left_factor=left, right_factor=right)


def _poly_minus_identity(P: MatrixPolynomial) -> float:
    if P.rows != P.cols:
        raise LayoutError(f"expected a square identity block, got {P.shape}")
    delta = np.array(P.coeff_stack, copy=True)
    if delta.shape[0] > 0 and P.rows > 0:
        delta[0] -= np.eye(P.rows)
    return float(np.linalg.norm(delta))


def lift_right_null_vector(L: BlockKroneckerPencil, h: MatrixPolynomial,
                           tol: float = 1e-10) -> MatrixPolynomial:
    """Lift a right null vector of the represented polynomial to one of the
    pencil.

    With ``Q`` the represented polynomial and ``Q h = 0``, the lift is
    ``z = [(Lambda_eps (x) I_n) h ; -N2hat M (Lambda_eps (x) I_n) h]`` where
    ``N2hat`` is read off the leading block columns of the inverse completion
    on the eta side.  The degree shifts by exactly ``eps``:
    ``deg z = eps + deg h``.
    """
    if h.cols != 1 or h.rows != L.n:
        raise ShapeError(f"h must be {L.n} x 1, got {h.shape}")
    Q = recover_polynomial(L)
    residual = multiply(Q, h).frobenius_norm()
    scale = max(1.0, Q.frobenius_norm() * h.frobenius_norm())
    if residual > tol * scale:
        raise ShapeError(
            f"h is not in the right null space (residual {residual:.3e})")
    top = multiply(build_Lambda(L.eps, L.n), h)
    if L.eta == 0:
        return top
    v_inv = kron_constant(build_V_inverse(L.eta), np.eye(L.m))
    n2hat = v_inv.submatrix(range((L.eta + 1) * L.m), range(L.eta * L.m)).transpose()
    bottom = -1.0 * multiply(n2hat, multiply(L.one_one_block(), top))
    return vstack([top, bottom])
