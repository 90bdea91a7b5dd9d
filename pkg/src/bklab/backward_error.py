"""Finite (not first-order) mapping of pencil perturbations back to
polynomial perturbations, in three steps.

Given a block Kronecker pencil ``L`` of a polynomial ``P`` and a perturbation
``dL`` of the full pencil:

1. **Restore the zero block.**  Solve the quadratic Sylvester-like system for
   constant matrices ``(C, D)`` so that the strict equivalence
   ``[I 0; C I] (L + dL) [I D; 0 I]`` has an exactly zero (2,2) block again.
   Existence and the bound ``||(C,D)|| <= 2 theta / delta`` hold whenever
   ``delta = sigma_min(T) - ||dT||_2 > 0`` and ``theta*omega/delta^2 < 1/4``;
   the solution is reached by a fixed-point iteration whose first iterate is
   the minimum-norm solution of the linearized system.
2. **Repair the dual bases.**  The perturbed antidiagonal blocks are still
   minimal bases below an explicit radius; their perturbed duals
   ``Lambda + dR`` are recovered through one minimum-norm convolution solve
   per side, with ``||dR|| <= sqrt(2)(eps+1) ||dLtilde_21||``.
3. **Assemble the polynomial perturbation.**
   ``P + dP = (Lambda_eta + dR_eta)^T (M + dL_11) (Lambda_eps + dR_eps)``.

The pipeline evaluates the finite backward-error bounds (the nondegenerate
``14 d^{5/2} (1 + ||M|| + ||M||^2)`` form, the degenerate ``2d (1 + ||M||)``
form for one-sided pencils, and the informal ``d^3 sqrt(m+n)`` form for
normalized data) and verifies that the achieved ratio sits below them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_kronecker import BlockKroneckerPencil, from_polynomial, recover_polynomial
from .errors import ConvergenceError, PreconditionError, ShapeError
from .matpoly import (MatrixPolynomial, Pencil, build_L, build_Lambda,
                      convolution, multiply, pair_norm, stack_coefficients,
                      unstack_coefficients)
from .tolerances import pseudoinverse, working_eps

SQRT2M1 = np.sqrt(2.0) - 1.0


# -- the linear operator ----------------------------------------------------

def _ef(k: int, blocks: int) -> tuple[np.ndarray, np.ndarray]:
    E = np.kron(np.hstack([np.eye(k), np.zeros((k, 1))]), np.eye(blocks))
    F = np.kron(np.hstack([np.zeros((k, 1)), np.eye(k)]), np.eye(blocks))
    return E, F


def build_T(eps: int, eta: int, m: int, n: int) -> np.ndarray:
    """Coefficient matrix of the linearized Sylvester system acting on
    ``[vec(C); vec(D)]``; full row rank with the closed-form smallest
    singular value from :mod:`bklab.spectral_constants`."""
    if eps < 1 or eta < 1:
        raise ShapeError("the Sylvester step only exists for eps, eta >= 1")
    E_eta, F_eta = _ef(eta, m)
    E_eps, F_eps = _ef(eps, n)
    I_en = np.eye(eps * n)
    I_hm = np.eye(eta * m)
    return np.vstack([
        np.hstack([np.kron(E_eta, I_en), np.kron(I_hm, E_eps)]),
        np.hstack([np.kron(F_eta, I_en), np.kron(I_hm, F_eps)]),
    ])


@dataclass
class PerturbationBlocks:
    """The perturbation pencil split along the natural partition, each block
    further split into its constant (``A``) and lambda (``B``) parts."""

    eps: int
    eta: int
    m: int
    n: int
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray
    B11: np.ndarray
    B12: np.ndarray
    B21: np.ndarray
    B22: np.ndarray

    @classmethod
    def from_pencil(cls, dL: Pencil, ref: BlockKroneckerPencil) -> "PerturbationBlocks":
        if dL.shape != ref.shape:
            raise ShapeError(
                f"perturbation shape {dL.shape} does not match pencil {ref.shape}")
        r1 = (ref.eta + 1) * ref.m
        c1 = (ref.eps + 1) * ref.n
        A, B = dL.coeff(0), dL.coeff(1)
        return cls(
            ref.eps, ref.eta, ref.m, ref.n,
            A[:r1, :c1], A[:r1, c1:], A[r1:, :c1], A[r1:, c1:],
            B[:r1, :c1], B[:r1, c1:], B[r1:, :c1], B[r1:, c1:],
        )

    def reassemble(self) -> Pencil:
        A = np.block([[self.A11, self.A12], [self.A21, self.A22]])
        B = np.block([[self.B11, self.B12], [self.B21, self.B22]])
        return Pencil.from_parts(A, B)

    def block_11(self) -> Pencil:
        return Pencil.from_parts(self.A11, self.B11)

    def block_12(self) -> Pencil:
        return Pencil.from_parts(self.A12, self.B12)

    def block_21(self) -> Pencil:
        return Pencil.from_parts(self.A21, self.B21)

    def delta_T(self) -> np.ndarray:
        """Perturbation of the Sylvester operator induced by the off-diagonal
        blocks (the (2,2) block only enters the right-hand side)."""
        I_en = np.eye(self.eps * self.n)
        I_hm = np.eye(self.eta * self.m)
        return np.vstack([
            np.hstack([np.kron(-self.A12.T, I_en), np.kron(I_hm, -self.A21)]),
            np.hstack([np.kron(self.B12.T, I_en), np.kron(I_hm, self.B21)]),
        ])


@dataclass
class SylvesterGauge:
    """The scalars governing Step-1 solvability."""

    sigma_min_T: float
    delta_T_norm: float       # exact spectral norm of the assembled dT
    delta_T_bound: float      # the a-priori bound 2 ||dL||_F
    delta: float
    theta: float
    omega: float

    @property
    def kappa1(self) -> float:
        return self.theta * self.omega / self.delta ** 2 if self.delta > 0 else np.inf

    @property
    def solvable(self) -> bool:
        return self.delta > 0 and self.kappa1 < 0.25

    def violated_condition(self):
        if self.delta <= 0:
            return "delta = sigma_min(T) - ||dT||_2 > 0"
        if self.kappa1 >= 0.25:
            return "theta * omega / delta^2 < 1/4"
        return None

    def to_json(self) -> dict:
        return {
            "sigma_min_T": self.sigma_min_T,
            "delta_T_norm": self.delta_T_norm,
            "delta_T_bound": self.delta_T_bound,
            "delta": self.delta,
            "theta": self.theta,
            "omega": self.omega,
            "kappa1": float(self.kappa1),
            "solvable": self.solvable,
        }


@dataclass
class Step1Result:
    C: np.ndarray
    D: np.ndarray
    gauge: SylvesterGauge | None
    iterations: int
    iterate_norms: list[float]
    kappa_sequence: list[float]
    residual: float
    dLt12: Pencil
    dLt21: Pencil

    @property
    def cd_norm(self) -> float:
        return pair_norm(self.C, self.D)


def _vec(M: np.ndarray) -> np.ndarray:
    return M.flatten(order="F")


def _unvec(x: np.ndarray, shape) -> np.ndarray:
    return x.reshape(shape, order="F")


def step1_radius(d: int, one_one_norm: float) -> float:
    """Perturbation radius under which Step 1 is guaranteed to succeed."""
    return (SQRT2M1 / d) ** 2 / (1.0 + one_one_norm)


def solve_step1(L: BlockKroneckerPencil, dL: Pencil, force: bool = False,
                max_iter: int = 200) -> Step1Result:
    """Solve the quadratic Sylvester-like system restoring the zero block.

    Returns the constants ``(C, D)``, the updated off-diagonal perturbations
    ``dLtilde_12 = (M + dL_11) D + dL_12`` and
    ``dLtilde_21 = C (M + dL_11) + dL_21``, the solvability gauge and the
    convergence trace.  For one-sided pencils (``eps == 0`` or ``eta == 0``)
    there is no zero block and the step passes the perturbation through.
    """
    from .spectral_constants import sigma_min_T_closed

    blocks = PerturbationBlocks.from_pencil(dL, L)
    eps, eta, m, n = L.eps, L.eta, L.m, L.n

    if eps == 0 or eta == 0:
        C = np.zeros((eps * n, (eta + 1) * m), dtype=complex)
        D = np.zeros(((eps + 1) * n, eta * m), dtype=complex)
        dLt12 = blocks.block_12()
        dLt21 = blocks.block_21()
        return Step1Result(C, D, None, 0, [], [], 0.0, dLt12, dLt21)

    T = build_T(eps, eta, m, n)
    dT = blocks.delta_T()
    sigma = sigma_min_T_closed(eps, eta)
    dT_norm = float(np.linalg.norm(dT, 2)) if dT.size else 0.0
    gauge = SylvesterGauge(
        sigma_min_T=sigma,
        delta_T_norm=dT_norm,
        delta_T_bound=2.0 * dL.frobenius_norm(),
        delta=sigma - dT_norm,
        theta=pair_norm(blocks.A22, blocks.B22),
        omega=pair_norm(L.M0 + blocks.A11, L.M1 + blocks.B11),
    )
    if not gauge.solvable and not force:
        raise PreconditionError(
            f"step 1 refused: violated {gauge.violated_condition()}",
            inequality=gauge.violated_condition() or "")

    Tp = pseudoinverse(T + dT, context="step1:pinv(T+dT)")
    b = np.concatenate([_vec(blocks.A22), -_vec(blocks.B22)])
    x0 = Tp @ b
    shape_C = (eps * n, (eta + 1) * m)
    shape_D = ((eps + 1) * n, eta * m)
    split = shape_C[0] * shape_C[1]
    C = _unvec(x0[:split], shape_C)
    D = _unvec(x0[split:], shape_D)
    M0_pert = L.M0 + blocks.A11
    M1_pert = L.M1 + blocks.B11

    eps_u = working_eps()
    iterate_norms = [pair_norm(C, D)]
    kappa_seq: list[float] = []
    kappa = gauge.kappa1
    iterations = 0
    if gauge.theta > 0:
        converged = False
        for iterations in range(1, max_iter + 1):
            kappa_seq.append(kappa)
            rhs = np.concatenate([
                _vec(C @ M0_pert @ D),
                -_vec(C @ M1_pert @ D),
            ])
            x_next = x0 + Tp @ rhs
            C_next = _unvec(x_next[:split], shape_C)
            D_next = _unvec(x_next[split:], shape_D)
            diff = pair_norm(C_next - C, D_next - D)
            C, D = C_next, D_next
            iterate_norms.append(pair_norm(C, D))
            kappa = gauge.kappa1 * (1.0 + kappa) ** 2
            if diff <= 100.0 * eps_u * (1.0 + pair_norm(C, D)):
                converged = True
                break
        if not converged:
            raise ConvergenceError(
                f"fixed point did not meet the stopping rule in {max_iter} "
                "iterations")

    dLt12 = Pencil.from_parts(M0_pert @ D + blocks.A12, M1_pert @ D + blocks.B12)
    dLt21 = Pencil.from_parts(C @ M0_pert + blocks.A21, C @ M1_pert + blocks.B21)

    # the transformed (2,2) block [C I](L+dL)[D;I] must vanish
    full = L.assemble()
    CI = np.hstack([C, np.eye(eps * n)])
    DI = np.vstack([D, np.eye(eta * m)])
    res0 = CI @ (full.M0 + dL.coeff(0)) @ DI
    res1 = CI @ (full.M1 + dL.coeff(1)) @ DI
    residual = pair_norm(res0, res1)
    return Step1Result(C, D, gauge, iterations, iterate_norms, kappa_seq,
                       residual, dLt12, dLt21)


def step2_radius(eps: int) -> float:
    return 1.0 / (2.0 * (eps + 1) ** 1.5)


def solve_step2(dLt21: Pencil, eps: int, n: int, force: bool = False):
    """Minimum-norm dual-basis correction for a perturbed ``L_eps (x) I_n``.

    Solves ``C_eps(L + dLt21) C_0(dR) = -C_0(dLt21 (Lambda_eps (x) I_n))``
    and returns ``(dR, duality_residual)`` where ``dR`` has grade ``eps`` and
    size ``(eps+1)n x n``, and the residual is the largest coefficient norm
    of ``(L + dLt21)(Lambda + dR)``, which vanishes in exact arithmetic.

    The eta side reuses this routine on the transposed (1,2) block.
    """
    if eps == 0:
        if dLt21.rows != 0:
            raise ShapeError("eps = 0 requires an empty (2,1) block")
        zero = MatrixPolynomial([np.zeros((n, n), dtype=complex)], grade=0)
        return zero, 0.0
    if dLt21.shape != (eps * n, (eps + 1) * n):
        raise ShapeError(
            f"expected shape {(eps * n, (eps + 1) * n)}, got {dLt21.shape}")
    norm = dLt21.frobenius_norm()
    if norm >= step2_radius(eps) and not force:
        raise PreconditionError(
            f"step 2 refused: ||dLtilde_21|| = {norm:.3e} is not below "
            f"1 / (2 (eps+1)^(3/2)) = {step2_radius(eps):.3e}",
            inequality="||dLtilde_21|| < 1/(2 (eps+1)^{3/2})")
    base = build_L(eps, n)
    K = Pencil.from_parts(base.M0 + dLt21.coeff(0), base.M1 + dLt21.coeff(1))
    lam = build_Lambda(eps, n)
    C_eps = convolution(K, eps).matrix
    rhs = stack_coefficients(multiply(dLt21, lam))
    X = -pseudoinverse(C_eps, context="step2:pinv(C_eps)") @ rhs
    dR = unstack_coefficients(X, eps, (eps + 1) * n)
    product = multiply(K, lam + dR)
    residual = float(max(np.linalg.norm(product.coeff(k))
                         for k in range(product.grade + 1)))
    return dR, residual


def assemble_step3(L: BlockKroneckerPencil, dL11: Pencil,
                   dR_eps: MatrixPolynomial, dR_eta: MatrixPolynomial,
                   force: bool = False) -> MatrixPolynomial:
    """``dP`` such that ``P + dP`` is the polynomial represented by the
    repaired strong block minimal bases pencil."""
    for name, dR in (("dR_eps", dR_eps), ("dR_eta", dR_eta)):
        if dR.frobenius_norm() >= 1.0 / np.sqrt(2.0) and not force:
            raise PreconditionError(
                f"step 3 refused: ||{name}|| >= 1/sqrt(2)",
                inequality=f"||{name}|| < 1/sqrt(2)")
    left = (build_Lambda(L.eta, L.m) + dR_eta).transpose()
    mid = Pencil.from_parts(L.M0 + dL11.coeff(0), L.M1 + dL11.coeff(1))
    right = build_Lambda(L.eps, L.n) + dR_eps
    perturbed = multiply(multiply(left, mid), right)
    return perturbed - recover_polynomial(L).with_grade(perturbed.grade)


# -- bounds ------------------------------------------------------------------

def bound_nondegenerate(d: int, norm_L: float, norm_P: float, norm_M: float,
                        norm_dL: float) -> float:
    """Ratio bound ``14 d^{5/2} (||L||/||P||) (1+||M||+||M||^2) (||dL||/||L||)``."""
    return (14.0 * d ** 2.5 * (norm_L / norm_P)
            * (1.0 + norm_M + norm_M ** 2) * (norm_dL / norm_L))


def bound_degenerate(d: int, norm_L: float, norm_P: float, norm_M: float,
                     norm_dL: float) -> float:
    """Ratio bound ``2 d (||L||/||P||) (1+||M||) (||dL||/||L||)`` for
    one-sided pencils."""
    return 2.0 * d * (norm_L / norm_P) * (1.0 + norm_M) * (norm_dL / norm_L)


def bound_informal(d: int, m: int, n: int, norm_L: float, norm_dL: float) -> float:
    """The ``d^3 sqrt(m+n) ||dL||/||L||`` rule of thumb for normalized data."""
    return d ** 3 * np.sqrt(m + n) * (norm_dL / norm_L)


def pipeline_radius(L: BlockKroneckerPencil) -> float:
    """Admissible ``||dL||_F`` for the full pipeline."""
    d = L.grade
    if L.eps == 0 or L.eta == 0:
        return 1.0 / (2.0 * d ** 1.5)
    return SQRT2M1 ** 2 / d ** 2.5 / (1.0 + L.one_one_norm())


@dataclass
class BackwardErrorReport:
    """Everything the pipeline produced, including the verification results."""

    eps: int
    eta: int
    m: int
    n: int
    grade: int
    degenerate: bool
    norm_P: float
    norm_L: float
    norm_M: float
    norm_dL: float
    radius: float
    admissible: bool
    step1: Step1Result | None
    dR_eps_norm: float
    dR_eta_norm: float
    step2_residual_eps: float
    step2_residual_eta: float
    dP: MatrixPolynomial | None
    ratio: float
    bound: float
    bound_label: str
    bound_informal: float
    bound_holds: bool
    eigen_checked: bool = False
    eigen_max_distance: float | None = None
    eigen_consistent: bool | None = None
    shift_consistent: bool | None = None
    forced: bool = False

    def to_json(self) -> dict:
        out = {
            "epsilon": self.eps,
            "eta": self.eta,
            "m": self.m,
            "n": self.n,
            "grade": self.grade,
            "degenerate": self.degenerate,
            "norm_P": self.norm_P,
            "norm_L": self.norm_L,
            "norm_M": self.norm_M,
            "norm_dL": self.norm_dL,
            "radius": self.radius,
            "admissible": self.admissible,
            "dR_eps_norm": self.dR_eps_norm,
            "dR_eta_norm": self.dR_eta_norm,
            "step2_residual_eps": self.step2_residual_eps,
            "step2_residual_eta": self.step2_residual_eta,
            "ratio": self.ratio,
            "bound": self.bound,
            "bound_label": self.bound_label,
            "bound_informal": self.bound_informal,
            "bound_holds": self.bound_holds,
            "eigen_checked": self.eigen_checked,
            "eigen_max_distance": self.eigen_max_distance,
            "eigen_consistent": self.eigen_consistent,
            "shift_consistent": self.shift_consistent,
            "forced": self.forced,
        }
        if self.step1 is not None:
            out["step1"] = {
                "iterations": self.step1.iterations,
                "cd_norm": self.step1.cd_norm,
                "residual": self.step1.residual,
                "iterate_norms": self.step1.iterate_norms,
                "kappa_sequence": self.step1.kappa_sequence,
                "gauge": (self.step1.gauge.to_json()
                          if self.step1.gauge is not None else None),
            }
        else:
            out["step1"] = None
        if self.dP is not None:
            out["dP"] = self.dP.to_json()
        return out

    CSV_FIELDS = ("epsilon", "eta", "m", "n", "grade", "degenerate", "norm_P",
                  "norm_M", "norm_L", "norm_dL", "ratio", "bound",
                  "bound_label", "bound_informal", "bound_holds",
                  "step1_residual", "step2_residual_eps", "step2_residual_eta",
                  "eigen_max_distance", "eigen_consistent", "shift_consistent")

    def csv_row(self) -> list:
        return [self.eps, self.eta, self.m, self.n, self.grade,
                self.degenerate, self.norm_P, self.norm_M, self.norm_L,
                self.norm_dL, self.ratio, self.bound, self.bound_label,
                self.bound_informal, self.bound_holds,
                self.step1.residual if self.step1 else "",
                self.step2_residual_eps, self.step2_residual_eta,
                self.eigen_max_distance if self.eigen_max_distance is not None else "",
                self.eigen_consistent if self.eigen_consistent is not None else "",
                self.shift_consistent if self.shift_consistent is not None else ""]


def run_pipeline(L: BlockKroneckerPencil, dL: Pencil, force: bool = False,
                 check_eigen: bool = True,
                 eigen_tol: float = 1e-6) -> BackwardErrorReport:
    """Run Steps 1-3 and evaluate the applicable bound.

    The pipeline refuses perturbations outside the guaranteed radius unless
    ``force`` is set, in which case the report is marked as unguaranteed.
    With ``check_eigen`` the complete eigenstructures of ``L + dL`` and of a
    fresh hook linearization of ``P + dP`` are compared (eigenvalues under
    the chordal metric, minimal indices through the shifts); disagreement is
    flagged in the report rather than fatal, since the problem is ill-posed.
    """
    from .eigenstructure import (match_eigenvalues, shift_recovery,
                                 staircase_eigenstructure)

    d = L.grade
    P = recover_polynomial(L)
    norm_P = P.frobenius_norm()
    norm_L = L.frobenius_norm()
    norm_M = L.one_one_norm()
    norm_dL = dL.frobenius_norm()
    degenerate = L.eps == 0 or L.eta == 0
    radius = pipeline_radius(L)
    admissible = norm_dL < radius
    if not admissible and not force:
        label = ("||dL|| < 1/(2 d^{3/2})" if degenerate
                 else "||dL|| < (sqrt(2)-1)^2 / (d^{5/2} (1 + ||M||))")
        raise PreconditionError(
            f"pipeline refused: ||dL|| = {norm_dL:.3e} is not below the "
            f"radius {radius:.3e}", inequality=label)

    step1 = solve_step1(L, dL, force=force)
    dR_eps, res_eps = solve_step2(step1.dLt21, L.eps, L.n, force=force)
    dR_eta, res_eta = solve_step2(
        step1.dLt12.transpose(), L.eta, L.m, force=force)
    blocks = PerturbationBlocks.from_pencil(dL, L)
    dP = assemble_step3(L, blocks.block_11(), dR_eps, dR_eta, force=force)
    ratio = dP.frobenius_norm() / norm_P

    if degenerate:
        bound = bound_degenerate(d, norm_L, norm_P, norm_M, norm_dL)
        label = "degenerate"
    else:
        bound = bound_nondegenerate(d, norm_L, norm_P, norm_M, norm_dL)
        label = "nondegenerate"

    report = BackwardErrorReport(
        eps=L.eps, eta=L.eta, m=L.m, n=L.n, grade=d, degenerate=degenerate,
        norm_P=norm_P, norm_L=norm_L, norm_M=norm_M, norm_dL=norm_dL,
        radius=radius, admissible=admissible, step1=step1,
        dR_eps_norm=dR_eps.frobenius_norm(), dR_eta_norm=dR_eta.frobenius_norm(),
        step2_residual_eps=res_eps, step2_residual_eta=res_eta, dP=dP,
        ratio=ratio, bound=bound, bound_label=label,
        bound_informal=bound_informal(d, L.m, L.n, norm_L, norm_dL),
        bound_holds=bool(ratio <= bound), forced=not admissible,
    )

    if check_eigen:
        perturbed = L.assemble() + dL
        fresh = from_polynomial((P + dP.with_grade(d)).with_grade(d),
                                L.eps, L.eta, "hook")
        es_pert = staircase_eigenstructure(perturbed)
        es_fresh = staircase_eigenstructure(fresh.assemble())
        report.eigen_checked = True
        try:
            dist = match_eigenvalues(es_pert.finite, es_fresh.finite)
            report.eigen_max_distance = dist
            report.eigen_consistent = bool(dist <= eigen_tol)
        except ShapeError:
            report.eigen_max_distance = None
            report.eigen_consistent = False
        try:
            rec_pert = shift_recovery(es_pert, L.eps, L.eta)
            rec_fresh = shift_recovery(es_fresh, L.eps, L.eta)
            report.shift_consistent = bool(
                rec_pert.right == rec_fresh.right
                and rec_pert.left == rec_fresh.left)
        except Exception:
            report.shift_consistent = False
    return report
