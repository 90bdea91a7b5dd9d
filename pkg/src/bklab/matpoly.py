"""Dense matrix polynomials over the complex numbers.

A matrix polynomial is stored as its coefficient stack ``P_0, ..., P_d`` in
ascending powers together with an explicit grade ``d >= degree``.  Everything
here is a pure function of immutable values: coefficient arrays are copied on
construction and marked read-only.

Real input is embedded into the complex field so a single code path serves
both; the Frobenius norm of a polynomial does not depend on the declared
grade, only on the nonzero coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GradeError, ShapeError


class MatrixPolynomial:
    """``sum_k P_k lambda^k`` with dense complex ``m x n`` coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs, grade=None):
        arrs = [np.asarray(c, dtype=complex) for c in coeffs]
        if not arrs:
            raise ShapeError("a matrix polynomial needs at least one coefficient")
        shape = arrs[0].shape
        if len(shape) != 2:
            raise ShapeError(f"coefficients must be 2-d, got shape {shape}")
        for a in arrs:
            if a.shape != shape:
                raise ShapeError(f"coefficient shapes differ: {a.shape} vs {shape}")
        if grade is not None:
            grade = int(grade)
            if grade < 0:
                raise GradeError("grade must be nonnegative")
            if grade + 1 < len(arrs):
                for extra in arrs[grade + 1:]:
                    if np.any(extra != 0):
                        raise GradeError(
                            f"grade {grade} is smaller than the degree of the data"
                        )
                arrs = arrs[:grade + 1]
            while len(arrs) < grade + 1:
                arrs.append(np.zeros(shape, dtype=complex))
        stack = np.stack(arrs, axis=0)
        stack.setflags(write=False)
        self._c = stack

    # -- basic structure -------------------------------------------------

    @property
    def rows(self) -> int:
        return self._c.shape[1]

    @property
    def cols(self) -> int:
        return self._c.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def grade(self) -> int:
        return self._c.shape[0] - 1

    @property
    def coeff_stack(self) -> np.ndarray:
        """Read-only ``(grade+1, m, n)`` array of coefficients."""
        return self._c

    def coeff(self, k: int) -> np.ndarray:
        """Coefficient of ``lambda^k`` (zero beyond the declared grade)."""
        if 0 <= k <= self.grade:
            return self._c[k]
        z = np.zeros((self.rows, self.cols), dtype=complex)
        z.setflags(write=False)
        return z

    def degree(self, tol: float = 0.0):
        """Largest ``k`` with ``P_k != 0``, or ``None`` for the zero polynomial.

        ``tol`` treats coefficients with Frobenius norm at most ``tol`` as
        zero, which is needed for polynomials assembled in floating point.
        """
        for k in range(self.grade, -1, -1):
            if np.linalg.norm(self._c[k]) > tol:
                return k
        return None

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.degree(tol) is None

    def with_grade(self, d: int) -> "MatrixPolynomial":
        """Same polynomial re-declared at grade ``d`` (pads with zeros)."""
        deg = self.degree()
        if deg is not None and d < deg:
            raise GradeError(f"grade {d} is below the degree {deg}")
        return MatrixPolynomial(list(self._c[:min(d, self.grade) + 1]), grade=d)

    # -- evaluation and reversal -----------------------------------------

    def eval(self, lam0: complex) -> np.ndarray:
        """Horner evaluation at the scalar ``lam0``."""
        out = np.array(self._c[-1], dtype=complex)
        for k in range(self.grade - 1, -1, -1):
            out = out * lam0 + self._c[k]
        return out

    def reversal(self, d: int | None = None) -> "MatrixPolynomial":
        """``lambda^d * P(1/lambda)`` as a grade-``d`` polynomial."""
        if d is None:
            d = self.grade
        deg = self.degree()
        if deg is not None and d < deg:
            raise GradeError(f"reversal grade {d} is below the degree {deg}")
        padded = self.with_grade(d)
        return MatrixPolynomial(list(padded._c[::-1]), grade=d)

    # -- norms -----------------------------------------------------------

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self._c))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        d = max(self.grade, other.grade)
        return MatrixPolynomial(
            [self.coeff(k) + other.coeff(k) for k in range(d + 1)], grade=d
        )

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "MatrixPolynomial":
        return MatrixPolynomial([scalar * c for c in self._c], grade=self.grade)

    def __mul__(self, scalar) -> "MatrixPolynomial":
        return self.__rmul__(scalar)

    def __matmul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        return multiply(self, other)

    def transpose(self) -> "MatrixPolynomial":
        return MatrixPolynomial([c.T for c in self._c], grade=self.grade)

    @property
    def T(self) -> "MatrixPolynomial":
        return self.transpose()

    def conj(self) -> "MatrixPolynomial":
        return MatrixPolynomial([c.conj() for c in self._c], grade=self.grade)

    def submatrix(self, rows, cols) -> "MatrixPolynomial":
        return MatrixPolynomial([c[np.ix_(rows, cols)] for c in self._c], grade=self.grade)

    def allclose(self, other: "MatrixPolynomial", atol: float = 0.0) -> bool:
        if self.shape != other.shape:
            return False
        d = max(self.grade, other.grade)
        return all(
            np.linalg.norm(self.coeff(k) - other.coeff(k)) <= atol for k in range(d + 1)
        )

    def __repr__(self) -> str:
        return f"MatrixPolynomial({self.rows}x{self.cols}, grade={self.grade})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "m": self.rows,
            "n": self.cols,
            "grade": self.grade,
            "coeffs": [_matrix_to_json(c) for c in self._c],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixPolynomial":
        m, n, grade = int(obj["m"]), int(obj["n"]), int(obj["grade"])
        coeffs = [_matrix_from_json(c, m, n) for c in obj["coeffs"]]
        if len(coeffs) != grade + 1:
            raise GradeError(
                f"expected {grade + 1} coefficients, found {len(coeffs)}"
            )
        return cls(coeffs, grade=grade)


class Pencil(MatrixPolynomial):
    """Matrix polynomial of grade exactly 1, exposed as the pair ``(M0, M1)``
    meaning ``M0 + lambda*M1``."""

    def __init__(self, coeffs, grade=None):
        super().__init__(coeffs, grade=1 if grade is None else grade)
        if self.grade != 1:
            raise GradeError("a pencil has grade exactly 1")

    @classmethod
    def from_parts(cls, M0, M1) -> "Pencil":
        return cls([M0, M1])

    @property
    def M0(self) -> np.ndarray:
        return self._c[0]

    @property
    def M1(self) -> np.ndarray:
        return self._c[1]


def as_pencil(P: MatrixPolynomial) -> Pencil:
    """View a grade-1 polynomial (or a constant) as a pencil."""
    if P.grade > 1 and P.degree() not in (None, 0, 1):
        raise GradeError(f"grade-{P.grade} polynomial with degree > 1 is not a pencil")
    return Pencil([P.coeff(0), P.coeff(1)])


# -- json helpers ---------------------------------------------------------

def _matrix_to_json(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in A]


def _matrix_from_json(rows, m, n) -> np.ndarray:
    A = np.array([[complex(v[0], v[1]) for v in row] for row in rows] if m and n else [],
                 dtype=complex)
    A = A.reshape(m, n)
    return A


# -- constructors ----------------------------------------------------------

def zeros(m: int, n: int, grade: int = 0) -> MatrixPolynomial:
    return MatrixPolynomial([np.zeros((m, n), dtype=complex)], grade=grade)


def constant(A) -> MatrixPolynomial:
    return MatrixPolynomial([np.asarray(A, dtype=complex)], grade=0)


def identity(n: int) -> MatrixPolynomial:
    return constant(np.eye(n))


def build_L(k: int, blocks: int = 1) -> Pencil:
    """The ``k x (k+1)`` pencil with ``-1`` on the diagonal and ``lambda`` on
    the superdiagonal; ``blocks > 1`` returns its Kronecker lift by ``I_p``."""
    if k < 0:
        raise GradeError("k must be nonnegative")
    A = np.zeros((k, k + 1), dtype=complex)
    B = np.zeros((k, k + 1), dtype=complex)
    for i in range(k):
        A[i, i] = -1.0
        B[i, i + 1] = 1.0
    Ip = np.eye(blocks)
    return Pencil.from_parts(np.kron(A, Ip), np.kron(B, Ip))


def build_Lambda(k: int, blocks: int = 1) -> MatrixPolynomial:
    """The ``(k+1) x 1`` column ``[lambda^k, ..., lambda, 1]^T`` (optionally
    Kronecker-lifted by ``I_p``)."""
    if k < 0:
        raise GradeError("k must be nonnegative")
    coeffs = []
    for power in range(k + 1):
        c = np.zeros((k + 1, 1), dtype=complex)
        c[k - power, 0] = 1.0
        coeffs.append(np.kron(c, np.eye(blocks)))
    return MatrixPolynomial(coeffs, grade=k)


# -- operations -------------------------------------------------------------

def evaluate(P: MatrixPolynomial, lam0: complex) -> np.ndarray:
    return P.eval(lam0)


def reversal(P: MatrixPolynomial, d: int | None = None) -> MatrixPolynomial:
    return P.reversal(d)


def frobenius_norm(P: MatrixPolynomial) -> float:
    return P.frobenius_norm()


def pair_norm(C, D) -> float:
    """``sqrt(||C||_F^2 + ||D||_F^2)`` for matrices of possibly different sizes."""
    return float(np.hypot(np.linalg.norm(C), np.linalg.norm(D)))


def multiply(P: MatrixPolynomial, Q: MatrixPolynomial) -> MatrixPolynomial:
    """Polynomial product with grade ``P.grade + Q.grade``."""
    if P.cols != Q.rows:
        raise ShapeError(f"cannot multiply {P.shape} by {Q.shape}")
    d = P.grade + Q.grade
    out = [np.zeros((P.rows, Q.cols), dtype=complex) for _ in range(d + 1)]
    for i in range(P.grade + 1):
        Pi = P.coeff(i)
        for j in range(Q.grade + 1):
            out[i + j] += Pi @ Q.coeff(j)
    return MatrixPolynomial(out, grade=d)


def hstack(polys) -> MatrixPolynomial:
    polys = list(polys)
    d = max(p.grade for p in polys)
    return MatrixPolynomial(
        [np.hstack([p.coeff(k) for p in polys]) for k in range(d + 1)], grade=d
    )


def vstack(polys) -> MatrixPolynomial:
    polys = list(polys)
    d = max(p.grade for p in polys)
    return MatrixPolynomial(
        [np.vstack([p.coeff(k) for p in polys]) for k in range(d + 1)], grade=d
    )


def direct_sum(P: MatrixPolynomial, Q: MatrixPolynomial) -> MatrixPolynomial:
    d = max(P.grade, Q.grade)
    out = []
    for k in range(d + 1):
        c = np.zeros((P.rows + Q.rows, P.cols + Q.cols), dtype=complex)
        c[:P.rows, :P.cols] = P.coeff(k)
        c[P.rows:, P.cols:] = Q.coeff(k)
        out.append(c)
    return MatrixPolynomial(out, grade=d)


def kron_constant(P: MatrixPolynomial, A) -> MatrixPolynomial:
    """Coefficient-wise Kronecker product ``P(lambda) (x) A``."""
    A = np.asarray(A, dtype=complex)
    return MatrixPolynomial([np.kron(c, A) for c in P.coeff_stack], grade=P.grade)


@dataclass
class ConvolutionMatrix:
    """Block-Toeplitz stacking of a grade-``q`` polynomial's coefficients.

    Block ``(r, c)`` equals ``Q_{q-(r-c)}`` when ``0 <= r-c <= q`` and the
    zero block otherwise; there are ``j+1`` block columns and ``q+j+1`` block
    rows of block size ``m x n``.
    """

    source_grade: int
    block_columns: int
    block_rows: int
    block_shape: tuple[int, int]
    matrix: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def convolution(Q: MatrixPolynomial, j: int) -> ConvolutionMatrix:
    """``C_j(Q)``: the constant matrix representing multiplication of ``Q``
    by a grade-``j`` polynomial, read off the declared grade of ``Q``."""
    if j < 0:
        raise GradeError("j must be nonnegative")
    q = Q.grade
    m, n = Q.shape
    C = np.zeros(((q + j + 1) * m, (j + 1) * n), dtype=complex)
    for c in range(j + 1):
        for r in range(c, c + q + 1):
            C[r * m:(r + 1) * m, c * n:(c + 1) * n] = Q.coeff(q - (r - c))
    return ConvolutionMatrix(q, j + 1, q + j + 1, (m, n), C)


def stack_coefficients(Q: MatrixPolynomial) -> np.ndarray:
    """``C_0(Q)``: coefficients stacked top-down from the highest power."""
    return convolution(Q, 0).matrix


def unstack_coefficients(X, grade: int, rows: int) -> MatrixPolynomial:
    """Inverse of :func:`stack_coefficients` for a known grade and row count."""
    X = np.asarray(X, dtype=complex)
    if X.shape[0] != (grade + 1) * rows:
        raise ShapeError("stacked height does not match grade and row count")
    coeffs = [X[(grade - k) * rows:(grade - k + 1) * rows, :] for k in range(grade + 1)]
    return MatrixPolynomial(coeffs, grade=grade)


def _as_lambda_kron(Q: MatrixPolynomial):
    """Return ``(k, p)`` when ``Q == Lambda_k (x) I_p`` exactly, else ``None``."""
    p = Q.cols
    if p == 0 or Q.rows % p != 0:
        return None
    k = Q.rows // p - 1
    if k < 0 or Q.degree() != k:
        return None
    if Q.allclose(build_Lambda(k, p).with_grade(Q.grade)):
        return (k, p)
    return None


def verify_norm_inequalities(P: MatrixPolynomial, Q: MatrixPolynomial,
                             slack: float = 1e-12):
    """Check the five product-norm bounds on the pair ``(P, Q)``.

    Flags (a)-(c) compare ``||P Q||_F`` against the spectral-column and
    Frobenius mixed bounds with the ``sqrt(grade+1)`` factors.  Flag (d)
    applies only when ``Q`` is exactly a ``Lambda_k (x) I_p`` column and flag
    (e) only when ``P`` is such a row; both are vacuously true otherwise.
    ``slack`` absorbs roundoff in the computed norms.
    """
    if P.cols != Q.rows:
        raise ShapeError(f"product undefined for {P.shape} and {Q.shape}")
    prod = multiply(P, Q)
    lhs = prod.frobenius_norm()
    nP, nQ = P.frobenius_norm(), Q.frobenius_norm()
    sd = np.sqrt(P.grade + 1.0)
    st = np.sqrt(Q.grade + 1.0)
    spec_P = np.sqrt(sum(np.linalg.norm(c, 2) ** 2 for c in P.coeff_stack))
    spec_Q = np.sqrt(sum(np.linalg.norm(c, 2) ** 2 for c in Q.coeff_stack))

    def ok(rhs):
        return bool(lhs <= rhs * (1.0 + slack) + slack)

    a = ok(sd * spec_P * nQ)
    b = ok(st * nP * spec_Q)
    c = ok(min(sd, st) * nP * nQ)

    lam_q = _as_lambda_kron(Q)
    if lam_q is None:
        d = True
    else:
        k, _ = lam_q
        d = ok(min(sd, np.sqrt(k + 1.0)) * nP)
    lam_p = _as_lambda_kron(P.transpose())
    if lam_p is None:
        e = True
    else:
        k, _ = lam_p
        e = ok(min(st, np.sqrt(k + 1.0)) * nQ)
    return (a, b, c, d, e)


def determinant(P: MatrixPolynomial) -> np.ndarray:
    """Coefficients (ascending) of ``det P(lambda)`` by cofactor expansion.

    Exponential in the matrix size; intended for the small desk-scale
    oracles, not production sizes.
    """
    if P.rows != P.cols:
        raise ShapeError("determinant needs a square polynomial")
    n = P.rows
    if n == 0:
        return np.array([1.0 + 0.0j])
    if n == 1:
        return np.array([P.coeff(k)[0, 0] for k in range(P.grade + 1)])
    total = np.zeros(n * P.grade + 1, dtype=complex)
    rest_cols = list(range(1, n))
    for i in range(n):
        entry = np.array([P.coeff(k)[i, 0] for k in range(P.grade + 1)])
        if not np.any(entry):
            continue
        minor = P.submatrix([r for r in range(n) if r != i], rest_cols)
        sub = determinant(minor)
        term = np.convolve(entry, sub)
        total[:term.size] += ((-1) ** i) * term
    return total
