import numpy as np
import pytest
from numpy.testing import assert_allclose

from bklab import (GradeError, MatrixPolynomial, Pencil, ShapeError, build_L,
                   build_Lambda, constant, convolution, identity, multiply,
                   pair_norm, verify_norm_inequalities, zeros)
from bklab.experiments import complex_gaussian


def random_poly(m, n, d, rng):
    return MatrixPolynomial([complex_gaussian((m, n), rng) for _ in range(d + 1)])


# ---------------------------------------------------------------- structure

def test_grade_and_shape_invariants():
    P = MatrixPolynomial([np.eye(2), np.zeros((2, 2))])
    assert P.grade == 1 and P.shape == (2, 2)
    padded = P.with_grade(6)
    assert padded.grade == 6
    assert padded.frobenius_norm() == P.frobenius_norm()


def test_explicit_grade_pads_and_rejects_truncation():
    P = MatrixPolynomial([np.eye(2)], grade=3)
    assert P.grade == 3 and np.all(P.coeff(3) == 0)
    with pytest.raises(GradeError):
        MatrixPolynomial([np.zeros((1, 1)), np.ones((1, 1))], grade=0)


def test_degree_of_zero_polynomial_is_none():
    assert zeros(2, 3, grade=4).degree() is None
    assert constant(np.eye(2)).degree() == 0


def test_coefficients_are_immutable():
    P = MatrixPolynomial([np.eye(2)])
    with pytest.raises(ValueError):
        P.coeff(0)[0, 0] = 5.0


def test_mismatched_coefficient_shapes_rejected():
    with pytest.raises(ShapeError):
        MatrixPolynomial([np.eye(2), np.eye(3)])


# --------------------------------------------------------------------- eval

def test_eval_identity_case():
    P = MatrixPolynomial([np.zeros((2, 2)), np.eye(2)])  # lambda * I_2
    assert_allclose(P.eval(3.0), 3.0 * np.eye(2))


def test_eval_L1_at_zero():
    assert_allclose(build_L(1).eval(0.0), np.array([[-1.0, 0.0]]))


def test_eval_matches_power_sum_oracle():
    rng = np.random.default_rng(11)
    P = random_poly(2, 2, 3, rng)
    lam = 0.7
    oracle = sum(P.coeff(k) * lam ** k for k in range(4))
    assert_allclose(P.eval(lam), oracle, rtol=1e-14)


# ----------------------------------------------------------------- reversal

def test_reversal_swaps_pencil_coefficients():
    M0, M1 = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
    rev = Pencil.from_parts(M0, M1).reversal(1)
    assert_allclose(rev.coeff(0), M1)
    assert_allclose(rev.coeff(1), M0)


def test_reversal_is_involution():
    rng = np.random.default_rng(12)
    P = random_poly(3, 2, 4, rng)
    assert P.reversal(6).reversal(6).allclose(P.with_grade(6))


def test_reversal_of_lambda_column():
    rev = build_Lambda(3).reversal(3)
    for power in range(4):
        expected = np.zeros((4, 1))
        expected[power, 0] = 1.0  # [1, lambda, lambda^2, lambda^3]^T
        assert_allclose(rev.coeff(power), expected)


def test_reversal_below_degree_rejected():
    P = MatrixPolynomial([np.eye(2), np.eye(2), np.eye(2)])
    with pytest.raises(GradeError):
        P.reversal(1)


# -------------------------------------------------------------------- norms

def test_frobenius_norm_examples():
    lam_eye = MatrixPolynomial([np.zeros((2, 2)), np.eye(2)])
    assert lam_eye.frobenius_norm() == pytest.approx(np.sqrt(2.0))
    assert zeros(3, 3, grade=2).frobenius_norm() == 0.0
    P = MatrixPolynomial([np.diag([3.0, 4.0]), np.zeros((2, 2))])
    assert P.frobenius_norm() == pytest.approx(5.0)


def test_norm_is_grade_padding_invariant():
    rng = np.random.default_rng(13)
    P = random_poly(2, 3, 2, rng)
    assert P.with_grade(P.grade + 5).frobenius_norm() == P.frobenius_norm()


def test_pair_norm():
    assert pair_norm(np.zeros((2, 2)), np.zeros((3, 1))) == 0.0
    assert pair_norm(np.eye(2), np.eye(3)) == pytest.approx(np.sqrt(5.0))
    rng = np.random.default_rng(14)
    C, D = complex_gaussian((2, 4), rng), complex_gaussian((3, 2), rng)
    flat = np.concatenate([C.ravel(), D.ravel()])
    assert pair_norm(C, D) == pytest.approx(np.linalg.norm(flat))


# ----------------------------------------------------------------- multiply

def test_L_times_Lambda_is_exactly_zero():
    for k in range(1, 6):
        prod = multiply(build_L(k), build_Lambda(k))
        assert np.all(prod.coeff_stack == 0)


def test_multiply_by_identity():
    rng = np.random.default_rng(15)
    P = random_poly(2, 3, 3, rng)
    assert multiply(P, identity(3)).allclose(P)


def test_multiply_dimension_mismatch():
    with pytest.raises(ShapeError):
        multiply(build_L(2), build_L(2))


def test_multiply_associative_and_bilinear():
    rng = np.random.default_rng(16)
    A = random_poly(2, 3, 2, rng)
    B = random_poly(3, 2, 1, rng)
    C = random_poly(2, 2, 2, rng)
    left = multiply(multiply(A, B), C)
    right = multiply(A, multiply(B, C))
    assert (left - right).frobenius_norm() <= 1e-12 * left.frobenius_norm()
    B2 = (0.5 + 0.25j) * random_poly(3, 2, 1, rng)
    lin = multiply(A, B + B2)
    split = multiply(A, B) + multiply(A, B2)
    assert (lin - split).frobenius_norm() <= 1e-12 * lin.frobenius_norm()


# ---------------------------------------------------------------- L, Lambda

def test_build_L_entries():
    L1 = build_L(1)
    assert_allclose(L1.M0, [[-1.0, 0.0]])
    assert_allclose(L1.M1, [[0.0, 1.0]])
    L2 = build_L(2)
    assert_allclose(L2.M0, [[-1, 0, 0], [0, -1, 0]])
    assert_allclose(L2.M1, [[0, 1, 0], [0, 0, 1]])


def test_build_Lambda_entries():
    lam = build_Lambda(2)
    assert lam.shape == (3, 1)
    assert_allclose(lam.coeff(2), [[1], [0], [0]])
    assert_allclose(lam.coeff(1), [[0], [1], [0]])
    assert_allclose(lam.coeff(0), [[0], [0], [1]])


def test_kronecker_lifts():
    L = build_L(2, blocks=3)
    assert L.shape == (6, 9)
    lam = build_Lambda(2, blocks=3)
    assert lam.shape == (9, 3)
    assert np.all(multiply(L, lam).coeff_stack == 0)


# -------------------------------------------------------------- convolution

def test_convolution_c0_is_coefficient_stack():
    rng = np.random.default_rng(17)
    Q = random_poly(2, 3, 2, rng)
    C0 = convolution(Q, 0)
    assert C0.shape == (6, 3)
    assert_allclose(C0.matrix[:2], Q.coeff(2))
    assert_allclose(C0.matrix[2:4], Q.coeff(1))
    assert_allclose(C0.matrix[4:], Q.coeff(0))


def test_convolution_of_L_has_bidiagonal_blocks():
    eps, n = 3, 2
    C = convolution(build_L(eps, n), eps - 1).matrix
    br, bc = eps * n, (eps + 1) * n  # block row/column sizes
    E = np.kron(np.hstack([np.eye(eps), np.zeros((eps, 1))]), np.eye(n))
    F = np.kron(np.hstack([np.zeros((eps, 1)), np.eye(eps)]), np.eye(n))
    for c in range(eps):
        assert_allclose(C[c * br:(c + 1) * br, c * bc:(c + 1) * bc], F)
        assert_allclose(C[(c + 1) * br:(c + 2) * br, c * bc:(c + 1) * bc], -E)


def test_convolution_fundamental_property():
    rng = np.random.default_rng(18)
    Q = random_poly(2, 3, 2, rng)
    Z = random_poly(3, 2, 3, rng)
    lhs = convolution(multiply(Q, Z), 0).matrix
    rhs = convolution(Q, 3).matrix @ convolution(Z, 0).matrix
    assert np.linalg.norm(lhs - rhs) <= 1e-13 * np.linalg.norm(lhs)


def test_convolution_norm_identity():
    rng = np.random.default_rng(19)
    Q = random_poly(3, 2, 4, rng)
    for j in range(5):
        got = np.linalg.norm(convolution(Q, j).matrix)
        want = np.sqrt(j + 1.0) * Q.frobenius_norm()
        assert got == pytest.approx(want, rel=1e-13)


# --------------------------------------------------- norm inequality bundle

def test_norm_inequalities_identity_pair():
    flags = verify_norm_inequalities(identity(3), identity(3))
    assert flags == (True, True, True, True, True)


def test_norm_inequalities_random_pairs():
    rng = np.random.default_rng(20)
    for _ in range(100):
        dims = rng.integers(1, 5, size=3)
        dP, dQ = rng.integers(0, 6, size=2)
        P = random_poly(dims[0], dims[1], dP, rng)
        Q = random_poly(dims[1], dims[2], dQ, rng)
        assert all(verify_norm_inequalities(P, Q))


def test_norm_inequality_lambda_bound():
    rng = np.random.default_rng(21)
    k, p = 3, 2
    P = random_poly(2, (k + 1) * p, 1, rng)
    lam = build_Lambda(k, p)
    flags = verify_norm_inequalities(P, lam)
    assert all(flags)
    # the specific (d) bound with the sqrt(2) constant for a grade-1 factor
    prod = multiply(P, lam)
    assert prod.frobenius_norm() <= np.sqrt(2.0) * P.frobenius_norm() * (1 + 1e-12)


# --------------------------------------------------------------------- json

def test_json_round_trip():
    rng = np.random.default_rng(22)
    P = random_poly(2, 3, 2, rng)
    again = MatrixPolynomial.from_json(P.to_json())
    assert again.allclose(P)
    assert P.to_json()["coeffs"][0][0][0] == [P.coeff(0)[0, 0].real,
                                              P.coeff(0)[0, 0].imag]
