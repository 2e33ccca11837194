import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracles as oracle
from cubesense import spectral
from cubesense.errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DimensionTooLarge,
    EmptySelection,
    IndexOutOfRange,
    InvalidParams,
    ParseError,
)
from cubesense.spectral import SignedMatrix, Spectrum


def random_signed(rng, dim, density=0.5):
    upper = np.triu(rng.choice([-1, 0, 1], size=(dim, dim), p=[density / 2, 1 - density, density / 2]), 1)
    return upper + upper.T


@pytest.mark.parametrize("n", range(1, 9))
def test_build_an_matches_block_recursion(n):
    assert np.array_equal(spectral.build_an(n).to_dense(), oracle.build_an(n))


def test_build_an_small_cases():
    assert spectral.build_an(1).to_dense().tolist() == [[0, 1], [1, 0]]
    A1 = np.array([[0, 1], [1, 0]])
    I2 = np.eye(2, dtype=int)
    assert np.array_equal(spectral.build_an(2).to_dense(), np.block([[A1, I2], [I2, -A1]]))


@pytest.mark.parametrize("n", [3, 5])
def test_abs_an_is_cube_adjacency(n):
    assert np.array_equal(spectral.build_an(n).abs().to_dense(), oracle.cube_adjacency(n))


@pytest.mark.parametrize("n", [1, 4, 9])
def test_square_identity(n):
    cert = spectral.verify_square_identity(spectral.build_an(n), n)
    assert cert.holds and cert.trace == 0
    assert cert.plus_multiplicity == cert.minus_multiplicity == 1 << (n - 1)


def test_square_identity_detects_sign_flip():
    dense = spectral.build_an(3).to_dense()
    dense[0, 1] *= -1
    dense[1, 0] *= -1
    cert = spectral.verify_square_identity(SignedMatrix.from_dense(dense), 3)
    assert not cert.holds and cert.first_bad_entry is not None


def test_build_an_bounds():
    with pytest.raises(InvalidParams):
        spectral.build_an(0)
    with pytest.raises(DimensionTooLarge):
        spectral.build_an(spectral.MAX_AN_DIM + 1)


def test_signed_matrix_validation():
    with pytest.raises(InvalidParams):
        SignedMatrix.from_dense([[0, 1], [0, 0]])
    with pytest.raises(InvalidParams):
        SignedMatrix.from_dense([[0, 2], [2, 0]])
    with pytest.raises(DimensionMismatch):
        SignedMatrix.from_dense(np.zeros((2, 3)))


def test_principal_submatrix():
    A2 = spectral.build_an(2)
    assert spectral.principal_submatrix(A2, range(4)) == A2
    assert spectral.principal_submatrix(A2, [3]).to_dense().tolist() == [[0]]
    assert spectral.principal_submatrix(A2, [0, 1]) == spectral.build_an(1)
    with pytest.raises(EmptySelection):
        spectral.principal_submatrix(A2, [])
    with pytest.raises(IndexOutOfRange):
        spectral.principal_submatrix(A2, [4])


@pytest.mark.parametrize("n", range(1, 11))
def test_lambda_max_of_an(n):
    assert spectral.lambda_max(spectral.build_an(n), tol=1e-10) == pytest.approx(math.sqrt(n), abs=1e-8)


def test_lambda_max_zero():
    assert spectral.lambda_max(SignedMatrix.from_dense([[0]])) == 0


@pytest.mark.parametrize("n", [1, 3, 7])
def test_lambda_max_signed_star(n):
    rng = np.random.default_rng(n)
    dense = np.zeros((n + 1, n + 1), dtype=int)
    dense[0, 1:] = rng.choice([-1, 1], n)
    dense[1:, 0] = dense[0, 1:]
    lam = spectral.lambda_max(SignedMatrix.from_dense(dense))
    assert lam == pytest.approx(math.sqrt(n), abs=1e-8)
    assert lam == pytest.approx(spectral.full_spectrum(dense).values[0], abs=1e-8)


def test_power_iteration_stall_raises_without_fallback():
    # A_H for a 257-vertex subset of Q^9 has a tightly clustered top spectrum
    rng = np.random.default_rng(0)
    S = rng.choice(512, 257, replace=False)
    A = spectral.principal_submatrix(spectral.build_an(9), S)
    with pytest.raises(ConvergenceFailure):
        spectral.power_iteration(A, tol=1e-14, max_iter=200)


def test_full_spectrum_examples():
    assert spectral.full_spectrum(np.diag([3.0, 1.0, 2.0])).values.tolist() == [3.0, 2.0, 1.0]
    r2 = math.sqrt(2)
    assert np.allclose(spectral.full_spectrum(spectral.build_an(2)).values, [r2, r2, -r2, -r2], atol=1e-10)
    star = np.zeros((8, 8))
    star[0, 1:5] = star[1:5, 0] = 1
    assert spectral.full_spectrum(star).values[0] == pytest.approx(2.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_full_spectrum_matches_lapack(dim, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(dim, dim))
    M = M + M.T
    spec = spectral.full_spectrum(M)
    assert np.allclose(spec.values, np.linalg.eigvalsh(M)[::-1], atol=1e-8)
    assert abs(spec.values.sum() - np.trace(M)) <= dim * 1e-9


def test_full_spectrum_errors():
    with pytest.raises(InvalidParams):
        spectral.full_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionTooLarge):
        spectral.full_spectrum(np.zeros((spectral.MAX_DENSE_DIM + 1,) * 2))


def test_spectrum_json_roundtrip():
    spec = Spectrum(np.array([1.0, 3.0, -2.0]), 1e-9)
    back = Spectrum.from_json(spec.to_json())
    assert back.values.tolist() == [3.0, 1.0, -2.0] and back.tol == 1e-9
    with pytest.raises(ParseError):
        Spectrum.from_json("{")


def test_interlacing_examples():
    A4 = spectral.build_an(4)
    parent = spectral.full_spectrum(A4)
    child = spectral.full_spectrum(spectral.principal_submatrix(A4, range(9)))
    assert spectral.check_interlacing(parent, child)
    assert child.values[0] >= 2 - 1e-9
    with pytest.raises(DimensionMismatch):
        spectral.check_interlacing(parent, parent)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2**32 - 1))
def test_interlacing_property(dim, seed):
    rng = np.random.default_rng(seed)
    M = random_signed(rng, dim)
    S = np.sort(rng.choice(dim, rng.integers(1, dim), replace=False))
    parent, child = spectral.full_spectrum(M), spectral.full_spectrum(M[np.ix_(S, S)])
    assert spectral.check_interlacing(parent, child)


def test_interlacing_rejects_violation():
    assert not spectral.check_interlacing(Spectrum(np.array([1.0, 0.0]), 0), Spectrum(np.array([2.0]), 0))


def test_support_examples():
    n = 4
    A = spectral.build_an(n)
    Q = oracle.cube_adjacency(n)
    assert spectral.check_support(SignedMatrix.from_dense(np.zeros((16, 16), int)), Q)
    assert spectral.check_support(A, Q)
    Q[0, 1] = Q[1, 0] = 0
    assert not spectral.check_support(A, Q)


def test_degree_bound_examples():
    edge = np.array([[0, 1], [1, 0]])
    assert spectral.check_degree_bound(spectral.build_an(1), edge)
    neg = SignedMatrix.from_dense(-spectral.build_an(1).to_dense())
    assert spectral.check_degree_bound(neg, edge)
    S = list(range(9))
    A_H = spectral.principal_submatrix(spectral.build_an(4), S)
    assert spectral.check_degree_bound(A_H, oracle.cube_adjacency(4)[np.ix_(S, S)])
    assert spectral.lambda_max(A_H) >= 2 - 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_degree_bound_random_graph(seed):
    rng = np.random.default_rng(seed)
    M = random_signed(rng, 10)
    adj = np.abs(M)
    assert spectral.check_degree_bound(SignedMatrix.from_dense(M), adj)
    assert adj.sum(axis=1).max() >= spectral.full_spectrum(M).values[0] - 1e-9


def test_degree_bound_requires_support():
    with pytest.raises(InvalidParams):
        spectral.check_degree_bound(spectral.build_an(1), np.zeros((2, 2), int))


@pytest.mark.parametrize("n", [1, 3, 6])
def test_matrix_dump_roundtrip(n):
    A = spectral.build_an(n)
    text = spectral.dump_matrix(A)
    header = text.splitlines()[0].split()
    assert int(header[0]) == 1 << n and int(header[1]) == len(text.splitlines()) - 1
    assert spectral.load_matrix(text) == A


@pytest.mark.parametrize("text", [
    "", "2\n", "2 1\n0 1 1\n0 1 1\n", "2 1\n0 2 1\n", "2 1\n1 0 1\n", "2 1\n0 1 3\n", "2 2\n0 1 1\n",
    "x y\n",
])
def test_load_matrix_rejects(text):
    with pytest.raises(ParseError):
        spectral.load_matrix(text)


def test_lambda_max_clustered_top_spectrum():
    # the two largest eigenvalues differ by 6e-4; stopping when the Rayleigh
    # quotient levels off used to return the lower one
    from cubesense.cube import VertexSet

    H = VertexSet.from_hex("ade950ea", 5)
    A = spectral.principal_submatrix(spectral.build_an(5), H.indices())
    top = np.linalg.eigvalsh(A.to_dense().astype(float))[-1]
    assert spectral.lambda_max(A, tol=1e-6) == pytest.approx(top, abs=1e-6)
    assert top >= math.sqrt(5) - 1e-9
