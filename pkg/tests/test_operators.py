import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pairdfs.errors import ContractViolation, ShapeError
from pairdfs.operators import (
    I2,
    SX,
    SY,
    SZ,
    SystemLayout,
    commutator,
    embed,
    hermitian_basis,
    hermitian_eig,
    is_hermitian,
    kernel_basis,
    kron,
    partial_trace,
    propagator,
    random_hermitian,
    random_ket,
)


def rand_matrix(rng, r, c):
    return rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))


class TestKron:
    def test_pauli_diagonal(self):
        assert_allclose(kron(SZ, SZ), np.diag([1, -1, -1, 1]))

    def test_identity_factor(self):
        rng = np.random.default_rng(0)
        a = rand_matrix(rng, 3, 3)
        v = rng.normal(size=3)
        e0 = np.array([1.0, 0.0])
        assert_allclose(kron(I2, a) @ np.kron(e0, v), np.kron(e0, a @ v))

    def test_dims(self):
        assert kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)

    def test_mixed_product(self):
        rng = np.random.default_rng(1)
        a, b, c, d = (rand_matrix(rng, 3, 3) for _ in range(4))
        assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = rand_matrix(rng, 2, 3), rand_matrix(rng, 2, 2), rand_matrix(rng, 3, 1)
        assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) <= 1e-13


class TestCommutator:
    def test_pauli(self):
        assert_allclose(commutator(SX, SY), 2j * SZ)

    def test_self(self):
        a = rand_matrix(np.random.default_rng(2), 4, 4)
        assert np.all(commutator(a, a) == 0)

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            commutator(np.eye(2), np.eye(3))

    @given(st.integers(0, 10_000), st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_traceless(self, seed, d):
        rng = np.random.default_rng(seed)
        a, b = rand_matrix(rng, d, d), rand_matrix(rng, d, d)
        bound = 1e-12 * max(1.0, np.linalg.norm(a) * np.linalg.norm(b))
        assert abs(np.trace(commutator(a, b))) <= bound


class TestHermitianEig:
    def test_sigma_z(self):
        assert_allclose(hermitian_eig(SZ).eigenvalues, [-1, 1])

    def test_sigma_x_vectors(self):
        sd = hermitian_eig(SX)
        assert_allclose(sd.eigenvalues, [-1, 1])
        for col, sign in zip(sd.vectors.T, (-1, 1)):
            ref = np.array([1, sign]) / np.sqrt(2)
            assert abs(abs(np.vdot(ref, col)) - 1) < 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction(self, seed):
        a = random_hermitian(8, np.random.default_rng(seed))
        sd = hermitian_eig(a)
        v = sd.vectors
        assert np.linalg.norm(v @ np.diag(sd.eigenvalues) @ v.conj().T - a) <= \
            1e-12 * np.linalg.norm(a)
        assert np.linalg.norm(v.conj().T @ v - np.eye(8)) <= 1e-12
        assert np.all(np.diff(sd.eigenvalues) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractViolation):
            hermitian_eig(np.array([[0, 1], [0, 0]]))

    def test_degenerate_basis_is_canonical(self):
        x = kron(SZ, I2) + kron(I2, SZ)
        assert_allclose(hermitian_eig(x).vectors[:, 1:3], np.eye(4)[:, 1:3], atol=1e-12)

    def test_degenerate_basis_depends_only_on_subspace(self):
        rng = np.random.default_rng(3)
        q = np.linalg.qr(rand_matrix(rng, 5, 5))[0]
        # shared null space q[:, :2], different remaining spectrum
        rest = q[:, 2:]
        a1 = rest @ np.diag([1.0, 2.0, 3.0]) @ rest.conj().T
        a2 = rest @ np.diag([-1.0, 4.0, 5.0]) @ rest.conj().T
        a1, a2 = 0.5 * (a1 + a1.conj().T), 0.5 * (a2 + a2.conj().T)
        k1 = hermitian_eig(a1).vectors[:, :2]
        k2 = hermitian_eig(a2).vectors[:, 1:3]
        assert_allclose(k1, k2, atol=1e-10)


class TestPropagator:
    def test_sigma_x_pi(self):
        assert_allclose(propagator(SX, np.pi), -I2, atol=1e-12)

    def test_zero(self):
        assert_allclose(propagator(np.zeros((3, 3)), 2.7), np.eye(3))

    def test_sigma_z_half_pi(self):
        expected = np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])
        assert_allclose(propagator(SZ, np.pi / 2), expected, atol=1e-12)

    def test_matches_scipy_expm(self):
        # independent route through Pade approximation
        from scipy.linalg import expm
        h = random_hermitian(6, np.random.default_rng(4))
        assert_allclose(propagator(h, 0.7), expm(-0.7j * h), atol=1e-11)

    @given(st.integers(0, 10_000), st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=30, deadline=None)
    def test_group_and_unitary(self, seed, s, t):
        d = 5
        h = random_hermitian(d, np.random.default_rng(seed))
        us, ut = propagator(h, s), propagator(h, t)
        assert np.linalg.norm(us @ ut - propagator(h, s + t)) <= 1e-10 * np.sqrt(d)
        assert np.linalg.norm(us.conj().T @ us - np.eye(d)) <= 1e-11 * np.sqrt(d)


class TestPartialTrace:
    def test_bell(self):
        phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        rho = np.outer(phi, phi)
        assert_allclose(partial_trace(rho, (2, 2), [0]), I2 / 2, atol=1e-15)

    def test_product(self):
        rng = np.random.default_rng(5)
        v = random_ket(2, rng)
        rho_a = np.outer(v, v.conj())
        m = rand_matrix(rng, 3, 3)
        rho_b = m @ m.conj().T
        rho_b /= np.trace(rho_b)
        rho = np.kron(rho_a, rho_b)
        assert_allclose(partial_trace(rho, (2, 3), [0]), rho_a, atol=1e-14)
        assert_allclose(partial_trace(rho, (2, 3), [1]), rho_b, atol=1e-14)

    def test_keep_all(self):
        rho = random_hermitian(6, np.random.default_rng(6))
        assert_allclose(partial_trace(rho, (2, 3), [0, 1]), rho)

    def test_layout_argument(self):
        layout = SystemLayout((2, 2, 3), 2, ((0, 1),))
        psi = random_ket(12, np.random.default_rng(7))
        red = partial_trace(np.outer(psi, psi.conj()), layout, [0, 1])
        assert red.shape == (4, 4)
        assert abs(np.trace(red) - 1) <= 1e-12
        assert is_hermitian(red)

    def test_bad_indices(self):
        with pytest.raises(ShapeError):
            partial_trace(np.eye(4), (2, 2), [2])
        with pytest.raises(ShapeError):
            partial_trace(np.eye(4), (2, 3), [0])

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_composition(self, seed):
        rng = np.random.default_rng(seed)
        dims = (2, 3, 2)
        psi = random_ket(12, rng)
        rho = np.outer(psi, psi.conj())
        step = partial_trace(partial_trace(rho, dims, [0, 1]), (2, 3), [0])
        direct = partial_trace(rho, dims, [0])
        assert np.max(np.abs(step - direct)) <= 1e-12
        assert abs(np.trace(direct) - np.trace(rho)) <= 1e-12


class TestKernelBasis:
    def test_pair_operator_kernel(self):
        # oracle: X is diagonal with entries (2, 0, 0, -2); zeros at |01>, |10>
        x = kron(SZ, I2) + kron(I2, SZ)
        diag = np.diag(x).real
        expected_cols = [i for i, v in enumerate(diag) if v == 0]
        assert expected_cols == [1, 2]
        k = kernel_basis(x)
        assert_allclose(k, np.eye(4)[:, expected_cols], atol=1e-12)

    def test_no_kernel(self):
        assert kernel_basis(SZ).shape == (2, 0)

    def test_zero_matrix(self):
        assert kernel_basis(np.zeros((5, 5))).shape == (5, 5)

    @given(st.integers(0, 10_000), st.integers(1, 4))
    @settings(max_examples=30, deadline=None)
    def test_orthonormal_and_annihilated(self, seed, nullity):
        rng = np.random.default_rng(seed)
        d = 6
        q = np.linalg.qr(rand_matrix(rng, d, d))[0]
        w = np.concatenate([np.zeros(nullity), rng.uniform(0.5, 2, d - nullity)])
        a = (q * w) @ q.conj().T
        a = 0.5 * (a + a.conj().T)
        k = kernel_basis(a)
        assert k.shape[1] == nullity
        assert np.linalg.norm(k.conj().T @ k - np.eye(nullity)) <= 1e-12
        assert np.linalg.norm(a @ k) <= 1e-9 * np.linalg.norm(a) * np.sqrt(nullity)


def test_embed_matches_kron_on_adjacent_sites():
    rng = np.random.default_rng(8)
    a = random_hermitian(2, rng)
    assert_allclose(embed(a, [1], (2, 2, 3)), kron(I2, a, np.eye(3)))


def test_embed_permuted_sites():
    # CNOT-like operator with control on site 2, target on site 0
    op = kron(SZ, SX)
    full = embed(op, [2, 0], (2, 2, 2))
    assert_allclose(full, kron(SX, I2, SZ))


def test_hermitian_basis_orthonormal():
    b = hermitian_basis(3)
    gram = np.einsum("aij,bij->ab", b.conj(), b)
    assert_allclose(gram, np.eye(9), atol=1e-14)
    assert all(is_hermitian(m) for m in b)


def test_layout_validation():
    with pytest.raises(ValueError):
        SystemLayout((2, 2, 2), 3, ((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        SystemLayout((2, 2), 2, ((0, 2),))
    lay = SystemLayout.paired(2, (6,))
    assert lay.dim == 96 and lay.qubit_dim == 16 and lay.bath_dims == (6,)
