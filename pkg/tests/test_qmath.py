import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mistrustq import qmath
from mistrustq.errors import (
    DimMismatch,
    DomainError,
    IncompleteMeasurement,
    ZeroVector,
)
from mistrustq.qmath import (
    DensityMatrix,
    HermitianOperator,
    StateVector,
    binary_entropy,
    born_sample,
    haar_state,
    hermitian_eigen,
    inner,
    ket,
    projector,
    tensor,
    von_neumann_entropy,
)


def psi(bit, theta):
    if bit == 0:
        return ket([1, 0])
    return ket([math.sin(theta), math.cos(theta)])


class TestKet:
    def test_already_normalized(self):
        v = ket([1, 0])
        np.testing.assert_allclose(v.amplitudes, [1, 0])

    def test_normalizes(self):
        v = ket([1, 1])
        np.testing.assert_allclose(v.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            ket([0, 0])

    def test_statevector_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            StateVector([1, 1])


class TestInner:
    def test_self_overlap(self):
        assert inner(ket([1, 0]), ket([1, 0])) == pytest.approx(1)

    def test_orthogonal(self):
        assert inner(ket([1, 0]), ket([0, 1])) == pytest.approx(0)

    def test_encoding_overlap(self):
        theta = 0.3
        assert inner(psi(0, theta), psi(1, theta)) == pytest.approx(math.sin(theta))

    def test_conjugate_linear_first_argument(self):
        a = ket([1, 1j])
        b = ket([1, 1])
        assert inner(a, b) == pytest.approx(np.conj(inner(b, a)))

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            inner(ket([1, 0]), ket([1, 0, 0]))


class TestTensor:
    def test_basis_bookkeeping(self):
        np.testing.assert_allclose(
            tensor(ket([1, 0]), ket([0, 1])).amplitudes, [0, 1, 0, 0]
        )
        np.testing.assert_allclose(
            tensor(ket([0, 1]), ket([1, 0])).amplitudes, [0, 0, 1, 0]
        )

    def test_unit_norm(self):
        rng = np.random.default_rng(3)
        a, b = haar_state(3, rng), haar_state(4, rng)
        t = tensor(a, b)
        assert t.dim == 12
        assert np.linalg.norm(t.amplitudes) == pytest.approx(1, abs=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_associativity(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (haar_state(rng.integers(2, 5), rng) for _ in range(3))
        lhs = tensor(tensor(a, b), c).amplitudes
        rhs = tensor(a, tensor(b, c)).amplitudes
        assert np.abs(lhs - rhs).max() < 1e-12


class TestProjector:
    def test_basis_projector(self):
        np.testing.assert_allclose(projector(ket([1, 0])).entries, np.diag([1, 0]))

    def test_idempotent_unit_trace(self):
        v = haar_state(5, np.random.default_rng(0))
        P = projector(v).entries
        assert np.abs(P @ P - P).max() < 1e-12
        assert np.trace(P) == pytest.approx(1, abs=1e-12)


class TestHermitianEigen:
    def test_diagonal(self):
        eig = hermitian_eigen(HermitianOperator(np.diag([3.0, 1.0])))
        np.testing.assert_allclose(eig.eigenvalues, [3, 1])

    def test_projector_spectrum(self):
        v = haar_state(4, np.random.default_rng(1))
        eig = hermitian_eigen(projector(v))
        np.testing.assert_allclose(eig.eigenvalues, [1, 0, 0, 0], atol=1e-12)

    def test_two_projector_sum_analytic(self):
        # Sum of two rank-1 projectors with overlap s has eigenvalues 1 +/- s.
        theta = 0.3
        Q = HermitianOperator(
            projector(psi(0, theta)).entries + projector(psi(1, theta)).entries
        )
        eig = hermitian_eigen(Q)
        s = math.sin(theta)
        np.testing.assert_allclose(eig.eigenvalues, [1 + s, 1 - s], atol=1e-9)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_reconstruction_and_orthonormality(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 65))
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = HermitianOperator((M + M.conj().T) / 2)
        eig = hermitian_eigen(H)
        assert np.abs(eig.reconstruct() - H.entries).max() < 1e-9
        U = np.column_stack([v.amplitudes for v in eig.eigenvectors])
        assert np.abs(U.conj().T @ U - np.eye(n)).max() < 1e-9
        assert (np.diff(eig.eigenvalues) <= 1e-12).all()


class TestEntropy:
    def test_binary_entropy_half(self):
        assert binary_entropy(0.5) == pytest.approx(1)

    def test_binary_entropy_endpoints(self):
        assert binary_entropy(0) == 0
        assert binary_entropy(1) == 0

    def test_binary_entropy_symmetric(self):
        assert binary_entropy(0.3) == pytest.approx(binary_entropy(0.7))

    def test_binary_entropy_domain(self):
        with pytest.raises(DomainError):
            binary_entropy(1.5)

    def test_binary_entropy_matches_eigendecomposition(self):
        # oracle: direct spectral entropy of the corresponding diagonal state
        rho = DensityMatrix(np.diag([0.55, 0.45]))
        assert binary_entropy(0.55) == pytest.approx(
            von_neumann_entropy(rho), abs=1e-12
        )

    def test_pure_state_zero(self):
        v = haar_state(3, np.random.default_rng(5))
        assert von_neumann_entropy(DensityMatrix(projector(v).entries)) == pytest.approx(
            0, abs=1e-9
        )

    def test_maximally_mixed(self):
        assert von_neumann_entropy(DensityMatrix(np.eye(2) / 2)) == pytest.approx(1)

    def test_two_state_mixture_analytic(self):
        # eigenvalues of the equal two-state mixture are (1 +/- sin theta)/2
        theta = 0.3
        rho = DensityMatrix(
            0.5 * (projector(psi(0, theta)).entries + projector(psi(1, theta)).entries)
        )
        expected = binary_entropy((1 + math.sin(theta)) / 2)
        assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-9)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_entropy_bounds(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 9))
        # random valid density matrix from a Haar mixture
        rho = np.zeros((d, d), dtype=complex)
        weights = rng.dirichlet(np.ones(d))
        for w in weights:
            rho += w * projector(haar_state(d, rng)).entries
        S = von_neumann_entropy(DensityMatrix(rho))
        assert -1e-9 <= S <= math.log2(d) + 1e-9


class TestBornSample:
    def basis_projectors(self, dim=2):
        return [projector(ket(np.eye(dim)[k])) for k in range(dim)]

    def test_deterministic_outcome(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            assert born_sample(ket([1, 0]), self.basis_projectors(), rng) == 0

    def test_uniform_superposition_frequency(self):
        rng = np.random.default_rng(1)
        draws = 100_000
        ones = sum(
            born_sample(ket([1, 1]), self.basis_projectors(), rng) for _ in range(draws)
        )
        sigma = math.sqrt(0.25 / draws)
        assert abs(ones / draws - 0.5) < 3 * sigma

    def test_born_rule_encoding_state(self):
        theta = 0.3
        P0 = projector(psi(0, theta))
        rest = HermitianOperator(np.eye(2) - P0.entries)
        rng = np.random.default_rng(2)
        draws = 20_000
        hits = sum(
            born_sample(psi(1, theta), [P0, rest], rng) == 0 for _ in range(draws)
        )
        p = math.sin(theta) ** 2
        sigma = math.sqrt(p * (1 - p) / draws)
        assert abs(hits / draws - p) < 3 * sigma

    def test_incomplete_measurement(self):
        P0 = projector(ket([1, 0]))
        with pytest.raises(IncompleteMeasurement):
            born_sample(ket([1, 0]), [P0], np.random.default_rng(0))

    def test_seed_determinism(self):
        projs = self.basis_projectors()
        a = [born_sample(ket([1, 1j]), projs, np.random.default_rng(9)) for _ in range(50)]
        b = [born_sample(ket([1, 1j]), projs, np.random.default_rng(9)) for _ in range(50)]
        assert a == b


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises((DomainError, DimMismatch)):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.diag([1.5, -0.5]))
