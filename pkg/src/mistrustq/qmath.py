"""Exact small-dimension complex linear algebra, entropy, and Born sampling.

All values are immutable after construction and all operations are pure, so
they are safe to call from concurrent code.  The only stateful object that
ever appears in a signature is a ``numpy.random.Generator``, which must not
be shared across concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatch,
    DomainError,
    IncompleteMeasurement,
    NoConvergence,
    TooLarge,
    ZeroVector,
)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIGEN_FLOOR = -1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
MAX_EIGEN_DIM = 4096


def _as_complex_vector(amplitudes) -> np.ndarray:
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    a = a.copy()
    a.setflags(write=False)
    return a


def _as_complex_matrix(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_complex_vector(self.amplitudes))
        if self.dim < 1:
            raise DimMismatch("state vector must have dimension >= 1")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state vector norm {norm} is not 1 within {NORM_TOL}")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class HermitianOperator:
    """Square complex matrix, Hermitian within 1e-12 entrywise."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_complex_matrix(self.entries))
        dev = np.abs(self.entries - self.entries.conj().T).max()
        if dev > HERMITIAN_TOL:
            raise DomainError(f"matrix deviates from Hermitian by {dev}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-1, positive-semidefinite operator."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_complex_matrix(self.entries))
        dev = np.abs(self.entries - self.entries.conj().T).max()
        if dev > HERMITIAN_TOL:
            raise DomainError(f"matrix deviates from Hermitian by {dev}")
        tr = np.trace(self.entries)
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise DomainError(f"trace {tr} is not 1 within {HERMITIAN_TOL}")
        # PSD validity check only; spectral analysis proper goes through
        # hermitian_eigen.
        lo = np.linalg.eigvalsh(self.entries).min()
        if lo < EIGEN_FLOOR:
            raise DomainError(f"negative eigenvalue {lo} below {EIGEN_FLOOR}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def as_operator(self) -> HermitianOperator:
        return HermitianOperator(self.entries)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: tuple[StateVector, ...] = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        """Rebuild sum(lambda_k |u_k><u_k|) as a plain matrix."""
        U = np.column_stack([v.amplitudes for v in self.eigenvectors])
        return (U * self.eigenvalues) @ U.conj().T


def ket(amplitudes) -> StateVector:
    """Normalize a nonzero complex vector into a StateVector."""
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = np.linalg.norm(a)
    if norm < 1e-300:
        raise ZeroVector("cannot normalize a (near-)zero vector")
    return StateVector(a / norm)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise DimMismatch(f"dims {a.dim} and {b.dim} differ")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; the first factor is the slow (row-major) index."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def projector(v: StateVector) -> HermitianOperator:
    """Rank-1 projector |v><v|."""
    return HermitianOperator(np.outer(v.amplitudes, v.amplitudes.conj()))


def haar_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state of the given dimension."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return ket(z)


def _jacobi(H: np.ndarray, tol: float, max_sweeps: int):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    The off-diagonal threshold is relative to the largest input magnitude:
    for matrices of norm far above 1 an absolute 1e-12 sits below the
    float64 rounding floor and the sweep would stall without converging.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.abs(A).max()))
    thresh = tol * scale
    for sweep in range(max_sweeps):
        off = np.abs(A - np.diag(np.diag(A))).max() if n > 1 else 0.0
        if off < thresh:
            return np.real(np.diag(A)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < thresh:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phi = np.angle(apq)
                th = 0.5 * np.arctan2(2.0 * abs(apq), app - aqq)
                c, s = np.cos(th), np.sin(th)
                ep = np.exp(0.5j * phi)
                em = ep.conjugate()
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * em * rp + s * ep * rq
                A[q, :] = -s * em * rp + c * ep * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * ep * cp + s * em * cq
                A[:, q] = -s * ep * cp + c * em * cq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * ep * vp + s * em * vq
                V[:, q] = -s * ep * vp + c * em * vq
    raise NoConvergence(f"off-diagonals above {thresh} after {max_sweeps} sweeps")


def hermitian_eigen(H: HermitianOperator) -> EigenDecomposition:
    """Full eigendecomposition by cyclic Jacobi rotations.

    Eigenvalues come back in descending order; eigenvectors are orthonormal
    and reconstruct the input within 1e-9 entrywise.
    """
    if H.dim > MAX_EIGEN_DIM:
        raise TooLarge(f"dim {H.dim} exceeds the guard {MAX_EIGEN_DIM}")
    w, V = _jacobi(H.entries, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(w)[::-1]
    w = w[order]
    V = V[:, order]
    vectors = tuple(ket(V[:, k]) for k in range(H.dim))
    return EigenDecomposition(eigenvalues=w, eigenvectors=vectors)


def binary_entropy(p: float) -> float:
    """H2(p) = -p log2 p - (1-p) log2 (1-p), in bits."""
    if p < 0.0 or p > 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    out = 0.0
    for x in (p, 1.0 - p):
        if x > 0.0:
            out -= x * np.log2(x)
    return out


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -sum lambda log2 lambda, in bits, with 0 log 0 := 0."""
    w = hermitian_eigen(rho.as_operator()).eigenvalues
    w = np.clip(w, 0.0, 1.0)
    nz = w[w > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def born_sample(
    state: StateVector,
    projectors: list[HermitianOperator],
    rng: np.random.Generator,
) -> int:
    """Sample an outcome of a complete projective measurement.

    Returns index k with probability <state|P_k|state>.  Deterministic given
    the rng state and draw order (one uniform draw per call).
    """
    total = sum(P.entries for P in projectors)
    if np.abs(total - np.eye(state.dim)).max() > 1e-9:
        raise IncompleteMeasurement("projectors do not resolve the identity")
    psi = state.amplitudes
    probs = np.array([np.real(np.vdot(psi, P.entries @ psi)) for P in projectors])
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    u = rng.random()
    return int(np.searchsorted(np.cumsum(probs), u, side="right").clip(0, len(probs) - 1))
