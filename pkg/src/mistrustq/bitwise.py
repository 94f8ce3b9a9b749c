"""Bit-wise string commitment: per-qubit encoding, unveiling, cheat analysis.

The committed string is encoded one qubit per bit using the non-orthogonal
pair psi_0 = |0> and psi_1 = sin(theta)|0> + cos(theta)|1>.  The committer's
cheating is capped by the top eigenvalue of P0 + P1 and the receiver's
pre-unveiling information by the entropy of the equal mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LengthMismatch, TooLarge, Unbounded
from . import qmath
from .qmath import HermitianOperator, DensityMatrix, StateVector

MAX_EXACT_N = 10


@dataclass(frozen=True)
class SecurityParams:
    """Scalar protocol parameters.

    theta sets the encoding overlap sin(theta); n is the string length; m is
    the receiver's tolerated information, so r = n - m bits must stay
    inaccessible.
    """

    theta: float
    n: int
    m: int

    def __post_init__(self):
        if not (0.0 < self.theta <= math.pi / 2):
            raise DomainError(f"theta {self.theta} outside (0, pi/2]")
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if not (0 <= self.m < self.n):
            raise DomainError("m must satisfy 0 <= m < n")

    @property
    def delta(self) -> float:
        return math.sin(self.theta) ** 2

    @property
    def r(self) -> int:
        return self.n - self.m


@dataclass(frozen=True)
class BitwiseCommitment:
    qubits: tuple[StateVector, ...]

    @property
    def n(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class UnveilVerdict:
    accepted: bool
    failing_index: int | None = None

    def __post_init__(self):
        if self.accepted != (self.failing_index is None):
            raise DomainError("failing_index must be present iff rejected")


def _check_theta(theta: float) -> None:
    if not (0.0 < theta <= math.pi / 2):
        raise DomainError(f"theta {theta} outside (0, pi/2]")


def encode_bit(bit: int, theta: float) -> StateVector:
    """psi_0 = |0>; psi_1 = sin(theta)|0> + cos(theta)|1>."""
    _check_theta(theta)
    if bit not in (0, 1):
        raise DomainError(f"bit must be 0 or 1, got {bit}")
    if bit == 0:
        return StateVector([1.0, 0.0])
    return StateVector([math.sin(theta), math.cos(theta)])


def commit(bits: str, params: SecurityParams) -> BitwiseCommitment:
    """Encode each bit of the string as one qubit."""
    if len(bits) != params.n:
        raise LengthMismatch(f"got {len(bits)} bits, params.n is {params.n}")
    return BitwiseCommitment(tuple(encode_bit(int(b), params.theta) for b in bits))


def verify_unveil(
    held: BitwiseCommitment,
    claimed: str,
    theta: float,
    rng: np.random.Generator,
) -> UnveilVerdict:
    """Measure each held qubit against the claimed encoding, in order.

    Accepts iff every qubit yields the eigenvalue-1 outcome; otherwise
    reports the first failing position.
    """
    _check_theta(theta)
    if len(claimed) != held.n:
        raise LengthMismatch(f"claimed {len(claimed)} bits for {held.n} qubits")
    eye = np.eye(2)
    for i, qubit in enumerate(held.qubits):
        P = qmath.projector(encode_bit(int(claimed[i]), theta))
        complement = HermitianOperator(eye - P.entries)
        if qmath.born_sample(qubit, [P, complement], rng) != 0:
            return UnveilVerdict(accepted=False, failing_index=i)
    return UnveilVerdict(accepted=True)


def cheat_bound(theta: float) -> float:
    """Closed-form maximum of p0 + p1 over all cheat states: 1 + sin(theta)."""
    _check_theta(theta)
    return 1.0 + math.sin(theta)


def optimal_bit_cheat(theta: float) -> tuple[StateVector, float, float]:
    """Best single state for keeping both bit revelations alive.

    The optimum is the top eigenvector of P0 + P1; the attained acceptance
    probabilities satisfy p0 + p1 = 1 + sin(theta).
    """
    _check_theta(theta)
    psi0 = encode_bit(0, theta)
    psi1 = encode_bit(1, theta)
    Q = HermitianOperator(qmath.projector(psi0).entries + qmath.projector(psi1).entries)
    cheat = qmath.hermitian_eigen(Q).eigenvectors[0]
    p0 = abs(qmath.inner(psi0, cheat)) ** 2
    p1 = abs(qmath.inner(psi1, cheat)) ** 2
    return cheat, p0, p1


def single_bit_mixture(theta: float) -> DensityMatrix:
    """Equal mixture of the two encoding states (one qubit of the ensemble)."""
    _check_theta(theta)
    P0 = qmath.projector(encode_bit(0, theta)).entries
    P1 = qmath.projector(encode_bit(1, theta)).entries
    return DensityMatrix(0.5 * (P0 + P1))


def bob_ensemble(n: int, theta: float) -> DensityMatrix:
    """Receiver's view of a uniformly random committed string.

    Equals the n-fold tensor power of the single-qubit mixture, which is the
    same operator as the equal mixture over all 2**n product encodings.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > MAX_EXACT_N:
        raise TooLarge(f"n {n} exceeds the exact-construction guard {MAX_EXACT_N}")
    rho1 = single_bit_mixture(theta).entries
    out = rho1
    for _ in range(n - 1):
        out = np.kron(out, rho1)
    return DensityMatrix(out)


def bob_entropy(n: int, theta: float) -> float:
    """Entropy ceiling on the receiver's accessible information, in bits."""
    _check_theta(theta)
    if n < 1:
        raise DomainError("n must be >= 1")
    return n * qmath.binary_entropy((1.0 + math.sin(theta)) / 2.0)


def inaccessible_bits(n: int, theta: float, r: int) -> tuple[float, bool]:
    """Gap n - S(rho) and whether it exceeds the required r bits."""
    if r < 0:
        raise DomainError("r must be >= 0")
    gap = n - bob_entropy(n, theta)
    return gap, gap > r


def min_n_for(r: int, theta: float) -> int:
    """Smallest n whose entropy gap exceeds r bits."""
    if r < 1:
        raise DomainError("r must be >= 1")
    if not (0.0 < theta < math.pi / 2):
        raise DomainError(f"theta {theta} outside (0, pi/2)")
    per_qubit = 1.0 - qmath.binary_entropy((1.0 + math.sin(theta)) / 2.0)
    if per_qubit <= 0.0:
        raise Unbounded(f"per-qubit gap underflows to 0 at theta {theta}")
    n = max(1, math.floor(r / per_qubit))
    while n * per_qubit <= r:
        n += 1
    return n


def helstrom_measurement(theta: float) -> tuple[HermitianOperator, HermitianOperator]:
    """Optimal projective measurement for discriminating psi_0 and psi_1.

    Projectors onto the positive and negative eigenspaces of P0 - P1; a
    "+" outcome is read as bit 0.
    """
    _check_theta(theta)
    P0 = qmath.projector(encode_bit(0, theta)).entries
    P1 = qmath.projector(encode_bit(1, theta)).entries
    eig = qmath.hermitian_eigen(HermitianOperator(P0 - P1))
    plus = qmath.projector(eig.eigenvectors[0])
    minus = qmath.projector(eig.eigenvectors[1])
    return plus, minus


def helstrom_attack(
    n: int,
    theta: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Concrete per-qubit discrimination attack by the receiver.

    Each trial commits n uniform bits and measures every qubit in the
    Helstrom basis.  Returns (information estimate, empirical success rate)
    where the estimate is n * (1 - H2(success rate)); it must respect the
    entropy ceiling up to statistical fluctuation.
    """
    if trials < 1_000:
        raise DomainError("trials must be >= 1e3")
    plus, minus = helstrom_measurement(theta)
    psi0 = encode_bit(0, theta)
    psi1 = encode_bit(1, theta)
    # Outcome statistics per committed bit; the per-qubit simulation reduces
    # to a Bernoulli draw with these exact Born probabilities.
    p_correct_0 = float(np.real(np.vdot(psi0.amplitudes, plus.entries @ psi0.amplitudes)))
    p_correct_1 = float(np.real(np.vdot(psi1.amplitudes, minus.entries @ psi1.amplitudes)))
    total = trials * n
    bits = rng.integers(0, 2, size=total)
    p = np.where(bits == 0, p_correct_0, p_correct_1)
    successes = rng.random(total) < p
    rate = float(successes.mean())
    info = n * (1.0 - qmath.binary_entropy(rate))
    return info, rate
