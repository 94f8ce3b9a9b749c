"""Codebook string commitment: low-coherence packings and cheat analysis.

A codebook is a set of unit vectors whose pairwise overlaps are certified
below epsilon.  Committing a string sends the vector it indexes; cheating
over a target set of r strings is governed by the top eigenvalue of
Q = P_1 + ... + P_r, which never exceeds 1 + (r-1) * epsilon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DeserializeError,
    DomainError,
    DuplicateTargets,
    IndexOutOfRange,
    PackingFailure,
    TooLarge,
)
from . import qmath
from .qmath import HermitianOperator, StateVector
from .bitwise import UnveilVerdict

CODEBOOK_FORMAT_VERSION = 1
MAX_REPORT_DIM = 256


@dataclass(frozen=True)
class Codebook:
    """Indexed unit vectors with a certified pairwise-overlap bound.

    vectors is a (count, dim) complex array, one vector per row.
    """

    dim: int
    vectors: np.ndarray
    epsilon: float
    seed: int | None = None
    construction: str = "random"

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=complex)
        if V.ndim != 2 or V.shape[1] != self.dim:
            raise DomainError(f"vectors shape {V.shape} does not match dim {self.dim}")
        if V.shape[0] < 2:
            raise DomainError("a codebook needs at least 2 vectors")
        norms = np.linalg.norm(V, axis=1)
        if np.abs(norms - 1.0).max() > qmath.NORM_TOL:
            raise DomainError("codebook vectors must be unit norm")
        V = V.copy()
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)
        self.certify()

    def certify(self) -> None:
        """Re-check every pairwise overlap against epsilon."""
        G = self.vectors @ self.vectors.conj().T
        off = np.abs(G - np.diag(np.diag(G)))
        worst = off.max()
        if worst >= self.epsilon:
            raise DomainError(
                f"pairwise overlap {worst} violates certified bound {self.epsilon}"
            )

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def bits(self) -> int:
        """Committed-string length: floor(log2 count)."""
        return self.count.bit_length() - 1

    @property
    def packing_exponent(self) -> float:
        """log2(count) / log2(dim), reported growth metadata."""
        return math.log2(self.count) / math.log2(self.dim)

    def state(self, index: int) -> StateVector:
        if not (0 <= index < self.count):
            raise IndexOutOfRange(f"index {index} outside [0, {self.count})")
        return StateVector(self.vectors[index])

    def to_json(self) -> str:
        doc = {
            "version": CODEBOOK_FORMAT_VERSION,
            "dim": self.dim,
            "epsilon": self.epsilon,
            "vectors": [
                [[float(z.real), float(z.imag)] for z in row] for row in self.vectors
            ],
            "seed": self.seed,
            "construction": self.construction,
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Codebook":
        try:
            doc = json.loads(text)
            if doc["version"] != CODEBOOK_FORMAT_VERSION:
                raise DeserializeError(f"unsupported version {doc['version']}")
            V = np.array(
                [[complex(re, im) for re, im in row] for row in doc["vectors"]],
                dtype=complex,
            )
            return cls(
                dim=doc["dim"],
                vectors=V,
                epsilon=doc["epsilon"],
                seed=doc["seed"],
                construction=doc["construction"],
            )
        except DeserializeError:
            raise
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise DeserializeError(f"bad codebook document: {exc}") from exc


@dataclass(frozen=True)
class CodebookCommitment:
    state: StateVector
    codebook: Codebook

    def __post_init__(self):
        if self.state.dim != self.codebook.dim:
            raise DomainError("committed state dimension does not match codebook")


@dataclass(frozen=True)
class CheatReport:
    """Outcome of the optimal multistring cheat against a target set."""

    target_indices: tuple[int, ...]
    cheat_state: StateVector
    success_probs: tuple[float, ...]
    total: float
    bound: float

    def __post_init__(self):
        if self.total > self.bound + 1e-9:
            raise DomainError(f"total {self.total} exceeds bound {self.bound}")
        for p in self.success_probs:
            if not (0.0 <= p <= 1.0 + 1e-12):
                raise DomainError(f"success probability {p} outside [0, 1]")


def _greedy_fill(
    accepted: list[np.ndarray],
    d: int,
    count: int,
    epsilon: float,
    rng: np.random.Generator,
    max_attempts: int,
    block: int = 4096,
) -> int:
    """Greedy rejection sampling of Haar candidates; returns attempts used."""
    used = 0
    while len(accepted) < count and used < max_attempts:
        b = min(block, max_attempts - used)
        z = rng.standard_normal((b, d)) + 1j * rng.standard_normal((b, d))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        used += b
        if accepted:
            A = np.array(accepted)
            ok = (np.abs(z @ A.conj().T) < epsilon).all(axis=1)
            z = z[ok]
        for v in z:
            if accepted and (np.abs(np.array(accepted).conj() @ v) >= epsilon).any():
                continue
            accepted.append(v)
            if len(accepted) == count:
                break
    return used


def _repulsion_polish(
    V: np.ndarray, epsilon: float, max_iters: int = 5000, lr: float = 0.5
) -> np.ndarray | None:
    """Push vectors apart until all overlaps drop below epsilon.

    Gradient descent on a hinge of the squared overlaps above a target a
    little inside the bound; returns None if the iteration budget runs out
    (the packing is then presumed infeasible at this epsilon).
    """
    target = 0.96 * epsilon
    for _ in range(max_iters):
        G = V @ V.conj().T
        np.fill_diagonal(G, 0.0)
        if np.abs(G).max() < 0.999 * epsilon:
            return V
        W = np.maximum(np.abs(G) ** 2 - target**2, 0.0)
        V = V - lr * ((W * G) @ V)
        V /= np.linalg.norm(V, axis=1, keepdims=True)
    return None


def random_codebook(
    d: int,
    count: int,
    epsilon: float,
    rng: np.random.Generator,
    max_attempts: int = 200_000,
) -> Codebook:
    """Seeded random low-coherence packing.

    Haar-random candidates are accepted greedily while their overlap with
    every accepted vector stays below epsilon.  Near the packing limit the
    acceptance region shrinks too fast for rejection alone, so any shortfall
    is filled with fresh Haar vectors and the whole set is polished by
    repulsion descent, then re-certified.  Deterministic for a fixed rng
    state.
    """
    if count < 2:
        raise DomainError("count must be >= 2")
    if not (0.0 < epsilon <= 1.0):
        raise DomainError("epsilon must lie in (0, 1]")
    accepted: list[np.ndarray] = []
    _greedy_fill(accepted, d, count, epsilon, rng, max_attempts)
    if len(accepted) < count:
        short = count - len(accepted)
        fills = rng.standard_normal((short, d)) + 1j * rng.standard_normal((short, d))
        fills /= np.linalg.norm(fills, axis=1, keepdims=True)
        V = np.vstack([np.array(accepted), fills]) if accepted else fills
        polished = _repulsion_polish(V, epsilon)
        if polished is None:
            raise PackingFailure(
                f"could not pack {count} vectors in dim {d} below overlap {epsilon}"
            )
        accepted = list(polished)
    return Codebook(dim=d, vectors=np.array(accepted), epsilon=epsilon, construction="random")


def simplex_codebook(d: int) -> Codebook:
    """Regular simplex: d+1 real unit vectors with pairwise inner product -1/d.

    Vertices of the regular simplex centered at the origin of R^(d+1),
    rotated into R^d by the Helmert basis of the hyperplane orthogonal to
    the all-ones vector.
    """
    if d < 2:
        raise DomainError("d must be >= 2")
    m = d + 1
    # Helmert rows: orthonormal basis of the hyperplane sum(x) = 0.
    B = np.zeros((d, m))
    for k in range(1, m):
        B[k - 1, :k] = 1.0
        B[k - 1, k] = -k
        B[k - 1] /= math.sqrt(k * (k + 1))
    centered = np.eye(m) - 1.0 / m
    V = (B @ centered).T  # row i = simplex vertex i in R^d
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return Codebook(
        dim=d,
        vectors=V.astype(complex),
        epsilon=1.0 / d + 1e-12,
        construction="simplex",
    )


def commit_string(codebook: Codebook, index: int) -> CodebookCommitment:
    """Commit a string by sending the vector it indexes."""
    return CodebookCommitment(state=codebook.state(index), codebook=codebook)


def verify_unveil(
    held: CodebookCommitment, claimed: int, rng: np.random.Generator
) -> UnveilVerdict:
    """Measure the held state against the claimed codeword's projector."""
    P = qmath.projector(held.codebook.state(claimed))
    complement = HermitianOperator(np.eye(held.codebook.dim) - P.entries)
    outcome = qmath.born_sample(held.state, [P, complement], rng)
    if outcome == 0:
        return UnveilVerdict(accepted=True)
    return UnveilVerdict(accepted=False, failing_index=claimed)


def _check_targets(codebook: Codebook, targets) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise DuplicateTargets(f"repeated indices in {targets}")
    if not targets:
        raise DomainError("target set must be nonempty")
    for t in targets:
        if not (0 <= t < codebook.count):
            raise IndexOutOfRange(f"target {t} outside [0, {codebook.count})")
    return targets


def cheat_operator(codebook: Codebook, targets) -> HermitianOperator:
    """Q = sum of projectors onto the target codewords."""
    targets = _check_targets(codebook, targets)
    Q = np.zeros((codebook.dim, codebook.dim), dtype=complex)
    for t in targets:
        Q += qmath.projector(codebook.state(t)).entries
    return HermitianOperator(Q)


def optimal_multistring_cheat(codebook: Codebook, targets) -> CheatReport:
    """Best single committed state for keeping r revelations alive.

    The optimum is the top eigenvector of Q; its total success probability
    is lambda_max(Q) <= 1 + (r-1) * epsilon.
    """
    targets = _check_targets(codebook, targets)
    Q = cheat_operator(codebook, targets)
    eig = qmath.hermitian_eigen(Q)
    cheat = eig.eigenvectors[0]
    probs = tuple(
        float(abs(qmath.inner(codebook.state(t), cheat)) ** 2) for t in targets
    )
    return CheatReport(
        target_indices=targets,
        cheat_state=cheat,
        success_probs=probs,
        total=float(eig.eigenvalues[0]),
        bound=1.0 + (len(targets) - 1) * codebook.epsilon,
    )


def gram_matrix(codebook: Codebook, targets) -> HermitianOperator:
    """Pairwise inner products of the target codewords.

    Shares its nonzero spectrum with the cheat operator Q whenever the
    target vectors are linearly independent.
    """
    targets = _check_targets(codebook, targets)
    V = codebook.vectors[list(targets)]
    return HermitianOperator(V.conj() @ V.T)


class BobInfoReport(NamedTuple):
    holevo: float
    dim_bound: float
    committed_bits: int


def bob_info_report(codebook: Codebook) -> BobInfoReport:
    """Receiver-side information accounting for a uniform committed string.

    holevo is the exact entropy of the equal mixture of all codewords;
    dim_bound = log2(dim) always dominates it, while the committed string
    is floor(log2 count) bits.
    """
    if codebook.dim > MAX_REPORT_DIM:
        raise TooLarge(f"dim {codebook.dim} exceeds the guard {MAX_REPORT_DIM}")
    V = codebook.vectors
    rho = qmath.DensityMatrix(V.T @ V.conj() / codebook.count)
    return BobInfoReport(
        holevo=qmath.von_neumann_entropy(rho),
        dim_bound=math.log2(codebook.dim),
        committed_bits=codebook.bits,
    )
