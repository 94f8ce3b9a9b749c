"""Exception types shared across the protocol modules."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(SimulationError):
    """A vector with (numerically) zero norm cannot be normalized."""


class DimMismatch(SimulationError):
    """Operands have incompatible dimensions."""


class DomainError(SimulationError):
    """A scalar argument lies outside its admissible range."""


class LengthMismatch(SimulationError):
    """Bit strings or sequences have inconsistent lengths."""


class NoConvergence(SimulationError):
    """The eigensolver exhausted its sweep budget without converging."""


class IncompleteMeasurement(SimulationError):
    """Measurement projectors do not resolve the identity."""


class TooLarge(SimulationError):
    """A requested construction exceeds the exact-computation size guard."""


class Unbounded(SimulationError):
    """No finite parameter value satisfies the request at this precision."""


class PackingFailure(SimulationError):
    """Could not pack the requested number of low-overlap vectors."""


class IndexOutOfRange(SimulationError):
    """A codebook index is outside the valid range."""


class DuplicateTargets(SimulationError):
    """A target index set contains repeated entries."""


class UnknownStrategy(SimulationError):
    """A strategy name does not resolve to a registered strategy."""


class ProtocolViolation(SimulationError):
    """A strategy emitted a message out of order (harness bug, not cheating)."""


class DeserializeError(SimulationError):
    """A serialized transcript could not be parsed."""


class InvalidSpec(SimulationError):
    """A sweep specification violates its invariants."""
