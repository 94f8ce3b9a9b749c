"""Two-party session engine: messages, transcripts, strategies, seeded rng.

A session drives one protocol to a terminal verdict while recording every
message.  Transcripts serialize to JSON lines and replay byte-identically
for equal inputs.  Quantum states appear in the transcript for replay
purposes but are never handed to the receiving strategy: a strategy only
ever sees the classical face of each message addressed to its party.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DeserializeError, ProtocolViolation, UnknownStrategy

FORMAT_VERSION = 1

PROTOCOLS = ("BitwiseCommit", "CodebookCommit", "CoinToss")


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Deterministic, platform-stable stream derived from (seed, label)."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence([seed % 2**63, *words])
    return np.random.Generator(np.random.PCG64(ss))


def _format_value(obj) -> str:
    """JSON with floats at 17 significant digits (lossless for float64)."""
    if isinstance(obj, dict):
        inner = ", ".join(
            f"{json.dumps(str(k))}: {_format_value(v)}" for k, v in obj.items()
        )
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


@dataclass(frozen=True)
class Message:
    seq: int
    sender: str  # "alice" | "bob"
    kind: str
    payload: dict


@dataclass
class Transcript:
    protocol: str
    params: dict
    seed: int
    messages: list[Message] = field(default_factory=list)
    verdict: str | None = None

    def append(self, sender: str, kind: str, payload: dict) -> Message:
        if self.verdict is not None:
            raise ProtocolViolation("transcript already terminal")
        if sender not in ("alice", "bob"):
            raise ProtocolViolation(f"unknown sender {sender}")
        if self.messages and self.messages[-1].sender == sender:
            raise ProtocolViolation(f"{sender} sent two consecutive messages")
        msg = Message(seq=len(self.messages), sender=sender, kind=kind, payload=payload)
        self.messages.append(msg)
        return msg


def serialize(t: Transcript) -> bytes:
    """JSON lines: header, one line per message, verdict footer."""
    lines = [
        _format_value(
            {
                "format_version": FORMAT_VERSION,
                "protocol": t.protocol,
                "params": t.params,
                "seed": t.seed,
            }
        )
    ]
    for m in t.messages:
        lines.append(
            _format_value(
                {"seq": m.seq, "sender": m.sender, "kind": m.kind, "payload": m.payload}
            )
        )
    lines.append(_format_value({"verdict": t.verdict}))
    return ("\n".join(lines) + "\n").encode("utf-8")


def deserialize(data: bytes) -> Transcript:
    lines = data.decode("utf-8").splitlines()
    if len(lines) < 2:
        raise DeserializeError("transcript needs a header and a footer")
    try:
        header = json.loads(lines[0])
        footer = json.loads(lines[-1])
        if header["format_version"] != FORMAT_VERSION:
            raise DeserializeError(f"unsupported version {header['format_version']}")
        t = Transcript(
            protocol=header["protocol"], params=header["params"], seed=header["seed"]
        )
        for line in lines[1:-1]:
            doc = json.loads(line)
            t.messages.append(
                Message(
                    seq=doc["seq"],
                    sender=doc["sender"],
                    kind=doc["kind"],
                    payload=doc["payload"],
                )
            )
        t.verdict = footer["verdict"]
        return t
    except DeserializeError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DeserializeError(f"corrupt transcript: {exc}") from exc


@dataclass(frozen=True)
class StrategyDescriptor:
    party: str  # "alice" | "bob"
    name: str
    parameters: dict = field(default_factory=dict)


class SessionStrategy:
    """Base for in-session strategies; records what the engine lets it see."""

    def __init__(self):
        self.observed: list[tuple[str, str, dict]] = []

    def observe(self, message: Message, visible_payload: dict) -> None:
        self.observed.append((message.sender, message.kind, visible_payload))


_QUANTUM_KEYS = ("states", "state")


def _classical_view(payload: dict) -> dict:
    """Strip quantum state descriptions; strategies cannot read amplitudes."""
    return {
        k: ("<quantum>" if k in _QUANTUM_KEYS else v) for k, v in payload.items()
    }


_REGISTRY: dict[tuple[str, str, str], type] = {}


def register_strategy(protocol: str, party: str, name: str):
    def deco(cls):
        _REGISTRY[(protocol, party, name)] = cls
        return cls

    return deco


def resolve_strategy(protocol: str, desc: StrategyDescriptor) -> SessionStrategy:
    key = (protocol, desc.party, desc.name)
    if key not in _REGISTRY:
        raise UnknownStrategy(f"no {desc.party} strategy {desc.name!r} for {protocol}")
    return _REGISTRY[key](**desc.parameters)


def _amps_json(amplitudes: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in amplitudes]


# --- bitwise commitment strategies -----------------------------------------


@register_strategy("BitwiseCommit", "alice", "honest")
class _HonestBitwiseAlice(SessionStrategy):
    def pick_states(self, params, rng):
        from . import bitwise

        bits = "".join(str(b) for b in rng.integers(0, 2, size=params.n))
        self.bits = bits
        return [bitwise.encode_bit(int(b), params.theta) for b in bits]

    def claim(self, rng) -> str:
        return self.bits


@register_strategy("BitwiseCommit", "alice", "cheat_state")
class _CheatStateAlice(SessionStrategy):
    """Sends the optimal cheat state on every qubit, then reveals one bit
    value everywhere (a random one unless reveal_bit is given)."""

    def __init__(self, reveal_bit: int | None = None):
        super().__init__()
        self.reveal_bit = reveal_bit

    def pick_states(self, params, rng):
        from . import bitwise

        self.n = params.n
        cheat, _, _ = bitwise.optimal_bit_cheat(params.theta)
        return [cheat] * params.n

    def claim(self, rng) -> str:
        bit = self.reveal_bit if self.reveal_bit is not None else int(rng.integers(2))
        return str(bit) * self.n


@register_strategy("BitwiseCommit", "bob", "honest")
class _HonestBitwiseBob(SessionStrategy):
    pass


def _run_bitwise(params_dict: dict, alice, bob, rng, t: Transcript) -> None:
    from . import bitwise

    params = bitwise.SecurityParams(
        theta=params_dict["theta"], n=params_dict["n"], m=params_dict.get("m", 0)
    )
    states = alice.pick_states(params, rng)
    msg = t.append(
        "alice",
        "commit",
        {"n": params.n, "states": [_amps_json(s.amplitudes) for s in states]},
    )
    bob.observe(msg, _classical_view(msg.payload))
    msg = t.append("bob", "commit_ack", {})
    alice.observe(msg, msg.payload)
    claimed = alice.claim(rng)
    msg = t.append("alice", "unveil", {"claimed": claimed})
    bob.observe(msg, msg.payload)
    held = bitwise.BitwiseCommitment(tuple(states))
    verdict = bitwise.verify_unveil(held, claimed, params.theta, rng)
    msg = t.append(
        "bob",
        "verdict",
        {"accepted": verdict.accepted, "failing_index": verdict.failing_index},
    )
    alice.observe(msg, msg.payload)
    t.verdict = "Accepted" if verdict.accepted else "Rejected"


# --- codebook commitment strategies ----------------------------------------


@register_strategy("CodebookCommit", "alice", "honest")
class _HonestCodebookAlice(SessionStrategy):
    def pick_state(self, cb, rng):
        self.index = int(rng.integers(cb.count))
        return cb.state(self.index)

    def claim(self, rng) -> int:
        return self.index


@register_strategy("CodebookCommit", "alice", "multistring")
class _MultistringAlice(SessionStrategy):
    """Commits the top eigenvector of Q for r random target strings, then
    reveals a random member of the target set."""

    def __init__(self, r: int = 2):
        super().__init__()
        self.r = int(r)

    def pick_state(self, cb, rng):
        from . import codebook

        self.targets = [int(i) for i in rng.choice(cb.count, size=self.r, replace=False)]
        report = codebook.optimal_multistring_cheat(cb, self.targets)
        return report.cheat_state

    def claim(self, rng) -> int:
        return int(self.targets[int(rng.integers(len(self.targets)))])


@register_strategy("CodebookCommit", "bob", "honest")
class _HonestCodebookBob(SessionStrategy):
    pass


def build_codebook(params_dict: dict, seed: int):
    """Shared public codebook for a session, derived from the session seed."""
    from . import codebook

    construction = params_dict.get("construction", "random")
    if construction == "simplex":
        return codebook.simplex_codebook(params_dict["dim"])
    return codebook.random_codebook(
        params_dict["dim"],
        params_dict["count"],
        params_dict["epsilon"],
        rng_stream(seed, "codebook"),
    )


def _run_codebook(params_dict: dict, alice, bob, rng, t: Transcript) -> None:
    from . import codebook

    cb = build_codebook(params_dict, t.seed)
    state = alice.pick_state(cb, rng)
    msg = t.append("alice", "commit", {"state": _amps_json(state.amplitudes)})
    bob.observe(msg, _classical_view(msg.payload))
    msg = t.append("bob", "commit_ack", {})
    alice.observe(msg, msg.payload)
    claimed = alice.claim(rng)
    msg = t.append("alice", "unveil", {"index": claimed})
    bob.observe(msg, msg.payload)
    held = codebook.CodebookCommitment(state=state, codebook=cb)
    verdict = codebook.verify_unveil(held, claimed, rng)
    msg = t.append(
        "bob",
        "verdict",
        {"accepted": verdict.accepted, "failing_index": verdict.failing_index},
    )
    alice.observe(msg, msg.payload)
    t.verdict = "Accepted" if verdict.accepted else "Rejected"


# --- coin toss strategies ---------------------------------------------------


@register_strategy("CoinToss", "alice", "honest")
class _HonestTossAlice(SessionStrategy):
    def impl(self):
        from . import cointoss

        return cointoss.HonestAlice()


@register_strategy("CoinToss", "alice", "tamper")
class _TamperTossAlice(SessionStrategy):
    def __init__(self, fraction: float = 1.0, target_bit: int = 0):
        super().__init__()
        self.fraction = float(fraction)
        self.target_bit = int(target_bit)

    def impl(self):
        from . import cointoss

        return cointoss.TamperAlice(fraction=self.fraction, target_bit=self.target_bit)


@register_strategy("CoinToss", "alice", "tamper_one_batch")
class _TamperOneBatchAlice(SessionStrategy):
    def __init__(self, batch_index: int = 0, target_bit: int = 0):
        super().__init__()
        self.batch_index = int(batch_index)
        self.target_bit = int(target_bit)

    def impl(self):
        from . import cointoss

        return cointoss.TamperOneBatch(
            batch_index=self.batch_index, target_bit=self.target_bit
        )


@register_strategy("CoinToss", "bob", "honest")
class _HonestTossBob(SessionStrategy):
    cheating = False


@register_strategy("CoinToss", "bob", "best_of_m")
class _BestOfMTossBob(SessionStrategy):
    cheating = True


def _run_cointoss(params_dict: dict, alice, bob, rng, t: Transcript) -> None:
    from . import cointoss

    params = cointoss.CoinTossParams(
        M=params_dict["M"], N=params_dict["N"], seed=t.seed
    )
    batches = cointoss.prepare_batches(alice.impl(), params, rng)
    payload = {
        "M": params.M,
        "N": params.N,
        "states": [[_amps_json(p.state.amplitudes) for p in b] for b in batches],
    }
    msg = t.append("alice", "prepare", payload)
    bob.observe(msg, _classical_view(msg.payload))

    if bob.cheating:
        measured = [cointoss.generate_bits(b, rng) for b in batches]
        kept = max(
            range(params.M),
            key=lambda i: cointoss.zero_prefix_score(measured[i][1]),
        )
    else:
        measured = None
        kept = int(rng.integers(params.M))
    test = [i for i in range(params.M) if i != kept]
    msg = t.append("bob", "choose", {"kept": kept, "test": test})
    alice.observe(msg, msg.payload)
    msg = t.append("alice", "open", {"batches": test})
    bob.observe(msg, msg.payload)

    failed = None
    if not bob.cheating:
        for i in test:
            if not cointoss.singlet_test(batches[i], rng):
                failed = i
                break
    msg = t.append("bob", "test_result", {"passed": failed is None, "failed_batch": failed})
    alice.observe(msg, msg.payload)
    if failed is not None:
        t.verdict = "CheatDetected"
        return

    if measured is not None:
        a_bits, b_bits = measured[kept]
    else:
        a_bits, b_bits = cointoss.generate_bits(batches[kept], rng)
    msg = t.append("alice", "alice_bits", {"bits": a_bits})
    bob.observe(msg, msg.payload)
    msg = t.append("bob", "bob_bits", {"bits": b_bits})
    alice.observe(msg, msg.payload)
    t.verdict = "Completed"


_DRIVERS = {
    "BitwiseCommit": _run_bitwise,
    "CodebookCommit": _run_codebook,
    "CoinToss": _run_cointoss,
}


def run_session(
    protocol: str,
    params: dict,
    alice: StrategyDescriptor,
    bob: StrategyDescriptor,
    seed: int,
) -> Transcript:
    """Drive one protocol session to a terminal verdict.

    Deterministic: equal inputs give byte-identical serialized transcripts.
    """
    if protocol not in _DRIVERS:
        raise UnknownStrategy(f"unknown protocol {protocol!r}")
    if alice.party != "alice" or bob.party != "bob":
        raise ProtocolViolation("descriptors must name an alice and a bob strategy")
    alice_s = resolve_strategy(protocol, alice)
    bob_s = resolve_strategy(protocol, bob)
    rng = rng_stream(seed, "session")
    t = Transcript(protocol=protocol, params=params, seed=seed)
    _DRIVERS[protocol](params, alice_s, bob_s, rng, t)
    return t
