"""Bell states, dense coding, teleportation corrections and the five-qubit family."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import qcore
from .qcore import (CNOT, H, PauliCode, QCoreError, StateVector, apply_unitary,
                    fidelity_with_pure, ket, tensor)
from .transcript import Transcript

_SQ2 = 1 / np.sqrt(2)


class BellKind(enum.Enum):
    """|psi+-> = (|00> +- |11>)/sqrt2, |phi+-> = (|01> +- |10>)/sqrt2."""

    PSI_PLUS = "00"
    PSI_MINUS = "01"
    PHI_PLUS = "10"
    PHI_MINUS = "11"

    @property
    def label(self) -> str:
        return self.value

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @property
    def parity(self) -> int:
        """0 for psi+-, 1 for phi+- (whether the two qubits agree in Z)."""
        return int(self.value[0])

    @classmethod
    def parse(cls, text) -> "BellKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("ψ", "psi").replace("φ", "phi")
        for kind in cls:
            if key in (kind.label, kind.name.lower(), _SYMBOLS[kind].replace("ψ", "psi")
                       .replace("φ", "phi")):
                return kind
        raise QCoreError(f"unknown Bell state {text!r}")

    @classmethod
    def from_measurement_bits(cls, bits: str) -> "BellKind":
        """Computational outcome after CNOT(0->1) then H(0) -> Bell kind."""
        return _FROM_MEASUREMENT[bits]


_SYMBOLS = {BellKind.PSI_PLUS: "ψ+", BellKind.PSI_MINUS: "ψ-",
            BellKind.PHI_PLUS: "φ+", BellKind.PHI_MINUS: "φ-"}
_FROM_MEASUREMENT = {"00": BellKind.PSI_PLUS, "10": BellKind.PSI_MINUS,
                     "01": BellKind.PHI_PLUS, "11": BellKind.PHI_MINUS}

# tie-break order for MAP decisions
KIND_ORDER = (BellKind.PSI_PLUS, BellKind.PSI_MINUS, BellKind.PHI_PLUS, BellKind.PHI_MINUS)
MESSAGES = ("00", "01", "10", "11")
ENCODING = {"00": PauliCode.I, "01": PauliCode.X, "10": PauliCode.IY, "11": PauliCode.Z}

_BELL_AMPS = {
    BellKind.PSI_PLUS: [_SQ2, 0, 0, _SQ2],
    BellKind.PSI_MINUS: [_SQ2, 0, 0, -_SQ2],
    BellKind.PHI_PLUS: [0, _SQ2, _SQ2, 0],
    BellKind.PHI_MINUS: [0, _SQ2, -_SQ2, 0],
}
_BELL = {k: StateVector(2, v) for k, v in _BELL_AMPS.items()}


def bell_state(kind: BellKind) -> StateVector:
    return _BELL[BellKind.parse(kind)]


def identify_bell_kind(state: StateVector, atol: float = 1e-9) -> BellKind:
    """Bell kind of a two-qubit state, ignoring global phase."""
    for kind in KIND_ORDER:
        if abs(abs(np.vdot(_BELL[kind].amplitudes, state.amplitudes)) - 1) < atol:
            return kind
    raise QCoreError("state is not a Bell state")


@lru_cache(maxsize=None)
def _encode(kind: BellKind, message: str) -> BellKind:
    encoded = apply_unitary(bell_state(kind), ENCODING[message].matrix, [1])
    return identify_bell_kind(encoded)


def dense_encode(kind: BellKind, message: str) -> BellKind:
    """Kind obtained by applying the message's Pauli (00 I, 01 X, 10 iY, 11 Z) to qubit 2."""
    if message not in ENCODING:
        raise QCoreError(f"message must be one of {MESSAGES}, got {message!r}")
    return _encode(BellKind.parse(kind), message)


@lru_cache(maxsize=None)
def _decode(initial: BellKind, measured: BellKind) -> str:
    for m in MESSAGES:
        if _encode(initial, m) is measured:
            return m
    raise AssertionError("dense coding table is not bijective")


def dense_decode(initial: BellKind, measured: BellKind) -> str:
    return _decode(BellKind.parse(initial), BellKind.parse(measured))


# Receiver's correction, indexed by sender's measurement outcome (SMO) and the
# shared Bell state.  SMO bits are (unknown-qubit bit, channel-qubit bit) after
# CNOT(unknown -> channel) and H(unknown).
_CORRECTIONS = {
    BellKind.PSI_PLUS: ("I", "X", "Z", "iY"),
    BellKind.PSI_MINUS: ("Z", "iY", "I", "X"),
    BellKind.PHI_PLUS: ("X", "I", "iY", "Z"),
    BellKind.PHI_MINUS: ("iY", "Z", "X", "I"),
}


def correction_for(smo: str, shared: BellKind) -> PauliCode:
    if smo not in MESSAGES:
        raise QCoreError(f"bad sender outcome {smo!r}")
    return _CORRECTION_CODES[BellKind.parse(shared)][int(smo, 2)]


_CORRECTION_CODES = {k: tuple(PauliCode.parse(c) for c in v) for k, v in _CORRECTIONS.items()}

_SENDER_OP = (np.kron(H, np.eye(2)) @ CNOT)


def sender_operation() -> np.ndarray:
    """CNOT from the unknown qubit onto the channel qubit, then H on the unknown qubit."""
    return _SENDER_OP


def teleport(unknown: StateVector, shared: BellKind, rng: np.random.Generator, *,
             assumed: BellKind | None = None, forced_outcome: str | None = None,
             actor: str = "sender", receiver: str = "receiver"):
    """Teleport one qubit over a shared Bell pair.

    ``assumed`` is the kind the receiver believes was shared (defaults to the
    true one); the standard Pauli correction is chosen from it.
    Returns ``(transcript, receiver_state)``.
    """
    if unknown.num_qubits != 1:
        raise QCoreError("teleport takes a single-qubit state")
    shared = BellKind.parse(shared)
    assumed = shared if assumed is None else BellKind.parse(assumed)
    log = Transcript()
    state = tensor([unknown, bell_state(shared)])
    log.add("T1", "charlie", "share", {"bell": shared.label})
    state = apply_unitary(state, _SENDER_OP, [0, 1])
    record, post = qcore.measure(state, [0, 1], qcore.Basis.COMPUTATIONAL, rng,
                                 forced=forced_outcome)
    smo = record.outcome
    log.add("T2", actor, "measure", {"smo": smo, "probability": record.probability})
    received = StateVector(1, post.tensor()[int(smo[0]), int(smo[1]), :])
    fix = correction_for(smo, assumed)
    received = apply_unitary(received, fix.matrix, [0])
    log.add("T3", receiver, "correct", {"pauli": fix.value, "assumed": assumed.label})
    log.fidelities["teleport"] = fidelity_with_pure(received, unknown)
    return log.finish(), received


@dataclass(frozen=True)
class FiveQubitFamily:
    """(|psi1>|psi2>|a> +- |psi3>|psi4>|b>)/sqrt2 on qubits (A1, B1, A2, B2, C1)."""

    psi1: BellKind
    psi2: BellKind
    psi3: BellKind
    psi4: BellKind
    a: StateVector = ket("0")
    b: StateVector = ket("1")
    sign: int = 1

    def check(self) -> None:
        if abs(np.vdot(self.a.amplitudes, self.b.amplitudes)) > 1e-12:
            raise QCoreError("Charlie's basis states are not orthogonal")
        if self.sign not in (1, -1):
            raise QCoreError("sign must be +1 or -1")
        if self.psi1 is self.psi3 or self.psi2 is self.psi4:
            raise QCoreError("Charlie qubit separable")


def build_five_qubit_state(family: FiveQubitFamily) -> StateVector:
    family.check()
    first = tensor([bell_state(family.psi1), bell_state(family.psi2), family.a]).amplitudes
    second = tensor([bell_state(family.psi3), bell_state(family.psi4), family.b]).amplitudes
    return StateVector(5, (first + family.sign * second) * _SQ2)


def charlie_collapse(state: StateVector, family: FiveQubitFamily, outcome: str) -> StateVector:
    """Project Charlie's qubit onto |a> ("a") or |b> ("b"); returns the 4-qubit rest."""
    vec = {"a": family.a, "b": family.b}[outcome].amplitudes
    rest = np.tensordot(vec.conj(), state.tensor(), axes=([0], [4])).reshape(-1)
    norm = np.linalg.norm(rest)
    if norm ** 2 < qcore.MIN_BRANCH_PROB:
        raise qcore.ZeroProbabilityBranch(norm ** 2)
    return StateVector(4, rest / norm)
