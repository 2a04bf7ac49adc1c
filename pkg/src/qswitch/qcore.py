"""Dense state-vector / density-matrix engine for small qubit registers.

Qubit 0 is the most significant bit of the amplitude index (leftmost in
ket notation), so ``|01>`` has amplitude index 1 and qubit 1 set.  All
values are immutable; every operation returns a new object.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

ATOL = 1e-10
EIG_FLOOR = -1e-9
KRAUS_ATOL = 1e-12
MIN_BRANCH_PROB = 1e-12

_SQ2 = 1 / np.sqrt(2)


class QCoreError(ValueError):
    """Invalid input to a register operation."""


class ZeroProbabilityBranch(QCoreError):
    def __init__(self, probability: float = 0.0):
        super().__init__(f"zero-probability branch (p={probability:.3e})")
        self.probability = probability


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != 2 ** self.num_qubits:
            raise QCoreError(
                f"expected {2 ** self.num_qubits} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > ATOL:
            raise QCoreError(f"state not normalized (norm^2={norm!r})")

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size)))
        if 2 ** n != amps.size:
            raise QCoreError("length is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.num_qubits)

    def __repr__(self):
        return f"StateVector({self.num_qubits}, {np.round(self.amplitudes, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian operator on ``num_qubits`` qubits.

    Unnormalized matrices are allowed (correlated Kraus maps and projectors
    produce them); :meth:`validate` checks the physical invariants.
    """

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        d = 2 ** self.num_qubits
        if m.shape != (d, d):
            raise QCoreError(f"expected {d}x{d} matrix, got {m.shape}")
        if d and np.abs(m - m.conj().T).max() > ATOL:
            raise QCoreError("density matrix is not Hermitian")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def normalized(self) -> "DensityMatrix":
        t = self.trace
        if t < MIN_BRANCH_PROB:
            raise ZeroProbabilityBranch(t)
        return DensityMatrix(self.num_qubits, self.entries / t)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())

    def validate(self, normalized: bool = True) -> "DensityMatrix":
        if normalized and abs(self.trace - 1.0) > ATOL:
            raise QCoreError(f"trace {self.trace!r} != 1")
        if self.min_eigenvalue() < EIG_FLOOR:
            raise QCoreError("density matrix is not positive semidefinite")
        return self

    def tensor(self) -> np.ndarray:
        return self.entries.reshape([2] * (2 * self.num_qubits))

    def __repr__(self):
        return f"DensityMatrix({self.num_qubits}, trace={self.trace:.6g})"


State = Union[StateVector, DensityMatrix]


class PauliCode(enum.Enum):
    I = "I"
    X = "X"
    IY = "iY"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI[self]

    @classmethod
    def parse(cls, name) -> "PauliCode":
        if isinstance(name, cls):
            return name
        for code in cls:
            if name in (code.value, code.name, code.value.lower(), code.name.lower()):
                return code
        raise QCoreError(f"unknown Pauli code {name!r}")


_PAULI = {
    PauliCode.I: _frozen(np.eye(2)),
    PauliCode.X: _frozen([[0, 1], [1, 0]]),
    PauliCode.IY: _frozen([[0, 1], [-1, 0]]),
    PauliCode.Z: _frozen([[1, 0], [0, -1]]),
}

H = _frozen(np.array([[1, 1], [1, -1]]) * _SQ2)
CNOT = _frozen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


class Basis(enum.Enum):
    COMPUTATIONAL = "computational"
    DIAGONAL = "diagonal"
    BELL = "bell"


@dataclass(frozen=True)
class KrausChannel:
    """Single-qubit Kraus set with its decoherence rate."""

    name: str
    eta: float
    operators: tuple = field(repr=False)

    def __post_init__(self):
        ops = tuple(_frozen(op) for op in self.operators)
        for op in ops:
            if op.shape != (2, 2):
                raise QCoreError("Kraus operators must be 2x2")
        object.__setattr__(self, "operators", ops)

    def completeness_error(self) -> float:
        total = sum(op.conj().T @ op for op in self.operators)
        return float(np.abs(total - np.eye(2)).max())

    def is_complete(self, atol: float = KRAUS_ATOL) -> bool:
        return self.completeness_error() <= atol


@dataclass(frozen=True)
class MeasurementRecord:
    targets: tuple
    basis: Basis
    outcome: object  # bit string, or BellKind for Bell-basis measurements
    probability: float

    def __post_init__(self):
        if not -ATOL <= self.probability <= 1 + ATOL:
            raise QCoreError(f"probability {self.probability} outside [0, 1]")
        if self.basis is not Basis.BELL and len(self.outcome) != len(self.targets):
            raise QCoreError("outcome length does not match targets")


# -- basic states -------------------------------------------------------------

def ket(bits: str) -> StateVector:
    """Computational basis state, e.g. ``ket("01")``."""
    n = len(bits)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[int(bits, 2) if n else 0] = 1
    return StateVector(n, amps)


PLUS = StateVector(1, [_SQ2, _SQ2])
MINUS = StateVector(1, [_SQ2, -_SQ2])


def qubit(alpha: complex, beta: complex) -> StateVector:
    return StateVector.from_amplitudes([alpha, beta], normalize=True)


def haar_qubit(rng: np.random.Generator) -> StateVector:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return StateVector(1, z / np.linalg.norm(z))


# -- helpers ------------------------------------------------------------------

def _check_targets(targets: Sequence[int], n: int) -> tuple:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise QCoreError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise QCoreError(f"target {t} out of range for {n} qubits")
    return targets


def _apply_to_axes(tensor: np.ndarray, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    op_t = op.reshape([2] * (2 * k))
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _apply_operator(state: State, op: np.ndarray, targets: tuple) -> np.ndarray:
    """Raw array of ``op`` applied on ``targets`` (O psi, or O rho O^dagger)."""
    n = state.num_qubits
    if isinstance(state, StateVector):
        return _apply_to_axes(state.tensor(), op, targets).reshape(-1)
    t = _apply_to_axes(state.tensor(), op, targets)
    t = _apply_to_axes(t, op.conj(), [q + n for q in targets])
    d = 2 ** n
    return t.reshape(d, d)


def _density(state: State) -> DensityMatrix:
    return state.to_density() if isinstance(state, StateVector) else state


# -- operations ---------------------------------------------------------------

def tensor(parts: Sequence[StateVector]) -> StateVector:
    """Kronecker product; the leftmost part owns the lowest qubit indices."""
    if not parts:
        raise QCoreError("no parts")
    amps = parts[0].amplitudes
    for p in parts[1:]:
        amps = np.kron(amps, p.amplitudes)
    return StateVector(sum(p.num_qubits for p in parts), amps)


def tensor_density(parts: Sequence[DensityMatrix]) -> DensityMatrix:
    if not parts:
        raise QCoreError("no parts")
    m = parts[0].entries
    for p in parts[1:]:
        m = np.kron(m, p.entries)
    return DensityMatrix(sum(p.num_qubits for p in parts), m)


_UNITARY_SEEN: dict = {}


def _check_unitary(gate: np.ndarray) -> None:
    key = (gate.shape, gate.tobytes())
    if key in _UNITARY_SEEN:
        return
    if np.abs(gate.conj().T @ gate - np.eye(gate.shape[0])).max() > ATOL:
        raise QCoreError("gate is not unitary")
    if len(_UNITARY_SEEN) < 4096:
        _UNITARY_SEEN[key] = True


def apply_unitary(state: State, gate, targets: Sequence[int]) -> State:
    gate = np.asarray(gate.matrix if isinstance(gate, PauliCode) else gate, dtype=complex)
    targets = _check_targets(targets, state.num_qubits)
    if gate.shape != (2 ** len(targets),) * 2:
        raise QCoreError(
            f"gate of shape {gate.shape} does not act on {len(targets)} qubit(s)")
    _check_unitary(gate)
    return type(state)(state.num_qubits, _apply_operator(state, gate, targets))


def apply_kraus(rho: State, channel: KrausChannel, target: int) -> DensityMatrix:
    """rho -> sum_i E_i rho E_i^dagger on one qubit."""
    if not channel.is_complete():
        raise QCoreError("invalid channel")
    rho = _density(rho)
    (target,) = _check_targets([target], rho.num_qubits)
    out = sum(_apply_operator(rho, op, (target,)) for op in channel.operators)
    return DensityMatrix(rho.num_qubits, out)


def apply_correlated_kraus(rho: State, channel: KrausChannel,
                           target_groups: Sequence[Sequence[int]]) -> DensityMatrix:
    """Every qubit of a group is hit by the *same* Kraus operator.

    Each group contributes one summation index, ``sum_i (E_i x E_i ...) rho (...)^dagger``.
    For groups of two or more the map is not trace preserving, so the result
    is left unnormalized.
    """
    if not channel.is_complete():
        raise QCoreError("invalid channel")
    rho = _density(rho)
    groups = [_check_targets(g, rho.num_qubits) for g in target_groups]
    flat = [q for g in groups for q in g]
    if len(set(flat)) != len(flat):
        raise QCoreError("overlapping groups")
    m = rho
    for g in groups:
        out = 0
        for op in channel.operators:
            full = op
            for _ in g[1:]:
                full = np.kron(full, op)
            out = out + _apply_operator(m, full, g)
        m = DensityMatrix(rho.num_qubits, out)
    return m


@lru_cache(maxsize=None)
def _basis_change(basis: Basis, k: int) -> np.ndarray:
    """Unitary mapping the measured basis onto the computational one."""
    if basis is Basis.COMPUTATIONAL:
        return _frozen(np.eye(2 ** k))
    if basis is Basis.DIAGONAL:
        u = np.array([[1.0]])
        for _ in range(k):
            u = np.kron(u, H)
        return _frozen(u)
    if k != 2:
        raise QCoreError("Bell measurement needs exactly two targets")
    return _frozen(np.kron(H, np.eye(2)) @ CNOT)


def outcome_probabilities(state: State, targets: Sequence[int]) -> np.ndarray:
    """Born probabilities of computational outcomes on ``targets`` (normalized)."""
    n = state.num_qubits
    targets = _check_targets(targets, n)
    rest = tuple(q for q in range(n) if q not in targets)
    if isinstance(state, StateVector):
        p = np.abs(state.tensor()) ** 2
    else:
        p = np.real(np.diagonal(state.entries)).reshape([2] * n)
    p = np.transpose(p, targets + rest).reshape(2 ** len(targets), -1).sum(axis=1)
    p = np.clip(p, 0, None)
    total = p.sum()
    if total < MIN_BRANCH_PROB:
        raise ZeroProbabilityBranch(total)
    return p / total


def _projector_bits(state: State, targets: tuple, index: int) -> np.ndarray:
    k = len(targets)
    proj = np.zeros((2 ** k, 2 ** k))
    proj[index, index] = 1
    return _apply_operator(state, proj, targets)


def post_select(rho: State, targets: Sequence[int], outcome: str):
    """Project ``targets`` onto computational ``outcome`` and renormalize.

    Returns ``(state, probability)`` where the probability is the trace of the
    projected (unnormalized) operator, or the squared norm for a vector.
    """
    targets = _check_targets(targets, rho.num_qubits)
    if len(outcome) != len(targets) or set(outcome) - {"0", "1"}:
        raise QCoreError(f"bad outcome {outcome!r} for {len(targets)} target(s)")
    raw = _projector_bits(rho, targets, int(outcome, 2))
    if isinstance(rho, StateVector):
        prob = float(np.vdot(raw, raw).real)
        if prob < MIN_BRANCH_PROB:
            raise ZeroProbabilityBranch(prob)
        return StateVector(rho.num_qubits, raw / np.sqrt(prob)), prob
    prob = float(np.trace(raw).real)
    if prob < MIN_BRANCH_PROB:
        raise ZeroProbabilityBranch(prob)
    return DensityMatrix(rho.num_qubits, raw / prob), prob


def measure(state: State, targets: Sequence[int], basis: Basis | str,
            rng: np.random.Generator, *, forced: str | None = None):
    """Projective measurement sampled from ``rng``.

    ``forced`` selects a computational-outcome branch instead of sampling
    (the reported probability is still its Born probability).
    Returns ``(MeasurementRecord, post_state)``; the post-state keeps the
    measured qubits, collapsed onto the observed basis element.
    """
    from .bell import BellKind  # local import: bell builds on qcore

    basis = Basis(basis)
    targets = _check_targets(targets, state.num_qubits)
    k = len(targets)
    u = _basis_change(basis, k)
    rotated = state if basis is Basis.COMPUTATIONAL else type(state)(
        state.num_qubits, _apply_operator(state, u, targets))
    probs = outcome_probabilities(rotated, targets)
    if forced is None:
        index = int(rng.choice(len(probs), p=probs))
    else:
        index = int(forced, 2)
    bits = format(index, f"0{k}b")
    collapsed, _ = post_select(rotated, targets, bits)
    if basis is not Basis.COMPUTATIONAL:
        collapsed = type(state)(state.num_qubits,
                                _apply_operator(collapsed, u.conj().T, targets))
    outcome = BellKind.from_measurement_bits(bits) if basis is Basis.BELL else bits
    return MeasurementRecord(targets, basis, outcome, float(probs[index])), collapsed


def partial_trace(rho: State, keep: Sequence[int]) -> DensityMatrix:
    """Reduced operator on ``keep`` (in the listed order)."""
    if len(keep) == 0:
        raise QCoreError("keep list is empty")
    n = rho.num_qubits
    keep = _check_targets(keep, n)
    drop = [q for q in range(n) if q not in keep]
    k = len(keep)
    if isinstance(rho, StateVector):
        t = np.transpose(rho.tensor(), list(keep) + drop).reshape(2 ** k, -1)
        return DensityMatrix(k, t @ t.conj().T)
    t = rho.tensor()
    t = np.transpose(t, list(keep) + drop + [q + n for q in keep] + [q + n for q in drop])
    t = t.reshape(2 ** k, 2 ** len(drop), 2 ** k, 2 ** len(drop))
    return DensityMatrix(k, np.einsum("ajbj->ab", t))


def fidelity_with_pure(rho: State, target: StateVector) -> float:
    """<T|rho|T>, the squared Uhlmann fidelity against a pure target."""
    if rho.num_qubits != target.num_qubits:
        raise QCoreError("dimension mismatch")
    t = target.amplitudes
    if isinstance(rho, StateVector):
        return float(abs(np.vdot(t, rho.amplitudes)) ** 2)
    return float(np.vdot(t, rho.entries @ t).real)


def inverse_permutation(permutation: Sequence[int]) -> tuple:
    inv = [0] * len(permutation)
    for old, new in enumerate(permutation):
        inv[new] = old
    return tuple(inv)


def permute_qubits(state: State, permutation: Sequence[int]) -> State:
    """Move the qubit at position ``i`` to position ``permutation[i]``."""
    n = state.num_qubits
    perm = tuple(int(p) for p in permutation)
    if sorted(perm) != list(range(n)):
        raise QCoreError(f"{perm} is not a bijection on {n} qubits")
    source = inverse_permutation(perm)
    if isinstance(state, StateVector):
        return StateVector(n, np.transpose(state.tensor(), source).reshape(-1))
    axes = list(source) + [s + n for s in source]
    d = 2 ** n
    return DensityMatrix(n, np.transpose(state.tensor(), axes).reshape(d, d))


def global_phase_aligned(a: StateVector, b: StateVector) -> np.ndarray:
    """Amplitudes of ``a`` rotated by the phase that best matches ``b``."""
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return a.amplitudes * phase


def equal_up_to_phase(a: StateVector, b: StateVector, atol: float = ATOL) -> bool:
    if a.num_qubits != b.num_qubits:
        return False
    return bool(np.allclose(global_phase_aligned(a, b), b.amplitudes, atol=atol, rtol=0))


def equal_exact(a: StateVector, b: StateVector, atol: float = ATOL) -> bool:
    return a.num_qubits == b.num_qubits and bool(
        np.allclose(a.amplitudes, b.amplitudes, atol=atol, rtol=0))


def make_rng(seed: int | None = None) -> np.random.Generator:
    """The one seedable generator every sampling operation takes explicitly."""
    return np.random.default_rng(seed)


def split_rng(rng: np.random.Generator, n: int) -> list:
    return list(rng.spawn(n))
