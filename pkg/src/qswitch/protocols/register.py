"""Factorized qubit register plus the parties and channels of a protocol run.

The protocols here only ever entangle a handful of qubits at a time (Bell
pairs, a teleported qubit, entanglement swapping across two pairs), so the
global state is stored as a product of small pure blocks.  Blocks are merged
on demand and measured qubits are removed, which keeps every block at four
qubits or fewer while remaining exact.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .. import qcore
from ..bell import BellKind
from ..qcore import Basis, QCoreError, StateVector
from ..transcript import Transcript


class QubitRegister:
    """Product of small pure blocks, each stored as a raw ``[2]*k`` tensor."""

    def __init__(self):
        self._blocks: dict = {}   # block id -> (tensor, [qubit ids])
        self._where: dict = {}    # qubit id -> block id
        self._next_qubit = 0
        self._next_block = 0

    def __contains__(self, qid) -> bool:
        return qid in self._where

    def __len__(self) -> int:
        return len(self._where)

    def _new_block(self, tensor, qids) -> int:
        bid = self._next_block
        self._next_block += 1
        self._blocks[bid] = (tensor, qids)
        for q in qids:
            self._where[q] = bid
        return bid

    def prepare(self, state: StateVector) -> list:
        qids = list(range(self._next_qubit, self._next_qubit + state.num_qubits))
        self._next_qubit += state.num_qubits
        self._new_block(np.array(state.tensor(), dtype=complex), qids)
        return qids

    def _block_of(self, qid):
        try:
            return self._where[qid]
        except KeyError:
            raise QCoreError(f"qubit {qid} does not exist (measured or never prepared)") from None

    def _merge(self, qids) -> tuple:
        if len(set(qids)) != len(qids):
            raise QCoreError(f"duplicate qubits {list(qids)}")
        bids = list(dict.fromkeys(self._block_of(q) for q in qids))
        if len(bids) == 1:
            bid = bids[0]
        else:
            tensor, order = None, []
            for b in bids:
                t, qs = self._blocks.pop(b)
                tensor = t if tensor is None else np.multiply.outer(tensor, t)
                order.extend(qs)
            bid = self._new_block(tensor, order)
        order = self._blocks[bid][1]
        return bid, [order.index(q) for q in qids]

    def apply(self, gate, qids) -> None:
        gate = np.asarray(gate, dtype=complex)
        if gate.shape != (2 ** len(qids),) * 2:
            raise QCoreError(f"gate of shape {gate.shape} does not act on {len(qids)} qubit(s)")
        qcore._check_unitary(gate)
        bid, pos = self._merge(qids)
        tensor, order = self._blocks[bid]
        self._blocks[bid] = (qcore._apply_to_axes(tensor, gate, pos), order)

    def measure(self, qids, basis, rng, forced: str | None = None) -> qcore.MeasurementRecord:
        """Measure and consume ``qids``; returns the record with qubit ids as targets."""
        basis = Basis(basis)
        k = len(qids)
        if basis is Basis.BELL and k != 2:
            raise QCoreError("Bell measurement needs exactly two targets")
        if k == 1 and forced is None:
            bid = self._block_of(qids[0])
            tensor, order = self._blocks[bid]
            if len(order) == 1:
                return self._measure_lone(bid, tensor, qids[0], basis, rng)
        bid, pos = self._merge(qids)
        tensor, order = self._blocks.pop(bid)
        if basis is not Basis.COMPUTATIONAL:
            tensor = qcore._apply_to_axes(tensor, qcore._basis_change(basis, k), pos)
        rest_axes = [i for i in range(len(order)) if i not in pos]
        moved = np.transpose(tensor, list(pos) + rest_axes).reshape(2 ** k, -1)
        probs = np.einsum("ij,ij->i", moved, moved.conj()).real
        probs = probs / probs.sum()
        if forced is None:
            index = min(int(np.searchsorted(np.cumsum(probs), rng.random(), side="right")),
                        2 ** k - 1)
        else:
            if len(forced) != k or set(forced) - {"0", "1"}:
                raise QCoreError(f"bad forced outcome {forced!r}")
            index = int(forced, 2)
        p = float(probs[index])
        if p < qcore.MIN_BRANCH_PROB:
            raise qcore.ZeroProbabilityBranch(p)
        bits = format(index, f"0{k}b")
        for q in qids:
            del self._where[q]
        remaining = [order[i] for i in rest_axes]
        if remaining:
            rest = moved[index] / np.sqrt(p * np.vdot(moved, moved).real)
            self._blocks[bid] = (rest.reshape([2] * len(remaining)), remaining)
        outcome = BellKind.from_measurement_bits(bits) if basis is Basis.BELL else bits
        return qcore.MeasurementRecord(tuple(qids), basis, outcome, p)

    def _measure_lone(self, bid, amps, qid, basis, rng) -> qcore.MeasurementRecord:
        if basis is not Basis.COMPUTATIONAL:
            amps = qcore._basis_change(basis, 1) @ amps
        p0 = float(abs(amps[0]) ** 2 / (abs(amps[0]) ** 2 + abs(amps[1]) ** 2))
        bit = "0" if rng.random() < p0 else "1"
        del self._blocks[bid]
        del self._where[qid]
        return qcore.MeasurementRecord((qid,), basis, bit, p0 if bit == "0" else 1 - p0)

    def discard(self, qid) -> None:
        """Drop an unentangled qubit."""
        bid = self._block_of(qid)
        if len(self._blocks[bid][1]) != 1:
            raise QCoreError(f"qubit {qid} is entangled; measure it instead")
        del self._blocks[bid]
        del self._where[qid]

    def state(self, qids) -> StateVector:
        """Pure joint state of ``qids``; they must form whole blocks."""
        bids = list(dict.fromkeys(self._block_of(q) for q in qids))
        covered = [q for b in bids for q in self._blocks[b][1]]
        if sorted(covered) != sorted(qids):
            raise QCoreError("qubits are entangled with others; use density()")
        bid, pos = self._merge(qids)
        tensor = np.transpose(self._blocks[bid][0], pos)
        return StateVector(len(qids), tensor.reshape(-1))

    def fidelity(self, qid, target: StateVector) -> float:
        """<T|rho|T> for one qubit against a pure single-qubit target."""
        tensor, qs = self._blocks[self._block_of(qid)]
        t = target.amplitudes
        if len(qs) == 1:
            return float(abs(np.vdot(t, tensor)) ** 2)
        return float(np.vdot(t, self.density([qid]).entries @ t).real)

    def density(self, qids) -> qcore.DensityMatrix:
        """Reduced state of ``qids`` (blocks are independent, so reductions multiply)."""
        bids = list(dict.fromkeys(self._block_of(q) for q in qids))
        parts, order = [], []
        for b in bids:
            tensor, qs = self._blocks[b]
            mine = [q for q in qids if self._where[q] == b]
            keep = [qs.index(q) for q in mine]
            drop = [i for i in range(len(qs)) if i not in keep]
            t = np.transpose(tensor, keep + drop).reshape(2 ** len(keep), -1)
            parts.append(qcore.DensityMatrix(len(keep), t @ t.conj().T))
            order.extend(mine)
        rho = qcore.tensor_density(parts)
        if order == list(qids):
            return rho
        return qcore.permute_qubits(rho, [list(qids).index(q) for q in order])

    def block_sizes(self) -> list:
        return sorted(len(qs) for _, qs in self._blocks.values())


@dataclass
class Party:
    name: str
    sequences: dict = field(default_factory=dict)
    classical_log: list = field(default_factory=list)


@dataclass
class Transit:
    src: str
    dst: str
    label: str
    qids: list
    leg: str
    step: str = ""


class Network:
    """Parties, qubit custody and in-process channels for one protocol run.

    Quantum sends are queued and only move when :meth:`deliver` runs, so an
    adversary hook can act on the qubits in transit.  Hooks are keyed by leg
    name (``"Charlie->Bob"``, ``"Bob->Alice"`` ...) and called as
    ``hook(network, transit, log) -> new qubit ids``.
    """

    def __init__(self, names, log: Transcript, hooks: dict | None = None):
        self.register = QubitRegister()
        self.parties = {n: Party(n) for n in names}
        self.holder: dict = {}
        self.log = log
        self.hooks = dict(hooks or {})
        self._queue: deque = deque()

    def prepare(self, owner: str, state: StateVector) -> list:
        qids = self.register.prepare(state)
        for q in qids:
            self.holder[q] = owner
        return qids

    def check_custody(self, owner: str, qids) -> None:
        for q in qids:
            if self.holder.get(q) != owner:
                raise QCoreError(f"{owner} does not hold qubit {q} (held by {self.holder.get(q)})")

    def send(self, step: str, src: str, dst: str, label: str, qids) -> None:
        self.check_custody(src, qids)
        for q in qids:
            self.holder[q] = f"channel:{src}->{dst}"
        leg = f"{src}->{dst}"
        self._queue.append(Transit(src, dst, label, list(qids), leg, step))
        self.log.add(step, src, "send", {"to": dst, "sequence": label, "qubits": len(qids)})

    def deliver(self, step: str) -> dict:
        """Deliver everything queued; returns ``{label: qubit ids}`` as received."""
        received = {}
        while self._queue:
            transit = self._queue.popleft()
            hook = self.hooks.get(transit.leg)
            qids = transit.qids
            if hook is not None:
                qids = hook(self, transit, self.log)
            for q in qids:
                self.holder[q] = transit.dst
            self.parties[transit.dst].sequences[transit.label] = list(qids)
            received[transit.label] = list(qids)
            self.log.add(step, transit.dst, "receive",
                         {"from": transit.src, "sequence": transit.label, "qubits": len(qids)})
        return received

    def announce(self, step: str, src: str, action: str, payload: dict) -> None:
        for party in self.parties.values():
            if party.name != src:
                party.classical_log.append((step, src, action, payload))
        self.log.add(step, src, action, payload)

    def measure(self, owner: str, qids, basis, rng, forced=None) -> qcore.MeasurementRecord:
        self.check_custody(owner, qids)
        record = self.register.measure(qids, basis, rng, forced=forced)
        for q in qids:
            del self.holder[q]
        return record

    def apply(self, owner: str, gate, qids) -> None:
        self.check_custody(owner, qids)
        self.register.apply(gate, qids)

    def discard(self, owner: str, qid) -> None:
        self.check_custody(owner, [qid])
        self.register.discard(qid)
        del self.holder[qid]


def random_permutation(n: int, rng: np.random.Generator) -> tuple:
    """Uniform over S_n (Fisher-Yates via ``Generator.permutation``)."""
    return tuple(int(i) for i in rng.permutation(n))


def apply_permutation(seq, perm) -> list:
    """Element ``j`` of ``seq`` moves to position ``perm[j]``."""
    out = [None] * len(seq)
    for j, p in enumerate(perm):
        out[p] = seq[j]
    return out
