"""Attack models: intercept-resend Eve on decoy-guarded legs, and colluding Alice and Bob."""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import qcore
from .bell import MESSAGES, BellKind, bell_state, dense_encode
from .qcore import MINUS, PLUS, Basis, QCoreError, ket, partial_trace
from .protocols.bcst import bcst_run
from .protocols.cqd import DecoySet, check_decoys, insert_decoys
from .protocols.disclosure import Direction, DisclosurePolicy
from .protocols.register import Network
from .transcript import Transcript


class AttackKind(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept_resend"
    COLLUSION = "collusion"


class BasisStrategy(enum.Enum):
    RANDOM_ZX = "random_ZX"
    FIXED_Z = "fixed_Z"


@dataclass(frozen=True)
class AttackConfig:
    kind: AttackKind = AttackKind.INTERCEPT_RESEND
    basis_strategy: BasisStrategy = BasisStrategy.RANDOM_ZX
    attack_fraction: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        object.__setattr__(self, "basis_strategy", BasisStrategy(self.basis_strategy))
        f = float(self.attack_fraction)
        if not 0.0 <= f <= 1.0 or math.isnan(f):
            raise QCoreError(f"attack_fraction must lie in [0, 1], got {self.attack_fraction!r}")
        object.__setattr__(self, "attack_fraction", f)


@dataclass(frozen=True)
class EveRecord:
    leg: str
    index: int
    basis: str
    outcome: str


_EIGEN = {(Basis.COMPUTATIONAL, "0"): ket("0"), (Basis.COMPUTATIONAL, "1"): ket("1"),
          (Basis.DIAGONAL, "0"): PLUS, (Basis.DIAGONAL, "1"): MINUS}


def eve_intercept_resend(net: Network, qids: list, config: AttackConfig,
                         rng: np.random.Generator, *, leg: str = "") -> tuple:
    """Measure-and-resend on a qubit stream in transit.

    Each qubit is attacked with probability ``attack_fraction``; Eve measures
    it in Z (fixed_Z) or a uniformly random Z/X basis and sends on the
    eigenstate she saw.  Returns ``(new stream, records)``.
    """
    if config.kind is not AttackKind.INTERCEPT_RESEND or config.attack_fraction == 0:
        return list(qids), []
    out, records = [], []
    for i, q in enumerate(qids):
        if rng.random() >= config.attack_fraction:
            out.append(q)
            continue
        if config.basis_strategy is BasisStrategy.FIXED_Z:
            basis = Basis.COMPUTATIONAL
        else:
            basis = (Basis.COMPUTATIONAL, Basis.DIAGONAL)[int(rng.integers(0, 2))]
        rec = net.register.measure([q], basis, rng)
        del net.holder[q]
        (fresh,) = net.prepare("Eve", _EIGEN[basis, rec.outcome])
        out.append(fresh)
        records.append(EveRecord(leg, i, basis.value, rec.outcome))
    return out, records


class InterceptResend:
    """Channel hook for :class:`~qswitch.protocols.register.Network`; keeps Eve's records."""

    def __init__(self, config: AttackConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.records: list = []

    def __call__(self, net: Network, transit, log: Transcript) -> list:
        out, records = eve_intercept_resend(net, transit.qids, self.config, self.rng,
                                            leg=transit.leg)
        self.records.extend(records)
        log.add(transit.step, "Eve", "intercept_resend",
                {"leg": transit.leg, "intercepted": len(records),
                 "strategy": self.config.basis_strategy.value})
        return out


def attack_hooks(config: AttackConfig, rng: np.random.Generator,
                 legs=("Bob->Alice", "Alice->Bob")) -> tuple:
    """One shared hook on every listed leg; returns ``(hooks, hook)``."""
    hook = InterceptResend(config, rng)
    return {leg: hook for leg in legs}, hook


def decoy_detection_rate(trials: int, config: AttackConfig, rng: np.random.Generator, *,
                         mode: str = "announced") -> tuple:
    """Fraction of checked decoys that show an error under ``config``.

    Runs one decoy-check leg with ``2 * trials`` decoys, so half of them
    (``trials``) are checked.  Returns ``(rate, errors, checked)``.
    """
    log = Transcript()
    hooks, _ = attack_hooks(config, rng, legs=("Bob->Alice",))
    net = Network(["Bob", "Alice"], log, hooks)
    decoys = DecoySet.draw(2 * trials, 0, rng)
    net.send("S4", "Bob", "Alice", "R", insert_decoys(net, "Bob", [], decoys))
    net.deliver("S4")
    check_decoys(net, "S5", "Bob", "Alice", net.parties["Alice"].sequences["R"], decoys, rng,
                 mode=mode, threshold=1.0)
    stats = log.events[-1].payload
    return stats["rate"], stats["errors"], stats["checked"]


def _entropy(counts: Counter, total: int) -> float:
    return -sum(c / total * math.log2(c / total) for c in counts.values() if c)


def eve_information_gain(records, truth) -> float:
    """Plug-in mutual information (bits) between Eve's observations and the symbols.

    ``records`` and ``truth`` are aligned sequences of hashable items.  The
    plug-in estimate is biased upward by roughly (|X|-1)(|Y|-1) / (2 N ln 2).
    """
    records, truth = list(records), list(truth)
    if len(records) != len(truth):
        raise QCoreError("records and truth must be aligned")
    total = len(truth)
    if total == 0:
        return 0.0
    joint = Counter(zip(records, truth))
    return max(0.0, _entropy(Counter(records), total) + _entropy(Counter(truth), total)
               - _entropy(joint, total))


def travel_marginal(initial: BellKind, symbol: str) -> qcore.DensityMatrix:
    """Reduced state of the travel qubit after dense-coding ``symbol``."""
    return partial_trace(bell_state(dense_encode(initial, symbol)), [1])


def symbol_information(samples: int, rng: np.random.Generator, *,
                       initial=BellKind.PHI_PLUS, access: str = "travel") -> float:
    """Information Eve gets about uniformly drawn dense-coding symbols.

    ``access="travel"``: she measures the travel qubit alone in a random Z/X
    basis.  ``access="pair"``: she holds both qubits with the pairing known
    and performs a Bell measurement.
    """
    initial = BellKind.parse(initial)
    if access not in ("travel", "pair"):
        raise QCoreError("access must be 'travel' or 'pair'")
    records, truth = [], []
    for s in rng.integers(0, 4, size=samples):
        symbol = MESSAGES[int(s)]
        state = bell_state(dense_encode(initial, symbol))
        if access == "pair":
            rec, _ = qcore.measure(state, [0, 1], Basis.BELL, rng)
            records.append(rec.outcome.label)
        else:
            basis = (Basis.COMPUTATIONAL, Basis.DIAGONAL)[int(rng.integers(0, 2))]
            rec, _ = qcore.measure(state, [1], basis, rng)
            records.append((basis.value, rec.outcome))
        truth.append(symbol)
    return eve_information_gain(records, truth)


def collusion_game(n: int, rng: np.random.Generator, *, samples: int = 100_000,
                   give_records: bool = False) -> float:
    """Mean fidelity Alice and Bob reach while trying to bypass Charlie.

    They pool everything they hold but not Charlie's permutations or Bell
    records, so they guess a pairing uniformly and correct for the MAP kind
    under a uniform prior.  ``give_records`` hands them Charlie's records
    (the honest run, as a control).  ``samples`` counts teleported inputs,
    both directions together.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise QCoreError("n must be a positive integer")
    if give_records:
        policy = [DisclosurePolicy.full(d) for d in Direction]
    else:
        policy = [DisclosurePolicy.nothing(d) for d in Direction]
    runs = max(1, -(-samples // (2 * n)))
    total = 0.0
    for _ in range(runs):
        t = bcst_run(int(n), policy, rng)
        total += sum(sum(v) for v in t.results["per_input_fidelity"].values())
    return total / (runs * 2 * n)


def direction_fidelity(n: int, disclosed: str, rng: np.random.Generator, *,
                       samples: int = 100_000) -> dict:
    """Mean per-direction fidelities when Charlie discloses only ``disclosed``."""
    runs = max(1, -(-samples // n))
    sums = {d.value: 0.0 for d in Direction}
    for _ in range(runs):
        t = bcst_run(n, disclosed, rng)
        for d, v in t.results["per_input_fidelity"].items():
            sums[d] += sum(v)
    return {d: s / (runs * n) for d, s in sums.items()}


__all__ = ["AttackKind", "BasisStrategy", "AttackConfig", "EveRecord", "eve_intercept_resend",
           "InterceptResend", "attack_hooks", "decoy_detection_rate", "eve_information_gain",
           "travel_marginal", "symbol_information", "collusion_game", "direction_fidelity"]
