"""Controlled quantum dialogue and the protocols it reduces to.

Charlie prepares n copies of one Bell state and permutes the home halves
(P_B1).  The travel halves (P_B2) make a round trip Bob -> Alice -> Bob,
with each party dense-coding two bits per qubit and each leg guarded by
decoy qubits.  Once Charlie announces the order, Bob can Bell-measure
matching pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bell import MESSAGES, BellKind, bell_state, dense_decode, dense_encode, ENCODING
from ..qcore import MINUS, PLUS, Basis, QCoreError, ket
from ..transcript import ProtocolTranscript, Transcript
from .register import Network, apply_permutation, random_permutation

DEFAULT_THRESHOLD = 0.11
DECOY_STATES = ("0", "1", "+", "-")
_DECOY_VECTORS = {"0": ket("0"), "1": ket("1"), "+": PLUS, "-": MINUS}
_DECOY_BASIS = {"0": Basis.COMPUTATIONAL, "1": Basis.COMPUTATIONAL,
                "+": Basis.DIAGONAL, "-": Basis.DIAGONAL}
_DECOY_BIT = {"0": "0", "1": "1", "+": "0", "-": "1"}
CHECK_MODES = ("announced", "random")


@dataclass(frozen=True)
class DecoySet:
    """Decoy states and their (sorted) positions inside the enlarged sequence."""

    states: tuple
    positions: tuple
    length: int

    def __post_init__(self):
        if len(self.states) != len(self.positions):
            raise QCoreError("one position per decoy state")
        if any(s not in DECOY_STATES for s in self.states):
            raise QCoreError(f"decoy states must come from {DECOY_STATES}")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise QCoreError("decoy positions must be strictly increasing")
        if self.positions and not (0 <= self.positions[0] and self.positions[-1] < self.length):
            raise QCoreError("decoy position outside the enlarged sequence")

    @classmethod
    def draw(cls, count: int, carried: int, rng: np.random.Generator) -> "DecoySet":
        states = tuple(DECOY_STATES[int(i)] for i in rng.integers(0, 4, size=count))
        positions = tuple(int(p) for p in np.sort(rng.choice(count + carried, size=count,
                                                             replace=False)))
        return cls(states, positions, count + carried)


def insert_decoys(net: Network, owner: str, carried: list, decoys: DecoySet) -> list:
    """Prepare the decoy qubits and splice them into ``carried``."""
    enlarged, it = [], iter(carried)
    slots = dict(zip(decoys.positions, decoys.states))
    for i in range(decoys.length):
        if i in slots:
            enlarged.extend(net.prepare(owner, _DECOY_VECTORS[slots[i]]))
        else:
            enlarged.append(next(it))
    return enlarged


def check_decoys(net: Network, step: str, sender: str, verifier: str, received: list,
                 decoys: DecoySet, rng: np.random.Generator, *, mode: str = "announced",
                 threshold: float = DEFAULT_THRESHOLD) -> tuple:
    """Eavesdropping check on one leg.

    The verifier measures a random half (rounded down) of the decoys.  In
    "announced" mode the sender first reveals the preparation basis of each
    checked decoy.  In "random" mode the verifier picks Z or X at random and
    only matching bases are compared afterwards.  Unchecked decoys are dropped.
    Returns ``(passed, carried qubits, error_rate)``.
    """
    if mode not in CHECK_MODES:
        raise QCoreError(f"check mode must be one of {CHECK_MODES}")
    net.announce(step, sender, "disclose_decoy_positions", {"positions": list(decoys.positions)})
    k = len(decoys.positions) // 2
    chosen = sorted(int(i) for i in rng.choice(len(decoys.positions), size=k, replace=False))
    net.announce(step, verifier, "select_checks", {"indices": chosen})

    if mode == "announced":
        bases = [_DECOY_BASIS[decoys.states[i]] for i in chosen]
        net.announce(step, sender, "announce_bases", {"bases": [b.value for b in bases]})
    else:
        bases = [(Basis.COMPUTATIONAL, Basis.DIAGONAL)[int(b)]
                 for b in rng.integers(0, 2, size=k)]
    outcomes = [net.measure(verifier, [received[decoys.positions[i]]], b, rng).outcome
                for i, b in zip(chosen, bases)]
    net.announce(step, verifier, "announce_outcomes",
                 {"bases": [b.value for b in bases], "outcomes": outcomes})
    if mode == "random":
        net.announce(step, sender, "announce_bases",
                     {"bases": [_DECOY_BASIS[decoys.states[i]].value for i in chosen]})

    compared = errors = 0
    for i, b, out in zip(chosen, bases, outcomes):
        state = decoys.states[i]
        if b is _DECOY_BASIS[state]:
            compared += 1
            errors += out != _DECOY_BIT[state]
    rate = errors / compared if compared else 0.0

    checked = set(chosen)
    for i, pos in enumerate(decoys.positions):
        if i not in checked:
            net.discard(verifier, received[pos])
    net.log.add(step, sender, "error_rate", {"checked": compared, "errors": errors,
                                            "rate": rate, "threshold": threshold})
    drop = set(decoys.positions)
    carried = [q for i, q in enumerate(received) if i not in drop]
    return rate <= threshold, carried, rate


def _symbols(message: str, n: int, who: str) -> list:
    if len(message) != 2 * n or set(message) - {"0", "1"}:
        raise QCoreError(f"{who}'s message must be {2 * n} bits, got {message!r}")
    return [message[2 * i:2 * i + 2] for i in range(n)]


def cqd_run(n: int, alice_msg: str, bob_msg: str, rng: np.random.Generator, *,
            initial=BellKind.PHI_PLUS, error_threshold: float = DEFAULT_THRESHOLD,
            hooks: dict | None = None, withhold_sequence: bool = False,
            check_mode: str = "announced", bob_announces: bool = True) -> ProtocolTranscript:
    """One CQD session carrying ``n`` two-bit symbols each way.

    ``hooks`` maps channel legs ("Charlie->Bob", "Bob->Alice", "Alice->Bob")
    to adversary callables.  On success ``results`` holds what Bob decoded of
    Alice's message and, when Bob announces his Bell outcomes, what Alice
    decoded of Bob's.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise QCoreError(f"n must be a positive integer, got {n!r}")
    if not 0 <= error_threshold <= 1:
        raise QCoreError("error_threshold must lie in [0, 1]")
    n = int(n)
    initial = BellKind.parse(initial)
    a_sym = _symbols(alice_msg, n, "Alice")
    b_sym = _symbols(bob_msg, n, "Bob")

    log = Transcript()
    net = Network(["Charlie", "Alice", "Bob"], log, hooks)

    # Step 1-2: Charlie prepares, permutes the home halves and sends both to Bob.
    pairs = [net.prepare("Charlie", bell_state(initial)) for _ in range(n)]
    log.add("S1", "Charlie", "prepare", {"pairs": n, "bell": initial.label})
    p_b1 = [p[0] for p in pairs]
    p_b2 = [p[1] for p in pairs]
    perm = random_permutation(n, rng)
    log.add("S2", "Charlie", "permute", {"sequence": "P_B1"})
    net.send("S2", "Charlie", "Bob", "P_B1", apply_permutation(p_b1, perm))
    net.send("S2", "Charlie", "Bob", "P_B2", p_b2)
    net.deliver("S2")
    home = net.parties["Bob"].sequences["P_B1"]
    travel = net.parties["Bob"].sequences["P_B2"]

    # Step 3: Bob encodes on the travel qubits.
    for q, m in zip(travel, b_sym):
        net.apply("Bob", ENCODING[m].matrix, [q])
    log.add("S3", "Bob", "encode", {"symbols": n})

    # Step 4-5: decoys Bob -> Alice, then the check.
    decoys = DecoySet.draw(n, n, rng)
    net.send("S4", "Bob", "Alice", "R_B2", insert_decoys(net, "Bob", travel, decoys))
    net.deliver("S4")
    ok, travel, _ = check_decoys(net, "S5", "Bob", "Alice", net.parties["Alice"].sequences["R_B2"],
                                 decoys, rng, mode=check_mode, threshold=error_threshold)
    if not ok:
        log.abort("S5", "Bob", "error rate above threshold")
        return log.finish()

    # Step 6-7: Alice encodes, decoys Alice -> Bob, then the check.
    for q, m in zip(travel, a_sym):
        net.apply("Alice", ENCODING[m].matrix, [q])
    log.add("S6", "Alice", "encode", {"symbols": n})
    decoys = DecoySet.draw(n, n, rng)
    net.send("S6", "Alice", "Bob", "R_B3", insert_decoys(net, "Alice", travel, decoys))
    net.deliver("S6")
    ok, travel, _ = check_decoys(net, "S7", "Alice", "Bob", net.parties["Bob"].sequences["R_B3"],
                                 decoys, rng, mode=check_mode, threshold=error_threshold)
    if not ok:
        log.abort("S7", "Alice", "error rate above threshold")
        return log.finish()

    # Step 8: Charlie announces the order (or withholds it; Bob then guesses).
    if withhold_sequence:
        log.add("S8", "Charlie", "withhold", {})
        order = random_permutation(n, rng)
    else:
        net.announce("S8", "Charlie", "announce_permutation", {"permutation": list(perm)})
        order = perm

    # Step 9: Bell measurements, announcement, decoding.
    measured = [net.measure("Bob", [home[order[j]], travel[j]], Basis.BELL, rng).outcome
                for j in range(n)]
    if bob_announces:
        net.announce("S9", "Bob", "announce_bell", {"outcomes": [k.label for k in measured]})
    bob_decoded = "".join(dense_decode(dense_encode(initial, b), k)
                          for b, k in zip(b_sym, measured))
    log.add("S9", "Bob", "decode", {"symbols": n})
    log.results["bob_decoded"] = bob_decoded
    if bob_announces:
        alice_decoded = "".join(dense_decode(dense_encode(initial, a), k)
                                for a, k in zip(a_sym, measured))
        log.add("S9", "Alice", "decode", {"symbols": n})
        log.results["alice_decoded"] = alice_decoded
    return log.finish()


def cqsdc_run(message: str, rng: np.random.Generator, **kwargs) -> ProtocolTranscript:
    """One-way secure direct communication Alice -> Bob: Bob encodes 00 and stays silent."""
    if len(message) % 2:
        raise QCoreError("message length must be even (two bits per qubit)")
    n = len(message) // 2
    return cqd_run(n, message, "0" * len(message), rng, bob_announces=False, **kwargs)


def _random_bits(length: int, rng: np.random.Generator) -> str:
    return "".join(str(int(b)) for b in rng.integers(0, 2, size=length))


def cqkd_run(key_length: int, rng: np.random.Generator, **kwargs) -> ProtocolTranscript:
    """Key distribution: Alice sends fresh random bits through CQSDC."""
    if key_length < 2 or key_length % 2:
        raise QCoreError("key length must be a positive even number of bits")
    key = _random_bits(key_length, rng)
    t = cqsdc_run(key, rng, **kwargs)
    if not t.ok:
        return t
    results = {"key_alice": key, "key_bob": t.results["bob_decoded"]}
    return _with_results(t, results)


def _xor(a: str, b: str) -> str:
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def cqka_run(k_a: str, k_b: str, rng: np.random.Generator, **kwargs) -> ProtocolTranscript:
    """Key agreement: a CQD exchange of kA and kB; both sides keep kA xor kB."""
    if len(k_a) != len(k_b):
        raise QCoreError("kA and kB must have equal length")
    if len(k_a) % 2:
        raise QCoreError("key length must be even (two bits per qubit)")
    t = cqd_run(len(k_a) // 2, k_a, k_b, rng, **kwargs)
    if not t.ok:
        return t
    key_alice = _xor(k_a, t.results["alice_decoded"])
    key_bob = _xor(t.results["bob_decoded"], k_b)
    return _with_results(t, {"key_alice": key_alice, "key_bob": key_bob,
                             "agreed": key_alice == key_bob})


def _with_results(t: ProtocolTranscript, extra: dict) -> ProtocolTranscript:
    return ProtocolTranscript(t.events, t.outcome, t.abort_step, t.fidelities,
                              {**t.results, **extra})
