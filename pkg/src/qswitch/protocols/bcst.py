"""Bidirectional controlled state teleportation with permutation of particles.

Charlie prepares 2n Bell pairs.  The first n carry Alice->Bob traffic, the
last n carry Bob->Alice traffic.  Bob's halves are permuted before they are
sent, so neither party can pair up qubits, or pick the right correction,
until Charlie discloses.
"""
from __future__ import annotations

import numpy as np

from ..bell import KIND_ORDER, BellKind, bell_state, correction_for, sender_operation
from ..qcore import Basis, QCoreError, haar_qubit
from ..transcript import ProtocolTranscript, Transcript
from .disclosure import Direction, DisclosurePolicy, map_kind
from .register import Network, apply_permutation, random_permutation

UNIFORM = (0.25, 0.25, 0.25, 0.25)


def _policies(disclosure) -> dict:
    """Accepts a dict ``{direction: policy}``, a list of policies, or a shorthand
    string "both" / "none" / "AliceToBob" / "BobToAlice"."""
    if isinstance(disclosure, str):
        key = disclosure.lower()
        if key == "both":
            chosen = set(Direction)
        elif key == "none":
            chosen = set()
        else:
            chosen = {Direction.parse(disclosure)}
        return {d: DisclosurePolicy.full(d) if d in chosen else DisclosurePolicy.nothing(d)
                for d in Direction}
    if isinstance(disclosure, dict):
        items = list(disclosure.values())
    else:
        items = list(disclosure)
    out = {p.direction: p for p in items}
    for d in Direction:
        out.setdefault(d, DisclosurePolicy.nothing(d))
    return out


def _believed_kind(policy: DisclosurePolicy, disclosed: BellKind) -> BellKind:
    if policy.bell_info == "full":
        return disclosed
    if policy.bell_info == "distribution":
        return map_kind(policy.distribution)
    return map_kind(UNIFORM)


def bcst_run(n: int, disclosure, rng: np.random.Generator, *, inputs: dict | None = None,
             controllers: int = 1, bell_kinds=None, forced_outcomes: dict | None = None
             ) -> ProtocolTranscript:
    """Run BCST once.

    ``inputs`` maps each direction to n single-qubit states (Haar random when
    omitted).  ``bell_kinds`` fixes the 2n prepared kinds and
    ``forced_outcomes`` fixes each sender's n measurement outcomes; both are
    for exhaustive testing.  Per-direction mean fidelities land in
    ``transcript.fidelities``.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise QCoreError(f"n must be a positive integer, got {n!r}")
    if controllers not in (1, 2):
        raise QCoreError("controllers must be 1 or 2")
    n = int(n)
    policies = _policies(disclosure)

    inputs = {Direction.parse(k): list(v) for k, v in (inputs or {}).items()}
    for d in Direction:
        if d not in inputs:
            inputs[d] = [haar_qubit(rng) for _ in range(n)]
        if len(inputs[d]) != n or any(s.num_qubits != 1 for s in inputs[d]):
            raise QCoreError(f"{d.value} needs {n} single-qubit inputs")
    forced = {Direction.parse(k): list(v) for k, v in (forced_outcomes or {}).items()}

    if bell_kinds is None:
        kinds = [KIND_ORDER[int(k)] for k in rng.integers(0, 4, size=2 * n)]
    else:
        kinds = [BellKind.parse(k) for k in bell_kinds]
        if len(kinds) != 2 * n:
            raise QCoreError(f"bell_kinds needs {2 * n} entries")

    names = ["Charlie", "Alice", "Bob"] + (["Charlie2"] if controllers == 2 else [])
    log = Transcript()
    net = Network(names, log)

    # Step 1: preparation.  With two controllers Charlie2 owns the Bob->Alice half.
    owner = ["Charlie"] * n + (["Charlie2"] if controllers == 2 else ["Charlie"]) * n
    pairs = [net.prepare(owner[i], bell_state(kinds[i])) for i in range(2 * n)]
    for who in dict.fromkeys(owner):
        log.add("S1", who, "prepare", {"pairs": owner.count(who)})
    p_a1 = [pairs[i][0] for i in range(n)]
    p_b1 = [pairs[i][1] for i in range(n)]
    p_a2 = [pairs[n + i][0] for i in range(n)]
    p_b2 = [pairs[n + i][1] for i in range(n)]

    # Step 2: permute Bob's sequences and distribute.
    pi1 = random_permutation(n, rng)
    pi2 = random_permutation(n, rng)
    sent_b1 = apply_permutation(p_b1, pi1)
    sent_b2 = apply_permutation(p_b2, pi2)
    log.add("S2", owner[0], "permute", {"sequence": "P_B1"})
    log.add("S2", owner[-1], "permute", {"sequence": "P_B2"})
    net.send("S2", owner[0], "Alice", "P_A1", p_a1)
    net.send("S2", owner[0], "Bob", "P_B1", sent_b1)
    net.send("S2", owner[-1], "Alice", "P_A2", p_a2)
    net.send("S2", owner[-1], "Bob", "P_B2", sent_b2)
    net.deliver("S2")
    got_b1 = net.parties["Bob"].sequences["P_B1"]
    got_b2 = net.parties["Bob"].sequences["P_B2"]

    # Step 3: both senders run the teleportation measurement.
    def send_all(direction, sender, receiver, channel_qubits):
        outcomes = []
        for j in range(n):
            (u,) = net.prepare(sender, inputs[direction][j])
            net.apply(sender, sender_operation(), [u, channel_qubits[j]])
            f = forced.get(direction)
            rec = net.measure(sender, [u, channel_qubits[j]], Basis.COMPUTATIONAL, rng,
                              forced=None if f is None else f[j])
            outcomes.append(rec.outcome)
        net.announce("S3", sender, "announce_smo", {"to": receiver, "smo": outcomes})
        return outcomes

    smo_ab = send_all(Direction.ALICE_TO_BOB, "Alice", "Bob", p_a1)
    smo_ba = send_all(Direction.BOB_TO_ALICE, "Bob", "Alice", got_b2)

    # Step 4: disclosure, per direction.
    def disclose(direction, controller, receiver, part, perm):
        policy = policies[direction]
        payload = {"direction": direction.value, "to": receiver}
        if policy.bell_info == "full":
            payload["bell"] = [k.label for k in part]
        elif policy.bell_info == "distribution":
            payload["distribution"] = list(policy.distribution)
        if policy.reveal_permutation:
            payload["permutation"] = list(perm)
        net.announce("S4", controller, "disclose", payload)

    disclose(Direction.ALICE_TO_BOB, owner[0], "Bob", kinds[:n], pi1)
    disclose(Direction.BOB_TO_ALICE, owner[-1], "Alice", kinds[n:], pi2)

    # Step 5: reconstruction.  Without the permutation the receiver guesses a pairing.
    fidelities = {}

    def reconstruct(direction, receiver, smo, true_slot, qubits, kind_of):
        """``true_slot[j]`` is where item j really arrived; ``kind_of(j, slot)``
        is the disclosed kind the receiver reads for it."""
        policy = policies[direction]
        slots = true_slot if policy.reveal_permutation else random_permutation(n, rng)
        values, corrections = [], []
        for j in range(n):
            qubit = qubits[slots[j]]
            fix = correction_for(smo[j], _believed_kind(policy, kind_of(j, slots[j])))
            net.apply(receiver, fix.matrix, [qubit])
            values.append(net.register.fidelity(qubit, inputs[direction][j]))
            corrections.append(fix.value)
        log.add("S5", receiver, "correct", {"direction": direction.value,
                                            "paulis": corrections})
        fidelities[direction.value] = values
        return list(slots) == list(true_slot)

    # Bob's j-th teleport used got_b2[j], i.e. pair n + inv2[j], whose other half
    # is Alice's p_a2[inv2[j]].  Alice's own sequences are never permuted.
    inv2 = [0] * n
    for j, p in enumerate(pi2):
        inv2[p] = j
    pairing_ab = reconstruct(Direction.ALICE_TO_BOB, "Bob", smo_ab, pi1, got_b1,
                             lambda j, slot: kinds[j])
    pairing_ba = reconstruct(Direction.BOB_TO_ALICE, "Alice", smo_ba, inv2, p_a2,
                             lambda j, slot: kinds[n + slot])

    log.results["pairing_correct"] = {Direction.ALICE_TO_BOB.value: pairing_ab,
                                      Direction.BOB_TO_ALICE.value: pairing_ba}
    log.results["per_input_fidelity"] = fidelities
    log.results["smo"] = {Direction.ALICE_TO_BOB.value: smo_ab,
                          Direction.BOB_TO_ALICE.value: smo_ba}
    for key, values in fidelities.items():
        log.fidelities[key] = float(np.mean(values))
    return log.finish()
