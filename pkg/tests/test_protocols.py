import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qswitch import qcore
from qswitch.bell import KIND_ORDER, MESSAGES, BellKind, bell_state, dense_decode, dense_encode
from qswitch.protocols import (DecoySet, Direction, DisclosurePolicy, Network, QubitRegister,
                               apply_permutation, bcst_run, cqd_run, cqka_run, cqkd_run,
                               cqsdc_run, entropy_bits, info_revealed, map_kind,
                               partial_disclosure_fidelity, random_permutation)
from qswitch.qcore import QCoreError, ket
from qswitch.transcript import ABORT, SUCCESS, Transcript, parse_text

import oracles

rng_of = qcore.make_rng


# -- register and network -------------------------------------------------------------------

def test_register_merge_and_measure():
    reg = QubitRegister()
    a = reg.prepare(bell_state(BellKind.PSI_PLUS))
    b = reg.prepare(ket("0"))
    assert sorted(reg.block_sizes()) == [1, 2]
    reg.apply(qcore.CNOT, [a[1], b[0]])
    assert sorted(reg.block_sizes()) == [3]
    rec = reg.measure([a[0]], qcore.Basis.COMPUTATIONAL, rng_of(0))
    assert a[0] not in reg
    rho = reg.density([a[1], b[0]])
    bit = int(rec.outcome)
    assert rho.entries[3 * bit, 3 * bit].real == pytest.approx(1)


def test_register_state_matches_statevector_ops():
    reg = QubitRegister()
    q = reg.prepare(ket("00")) + reg.prepare(qcore.PLUS)
    reg.apply(qcore.CNOT, [q[2], q[0]])
    direct = qcore.apply_unitary(qcore.tensor([ket("00"), qcore.PLUS]), qcore.CNOT, [2, 0])
    assert qcore.equal_exact(reg.state(q), direct)


def test_register_errors():
    reg = QubitRegister()
    q = reg.prepare(ket("01"))
    with pytest.raises(QCoreError):
        reg.apply(qcore.CNOT, [q[0], q[0]])
    reg.measure([q[0]], "computational", rng_of(0))
    with pytest.raises(QCoreError):
        reg.apply(qcore.H, [q[0]])


def test_custody_is_enforced():
    net = Network(["Alice", "Bob"], Transcript())
    (q,) = net.prepare("Alice", ket("0"))
    with pytest.raises(QCoreError):
        net.apply("Bob", qcore.H, [q])
    net.send("S1", "Alice", "Bob", "Q", [q])
    with pytest.raises(QCoreError):
        net.apply("Alice", qcore.H, [q])     # in the channel, nobody holds it
    net.deliver("S1")
    net.apply("Bob", qcore.H, [q])
    assert net.holder[q] == "Bob"


def test_network_hook_sees_transit():
    seen = []

    def hook(net, transit, log):
        seen.append((transit.leg, len(transit.qids)))
        return transit.qids

    net = Network(["Alice", "Bob"], Transcript(), {"Alice->Bob": hook})
    qs = net.prepare("Alice", ket("000"))
    net.send("S1", "Alice", "Bob", "Q", qs)
    net.deliver("S1")
    assert seen == [("Alice->Bob", 3)]


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_permutation_bijection(n, seed):
    perm = random_permutation(n, rng_of(seed))
    assert sorted(perm) == list(range(n))
    moved = apply_permutation(list(range(n)), perm)
    inv = qcore.inverse_permutation(perm)
    assert apply_permutation(moved, inv) == list(range(n))


# -- transcripts -------------------------------------------------------------------------------

def test_transcript_abort_and_serialization():
    log = Transcript()
    log.add("S1", "Alice", "hello", {"x": 1})
    log.results["secret"] = "1010"
    log.abort("S5", "Bob", "error rate above threshold")
    t = log.finish()
    assert t.outcome == ABORT and t.abort_step == "S5" and dict(t.results) == {}
    rows = parse_text(t.serialize("text"))
    assert [r["seq"] for r in rows[:-1]] == [0, 1]
    assert rows[-1]["payload"]["outcome"] == ABORT
    with pytest.raises(RuntimeError):
        log.add("S6", "Alice", "late", {})


# -- BCST ----------------------------------------------------------------------------------------

def test_bcst_full_disclosure():
    for seed in range(5):
        t = bcst_run(1, "both", rng_of(seed))
        assert t.outcome == SUCCESS
        for d in Direction:
            assert t.fidelities[d.value] == pytest.approx(1, abs=1e-10)


def test_bcst_pairing_restored():
    t = bcst_run(4, "both", rng_of(3))
    assert all(t.results["pairing_correct"].values())
    assert all(f == pytest.approx(1) for v in t.results["per_input_fidelity"].values() for f in v)


@pytest.mark.parametrize("kinds", [("00", "11"), ("10", "01"), ("11", "11")])
def test_bcst_forced_outcomes_and_kinds(kinds):
    for smo_a, smo_b in itertools.product(MESSAGES, repeat=2):
        t = bcst_run(1, "both", rng_of(0), bell_kinds=kinds,
                     forced_outcomes={"AliceToBob": [smo_a], "BobToAlice": [smo_b]})
        assert t.results["smo"] == {"AliceToBob": [smo_a], "BobToAlice": [smo_b]}
        assert min(t.fidelities.values()) == pytest.approx(1, abs=1e-10)


def test_bcst_two_controllers():
    t = bcst_run(2, "both", rng_of(5), controllers=2)
    assert {e.actor for e in t.find("prepare")} == {"Charlie", "Charlie2"}
    assert min(t.fidelities.values()) == pytest.approx(1)
    with pytest.raises(QCoreError):
        bcst_run(2, "both", rng_of(5), controllers=3)


def test_bcst_bad_n():
    for n in (0, -1, 1.5, True):
        with pytest.raises(QCoreError):
            bcst_run(n, "both", rng_of(0))


def test_bcst_single_direction():
    rng = rng_of(8)
    other = []
    for _ in range(1500):
        t = bcst_run(1, "AliceToBob", rng)
        assert t.fidelities["AliceToBob"] == pytest.approx(1)
        other.append(t.fidelities["BobToAlice"])
    assert abs(np.mean(other) - oracles.UNDISCLOSED_FIDELITY) < 0.03


def test_bcst_permutation_hidden_kinds_shown():
    # kinds disclosed but not the permutation: wrong pairings lose fidelity for n > 1
    policy = [DisclosurePolicy(d, "full", None, False) for d in Direction]
    rng = rng_of(2)
    f = [bcst_run(4, policy, rng).fidelities["AliceToBob"] for _ in range(200)]
    assert np.mean(f) < 0.9


def test_bcst_transcript_is_deterministic():
    a = bcst_run(3, "none", rng_of(11)).serialize("json")
    b = bcst_run(3, "none", rng_of(11)).serialize("json")
    assert a == b


# -- disclosure ------------------------------------------------------------------------------------

def test_entropy_examples():
    assert entropy_bits([0.25] * 4) == pytest.approx(2.0)
    assert info_revealed([0.25] * 4) == pytest.approx(0.0)
    assert entropy_bits([1, 0, 0, 0]) == 0.0
    assert info_revealed([1, 0, 0, 0]) == 2.0
    dist = (1 / 3, 1 / 3, 1 / 6, 1 / 6)
    assert entropy_bits(dist) == pytest.approx(oracles.ENTROPY_1_3, abs=1e-12)
    assert info_revealed(dist) == pytest.approx(oracles.REVEALED_1_3, abs=1e-12)
    with pytest.raises(QCoreError, match="negative probabilities"):
        entropy_bits([1.2, -0.2, 0, 0])
    with pytest.raises(QCoreError):
        entropy_bits([0.5, 0.5, 0.5, 0])


def test_map_kind_ties():
    assert map_kind([0.25] * 4) is BellKind.PSI_PLUS
    assert map_kind([0.1, 0.4, 0.4, 0.1]) is BellKind.PSI_MINUS
    assert map_kind([0, 0, 0, 1]) is BellKind.PHI_MINUS


def test_partial_disclosure_point_mass():
    assert partial_disclosure_fidelity([0, 0, 1, 0], rng_of(0), samples=200) == pytest.approx(1)


def test_partial_disclosure_uniform_and_skewed():
    f = partial_disclosure_fidelity([0.25] * 4, rng_of(1), samples=8000)
    assert abs(f - 0.5) < 0.02
    g = partial_disclosure_fidelity((1 / 3, 1 / 3, 1 / 6, 1 / 6), rng_of(2), samples=8000)
    assert 0.5 < g < 1
    assert abs(g - (1 / 3 + 2 / 3 / 3)) < 0.02


def test_partial_disclosure_monotone_along_majorization_chain():
    chain = [(0.25, 0.25, 0.25, 0.25), (0.4, 0.2, 0.2, 0.2), (0.55, 0.15, 0.15, 0.15),
             (0.7, 0.1, 0.1, 0.1), (1.0, 0.0, 0.0, 0.0)]
    rng = rng_of(4)
    values = [partial_disclosure_fidelity(p, rng, samples=3000) for p in chain]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_disclosure_policy_validation():
    with pytest.raises(QCoreError):
        DisclosurePolicy("AliceToBob", "partial")
    with pytest.raises(QCoreError):
        DisclosurePolicy("AliceToBob", "distribution")
    assert Direction.parse("bob_to_alice") is Direction.BOB_TO_ALICE


# -- decoys ----------------------------------------------------------------------------------------

def test_decoy_set_invariants():
    d = DecoySet.draw(6, 4, rng_of(0))
    assert len(d.positions) == 6 and d.length == 10
    assert all(a < b for a, b in zip(d.positions, d.positions[1:]))
    with pytest.raises(QCoreError):
        DecoySet(("0", "1"), (3, 3), 5)
    with pytest.raises(QCoreError):
        DecoySet(("0",), (5,), 5)
    with pytest.raises(QCoreError):
        DecoySet(("y",), (0,), 5)


# -- CQD family ------------------------------------------------------------------------------------

def test_cqd_random_messages():
    rng = rng_of(0)
    for _ in range(5):
        a = "".join(str(b) for b in rng.integers(0, 2, 8))
        b = "".join(str(b) for b in rng.integers(0, 2, 8))
        t = cqd_run(4, a, b, rng)
        assert t.ok
        assert t.results["bob_decoded"] == a and t.results["alice_decoded"] == b


@pytest.mark.parametrize("initial", KIND_ORDER)
def test_cqd_all_op_pairs(initial):
    for i, (ma, mb) in enumerate(itertools.product(MESSAGES, repeat=2)):
        t = cqd_run(1, ma, mb, rng_of(i), initial=initial)
        assert t.results == {"bob_decoded": ma, "alice_decoded": mb}


def test_cqd_withheld_order_degrades():
    rng = rng_of(1)
    n, runs, right = 16, 60, 0
    for _ in range(runs):
        msg = "".join(str(b) for b in rng.integers(0, 2, 2 * n))
        t = cqd_run(n, msg, "0" * 2 * n, rng, withhold_sequence=True)
        got = t.results["bob_decoded"]
        right += sum(got[2 * i:2 * i + 2] == msg[2 * i:2 * i + 2] for i in range(n))
    assert abs(right / (runs * n) - oracles.withheld_accuracy(n)) < 0.05


def test_cqd_threshold_validation():
    with pytest.raises(QCoreError):
        cqd_run(1, "00", "00", rng_of(0), error_threshold=2)
    with pytest.raises(QCoreError):
        cqd_run(2, "00", "0000", rng_of(0))


def test_cqd_step_order():
    t = cqd_run(2, "0110", "1100", rng_of(3))
    steps = [e.step for e in t.events]
    order = ["S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "S9"]
    assert [s for s in dict.fromkeys(steps)] == order


def test_cqsdc_reduction():
    msg = "1011010011100001"
    t = cqsdc_run(msg, rng_of(5))
    assert t.results == {"bob_decoded": msg}
    ref = cqd_run(8, msg, "0" * 16, rng_of(5), bob_announces=False)
    assert ref.serialize() == t.serialize()
    assert not t.find("announce_bell")
    with pytest.raises(QCoreError):
        cqsdc_run("101", rng_of(0))


def test_cqkd_keys_match_and_are_balanced():
    rng = rng_of(6)
    bits = []
    for _ in range(40):
        t = cqkd_run(256, rng)
        assert t.results["key_alice"] == t.results["key_bob"]
        bits.append(t.results["key_alice"])
    s = "".join(bits)
    # monobit frequency test at significance 0.001
    n = len(s)
    stat = abs(s.count("1") - s.count("0")) / math.sqrt(n)
    assert math.erfc(stat / math.sqrt(2)) > 0.001
    assert n >= 10_000


def test_cqka_xor():
    t = cqka_run("1010", "0110", rng_of(0))
    assert t.results["key_alice"] == t.results["key_bob"] == "1100"
    assert t.results["agreed"]
    t = cqka_run("1101", "1101", rng_of(1))
    assert t.results["key_alice"] == "0000"
    a = cqka_run("110100", "011011", rng_of(2)).results["key_alice"]
    b = cqka_run("010100", "011011", rng_of(2)).results["key_alice"]
    assert sum(x != y for x, y in zip(a, b)) == 1
    with pytest.raises(QCoreError):
        cqka_run("10", "101", rng_of(0))


def _forced_abort_hook(net, transit, log):
    # replace every qubit in transit by |1>: the Z-basis |0> decoys now fail
    out = []
    for q in transit.qids:
        net.register.measure([q], "computational", rng_of(0))
        del net.holder[q]
        out.extend(net.prepare("Eve", ket("1")))
    return out


def test_abort_leaves_no_key_material():
    hooks = {"Bob->Alice": _forced_abort_hook}
    for run in (lambda: cqd_run(8, "0" * 16, "1" * 16, rng_of(0), hooks=hooks),
                lambda: cqkd_run(16, rng_of(0), hooks=hooks),
                lambda: cqka_run("1010" * 4, "0110" * 4, rng_of(0), hooks=hooks),
                lambda: cqsdc_run("10" * 8, rng_of(0), hooks=hooks)):
        t = run()
        assert t.outcome == ABORT and t.abort_step == "S5"
        assert dict(t.results) == {}
        abort_seq = t.find("abort")[0].seq
        assert not [e for e in t.events if e.seq > abort_seq]


def test_dense_decode_consistent_with_protocol_table():
    for k, m in itertools.product(KIND_ORDER, MESSAGES):
        assert dense_decode(k, dense_encode(k, m)) == m
