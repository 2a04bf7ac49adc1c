import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qswitch import qcore
from qswitch.bell import BellKind, bell_state
from qswitch.noise import kraus_ad, kraus_pd
from qswitch.qcore import (CNOT, H, MINUS, PLUS, Basis, DensityMatrix, KrausChannel,
                           PauliCode, QCoreError, StateVector, ZeroProbabilityBranch, ket)

import oracles

S = 1 / math.sqrt(2)
angles = st.floats(0, 2 * math.pi, allow_nan=False)


def rand_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector.from_amplitudes(v, normalize=True)


def rand_density(n, seed, rank=3):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2 ** n, rank)) + 1j * rng.normal(size=(2 ** n, rank))
    m = a @ a.conj().T
    return DensityMatrix(n, m / np.trace(m))


# -- types --------------------------------------------------------------------------

def test_state_vector_length_and_norm():
    with pytest.raises(QCoreError):
        StateVector(2, [1, 0, 0])
    with pytest.raises(QCoreError):
        StateVector(1, [1, 1])
    StateVector(1, [S, S])


def test_density_matrix_checks():
    with pytest.raises(QCoreError, match="Hermitian"):
        DensityMatrix(1, [[1, 1], [0, 0]])
    with pytest.raises(QCoreError):
        DensityMatrix(1, np.eye(4))
    with pytest.raises(QCoreError, match="positive"):
        DensityMatrix(1, np.diag([1.5, -0.5])).validate()
    DensityMatrix(1, np.eye(2) / 2).validate()


def test_pauli_matrices():
    assert np.array_equal(PauliCode.IY.matrix, [[0, 1], [-1, 0]])
    for p in PauliCode:
        m = p.matrix
        assert np.allclose(m @ m.conj().T, np.eye(2))
    assert PauliCode.parse("iy") is PauliCode.IY


def test_values_are_immutable():
    v = ket("01")
    with pytest.raises(ValueError):
        v.amplitudes[0] = 1


def test_measurement_record_checks():
    with pytest.raises(QCoreError):
        qcore.MeasurementRecord((0,), Basis.COMPUTATIONAL, "01", 0.5)
    with pytest.raises(QCoreError):
        qcore.MeasurementRecord((0,), Basis.COMPUTATIONAL, "0", 1.5)


# -- tensor ---------------------------------------------------------------------------

def test_tensor_examples():
    assert np.allclose(qcore.tensor([ket("0"), ket("0")]).amplitudes, [1, 0, 0, 0])
    psi = bell_state(BellKind.PSI_PLUS)
    amps = qcore.tensor([psi, psi]).amplitudes
    expected = np.zeros(16)
    expected[[0, 3, 12, 15]] = 0.5
    assert np.allclose(amps, expected)
    assert np.allclose(qcore.tensor([PLUS, MINUS]).amplitudes, [0.5, -0.5, 0.5, -0.5])
    with pytest.raises(QCoreError, match="no parts"):
        qcore.tensor([])


# -- unitaries ----------------------------------------------------------------------------

def test_apply_unitary_examples():
    phi = bell_state(BellKind.PHI_PLUS)
    x = qcore.apply_unitary(bell_state(BellKind.PHI_PLUS), PauliCode.X.matrix, [1])
    assert qcore.equal_up_to_phase(x, bell_state(BellKind.PSI_PLUS))
    y = qcore.apply_unitary(phi, PauliCode.IY.matrix, [1])
    assert qcore.equal_up_to_phase(y, bell_state(BellKind.PSI_MINUS))
    assert qcore.equal_exact(qcore.apply_unitary(phi, np.eye(2), [0]), phi)


def test_apply_unitary_errors():
    with pytest.raises(QCoreError):
        qcore.apply_unitary(ket("00"), np.eye(4), [0])
    with pytest.raises(QCoreError):
        qcore.apply_unitary(ket("00"), CNOT, [1, 1])
    with pytest.raises(QCoreError):
        qcore.apply_unitary(ket("00"), np.array([[1, 1], [0, 1]]), [0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.permutations([0, 1, 2]))
def test_apply_unitary_matches_kron_oracle(seed, targets):
    state = rand_state(3, seed)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    got = qcore.apply_unitary(state, q, targets[:2]).amplitudes
    want = oracles.embed(q, list(targets[:2]), 3) @ state.amplitudes
    assert np.allclose(got, want, atol=1e-12)
    rho = state.to_density()
    got_rho = qcore.apply_unitary(rho, q, targets[:2]).entries
    full = oracles.embed(q, list(targets[:2]), 3)
    assert np.allclose(got_rho, full @ rho.entries @ full.conj().T, atol=1e-12)


# -- Kraus -----------------------------------------------------------------------------------

def test_apply_kraus_examples():
    rho = rand_density(2, 3)
    assert np.allclose(qcore.apply_kraus(rho, kraus_ad(0), 1).entries, rho.entries)
    one = ket("1").to_density()
    assert np.allclose(qcore.apply_kraus(one, kraus_ad(1), 0).entries, ket("0").to_density().entries)
    plus = PLUS.to_density()
    assert np.allclose(qcore.apply_kraus(plus, kraus_pd(1), 0).entries, np.eye(2) / 2)


def test_invalid_channel():
    bad = KrausChannel("bad", 0.5, (np.eye(2), np.eye(2)))
    with pytest.raises(QCoreError, match="invalid channel"):
        qcore.apply_kraus(PLUS.to_density(), bad, 0)
    with pytest.raises(QCoreError, match="invalid channel"):
        qcore.apply_correlated_kraus(PLUS.to_density(), bad, [[0]])


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.integers(0, 10 ** 6))
def test_kraus_preserves_trace_and_positivity(eta, seed):
    rho = rand_density(2, seed)
    for ch in (kraus_ad(eta), kraus_pd(eta)):
        out = qcore.apply_kraus(rho, ch, 1)
        assert abs(out.trace - 1) < 1e-10
        out.validate()


def test_correlated_singletons_equal_independent():
    rho = rand_density(2, 11)
    ch = kraus_ad(0.37)
    a = qcore.apply_correlated_kraus(rho, ch, [[0], [1]])
    b = qcore.apply_kraus(qcore.apply_kraus(rho, ch, 0), ch, 1)
    assert np.allclose(a.entries, b.entries)


@pytest.mark.parametrize("eta", [0.0, 0.25, 0.6, 1.0])
def test_correlated_ad_on_psi_plus(eta):
    rho = bell_state(BellKind.PSI_PLUS).to_density()
    out = qcore.apply_correlated_kraus(rho, kraus_ad(eta), [[0, 1]]).entries
    assert out[0, 3] == pytest.approx((1 - eta) / 2)
    # only E0xE0 and E1xE1: |00>+(1-eta)|11> plus eta^2/2 |00><00|
    assert out[0, 0].real == pytest.approx(0.5 + eta ** 2 / 2)
    assert out[3, 3].real == pytest.approx((1 - eta) ** 2 / 2)


@pytest.mark.parametrize("eta", [0.0, 0.3, 1.0])
def test_correlated_pd_on_psi_plus(eta):
    # (1-eta)^2 rho + eta^2/2 (|00><00| + |11><11|)
    rho = bell_state(BellKind.PSI_PLUS).to_density()
    out = qcore.apply_correlated_kraus(rho, kraus_pd(eta), [[0, 1]]).entries
    diag = (1 - eta) ** 2 / 2 + eta ** 2 / 2
    assert np.allclose(np.diag(out).real, [diag, 0, 0, diag])
    assert out[0, 3] == pytest.approx((1 - eta) ** 2 / 2)


def test_correlated_overlapping_groups():
    with pytest.raises(QCoreError, match="overlapping"):
        qcore.apply_correlated_kraus(ket("000").to_density(), kraus_ad(0.2), [[0, 1], [1, 2]])


def test_correlated_matches_oracle():
    rho = rand_density(3, 5)
    ch = kraus_pd(0.4)
    out = qcore.apply_correlated_kraus(rho, ch, [[2, 0]]).entries
    want = sum(oracles.embed(np.kron(e, e), [2, 0], 3) @ rho.entries
               @ oracles.embed(np.kron(e, e), [2, 0], 3).conj().T for e in oracles.pd_ops(0.4))
    assert np.allclose(out, want)


# -- measurement ---------------------------------------------------------------------------------

def test_measure_examples():
    rng = qcore.make_rng(0)
    rec, _ = qcore.measure(ket("0"), [0], Basis.COMPUTATIONAL, rng)
    assert rec.outcome == "0" and rec.probability == pytest.approx(1)
    rec, post = qcore.measure(bell_state(BellKind.PSI_PLUS), [0, 1], Basis.BELL, rng)
    assert rec.outcome is BellKind.PSI_PLUS and rec.probability == pytest.approx(1)
    assert qcore.equal_up_to_phase(post, bell_state(BellKind.PSI_PLUS))


def test_measure_born_frequency():
    zeros = sum(qcore.measure(PLUS, [0], Basis.COMPUTATIONAL, qcore.make_rng(s))[0].outcome == "0"
                for s in range(10_000))
    assert abs(zeros / 10_000 - 0.5) < 0.02


def test_measure_is_deterministic_per_seed():
    outs = [qcore.measure(rand_state(3, 1), [0, 2], "computational", qcore.make_rng(9))[0].outcome
            for _ in range(3)]
    assert len(set(outs)) == 1


def test_measure_diagonal_and_forced():
    rec, post = qcore.measure(MINUS, [0], Basis.DIAGONAL, qcore.make_rng(1))
    assert rec.outcome == "1"
    assert qcore.equal_up_to_phase(post, MINUS)
    rec, post = qcore.measure(PLUS, [0], Basis.COMPUTATIONAL, None, forced="1")
    assert rec.outcome == "1" and rec.probability == pytest.approx(0.5)


def test_post_select_examples():
    s, p = qcore.post_select(ket("00").to_density(), [0, 1], "00")
    assert p == pytest.approx(1) and np.allclose(s.entries, ket("00").to_density().entries)
    s, p = qcore.post_select(bell_state(BellKind.PSI_PLUS).to_density(), [0], "0")
    assert p == pytest.approx(0.5)
    assert np.allclose(s.entries, ket("00").to_density().entries)
    with pytest.raises(ZeroProbabilityBranch, match="zero-probability branch"):
        qcore.post_select(ket("1").to_density(), [0], "0")


# -- partial trace, fidelity ----------------------------------------------------------------------

def test_partial_trace_examples():
    assert np.allclose(qcore.partial_trace(bell_state(BellKind.PSI_PLUS), [0]).entries,
                       np.eye(2) / 2)
    assert np.allclose(qcore.partial_trace(ket("00").to_density(), [0]).entries,
                       ket("0").to_density().entries)
    rho = rand_density(2, 2)
    assert np.allclose(qcore.partial_trace(rho, [0, 1]).entries, rho.entries)
    with pytest.raises(QCoreError):
        qcore.partial_trace(rho, [])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_partial_trace_against_einsum_oracle(seed):
    rho = rand_density(3, seed)
    t = rho.entries.reshape([2] * 6)
    want = np.einsum("abcAbC->acAC", t).reshape(4, 4)
    assert np.allclose(qcore.partial_trace(rho, [0, 2]).entries, want)
    want = np.einsum("abcAbC->caCA", t).reshape(4, 4)
    assert np.allclose(qcore.partial_trace(rho, [2, 0]).entries, want)


def test_fidelity_examples():
    t = rand_state(2, 4)
    assert qcore.fidelity_with_pure(t.to_density(), t) == pytest.approx(1)
    mixed = DensityMatrix(1, np.eye(2) / 2)
    assert qcore.fidelity_with_pure(mixed, rand_state(1, 8)) == pytest.approx(0.5)
    assert qcore.fidelity_with_pure(ket("0").to_density(), PLUS) == pytest.approx(0.5)
    with pytest.raises(QCoreError):
        qcore.fidelity_with_pure(mixed, t)


# -- permutations ---------------------------------------------------------------------------------

def test_permute_examples():
    s = rand_state(3, 0)
    assert qcore.equal_exact(qcore.permute_qubits(s, [0, 1, 2]), s)
    assert qcore.equal_exact(qcore.permute_qubits(ket("01"), [1, 0]), ket("10"))
    psi = bell_state(BellKind.PSI_PLUS)
    assert qcore.equal_exact(qcore.permute_qubits(psi, [1, 0]), psi)
    with pytest.raises(QCoreError):
        qcore.permute_qubits(s, [0, 0, 1])


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(4)), st.integers(0, 10 ** 6))
def test_permutation_round_trip(perm, seed):
    s = rand_state(4, seed)
    moved = qcore.permute_qubits(s, perm)
    back = qcore.permute_qubits(moved, qcore.inverse_permutation(perm))
    assert qcore.equal_exact(back, s)
    rho = s.to_density()
    moved_rho = qcore.permute_qubits(rho, perm)
    assert np.allclose(moved_rho.entries, moved.to_density().entries)


def test_permute_moves_qubit_to_position():
    # qubit 0 in |1>, others |0>; send qubit 0 to position 2
    out = qcore.permute_qubits(ket("100"), [2, 0, 1])
    assert qcore.equal_exact(out, ket("001"))


# -- helpers --------------------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(angles)
def test_equal_up_to_phase(phase):
    s = rand_state(2, 1)
    rotated = StateVector(2, s.amplitudes * np.exp(1j * phase))
    assert qcore.equal_up_to_phase(rotated, s)


def test_haar_qubit_mean_bloch_vector():
    rng = qcore.make_rng(3)
    z = [abs(haar_amp[0]) ** 2 - abs(haar_amp[1]) ** 2
         for haar_amp in (qcore.haar_qubit(rng).amplitudes for _ in range(4000))]
    assert abs(np.mean(z)) < 0.05
    assert abs(np.mean(np.square(z)) - 1 / 3) < 0.03


def test_split_rng_independent_and_reproducible():
    a = [r.random() for r in qcore.split_rng(qcore.make_rng(1), 3)]
    b = [r.random() for r in qcore.split_rng(qcore.make_rng(1), 3)]
    assert a == b and len(set(a)) == 3


def test_h_is_hadamard():
    assert np.allclose(H, oracles.HAD)
