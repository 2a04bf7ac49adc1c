"""Numeric noise pipelines: the density-matrix ground truth for every closed form.

BCST register order is (S1, S1', R1, S2, S2', R2): S_i is the sender's half
of the Bell pair, S_i' the qubit to teleport and R_i the receiver's half.
The channel qubits S1 and R2 travel together, as do R1 and S2, so each of
those groups is hit by the same Kraus index.
"""
from __future__ import annotations

import numpy as np

from .. import qcore
from ..bell import BellKind, bell_state, correction_for, sender_operation
from ..qcore import PauliCode, StateVector, ZeroProbabilityBranch
from .channels import ChannelParams, InputStateParams

S1, S1P, R1, S2, S2P, R2 = range(6)
CORRELATED_GROUPS = ((S1, R2), (R1, S2))
# tensor order (S1, R1, S2, R2, S1', S2') -> register position
_LAYOUT = (S1, R1, S2, R2, S1P, S2P)


def initial_state(inputs: InputStateParams, kinds=(BellKind.PSI_PLUS, BellKind.PSI_PLUS)
                  ) -> StateVector:
    parts = [bell_state(kinds[0]), bell_state(kinds[1]), inputs.zeta(1), inputs.zeta(2)]
    return qcore.permute_qubits(qcore.tensor(parts), _LAYOUT)


def bcst_noisy_branch(channel: ChannelParams, inputs: InputStateParams, *,
                      kinds=(BellKind.PSI_PLUS, BellKind.PSI_PLUS),
                      outcomes=("00", "00"), correlated: bool = True) -> tuple:
    """Post-selected receivers' state and the branch's (unnormalized) weight.

    ``outcomes`` are the two senders' results as (S_i' bit, S_i bit).  The
    receivers apply the standard Pauli correction for their outcome, which is the
    identity in the all-zero case the closed forms assume.  With
    ``correlated=False`` every channel qubit gets an independent channel.
    """
    kinds = tuple(BellKind.parse(k) for k in kinds)
    rho = initial_state(inputs, kinds).to_density()
    kraus = channel.kraus()
    if correlated:
        rho = qcore.apply_correlated_kraus(rho, kraus, CORRELATED_GROUPS)
    else:
        for q in (S1, R1, S2, R2):
            rho = qcore.apply_kraus(rho, kraus, q)
    rho = qcore.apply_unitary(rho, sender_operation(), [S1P, S1])
    rho = qcore.apply_unitary(rho, sender_operation(), [S2P, S2])
    out, weight = qcore.post_select(rho, [S1P, S1, S2P, S2], outcomes[0] + outcomes[1])
    out = qcore.partial_trace(out, [R1, R2])
    for i, (smo, kind) in enumerate(zip(outcomes, kinds)):
        fix = correction_for(smo, kind)
        if fix is not PauliCode.I:
            out = qcore.apply_unitary(out, fix.matrix, [i])
    return out, weight


def bcst_noisy_pipeline(channel: ChannelParams, inputs: InputStateParams, **kwargs
                        ) -> qcore.DensityMatrix:
    """rho_out on (R1, R2); raises ZeroProbabilityBranch when the branch is empty."""
    return bcst_noisy_branch(channel, inputs, **kwargs)[0]


def numeric_fidelity(channel: ChannelParams, inputs: InputStateParams, **kwargs) -> float:
    return qcore.fidelity_with_pure(bcst_noisy_pipeline(channel, inputs, **kwargs),
                                    inputs.target())


# -- CQD fidelity table ---------------------------------------------------------------

ROUTINGS = ("joint", "steps")
_HOME, _TRAVEL = 0, 1


def cqd_noisy_pipeline(initial, alice_op, bob_op, channel: ChannelParams, *,
                       routing: str = "joint") -> tuple:
    """Noisy CQD pair and the noiseless target it should match.

    joint: both qubits cross one channel together (same Kraus index), Alice
    encodes on the travel qubit, it crosses to Bob, Bob encodes, and it
    crosses back.  steps: both qubits go to Bob together, Bob encodes first,
    then the travel qubit makes the Bob -> Alice -> Bob round trip.
    Returns ``(rho, target)``.
    """
    if routing not in ROUTINGS:
        raise qcore.QCoreError(f"routing must be one of {ROUTINGS}")
    initial = BellKind.parse(initial)
    u_a, u_b = PauliCode.parse(alice_op).matrix, PauliCode.parse(bob_op).matrix
    kraus = channel.kraus()
    rho = qcore.apply_correlated_kraus(bell_state(initial).to_density(), kraus,
                                       [(_HOME, _TRAVEL)])
    first, second = (u_a, u_b) if routing == "joint" else (u_b, u_a)
    rho = qcore.apply_unitary(rho, first, [_TRAVEL])
    rho = qcore.apply_kraus(rho, kraus, _TRAVEL)
    rho = qcore.apply_unitary(rho, second, [_TRAVEL])
    rho = qcore.apply_kraus(rho, kraus, _TRAVEL)
    target = qcore.apply_unitary(bell_state(initial), second @ first, [_TRAVEL])
    return rho.normalized(), target


def cqd_numeric_fidelity(initial, alice_op, bob_op, channel: ChannelParams, *,
                         routing: str = "joint") -> float:
    rho, target = cqd_noisy_pipeline(initial, alice_op, bob_op, channel, routing=routing)
    return qcore.fidelity_with_pure(rho, target)


def limit_at_one(fn, step: float = 1e-4) -> float:
    """Value at eta -> 1 of a smooth ``fn(eta)`` by quadratic extrapolation from below.

    Used where eta = 1 itself is a zero-probability branch.
    """
    f1, f2, f3 = fn(1 - step), fn(1 - 2 * step), fn(1 - 3 * step)
    return 3 * f1 - 3 * f2 + f3


__all__ = ["initial_state", "bcst_noisy_branch", "bcst_noisy_pipeline", "numeric_fidelity",
           "cqd_noisy_pipeline", "cqd_numeric_fidelity", "limit_at_one", "ROUTINGS",
           "CORRELATED_GROUPS", "ZeroProbabilityBranch"]
