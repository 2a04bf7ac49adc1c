"""Closed-form CQD fidelities for each (initial state, Alice op, Bob op) class."""
from __future__ import annotations

from ..bell import BellKind
from ..qcore import PauliCode, QCoreError
from .channels import ChannelParams, NoiseKind


def _ad_den(e):
    return 4 * (1 - e + e ** 2)


PRINTED = {
    "AD1": lambda e: (4 - 8 * e + 7 * e ** 2 - 2 * e ** 3 + e ** 4) / _ad_den(e),
    "AD2": lambda e: (4 - 8 * e + 9 * e ** 2 - 4 * e ** 3 + e ** 4) / _ad_den(e),
    "AD3": lambda e: (1 - e) ** 2 * (4 + e ** 2) / _ad_den(e),
    "AD4": lambda e: (4 - 8 * e + 7 * e ** 2 - 4 * e ** 3 + e ** 4) / _ad_den(e),
    "AD5": lambda e: (2 - e) ** 2 / 4,
    # numerator printed with eta_A; read as the phase-damping rate
    "PD1": lambda e: (2 - 6 * e + 8 * e ** 2 - 4 * e ** 3 + e ** 4) / (2 * (1 - 2 * e + 2 * e ** 2)),
    "PD2": lambda e: (2 - 2 * e + e ** 2) / 2,
}

_FLIP = (PauliCode.X, PauliCode.IY)
_KEEP = (PauliCode.I, PauliCode.Z)
_PSI = (BellKind.PSI_PLUS, BellKind.PSI_MINUS)

# one representative (initial, alice, bob) per row, for the numeric check
ROWS = {
    "AD1": (_PSI, _FLIP, _FLIP), "AD2": (_PSI, _KEEP, _KEEP),
    "AD3": (_PSI, _FLIP, _KEEP), "AD4": (_PSI, _KEEP, _FLIP),
    "AD5": ((BellKind.PHI_PLUS, BellKind.PHI_MINUS), tuple(PauliCode), tuple(PauliCode)),
    "PD1": (_PSI, tuple(PauliCode), tuple(PauliCode)),
    "PD2": ((BellKind.PHI_PLUS, BellKind.PHI_MINUS), tuple(PauliCode), tuple(PauliCode)),
}


def cqd_row(initial, alice_op, bob_op, kind) -> str:
    """Row label ("AD1".."AD5", "PD1", "PD2") covering this configuration."""
    initial = BellKind.parse(initial)
    a, b = PauliCode.parse(alice_op), PauliCode.parse(bob_op)
    kind = NoiseKind.parse(kind)
    if initial in _PSI:
        if kind is NoiseKind.PD:
            return "PD1"
        for label in ("AD1", "AD2", "AD3", "AD4"):
            _, alice_set, bob_set = ROWS[label]
            if a in alice_set and b in bob_set:
                return label
        raise QCoreError("unmatched row")
    return "AD5" if kind is NoiseKind.AD else "PD2"


def row_members(label: str) -> list:
    """Every (initial, alice op, bob op) the row covers."""
    inits, alice_set, bob_set = ROWS[label]
    return [(i, a, b) for i in inits for a in alice_set for b in bob_set]


def cqd_fidelity(initial, alice_op, bob_op, channel: ChannelParams) -> float:
    """Printed CQD fidelity for this configuration."""
    return float(PRINTED[cqd_row(initial, alice_op, bob_op, channel.kind)](channel.eta))
