"""Closed forms for the noisy BCST output state and fidelity.

Each closed form is transcribed exactly as printed and can be evaluated
with a set of catalogued fixes applied.  The printed forms are written for
a_i = cos(theta_i); this package uses a_i = sin(theta_i), so the
"amplitude-convention" fix evaluates a printed form at pi/2 - theta.  See
:data:`CATALOG` for the full list.
"""
from __future__ import annotations

import math

import numpy as np

from ..qcore import DensityMatrix, QCoreError, ZeroProbabilityBranch, MIN_BRANCH_PROB
from .channels import ChannelParams, InputStateParams, NoiseKind

CATALOG = {
    "amplitude-convention":
        "closed forms are written for a_i = cos(theta_i), b_i = sin(theta_i); with "
        "a_i = sin(theta_i) they hold at theta_i -> pi/2 - theta_i (odd powers of "
        "cos(2 theta_i) change sign)",
    "fad-coefficients":
        "F_AD numerator: -164 eta -> -64 eta; eta(34 - 51 eta + 30 eta^2) -> "
        "4 eta(8 - 12 eta + 7 eta^2); 4 eta^3(3 - 2 eta + 2 eta^2) -> 4 eta^3",
    "rho-ad-entry00":
        "rho_A,out |00><00| entry: (1 + eta)^4 -> (1 + eta^4)",
    "rho-pd-normalizer":
        "N_P: 2 eta_A^2 (2 - 4 eta + 3 eta^2) -> eta_P^2 (2 - 4 eta + 3 eta^2), "
        "which also matches the F_PD denominator",
    "cqd-pd1-symbol":
        "F'_PD1 numerator is printed with eta_A; read as eta_P (the phase-damping rate)",
    "zero-probability-branch":
        "the post-selected branch has probability 0 at this point, so there is no "
        "state to compare; the printed value is checked as the eta -> 1 limit instead",
    "alternative-routing":
        "informational: the CQD table evaluated with both qubits sent to Bob and Bob encoding "
        "first (the protocol-step routing) instead of the joint routing",
}

FORMS = ("printed", "corrected")
_FIXES = {
    (NoiseKind.AD, "rho"): ("amplitude-convention", "rho-ad-entry00"),
    (NoiseKind.PD, "rho"): ("amplitude-convention", "rho-pd-normalizer"),
    (NoiseKind.AD, "fidelity"): ("amplitude-convention", "fad-coefficients"),
    (NoiseKind.PD, "fidelity"): ("amplitude-convention",),
}


def applicable_fixes(kind, quantity: str) -> tuple:
    return _FIXES[NoiseKind.parse(kind), quantity]


def _resolve(kind, quantity, form, fixes) -> frozenset:
    if fixes is not None:
        fixes = frozenset(fixes)
        unknown = fixes - set(CATALOG)
        if unknown:
            raise QCoreError(f"unknown fixes {sorted(unknown)}")
        return fixes
    if form not in FORMS:
        raise QCoreError(f"form must be one of {FORMS}")
    return frozenset() if form == "printed" else frozenset(applicable_fixes(kind, quantity))


def _angles(inputs: InputStateParams, fixes) -> tuple:
    if "amplitude-convention" in fixes:
        return math.pi / 2 - inputs.theta1, math.pi / 2 - inputs.theta2
    return inputs.theta1, inputs.theta2


def _hermitian(upper: dict) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    for (i, j), v in upper.items():
        m[i, j] = v
        if i != j:
            m[j, i] = np.conj(v)
        else:
            m[i, i] = complex(v).real
    return m


def _rho_ad(e, inputs, fixes) -> np.ndarray:
    """N_A times the printed matrix, with every (1 - eta)^-k cancelled against N_A."""
    t1, t2 = _angles(inputs, fixes)
    c1, c2, s1, s2 = math.cos(t1), math.cos(t2), math.sin(t1), math.sin(t2)
    S1, S2 = math.sin(2 * t1), math.sin(2 * t2)
    C1, C2 = math.cos(2 * t1), math.cos(2 * t2)
    p1, p2 = inputs.phi1, inputs.phi2
    x = np.exp
    u = 1 - e
    lead = (1 + e ** 4) if "rho-ad-entry00" in fixes else (1 + e) ** 4
    m = _hermitian({
        (0, 0): lead * c1 ** 2 * c2 ** 2,
        (0, 1): u * c1 ** 2 * S2 * x(-1j * p2) / 2,
        (0, 2): u * S1 * c2 ** 2 * x(-1j * p1) / 2,
        (0, 3): u ** 2 * S1 * S2 * x(-1j * (p1 + p2)) / 4,
        (1, 1): u ** 2 * (c1 ** 2 * s2 ** 2 + e ** 2 * s1 ** 2 * c2 ** 2),
        (1, 2): u ** 2 * S1 * S2 * x(-1j * (p1 - p2)) / 4,
        (1, 3): u ** 3 * S1 * s2 ** 2 * x(-1j * p1) / 2,
        (2, 2): u ** 2 * (e ** 2 * c1 ** 2 * s2 ** 2 + s1 ** 2 * c2 ** 2),
        (2, 3): u ** 3 * s1 ** 2 * S2 * x(-1j * p2) / 2,
        (3, 3): u ** 4 * s1 ** 2 * s2 ** 2,
    })
    bracket = ((2 - 4 * e + 5 * e ** 2 - 4 * e ** 3 + 2 * e ** 4)
               + e * (2 - 3 * e + 2 * e ** 2) * (C1 + C2) + e ** 2 * C1 * C2)
    if abs(bracket) < MIN_BRANCH_PROB:
        raise ZeroProbabilityBranch(0.0)
    return 4 / (2 * bracket) * m


def _rho_pd(e, inputs, fixes) -> np.ndarray:
    """N_P times the printed matrix, with (1 - eta)^4 cancelled between N_P and P_11."""
    t1, t2 = _angles(inputs, fixes)
    c1, c2, s1, s2 = math.cos(t1), math.cos(t2), math.sin(t1), math.sin(t2)
    S1, S2 = math.sin(2 * t1), math.sin(2 * t2)
    C1, C2 = math.cos(2 * t1), math.cos(2 * t2)
    p1, p2 = inputs.phi1, inputs.phi2
    x = np.exp
    w = (1 - e) ** 4
    p11 = 4 * (1 - 2 * e + 2 * e ** 2) ** 2      # P_11 (1 - eta)^4
    m = _hermitian({
        (0, 0): p11 * c1 ** 2 * c2 ** 2,
        (0, 1): w * 2 * c1 ** 2 * S2 * x(-1j * p2),
        (0, 2): w * 2 * S1 * c2 ** 2 * x(-1j * p1),
        (0, 3): w * S1 * S2 * x(-1j * (p1 + p2)),
        (1, 1): w * 4 * c1 ** 2 * s2 ** 2,
        (1, 2): w * S1 * S2 * x(-1j * (p1 - p2)),
        (1, 3): w * 2 * S1 * s2 ** 2 * x(-1j * p1),
        (2, 2): w * 4 * s1 ** 2 * c2 ** 2,
        (2, 3): w * 2 * s1 ** 2 * S2 * x(-1j * p2),
        (3, 3): p11 * s1 ** 2 * s2 ** 2,
    })
    coeff = e ** 2 if "rho-pd-normalizer" in fixes else 2 * e ** 2
    bracket = ((2 - 8 * e + 14 * e ** 2 - 12 * e ** 3 + 5 * e ** 4)
               + coeff * (2 - 4 * e + 3 * e ** 2) * C1 * C2)
    if abs(bracket) < MIN_BRANCH_PROB:
        raise ZeroProbabilityBranch(0.0)
    return m / (2 * bracket)


def analytic_rho_out(channel: ChannelParams, inputs: InputStateParams, *,
                     form: str = "printed", fixes=None) -> DensityMatrix:
    """rho_out on (R1, R2) from the closed form.

    ``form="printed"`` is the transcription as printed; ``"corrected"`` applies
    every catalogued fix for that matrix.  ``fixes`` picks an explicit subset.
    """
    fixes = _resolve(channel.kind, "rho", form, fixes)
    e = channel.eta
    if channel.kind is NoiseKind.AD:
        if not fixes and e >= 1.0:
            raise QCoreError("singular parameterization; use pipeline")
        return DensityMatrix(2, _rho_ad(e, inputs, fixes))
    return DensityMatrix(2, _rho_pd(e, inputs, fixes))


def _f_ad(e, inputs, fixes) -> float:
    t1, t2 = _angles(inputs, fixes)
    C1, C2 = math.cos(2 * t1), math.cos(2 * t2)
    Q1, Q2 = math.cos(4 * t1), math.cos(4 * t2)
    if "fad-coefficients" in fixes:
        lin, cross, lead = 4 * e * (8 - 12 * e + 7 * e ** 2), 4 * e ** 3, -64 * e
    else:
        lin = e * (34 - 51 * e + 30 * e ** 2)
        cross = 4 * e ** 3 * (3 - 2 * e + 2 * e ** 2)
        lead = -164 * e
    num = (32 + lead + 57 * e ** 2 - 26 * e ** 3 + 10 * e ** 4
           + lin * (C1 + C2)
           + e ** 2 * (3 - 2 * e + 2 * e ** 2) * (Q1 + Q2)
           + cross * (C1 * Q2 + Q1 * C2)
           + 16 * e ** 2 * (2 - 2 * e + e ** 2) * C1 * C2
           + e ** 2 * (1 - 2 * e + 2 * e ** 2) * Q1 * Q2)
    den = 16 * (2 - 4 * e + 5 * e ** 2 - 4 * e ** 3 + 2 * e ** 4 + e ** 2 * C1 * C2
                + e * (2 - 3 * e + 2 * e ** 2) * (C1 + C2))
    if abs(den) < 16 * MIN_BRANCH_PROB:
        return math.nan
    return num / den


def _f_pd(e, inputs, fixes) -> float:
    t1, t2 = _angles(inputs, fixes)
    C1, C2 = math.cos(2 * t1), math.cos(2 * t2)
    Q1, Q2 = math.cos(4 * t1), math.cos(4 * t2)
    g = e ** 2 * (2 - 4 * e + 3 * e ** 2)
    num = (32 - 128 * e + 210 * e ** 2 - 164 * e ** 3 + 59 * e ** 4
           + g * (16 * C1 * C2 + Q1 * Q2 + 3 * (Q1 + Q2)))
    den = 16 * (2 - 8 * e + 14 * e ** 2 - 12 * e ** 3 + 5 * e ** 4 + g * C1 * C2)
    if abs(den) < 16 * MIN_BRANCH_PROB:
        return math.nan
    return num / den


def analytic_fidelity(channel: ChannelParams, inputs: InputStateParams, *,
                      form: str = "printed", fixes=None) -> float:
    """F_AD / F_PD from the closed forms (see :func:`analytic_rho_out` for ``form``).

    Returns nan where the form's denominator vanishes (only at eta = 1, where
    the corresponding post-selected branch is empty).
    """
    fixes = _resolve(channel.kind, "fidelity", form, fixes)
    if channel.kind is NoiseKind.AD:
        return float(_f_ad(channel.eta, inputs, fixes))
    return float(_f_pd(channel.eta, inputs, fixes))
