"""Amplitude- and phase-damping channels and the parameter records used by the noise analysis."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..qcore import KrausChannel, QCoreError, StateVector, tensor


class NoiseKind(enum.Enum):
    AD = "AD"
    PD = "PD"

    @classmethod
    def parse(cls, text) -> "NoiseKind":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).upper())
        except ValueError:
            raise QCoreError(f"unknown channel kind {text!r} (use AD or PD)") from None


def _check_eta(eta) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0 or math.isnan(eta):
        raise QCoreError(f"eta must lie in [0, 1], got {eta!r}")
    return eta


def kraus_ad(eta) -> KrausChannel:
    eta = _check_eta(eta)
    e0 = np.array([[1, 0], [0, math.sqrt(1 - eta)]])
    e1 = np.array([[0, math.sqrt(eta)], [0, 0]])
    return KrausChannel("AD", eta, (e0, e1))


def kraus_pd(eta) -> KrausChannel:
    eta = _check_eta(eta)
    return KrausChannel("PD", eta, (math.sqrt(1 - eta) * np.eye(2),
                                    math.sqrt(eta) * np.diag([1.0, 0.0]),
                                    math.sqrt(eta) * np.diag([0.0, 1.0])))


@dataclass(frozen=True)
class ChannelParams:
    kind: NoiseKind
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind.parse(self.kind))
        object.__setattr__(self, "eta", _check_eta(self.eta))

    def kraus(self) -> KrausChannel:
        return kraus_ad(self.eta) if self.kind is NoiseKind.AD else kraus_pd(self.eta)


@dataclass(frozen=True)
class InputStateParams:
    """|zeta_i> = sin(theta_i)|0> + cos(theta_i) e^{i phi_i}|1>."""

    theta1: float
    theta2: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        for name in ("theta1", "theta2", "phi1", "phi2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise QCoreError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    def amplitudes(self, i: int) -> tuple:
        theta = self.theta1 if i == 1 else self.theta2
        return math.sin(theta), math.cos(theta)

    def zeta(self, i: int) -> StateVector:
        a, b = self.amplitudes(i)
        phi = self.phi1 if i == 1 else self.phi2
        amps = np.array([a, b * np.exp(1j * phi)])
        # sin^2 + cos^2 is 1 only up to rounding; absorb it so the invariant is exact
        return StateVector(1, amps / np.linalg.norm(amps))

    def target(self) -> StateVector:
        """|T> = |zeta_1> (x) |zeta_2> on (R1, R2)."""
        return tensor([self.zeta(1), self.zeta(2)])

    def swapped(self) -> "InputStateParams":
        return InputStateParams(self.theta2, self.theta1, self.phi2, self.phi1)
