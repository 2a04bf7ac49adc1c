"""What the controller reveals, and how much that is worth to the receiver."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..bell import KIND_ORDER, BellKind, teleport
from ..qcore import QCoreError, haar_qubit

PROB_ATOL = 1e-12


class Direction(enum.Enum):
    ALICE_TO_BOB = "AliceToBob"
    BOB_TO_ALICE = "BobToAlice"

    @classmethod
    def parse(cls, text) -> "Direction":
        if isinstance(text, cls):
            return text
        key = str(text).replace("_", "").replace("-", "").lower()
        for d in cls:
            if key in (d.value.lower(), d.name.replace("_", "").lower()):
                return d
        raise QCoreError(f"unknown direction {text!r}")


def check_distribution(distribution) -> np.ndarray:
    p = np.asarray(distribution, dtype=float)
    if p.shape != (4,):
        raise QCoreError("distribution must have one probability per Bell kind (4)")
    if np.any(p < 0):
        raise QCoreError("negative probabilities")
    if abs(p.sum() - 1) > PROB_ATOL:
        raise QCoreError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


@dataclass(frozen=True)
class DisclosurePolicy:
    """``bell_info`` is "full", "distribution" or "none".

    With "distribution" the controller announces ``distribution`` (ordered
    psi+, psi-, phi+, phi-) instead of the prepared kinds.
    """

    direction: Direction
    bell_info: str = "full"
    distribution: tuple | None = None
    reveal_permutation: bool = True

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if self.bell_info not in ("full", "distribution", "none"):
            raise QCoreError(f"bell_info must be full/distribution/none, got {self.bell_info!r}")
        if self.bell_info == "distribution":
            if self.distribution is None:
                raise QCoreError("bell_info=distribution needs a distribution")
            object.__setattr__(self, "distribution",
                               tuple(float(x) for x in check_distribution(self.distribution)))

    @classmethod
    def full(cls, direction) -> "DisclosurePolicy":
        return cls(direction, "full", None, True)

    @classmethod
    def nothing(cls, direction) -> "DisclosurePolicy":
        return cls(direction, "none", None, False)


def entropy_bits(distribution) -> float:
    p = check_distribution(distribution)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def info_revealed(distribution) -> float:
    """Bits of Bell-state information disclosed: 2 minus the remaining entropy."""
    return 2.0 - entropy_bits(distribution)


def map_kind(distribution) -> BellKind:
    """Most probable kind; ties go to the earliest of psi+, psi-, phi+, phi-."""
    p = check_distribution(distribution)
    return KIND_ORDER[int(np.argmax(p))]


def partial_disclosure_fidelity(distribution, rng: np.random.Generator, *,
                                ensemble=None, samples: int = 10_000) -> float:
    """Mean teleportation fidelity when the receiver only knows ``distribution``.

    The shared kind is drawn from ``distribution``, the input from ``ensemble``
    (a callable ``rng -> StateVector``, Haar by default), and the receiver
    corrects for the MAP kind.
    """
    p = check_distribution(distribution)
    guess = map_kind(p)
    draw = haar_qubit if ensemble is None else ensemble
    kinds = rng.choice(4, size=samples, p=p)
    total = 0.0
    for k in kinds:
        transcript, _ = teleport(draw(rng), KIND_ORDER[int(k)], rng, assumed=guess)
        total += transcript.fidelities["teleport"]
    return total / samples
