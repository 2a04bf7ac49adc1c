"""Protocol engines: BCST, CQD and its CQSDC / CQKD / CQKA reductions."""
from .bcst import bcst_run
from .cqd import DecoySet, cqd_run, cqka_run, cqkd_run, cqsdc_run
from .disclosure import (Direction, DisclosurePolicy, entropy_bits, info_revealed, map_kind,
                         partial_disclosure_fidelity)
from .register import Network, Party, QubitRegister, apply_permutation, random_permutation

__all__ = ["bcst_run", "cqd_run", "cqsdc_run", "cqkd_run", "cqka_run", "DecoySet",
           "Direction", "DisclosurePolicy", "entropy_bits", "info_revealed", "map_kind",
           "partial_disclosure_fidelity", "Network", "Party", "QubitRegister",
           "apply_permutation", "random_permutation"]
