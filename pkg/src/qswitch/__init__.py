"""Bell-state controlled quantum communication: BCST, CQD and their noise analysis."""

__version__ = "0.1.0"
