"""Parameter sweeps and the data behind the noise figures."""
from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass, field

from ..qcore import QCoreError, ZeroProbabilityBranch
from .analytic import analytic_fidelity
from .channels import ChannelParams, InputStateParams, NoiseKind
from .pipeline import cqd_numeric_fidelity, numeric_fidelity
from .cqd_table import PRINTED, row_members

PI = math.pi
DEFAULT_ETAS = tuple(i / 10 for i in range(11))
DEFAULT_THETAS = (0.0, PI / 8, PI / 6, PI / 4, PI / 3, PI / 2)
DEFAULT_PHIS = (0.0, PI / 3)
# theta = 0 makes the eta = 1 amplitude-damping branch empty, so checks that
# need a state at every point use the other five angles
VERIFICATION_THETAS = DEFAULT_THETAS[1:]
FINE_ETAS = tuple(i / 20 for i in range(21))
FINE_THETAS = tuple(k * PI / 24 for k in range(13))

BCST_HEADER = ("eta", "theta1", "theta2", "phi1", "phi2", "channel",
               "f_numeric", "f_analytic", "abs_err")
CURVE_HEADER = ("eta", "curve", "channel", "f_numeric", "f_analytic", "abs_err")
ZERO_BRANCH = "zero-probability branch"


@dataclass(frozen=True)
class Grid:
    etas: tuple = DEFAULT_ETAS
    theta1s: tuple = DEFAULT_THETAS
    theta2s: tuple = DEFAULT_THETAS
    phi1s: tuple = DEFAULT_PHIS
    phi2s: tuple = DEFAULT_PHIS

    def __post_init__(self):
        for name in ("etas", "theta1s", "theta2s", "phi1s", "phi2s"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise QCoreError(f"grid axis {name} is empty")
            object.__setattr__(self, name, values)

    def points(self):
        for eta in self.etas:
            for t1 in self.theta1s:
                for t2 in self.theta2s:
                    for p1 in self.phi1s:
                        for p2 in self.phi2s:
                            yield eta, InputStateParams(t1, t2, p1, p2)

    @property
    def size(self) -> int:
        return (len(self.etas) * len(self.theta1s) * len(self.theta2s)
                * len(self.phi1s) * len(self.phi2s))


GRIDS = {
    "default": Grid(),
    "verification": Grid(DEFAULT_ETAS, VERIFICATION_THETAS, VERIFICATION_THETAS, (0.0,), (0.0,)),
}


def named_grid(name: str) -> Grid:
    try:
        return GRIDS[name]
    except KeyError:
        raise QCoreError(f"unknown grid {name!r} (choose from {sorted(GRIDS)})") from None


@dataclass(frozen=True)
class FidelityRecord:
    channel: ChannelParams
    inputs: InputStateParams
    f_numeric: float
    f_analytic: float
    abs_err: float
    note: str = ""

    def sort_key(self) -> tuple:
        i = self.inputs
        return (self.channel.kind.value, self.channel.eta, i.theta1, i.theta2, i.phi1, i.phi2)

    def row(self) -> tuple:
        i = self.inputs
        return (self.channel.eta, i.theta1, i.theta2, i.phi1, i.phi2, self.channel.kind.value,
                self.f_numeric, self.f_analytic, self.abs_err)


@dataclass(frozen=True)
class CurveRecord:
    curve: str
    channel: ChannelParams
    f_numeric: float
    f_analytic: float
    abs_err: float
    note: str = field(default="")

    def sort_key(self) -> tuple:
        return (self.curve, self.channel.eta)

    def row(self) -> tuple:
        return (self.channel.eta, self.curve, self.channel.kind.value,
                self.f_numeric, self.f_analytic, self.abs_err)


def evaluate(channel: ChannelParams, inputs: InputStateParams, *, form: str = "corrected"
             ) -> FidelityRecord:
    """One grid point: pipeline value, closed form, and their gap (nan on empty branches)."""
    note = ""
    try:
        f_num = numeric_fidelity(channel, inputs)
    except ZeroProbabilityBranch:
        f_num, note = math.nan, ZERO_BRANCH
    f_an = analytic_fidelity(channel, inputs, form=form)
    return FidelityRecord(channel, inputs, f_num, f_an, abs(f_num - f_an), note)


def sweep(grid: Grid, kinds=("AD", "PD"), *, form: str = "corrected") -> list:
    """Every grid point for every channel kind, sorted by (kind, eta, theta1, theta2)."""
    kinds = sorted({NoiseKind.parse(k) for k in kinds}, key=lambda k: k.value)
    if not kinds:
        raise QCoreError("no channel kinds given")
    records = [evaluate(ChannelParams(k, eta), inputs, form=form)
               for k in kinds for eta, inputs in grid.points()]
    return sorted(records, key=FidelityRecord.sort_key)


def cqd_curve(label: str, etas=FINE_ETAS) -> list:
    kind = NoiseKind.AD if label.startswith("AD") else NoiseKind.PD
    initial, a, b = row_members(label)[0]
    out = []
    for eta in etas:
        ch = ChannelParams(kind, eta)
        printed = PRINTED[label](eta)
        try:
            f_num, note = cqd_numeric_fidelity(initial, a, b, ch), ""
        except ZeroProbabilityBranch:
            f_num, note = math.nan, ZERO_BRANCH
        out.append(CurveRecord(label, ch, f_num, printed, abs(f_num - printed), note))
    return out


def _bcst_figure(kind, etas, theta1s, theta2s) -> list:
    return sweep(Grid(etas, theta1s, theta2s, (0.0,), (0.0,)), [kind])


FIGURES = {
    "1a": ("AD fidelity over (theta1, eta) at theta2 = pi/6",
           lambda: _bcst_figure("AD", FINE_ETAS, FINE_THETAS, (PI / 6,))),
    "1b": ("AD fidelity over (theta1, theta2) at eta = 0.5",
           lambda: _bcst_figure("AD", (0.5,), FINE_THETAS, FINE_THETAS)),
    "1c": ("PD fidelity over (theta1, eta) at theta2 = pi/6",
           lambda: _bcst_figure("PD", FINE_ETAS, FINE_THETAS, (PI / 6,))),
    "1d": ("PD fidelity over (theta1, theta2) at eta = 0.5",
           lambda: _bcst_figure("PD", (0.5,), FINE_THETAS, FINE_THETAS)),
    "2": ("AD (solid) and PD (dashed) at theta1 = pi/4, theta2 in {pi/6, pi/3}",
          lambda: sweep(Grid(FINE_ETAS, (PI / 4,), (PI / 6, PI / 3), (0.0,), (0.0,)))),
    "3a": ("CQD amplitude damping, F'_AD1 .. F'_AD5",
           lambda: [r for label in ("AD1", "AD2", "AD3", "AD4", "AD5")
                    for r in cqd_curve(label)]),
    "3b": ("CQD phase damping, F'_PD1 (psi initial) and F'_PD2 (phi initial)",
           lambda: [r for label in ("PD1", "PD2") for r in cqd_curve(label)]),
}


def figure_records(figure_id: str) -> list:
    try:
        _, build = FIGURES[figure_id]
    except KeyError:
        raise QCoreError(f"unknown figure {figure_id!r} (choose from {sorted(FIGURES)})") from None
    return build()


def format_number(x) -> str:
    """12 significant digits, locale independent; whole numbers keep a trailing .0."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0:
        x = 0.0  # drop the sign of -0.0
    text = format(x, ".12g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def records_csv(records) -> str:
    """CSV for BCST fidelity records (sorted canonically)."""
    records = list(records)
    if not records:
        raise QCoreError("empty input")
    return _csv(BCST_HEADER, (r.row() for r in sorted(records, key=FidelityRecord.sort_key)))


def _in_figure(record, figure_id) -> bool:
    if figure_id in ("3a", "3b"):
        return isinstance(record, CurveRecord) and record.curve.startswith(
            "AD" if figure_id == "3a" else "PD")
    if not isinstance(record, FidelityRecord):
        return False
    i, ch = record.inputs, record.channel
    close = math.isclose
    if figure_id in ("1a", "1c"):
        return ch.kind.value == ("AD" if figure_id == "1a" else "PD") and close(i.theta2, PI / 6)
    if figure_id in ("1b", "1d"):
        return ch.kind.value == ("AD" if figure_id == "1b" else "PD") and close(ch.eta, 0.5)
    return close(i.theta1, PI / 4) and (close(i.theta2, PI / 6) or close(i.theta2, PI / 3))


def emit_figure_data(records, figure_id: str) -> str:
    """CSV for one figure: the records that belong to it, in canonical order."""
    if figure_id not in FIGURES:
        raise QCoreError(f"unknown figure {figure_id!r} (choose from {sorted(FIGURES)})")
    chosen = [r for r in records if _in_figure(r, figure_id)]
    if not chosen:
        raise QCoreError("empty input")
    if figure_id in ("3a", "3b"):
        return _csv(CURVE_HEADER, (r.row() for r in sorted(chosen, key=CurveRecord.sort_key)))
    return records_csv(chosen)
