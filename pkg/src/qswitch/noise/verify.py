"""Cross-check every closed form against the density-matrix pipeline.

A closed form that disagrees with the pipeline by more than the tolerance
is a discrepancy.  A discrepancy is *catalogued* when some subset of the
fixes in :data:`~qswitch.noise.analytic.CATALOG` makes the closed form
agree again; anything else is uncatalogued and fails the verification.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from ..qcore import QCoreError, ZeroProbabilityBranch, fidelity_with_pure
from .analytic import CATALOG, analytic_fidelity, analytic_rho_out, applicable_fixes
from .channels import ChannelParams, InputStateParams, NoiseKind
from .pipeline import bcst_noisy_pipeline, cqd_numeric_fidelity, limit_at_one
from .sweep import DEFAULT_ETAS, Grid, named_grid
from .cqd_table import PRINTED, row_members

TOLERANCE = 1e-9
PI = math.pi


def _point(channel: ChannelParams, inputs: InputStateParams | None = None, **extra) -> dict:
    p = {"channel": channel.kind.value, "eta": channel.eta}
    if inputs is not None:
        p.update(theta1=inputs.theta1, theta2=inputs.theta2, phi1=inputs.phi1, phi2=inputs.phi2)
    p.update(extra)
    return p


def _subsets(fixes):
    for size in range(1, len(fixes) + 1):
        yield from itertools.combinations(fixes, size)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


class Check:
    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.points = self.agree = self.catalogued = self.uncatalogued = 0
        self.max_err = 0.0

    def summary(self) -> dict:
        return {"name": self.name, "description": self.description, "points": self.points,
                "agree": self.agree, "catalogued": self.catalogued,
                "uncatalogued": self.uncatalogued, "max_abs_err_after_fixes": self.max_err}


class Report:
    def __init__(self, grid_name: str, tolerance: float):
        self.grid_name = grid_name
        self.tolerance = tolerance
        self.checks: dict = {}
        self.discrepancies: list = []
        self.spot_checks: list = []
        self.readings: list = []
        self.alternative_routing: dict = {}

    def check(self, name, description="") -> Check:
        if name not in self.checks:
            self.checks[name] = Check(name, description)
        return self.checks[name]

    def compare(self, check: Check, point: dict, pipeline, printed, fixed_eval, fixes,
                diff=None) -> None:
        """Record one comparison.  ``fixed_eval(subset)`` evaluates the form with fixes."""
        diff = diff or (lambda a, b: abs(a - b))
        check.points += 1
        err = math.inf if printed is None else diff(printed, pipeline)
        if err <= self.tolerance:
            check.agree += 1
            check.max_err = max(check.max_err, err)
            return
        entry = {"check": check.name, "point": point,
                 "printed_value": _scalar(printed), "pipeline_value": _scalar(pipeline)}
        for subset in _subsets(fixes):
            try:
                value = fixed_eval(frozenset(subset))
            except ZeroProbabilityBranch:
                continue
            e = diff(value, pipeline)
            if e <= self.tolerance:
                check.catalogued += 1
                check.max_err = max(check.max_err, e)
                entry.update(corrected_value=_scalar(value), corrections=list(subset),
                             catalogued=True,
                             note="; ".join(CATALOG[c] for c in subset))
                self.discrepancies.append(entry)
                return
        check.uncatalogued += 1
        check.max_err = max(check.max_err, err)
        entry.update(corrected_value=None, corrections=[], catalogued=False,
                     note="no catalogued correction restores agreement")
        self.discrepancies.append(entry)

    def catalogue_only(self, check: Check, point: dict, note_id: str, printed=None,
                       pipeline=None, note: str = "") -> None:
        check.points += 1
        check.catalogued += 1
        self.discrepancies.append({
            "check": check.name, "point": point, "printed_value": _num(printed),
            "pipeline_value": _num(pipeline), "corrected_value": None,
            "corrections": [note_id], "catalogued": True,
            "note": CATALOG[note_id] + (f"; {note}" if note else "")})

    def fail(self, check: Check, point: dict, printed, pipeline, note: str) -> None:
        check.points += 1
        check.uncatalogued += 1
        self.discrepancies.append({
            "check": check.name, "point": point, "printed_value": _num(printed),
            "pipeline_value": _num(pipeline), "corrected_value": None, "corrections": [],
            "catalogued": False, "note": note})

    @property
    def uncatalogued(self) -> int:
        return sum(c.uncatalogued for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "grid": self.grid_name,
            "tolerance": self.tolerance,
            "status": "pass" if self.uncatalogued == 0 else "fail",
            "uncatalogued": self.uncatalogued,
            "catalog": CATALOG,
            "checks": [c.summary() for c in self.checks.values()],
            "spot_checks": self.spot_checks,
            "readings": self.readings,
            "alternative_routing": self.alternative_routing,
            "discrepancies": self.discrepancies,
        }


def _scalar(v):
    if v is None:
        return None
    if isinstance(v, np.ndarray):
        return None
    return _num(v)


def _matrix_diff(a, b) -> float:
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def _verify_bcst(report: Report, grid: Grid) -> None:
    f_checks = {
        NoiseKind.AD: report.check("F_AD", "amplitude-damping BCST fidelity closed form"),
        NoiseKind.PD: report.check("F_PD", "phase-damping BCST fidelity closed form"),
    }
    rho_checks = {
        NoiseKind.AD: report.check("rho_A", "amplitude-damping BCST output matrix, entrywise"),
        NoiseKind.PD: report.check("rho_P", "phase-damping BCST output matrix, entrywise"),
    }
    for kind in (NoiseKind.AD, NoiseKind.PD):
        for eta, inputs in grid.points():
            ch = ChannelParams(kind, eta)
            point = _point(ch, inputs)
            printed_f = analytic_fidelity(ch, inputs, form="printed")
            try:
                rho = bcst_noisy_pipeline(ch, inputs)
            except ZeroProbabilityBranch:
                for check in (f_checks[kind], rho_checks[kind]):
                    report.catalogue_only(check, point, "zero-probability-branch",
                                          printed=printed_f if check is f_checks[kind] else None)
                continue
            f = fidelity_with_pure(rho, inputs.target())
            report.compare(f_checks[kind], point, f, None if math.isnan(printed_f) else printed_f,
                           lambda fx, ch=ch, i=inputs: analytic_fidelity(ch, i, fixes=fx),
                           applicable_fixes(kind, "fidelity"))
            try:
                printed_rho = analytic_rho_out(ch, inputs, form="printed").entries
            except QCoreError:
                printed_rho = None   # printed AD matrix at eta = 1
            except ZeroProbabilityBranch:
                printed_rho = None
            report.compare(rho_checks[kind], point, rho.entries, printed_rho,
                           lambda fx, ch=ch, i=inputs: analytic_rho_out(ch, i, fixes=fx).entries,
                           applicable_fixes(kind, "rho"), diff=_matrix_diff)


def _verify_invariants(report: Report, grid: Grid) -> None:
    phase = report.check("phase-independence", "pipeline fidelity does not depend on phi1, phi2")
    swap = report.check("exchange-symmetry", "pipeline fidelity is symmetric in theta1, theta2")
    for kind in (NoiseKind.AD, NoiseKind.PD):
        for eta, inputs in grid.points():
            ch = ChannelParams(kind, eta)
            try:
                f = fidelity_with_pure(bcst_noisy_pipeline(ch, inputs), inputs.target())
                base_in = InputStateParams(inputs.theta1, inputs.theta2)
                base = fidelity_with_pure(bcst_noisy_pipeline(ch, base_in), base_in.target())
                sw = inputs.swapped()
                f_sw = fidelity_with_pure(bcst_noisy_pipeline(ch, sw), sw.target())
            except ZeroProbabilityBranch:
                continue
            for check, other in ((phase, base), (swap, f_sw)):
                check.points += 1
                err = abs(f - other)
                check.max_err = max(check.max_err, err)
                if err <= 1e-10:
                    check.agree += 1
                else:
                    report.fail(check, _point(ch, inputs), other, f, "invariant violated")


def _verify_cqd_table(report: Report, etas) -> None:
    report.readings.append({"id": "cqd-pd1-symbol", "note": CATALOG["cqd-pd1-symbol"]})
    for label, fn in PRINTED.items():
        check = report.check(f"cqd-{label}", f"CQD fidelity F'_{label}, joint routing")
        kind = NoiseKind.AD if label.startswith("AD") else NoiseKind.PD
        for initial, a, b in row_members(label):
            for eta in etas:
                ch = ChannelParams(kind, eta)
                point = _point(ch, initial=initial.label, alice=a.value, bob=b.value)
                printed = fn(eta)
                try:
                    f = cqd_numeric_fidelity(initial, a, b, ch)
                except ZeroProbabilityBranch:
                    limit = limit_at_one(lambda e: cqd_numeric_fidelity(
                        initial, a, b, ChannelParams(kind, e))) if eta == 1.0 else math.nan
                    if abs(limit - printed) <= report.tolerance:
                        report.catalogue_only(check, point, "zero-probability-branch",
                                              printed=printed, pipeline=limit,
                                              note="pipeline value shown is the eta -> 1 limit")
                    else:
                        report.fail(check, point, printed, limit,
                                    "empty branch and the eta -> 1 limit disagrees")
                    continue
                report.compare(check, point, f, printed, lambda fx: printed, ())
        # the protocol-step routing, for comparison only
        worst = 0.0
        for initial, a, b in row_members(label):
            for eta in etas:
                try:
                    alt = cqd_numeric_fidelity(initial, a, b, ChannelParams(kind, eta),
                                               routing="steps")
                except ZeroProbabilityBranch:
                    continue
                worst = max(worst, abs(alt - fn(eta)))
        report.alternative_routing[label] = {"max_abs_err": worst,
                                             "matches": worst <= report.tolerance}


def _spot_checks(report: Report) -> None:
    quarter = InputStateParams(PI / 4, PI / 4)
    for kind in (NoiseKind.AD, NoiseKind.PD):
        ch = ChannelParams(kind, 1.0)
        report.spot_checks.append({
            "name": f"F_{kind.value} at eta=1, theta1=theta2=pi/4",
            "printed_value": _num(analytic_fidelity(ch, quarter, form="printed")),
            "corrected_value": _num(analytic_fidelity(ch, quarter, form="corrected")),
            "pipeline_value": fidelity_with_pure(bcst_noisy_pipeline(ch, quarter),
                                                 quarter.target()),
            "expected": 0.25,
        })
    for label, eta, expected in (("AD5", 0.5, 0.5625), ("PD2", 1.0, 0.5), ("AD2", 1.0, 0.5)):
        report.spot_checks.append({"name": f"F'_{label}({eta})", "printed_value": PRINTED[label](eta),
                                   "expected": expected})


def verify(grid="verification", *, tolerance: float = TOLERANCE, cqd_etas=DEFAULT_ETAS,
           invariants: bool = True) -> dict:
    """Full cross-check; returns the JSON-ready report (``status`` is "pass" or "fail")."""
    name = grid if isinstance(grid, str) else "custom"
    grid = named_grid(grid) if isinstance(grid, str) else grid
    report = Report(name, tolerance)
    _verify_bcst(report, grid)
    if invariants:
        _verify_invariants(report, grid)
    _verify_cqd_table(report, cqd_etas)
    _spot_checks(report)
    return report.to_dict()
