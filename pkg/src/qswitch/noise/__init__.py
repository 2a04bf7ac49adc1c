"""Noisy BCST and CQD: Kraus channels, the density-matrix pipeline and the closed forms."""
from .analytic import CATALOG, analytic_fidelity, analytic_rho_out
from .channels import ChannelParams, InputStateParams, NoiseKind, kraus_ad, kraus_pd
from .pipeline import (bcst_noisy_branch, bcst_noisy_pipeline, cqd_noisy_pipeline,
                       cqd_numeric_fidelity, numeric_fidelity)
from .sweep import (FIGURES, GRIDS, CurveRecord, FidelityRecord, Grid, emit_figure_data,
                    figure_records, format_number, named_grid, records_csv, sweep, cqd_curve)
from .cqd_table import PRINTED as CQD_TABLE, cqd_fidelity, row_members, cqd_row
from .verify import verify

__all__ = [
    "CATALOG", "analytic_fidelity", "analytic_rho_out", "ChannelParams", "InputStateParams",
    "NoiseKind", "kraus_ad", "kraus_pd", "bcst_noisy_branch", "bcst_noisy_pipeline",
    "cqd_noisy_pipeline", "cqd_numeric_fidelity", "numeric_fidelity", "FIGURES", "GRIDS",
    "CurveRecord", "FidelityRecord", "Grid", "emit_figure_data", "figure_records",
    "format_number", "named_grid", "records_csv", "sweep", "cqd_curve", "CQD_TABLE",
    "cqd_fidelity", "row_members", "cqd_row", "verify",
]
