"""Nonlinear simulation of the delayed reaction-diffusion system."""
from .integrator import RECORD_COLUMNS, History, SimConfig, SimState, Trajectory, run, step
from .output import svg_document, write_poincare_csv, write_svg, write_trajectory_csv
from .poincare import (
    SECTION_UDOT,
    SECTION_V,
    SECTIONS,
    PoincareResult,
    TooFewHitsWarning,
    classify,
    poincare,
    section_residuals,
)

__all__ = [
    "RECORD_COLUMNS",
    "History",
    "SimConfig",
    "SimState",
    "Trajectory",
    "run",
    "step",
    "svg_document",
    "write_poincare_csv",
    "write_svg",
    "write_trajectory_csv",
    "SECTION_UDOT",
    "SECTION_V",
    "SECTIONS",
    "PoincareResult",
    "TooFewHitsWarning",
    "classify",
    "poincare",
    "section_residuals",
]
