"""Finite-time parking of a unicycle-type vehicle in target-relative polar
coordinates: five steering laws, closed-loop integration, and numerical
certificates for the decay envelopes each law promises."""

from .certificates import (CertificateReport, CheckResult, ClassKFunction,
                           FittedDecay, GainShape, LemmaOutcome, Verdict,
                           check_trajectory, comparison_envelope_check,
                           lyapunov_slope_stats, render_report,
                           timelike_decrease_check)
from .controllers import (ControlLaw, LawVariant, ZetaView, arrival_deadline,
                          arrival_deadline_decel, curbsafe_c1_floor,
                          decel_inputs, omega_backstep, omega_curbsafe,
                          omega_nofront, omega_smooth, steering_envelope_gain,
                          velocity_for_omega_limit, zeta_view)
from .dynamics import (Inputs, StopReason, Trajectory, TrajectorySample,
                       ZeroDynamicsClock, default_step, integrate,
                       integrate_log_timescale, log_clock)
from .errors import (DegenerateOrigin, DomainError, GuardTripped,
                     LawConstraintError, MismatchedLaw, ScenarioError)
from .geometry import (ANGLE_GUARD, CartesianPose, ErrorNorm, PolarState,
                       cart_to_polar, error_norm, gain_margin, polar_to_cart,
                       wrap_angle)
from .output import (PlotKind, csv_text, emit_csv, emit_svg,
                     read_csv_trajectory, svg_text)
from .scenario import (Preset, Scenario, law_from_table, load_preset,
                       load_scenario, parse_scenario, preset_names,
                       run_scenario)
from .sweep import SweepResult, SweepRow, load_sweep, run_sweep, sweep_csv

__version__ = "0.1.0"

__all__ = [
    "ANGLE_GUARD", "CartesianPose", "CertificateReport", "CheckResult",
    "ClassKFunction", "ControlLaw", "DegenerateOrigin", "DomainError",
    "ErrorNorm", "FittedDecay", "GainShape", "GuardTripped", "Inputs",
    "LawConstraintError", "LawVariant", "LemmaOutcome", "MismatchedLaw",
    "PlotKind", "PolarState", "Preset", "Scenario", "ScenarioError",
    "StopReason", "SweepResult", "SweepRow", "Trajectory", "TrajectorySample",
    "Verdict", "ZeroDynamicsClock", "ZetaView", "arrival_deadline",
    "arrival_deadline_decel", "cart_to_polar", "check_trajectory",
    "comparison_envelope_check", "csv_text", "curbsafe_c1_floor",
    "decel_inputs", "default_step", "emit_csv", "emit_svg", "error_norm",
    "gain_margin", "integrate", "integrate_log_timescale", "law_from_table",
    "load_preset", "load_scenario", "load_sweep", "log_clock",
    "lyapunov_slope_stats", "omega_backstep", "omega_curbsafe",
    "omega_nofront", "omega_smooth", "parse_scenario", "polar_to_cart",
    "preset_names", "read_csv_trajectory", "render_report", "run_scenario",
    "run_sweep", "steering_envelope_gain", "svg_text", "sweep_csv",
    "timelike_decrease_check", "velocity_for_omega_limit", "wrap_angle",
    "zeta_view",
]
