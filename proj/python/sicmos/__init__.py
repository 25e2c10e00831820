"""SiC power MOSFET compact model: bias solving, sweeps and parameter extraction."""

from ._core import (
    BiasSolution,
    Curve,
    DomainError,
    Error,
    FitReport,
    IoError,
    MeasurementRecord,
    MeasurementSet,
    ModelParams,
    NoBracket,
    NonFinite,
    ParseError,
    Region,
    SchemaError,
    SolverFailure,
    StageReport,
    UnitHeaderError,
    Weighting,
    drift_resistance,
    fit_all,
    load_measurements,
    model_error,
    on_resistance,
    output_sweep,
    param_units,
    pinch_off_potential,
    preset,
    read_card,
    solve_bias_point,
    synthesize,
    transfer_sweep,
    write_card,
)

__all__ = [name for name in dir() if not name.startswith("_")]
