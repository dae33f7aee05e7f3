"""Friction observation toolkit for a 1-DOF mass under presliding friction.

The package covers the full loop: friction model, forward simulation,
observer gain design, reduced-order estimation and parameter fitting,
with CSV-based CLI entry points for batch work.
"""

from .config import Config, ConfigError, ObserverSettings, load_config, parse_config
from .csvio import (
    ESTIMATES_HEADER,
    MEASURED_HEADER,
    SIM_HEADER,
    CsvSchemaError,
    read_columns,
    write_columns,
)
from .friction import (
    DEFAULT_DEADBAND,
    DEFAULT_Z_FLOOR,
    FrictionParams,
    FrictionState,
    PreslidingState,
    coulomb_force,
    coulomb_stiffness,
    deadband_sign,
    default_kappa,
    f0_branch,
    presliding_force,
    step_friction,
    update_presliding,
)
from .gains import (
    ObserverGains,
    RobustReport,
    char_poly,
    design_gains,
    eigenvalues,
    validate_robust,
)
from .ident import FitProblem, FitResult, THETA_NAMES, fit, residual
from .observer import (
    EstimateSample,
    ErrorMetrics,
    GridError,
    ObserverState,
    RegularForm,
    assemble,
    e_obs_series,
    error_metrics,
    integrated_velocity,
    observer_matrix,
    observer_step,
    observer_update,
    rms,
    run_observer,
    zoh_discretize,
)
from .plant import (
    ImpulseTrain,
    Measured,
    PlantParams,
    SimConfig,
    SimulationDiverged,
    Trajectory,
    measure,
    simulate,
    simulate_forced,
)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "ConfigError",
    "ObserverSettings",
    "load_config",
    "parse_config",
    "ESTIMATES_HEADER",
    "MEASURED_HEADER",
    "SIM_HEADER",
    "CsvSchemaError",
    "read_columns",
    "write_columns",
    "DEFAULT_DEADBAND",
    "DEFAULT_Z_FLOOR",
    "FrictionParams",
    "FrictionState",
    "PreslidingState",
    "coulomb_force",
    "coulomb_stiffness",
    "deadband_sign",
    "default_kappa",
    "f0_branch",
    "presliding_force",
    "step_friction",
    "update_presliding",
    "ObserverGains",
    "RobustReport",
    "char_poly",
    "design_gains",
    "eigenvalues",
    "validate_robust",
    "FitProblem",
    "FitResult",
    "THETA_NAMES",
    "fit",
    "residual",
    "EstimateSample",
    "ErrorMetrics",
    "GridError",
    "ObserverState",
    "RegularForm",
    "assemble",
    "e_obs_series",
    "error_metrics",
    "integrated_velocity",
    "observer_matrix",
    "observer_step",
    "observer_update",
    "rms",
    "run_observer",
    "zoh_discretize",
    "ImpulseTrain",
    "Measured",
    "PlantParams",
    "SimConfig",
    "SimulationDiverged",
    "Trajectory",
    "measure",
    "simulate",
    "simulate_forced",
    "__version__",
]
