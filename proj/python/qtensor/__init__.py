"""Q-tensor / incompressible Navier-Stokes simulator.

Fields are numpy arrays shaped (components, nz, ny, nx); tensor component
(i, j) sits at index 3 * i + j.
"""

from ._core import (
    BoundaryTag,
    FormatError,
    GridSpec,
    ModelParams,
    NumericalBlowup,
    PotentialKind,
    RunConfig,
    SimState,
    SolverError,
    StepRejected,
    Stepper,
    Stretching,
    ValidationError,
    VariantConfig,
    bulk_energy_density,
    conjugate_exponent,
    desk_config,
    energy_ledger,
    gamma_exponent,
    initial_state,
    load_config,
    max_principle_bound,
    parse_config,
    parse_exponent,
    potential,
    read_snapshot,
    serialize_config,
    serrin_exponent,
    simulate,
    zero_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
