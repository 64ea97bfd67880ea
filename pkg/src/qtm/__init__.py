"""Self-contained quantum thermal machines with reset-model baths.

Three-qubit absorption refrigerator and two-qubit engine driving a ladder
weight, with steady-state and time-domain solvers and the reversible-limit
checks built on them.
"""

from .errors import (
    ConfigError,
    DegenerateSteadyStateError,
    IntegrationError,
    NumericalCheckError,
    SpecError,
    TruncationError,
    UndefinedPerformanceError,
)
from .liouvillian import (
    Superoperator,
    assemble_engine_liouvillian,
    assemble_fridge_liouvillian,
    coherent_generator,
    reset_dissipator,
)
from .machines import EngineSpec, FridgeSpec, QubitSpec
from .observables import CurrentsReport, engine_report, fridge_report
from .solvers import evolve, fridge_steady_state, oracle_crosscheck, steady_state
from .sweeps import (
    carnot_check_engine,
    carnot_check_fridge,
    carnot_cop,
    carnot_efficiency_engine,
    reversibility_point_engine,
    reversibility_point_fridge,
    run_engine,
    sweep_fridge,
)

__version__ = "0.1.0"
