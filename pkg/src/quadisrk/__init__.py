"""quadisrk: sample-based iterative model order reduction for SISO LTI systems.

The package builds reduced-order models either intrusively (projection
with system matrices) or purely from transfer-function samples taken at
quadrature nodes and adaptively updated shifts.  A FastAPI service and a
CLI wrap the core for remote and scripted use.
"""

__version__ = "0.1.0"

from .benchmarks import (
    METHODS,
    MODEL_KINDS,
    BenchmarkSpec,
    SweepResult,
    SweepRow,
    generate_model,
    run_sweep,
    sweep_to_csv,
)
from .errors import (
    DegenerateShift,
    IllConditioned,
    InvalidModel,
    InvalidRange,
    InvalidSpec,
    MaxIterExceeded,
    MissingSample,
    NotPSD,
    PencilFailure,
    QuadISRKError,
    RankDeficientData,
    SingularShift,
    SizeMismatch,
    UnstableSystem,
)
from .interpolation import (
    ShiftSet,
    default_initial_shifts,
    pair_conjugates,
    rational_krylov_basis,
    real_basis_transform,
)
from .loewner import (
    LoewnerDataBlock,
    assemble_rom,
    build_data_block,
    intrusive_data_block,
    load_block,
    loewner_realization,
    save_block,
)
from .lti import (
    ReducedModel,
    StateSpaceModel,
    eval_transfer,
    is_asymptotically_stable,
    load_model,
    model_from_dict,
    model_to_dict,
    poles,
    rom_from_dict,
    rom_to_dict,
    save_model,
    shifted_solve,
)
from .lyapunov import Gramian, GramianFactor, factor, solve_lyapunov_P, solve_lyapunov_Q
from .norms import error_system, h2_norm, hinf_norm, relative_errors
from .quadrature import (
    QuadratureRule,
    approx_factor_rows,
    approx_gramian_Q,
    load_rule,
    save_rule,
    trapezoid_rule,
)
from .reduction import (
    IterationRecord,
    IterationTrace,
    ReductionConfig,
    irka,
    isrk,
    quad_isrk,
    shift_change,
    trace_to_csv,
    update_shifts,
)
from .sampling import (
    FrequencyResponseOracle,
    SampleLog,
    caching_oracle,
    load_samples,
    replay_oracle,
    save_samples,
    state_space_oracle,
)

__all__ = [
    "__version__",
    "BenchmarkSpec",
    "DegenerateShift",
    "FrequencyResponseOracle",
    "Gramian",
    "GramianFactor",
    "IllConditioned",
    "InvalidModel",
    "InvalidRange",
    "InvalidSpec",
    "IterationRecord",
    "IterationTrace",
    "LoewnerDataBlock",
    "MaxIterExceeded",
    "METHODS",
    "MissingSample",
    "MODEL_KINDS",
    "NotPSD",
    "PencilFailure",
    "QuadISRKError",
    "QuadratureRule",
    "RankDeficientData",
    "ReducedModel",
    "ReductionConfig",
    "SampleLog",
    "ShiftSet",
    "SingularShift",
    "SizeMismatch",
    "StateSpaceModel",
    "SweepResult",
    "SweepRow",
    "UnstableSystem",
    "approx_factor_rows",
    "approx_gramian_Q",
    "assemble_rom",
    "build_data_block",
    "caching_oracle",
    "default_initial_shifts",
    "error_system",
    "eval_transfer",
    "factor",
    "generate_model",
    "h2_norm",
    "hinf_norm",
    "intrusive_data_block",
    "irka",
    "is_asymptotically_stable",
    "isrk",
    "load_block",
    "load_model",
    "load_rule",
    "load_samples",
    "loewner_realization",
    "model_from_dict",
    "model_to_dict",
    "pair_conjugates",
    "poles",
    "quad_isrk",
    "rational_krylov_basis",
    "real_basis_transform",
    "relative_errors",
    "replay_oracle",
    "rom_from_dict",
    "rom_to_dict",
    "run_sweep",
    "save_block",
    "save_model",
    "save_rule",
    "save_samples",
    "shift_change",
    "shifted_solve",
    "solve_lyapunov_P",
    "solve_lyapunov_Q",
    "state_space_oracle",
    "sweep_to_csv",
    "trace_to_csv",
    "trapezoid_rule",
    "update_shifts",
]
