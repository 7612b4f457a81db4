"""Tunnel-coupled annular condensates: stationary states, linear stability,
real-time dynamics, and the 1D double-well splitting problem."""

from ringbdg.ring_model import (
    Parity,
    RingParams,
    UniformState,
    epsilon,
    stationary_states,
)
from ringbdg.spectra import (
    BdgBlock,
    ModeFrequency,
    StabilityReport,
    bdg_block,
    bdg_eigenvalues,
    mode_frequency,
    omega1,
    omega2,
    stability_report,
)
from ringbdg.ring_dynamics import (
    BlowUpError,
    EvolutionRecord,
    GrowthFit,
    NoGrowthWindowError,
    RingFields,
    RingGrid,
    evolve,
    measure_growth_rate,
    prepare_uniform,
    seed_noise,
    step,
)
from ringbdg.double_well import (
    ConvergenceError,
    DomainError,
    DWellParams,
    DWellSolution,
    SplittingCurve,
    SplittingRow,
    delta_as,
    linear_oracle,
    potential,
    solve_stationary,
    sweep_g,
)

__version__ = "0.1.0"
