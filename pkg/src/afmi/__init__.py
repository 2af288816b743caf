"""Dynamics toolkit for an additional-food predator-prey model.

The planar system couples logistic prey growth with a mutual-interference
(Beddington-DeAngelis) predator that also receives a constant additional
food supply ``xi``.  The package computes equilibria and their stability,
integrates trajectories, traces the saddle separatrix and basins of
attraction, and locates the transcritical, saddle-node, Hopf and
homoclinic bifurcations in ``xi``.
"""
from .bifurcation import (
    BifurcationEvent,
    BifurcationKind,
    SotomayorRecord,
    SweepDataset,
    event_to_json,
    locate_homoclinic,
    locate_hopf,
    locate_saddle_node,
    locate_transcritical,
    saddle_node_sufficient_check,
    sotomayor_quantities,
    sweep,
    sweep_to_csv,
)
from .equilibria import (
    Equilibrium,
    EquilibriumKind,
    QuadraticCoefficients,
    RegimeClass,
    StabilityClass,
    all_equilibria,
    boundary_equilibria,
    interior_equilibria,
    quadratic_coefficients,
    regime_classify,
    transcritical_threshold,
    two_interior_window,
)
from .errors import (
    AfmiError,
    BracketError,
    ConfigError,
    DomainError,
    InfeasibleGeometryError,
    LayoutError,
    NoReturnError,
    ParameterError,
    PreconditionError,
    SingularNullclineError,
    StaleEquilibriumError,
    StiffnessError,
)
from .integrate import (
    AttractorId,
    AttractorKind,
    IntegratorSettings,
    Termination,
    Trajectory,
    attractor_catalog,
    classify_batch,
    classify_omega_limit,
    integrate,
    trajectory_to_csv,
)
from .manifolds import (
    BasinEstimate,
    Branch,
    CycleStability,
    GridSpec,
    LimitCycleResult,
    Manifold,
    Section,
    Topology,
    TopologyReport,
    basin_fraction,
    basin_to_json,
    cycle_to_csv,
    find_limit_cycle,
    manifold_to_csv,
    manifold_topology,
    trace_manifold,
)
from .model import (
    EquivalentParams,
    ModelParams,
    dfield_dxi,
    equivalent_field,
    hessians,
    is_bounded_regime,
    jacobian,
    predator_nullcline_y,
    prey_nullcline_y,
    slope_comparison,
    vector_field,
)
from .stability import (
    StabilityReport,
    stability_report,
    saddle_sufficient_check,
    interior_focus_case,
    trace_det_simplified,
)
from .svg import emit_portrait, emit_regime_map, emit_sweep

__version__ = "0.1.0"
