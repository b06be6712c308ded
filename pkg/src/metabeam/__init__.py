"""metabeam: physics-compliant coupled-dipole modeling and near-field
beam-focusing analytics for 2D waveguide-fed metasurface antennas.

The library covers the full chain from element layout and guided-wave
excitation through the dense coupled solve to scattered near fields, the
closed-form gain and beam-depth laws, and phase optimization on the unit
circle manifold.
"""

__version__ = "0.1.0"

from .analytics import (
    BeamDepthProfile,
    FieldScaling,
    ScalingReport,
    alpha_for_fraction,
    alpha_of_offset,
    analytic_gain,
    beamdepth_gain,
    beamdepth_limits,
    beamdepth_profile,
    discrete_beamdepth_gain,
    field_scaling,
    scaling_report,
    simulated_onaxis_gain,
    transition_radius,
)
from .dipoles import (
    CoupledModel,
    PolarizabilitySet,
    SolverError,
    apply_radiation_reaction,
    coupling_matrix,
    dump_solution_csv,
    excitation_field,
    lorentzian_polarizability,
    radiation_damping,
    solve_dipoles,
    solve_model,
    supplied_power,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ResultTable,
    parse_config,
    run_beamdepth,
    run_gain_vs_d,
    run_layout_export,
)
from .fields import (
    FieldSample,
    ObservationPoint,
    channel_matrix,
    onaxis_fields,
    projected_focusing_vectors,
    projection_matrix,
    realized_gain,
    received_signal,
    scattered_field,
    write_field_grid_csv,
)
from .geometry import (
    ApertureLayout,
    PhysicalConstants,
    build_layout,
    surface_density,
    write_layout_csv,
)
from .optimize import (
    OptimizerTrace,
    focusing_phases,
    objective_and_gradient,
    optimize_phases,
    write_trace_csv,
)
from .special import (
    NoRootError,
    beamdepth_integral,
    hankel2,
    smallest_positive_root,
)
