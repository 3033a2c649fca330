"""Vector and operator trigonometry applied to Bell-type inequalities."""

from .config import DomainError, Tolerances, override_tolerances, tolerances
from .geometry import (
    CosineTriple,
    GramReport,
    StateVector,
    TriangleReport,
    angle_between,
    gram_feasibility,
    gram_matrix,
    inner_product,
    normalize,
    random_unit_vector,
    random_unit_vectors,
    realize_cosines,
    triangle_check,
)
from .optrig import (
    AccretivityReport,
    MinmaxReport,
    SpdOperator,
    accretivity_condition,
    cos_phi,
    cos_phi_numeric,
    minmax_check,
    random_spd,
    sin_phi,
    sin_phi_numeric,
)
from .inequalities import (
    TSIRELSON,
    ChshConfig,
    ChshReport,
    Convention,
    Region,
    WignerConfig,
    WignerReport,
    bell_1964,
    chsh_bound_curve,
    chsh_one_parameter_family,
    chsh_quantum,
    chsh_sum,
    classify_chsh,
    planar_family_config,
    wigner_equality_sides,
    wigner_identity_gap,
    wigner_inequality,
)
from .hvsim import (
    ChshAssignment,
    DomainDistribution,
    LhvDomain,
    enumerate_assignments,
    enumerate_domains,
    estimate_correlation,
    lhv_correlation,
    lhv_wigner_check,
    sample_singlet,
)
from .atlas import (
    Family,
    ParamRange,
    SweepSpec,
    ViolationRecord,
    export_atlas,
    maximize_chsh,
    read_atlas,
    sweep_chsh,
    sweep_wigner,
    trace_boundary,
)

__version__ = "0.1.0"
