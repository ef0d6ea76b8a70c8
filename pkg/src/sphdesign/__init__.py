"""Exact verification of spherical 5-designs and their minimal-type structure.

Everything is computed in exact arithmetic: rationals and single-radical
quadratic extensions.  The package certifies design strength and
tightness, verifies or refutes minimal-type functionals, derives level
codes, extracts equiangular tight frames and strongly regular graphs
from decompositions, verifies the associated coherent configurations and
their idempotent bases, and evaluates the arithmetic dimension filter.
"""

from .codes import BinaryCode, nordstrom_robinson
from .configs import (
    CATALOG_NAMES,
    GramData,
    PointConfig,
    antipodal_split,
    catalog,
    gram,
    load_config,
    save_config,
)
from .derived import DerivedFamily, derive, derived_angle_map, verify_derived_strength
from .design import (
    DesignReport,
    ValencyTable,
    design_strength,
    moment_check,
    tight_bound,
    valencies,
)
from .dimfilter import (
    DensityReport,
    FilterVerdict,
    count_valid_m,
    excluded_dims,
    thm37_filter,
)
from .minimaltype import (
    Found,
    MinimalTypeCertificate,
    Refutation,
    Refuted,
    Unknown,
    necessary_filters,
    search_alpha,
    valency_filter,
    verify_certificate,
)
from .scalars import (
    QuadExt,
    Rational,
    SqFreeDecomp,
    format_scalar,
    parse_scalar,
    quad_sqrt,
    square_free_decompose,
)
from .structure import (
    CoherentConfigReport,
    Decomposition,
    PackingReport,
    QPolyReport,
    SRGParams,
    build_coherent_config,
    decompose,
    levenstein_bound,
    lift,
    packing_report,
    srg_family_params,
    srg_from_two_distance,
    verify_q_poly,
    welch_bound,
)

__version__ = "0.1.0"
