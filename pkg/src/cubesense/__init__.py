"""Signed hypercube matrices, induced-subgraph degree bounds and boolean sensitivity measures."""
from .boolfn import (
    MeasureReport,
    MultilinearPoly,
    TruthTable,
    block_sensitivity,
    degree,
    flip,
    gallery,
    local_block_sensitivity,
    local_sensitivity,
    measures,
    multilinear_expand,
    sensitivity,
)
from .bridge import GLInstance, gl_map, verify_bs_chain, verify_gl, verify_sensitivity_degree
from .cube import (
    DegreeReport,
    VertexSet,
    explore_g,
    find_tight_witness,
    induced_degrees,
    neighbors,
    spectral_certificate,
    star_plus_isolated,
    verify_theorem1,
)
from .estimators import ComplexityMeasures, InducedSubgraphProfile
from .spectral import (
    SignedMatrix,
    Spectrum,
    build_an,
    check_degree_bound,
    check_interlacing,
    check_support,
    full_spectrum,
    lambda_max,
    principal_submatrix,
    verify_square_identity,
)

__version__ = "0.1.0"
