"""Simplicial Hodge Laplacians, spectral expansion and high-dimensional mixing."""

from .complex import SimplicialComplex, adjacency_relation, build_from_facets, degree, orientation_sign
from .errors import BoundViolation, CertificationError, HdxError, NumericalError, ValidationError
from .generators import complete_skeleton, linial_meshulam, load_complex, random_disjoint_family, save_complex
from .mixing import (
    VertexFamily,
    c_d,
    cjl_constant,
    count_galleries_bruteforce,
    count_galleries_operator,
    descent_check,
    from_j_to_l_check,
    mixing_check,
)
from .spectral import betti, certificate_vector, certify, nontrivial_spectrum, spectral_summary

__version__ = "0.1.0"
