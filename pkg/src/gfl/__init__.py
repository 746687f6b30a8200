"""Exact non-frame certificates and frame-set scanning for B-spline Gabor systems."""

from .bspline import PiecewisePolynomial, bspline, convolve, eval_exact, eval_float, integrate
from .exact import (
    NullspaceResult,
    Rational,
    RationalMatrix,
    format_rational,
    make_rational,
    nullspace_exact,
    parse_rational,
    rank_exact,
)
from .gabor import (
    EvaluationPoint,
    LatticeParams,
    lattice_params,
    min_singular_value,
    phi_matrix_exact,
    phi_matrix_float,
    theta_matrix,
    theta_matrix_exact,
    zak,
    zz_matrix,
)
from .obstruction import (
    CertificateError,
    ObstructionCertificate,
    certify_conj1,
    certify_conj2,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "CertificateError", "EvaluationPoint", "LatticeParams", "NullspaceResult",
    "ObstructionCertificate", "PiecewisePolynomial", "Rational", "RationalMatrix",
    "bspline", "certify_conj1", "certify_conj2", "convolve", "eval_exact",
    "eval_float", "format_rational", "integrate", "lattice_params", "make_rational",
    "min_singular_value", "nullspace_exact", "parse_rational", "phi_matrix_exact",
    "phi_matrix_float", "rank_exact", "theta_matrix", "theta_matrix_exact",
    "verify_certificate", "zak", "zz_matrix",
]
