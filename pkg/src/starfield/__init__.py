"""Exact deformation quantization of groupoid algebras.

Fedosov star products on symplectic tori and planes, convolution algebras of
finite, transformation and torus-pair groupoids with their noncommutative
Poisson structure, the deformed groupoid product and its trace, and Rieffel
deformations of tori.  All arithmetic is over the rationals and the Gaussian
rationals, so every identity is checked by exact equality.
"""
from .scalars import ONE, ZERO, GaussRational, HbarSeries, PhaseScalar, Q, format_rational, parse_rational
from .functions import PolyFn, PolySpace, TrigFn, TrigSpace, trig_average, trig_derive
from .weyl import SymplecticData, WeylSection, circ, curvature, delta, delta_inv, standard_omega
from .fedosov import AbelianConnection, abelian_d, base_star, build_abelian_connection, poisson_matrix, quantize
from .groupoid import (
    FiniteGroup,
    FiniteGroupoid,
    GroupoidError,
    GroupoidFunction,
    TorusPairGroupoidModel,
    TransformationGroupoidModel,
    convolve,
    leaf_differential,
    model_from_json,
    unit_function,
)
from .poisson import PoissonTensor, hochschild_coboundary, nc_poisson, p2_hat, verify_poisson_structure
from .gpdstar import QuantizedGroupoidAlgebra, crossed_star, gpd_star, semiclassical_check, trace
from .rieffel import (
    CrossedDiracAlgebra,
    RieffelAlgebra,
    RieffelElement,
    crossed_dirac_star,
    rieffel_involution,
    rieffel_star,
    semiclassical_slope,
)
from .verify import RunConfig, run_report, run_suite

__version__ = "0.1.0"

__all__ = [
    "ONE",
    "ZERO",
    "GaussRational",
    "HbarSeries",
    "PhaseScalar",
    "Q",
    "format_rational",
    "parse_rational",
    "PolyFn",
    "PolySpace",
    "TrigFn",
    "TrigSpace",
    "trig_average",
    "trig_derive",
    "SymplecticData",
    "WeylSection",
    "circ",
    "curvature",
    "delta",
    "delta_inv",
    "standard_omega",
    "AbelianConnection",
    "abelian_d",
    "base_star",
    "build_abelian_connection",
    "poisson_matrix",
    "quantize",
    "FiniteGroup",
    "FiniteGroupoid",
    "GroupoidError",
    "GroupoidFunction",
    "TorusPairGroupoidModel",
    "TransformationGroupoidModel",
    "convolve",
    "leaf_differential",
    "model_from_json",
    "unit_function",
    "PoissonTensor",
    "hochschild_coboundary",
    "nc_poisson",
    "p2_hat",
    "verify_poisson_structure",
    "QuantizedGroupoidAlgebra",
    "crossed_star",
    "gpd_star",
    "semiclassical_check",
    "trace",
    "CrossedDiracAlgebra",
    "RieffelAlgebra",
    "RieffelElement",
    "crossed_dirac_star",
    "rieffel_involution",
    "rieffel_star",
    "semiclassical_slope",
    "RunConfig",
    "run_report",
    "run_suite",
]
