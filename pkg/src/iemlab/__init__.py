"""Interval exchange maps: exact renormalization and the transfer equation.

The package computes with interval exchange maps in three exact arithmetic
modes (rational, radius-tracked real, algebraic over a Perron root), runs
elementary and accelerated induction with the full integer cocycle, sums
functions over return towers, measures the diophantine-type growth
conditions that govern solvability, and constructs solutions of
Psi - Psi o T = Phi with certified bounds.

Quick tour:

    >>> import iemlab
    >>> t = iemlab.golden_iem()
    >>> trace = iemlab.InductionTrace(t, mode="accelerated")
    >>> trace.norm_q(0, 10)
    233
"""

from .birkhoff import (
    DecayProfile,
    OrbitDecomposition,
    decay_profile,
    direct_birkhoff_sum,
    gamma_matrix,
    mean_decompose,
    orbit_decomposition,
    special_sum,
    sup_profile,
)
from .cohomology import (
    BoundednessCertificate,
    PrimitiveCandidate,
    PsiOrbitTable,
    boundedness_certificate,
    build_primitive,
    coboundary_roundtrip,
    delta_p,
    functoriality_residual,
    lambda_correction,
    p0_primitive,
    psi_on_orbit,
)
from .core import Iem, KeaneVerdict, PermutationPair, rational_iem
from .diagram import RauzyArrow, RauzyDiagram, arrow_name, rauzy_move
from .errors import (
    DegenerateFit,
    HorizonExceeded,
    IemlabError,
    KeaneViolation,
    NoGap,
    NotAdmissible,
    NotInGammaStar,
    NotPrimitive,
    NotSummable,
    ParseError,
    PrecisionExhausted,
    RangeError,
    SeriesDiverging,
    SingularQuotient,
    UnsupportedKind,
)
from .exact import (
    EIGEN,
    RATIONAL,
    REAL,
    Enclosure,
    FieldElement,
    NumberField,
    TrackedReal,
    to_float,
)
from .functions import PiecewiseFunction, PolyPiece, SampledPiece
from .induction import (
    InductionTrace,
    SelfSimilarity,
    fibonacci,
    golden_iem,
    loop_matrix,
    self_similar_iem,
)
from .roth import (
    RothReport,
    StableSpaceEstimate,
    condition_a_profile,
    condition_b_theta,
    condition_c_profile,
    estimate_stable_space,
    opnorm_on_mean_zero,
    roth_report,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # arithmetic
    "RATIONAL",
    "REAL",
    "EIGEN",
    "TrackedReal",
    "NumberField",
    "FieldElement",
    "Enclosure",
    "to_float",
    # maps
    "PermutationPair",
    "Iem",
    "KeaneVerdict",
    "rational_iem",
    "golden_iem",
    "self_similar_iem",
    "loop_matrix",
    "SelfSimilarity",
    "fibonacci",
    # moves and classes
    "rauzy_move",
    "arrow_name",
    "RauzyArrow",
    "RauzyDiagram",
    # induction
    "InductionTrace",
    # functions and sums
    "PiecewiseFunction",
    "PolyPiece",
    "SampledPiece",
    "special_sum",
    "gamma_matrix",
    "mean_decompose",
    "orbit_decomposition",
    "OrbitDecomposition",
    "decay_profile",
    "DecayProfile",
    "sup_profile",
    "direct_birkhoff_sum",
    # growth diagnostics
    "opnorm_on_mean_zero",
    "condition_a_profile",
    "condition_b_theta",
    "condition_c_profile",
    "estimate_stable_space",
    "StableSpaceEstimate",
    "roth_report",
    "RothReport",
    # solver
    "p0_primitive",
    "lambda_correction",
    "delta_p",
    "build_primitive",
    "PrimitiveCandidate",
    "functoriality_residual",
    "psi_on_orbit",
    "PsiOrbitTable",
    "boundedness_certificate",
    "BoundednessCertificate",
    "coboundary_roundtrip",
    # errors
    "IemlabError",
    "PrecisionExhausted",
    "KeaneViolation",
    "NotAdmissible",
    "HorizonExceeded",
    "RangeError",
    "NotPrimitive",
    "UnsupportedKind",
    "DegenerateFit",
    "NoGap",
    "SingularQuotient",
    "SeriesDiverging",
    "NotSummable",
    "NotInGammaStar",
    "ParseError",
]
