"""
Poincare series coefficients, exact q-expansions and linear relations.

The numeric side evaluates Kloosterman-Bessel c-sums with certified error
bounds; the exact side builds weakly holomorphic forms on SL_2(Z) and reads
off the relations among cuspidal Poincare series.
"""

from .config import RunConfig, load_run_config
from .errors import (
    ConfigurationError,
    InvalidRelationError,
    InvalidSeriesError,
    InvalidWeightError,
    PoincareRelationsError,
    TruncationError,
    UnreachableTolerance,
)
from .exactarith import WeightProfile
from .poincare import CoeffResult, classical_coeff
from .qseries import PrincipalPart, QSeries
from .relations import Relation, VerificationReport

__all__ = [
    "CoeffResult",
    "ConfigurationError",
    "InvalidRelationError",
    "InvalidSeriesError",
    "InvalidWeightError",
    "PoincareRelationsError",
    "PrincipalPart",
    "QSeries",
    "Relation",
    "RunConfig",
    "TruncationError",
    "UnreachableTolerance",
    "VerificationReport",
    "WeightProfile",
    "classical_coeff",
    "load_run_config",
]
