"""Constants for the poincare_relations package."""

from collections.abc import Sequence
from typing import Final

PACKAGE: Final[str] = "poincare_relations"

# Working precision (bits) for all analytic sums
DEFAULT_PRECISION_BITS: Final[int] = 128
MIN_PRECISION_BITS: Final[int] = 64
DEFAULT_TARGET_ERROR: Final[float] = 1e-9
DEFAULT_SERIES_ORDER: Final[int] = 64  # Terms beyond the constant term
DEFAULT_THREADS: Final[int] = 1

# c-sum cutoffs
DEFAULT_MAX_CUTOFF: Final[int] = 200_000  # Largest modulus a c-sum may reach
HEURISTIC_CUTOFF: Final[int] = 4_000  # Moduli summed for weight 2 (per unit of N)
SUMMATION_CHUNK_SIZE: Final[int] = 64  # Moduli per partial sum, fixed for determinism
KLOOSTERMAN_CACHE_SIZE: Final[int] = 512

# Bessel / incomplete gamma series
SERIES_MAX_TERMS: Final[int] = 20_000
SERIES_RATIO_LIMIT: Final[float] = 0.5  # Geometric tail ratio required to stop

# Verification verdict thresholds
REFUTATION_MARGIN: Final[int] = 10  # residual > margin * bound => refuted

# Level-one weakly holomorphic forms: E_s / Delta^r * F(j)
ADMISSIBLE_EISENSTEIN_WEIGHTS: Final[Sequence[int]] = (0, 4, 6, 8, 10, 14)

# Output formats
OUTPUT_JSON: Final[str] = "json"
OUTPUT_CSV: Final[str] = "csv"
OUTPUT_PRETTY: Final[str] = "pretty"
OUTPUT_FORMATS: Final[Sequence[str]] = (OUTPUT_JSON, OUTPUT_CSV, OUTPUT_PRETTY)

# Environment overrides
ENV_PRECISION: Final[str] = "POINCARE_RELATIONS_PRECISION"
ENV_THREADS: Final[str] = "POINCARE_RELATIONS_THREADS"

# CLI exit codes
EXIT_OK: Final[int] = 0
EXIT_REFUTED: Final[int] = 1
EXIT_INVALID_INPUT: Final[int] = 2
EXIT_UNREACHABLE_TOLERANCE: Final[int] = 3

# Coefficient families (CLI names)
FAMILY_CLASSICAL: Final[str] = "P"
FAMILY_MAASS_POSITIVE: Final[str] = "Qplus"
FAMILY_MAASS_ZERO: Final[str] = "Qzero"
FAMILY_MAASS_NEGATIVE: Final[str] = "Qminus"
COEFF_FAMILIES: Final[Sequence[str]] = (
    FAMILY_CLASSICAL,
    FAMILY_MAASS_POSITIVE,
    FAMILY_MAASS_ZERO,
    FAMILY_MAASS_NEGATIVE,
)

# Relation provenance values
PROVENANCE_COROLLARY: Final[str] = "corollary"
PROVENANCE_SOLVER: Final[str] = "solver"
PROVENANCE_USER: Final[str] = "user"

# Verification verdicts
VERDICT_CONSISTENT: Final[str] = "consistent"
VERDICT_REFUTED: Final[str] = "refuted"
VERDICT_INCONCLUSIVE: Final[str] = "inconclusive"

# Relation search methods
METHOD_KERNEL: Final[str] = "kernel"
METHOD_SOLVER: Final[str] = "solver"
