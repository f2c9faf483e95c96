"""Linear relations among cuspidal Poincare series, exact and numeric."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import voluptuous as vol
from sympy import Matrix, Rational

from .config import RunConfig
from .const import (
    DEFAULT_SERIES_ORDER,
    METHOD_KERNEL,
    METHOD_SOLVER,
    PROVENANCE_COROLLARY,
    PROVENANCE_SOLVER,
    PROVENANCE_USER,
    REFUTATION_MARGIN,
    VERDICT_CONSISTENT,
    VERDICT_INCONCLUSIVE,
    VERDICT_REFUTED,
)
from .errors import InvalidRelationError, UnreachableTolerance
from .exactarith import WeightProfile, admissible_pair, dim_cusp_forms_level1
from .helpers import to_fraction, unit_roundoff, working_context
from .poincare import classical_coeff
from .qseries import (
    PrincipalPart,
    QSeries,
    cusp_basis_level1,
    delta,
    eisenstein,
    j_invariant,
    j_polynomial_of,
    series_pow,
    tau_coeffs,
)

if TYPE_CHECKING:
    from collections.abc import Mapping

_LOGGER = logging.getLogger(__name__)

PROVENANCES = (PROVENANCE_COROLLARY, PROVENANCE_SOLVER, PROVENANCE_USER)

RELATION_SCHEMA = vol.Schema(
    {
        vol.Required("k"): vol.Coerce(to_fraction),
        vol.Optional("N", default=1): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Required("coeffs"): vol.All(
            {vol.Coerce(int): vol.Coerce(to_fraction)}, vol.Length(min=1)
        ),
        vol.Optional("provenance", default=PROVENANCE_USER): vol.In(PROVENANCES),
    }
)


@dataclass(frozen=True, slots=True)
class Relation:
    """Coefficients alpha_m asserting sum_m alpha_m P(m, k, N) = 0."""

    k: Fraction
    N: int
    coeffs: dict[int, Fraction]
    provenance: str = PROVENANCE_USER

    def __post_init__(self) -> None:
        """Validate indices, coefficients and provenance."""
        if not self.coeffs or not any(self.coeffs.values()):
            msg = "A relation needs at least one nonzero coefficient"
            raise InvalidRelationError(msg)
        for m in self.coeffs:
            if not isinstance(m, int) or m < 1:
                msg = f"Relation indices must be positive integers, got {m!r}"
                raise InvalidRelationError(msg)
        if self.provenance not in PROVENANCES:
            msg = f"Unknown provenance {self.provenance!r}"
            raise InvalidRelationError(msg)
        if not isinstance(self.N, int) or self.N < 1:
            msg = f"Level must be a positive integer, got {self.N!r}"
            raise InvalidRelationError(msg)

    @classmethod
    def create(
        cls,
        k: Any,
        coeffs: Mapping[int, Any],
        N: int = 1,  # noqa: N803
        provenance: str = PROVENANCE_USER,
    ) -> Relation:
        """Build a relation, dropping zero coefficients and sorting the support."""
        values = {int(m): to_fraction(a) for m, a in coeffs.items()}
        return cls(
            k=to_fraction(k),
            N=N,
            coeffs={m: a for m, a in sorted(values.items()) if a},
            provenance=provenance,
        )

    def __hash__(self) -> int:
        return hash((self.k, self.N, tuple(sorted(self.coeffs.items()))))

    @property
    def support(self) -> list[int]:
        """Return the indices m with alpha_m != 0, ascending."""
        return sorted(m for m, a in self.coeffs.items() if a)

    def scaled(self, factor: Any) -> Relation:
        """Return the relation multiplied by a nonzero rational."""
        value = to_fraction(factor)
        if value == 0:
            msg = "Cannot scale a relation by zero"
            raise InvalidRelationError(msg)
        return Relation.create(
            self.k,
            {m: a * value for m, a in self.coeffs.items()},
            N=self.N,
            provenance=self.provenance,
        )

    def normalized(self) -> Relation:
        """Scale so that the largest index M carries alpha_M = M^(k-1)."""
        top = self.support[-1]
        return self.scaled(_integral_power(self.k, top) / self.coeffs[top])

    def principal_part(self) -> PrincipalPart:
        """Return sum_m alpha_m / m^(k-1) q^-m."""
        return relation_to_principal_part(self)

    def to_json_dict(self) -> dict[str, Any]:
        """Serialize as {k, N, coeffs: {m: "p/q"}, provenance}."""
        return {
            "k": str(self.k),
            "N": self.N,
            "coeffs": {str(m): str(a) for m, a in sorted(self.coeffs.items())},
            "provenance": self.provenance,
        }


def relation_from_json_dict(data: Mapping[str, Any]) -> Relation:
    """Validate and load a relation written by Relation.to_json_dict."""
    try:
        valid = RELATION_SCHEMA(dict(data))
    except (vol.Invalid, ZeroDivisionError) as err:
        msg = f"Invalid relation JSON: {err}"
        raise InvalidRelationError(msg) from err
    return Relation.create(
        valid["k"], valid["coeffs"], N=valid["N"], provenance=valid["provenance"]
    )


@dataclass(frozen=True, slots=True)
class Residual:
    """The n-th coefficient of sum_m alpha_m P(m) with its error budget."""

    n: int
    value: Any | None  # mpf, None when a coefficient could not be certified
    bound: Any | None
    largest_term: Any | None
    verdict: str
    note: str = ""

    @property
    def ratio(self) -> Any | None:
        """Return |residual| / largest term magnitude."""
        if self.value is None or not self.largest_term:
            return None
        return abs(self.value) / self.largest_term


@dataclass(frozen=True, slots=True)
class VerificationReport:
    """Per-n residuals and the overall verdict."""

    relation: Relation
    residuals: dict[int, Residual] = field(default_factory=dict)
    verdict: str = VERDICT_INCONCLUSIVE

    @property
    def consistent(self) -> bool:
        """Return True when every residual lies within its bound."""
        return self.verdict == VERDICT_CONSISTENT

    @property
    def refuted(self) -> bool:
        """Return True when some residual exceeds its bound by the refutation margin."""
        return self.verdict == VERDICT_REFUTED


def _integral_power(k: Fraction, m: int) -> Fraction:
    """Return m^(k-1) for integral k."""
    if k.denominator != 1:
        msg = f"m^(k-1) is irrational for half-integral weight {k}"
        raise InvalidRelationError(msg)
    return Fraction(m) ** (k.numerator - 1)


def _require_level_one_even(k: Any, N: int = 1) -> int:  # noqa: N803
    """Return k as an int after checking level 1 and even weight >= 4."""
    weight = to_fraction(k)
    if N != 1:
        msg = f"Exact relation construction supports level 1 only, got N={N}"
        raise InvalidRelationError(msg)
    if weight.denominator != 1 or weight.numerator % 2:
        msg = f"Exact relation construction needs an even integral weight, got {weight}"
        raise InvalidRelationError(msg)
    if weight.numerator == 2:  # noqa: PLR2004
        msg = "Weight 2 has no admissible E_s / Delta^r with r >= 1"
        raise InvalidRelationError(msg)
    if weight.numerator < 4:  # noqa: PLR2004
        msg = f"Exact relation construction needs k >= 4, got {weight}"
        raise InvalidRelationError(msg)
    return weight.numerator


def relation_to_principal_part(rel: Relation) -> PrincipalPart:
    """Return the principal part sum_m alpha_m / m^(k-1) q^-m of the dual form."""
    return PrincipalPart.from_mapping(
        {m: a / _integral_power(rel.k, m) for m, a in rel.coeffs.items()}
    )


def principal_part_to_relation(
    k: Any,
    pp: PrincipalPart,
    N: int = 1,  # noqa: N803
    provenance: str = PROVENANCE_USER,
) -> Relation:
    """Return alpha_m = beta_m m^(k-1); the inverse of relation_to_principal_part."""
    weight = to_fraction(k)
    return Relation.create(
        weight,
        {m: beta * _integral_power(weight, m) for m, beta in pp.terms.items()},
        N=N,
        provenance=provenance,
    )


def _match_poles(
    k: int, targets: Mapping[int, Fraction], top: int, order: int
) -> QSeries | None:
    """
    Build (E_s / Delta^r) F(j) with q^-e coefficient targets[e] for r <= e <= top.

    Missing targets count as zero. Returns None when top < r and a nonzero
    target is requested.
    """
    s, r = admissible_pair(k)
    if top < r:
        return None
    degree = top - r
    working = order + r + degree + 2
    base = tau_coeffs(r, s, working)
    j_series = j_invariant(working)
    powers = [base]
    for _ in range(degree):
        powers.append(powers[-1] * j_series)
    form = QSeries.zero(working)
    for e in range(degree, -1, -1):
        pole = r + e
        gap = targets.get(pole, Fraction(0)) - form.coefficient(-pole)
        if gap:
            form += powers[e].scale(gap)
            _LOGGER.debug(
                "Pole q^-%s: added %s * E_%s/Delta^%s j^%s", pole, gap, s, r, e
            )
    return form.truncate(order)


def solve_principal_part_level1(
    k: int, pp: PrincipalPart, order: int = DEFAULT_SERIES_ORDER
) -> QSeries | None:
    """
    Return the weight 2-k form on SL_2(Z) with principal part pp, or None.

    Only strictly negative powers are matched; the constant term is free.
    The form is unique when it exists, since no nonzero weight 2-k form is
    holomorphic at infinity.
    """
    weight = _require_level_one_even(k)
    if not pp:
        msg = "Principal part must be nonempty"
        raise InvalidRelationError(msg)
    form = _match_poles(weight, pp.terms, pp.degree, max(order, 0))
    if form is None:
        _LOGGER.debug("Pole order %s is below r for k=%s: no form", pp.degree, weight)
        return None
    if form.principal_part() != pp:
        _LOGGER.debug(
            "Principal part %s is obstructed for k=%s", pp.to_json_dict(), weight
        )
        return None
    return form


def corollary_relation(k: int) -> Relation:
    """
    Return alpha_m = tau(d+1, s; -m) m^(k-1) for m = 1..d+1, s = 14 - k + 12d.

    d is dim S_k(SL_2(Z)); the relation is normalized with alpha_(d+1) = (d+1)^(k-1).
    """
    weight = _require_level_one_even(k)
    d = dim_cusp_forms_level1(weight)
    if d == 0:
        msg = f"dim S_{weight} = 0: every Poincare series vanishes, no forced relation"
        raise InvalidRelationError(msg)
    s = 14 - weight + 12 * d
    series = tau_coeffs(d + 1, s, -1)
    coeffs = {
        m: series.coefficient(-m) * _integral_power(Fraction(weight), m)
        for m in range(1, d + 2)
    }
    return Relation.create(weight, coeffs, provenance=PROVENANCE_COROLLARY)


def dual_pairing_oracle(rel: Relation) -> bool:
    """
    Return True iff sum_m alpha_m a_g(m) / m^(k-1) = 0 for every g in the reduced basis.

    This is the exact criterion for sum_m alpha_m P(m, k, 1) = 0.
    """
    weight = _require_level_one_even(rel.k, rel.N)
    d = dim_cusp_forms_level1(weight)
    if d == 0:
        return True
    basis = cusp_basis_level1(weight, max(max(rel.support), d))
    pp = relation_to_principal_part(rel)
    return all(
        sum((beta * g.coefficient(m) for m, beta in pp.terms.items()), Fraction(0)) == 0
        for g in basis
    )


def verify_relation_numeric(
    rel: Relation,
    n_max: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
) -> VerificationReport:
    """
    Evaluate sum_m alpha_m a(m, k, N; n) for n = 1..n_max with rigorous bounds.

    Each coefficient is certified to `target_error`; the residual bound is
    sum_m |alpha_m| * bound_m plus the rounding of the combination. A
    residual within its bound is consistent, above REFUTATION_MARGIN times
    the bound refuted, otherwise inconclusive.
    """
    if n_max < 1:
        msg = f"n_max must be positive, got {n_max}"
        raise InvalidRelationError(msg)
    w = WeightProfile.create(rel.k, rel.N)
    cfg = config or RunConfig()
    residuals: dict[int, Residual] = {}

    for n in range(1, n_max + 1):
        try:
            coeffs = {
                m: classical_coeff(w, m, n, target_error, config=cfg)
                for m in rel.support
            }
        except UnreachableTolerance as err:
            _LOGGER.warning("Residual n=%s inconclusive: %s", n, err)
            residuals[n] = Residual(n, None, None, None, VERDICT_INCONCLUSIVE, str(err))
            continue
        residuals[n] = _residual(rel, n, coeffs, cfg.precision_bits)

    verdicts = {r.verdict for r in residuals.values()}
    if VERDICT_REFUTED in verdicts:
        verdict = VERDICT_REFUTED
    elif verdicts == {VERDICT_CONSISTENT}:
        verdict = VERDICT_CONSISTENT
    else:
        verdict = VERDICT_INCONCLUSIVE
    if verdict == VERDICT_REFUTED:
        _LOGGER.warning("Relation %s refuted", rel.to_json_dict()["coeffs"])
    return VerificationReport(relation=rel, residuals=residuals, verdict=verdict)


def _residual(
    rel: Relation, n: int, coeffs: Mapping[int, Any], precision: int
) -> Residual:
    """Combine certified coefficients into one residual with its verdict."""
    with working_context(precision) as ctx:
        terms = []
        bound = ctx.mpf(0)
        for m, result in coeffs.items():
            alpha = ctx.mpf(rel.coeffs[m].numerator) / rel.coeffs[m].denominator
            terms.append(alpha * result.value)
            bound += abs(alpha) * result.total_bound
        value = ctx.fsum(terms)
        largest = max(abs(t) for t in terms)
        bound += unit_roundoff(ctx, 4 * len(terms) * largest)
        if abs(value) <= bound:
            verdict = VERDICT_CONSISTENT
        elif abs(value) > REFUTATION_MARGIN * bound:
            verdict = VERDICT_REFUTED
        else:
            verdict = VERDICT_INCONCLUSIVE
        _LOGGER.debug(
            "n=%s residual %s (bound %s): %s",
            n,
            ctx.nstr(value, 6),
            ctx.nstr(bound, 3),
            verdict,
        )
        return Residual(n, value, bound, largest, verdict)


def _kernel_relations(k: int, m_max: int) -> list[Relation]:
    """Return the rational kernel of [a_(g_i)(m) / m^(k-1)] as relations."""
    d = dim_cusp_forms_level1(k)
    weight = Fraction(k)
    if d == 0:
        return [
            Relation.create(
                k, {m: _integral_power(weight, m)}, provenance=PROVENANCE_SOLVER
            )
            for m in range(1, m_max + 1)
        ]
    basis = cusp_basis_level1(k, max(m_max, d))
    rows = []
    for g in basis:
        row = []
        for m in range(1, m_max + 1):
            entry = g.coefficient(m) / _integral_power(weight, m)
            row.append(Rational(entry.numerator, entry.denominator))
        rows.append(row)
    relations = []
    for vector in Matrix(rows).nullspace():
        coeffs = {
            m: Fraction(int(vector[m - 1].p), int(vector[m - 1].q))
            for m in range(1, m_max + 1)
        }
        rel = Relation.create(k, coeffs, provenance=PROVENANCE_SOLVER)
        relations.append(rel.normalized())
    return relations


def _solver_relations(k: int, m_max: int) -> list[Relation]:
    """Return one relation per pole order m in (d, m_max] from the solver."""
    d = dim_cusp_forms_level1(k)
    relations = []
    for m in range(d + 1, m_max + 1):
        form = _match_poles(k, {m: Fraction(1)}, m, 0)
        if form is None:
            msg = f"No weight {2 - k} form with pole order {m}"
            raise InvalidRelationError(msg)
        pp = form.principal_part()
        relations.append(
            principal_part_to_relation(k, pp, provenance=PROVENANCE_SOLVER)
        )
    return relations


def find_relations(
    k: int, m_max: int, method: str = METHOD_KERNEL
) -> list[Relation]:
    """
    Return a basis of all relations supported on 1 <= m <= m_max at level 1.

    `kernel` computes the rational nullspace of the reduced-basis coefficient
    matrix; `solver` builds, for each m > d, the form with pole q^-m and no
    poles of order d+1..m-1. Both yield the same normalized generators.
    """
    weight = _require_level_one_even(k)
    if m_max < 0:
        msg = f"m_max must be non-negative, got {m_max}"
        raise InvalidRelationError(msg)
    if m_max == 0:
        return []
    if method == METHOD_KERNEL:
        relations = _kernel_relations(weight, m_max)
    elif method == METHOD_SOLVER:
        relations = _solver_relations(weight, m_max)
    else:
        msg = f"Unknown relation search method {method!r}"
        raise InvalidRelationError(msg)
    _LOGGER.debug(
        "k=%s, m_max=%s: %s relation(s) via %s", weight, m_max, len(relations), method
    )
    return relations


def form_to_j_polynomial(k: int, form: QSeries) -> tuple[Fraction, ...] | None:
    """Return F with form = (E_s / Delta^r) F(j), or None for any other shape."""
    weight = _require_level_one_even(k)
    s, r = admissible_pair(weight)
    working = form.trunc_order + max(-form.lowest_exponent, 0) + 1
    reduced = form * series_pow(delta(working), r) / eisenstein(s, working)
    return j_polynomial_of(reduced)
