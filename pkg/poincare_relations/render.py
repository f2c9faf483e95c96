"""Render results as json, csv or pretty text."""

from __future__ import annotations

import csv
import io
import json
from typing import TYPE_CHECKING, Any

from .const import OUTPUT_CSV, OUTPUT_JSON, OUTPUT_PRETTY
from .helpers import working_context

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from .poincare import CoeffResult
    from .qseries import PrincipalPart, QSeries
    from .relations import Relation, VerificationReport


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Return rows as CSV text with a header line."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def _json(data: Any) -> str:
    return json.dumps(data, indent=2)


def _check_format(fmt: str) -> None:
    if fmt not in (OUTPUT_JSON, OUTPUT_CSV, OUTPUT_PRETTY):
        msg = f"Unknown output format {fmt!r}"
        raise ValueError(msg)


def _short(value: Any, digits: int) -> str:
    with working_context(64) as ctx:
        return ctx.nstr(value, digits)


def render_coeff(result: CoeffResult, fmt: str = OUTPUT_PRETTY) -> str:
    """Render one certified coefficient."""
    _check_format(fmt)
    data = result.as_dict()
    if fmt == OUTPUT_JSON:
        return _json(data)
    if fmt == OUTPUT_CSV:
        return _csv(list(data), [list(data.values())])
    weight = result.weight
    label = f"{result.family}(m={result.m}, n={result.n}; k={weight.k}, N={weight.N})"
    flag = " [heuristic]" if result.heuristic else ""
    return (
        f"{label} = {data['value']} +- {_short(result.total_bound, 3)} "
        f"(C={result.c_used}){flag}"
    )


def format_series(series: QSeries) -> str:
    """Return every known term, e.g. "q^-1 + 744 + 196884*q + O(q^2)"."""
    parts = []
    for n, value in series.items():
        if n == 0:
            term = str(value)
        else:
            power = "q" if n == 1 else f"q^{n}"
            term = power if value == 1 else f"{value}*{power}"
        parts.append(term)
    parts.append(f"O(q^{series.trunc_order + 1})")
    return " + ".join(parts).replace("+ -", "- ")


def render_series(series: QSeries, fmt: str = OUTPUT_PRETTY) -> str:
    """Render an exact q-expansion."""
    _check_format(fmt)
    if fmt == OUTPUT_JSON:
        return _json(series.to_json_dict())
    if fmt == OUTPUT_CSV:
        return _csv(
            ["exponent", "coefficient"],
            (
                (n, str(series.coefficient(n)))
                for n in range(series.lowest_exponent, series.trunc_order + 1)
            ),
        )
    return format_series(series)


def render_unsolved(pp: PrincipalPart, fmt: str = OUTPUT_PRETTY) -> str:
    """Render a principal part that no weakly holomorphic form carries."""
    _check_format(fmt)
    if fmt == OUTPUT_JSON:
        return _json({"form": None, "principal_part": pp.to_json_dict()})
    terms = sorted(pp.terms.items(), reverse=True)
    if fmt == OUTPUT_CSV:
        return _csv(["m", "beta", "solvable"], ((m, str(b), "false") for m, b in terms))
    shown = " + ".join(f"{b}*q^-{m}" for m, b in terms).replace("+ -", "- ")
    return f"no weakly holomorphic form with principal part {shown}"


def render_relations(relations: Sequence[Relation], fmt: str = OUTPUT_PRETTY) -> str:
    """Render a list of relations; json output is accepted back by `relation verify`."""
    _check_format(fmt)
    if fmt == OUTPUT_JSON:
        if len(relations) == 1:
            return _json(relations[0].to_json_dict())
        return _json([rel.to_json_dict() for rel in relations])
    if fmt == OUTPUT_CSV:
        return _csv(
            ["relation", "k", "N", "m", "alpha", "provenance"],
            (
                (index, str(rel.k), rel.N, m, str(alpha), rel.provenance)
                for index, rel in enumerate(relations)
                for m, alpha in sorted(rel.coeffs.items())
            ),
        )
    if not relations:
        return "no relations"
    lines = []
    for rel in relations:
        terms = " + ".join(
            f"({alpha})*P({m})" for m, alpha in sorted(rel.coeffs.items())
        )
        lines.append(f"k={rel.k}, N={rel.N} [{rel.provenance}]: {terms} = 0")
    return "\n".join(lines)


REPORT_HEADER = ("n", "residual", "bound", "largest_term", "verdict")


def _report_rows(report: VerificationReport) -> list[dict[str, Any]]:
    """Return one display row per residual, in order of n."""
    rows = []
    for n, residual in sorted(report.residuals.items()):
        rows.append(
            {
                "n": n,
                "residual": (
                    None if residual.value is None else _short(residual.value, 12)
                ),
                "bound": None if residual.bound is None else _short(residual.bound, 6),
                "largest_term": None
                if residual.largest_term is None
                else _short(residual.largest_term, 12),
                "verdict": residual.verdict,
            }
        )
    return rows


def _pretty_report(rows: Sequence[dict[str, Any]], verdict: str) -> list[str]:
    lines = [
        f"n={row['n']}: residual {row['residual']} "
        f"(bound {row['bound']}) {row['verdict']}"
        for row in rows
    ]
    lines.append(f"verdict: {verdict}")
    return lines


def render_report(report: VerificationReport, fmt: str = OUTPUT_PRETTY) -> str:
    """Render a verification report."""
    _check_format(fmt)
    rows = _report_rows(report)
    if fmt == OUTPUT_JSON:
        return _json({"verdict": report.verdict, "residuals": rows})
    if fmt == OUTPUT_CSV:
        return _csv(
            REPORT_HEADER, ([row[key] for key in REPORT_HEADER] for row in rows)
        )
    return "\n".join(_pretty_report(rows, report.verdict))


def render_reports(
    reports: Sequence[VerificationReport], fmt: str = OUTPUT_PRETTY
) -> str:
    """Render the reports for a list of relations, as emitted by `relation find`."""
    _check_format(fmt)
    if fmt == OUTPUT_JSON:
        return _json(
            [
                {
                    "relation": report.relation.to_json_dict(),
                    "verdict": report.verdict,
                    "residuals": _report_rows(report),
                }
                for report in reports
            ]
        )
    if fmt == OUTPUT_CSV:
        return _csv(
            ("relation", *REPORT_HEADER),
            (
                [index, *(row[key] for key in REPORT_HEADER)]
                for index, report in enumerate(reports)
                for row in _report_rows(report)
            ),
        )
    if not reports:
        return "no relations"
    blocks = []
    for index, report in enumerate(reports):
        support = ", ".join(str(m) for m in report.relation.support)
        lines = [f"relation {index} (m = {support}):"]
        lines.extend(_pretty_report(_report_rows(report), report.verdict))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)
