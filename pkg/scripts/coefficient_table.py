#!/usr/bin/env python3
"""
Coefficient table script for weight 24 Poincare series.

This script prints a(m, 24, 1; n) for 1 <= m, n <= 3 and then checks the
relation forced by E_14 / Delta^3 against those coefficients:
- Table: one certified coefficient per line
- Relation: the exact coefficients of the forced relation
- Verdict: consistent, refuted or inconclusive

Usage: python scripts/coefficient_table.py [target_error]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from poincare_relations import (  # noqa: E402
    RunConfig,
    UnreachableTolerance,
    WeightProfile,
)
from poincare_relations.poincare import classical_coeff  # noqa: E402
from poincare_relations.relations import (  # noqa: E402
    corollary_relation,
    verify_relation_numeric,
)
from poincare_relations.render import (  # noqa: E402
    render_coeff,
    render_relations,
    render_report,
)

WEIGHT = 24
INDICES = range(1, 4)


def main() -> None:
    """Print the table and the relation check."""
    target = float(sys.argv[1]) if len(sys.argv) > 1 else 1e-12
    config = RunConfig(precision_bits=192, target_error=target)
    w = WeightProfile.create(WEIGHT)

    print(f"Poincare coefficients, k={WEIGHT}, target {target:g}\n")  # noqa: T201
    try:
        for m in INDICES:
            for n in INDICES:
                result = classical_coeff(w, m, n, config=config)
                print(render_coeff(result))  # noqa: T201
    except UnreachableTolerance as err:
        print(f"Error: {err}")  # noqa: T201
        sys.exit(1)

    relation = corollary_relation(WEIGHT)
    print("\nForced relation:")  # noqa: T201
    print(render_relations([relation]))  # noqa: T201

    report = verify_relation_numeric(relation, len(INDICES), config=config)
    print()  # noqa: T201
    print(render_report(report))  # noqa: T201
    sys.exit(0 if report.consistent else 1)


if __name__ == "__main__":
    main()
