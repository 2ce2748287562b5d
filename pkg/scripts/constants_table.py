#!/usr/bin/env python3
"""Print the Carleman constants over an (s, eta) grid.

For the L^p inequality the extrapolated pre-limit constant is shown next to
Gamma(eta+s)/Gamma(eta) and next to the alternative closed form, so that the
two candidates can be compared by eye.
"""

import argparse

from fracheat.carleman import constant_thm1, constant_thm2_derived, constant_thm2_paper
from fracheat.errors import PoleError


def fmt(fn) -> str:
    try:
        return f"{fn():.10g}"
    except PoleError:
        return "pole"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--s", type=float, nargs="+", default=[0.25, 0.5, 0.75])
    ap.add_argument("--eta", type=float, nargs="+", default=[0.1, 0.3, 0.6, 0.9, 1.3, 2.2])
    args = ap.parse_args()

    print(f"{'s':>5} {'eta':>5} {'thm1':>14} {'extrapolated':>14} {'Gamma ratio':>14} {'alt closed':>14} {'rel gap':>9}")
    for s in args.s:
        for eta in args.eta:
            derived = constant_thm2_derived(args.d, eta, s)
            print(
                f"{s:>5g} {eta:>5g} {fmt(lambda: constant_thm1(s, eta)):>14} {derived.value:>14.10g} "
                f"{derived.closed_form:>14.10g} {fmt(lambda: constant_thm2_paper(args.d, eta, s)):>14} "
                f"{derived.relative_gap:>9.1e}"
            )


if __name__ == "__main__":
    main()
