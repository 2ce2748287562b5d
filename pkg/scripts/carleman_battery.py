#!/usr/bin/env python3
"""Run the Carleman batteries and print one line per cell.

For the L^p variant each cell is followed by the ratio obtained with the
alternative closed-form constant. Expect a few minutes per dimension.
"""

import argparse
import warnings

from fracheat.carleman import run_battery, thm1_battery, thm2_battery


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variant", choices=["thm1", "thm2"], default="thm1")
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2])
    args = ap.parse_args()

    warnings.simplefilter("ignore")
    build = thm1_battery if args.variant == "thm1" else thm2_battery
    print(f"{'d':>2} {'s':>5} {'eta':>6} {'p':>4} {'ratio':>10} {'quad err':>9} {'alt ratio':>10}  note")
    for d in args.d:
        for r in run_battery(build(dims=(d,))):
            p = r.params
            alt = f"{r.alternatives[0].ratio:>10.4g}" if r.alternatives else f"{'':>10}"
            note = "experimental" if r.experimental else ("" if r.passed else "FAIL")
            print(f"{p.d:>2} {p.s:>5g} {p.eta:>6g} {p.p:>4g} {r.ratio:>10.4g} {r.quadrature_error:>9.1e} {alt}  {note}")


if __name__ == "__main__":
    main()
