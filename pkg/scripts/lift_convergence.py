#!/usr/bin/env python3
"""Convergence of the lifted operator G_N to the fractional backward heat operator.

Prints |G_N - limit| per probe, the fitted order, and the boundary gap
|g_N - phi| per probe.
"""

import argparse

from fracheat.lifting import boundary_gn, boundary_limit, convergence_study
from fracheat.testfn import resolve

PROBES = [(0.0, 1.0), (0.5, 2.0), (-1.0, 3.0), (0.3, 4.0), (1.2, 5.0)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fn", default="gauss-a1-b1-t4")
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--ns", type=int, nargs="+", default=[8, 32, 128, 512])
    args = ap.parse_args()

    u = resolve(args.fn, 1)
    table = convergence_study(u, args.s, args.ns, PROBES)
    print(f"{'N':>5} {'x':>5} {'t':>4} {'G_N':>14} {'limit':>14} {'abs err':>9}")
    for r in table.rows:
        print(f"{r.N:>5} {r.x:>5g} {r.t:>4g} {r.G_N:>14.8g} {r.limit:>14.8g} {r.abs_err:>9.2e}")
    print(f"empirical order {table.order:.3f}, monotone {table.monotone(1e-6)}")

    print("\nboundary gap |g_N - phi| per probe")
    for x, tau in PROBES:
        gaps = [abs(float(boundary_gn(u, N, x, tau)) - float(boundary_limit(u, x, tau))) for N in args.ns]
        print(f"  x={x:>5g} tau={tau:g}: " + "  ".join(f"N={N}:{g:.2e}" for N, g in zip(args.ns, gaps)))


if __name__ == "__main__":
    main()
