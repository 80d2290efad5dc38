#!/usr/bin/env python3
"""Timings for the multigraded kernel computation on sunlet networks.

Reproduces the generator counts of the small benchmark rows (4 leaves,
degrees 2 and 3).  The 5-leaf degree-3 row (18560 generators) is far
beyond pure-Python desk scale and is not attempted by default.
"""

import argparse
import time

from algstat import components_of_kernel, kimura3_model
from algstat.catalog import named_graph
from algstat.graphcore import DIRECTED, graph_from_edges


def sunlet(n_leaves):
    if n_leaves == 4:
        return named_graph("sunlet4")
    if n_leaves == 5:
        # central 5-cycle rooted at 8, hybrid node 6, pendant leaves 1..5
        return graph_from_edges(
            DIRECTED,
            [
                [6, 1], [7, 2], [8, 3], [9, 4], [10, 5],
                [8, 7], [7, 6], [8, 9], [9, 10], [10, 6],
            ],
        )
    raise SystemExit("only 4- and 5-leaf sunlets are wired up")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--leaves", type=int, default=4, choices=(4, 5))
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    if args.leaves == 5 and args.degree >= 3:
        print("warning: the 5-leaf degree-3 case is not desk scale; expect hours")
    M = kimura3_model(sunlet(args.leaves))
    psi = M.fourier_parametrization()
    t0 = time.time()
    res = components_of_kernel(args.degree, psi, workers=args.workers)
    dt = time.time() - t0
    print(
        f"leaves={args.leaves} degree={args.degree} workers={args.workers}: "
        f"{res.total_generators()} minimal generators "
        f"(new by degree {res.new_by_degree}) in {dt:.2f}s"
    )


if __name__ == "__main__":
    main()
