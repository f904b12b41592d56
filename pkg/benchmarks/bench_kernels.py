"""Benchmark: compiled term-list kernel vs the pure-Python fallback.

Times polynomial products and full equivalence checks on ansatz pairs.
Run both kernels by launching this script twice::

    python benchmarks/bench_kernels.py
    PQDD_PURE=1 python benchmarks/bench_kernels.py

or let it fork itself with --both (the kernel is chosen at import time,
so comparing within one process is not possible).
"""

import argparse
import os
import subprocess
import sys
import time


def bench_poly(n_vars, n_terms, repeats, seed):
    import numpy as np

    from pqdd import ParamTable, TrigPoly

    rng = np.random.default_rng(seed)
    table = ParamTable()
    syms = [table.declare(f"p{i}") for i in range(n_vars)]

    def random_poly():
        p = TrigPoly.zero()
        for _ in range(n_terms):
            t = TrigPoly.const(complex(rng.normal(), rng.normal()))
            for s in syms:
                r = rng.integers(0, 3)
                if r == 1:
                    t = t * TrigPoly.sin(s)
                elif r == 2:
                    t = t * TrigPoly.cos(s) * TrigPoly.cos(s)
            p = p + t
        return p

    polys = [random_poly() for _ in range(repeats)]
    t0 = time.perf_counter()
    acc = TrigPoly.one()
    for p in polys:
        acc = acc * p
    dt = time.perf_counter() - t0
    return dt, len(acc.terms)


def bench_check(n, reps, seed):
    from pqdd import BenchSpec, check, generate, rewrite_equivalent

    c = generate(BenchSpec("EfficientSU2", n, reps, seed=seed))
    rw = rewrite_equivalent(c, seed=seed + 1, n_rewrites=25)
    t0 = time.perf_counter()
    report = check(c, rw, strategy="alternate")
    dt = time.perf_counter() - t0
    return dt, report.verdict.value


def run(args):
    import pqdd

    kernel = "compiled" if pqdd.USING_COMPILED else "pure-python"
    dt_poly, nterms = bench_poly(args.vars, args.terms, args.repeats,
                                 args.seed)
    dt_chk, verdict = bench_check(args.qubits, args.reps, args.seed)
    print(f"kernel={kernel}")
    print(f"  poly product chain ({args.repeats} x {args.terms} terms, "
          f"{args.vars} vars): {dt_poly:.3f} s ({nterms} result terms)")
    print(f"  alternate check (EfficientSU2 n={args.qubits} reps={args.reps}):"
          f" {dt_chk:.3f} s [{verdict}]")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vars", type=int, default=4)
    ap.add_argument("--terms", type=int, default=6)
    ap.add_argument("--repeats", type=int, default=8)
    ap.add_argument("--qubits", type=int, default=6)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--both", action="store_true",
                    help="run compiled then pure in subprocesses")
    args = ap.parse_args()
    if args.both:
        base = [sys.argv[0]] + [a for a in sys.argv[1:] if a != "--both"]
        for pure in ("0", "1"):
            env = dict(os.environ, PQDD_PURE=pure)
            subprocess.run([sys.executable] + base, env=env, check=True)
        return
    run(args)


if __name__ == "__main__":
    main()
