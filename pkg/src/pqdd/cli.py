"""Command-line surface: check, gen, inject, bench.

Exit codes for ``check``: 0 equivalent, 2 equivalent up to a global
phase, 3 not equivalent, 4 timeout, 1 usage/parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .checker import (CheckError, CheckReport, CheckTimeout, Verdict, check,
                      confirm_by_sampling)
from .circuit import ParseError, parse_pqc, print_pqc
from .oracle import BenchSpec, generate_text, inject_errors, rewrite_equivalent

EXIT_BY_VERDICT = {
    Verdict.Equivalent: 0,
    Verdict.EquivalentUpToGlobalPhase: 2,
    Verdict.NotEquivalent: 3,
}
EXIT_TIMEOUT = 4
EXIT_ERROR = 1

CSV_COLUMNS = ("name", "P", "Q", "G1", "G2", "node_max", "node_final",
               "node_tdd", "node_trdd", "verdict", "time_s")


def _default_seed():
    env = os.environ.get("PQCV_SEED")
    return int(env) if env else 0


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_pqc(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _report_lines(report: CheckReport, fmt: str) -> str:
    d = report.to_json_dict()
    if fmt == "json":
        return json.dumps(d, indent=2)
    return "\n".join(f"{k}: {v}" for k, v in d.items())


def cmd_check(args) -> int:
    c1, c2 = _load(args.file1), _load(args.file2)
    try:
        report = check(c1, c2, strategy=args.strategy, timeout_s=args.timeout)
    except CheckTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    print(_report_lines(report, args.output))
    if args.confirm_samples:
        agrees = confirm_by_sampling(c1, c2, k=args.confirm_samples,
                                     seed=args.seed)
        symbolic_eq = report.verdict is not Verdict.NotEquivalent
        if agrees != symbolic_eq:
            print("internal error: sampling disagrees with the symbolic "
                  "verdict", file=sys.stderr)
            return EXIT_ERROR
        print(f"confirmed by sampling (k={args.confirm_samples})")
    return EXIT_BY_VERDICT[report.verdict]


def cmd_gen(args) -> int:
    spec = BenchSpec(args.family, args.qubits, args.reps,
                     entangler=args.entangler, seed=args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    text_a = generate_text(spec)
    c = parse_pqc(text_a)
    text_b = print_pqc(rewrite_equivalent(c, seed=args.seed,
                                          n_rewrites=args.rewrites))
    path_a = os.path.join(args.out_dir, f"{spec.name}_a.pqc")
    path_b = os.path.join(args.out_dir, f"{spec.name}_b.pqc")
    with open(path_a, "w", encoding="utf-8") as fh:
        fh.write(text_a)
    with open(path_b, "w", encoding="utf-8") as fh:
        fh.write(text_b)
    entry = {"name": spec.name, "file1": path_a, "file2": path_b,
             "expected_verdict": Verdict.Equivalent.value}
    manifest_path = os.path.join(args.out_dir, "manifest.json")
    manifest = []
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    manifest.append(entry)
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    print(f"wrote {path_a}, {path_b}; manifest entry {spec.name}")
    return 0


def cmd_inject(args) -> int:
    c = _load(args.file)
    out = args.out or args.file.replace(".pqc", "") + f"_{args.kind}err.pqc"
    injected = inject_errors(c, args.rate, kind=args.kind, seed=args.seed)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(print_pqc(injected))
    print(f"wrote {out}")
    return 0


def _bench_one(entry, strategy, timeout, samples, seed):
    c1, c2 = _load(entry["file1"]), _load(entry["file2"])
    try:
        report = check(c1, c2, strategy=strategy, timeout_s=timeout)
        d = report.to_json_dict()
        verdict = report.verdict.value
    except CheckTimeout:
        d = {"node_max": "", "node_final": "", "node_tdd": "",
             "node_trdd": "", "time_s": timeout}
        verdict = "timeout"
    sampling_ok = None
    if samples:
        agrees = confirm_by_sampling(c1, c2, k=samples, seed=seed)
        sampling_ok = agrees == (verdict in (
            Verdict.Equivalent.value, Verdict.EquivalentUpToGlobalPhase.value))
    row = {
        "name": entry["name"],
        "P": len(c1.params),
        "Q": c1.n_qubits,
        "G1": len(c1.gates),
        "G2": len(c2.gates),
        "node_max": d["node_max"],
        "node_final": d["node_final"],
        "node_tdd": d["node_tdd"],
        "node_trdd": d["node_trdd"],
        "verdict": verdict,
        "time_s": d["time_s"],
    }
    return row, verdict == entry.get("expected_verdict"), sampling_ok


def cmd_bench(args) -> int:
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if not isinstance(manifest, list):
        raise ParseError("manifest must be a JSON list")
    jobs = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_bench_one, e, args.strategy, args.timeout,
                                   args.confirm_samples, args.seed)
                       for e in manifest]
            jobs = [f.result() for f in futures]  # manifest order
    else:
        jobs = [_bench_one(e, args.strategy, args.timeout,
                           args.confirm_samples, args.seed) for e in manifest]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    matched = 0
    for row, ok, sampling_ok in jobs:
        writer.writerow(row)
        matched += bool(ok)
        if sampling_ok is False:
            print(f"internal error: sampling disagreement on {row['name']}",
                  file=sys.stderr)
    out_text = buf.getvalue() + f"# {matched}/{len(jobs)} expected\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out_text)
    else:
        sys.stdout.write(out_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pqdd",
        description="Symbolic equivalence checking of parameterised "
                    "quantum circuits")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--strategy", default="auto",
                        choices=("auto", "construct", "alternate"))
        sp.add_argument("--timeout", type=float, default=1200.0)
        sp.add_argument("--confirm-samples", type=int, default=0)
        sp.add_argument("--seed", type=int, default=_default_seed())

    sp = sub.add_parser("check", help="decide equivalence of two circuits")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("--output", default="text", choices=("text", "json"))
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("gen", help="generate a benchmark pair")
    sp.add_argument("--family", required=True,
                    choices=("RealAmplitudes", "EfficientSU2", "TwoLocal"))
    sp.add_argument("--qubits", type=int, required=True)
    sp.add_argument("--reps", type=int, required=True)
    sp.add_argument("--entangler", default="linear",
                    choices=("linear", "full"))
    sp.add_argument("--rewrites", type=int, default=20)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("inject", help="insert bit/phase-flip errors")
    sp.add_argument("file")
    sp.add_argument("--rate", type=float, default=0.01)
    sp.add_argument("--kind", default="x", choices=("x", "z"))
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_inject)

    sp = sub.add_parser("bench", help="run a manifest of pairs, emit CSV")
    sp.add_argument("manifest")
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CheckError, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
