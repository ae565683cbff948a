"""Command-line front end: ``mrdft transform|verify|count|bench|spectrogram``.

Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.
Results go to stdout, diagnostics to stderr.  Random signals come from
numpy's PCG64 generator seeded with ``--seed``, with real and imaginary
parts drawn independently from the standard normal distribution.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import opcount, oracle, signal_io
from .core import Layout, OpCounter, make_plan, mrdft_fast

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

VERIFY_TOL = 1e-10
VERIFY_MAX_M = 12
DIRECT_MAX_M = 12
METHODS = ("fast", "plf", "direct")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for verification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def random_signal(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _rel_err(got: np.ndarray, want: np.ndarray) -> float:
    scale = np.linalg.norm(want)
    diff = np.linalg.norm(got - want)
    return float(diff / scale) if scale else float(diff)


def _load(args) -> np.ndarray:
    try:
        return signal_io.read_signal(args.input, args.format, pad_zeros=args.pad_zeros).samples
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_transform(args) -> int:
    x = _load(args)
    plan = make_plan(x.size.bit_length() - 1)
    counter = OpCounter()
    layout = Layout.NATURAL if args.layout == "natural" else Layout.BITREVERSED
    spectrum = mrdft_fast(x, plan, counter, layout=layout, threads=args.threads)
    _err(f"m={plan.m} n={plan.n}")
    for i, mults, nontrivial, adds in counter.rows(plan.m):
        _err(f"iter {i}: mults={mults} nontrivial={nontrivial} adds={adds}")
    if args.output == "-":
        text = (
            signal_io.spectrum_to_json(spectrum)
            if args.out_format == "json"
            else signal_io.spectrum_to_csv(spectrum)
        )
        sys.stdout.write(text)
    else:
        try:
            signal_io.write_spectrum(spectrum, args.output, args.out_format)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc}") from exc
    return EXIT_OK


def cmd_verify(args) -> int:
    m = args.m
    if not 1 <= m <= VERIFY_MAX_M:
        raise UsageError(f"--m must be in [1, {VERIFY_MAX_M}], got {m}")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    plan = make_plan(m)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    worst = [0.0] * m
    first_bad = None
    counts_ok = True
    counter = OpCounter()
    for trial in range(args.trials):
        x = random_signal(rng, plan.n)
        counter = OpCounter()
        fast = mrdft_fast(x, plan, counter, threads=args.threads)
        ref = oracle.mrdft_direct(x, m)
        for i in range(1, m + 1):
            e = _rel_err(fast.level(i), ref.level(i))
            worst[i - 1] = max(worst[i - 1], e)
            if first_bad is None and not e <= VERIFY_TOL:
                first_bad = (trial, i, e)
        for i, mults, nontrivial, adds in counter.rows(m):
            expected = (opcount.mults_iter(m, i), opcount.nontrivial_iter(m, i), opcount.adds_iter(m, i))
            if (mults, nontrivial, adds) != expected:
                if counts_ok:
                    _err(f"count mismatch at trial {trial}, iter {i}: got {(mults, nontrivial, adds)}, expected {expected}")
                counts_ok = False

    print(f"m={m} n={plan.n} trials={args.trials} seed={args.seed}")
    for i, e in enumerate(worst, start=1):
        print(f"level {i}: max relative L2 error {e:.3e}")
    for i, mults, nontrivial, adds in counter.rows(m):
        print(
            f"iter {i}: mults={mults}/{opcount.mults_iter(m, i)} "
            f"nontrivial={nontrivial}/{opcount.nontrivial_iter(m, i)} "
            f"adds={adds}/{opcount.adds_iter(m, i)} (instrumented/analytic)"
        )
    print(f"counts {'match' if counts_ok else 'MISMATCH'}")
    if first_bad is not None:
        trial, i, e = first_bad
        print(f"FAIL: trial {trial}, level {i}: relative error {e:.3e} > {VERIFY_TOL:g}")
    ok = first_bad is None and counts_ok
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


def _count_table(rep: opcount.ComplexityReport) -> str:
    lines = [f"m={rep.m}", f"{'iter':>4} {'mults':>12} {'nontrivial':>12} {'adds':>12}"]
    for r in rep.rows:
        lines.append(f"{r.i:>4} {r.mults:>12} {r.nontrivial:>12} {r.adds:>12}")
    lines.append(f"{'sum':>4} {rep.total_mults:>12} {rep.total_nontrivial:>12} {rep.total_adds:>12}")
    lines.append(f"baseline mults {rep.baseline_mults}, ratio {rep.ratio} = {float(rep.ratio):.6f}")
    return "\n".join(lines)


def cmd_count(args) -> int:
    top = args.max_m if args.max_m is not None else args.m
    if not 1 <= top <= opcount.REPORT_MAX_M:
        raise UsageError(f"m must be in [1, {opcount.REPORT_MAX_M}], got {top}")
    if args.max_m is None:
        rep = opcount.report(args.m)
        print(json.dumps(rep.as_dict()) if args.json else _count_table(rep))
        return EXIT_OK
    reports = [opcount.report(m) for m in range(1, args.max_m + 1)]
    if args.json:
        print(json.dumps([r.as_dict() for r in reports]))
        return EXIT_OK
    print(f"{'m':>3} {'mults':>14} {'nontrivial':>14} {'adds':>14} {'baseline':>14} {'ratio':>10}")
    for r in reports:
        print(
            f"{r.m:>3} {r.total_mults:>14} {r.total_nontrivial:>14} {r.total_adds:>14} "
            f"{r.baseline_mults:>14} {str(r.ratio):>10}"
        )
    return EXIT_OK


def cmd_bench(args) -> int:
    methods = [s.strip() for s in args.methods.split(",") if s.strip()]
    unknown = [s for s in methods if s not in METHODS]
    if unknown:
        raise UsageError(f"unknown method(s) {', '.join(unknown)}; choose from {', '.join(METHODS)}")
    if not methods:
        raise UsageError("no methods given")
    if "direct" in methods and args.m > DIRECT_MAX_M:
        raise UsageError(f"direct method refused for m > {DIRECT_MAX_M} (got m={args.m})")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    plan = make_plan(args.m)
    x = random_signal(np.random.Generator(np.random.PCG64(args.seed)), plan.n)
    runners = {
        "fast": lambda: mrdft_fast(x, plan),
        "plf": lambda: oracle.mrdft_per_level_fft(x, args.m),
        "direct": lambda: oracle.mrdft_direct(x, args.m),
    }
    record = {"m": args.m, "n": plan.n, "reps": args.reps, "seed": args.seed, "median_seconds": {}}
    for name in methods:
        times = []
        for _ in range(args.reps):
            t0 = time.perf_counter()
            runners[name]()
            times.append(time.perf_counter() - t0)
        med = statistics.median(times)
        record["median_seconds"][name] = med
        _err(f"{name:>6}: median {med * 1e3:.3f} ms over {args.reps} reps")
    print(json.dumps(record))
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    x = _load(args)
    plan = make_plan(x.size.bit_length() - 1)
    if not 1 <= args.level <= plan.m:
        raise UsageError(f"level out of range: {args.level} not in [1, {plan.m}]")
    spectrum = mrdft_fast(x, plan, threads=args.threads)
    try:
        signal_io.write_level_pgm(spectrum, args.level, args.output, args.scale)
    except OSError as exc:
        raise UsageError(f"cannot write {args.output}: {exc}") from exc
    _err(f"m={plan.m} level={args.level} image {plan.n >> args.level}x{1 << args.level}")
    return EXIT_OK


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="signal file")
    p.add_argument("--format", choices=signal_io.SIGNAL_FORMATS, default="csv")
    p.add_argument("--pad-zeros", action="store_true", help="zero-extend to the next power of two")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mrdft", description="Fast multiresolution DFT")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="transform a signal file")
    _add_input(p)
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--out-format", choices=signal_io.SPECTRUM_FORMATS, default="json")
    p.add_argument("--layout", choices=("natural", "bitrev"), default="natural")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="compare fast transform against the direct definition")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="print operation counts")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--max-m", type=int)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bench", help="time the transform methods")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("spectrogram", help="write one level as a PGM image")
    _add_input(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--scale", choices=signal_io.SCALES, default="linear")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_spectrogram)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "threads", 1) < 1:
        _err("mrdft: error: --threads must be >= 1")
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        _err(f"mrdft: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
