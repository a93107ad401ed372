"""Command-line interface: ``fastball {sample,backbone,project,bench,verify}``.

Exit codes: 0 success, 2 usage or parse error, 3 I/O error, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys

from . import __version__, kernels
from .errors import FastballError, InvalidParameter, ParseError
from .graph import (
    LabeledGraph,
    format_edge_list,
    format_incidence_matrix,
    read_edge_list,
    read_incidence_matrix,
)
from .rng import new_seed
from .sampler import Algorithm, SamplerConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VERIFY = 4

DEFAULT_BENCH_M = (1_000, 10_000, 100_000)
BIG_BENCH_M = (1_000_000,)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (0 < value < 1):
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {text}")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def _positive_int(text):
    value = _nonneg_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _samples_arg(text):
    return "auto" if text == "auto" else _positive_int(text)


def _seed_arg(text):
    value = _nonneg_int(text)
    if value >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _add_sampling_flags(p):
    p.add_argument("--seed", type=_seed_arg, help="64-bit seed (default: fresh entropy, echoed in the header)")
    p.add_argument("--trades", type=_nonneg_int, help="trades per sample (default: 5 x top nodes)")
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="fastball")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--backend", choices=["compiled", "python"], help="kernel backend (default: best available)")


def _add_input_flags(p):
    p.add_argument("input", help="graph file ('-' for stdin)")
    p.add_argument("--format", choices=["edges", "matrix"], default="edges",
                   help="input format: edge list or incidence matrix")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fastball", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fastball {__version__} ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw random graphs with the input's degrees")
    _add_input_flags(p)
    p.add_argument("-n", "--count", type=_nonneg_int, default=1)
    p.add_argument("-o", "--output", help="write one concatenated stream here (default: stdout)")
    p.add_argument("--output-dir", help="write one file per sample into this directory instead")
    p.add_argument("--chain", action="store_true", help="thin one long chain instead of restarting per sample")
    _add_sampling_flags(p)

    p = sub.add_parser("backbone", help="signed FDSM backbone of the projection")
    _add_input_flags(p)
    p.add_argument("--alpha", type=_probability, default=0.05)
    p.add_argument("--samples", type=_samples_arg, default="auto", help="null samples, or 'auto' for the power calculation")
    p.add_argument("--power", type=_probability, default=0.95, help="power used by --samples auto")
    p.add_argument("--smooth", action="store_true", help="use (count+1)/(samples+1) p-values")
    p.add_argument("--checkpoint", help="checkpoint file for null counts (resumed if present)")
    p.add_argument("--checkpoint-every", type=_positive_int, default=10_000)
    p.add_argument("--chain", action="store_true")
    p.add_argument("-o", "--output")
    _add_sampling_flags(p)

    p = sub.add_parser("project", help="weighted projection onto top nodes")
    _add_input_flags(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("bench", help="time curveball against fastball on worst-case graphs")
    p.add_argument("--m", type=_positive_int, nargs="*", help=f"bottom-node counts (default {list(DEFAULT_BENCH_M)})")
    p.add_argument("--big", action="store_true", help="also run m = 10^6")
    p.add_argument("--trades", type=_nonneg_int, default=100)
    p.add_argument("--replications", type=_positive_int, default=10)
    p.add_argument("--seed", type=_seed_arg, default=0)
    p.add_argument("--backend", choices=["compiled", "python"])
    p.add_argument("-o", "--output", help="CSV destination (default: stdout)")

    p = sub.add_parser("verify", help="chi-square uniformity battery on enumerable spaces")
    p.add_argument("--space", action="append", metavar="TOP/BOTTOM",
                   help="degree sequences such as '2,2,2/2,2,2' (repeatable; default battery otherwise)")
    p.add_argument("--samples", type=_positive_int, default=100_000)
    _add_sampling_flags(p)
    return parser


def _read_graph(args) -> LabeledGraph:
    reader = read_edge_list if args.format == "edges" else read_incidence_matrix
    if args.input == "-":
        return reader(sys.stdin)
    return reader(args.input)


@contextlib.contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _config(args, chain=False) -> SamplerConfig:
    seed = args.seed if args.seed is not None else new_seed()
    return SamplerConfig(
        trades_per_sample=args.trades,
        algorithm=args.algorithm,
        seed=seed,
        chain=chain,
        threads=args.threads,
        backend=args.backend,
    )


def _header(**fields) -> str:
    fields["version"] = __version__
    return "# " + " ".join(f"{k}={v}" for k, v in fields.items()) + "\n"


def cmd_sample(args) -> int:
    from .sampler import sample_stream

    if args.output and args.output_dir:
        raise UsageError("--output and --output-dir are mutually exclusive")
    lg = _read_graph(args)
    config = _config(args, chain=args.chain)
    trades = config.trades_for(lg.graph)
    head = dict(seed=config.seed, trades=trades, algorithm=config.algorithm.value,
                chain=str(config.chain).lower(), format=args.format)
    if args.count == 0:
        print(f"seed={config.seed} samples=0", file=sys.stderr)
        return EXIT_OK

    def render(g):
        if args.format == "edges":
            return format_edge_list(lg.with_graph(g))
        return format_incidence_matrix(g)

    if args.output_dir:
        os.makedirs(args.output_dir, exist_ok=True)
        width = max(5, len(str(args.count - 1)))
        counter = iter(range(args.count))

        def write_file(g):
            k = next(counter)
            path = os.path.join(args.output_dir, f"sample_{k:0{width}d}.txt")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(_header(**head, sample=k))
                fh.write(render(g))

        sample_stream(lg.graph, args.count, config, write_file)
    else:
        with _sink(args.output) as out:
            out.write(_header(**head, samples=args.count))
            counter = iter(range(args.count))

            def write_stream(g):
                out.write(f"# sample {next(counter)}\n")
                out.write(render(g))

            sample_stream(lg.graph, args.count, config, write_stream)
    if args.seed is None:
        print(f"seed={config.seed}", file=sys.stderr)
    return EXIT_OK


def cmd_backbone(args) -> int:
    from .fdsm import extract_backbone, required_samples

    lg = _read_graph(args)
    config = _config(args, chain=args.chain)
    samples = required_samples(args.alpha, args.power) if args.samples == "auto" else args.samples
    bb = extract_backbone(
        lg.graph, args.alpha, samples, config,
        smooth=args.smooth, checkpoint=args.checkpoint, checkpoint_every=args.checkpoint_every,
    )
    head = dict(alpha=args.alpha, samples=samples, seed=config.seed, trades=bb.trades,
                algorithm=bb.algorithm, smooth=str(args.smooth).lower(),
                chain=str(config.chain).lower())
    if args.samples == "auto":
        head["power"] = args.power
    with _sink(args.output) as out:
        out.write(_header(**head))
        out.write("# top_label_1 top_label_2 sign p_upper p_lower\n")
        labels = lg.top_labels
        for i, j, sign in bb.edges():
            out.write(
                f"{labels[i]} {labels[j]} {sign:+d} {bb.p_upper[i, j]:.6g} {bb.p_lower[i, j]:.6g}\n"
            )
    if args.seed is None:
        print(f"seed={config.seed}", file=sys.stderr)
    return EXIT_OK


def cmd_project(args) -> int:
    from .fdsm import project

    lg = _read_graph(args)
    w = project(lg.graph).weights
    with _sink(args.output) as out:
        out.write(_header(command="project"))
        out.write("# top_label_1 top_label_2 weight\n")
        labels = lg.top_labels
        for i in range(lg.graph.n):
            for j in range(i + 1, lg.graph.n):
                if w[i, j]:
                    out.write(f"{labels[i]} {labels[j]} {w[i, j]}\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench_sweep, summary_table

    m_values = list(args.m) if args.m is not None else list(DEFAULT_BENCH_M)
    if args.big:
        m_values += [m for m in BIG_BENCH_M if m not in m_values]
    if any(m % 2 or m < 2 for m in m_values):
        raise UsageError("every --m value must be even and at least 2")
    backend = args.backend or kernels.BACKEND
    with _sink(args.output) as out:
        out.write(_header(seed=args.seed, trades=args.trades, replications=args.replications,
                          backend=backend))
        results = bench_sweep(m_values, out, args.trades, args.replications, args.seed, backend)
    report = sys.stderr if args.output in (None, "-") else sys.stdout
    print(summary_table(results), file=report)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import DEFAULT_BATTERY, check_uniformity

    config = _config(args)
    spaces = args.space or list(DEFAULT_BATTERY)
    print(_header(seed=config.seed, trades=args.trades if args.trades is not None else "5n",
                  algorithm=config.algorithm.value, samples=args.samples), end="")
    ok = True
    for text in spaces:
        report = check_uniformity(text, args.samples, config)
        print(report.line())
        ok &= report.passed
    if args.trades is not None and args.trades < 5:
        print("# note: very few trades per sample; failures here diagnose under-mixing")
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "sample": cmd_sample,
    "backbone": cmd_backbone,
    "project": cmd_project,
    "bench": cmd_bench,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"fastball: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidParameter, FastballError) as exc:
        print(f"fastball: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fastball: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
