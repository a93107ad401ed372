"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_backends.py [--m 1000 10000] [--trades 100] [--replications 5]

Prints mean milliseconds per 100-trade replication for each backend and
algorithm, plus the compiled speedup. Falls back to a python-only table when
the extension is not built.
"""

import argparse

from fastball import kernels
from fastball.bench import run_bench
from fastball.sampler import Algorithm


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, nargs="+", default=[1_000, 10_000])
    parser.add_argument("--trades", type=int, default=100)
    parser.add_argument("--replications", type=int, default=5)
    args = parser.parse_args(argv)

    backends = kernels.available()
    print(f"{'m':>8} {'algorithm':>10} " + " ".join(f"{b + '_ms':>12}" for b in backends)
          + (f" {'speedup':>8}" if len(backends) > 1 else ""))
    for m in args.m:
        for alg in Algorithm:
            means = [run_bench(alg, m, args.trades, args.replications, backend=b).mean / 1e6 for b in backends]
            line = f"{m:>8} {alg.value:>10} " + " ".join(f"{t:>12.3f}" for t in means)
            if len(means) > 1:
                line += f" {means[1] / means[0]:>7.0f}x"
            print(line)


if __name__ == "__main__":
    main()
