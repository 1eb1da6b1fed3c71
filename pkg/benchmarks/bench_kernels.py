"""Compiled vs pure-Python relational kernels, plus one end-to-end run.

    python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]
"""
import argparse
import importlib
import os
import random
import subprocess
import sys
import timeit

from ucqenum.engine import _kernels_py as pure

try:
    cy = importlib.import_module("ucqenum.engine._ckernels")
except ImportError:
    cy = None


def workload(n, seed=0):
    rng = random.Random(seed)
    dom = max(2, n // 4)
    rows = [(rng.randrange(dom), rng.randrange(dom), rng.randrange(dom)) for _ in range(n)]
    other = [(rng.randrange(dom), rng.randrange(dom)) for _ in range(n)]
    return rows, other


def cases(mod, rows, other):
    keys = mod.key_set(other, (0,))
    rowset = set(rows[::2])
    return {
        "project": lambda: mod.project(rows, (0, 2)),
        "project_eq": lambda: mod.project(rows, (0, 1), ((0, 2),)),
        "key_set": lambda: mod.key_set(rows, (1,)),
        "semijoin": lambda: mod.semijoin(rows, (1,), keys),
        "build_index": lambda: mod.build_index(rows, (0,)),
        "intersect": lambda: mod.intersect(rows, rowset),
    }


END_TO_END = (
    "import time\n"
    "from ucqenum.classifier import classify\n"
    "from ucqenum.engine import BACKEND, enumerate_ucq\n"
    "from ucqenum.golden import golden_queries\n"
    "from ucqenum.testkit import gen_planted\n"
    "q = golden_queries()['yellow']; v = classify(q); db = gen_planted(0, q, {n})\n"
    "t = time.perf_counter(); c = sum(1 for _ in enumerate_ucq(v.query, v.certificate, db))\n"
    "print(BACKEND, c, round(time.perf_counter() - t, 3))\n"
)


def end_to_end(n):
    out = []
    for pure_flag in ("1", ""):
        env = dict(os.environ, UCQENUM_PURE=pure_flag)
        r = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env,
                           capture_output=True, text=True, check=True)
        out.append(r.stdout.split())
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--e2e", type=int, default=5000, help="planted instance size for the end-to-end run")
    args = ap.parse_args(argv)

    rows, other = workload(args.rows)
    py = cases(pure, rows, other)
    cc = cases(cy, rows, other) if cy else {}
    print(f"{'kernel':<12} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn in py.items():
        tp = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        if name in cc:
            assert cc[name]() == fn(), name
            tc = min(timeit.repeat(cc[name], number=1, repeat=args.repeat))
            print(f"{name:<12} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.2f}x")
        else:
            print(f"{name:<12} {tp:>10.4f} {'n/a':>10}")
    if not cy:
        print("compiled kernels not built; only the pure backend was timed")
    print("\nend to end (yellow, planted n=%d): backend answers seconds" % args.e2e)
    for line in end_to_end(args.e2e):
        print("  " + " ".join(line))


if __name__ == "__main__":
    main()
