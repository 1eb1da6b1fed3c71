"""Command-line interface: classify, enumerate, check, gadget, bench."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import testkit
from .classifier import classify
from .engine import DatabaseError, EngineError, enumerate_ucq, load_database, write_database
from .engine.steps import StepCounter
from .query import QueryError, parse_ucq

OK, CHECK_FAILED, INPUT_ERROR, NOT_TRACTABLE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read_query(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        return parse_ucq(text)
    except QueryError as e:
        raise InputError(f"{path}: {e}") from e


def _load(manifest, q=None):
    try:
        db = load_database(manifest)
        if q is not None:
            db.check_schema(q)
        return db
    except (OSError, DatabaseError, ValueError) as e:
        raise InputError(str(e)) from e


def _out(path):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def cmd_classify(args):
    q = _read_query(args.query)
    v = classify(q)
    json.dump(v.to_json(), sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")
    return OK


def cmd_enumerate(args):
    q = _read_query(args.query)
    db = _load(args.data, q)
    v = classify(q)
    if not v.tractable:
        json.dump(v.to_json(), sys.stderr, indent=2, ensure_ascii=False)
        sys.stderr.write("\n")
        return NOT_TRACTABLE
    try:
        en = enumerate_ucq(v.query, v.certificate, db, mode=args.mode, strict=False)
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    out = _out(args.out)
    count = 0
    for a in en:
        if args.limit is not None and count >= args.limit:
            break
        out.write(json.dumps(list(db.decode(a)), ensure_ascii=False) + "\n")
        count += 1
    if out is not sys.stdout:
        out.close()
    if args.stats:
        json.dump(en.summary(), sys.stderr if args.out in (None, "-") else sys.stdout, indent=2)
        (sys.stderr if args.out in (None, "-") else sys.stdout).write("\n")
    return OK


def cmd_check(args):
    q = _read_query(args.query)
    db = _load(args.data, q)
    want = testkit.brute_force_eval(q, db)
    v = classify(q)
    if not v.tractable:
        print(f"{v.kind}: engine not applicable; oracle has {len(want)} answers")
        return OK
    got = list(enumerate_ucq(v.query, v.certificate, db, mode=args.mode, strict=False,
                             fault=args.inject_fault))
    dups = len(got) - len(set(got))
    missing = sorted(want - set(got))
    extra = sorted(set(got) - want)
    if not dups and not missing and not extra:
        print(f"ok: {len(got)} answers match the oracle")
        return OK
    print(f"mismatch: {len(missing)} missing, {len(extra)} unexpected, {dups} duplicates")
    shown = [("missing", a) for a in missing] + [("unexpected", a) for a in extra]
    for kind, a in shown[:10]:
        print(f"  {kind} {json.dumps(list(db.decode(a)), ensure_ascii=False)}")
    return CHECK_FAILED


def cmd_gadget(args):
    out = Path(args.out)
    if args.kind == "matmul":
        q = _read_query(args.query) if args.query else parse_ucq(
            "Q1(x,y,w) <- R1(x,z), R2(z,y), R3(y,w).")
        from .structure import free_paths

        paths = [P for c in q for P in free_paths(c)]
        if not paths:
            raise InputError("matmul gadget needs a query with a free-path")
        import random

        rng = random.Random(args.seed)
        n = args.size
        cells = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1)]
        A = {c for c in cells if rng.random() < 0.5}
        B = {c for c in cells if rng.random() < 0.5}
        rows = testkit.gen_matmul(A, B, q, paths[0])
    elif args.kind == "triangle-list":
        q = _read_query(args.query) if args.query else parse_ucq(
            "Q1(x,y,t), Q2(x,y,w) <- R1(x,w,t), R2(y,w,t).")
        G = testkit.random_graph(args.seed, args.size)
        try:
            rows = testkit.gen_triangle_list(G, q)
        except QueryError as e:
            raise InputError(str(e)) from e
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "graph.csv", "w", newline="") as f:
            csv.writer(f).writerows(G)
    elif args.kind == "var-tagged":
        if not args.query:
            raise InputError("var-tagged gadget needs --query")
        q = _read_query(args.query)
        db = testkit.gen_random(args.seed, q.arities, args.size, max(2, args.size))
        rows, _ = testkit.gen_var_tagged(q, q[0], db)
    elif args.kind == "random":
        if not args.query:
            raise InputError("random gadget needs --query")
        q = _read_query(args.query)
        db = testkit.gen_random(args.seed, q.arities, args.size, max(2, args.size))
        rows = db.decoded()
    else:
        raise InputError(f"unknown gadget kind {args.kind!r}")
    manifest = write_database(rows, out, q.arities)
    print(manifest)
    return OK


def cmd_bench(args):
    q = _read_query(args.query)
    v = classify(q)
    if not v.tractable:
        json.dump(v.to_json(), sys.stderr, indent=2)
        return NOT_TRACTABLE
    sizes = [int(s) for s in args.sizes.split(",")]
    out = _out(args.out)
    w = csv.writer(out)
    w.writerow(["n", "method", "preprocessing_steps", "max_delay_steps", "phase_max_delay_steps",
                "answers", "seconds"])
    for n in sizes:
        db = testkit.gen_planted(args.seed, q, n)
        t0 = time.perf_counter()
        en = enumerate_ucq(v.query, v.certificate, db, strict=False)
        count = sum(1 for _ in en)
        s = en.summary()
        phase_delay = max(ph["max_delay_steps"] for ph in s["phases"])
        w.writerow([n, "engine", s["preprocessing_steps"], s["max_delay_steps"], phase_delay, count,
                    f"{time.perf_counter() - t0:.3f}"])
        if args.brute_force and n <= args.brute_force:
            steps = StepCounter()
            t0 = time.perf_counter()
            count = _counted_brute_force(q, db, steps)
            w.writerow([n, "brute-force", 0, steps.max_delay, steps.max_delay, count,
                        f"{time.perf_counter() - t0:.3f}"])
        out.flush()
    if out is not sys.stdout:
        out.close()
    return OK


def _counted_brute_force(q, db, steps):
    """Naive evaluation with one step per visited partial assignment, so
    the per-answer cost shows up in the same unit as the engine's."""
    seen = set()
    steps.begin_enumeration()
    for c in q:
        atoms = list(c.body)
        mu = {}

        def go(i):
            steps.add(1)
            if i == len(atoms):
                yield tuple(mu[v] for v in c.head)
                return
            a = atoms[i]
            for t in db.get(a.relation):
                steps.add(1)
                added = []
                ok = True
                for v, val in zip(a.args, t):
                    if v not in mu:
                        mu[v] = val
                        added.append(v)
                    elif mu[v] != val:
                        ok = False
                        break
                if ok:
                    yield from go(i + 1)
                for v in added:
                    del mu[v]

        for ans in go(0):
            if ans not in seen:
                seen.add(ans)
                steps.answer()
    return len(seen)


def build_parser():
    p = argparse.ArgumentParser(prog="ucqenum", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="print the tractability verdict as JSON")
    c.add_argument("query")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("enumerate", help="stream answers as NDJSON")
    e.add_argument("query")
    e.add_argument("data", help="database manifest (JSON)")
    e.add_argument("--mode", choices=["general", "interleave"], default="general")
    e.add_argument("--limit", type=int)
    e.add_argument("--stats", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    k = sub.add_parser("check", help="compare the engine with the brute-force oracle")
    k.add_argument("query")
    k.add_argument("data")
    k.add_argument("--mode", choices=["general", "interleave"], default="general")
    k.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    k.set_defaults(func=cmd_check)

    g = sub.add_parser("gadget", help="write a reduction or random instance")
    g.add_argument("kind", help="matmul | triangle-list | var-tagged | random")
    g.add_argument("--size", type=int, default=3)
    g.add_argument("--query")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gadget)

    b = sub.add_parser("bench", help="delay metrics over growing random instances (CSV)")
    b.add_argument("query")
    b.add_argument("--sizes", default="100,1000,10000")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--brute-force", type=int, default=0, metavar="N",
                   help="also run the naive evaluator for sizes up to N")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
