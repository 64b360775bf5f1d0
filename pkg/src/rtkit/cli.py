"""Command-line front end: ``rtkit <subcommand> ...``.

Exit codes: 0 success, 1 audit or budget failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .emulator import ParameterError, build_emulator, emulator_distances
from .generators import KINDS, generate
from .girth4 import GirthConfig, RetryLimitExceeded, approx_girth_4
from .graph import INF, GraphError, ParseError, read_graph, serialize_graph, write_graph
from .spanner import build_3_spanner
from .sssp import exact_girth

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog.split()[-1]}: {message}" if " " in self.prog else message)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dump_json(obj: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **_jsonable(obj)}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _emit_json(obj: dict, path: str | None, out) -> None:
    text = dump_json(obj)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _load(path: str):
    try:
        return read_graph(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None
    except ParseError as e:
        raise UsageError(f"{path}: {e}") from None


def _fmt(x: int) -> str:
    return "inf" if x == INF else str(int(x))


def resolve_threads(flag: int | None) -> int:
    """Explicit ``--threads`` wins, then RTKIT_THREADS, then all available cores."""
    import numba

    top = numba.config.NUMBA_NUM_THREADS
    want = flag
    if want is None and os.environ.get("RTKIT_THREADS"):
        try:
            want = int(os.environ["RTKIT_THREADS"])
        except ValueError:
            raise UsageError(f"RTKIT_THREADS must be an integer, got {os.environ['RTKIT_THREADS']!r}")
    if want is None:
        want = top
    if want < 1:
        raise UsageError("thread count must be at least 1")
    want = min(want, top)
    numba.set_num_threads(want)
    return want


def _weights(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return lo, hi


def _girth_config(a) -> GirthConfig:
    return GirthConfig(c1=a.c1, c2=a.c2, elim_factor=a.elim_factor, cap_scale=a.cap_scale,
                       retry_limit=a.retry_limit, regularize=not a.no_regularize)


def _add_girth_flags(p):
    d = GirthConfig()
    p.add_argument("--c1", type=float, default=d.c1, help="first-stage sample constant")
    p.add_argument("--c2", type=float, default=d.c2, help="second-stage sample constant")
    p.add_argument("--elim-factor", type=int, default=d.elim_factor,
                   help="eliminator rounds per ceil(log2 n)")
    p.add_argument("--cap-scale", type=float, default=d.cap_scale, help="scale of the ball-size caps")
    p.add_argument("--retry-limit", type=int, default=d.retry_limit)
    p.add_argument("--no-regularize", action="store_true", help="skip degree regularization")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rtkit", description="Roundtrip spanners, emulators and girth estimates.")
    p.add_argument("--version", action="version", version=f"rtkit {__version__}")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: RTKIT_THREADS or all cores)")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a graph")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--weights", type=_weights, default=(1, 1), metavar="LO:HI")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output file (default: stdout)")

    s = sub.add_parser("spanner3", help="build a roundtrip 3-spanner")
    s.add_argument("graph")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="write the spanner here")
    s.add_argument("--stats", help="write JSON stats here")
    s.add_argument("--timings", action="store_true", help="include wall-clock seconds in stats")

    e = sub.add_parser("emulator", help="build a roundtrip (2k-1)-emulator")
    e.add_argument("graph")
    e.add_argument("--k", type=int, default=3)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", help="write the emulator (parallel edges merged) here")
    e.add_argument("--stats", help="write JSON stats here")
    e.add_argument("--timings", action="store_true")

    r = sub.add_parser("girth4", help="4-approximate girth with a witness cycle")
    r.add_argument("graph")
    r.add_argument("--seed", type=int, default=0)
    _add_girth_flags(r)
    r.add_argument("--stats", help="write JSON report here")
    r.add_argument("--timings", action="store_true")

    x = sub.add_parser("girth-exact", help="exact girth")
    x.add_argument("graph")

    a = sub.add_parser("audit", help="check outputs against exact oracles")
    asub = a.add_subparsers(dest="what", required=True, parser_class=_Parser)
    for name in ("spanner", "emulator"):
        q = asub.add_parser(name)
        q.add_argument("--alpha", type=int, required=True, help="stretch bound")
        q.add_argument("graph")
        q.add_argument("candidate")
        q.add_argument("--report", help="write JSON report here")
    q = asub.add_parser("girth")
    q.add_argument("graph")
    q.add_argument("--estimate", help="JSON report from girth4 (default: run girth4 now)")
    q.add_argument("--seed", type=int, default=0)
    _add_girth_flags(q)
    q.add_argument("--report", help="write JSON report here")

    b = sub.add_parser("bench", help="run a builder on generated inputs and check Dijkstra budgets")
    b.add_argument("algo", choices=("spanner3", "emulator", "girth4"))
    b.add_argument("--kind", choices=KINDS, default="random-scc")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--m", type=int, default=None)
    b.add_argument("--weights", type=_weights, default=(1, 100), metavar="LO:HI")
    b.add_argument("--k", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--out", help="write JSON report here")

    lm = sub.add_parser("lemmas", help="random property harness for the distance lemmas")
    lm.add_argument("--lemma", choices=("key-obs", "k-approx", "two-layer", "filter", "all"),
                    default="all")
    lm.add_argument("--trials", type=int, default=100_000)
    lm.add_argument("--k", type=int, default=2, help="k for the k-approx lemma")
    lm.add_argument("--seed", type=int, default=0)
    lm.add_argument("--out", help="write JSON report here")
    return p


# -- subcommands ------------------------------------------------------------------------


def cmd_gen(a, out) -> int:
    try:
        g = generate(a.kind, a.n, a.m, a.weights, seed=a.seed)
    except GraphError as e:
        raise UsageError(str(e)) from None
    if a.out:
        write_graph(g, a.out)
    else:
        out.write(serialize_graph(g))
    return 0


def cmd_spanner3(a, out) -> int:
    g = _load(a.graph)
    t0 = time.perf_counter()
    res = build_3_spanner(g, seed=a.seed)
    stats = dict(res.stats, n=g.n, m=g.m, seed=a.seed)
    if a.timings:
        stats["seconds"] = time.perf_counter() - t0
    if a.out:
        write_graph(res.graph, a.out)
    if a.stats:
        _emit_json(stats, a.stats, out)
    out.write(f"spanner edges: {res.size} of {g.m}\n")
    return 0


def cmd_emulator(a, out) -> int:
    g = _load(a.graph)
    t0 = time.perf_counter()
    try:
        res = build_emulator(g, k=a.k, seed=a.seed)
    except ParameterError as e:
        raise UsageError(str(e)) from None
    stats = dict(res.stats, n=g.n, m=g.m, seed=a.seed)
    if a.timings:
        stats["seconds"] = time.perf_counter() - t0
    if a.out:
        write_graph(emulator_distances(res), a.out)
    if a.stats:
        _emit_json(stats, a.stats, out)
    out.write(f"emulator edges: {res.size} (k={res.k})\n")
    return 0


def _girth_report(est) -> dict:
    return {
        "g_prime": None if est.value == INF else int(est.value),
        "witness": est.witness,
        "phase": est.phase,
        **est.stats,
    }


def cmd_girth4(a, out) -> int:
    g = _load(a.graph)
    try:
        est = approx_girth_4(g, seed=a.seed, config=_girth_config(a), timings=a.timings)
    except RetryLimitExceeded as e:
        sys.stderr.write(f"rtkit: {e}\n")
        return 1
    if a.stats:
        _emit_json(dict(_girth_report(est), seed=a.seed), a.stats, out)
    out.write(_fmt(est.value) + "\n")
    if est.witness:
        out.write("witness: " + " ".join(map(str, est.witness)) + "\n")
    return 0


def cmd_girth_exact(a, out) -> int:
    out.write(_fmt(exact_girth(_load(a.graph))) + "\n")
    return 0


def cmd_audit(a, out) -> int:
    from . import verify

    g = _load(a.graph)
    if a.what in ("spanner", "emulator"):
        h = _load(a.candidate)
        if h.n != g.n:
            raise UsageError(f"vertex counts differ: {g.n} vs {h.n}")
        rep = verify.audit_spanner(g, h, a.alpha, require_subgraph=a.what == "spanner")
        body = rep.as_dict()
        line = (f"{a.what} audit {'passed' if rep.passed else 'FAILED'}: "
                f"max stretch {rep.max_stretch if rep.max_stretch is not None else '-'} "
                f"(bound {a.alpha})")
    else:
        if a.estimate:
            try:
                data = json.loads(Path(a.estimate).read_text(encoding="utf-8"))
            except (OSError, ValueError) as e:
                raise UsageError(f"cannot read estimate {a.estimate}: {e}") from None
            value = INF if data.get("g_prime") is None else int(data["g_prime"])
            witness = data.get("witness")
        else:
            est = approx_girth_4(g, seed=a.seed, config=_girth_config(a))
            value, witness = est.value, est.witness
        rep = verify.audit_girth(g, value, witness)
        body = rep.as_dict()
        line = (f"girth audit {'passed' if rep.passed else 'FAILED'}: "
                f"g={_fmt(rep.exact)} g'={_fmt(rep.estimate)}"
                + (f" ({rep.message})" if rep.message else ""))
    if a.report:
        _emit_json(body, a.report, out)
    elif not rep.passed:
        out.write(dump_json(body))
    out.write(line + "\n")
    return 0 if rep.passed else 1


def _budget(algo: str, res) -> tuple[int, int]:
    """(expected, observed) Dijkstra counts for one run."""
    if algo in ("spanner3", "emulator"):
        st = res.stats
        expected = 2 * sum(r["sample_size"] for r in st["iterations"])
        return expected, st["dijkstra_count"]
    # per component: 2 per distinct first- and second-stage sample, one
    # pruned search per vertex, plus witness recovery and abandoned attempts
    expected = sum(2 * c["s1_distinct"] + 2 * c["s2_distinct"] + c["n"]
                   + c["witness_dijkstra"] + c["discarded_dijkstra"]
                   for c in res.stats["components"])
    phases_ok = all(c["phase1_dijkstra"] == 2 * c["s1_distinct"]
                    and c["phase2_dijkstra"] == 2 * c["s2_distinct"]
                    and c["phase3_dijkstra"] == c["n"] for c in res.stats["components"])
    observed = res.stats["dijkstra_count"]
    return (expected, observed) if phases_ok else (expected, -1)


def cmd_bench(a, out) -> int:
    runs = []
    ok = True
    for i in range(a.repeat):
        seed = a.seed + i
        try:
            g = generate(a.kind, a.n, a.m, a.weights, seed=seed)
        except GraphError as e:
            raise UsageError(str(e)) from None
        t0 = time.perf_counter()
        if a.algo == "spanner3":
            res = build_3_spanner(g, seed=seed)
            size = res.size
        elif a.algo == "emulator":
            try:
                res = build_emulator(g, k=a.k, seed=seed)
            except ParameterError as e:
                raise UsageError(str(e)) from None
            size = res.size
        else:
            res = approx_girth_4(g, seed=seed)
            size = None if res.value == INF else int(res.value)
        secs = time.perf_counter() - t0
        expected, observed = _budget(a.algo, res)
        ok &= expected == observed
        runs.append({"seed": seed, "n": g.n, "m": g.m, "result": size, "seconds": secs,
                     "dijkstra_count": observed, "dijkstra_budget": expected,
                     "budget_ok": expected == observed})
        out.write(f"{a.algo} seed={seed} n={g.n} m={g.m} result={size} "
                  f"dijkstra={observed}/{expected} {secs:.2f}s\n")
    if a.out:
        _emit_json({"algo": a.algo, "kind": a.kind, "runs": runs, "budget_ok": ok}, a.out, out)
    return 0 if ok else 1


def cmd_lemmas(a, out) -> int:
    from .verify import LEMMAS, lemma_harness

    which = LEMMAS if a.lemma == "all" else (a.lemma,)
    reports = []
    for name in which:
        rep = lemma_harness(name, a.trials, a.seed, k=a.k)
        reports.append(rep.as_dict())
        out.write(f"{name}: {rep.premise_hits} tuples over {rep.graphs} graphs, "
                  f"{rep.violations} violations\n")
    if a.out:
        _emit_json({"reports": reports}, a.out, out)
    return 0 if all(r["violations"] == 0 for r in reports) else 1


COMMANDS = {
    "gen": cmd_gen,
    "spanner3": cmd_spanner3,
    "emulator": cmd_emulator,
    "girth4": cmd_girth4,
    "girth-exact": cmd_girth_exact,
    "audit": cmd_audit,
    "bench": cmd_bench,
    "lemmas": cmd_lemmas,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        a = build_parser().parse_args(argv)
        resolve_threads(a.threads)
        return COMMANDS[a.cmd](a, out)
    except UsageError as e:
        sys.stderr.write(f"rtkit: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
