"""Command-line front end: ``ranksyz <command> ...``.

Exit codes: 0 success (or verified recovery), 1 attack failure or failing
property, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from . import __version__
from .attack_driver import AUTO, COLUMNS, ROWS, AttackConfig, AttackError, full_attack, planted_matches
from .estimator import BUILTIN, DEFAULT_OMEGA, EstimatorError, load_params, security_table, table_to_csv, table_to_json
from .field_core import FieldError
from .maxminors import MinorsError, expected_syzygy_count, harvest, regime
from .modelling import ModellingError, Specialization, build_oj_system, default_specialization, planted_assignment
from .rank_codes import CodeError, dumps_instance, extend_code, gen_instance, loads_instance


class UsageError(Exception):
    pass


def _meta(args, **extra) -> dict:
    out = {"version": __version__, "command": args.command, "seed": getattr(args, "seed", None)}
    out.update(extra)
    return out


def _set_threads(n: int | None) -> None:
    if n is None:
        env = os.environ.get("RANKSYZ_THREADS")
        if not env:
            return
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"RANKSYZ_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("--threads must be >= 1")
    import numba
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _params(ns) -> tuple[int, int, int, int]:
    m, n, k, r = ns.m, ns.n, ns.k, ns.r
    if min(m, n, k, r) < 1:
        raise UsageError("m, n, k, r must be positive")
    if k >= n:
        raise UsageError("need k < n")
    return m, n, k, r


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    m, n, k, r = _params(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = gen_instance(m, n, k, r, args.seed, args.q)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    d = json.loads(dumps_instance(inst))
    d["meta"] = _meta(args, params=[m, n, k, r])
    text = json.dumps(d)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _read_instance(path: str | None):
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(path) as fh:
            text = fh.read()
    # JSON-lines: the last non-empty line is the instance
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise UsageError("no instance on input")
    try:
        return loads_instance(lines[-1] if len(lines) > 1 else text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"instance is not valid JSON: {exc}") from exc


def cmd_attack(args) -> int:
    inst = _read_instance(args.instance)
    trace = None
    if args.trace:
        def trace(entry):
            print(json.dumps(entry), flush=True)
    cfg = AttackConfig(c=args.c, max_column_retries=args.retries, seed=args.seed, d_cap=args.d_cap,
                       rank_sweep=args.rank_sweep, mode=args.mode, trace=trace)
    out = full_attack(inst, cfg)
    T = inst.tower
    res = {
        "success": out.success,
        "target_rank": out.target_rank,
        "d_max": out.d_max,
        "attempts": [{"rank": a.target_rank, "j0": a.j0, "block": list(a.block), "mode": a.mode,
                      "status": a.status, "d_ff": a.d_ff, "d_max": a.d_max,
                      "elapsed": round(a.elapsed, 3)} for a in out.attempts],
        "elapsed": round(out.elapsed, 3),
        "note": out.note,
        "meta": _meta(args, params=[T.m, inst.n, inst.k, inst.r]),
    }
    if out.success:
        res["error"] = [T.format(int(x)) for x in out.error]
        res["codeword"] = [T.format(int(x)) for x in out.codeword]
        if inst.planted is not None:
            res["matches_planted"] = planted_matches(inst, out.error)
    print(json.dumps(res))
    return 0 if out.success else 1


def cmd_regime(args) -> int:
    m, n, k, r = _params(args)
    reg = regime(m, n, k, r)
    if args.json:
        print(json.dumps({"regime": reg.name, "n_equations": reg.n_equations,
                          "over_threshold": reg.over_threshold, "under_threshold": reg.under_threshold,
                          "meta": _meta(args, params=[m, n, k, r])}))
    else:
        print(reg.name)
    return 0


def cmd_syzygies(args) -> int:
    m, n, k, r = _params(args)
    deg, cnt = expected_syzygy_count(m, n, k, r)
    res = {"expected": f"{deg}:{cnt}", "regime": regime(m, n, k, r).name}
    if args.observe:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            inst = gen_instance(m, n, k, r, args.seed)
        ext = extend_code(inst)
        # pin a column where the planted error is nonzero; with e_{j0} = 0 the
        # minors vector lives in the j0-free block and one extra row drops
        e = ext.to_permuted(inst.error)
        j0 = next(j for j in range(1, n + 1) if int(e[j - 1]))
        spec = Specialization(j0, default_specialization(r).T)
        vs = build_oj_system(ext, spec).varspace
        H = harvest(ext, vs)
        res["j0"] = j0
        res["observed"] = f"{H.degree}:{H.count}"
        res["rank_M"] = H.rank
        res["as_expected"] = H.as_expected
        pt = planted_assignment(ext, spec)
        if pt is not None:
            res["vanish_at_planted"] = all(p.evaluate(pt) == 0 for p in H.polys)
    res["meta"] = _meta(args, params=[m, n, k, r])
    print(json.dumps(res))
    return 0 if res.get("as_expected", True) else 1


def cmd_estimate(args) -> int:
    params = BUILTIN if args.params == "builtin" else load_params(args.params)
    d = args.d if args.d in ("auto", "r", "r+1", "r+2") else None
    if d is None:
        raise UsageError(f"--d must be auto, r, r+1 or r+2, got {args.d!r}")
    rows = security_table(params, args.omega, d)
    if args.format == "json":
        print(table_to_json(rows))
    else:
        sys.stdout.write(table_to_csv(rows))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite
    print(f"# ranksyz {__version__} verify seed={args.seed} quick={args.quick}")
    results = run_suite(args.seed, args.quick)
    failed = [c for c in results if not c.passed]
    print(f"# {len(results) - len(failed)}/{len(results)} properties pass")
    return 0 if not failed else 1


def cmd_bench(args) -> int:
    m, n, k, r = _params(args)
    print("seed,success,matches_planted,d_max,attempts,elapsed_s")
    ok = True
    for seed in range(args.seed, args.seed + args.instances):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            inst = gen_instance(m, n, k, r, seed)
        out = full_attack(inst, AttackConfig(seed=seed, mode=args.mode))
        ok &= out.success
        match = planted_matches(inst, out.error) if out.success else False
        print(f"{seed},{int(out.success)},{int(match)},{out.d_max},{len(out.attempts)},{out.elapsed:.2f}", flush=True)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ranksyz", description="Algebraic rank-metric decoding toolkit")
    p.add_argument("--version", action="version", version=f"ranksyz {__version__}")
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads (or RANKSYZ_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    def mnkr(sp):
        for name in ("m", "n", "k", "r"):
            sp.add_argument(name, type=int)

    g = sub.add_parser("gen", help="planted decoding instance as one JSON line")
    mnkr(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--q", type=int, default=2)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("attack", help="recover the error of an instance")
    a.add_argument("--instance", default=None, help="instance file (default: stdin)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--c", type=int, default=None, help="blocks per pinned column")
    a.add_argument("--retries", type=int, default=4, help="fresh pinned columns to try")
    a.add_argument("--d-cap", type=int, default=None)
    a.add_argument("--mode", choices=(AUTO, ROWS, COLUMNS), default=AUTO)
    a.add_argument("--rank-sweep", action="store_true")
    a.add_argument("--trace", action="store_true", help="one JSON line per Macaulay matrix")
    a.set_defaults(func=cmd_attack)

    rg = sub.add_parser("regime", help="MaxMinors regime of (m,n,k,r)")
    mnkr(rg)
    rg.add_argument("--json", action="store_true")
    rg.set_defaults(func=cmd_regime)

    s = sub.add_parser("syzygies", help="expected (and observed) degree:count of the harvest")
    mnkr(s)
    s.add_argument("--observe", action="store_true", help="also harvest a planted instance")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_syzygies)

    e = sub.add_parser("estimate", help="bit-security table")
    e.add_argument("--params", default="builtin", help="builtin or a JSON file")
    e.add_argument("--omega", type=float, default=DEFAULT_OMEGA)
    e.add_argument("--d", default="auto")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("verify", help="run the property battery")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="full attack on consecutive seeds, CSV output")
    mnkr(b)
    b.add_argument("--instances", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--mode", choices=(AUTO, ROWS, COLUMNS), default=AUTO)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _set_threads(args.threads)
        return args.func(args)
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); not an error of ours
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (UsageError, CodeError, MinorsError, ModellingError, EstimatorError, FieldError, AttackError,
            FileNotFoundError, ValueError) as exc:
        print(f"ranksyz {args.command}: error: {exc}", file=sys.stderr)
        return 2


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
