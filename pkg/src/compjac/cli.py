"""Command-line entry point: ``compjac <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import random
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .conjectures import (
    check_flatness,
    check_grm,
    check_planar,
    check_sp_points,
    check_toric,
    exit_code,
    hilbert_report,
)
from .gradedquot import CACHE_ENV, DiskCache, betti_J, filtration_table, o_presentation
from .oracles import catalan_count, dyck_poly
from .semigroups import balance, enumerate_modules, gaps, p_basis, q_basis, semigroup_pq

RESULT_SCHEMA = "compjac.result/1"


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str = __version__
    presentation_hashes: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def key(self) -> str:
        """Cache key: everything that determines the result."""
        blob = json.dumps({"command": self.command, "parameters": self.parameters,
                           "tool_version": self.tool_version}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_json(self) -> dict:
        return {"command": self.command, "parameters": self.parameters,
                "tool_version": self.tool_version,
                "presentation_hashes": sorted(set(self.presentation_hashes)),
                "bounds": self.bounds, "outputs": list(self.outputs), "key": self.key()}


class ResultCache:
    """Finished results by manifest key, next to the degreewise cache."""

    def __init__(self, root):
        self.dir = Path(root) / "results"

    def load(self, key: str):
        path = self.dir / f"{key}.json"
        if path.exists():
            return json.loads(path.read_text())
        return None

    def store(self, key: str, payload: dict) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
        os.replace(tmp, self.dir / f"{key}.json")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _pairs(args) -> list:
    out = []
    for p in args.p:
        for q in args.q:
            if math.gcd(p, q) != 1 or p < 2 or q < 2:
                raise SystemExit(f"compjac: ({p},{q}) must be coprime integers >= 2")
            out.append((p, q))
    return out


# ---------------------------------------------------------------------------
# one task per parameter set; each returns (result dict, manifest extras)
# ---------------------------------------------------------------------------


def _task_hilbert(p, q, route, cache_dir):
    cache = DiskCache.from_env(cache_dir)
    res = hilbert_report(p, q, route, cache)
    res["catalan"] = catalan_count(p, q)
    return res, [o_presentation(p, q, route).content_hash()], {}


def _task_betti(p, q, B, cache_dir):
    bv = betti_J(p, q, B=B, cache=DiskCache.from_env(cache_dir))
    res = {"p": p, "q": q, "betti": bv.values, "catalan": catalan_count(p, q),
           "certificate": bv.certificate}
    return res, [bv.certificate["presentation"]], {"B": bv.certificate["B"]}


def _task_filtration(p, q, B, cache_dir):
    t = filtration_table(p, q, B=B, cache=DiskCache.from_env(cache_dir))
    res = {"p": p, "q": q, **t.to_json(), "support_ok": t.support_ok(), "lefschetz_ok": t.lefschetz_ok()}
    return res, [], {"B": B}


def _task_report(kind, kwargs, timing):
    fn = {"grm": check_grm, "toric": check_toric, "planar": check_planar,
          "flatness": check_flatness, "sp-points": check_sp_points}[kind]
    rep = fn(**kwargs)
    return rep.to_json(timing), [], dict(rep.bounds)


def _task_modules(p, q):
    out = []
    for d in enumerate_modules(semigroup_pq(p, q)):
        sigma = balance(d)
        out.append({**sigma.to_json(), "p_basis": list(p_basis(sigma, p).values),
                    "q_basis": list(q_basis(sigma, q).values)})
    return {"p": p, "q": q, "count": len(out), "catalan": catalan_count(p, q), "modules": out}, [], {}


def _task_dyck(p, q):
    return {"p": p, "q": q, "dyck": dyck_poly(p, q), "catalan": catalan_count(p, q)}, [], {}


def _run_task(task):
    fn, args = task
    return fn(*args)


def _tasks(args) -> list:
    cd = args.cache_dir
    c = args.command
    if c == "hilbert":
        return [(_task_hilbert, (p, q, args.route, cd)) for p, q in _pairs(args)]
    if c == "betti":
        return [(_task_betti, (p, q, args.B, cd)) for p, q in _pairs(args)]
    if c == "filtration":
        return [(_task_filtration, (p, q, args.B, cd)) for p, q in _pairs(args)]
    if c == "grm":
        return [(_task_report, ("grm", {"p": p, "q": q, "cache": DiskCache.from_env(cd),
                                        "with_table": not args.no_table}, args.timing))
                for p, q in _pairs(args)]
    if c == "toric":
        kw = {"generators": tuple(args.gens)}
        if args.degree_bound is not None:
            kw["degree_bound"] = args.degree_bound
        return [(_task_report, ("toric", kw, args.timing))]
    if c == "planar":
        if args.family != "4,2q,s":
            raise SystemExit("compjac: only the family 4,2q,s is supported")
        kw = {"q": args.q, "s": args.s, "convention": args.convention}
        if args.reference:
            kw["reference"] = args.reference
        return [(_task_report, ("planar", kw, args.timing))]
    if c == "flatness":
        return [(_task_report, ("flatness", {"p": p, "q": q, "window": args.window,
                                             "cache": DiskCache.from_env(cd)}, args.timing))
                for p, q in _pairs(args)]
    if c == "sp-points":
        return [(_task_report, ("sp-points", {"p": p, "q": q}, args.timing)) for p, q in _pairs(args)]
    if c == "modules":
        return [(_task_modules, (p, q)) for p, q in _pairs(args)]
    if c == "dyck":
        return [(_task_dyck, (p, q)) for p, q in _pairs(args)]
    raise SystemExit(f"compjac: unknown command {c}")


def _parameters(args) -> dict:
    skip = {"json", "csv", "cache_dir", "jobs", "out", "timing", "func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _text(command: str, results: list) -> str:
    lines = []
    for r in results:
        if "verdict" in r:
            head = f"{r['conjecture']} {json.dumps(r['parameters'], sort_keys=True)}: {r['verdict']}"
            lines.append(head)
            ev = r["evidence"]
            for k in ("betti", "gr_m_series", "gr_m_reversed", "dim_O", "module_count",
                      "fake_betti", "reference", "strict_at", "total_dim", "strict_slots",
                      "vanishing_ok", "zero_set_ok", "error"):
                if k in ev:
                    lines.append(f"  {k}: {ev[k]}")
        elif command == "hilbert":
            lines.append(f"({r['p']},{r['q']}) route={r['route']} hilbert={r['hilbert']} dim={r['dim']}")
        elif command == "betti":
            lines.append(f"({r['p']},{r['q']}) betti={r['betti']} sum={sum(r['betti'])}")
        elif command == "filtration":
            lines.append(f"({r['p']},{r['q']}) row_sums={r['row_sums']} col_sums={r['col_sums']}")
            for i, j, v in r["entries"]:
                lines.append(f"  dims({i},{j}) = {v}")
        elif command == "modules":
            lines.append(f"({r['p']},{r['q']}) {r['count']} balanced modules")
            for m in r["modules"]:
                lines.append(f"  adjoined={m['adjoined']} shift={m['shift']} p_basis={m['p_basis']}")
        elif command == "dyck":
            lines.append(f"({r['p']},{r['q']}) dyck={r['dyck']}")
    return "\n".join(lines) + "\n"


def _csv(command: str, results: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command in ("hilbert", "betti", "dyck"):
        key = {"hilbert": "hilbert", "betti": "betti", "dyck": "dyck"}[command]
        w.writerow(["p", "q", "index", "value"])
        for r in results:
            for i, v in enumerate(r[key]):
                w.writerow([r["p"], r["q"], i, v])
    elif command == "filtration":
        w.writerow(["p", "q", "i", "j", "dim"])
        for r in results:
            for i, j, v in r["entries"]:
                w.writerow([r["p"], r["q"], i, j, v])
    elif command == "modules":
        w.writerow(["p", "q", "adjoined", "shift", "p_basis"])
        for r in results:
            for m in r["modules"]:
                w.writerow([r["p"], r["q"], " ".join(map(str, m["adjoined"])), m["shift"],
                            " ".join(map(str, m["p_basis"]))])
    else:
        w.writerow(["conjecture", "parameters", "verdict"])
        for r in results:
            w.writerow([r["conjecture"], json.dumps(r["parameters"], sort_keys=True), r["verdict"]])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common_flags(top: bool) -> argparse.ArgumentParser:
    # subcommand copies must not reset flags given before the subcommand
    def d(value):
        return value if top else argparse.SUPPRESS

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=d(False), help="canonical JSON output")
    common.add_argument("--csv", action="store_true", default=d(False),
                        help="CSV projection of the result tables")
    common.add_argument("--cache-dir", default=d(None), help=f"cache directory (default: ${CACHE_ENV})")
    common.add_argument("--jobs", type=int, default=d(1), help="parallel workers over parameter sets")
    common.add_argument("--seed", type=int, default=d(0), help="seed for randomized helpers")
    common.add_argument("--timing", action="store_true", default=d(False),
                        help="include wall-clock times in JSON")
    common.add_argument("--out", default=d(None), help="write the output to this file")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compjac", description=__doc__, parents=[_common_flags(True)])
    common = _common_flags(False)
    parser.add_argument("--version", action="version", version=f"compjac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def pq(name, help_text):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        sp.add_argument("-p", type=_int_list, required=True, help="p (comma list allowed)")
        sp.add_argument("-q", type=_int_list, required=True, help="q (comma list allowed)")
        return sp

    sp = pq("hilbert", "Hilbert function of O_{q/p}")
    sp.add_argument("--route", choices=["g", "IO", "IO-full", "toric"], default="g")
    sp = pq("betti", "Betti numbers of the compactified Jacobian")
    sp.add_argument("-B", type=int, default=None, help="stable s-degree (default 2*delta)")
    sp = pq("filtration", "double filtration table")
    sp.add_argument("-B", type=int, default=None, help="stable s-degree (default 2*delta + 2)")
    sp = pq("grm", "compare Betti numbers with Gr_m of O_{q/p}")
    sp.add_argument("--no-table", action="store_true", help="skip the filtration table")
    sp = sub.add_parser("toric", help="toric conjecture for a semigroup", parents=[common])
    sp.add_argument("--gens", type=_int_list, required=True, help="minimal generators, e.g. 4,6,7")
    sp.add_argument("--degree-bound", type=int, default=None)
    sp = sub.add_parser("planar", help="fake Betti numbers of the family 4,2q,s", parents=[common])
    sp.add_argument("--family", default="4,2q,s")
    sp.add_argument("-q", type=int, required=True)
    sp.add_argument("-s", type=int, required=True)
    sp.add_argument("--convention", choices=["paper", "strict"], default="strict")
    sp.add_argument("--reference", type=_int_list, default=None, help="reference Betti row")
    sp = pq("flatness", "flatness probe")
    sp.add_argument("--window", type=lambda t: tuple(_int_list(t)), default=None, help="A,B")
    pq("sp-points", "parabolic fixed points")
    pq("modules", "balanced modules and their bases")
    pq("dyck", "Young-diagram polynomial")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    cache_root = args.cache_dir or os.environ.get(CACHE_ENV)
    manifest = RunManifest(args.command, _parameters(args))
    if args.out:
        manifest.outputs.append(str(args.out))
    rcache = ResultCache(cache_root) if cache_root else None
    cached = rcache.load(manifest.key()) if rcache and not args.timing else None
    if cached is not None:
        results = cached["results"]
        manifest.presentation_hashes = cached["manifest"]["presentation_hashes"]
        manifest.bounds = cached["manifest"]["bounds"]
    else:
        tasks = _tasks(args)
        try:
            if args.jobs > 1 and len(tasks) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                    outs = list(ex.map(_run_task, tasks))
            else:
                outs = [_run_task(t) for t in tasks]
        except Exception as exc:  # module diagnostics are surfaced verbatim
            print(f"compjac: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 3
        results = [o[0] for o in outs]
        for _, hashes, bounds in outs:
            manifest.presentation_hashes.extend(hashes)
            for k, v in bounds.items():
                manifest.bounds.setdefault(k, v)
        if rcache and not args.timing:
            rcache.store(manifest.key(), {"manifest": manifest.to_json(), "results": results})
    payload = {"schema": RESULT_SCHEMA, "manifest": manifest.to_json(), "results": results}
    if args.json:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif args.csv:
        text = _csv(args.command, results)
    else:
        text = _text(args.command, results)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    verdicts = [r["verdict"] for r in results if "verdict" in r]
    return exit_code(verdicts) if verdicts else 0


if __name__ == "__main__":
    sys.exit(main())
