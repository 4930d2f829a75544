"""Command-line entry point.  Every command prints one JSON document on stdout.

Exit codes: 0 ok, 2 input error, 3 search bound exhausted, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np
from sympy import isprime

from . import cset_core as cs
from . import finite_group as fg
from . import metric as mt
from . import rationals as rt
from . import topology as tp
from .signature import FinPresSet

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_SEARCH, EXIT_INTERNAL = 0, 2, 3, 4


class InputError(ValueError):
    pass


@dataclass
class CommandResult:
    command: list[str]
    payload: object
    status: int
    seconds: float

    def dumps(self) -> str:
        return json.dumps(self.payload, sort_keys=True, indent=2, ensure_ascii=False)


# -- helpers -----------------------------------------------------------------------------

def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}") from None


def _metric_config(args) -> mt.MetricConfig:
    cfg = {}
    if getattr(args, "config", None):
        cfg = _load_json(args.config)
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a JSON object")
    known = {"sieve_bound", "d_max", "search_disc_bound", "search_clause_width", "compat"}
    unknown = set(cfg) - known
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    compat = bool(getattr(args, "compat", False) or cfg.get("compat", False))
    d_max = getattr(args, "dmax", None) or cfg.get("d_max", mt.COMPAT_D_MAX if compat else 20)
    out = mt.MetricConfig(
        d_max=int(d_max),
        search_disc_bound=int(getattr(args, "search_disc_bound", None) or cfg.get("search_disc_bound", max(60, int(d_max)))),
        search_clause_width=int(cfg.get("search_clause_width", 2)),
        compat_mode=compat,
        sieve_bound=int(getattr(args, "sieve_bound", None) or cfg.get("sieve_bound", 100_000)),
        grouped_cells=bool(getattr(args, "grouped", False)),
    )
    return out


def _group(args) -> fg.FiniteGroup:
    if getattr(args, "builtin", None):
        return fg.builtin(args.builtin)
    if not getattr(args, "file", None):
        raise InputError("give a group file or --builtin")
    return fg.build_group(_load_json(args.file))


def _set_from(arg: str) -> FinPresSet:
    """A set presentation from a file path or an inline JSON document."""
    text = arg.strip()
    data = json.loads(text) if text.startswith("{") else _load_json(arg)
    return FinPresSet.from_json(data)


def _primes_arg(text: str) -> list[int]:
    text = text.strip()
    if "," in text or text.startswith("["):
        vals = json.loads(text) if text.startswith("[") else [int(t) for t in text.split(",") if t.strip()]
        for v in vals:
            if not isprime(int(v)):
                raise InputError(f"{v} is not prime")
        return sorted({int(v) for v in vals})
    return [int(p) for p in rt.primes(int(text))]


# -- commands ----------------------------------------------------------------------------

def cmd_group(args):
    G = _group(args)
    classes = fg.conjugacy_classes(G)
    out = {
        "order": G.order,
        "abelian": G.is_abelian(),
        "exponent": G.exponent(),
        "names": dict(sorted(G.names.items())),
        "center": list(G.center().members),
        "classes": [list(c.members) for c in classes],
        "class_sizes": [c.size for c in classes],
    }
    if args.centralizer is not None:
        out["centralizer"] = list(fg.centralizer(G, G.element(args.centralizer)).members)
    if args.sylow is not None:
        P, cyc = fg.sylow_and_cyclicity(G, args.sylow)
        out["sylow"] = {"ell": args.sylow, "members": list(P.members), "cyclic": cyc}
    return out


def _context(args) -> cs.GaloisContext:
    spec = _load_json(args.context)
    if isinstance(spec, dict) and isinstance(spec.get("group"), str):
        # the group may live in its own file, resolved next to the context file
        path = Path(args.context).parent / spec["group"]
        spec = {**spec, "group": _load_json(str(path))}
    return cs.context_from_spec(spec)


def _cset(ctx, level: str, class_of: str | None, element: int | None) -> cs.CebClassSet:
    if class_of is not None:
        return cs.make_cset_from_ambient(ctx, level, ctx.ambient.element(class_of))
    if element is not None:
        return cs.make_cset(ctx, level, element)
    raise InputError("give --class-of (ambient element) or --element (quotient element)")


def cmd_cset(args):
    ctx = _context(args)
    a = _cset(ctx, args.level, args.class_of, args.element)
    if args.action == "density":
        return {"level": a.level, "classes": a.as_dict()["classes"], "density": str(cs.density(a))}
    if args.action == "lift":
        return cs.lift_to_level(a, args.to).as_dict()
    if args.action == "complement":
        return cs.complement_unramified(a).as_dict()
    if not args.other_level:
        raise InputError(f"'{args.action}' needs --other-level")
    b = _cset(ctx, args.other_level, args.other_class_of, args.other_element)
    if args.action == "intersect":
        return cs.intersect(a, b).as_dict()
    if args.action == "disjoint":
        return {"disjoint": cs.is_disjoint(a, b)}
    if args.action == "almost-subset":
        return {"almost_subset": cs.almost_subset(a, b), "almost_equal": cs.almost_equal(a, b),
                "oracle": cs.almost_subset_oracle(a, b)}
    raise InputError(f"unknown cset action {args.action}")


def cmd_frobenius(args):
    if not isprime(args.p):
        raise InputError(f"{args.p} is not prime")
    if args.quad is not None:
        F = rt.QuadField(args.quad)
        f = rt.frobenius(args.p, F)
        return {"prime": args.p, "field": str(F), "discriminant": F.discriminant, "symbol": f.label}
    if args.conductor is not None:
        r = rt.frobenius(args.p, args.conductor)
        return {"prime": args.p, "conductor": args.conductor,
                "ramified": r is None, "residue": r}
    raise InputError("give --quad or --conductor")


def cmd_sieve(args):
    st = rt.sieve_stats(args.pred, args.bound)
    return {"predicate": args.pred, "bound": args.bound, "count": st.count, "prime_count": st.total,
            "density": round(st.density, 12), "members": [int(p) for p in st.members[: args.limit]],
            "truncated": st.count > args.limit}


def cmd_topology(args):
    if args.action == "member":
        s = _set_from(args.set)
        return {"prime": args.p, "member": tp.member(args.p, s), "set": s.as_json()}
    if args.action == "complement":
        s = _set_from(args.set)
        return {"set": s.as_json(), "complement": tp.complement(s).as_json()}
    if args.action == "closure":
        s = _set_from(args.set)
        return tp.certify_clopen(s).as_json()
    if args.action == "refine":
        cover = [_set_from(x) for x in args.sets]
        try:
            cells = tp.refine_partition(cover, require_clopen=args.strict)
        except tp.RefinementError as e:
            raise InputError(f"{e} (witness {e.witness})") from None
        return {"cells": [c.as_json() for c in cells]}
    if args.action == "separate":
        out = tp.separate_primes(args.p1, args.p2, args.bound).as_json()
        out["search_bound"] = args.bound
        return out
    raise InputError(f"unknown topology action {args.action}")


def cmd_metric(args):
    cfg = _metric_config(args)
    if args.action == "report":
        return mt.compat_report(cfg)
    h = mt.Hierarchy(cfg)
    if args.action == "delta":
        r = mt.delta(args.x, args.y, cfg, h)
        out = {"config": cfg.as_json(), **r.as_json()}
        if cfg.compat_mode:
            out["printed_value"] = mt.printed_value(args.x, args.y)
        return out
    if args.action == "partition":
        if args.d > cfg.d_max:
            cfg = replace(cfg, d_max=args.d, search_disc_bound=max(cfg.search_disc_bound, args.d))
            h = mt.Hierarchy(cfg)
        lv = h.partition(args.d)
        out = lv.as_json(args.inline)
        out["cells"] = [c.as_json(args.inline) for c in lv.cells]
        out["validity"] = h.validity(args.d)
        out["config"] = cfg.as_json()
        return out
    if args.action == "matrix":
        m = mt.delta_matrix(_primes_arg(args.primes), cfg, h)
        if args.csv:
            _write(args.csv, m.to_csv(args.convention))
        return {
            "config": cfg.as_json(), "primes": m.primes, "convention": args.convention,
            "matrix": [[m.get(x, y).text(args.convention) for y in m.primes] for x in m.primes],
            "ultrametric_violations": [list(t) for t in m.ultrametric_violations(args.convention)],
            "symmetric": m.is_symmetric(args.convention), "csv": args.csv,
        }
    raise InputError(f"unknown metric action {args.action}")


def density_audit(radicands: Sequence[int], bound: int) -> dict:
    ctx = rt.multiquad_context(radicands)
    ps = rt.primes(bound)
    basis = ctx.basis
    vals = [rt.frobenius_array(ps, b) for b in basis]
    unram = np.ones(ps.size, dtype=bool)
    for v in vals:
        unram &= v != 0
    total = int(unram.sum())
    rows = []
    for signs in product((1, -1), repeat=len(basis)):
        m = unram.copy()
        for v, s in zip(vals, signs):
            m &= v == s
        rows.append({"signature": list(signs), "count": int(m.sum()),
                     "empirical": round(int(m.sum()) / total, 6) if total else None,
                     "expected": f"1/{2 ** len(basis)}"})
    return {"schema": "density-audit/1", "radicands": list(radicands), "basis": list(basis),
            "bound": bound, "unramified_primes": total, "rows": rows}


def cmd_report(args):
    cfg = _metric_config(args)
    if args.kind == "compat-comparison":
        out = mt.compat_report(cfg, args.prime_bound)
    elif args.kind == "discrepancy":
        full = mt.compat_report(cfg, args.prime_bound)
        out = {"schema": "discrepancy/1", "config": full["config"], "anomalies": full["anomalies"],
               "pairs": [r for r in full["pairs"] if not r["agrees"]]}
    elif args.kind == "density-audit":
        out = density_audit(args.radicands or [-3, -1], args.bound)
    else:
        raise InputError(f"unknown report kind {args.kind}")
    out["schema_version"] = SCHEMA_VERSION
    if args.out:
        _write(args.out, json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return out


# -- parser ------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cebotarev", description="Čebotarev sets, Frobenius arithmetic and the prime ultrametric.")
    p.add_argument("--config", help="JSON file with sieve_bound, d_max, search_disc_bound, search_clause_width, compat")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("group", help="inspect a finite group")
    g.add_argument("file", nargs="?")
    g.add_argument("--builtin", help="e.g. heisenberg:3, symmetric:3, cyclic:4, dihedral:4, quaternion")
    g.add_argument("--centralizer")
    g.add_argument("--sylow", type=int)
    g.set_defaults(func=cmd_group)

    c = sub.add_parser("cset", help="Čebotarev-set algebra in a Galois context")
    c.add_argument("action", choices=["density", "lift", "complement", "intersect", "disjoint", "almost-subset"])
    c.add_argument("--context", required=True)
    c.add_argument("--level", required=True)
    c.add_argument("--class-of", help="ambient element (index or name) whose image picks the class")
    c.add_argument("--element", type=int, help="element of the quotient")
    c.add_argument("--to", help="finer level for lift")
    c.add_argument("--other-level")
    c.add_argument("--other-class-of")
    c.add_argument("--other-element", type=int)
    c.set_defaults(func=cmd_cset)

    f = sub.add_parser("frobenius", help="Frobenius of a prime")
    f.add_argument("p", type=int)
    grp = f.add_mutually_exclusive_group(required=True)
    grp.add_argument("--quad", type=int)
    grp.add_argument("--conductor", type=int)
    f.set_defaults(func=cmd_frobenius)

    s = sub.add_parser("sieve", help="primes satisfying a predicate")
    s.add_argument("--pred", required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--limit", type=int, default=100)
    s.set_defaults(func=cmd_sieve)

    t = sub.add_parser("topology", help="finitely presented prime sets")
    tsub = t.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = tsub.add_parser("member")
    x.add_argument("p", type=int)
    x.add_argument("--set", required=True, help="file or inline JSON presentation")
    for name in ("complement", "closure"):
        x = tsub.add_parser(name)
        x.add_argument("--set", required=True)
    x = tsub.add_parser("refine")
    x.add_argument("sets", nargs="+")
    x.add_argument("--strict", action="store_true", help="reject cover elements that are not certified clopen")
    x = tsub.add_parser("separate")
    x.add_argument("p1", type=int)
    x.add_argument("p2", type=int)
    x.add_argument("--bound", type=int, default=10 ** 6, help="largest auxiliary prime searched")
    t.set_defaults(func=cmd_topology)

    m = sub.add_parser("metric", help="level partitions and the ultrametric")
    msub = m.add_subparsers(dest="action", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--dmax", type=int)
    common.add_argument("--compat", action="store_true")
    common.add_argument("--search-disc-bound", type=int)
    common.add_argument("--sieve-bound", type=int)
    common.add_argument("--grouped", action="store_true", help="one block for all signature cells")
    x = msub.add_parser("delta", parents=[common])
    x.add_argument("x", type=int)
    x.add_argument("y", type=int)
    x = msub.add_parser("matrix", parents=[common])
    x.add_argument("--primes", required=True, help="comma list or a bound")
    x.add_argument("--csv")
    x.add_argument("--convention", choices=["literal", "first-nonempty"], default="literal")
    x = msub.add_parser("partition", parents=[common])
    x.add_argument("d", type=int)
    x.add_argument("--inline", action="store_true", help="expand Ṽ names into their presentations")
    x = msub.add_parser("report", parents=[common])
    m.set_defaults(func=cmd_metric)

    r = sub.add_parser("report", help="export a report")
    r.add_argument("kind", choices=["compat-comparison", "discrepancy", "density-audit"])
    r.add_argument("--out")
    r.add_argument("--prime-bound", type=int, default=mt.COMPAT_PRIME_BOUND)
    r.add_argument("--radicands", type=int, nargs="*")
    r.add_argument("--bound", type=int, default=10 ** 6)
    r.set_defaults(func=cmd_report)
    return p


def execute(argv: Sequence[str]) -> CommandResult:
    argv = list(argv)
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        payload, status = args.func(args), EXIT_OK
    except tp.SearchExhausted as e:
        payload, status = _error("search-exhausted", e), EXIT_SEARCH
    except (ValueError, KeyError, TypeError, OSError) as e:
        payload, status = _error("input", e), EXIT_INPUT
    except AssertionError as e:
        payload, status = _error("invariant", e), EXIT_INTERNAL
    except Exception as e:  # any other failure is a bug; still report it structurally
        payload, status = _error("internal", e), EXIT_INTERNAL
    return CommandResult(argv, payload, status, time.perf_counter() - start)


def _error(kind: str, e: BaseException) -> dict:
    return {"error": {"kind": kind, "type": type(e).__name__, "message": str(e)}}


def main(argv: Sequence[str] | None = None) -> int:
    res = execute(sys.argv[1:] if argv is None else argv)
    print(res.dumps())
    return res.status


if __name__ == "__main__":
    sys.exit(main())
