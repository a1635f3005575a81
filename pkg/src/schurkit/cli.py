"""Command line front end.

Verbs: partitions, kostka, schur-dim, hom, ext, weyl, delta, nabla, simple,
cauchy, verify-hwc, tilting, ringel.  Exit status 0 on success/pass, 1 on a
verification failure, 2 on a usage error.  Output is deterministic: fixed key
order, canonical basis orders; rationals print as exact fraction strings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import combinat as cb
from . import exactla as la
from . import hwc
from . import polyfun as pf
from . import ringel as rg
from . import weylschur as ws
from .rings import RingSpec
from .schuralg import schur_algebra


class UsageError(Exception):
    pass


def _ring(text: str) -> RingSpec:
    try:
        return RingSpec.parse(text)
    except ValueError as e:
        raise UsageError(str(e))


def _partition(text: str) -> cb.Partition:
    try:
        return cb.parse_partition(text)
    except ValueError as e:
        raise UsageError(str(e))


def _emit(doc, args) -> None:
    if args.json:
        sys.stdout.write(json.dumps(doc) + "\n")
    else:
        _emit_text(doc)


def _emit_text(doc, indent: str = "") -> None:
    if isinstance(doc, dict):
        width = max((len(str(k)) for k in doc), default=0)
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                sys.stdout.write(f"{indent}{k}:\n")
                _emit_text(v, indent + "  ")
            else:
                sys.stdout.write(f"{indent}{str(k):<{width}}  {_flat(v)}\n")
    elif isinstance(doc, list):
        for v in doc:
            sys.stdout.write(f"{indent}{_flat(v)}\n")
    else:
        sys.stdout.write(f"{indent}{doc}\n")


def _is_flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v) and len(v) <= 12
    return False


def _flat(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    return str(v)


def _load_algebra(n: int, d: int, ring: RingSpec, args):
    alg = schur_algebra(n, d, ring)
    if args.cache_dir:
        path = os.path.join(args.cache_dir, f"schur_{n}_{d}_{ring}.json")
        if os.path.exists(path):
            try:
                with open(path) as fh:
                    alg.import_cache(json.load(fh))
            except (json.JSONDecodeError, OSError):
                pass
    return alg


def _store_algebra(alg, ring: RingSpec, args) -> None:
    if not args.cache_dir:
        return
    os.makedirs(args.cache_dir, exist_ok=True)
    path = os.path.join(args.cache_dir, f"schur_{alg.n}_{alg.d}_{ring}.json")
    fd, tmp = tempfile.mkstemp(dir=args.cache_dir, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(alg.export_cache(), fh)
    os.replace(tmp, path)


def _require_categorical(n: int, d: int) -> None:
    if n < d:
        raise UsageError(
            f"this verb needs n >= d (got n={n}, d={d}): evaluation below the "
            "faithful range does not see the whole category")


def _pstr(lam) -> str:
    return ",".join(map(str, lam))


# ----------------------------------------------------------------------
# Verb implementations (return (exit_code, document))
# ----------------------------------------------------------------------

def cmd_partitions(args):
    parts = cb.partitions(args.d)
    return 0, {"d": args.d, "count": len(parts), "partitions": [list(p) for p in parts]}


def cmd_kostka(args):
    lam = _partition(args.lam)
    mu = _partition(args.mu)
    if cb.weight(lam) != cb.weight(mu):
        raise UsageError("lambda and mu must have equal weight")
    k = cb.kostka(lam, cb.pad(mu, max(len(mu), len(lam), 1)))
    return 0, {"lambda": _pstr(lam), "mu": _pstr(mu), "kostka": k}


def cmd_schur_dim(args):
    ring = _ring(args.ring)
    alg = _load_algebra(args.n, args.d, ring, args)
    doc = {"n": args.n, "d": args.d, "ring": str(ring), "dim": alg.dim}
    if args.dump_table:
        doc["table"] = alg.dump_json()
        _store_algebra(alg, ring, args)
    return 0, doc


def cmd_hom(args):
    ring = _ring(args.ring)
    lam = _partition(args.lam)
    mu = _partition(args.mu)
    n = args.n
    builders = {
        "gamma": lambda p: pf.eval_divided(p, n, ring),
        "sym": lambda p: pf.eval_symmetric(p, n, ring),
        "ext": lambda p: pf.eval_exterior(p, n, ring),
        "delta": lambda p: ws.standard_object(p, n, ring).quotient,
        "nabla": lambda p: ws.costandard_object(p, n, ring),
    }
    x = builders[args.source](mu)
    y = builders[args.target](lam)
    dim = len(pf.hom_space(x, y, reduced=args.reduced))
    return 0, {"source": f"{args.source}^({_pstr(mu)})", "target": f"{args.target}^({_pstr(lam)})",
               "n": n, "ring": str(ring), "dim": dim}


def cmd_ext(args):
    ring = _ring(args.ring)
    lam = _partition(args.lam)
    mu = _partition(args.mu)
    pres = hwc.standard_presentation(lam, args.n, ring)
    nabla = ws.costandard_object(mu, args.n, ring)
    val = hwc.ext1(pres, nabla, reduced=args.reduced)
    return 0, {"lambda": _pstr(lam), "mu": _pstr(mu), "n": args.n, "ring": str(ring),
               "ext1(Delta(lambda),nabla(mu))": val.describe(ring)}


def cmd_weyl(args):
    ring = _ring(args.ring)
    lam = _partition(args.lam)
    w = ws.weyl(lam, args.n, ring)
    cover = w.cover.dense()
    doc = {
        "lambda": _pstr(lam), "n": args.n, "ring": str(ring),
        "rank": w.rank,
        "tableau_basis": [[list(row) for row in t.rows] for t in w.tableau_basis],
        "cover": [[ring.scalar_str(x) for x in row] for row in cover.data],
    }
    return 0, doc


def cmd_delta(args):
    ring = _ring(args.ring)
    lam = _partition(args.lam)
    delta = ws.standard_object(lam, args.n, ring)
    doc = delta.quotient.dump_json()
    doc = {"lambda": _pstr(lam), "n": args.n, "ring": str(ring), **doc,
           "kernel_rank": delta.U.rank}
    return 0, doc


def cmd_nabla(args):
    ring = _ring(args.ring)
    lam = _partition(args.lam)
    nab = ws.costandard_object(lam, args.n, ring)
    doc = nab.dump_json()
    return 0, {"lambda": _pstr(lam), "n": args.n, "ring": str(ring), **doc}


def cmd_simple(args):
    ring = _ring(args.ring)
    if not ring.is_field:
        raise UsageError("simple heads need a field (Q or Fp:<prime>)")
    lam = _partition(args.lam)
    mod = ws.simple_head(lam, args.n, ring)
    doc = mod.dump_json()
    return 0, {"lambda": _pstr(lam), "n": args.n, "ring": str(ring), **doc}


def cmd_cauchy(args):
    ring = _ring(args.ring)
    mu = _partition(args.mu)
    chain = hwc.cauchy_filtration_projective(mu, args.n, ring, reduced=args.reduced)
    steps = [{"lambda": _pstr(s.lam), "multiplicity": s.multiplicity,
              "factor_rank": s.factor_rank, "verified": s.witness_verified}
             for s in chain.steps]
    doc = {"mu": _pstr(mu), "n": args.n, "ring": str(ring),
           "ambient_rank": chain.ambient.rank, "steps": steps,
           "verdict": "pass" if chain.success else "fail"}
    return (0 if chain.success else 1), doc


def cmd_verify_hwc(args):
    ring = _ring(args.ring)
    _require_categorical(args.n, args.d)
    cert = hwc.verify_hwc(args.n, args.d, ring, reduced=args.reduced)
    return (0 if cert.verdict == "pass" else 1), cert.to_json()


def cmd_tilting(args):
    ring = _ring(args.ring)
    _require_categorical(args.n, args.d)
    t = rg.tilting_object(args.n, args.d, ring, reduced=args.reduced)
    return (0 if t.verdict == "pass" else 1), t.to_json()


def cmd_ringel(args):
    ring = _ring(args.ring)
    _require_categorical(args.n, args.d)
    rep = rg.ringel_self_duality_check(args.n, args.d, ring, reduced=args.reduced)
    return (0 if rep.verdict == "pass" else 1), rep.to_json()


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="schurkit",
        description="Exact computations with Schur algebras and their modules.")
    sub = top.add_subparsers(dest="verb", required=True)

    def common(p, n=False, d=False, ring=False, lam=False, mu=False):
        if n:
            p.add_argument("--n", type=int, required=True, help="rank of the base module")
        if d:
            p.add_argument("--d", type=int, required=True, help="degree")
        if ring:
            p.add_argument("--ring", default="Q", help="Z, Q, or Fp:<prime> (e.g. F2)")
        if lam:
            p.add_argument("--lambda", dest="lam", required=True,
                           help="partition, e.g. 2,1")
        if mu:
            p.add_argument("--mu", required=True, help="partition, e.g. 1,1,1")
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--text", action="store_true", help="emit aligned text (default)")
        p.add_argument("--cache-dir", default=None, help="cache directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker cap (checks run serially; accepted for compatibility)")
        p.add_argument("--reduced", action="store_true", default=True,
                       help=argparse.SUPPRESS)
        p.add_argument("--full-checking-set", dest="reduced", action="store_false",
                       help="use the full basis as the equivariance checking set")

    p = sub.add_parser("partitions", help="partitions of d")
    p.add_argument("--d", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_partitions)

    p = sub.add_parser("kostka", help="number of tableaux of shape lambda, content mu")
    common(p, lam=True, mu=True)
    p.set_defaults(fn=cmd_kostka)

    p = sub.add_parser("schur-dim", help="dimension of the Schur algebra")
    common(p, n=True, d=True, ring=True)
    p.add_argument("--dump-table", action="store_true",
                   help="include the basis and multiplication table")
    p.set_defaults(fn=cmd_schur_dim)

    p = sub.add_parser("hom", help="dimension of a Hom space")
    common(p, n=True, ring=True, lam=True, mu=True)
    p.add_argument("--source", default="gamma",
                   choices=["gamma", "sym", "ext", "delta", "nabla"])
    p.add_argument("--target", default="gamma",
                   choices=["gamma", "sym", "ext", "delta", "nabla"])
    p.set_defaults(fn=cmd_hom)

    p = sub.add_parser("ext", help="Ext^1 between a standard and a costandard object")
    common(p, n=True, ring=True, lam=True, mu=True)
    p.set_defaults(fn=cmd_ext)

    p = sub.add_parser("weyl", help="Weyl module: rank, tableau basis, cover")
    common(p, n=True, ring=True, lam=True)
    p.set_defaults(fn=cmd_weyl)

    p = sub.add_parser("delta", help="standard object")
    common(p, n=True, ring=True, lam=True)
    p.set_defaults(fn=cmd_delta)

    p = sub.add_parser("nabla", help="costandard object")
    common(p, n=True, ring=True, lam=True)
    p.set_defaults(fn=cmd_nabla)

    p = sub.add_parser("simple", help="simple head over a field")
    common(p, n=True, ring=True, lam=True)
    p.set_defaults(fn=cmd_simple)

    p = sub.add_parser("cauchy", help="Cauchy filtration of a projective")
    common(p, n=True, ring=True, mu=True)
    p.set_defaults(fn=cmd_cauchy)

    p = sub.add_parser("verify-hwc", help="highest weight certificate")
    common(p, n=True, d=True, ring=True)
    p.set_defaults(fn=cmd_verify_hwc)

    p = sub.add_parser("tilting", help="characteristic tilting object checks")
    common(p, n=True, d=True, ring=True)
    p.set_defaults(fn=cmd_tilting)

    p = sub.add_parser("ringel", help="Ringel self-duality check")
    common(p, n=True, d=True, ring=True)
    p.set_defaults(fn=cmd_ringel)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        sys.stderr.write("error: --jobs must be at least 1\n")
        return 2
    try:
        code, doc = args.fn(args)
    except UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except la.TorsionError as e:
        sys.stderr.write(f"verification failure: {e}\n")
        return 1
    _emit(doc, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
