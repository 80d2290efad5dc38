"""Command-line front end.

Subcommands mirror the interactive sessions: build models, emit CI
statements and ideals, compute vanishing ideals with algorithm selection,
print coordinate changes, query a document collection, and benchmark.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .catalog import MODEL_BUILDERS, NAMED_GRAPHS, named_graph, named_model, seed_small_tree_models
from .ci import ci_ideal, gaussian_ring, global_markov, parse_ci_stmt
from .errors import AlgStatError, ParseError, UnsupportedAlgorithm
from .gaussmodels import GaussianModel
from .graphcore import Graph
from .persist import Collection, find, load, save, save_string
from .phylomodels import PhyloModel


def _load_graph(spec: str) -> Graph:
    if spec in NAMED_GRAPHS:
        return named_graph(spec)
    path = Path(spec)
    if not path.exists():
        raise ParseError(f"no such named graph or file: {spec!r}")
    obj = load(path)
    if not isinstance(obj, Graph):
        raise ParseError(f"{spec!r} does not hold a Graph")
    return obj


def _load_model(spec: str):
    if spec in MODEL_BUILDERS:
        return named_model(spec)
    path = Path(spec)
    if not path.exists():
        raise ParseError(f"no such named model or file: {spec!r}")
    obj = load(path)
    if not isinstance(obj, (GaussianModel, PhyloModel)):
        raise ParseError(f"{spec!r} does not hold a model")
    return obj


def _emit(args, text_fn, obj=None):
    if args.format == "json":
        if obj is None:
            raise UnsupportedAlgorithm("no JSON form for this result")
        out = save_string(obj)
    else:
        out = text_fn() + "\n"
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(out)


def _degree_cap(args):
    if args.degree_cap is not None:
        return args.degree_cap
    env = os.environ.get("ALGSTAT_DEGREE_CAP")
    return int(env) if env else None


def _cmd_model_build(args):
    model = _load_model(args.model)
    def text():
        lines = [str(model)]
        if isinstance(model, PhyloModel):
            ring, _ = model.parameter_ring()
            lines.append(f"parameter ring ({ring.n} variables): " + ", ".join(ring.variables))
            mring, _ = model.model_ring()
            lines.append(f"model ring ({mring.n} variables): " + ", ".join(mring.variables))
        else:
            ring, _ = model.parameter_ring()
            lines.append(f"parameter ring ({ring.n} variables): " + ", ".join(ring.variables))
            R = model.model_ring()
            lines.append(f"model ring ({R.ring.n} variables): " + ", ".join(R.ring.variables))
        return "\n".join(lines)
    _emit(args, text, model)
    return 0


def _cmd_model_param(args):
    model = _load_model(args.model)
    if isinstance(model, PhyloModel):
        phi = model.parametrization(args.space)
    else:
        phi = model.parametrization()
    def text():
        lines = []
        for name, im in zip(phi.source.variables, phi.images):
            lines.append(f"{name} -> {im}")
        if phi.denominator is not None:
            lines.append(f"shared denominator: {phi.denominator}")
        return "\n".join(lines)
    _emit(args, text, phi)
    return 0


def _cmd_ci_markov(args):
    G = _load_graph(args.graph)
    stmts = global_markov(G)
    def text():
        return "\n".join(str(s) for s in stmts) if stmts else "(no statements)"
    if args.format == "json":
        out = json.dumps({"statements": [str(s) for s in stmts]}, indent=2) + "\n"
        if args.output:
            Path(args.output).write_text(out, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(out)
        return 0
    _emit(args, text)
    return 0


def _cmd_ci_ideal(args):
    G = _load_graph(args.graph)
    stmts = (
        [parse_ci_stmt(s) for s in args.statements.split(";")]
        if args.statements
        else global_markov(G)
    )
    R = gaussian_ring(G.n)
    I = ci_ideal(R, stmts)
    _emit(args, lambda: "\n".join(str(g) for g in I.gens) or "0", I)
    return 0


def _cmd_ideal_vanishing(args):
    model = _load_model(args.model)
    cap = _degree_cap(args)
    if isinstance(model, PhyloModel):
        I = model.vanishing_ideal(
            space=args.space,
            algorithm=args.algorithm,
            max_degree=args.max_degree,
            workers=args.workers,
            degree_cap=cap,
        )
    else:
        if args.algorithm in ("toric", "multigraded"):
            raise UnsupportedAlgorithm(f"{args.algorithm} applies to phylogenetic models")
        I = model.vanishing_ideal(algorithm=args.algorithm, degree_cap=cap)
    def text():
        lines = [str(g) for g in I.gens] or ["0"]
        if I.degree_bound is not None:
            lines.append(
                f"# degree-bounded at {I.degree_bound}: possibly incomplete"
            )
        return "\n".join(lines)
    _emit(args, text, I)
    return 0


def _cmd_fourier_change(args):
    model = _load_model(args.model)
    if not isinstance(model, PhyloModel):
        raise UnsupportedAlgorithm("coordinate change applies to phylogenetic models")
    phi = model.inverse_coordinate_change() if args.inverse else model.coordinate_change()
    def text():
        return "\n".join(
            f"{name} -> {im}" for name, im in zip(phi.source.variables, phi.images)
        )
    _emit(args, text, phi)
    return 0


def _cmd_db_seed(args):
    coll = seed_small_tree_models(args.path)
    sys.stdout.write(f"seeded {len(coll.ids())} documents in {args.path}\n")
    return 0


def _cmd_db_find(args):
    coll = Collection(args.path)
    query = {}
    if args.query:
        for part in args.query.split(","):
            if "=" not in part:
                raise ParseError(f"query term {part!r} is not key=value")
            k, v = part.split("=", 1)
            query[k.strip()] = v.strip()
    results = list(find(coll, query))
    sys.stdout.write(f"{len(results)}-element result\n")
    for r in results:
        sys.stdout.write(f" {r}\n")
    return 0


def _cmd_bench(args):
    model_spec = args.model
    times = []
    result_desc = ""
    for _ in range(args.repeat):
        model = _load_model(model_spec)  # rebuild to defeat caching
        t0 = time.perf_counter()
        if args.op == "vanishing":
            if isinstance(model, PhyloModel):
                I = model.vanishing_ideal(
                    space=args.space,
                    algorithm=args.algorithm,
                    max_degree=args.max_degree,
                    workers=args.workers,
                )
            else:
                I = model.vanishing_ideal(algorithm=args.algorithm)
            result_desc = f"{len(I.gens)} generators"
        elif args.op == "param":
            phi = model.parametrization() if isinstance(model, GaussianModel) else model.parametrization(args.space)
            result_desc = f"{len(phi.images)} images"
        else:
            raise UnsupportedAlgorithm(f"unknown bench op {args.op!r}")
        times.append(time.perf_counter() - t0)
    mean = sum(times) / len(times)
    sys.stdout.write(
        f"{args.op} on {model_spec}: {result_desc}; "
        f"min {min(times):.4f}s mean {mean:.4f}s over {args.repeat} runs\n"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algstat", description=__doc__)
    p.add_argument("--output", help="write the result to a file instead of stdout")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--degree-cap", type=int, default=None,
                   help="abort Groebner runs above this total degree (default: ALGSTAT_DEGREE_CAP)")
    sub = p.add_subparsers(dest="command", required=True)

    model = sub.add_parser("model", help="build models and print parametrizations")
    msub = model.add_subparsers(dest="subcommand", required=True)
    mb = msub.add_parser("build")
    mb.add_argument("--model", required=True, help=f"named model ({', '.join(sorted(MODEL_BUILDERS))}) or file")
    mb.set_defaults(fn=_cmd_model_build)
    mp = msub.add_parser("param")
    mp.add_argument("--model", required=True)
    mp.add_argument("--space", choices=["probability", "fourier"], default=None)
    mp.set_defaults(fn=_cmd_model_param)

    ci = sub.add_parser("ci", help="conditional independence statements and ideals")
    cisub = ci.add_subparsers(dest="subcommand", required=True)
    cm = cisub.add_parser("markov")
    cm.add_argument("--graph", required=True, help=f"named graph ({', '.join(sorted(NAMED_GRAPHS))}) or file")
    cm.set_defaults(fn=_cmd_ci_markov)
    cid = cisub.add_parser("ideal")
    cid.add_argument("--graph", required=True)
    cid.add_argument("--statements", help="semicolon-separated, e.g. '[1 _||_ 3 | {2, 4}]'")
    cid.set_defaults(fn=_cmd_ci_ideal)

    ideal = sub.add_parser("ideal", help="vanishing ideals")
    isub = ideal.add_subparsers(dest="subcommand", required=True)
    iv = isub.add_parser("vanishing")
    iv.add_argument("--model", required=True)
    iv.add_argument("--space", choices=["probability", "fourier"], default=None)
    iv.add_argument(
        "--algorithm",
        choices=["default", "eliminate", "saturate", "toric", "multigraded"],
        default="default",
    )
    iv.add_argument("--max-degree", type=int, default=3)
    iv.add_argument("--workers", type=int, default=1)
    iv.set_defaults(fn=_cmd_ideal_vanishing)

    fourier = sub.add_parser("fourier", help="coordinate changes")
    fsub = fourier.add_subparsers(dest="subcommand", required=True)
    fc = fsub.add_parser("change")
    fc.add_argument("--model", required=True)
    fc.add_argument("--inverse", action="store_true")
    fc.set_defaults(fn=_cmd_fourier_change)

    db = sub.add_parser("db", help="file-backed model collections")
    dsub = db.add_subparsers(dest="subcommand", required=True)
    ds = dsub.add_parser("seed")
    ds.add_argument("--path", required=True)
    ds.set_defaults(fn=_cmd_db_seed)
    df = dsub.add_parser("find")
    df.add_argument("--path", required=True)
    df.add_argument("--query", help="comma-separated key=value, e.g. data.model_type=JC")
    df.set_defaults(fn=_cmd_db_find)

    bench = sub.add_parser("bench", help="repeat a computation and report wall time")
    bench.add_argument("--model", required=True)
    bench.add_argument("--op", choices=["vanishing", "param"], default="vanishing")
    bench.add_argument("--space", choices=["probability", "fourier"], default=None)
    bench.add_argument("--algorithm", default="default")
    bench.add_argument("--max-degree", type=int, default=3)
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--repeat", type=int, default=3)
    bench.set_defaults(fn=_cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.fn(args)
    except AlgStatError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
