"""Command-line interface: ``qbx validate|compile|run|export|import|lattice|serve``.

Exit codes: 0 success, 1 I/O error, 2 validation or compile error,
3 endpoint error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import uuid
from pathlib import Path

from . import __version__
from .algebra import evaluate_plan, parse_program, resolve_cube, typecheck
from .algebra.plan import TypedPlan
from .errors import EndpointError, QbxError
from .model import Bundle, enumerate_cuboids, lattice_info
from .model.compare import diff_cuboids
from .model.jsonio import cuboid_to_json, dumps, loads
from .model.schema import Cuboid
from .model.validate import ValidationReport, validate_cube, validate_cuboid, validate_dimension, validate_instance
from .qb4olap import Qb4olapCatalog, graph_to_model, model_to_graph, parse_turtle, serialize_turtle

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_ENDPOINT = 0, 1, 2, 3
DEFAULT_BASE = "http://example.org/qbx"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.exit_code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from None


def _is_turtle(path: str) -> bool:
    return Path(path).suffix.lower() in (".ttl", ".turtle", ".nt")


def _load_bundle(path: str) -> Bundle:
    text = _read(path)
    if _is_turtle(path):
        return graph_to_model(parse_turtle(text))
    try:
        return loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INVALID, f"{path}: invalid JSON: {exc}") from None
    except (KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID, f"{path}: malformed model ({exc!r})") from None


def _source(args) -> tuple[Bundle, Qb4olapCatalog]:
    """Model bundle and catalog from --model (JSON) or --graph (Turtle)."""
    if args.graph:
        g = parse_turtle(_read(args.graph))
        return graph_to_model(g), Qb4olapCatalog(g)
    if args.model:
        bundle = _load_bundle(args.model)
        return bundle, Qb4olapCatalog(model_to_graph(bundle, args.base_iri))
    raise CliError(EXIT_IO, "give --model or --graph")


def _plan(args, bundle: Bundle) -> TypedPlan:
    prog = parse_program(_read(args.program))
    cube = resolve_cube(prog, bundle.cubes)
    levels = None
    for cb in bundle.cuboids.values():
        if cb.schema.name == cube.name:
            levels = cb.levels
            break
    return typecheck(prog, cube, levels)


def format_table(cb: Cuboid) -> str:
    head = list(cb.schema.role_names) + list(cb.schema.measure_names)
    rows = [[str(x) for x in k] + [str(v) for v in vals] for k, vals in cb.sorted_cells()]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(head)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    out = [line(head), line(["-" * w for w in widths])] + [line(r) for r in rows]
    return "\n".join(out) + "\n"


def _emit_cuboid(cb: Cuboid, fmt: str, out: str | None) -> None:
    if fmt == "json":
        _write(out, json.dumps(cuboid_to_json(cb), indent=2, ensure_ascii=False) + "\n")
    else:
        _write(out, format_table(cb))


# commands


def cmd_validate(args) -> int:
    status = EXIT_OK
    for path in args.paths:
        bundle = _load_bundle(path)
        rep = ValidationReport()
        for dim in bundle.dimensions.values():
            rep.extend(validate_dimension(dim))
        for inst in bundle.instances.values():
            rep.extend(validate_instance(inst))
        for cube in bundle.cubes.values():
            rep.extend(validate_cube(cube))
        for cb in bundle.cuboids.values():
            rep.extend(validate_cuboid(cb, bundle.instances_for(cb.schema)))
        print(f"{path}: {'valid' if rep.ok else 'INVALID'}")
        for line in dict.fromkeys(str(i) for i in rep.issues):
            print("  " + line)
        if not rep.ok:
            status = EXIT_INVALID
    return status


def _compile(args, bundle: Bundle, cat: Qb4olapCatalog, run_id: str):
    from .sparql import compile_plan

    plan = _plan(args, bundle)
    return plan, compile_plan(plan, cat, args.base_iri, run_id, model_graph=args.model_graph)


def cmd_compile(args) -> int:
    bundle, cat = _source(args)
    plan, compiled = _compile(args, bundle, cat, args.run_id)
    if args.emit == "plan":
        text = "".join(f"{i}. {node}\n" for i, node in enumerate(plan.steps, start=1))
        _write(args.out, text)
        return EXIT_OK
    chunks = []
    for st in compiled.steps:
        chunks.append(f"# step {st.index}: {st.label}\n# reads <{st.input_dataset}>, writes <{st.output_dataset}>"
                      f" (store in <{st.temp_graph}>)\n{st.text}")
    if args.out and (Path(args.out).is_dir() or args.out.endswith("/")):
        Path(args.out).mkdir(parents=True, exist_ok=True)
        for st, chunk in zip(compiled.steps, chunks):
            _write(str(Path(args.out) / f"step{st.index}.rq"), chunk)
    else:
        _write(args.out, "\n".join(chunks))
    return EXIT_OK


def _engine(args):
    source = args.endpoint or os.environ.get("QBX_ENDPOINT")
    if not source or source == "local":
        from .endpoint import LocalEngine

        return LocalEngine()
    from .endpoint import EndpointConfig, SparqlClient

    return SparqlClient(EndpointConfig.parse(source))


def _oracle(bundle: Bundle, plan: TypedPlan) -> Cuboid:
    cube = plan.input.schema
    for cb in bundle.cuboids.values():
        if cb.schema.name == cube.name and cb.levels == plan.input.levels:
            return evaluate_plan(plan, cb, bundle.instances_for(cube))
    raise CliError(EXIT_INVALID, f"no stored cuboid of {cube.name} at {plan.input.levels}")


def cmd_run(args) -> int:
    bundle, cat = _source(args)
    if args.oracle and not args.check:
        plan = _plan(args, bundle)
        _emit_cuboid(_oracle(bundle, plan), args.emit, args.out)
        return EXIT_OK
    from .endpoint import run_compiled

    run_id = args.run_id or uuid.uuid4().hex[:8]
    plan, compiled = _compile(args, bundle, cat, run_id)
    engine = _engine(args)
    engine.upload_graph(cat.graph, compiled.model_graph)
    result = run_compiled(compiled, engine, keep=args.keep)
    if args.check:
        expected = _oracle(bundle, plan)
        diffs = diff_cuboids(result.cuboid, expected)
        if diffs:
            print(f"MISMATCH ({len(diffs)} cells differ); first at {diffs[0].coords}: "
                  f"endpoint={diffs[0].left} oracle={diffs[0].right}")
            return EXIT_INVALID
        print(f"MATCH ({len(expected)} cells)")
        return EXIT_OK
    if args.emit == "turtle":
        _write(args.out, serialize_turtle(result.graph))
    else:
        _emit_cuboid(result.cuboid, args.emit, args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    bundle = _load_bundle(args.model)
    _write(args.out, serialize_turtle(model_to_graph(bundle, args.base_iri)))
    return EXIT_OK


def cmd_import(args) -> int:
    bundle = graph_to_model(parse_turtle(_read(args.graph)))
    _write(args.out, dumps(bundle))
    return EXIT_OK


def cmd_lattice(args) -> int:
    bundle = _load_bundle(args.graph or args.model)
    if args.cube and args.cube not in bundle.cubes:
        raise CliError(EXIT_INVALID, f"unknown cube {args.cube!r}")
    cubes = [bundle.cubes[args.cube]] if args.cube else list(bundle.cubes.values())
    lines = []
    for cube in cubes:
        info = lattice_info(cube)
        sizes = ", ".join(f"{r.name}={len(r.dimension.levels)}" for r in cube.roles)
        lines += [f"cube {cube.name}",
                  f"  levels per role: {sizes}",
                  f"  cuboids: {info.cuboid_count} (enumerated {len(enumerate_cuboids(cube))})",
                  f"  bottom: {', '.join(info.bottom)}",
                  f"  top: {', '.join(info.top)}"]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .endpoint import LocalEngine, make_server

    engine = LocalEngine()
    if args.model or args.graph:
        _, cat = _source(args)
        engine.upload_graph(cat.graph, args.model_graph or args.base_iri.rstrip("/#") + "/graphs/model")
    server = make_server(args.host, args.port, engine)
    host, port = server.server_address[:2]
    print(f"serving SPARQL on http://{host}:{port}/sparql and graph store on http://{host}:{port}/store",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbx", description="OLAP algebra over QB4OLAP cubes, compiled to SPARQL.")
    parser.add_argument("--version", action="version", version=f"qbx {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--model", help="model JSON file")
        g.add_argument("--graph", help="QB4OLAP Turtle file")
        p.add_argument("--base-iri", default=DEFAULT_BASE, help=f"base IRI for minted IRIs (default {DEFAULT_BASE})")
        p.add_argument("--model-graph", help="named graph holding the model on the endpoint")

    p = sub.add_parser("validate", help="check model files against the model definitions")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="compile an algebra program to SPARQL")
    p.add_argument("program")
    source(p)
    p.add_argument("--emit", choices=("sparql", "plan"), default="sparql")
    p.add_argument("--out", help="output file, or directory for one .rq file per step")
    p.add_argument("--run-id", default="run", help="name used in intermediate graph and dataset IRIs")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="execute an algebra program on an endpoint or with the oracle")
    p.add_argument("program")
    source(p)
    p.add_argument("--endpoint", help="query URL, JSON endpoint config, or 'local' (default: $QBX_ENDPOINT, else local)")
    p.add_argument("--emit", choices=("table", "json", "turtle"), default="table")
    p.add_argument("--out")
    p.add_argument("--oracle", action="store_true", help="evaluate in memory only")
    p.add_argument("--check", action="store_true", help="run on the endpoint and compare with the oracle")
    p.add_argument("--keep", action="store_true", help="keep intermediate graphs")
    p.add_argument("--run-id")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("export", help="model JSON to QB4OLAP Turtle")
    p.add_argument("--model", required=True)
    p.add_argument("--base-iri", default=DEFAULT_BASE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="QB4OLAP Turtle to model JSON")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("lattice", help="print cuboid lattice facts")
    source(p)
    p.add_argument("--cube")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("serve", help="serve an in-memory SPARQL endpoint")
    source(p, required=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8890)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except EndpointError as exc:
        print(f"endpoint error: {exc}", file=sys.stderr)
        return EXIT_ENDPOINT
    except QbxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
