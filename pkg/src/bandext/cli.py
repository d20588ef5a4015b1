"""Command-line harness.

Every verb except ``serve`` is a thin HTTP client: it builds a request,
sends it to the service (in-process by default, or to ``--server URL``),
and renders the JSON response as console text, CSV, or a field dump.
Rendering from the response keeps local and remote runs byte-identical,
since JSON round-trips doubles exactly.
"""

from __future__ import annotations

import argparse
import asyncio
import sys

import httpx
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .experiments import thread_count
from .grid import Grid
from .io import write_csv, write_structured_points

CONVERGENCE_COLUMNS = ("N", "h", "error", "pairwise_order",
                       "iterations_stage1", "iterations_stage2",
                       "iterations_stage3", "wall_ms", "converged")
SWEEP_COLUMNS = ("step", "t", "dt", "uncovered", "error")

DUMP_FIELD_ORDER = ("phi", "q_exact", "q_extended", "band_error",
                    "mask_phi", "mask_grad", "mask_hess")


def _call(server: str | None, method: str, path: str, payload=None) -> dict:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            resp = client.request(method, path, json=payload)
    else:
        from .service import create_app

        async def in_process():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://bandext.internal",
                                         timeout=None) as client:
                return await client.request(method, path, json=payload)

        resp = asyncio.run(in_process())
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(2)
    return resp.json()


def _solver_payload(args) -> dict:
    return {
        "method": args.method,
        "order": args.order,
        "tol": args.tol,
        "max_iters": args.max_iters,
        "band_factor": args.band_factor,
        "dtau_override": args.dtau,
        "minmod_cache": not args.no_minmod_cache,
        "neighbors_only_masks": args.neighbors_only_masks,
    }


def _fmt(value, digits=4) -> str:
    if value is None:
        return "nan"
    return f"{value:.{digits}g}"


def cmd_list_shapes(args) -> int:
    shapes = _call(args.server, "GET", "/shapes")
    for s in shapes:
        print(f"{s['key']:16s} {s['dim']}D  {s['description']}")
    return 0


def cmd_convergence(args) -> int:
    payload = _solver_payload(args)
    payload.update({
        "shape": args.shape,
        "field": args.field,
        "resolutions": [int(v) for v in args.resolutions.split(",")],
        "timings": args.timings,
        "threads": thread_count(),
    })
    resp = _call(args.server, "POST", "/convergence", payload)
    rows = resp["rows"]
    print(f"# {resp['shape']} / {resp['field']} / {resp['method']} "
          f"{resp['order']}")
    for r in rows:
        print(f"N={r['n']:5d}  h={r['h']:.4e}  error={r['error']:.6e}  "
              f"order={_fmt(r['pairwise_order'])}  "
              f"iters={r['iterations_stage1']}/{r['iterations_stage2']}/"
              f"{r['iterations_stage3']}  converged={int(r['converged'])}")
    fitted = resp["fitted_order"]
    print(f"fitted order (converged rows): {_fmt(fitted, 6)}")
    if args.csv:
        write_csv(args.csv, CONVERGENCE_COLUMNS,
                  [(r["n"], r["h"], r["error"],
                    "nan" if r["pairwise_order"] is None
                    else r["pairwise_order"],
                    r["iterations_stage1"], r["iterations_stage2"],
                    r["iterations_stage3"], r["wall_ms"], r["converged"])
                   for r in rows])
        print(f"wrote {args.csv}")

    status = 0
    if not resp["all_converged"]:
        print("warning: some runs hit the iteration cap", file=sys.stderr)
        status = 1
    if args.check:
        if fitted is None:
            print("check failed: no fitted order", file=sys.stderr)
            status = 1
        else:
            if args.min_order is not None and fitted < args.min_order:
                print(f"check failed: fitted order {fitted:.3f} < "
                      f"{args.min_order}", file=sys.stderr)
                status = 1
            if args.max_order is not None and fitted > args.max_order:
                print(f"check failed: fitted order {fitted:.3f} > "
                      f"{args.max_order}", file=sys.stderr)
                status = 1
    return status


def cmd_extrapolate(args) -> int:
    payload = _solver_payload(args)
    payload.update({
        "shape": args.shape,
        "field": args.field,
        "n": args.n,
        "include_fields": bool(args.dump),
        "timings": args.timings,
    })
    resp = _call(args.server, "POST", "/extrapolate", payload)
    iters = "/".join(str(v) for v in resp["iterations_per_stage"])
    print(f"{resp['shape']} N={args.n} {resp['method']} {resp['order']}: "
          f"band error {resp['error']:.6e}, iterations {iters}, "
          f"converged={int(resp['converged'])}")
    if resp["degenerate_normals"]:
        print(f"degenerate normals: {resp['degenerate_normals']} nodes")
    if args.dump:
        g = resp["grid"]
        grid = Grid(tuple(g["n"]), tuple(g["lo"]), tuple(g["hi"]))
        fields = {name: np.asarray(resp["fields"][name]).reshape(grid.shape)
                  for name in DUMP_FIELD_ORDER}
        title = (f"{resp['shape']} {resp['method']} {resp['order']} "
                 f"N={args.n}")
        write_structured_points(args.dump, grid, fields, title=title)
        print(f"wrote {args.dump}")
    return 0 if resp["converged"] else 1


def cmd_sweep_demo(args) -> int:
    payload = _solver_payload(args)
    payload.update({
        "object": args.object,
        "n": args.n,
        "factor": args.factor,
        "diffusion": args.diffusion,
    })
    resp = _call(args.server, "POST", "/sweep-demo", payload)
    steps = resp["steps"]
    print(f"{resp['object_kind']} object, {resp['method']} {resp['order']}, "
          f"N={resp['n']}: {resp['n_steps_total']} steps, "
          f"{len(steps)} with uncovered nodes")
    print(f"trajectory max uncovered-node error: "
          f"{_fmt(resp['trajectory_max_error'], 6)}")
    if args.csv:
        write_csv(args.csv, SWEEP_COLUMNS,
                  [(s["step"], s["t"], s["dt"], s["uncovered"], s["error"])
                   for s in steps])
        print(f"wrote {args.csv}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("nd", "wcd"), default="wcd")
    p.add_argument("--order", choices=("constant", "linear", "quadratic"),
                   default="quadratic")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--band-factor", type=float, default=2.0)
    p.add_argument("--dtau", type=float, default=None,
                   help="override the pseudo-time step")
    p.add_argument("--no-minmod-cache", action="store_true",
                   help="recompute limited corrections every sweep")
    p.add_argument("--neighbors-only-masks", action="store_true",
                   help="drop the node itself from mask neighbourhood tests")
    p.add_argument("--server", default=None, metavar="URL",
                   help="send requests to a running service instead of "
                        "computing in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandext",
        description="extrapolate scalar fields across level-set interfaces")
    parser.add_argument("--version", action="version",
                        version=f"bandext {__version__}")
    parser.add_argument("--config", default=None, metavar="TOML",
                        help="read option defaults from a TOML table")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-shapes", help="show the shipped level-set shapes")
    p.add_argument("--server", default=None, metavar="URL")
    p.set_defaults(fn=cmd_list_shapes)

    p = sub.add_parser("convergence", help="error vs resolution study")
    p.add_argument("--shape", required=True)
    p.add_argument("--field", default=None)
    p.add_argument("--resolutions", default="64,128,256",
                   help="comma-separated node counts, strictly increasing")
    _add_solver_flags(p)
    p.add_argument("--timings", action="store_true",
                   help="record wall-clock times (breaks byte determinism)")
    p.add_argument("--csv", default=None, metavar="PATH")
    p.add_argument("--check", action="store_true",
                   help="verify the fitted order against --min/--max-order")
    p.add_argument("--min-order", type=float, default=None)
    p.add_argument("--max-order", type=float, default=None)
    p.set_defaults(fn=cmd_convergence)

    p = sub.add_parser("extrapolate", help="single run, optionally dumped")
    p.add_argument("--shape", required=True)
    p.add_argument("--field", default=None)
    p.add_argument("--n", type=int, required=True)
    _add_solver_flags(p)
    p.add_argument("--timings", action="store_true")
    p.add_argument("--dump", default=None, metavar="PATH",
                   help="write phi, fields, masks as structured points")
    p.set_defaults(fn=cmd_extrapolate)

    p = sub.add_parser("sweep-demo", help="moving-domain uncovered-node demo")
    p.add_argument("--object", choices=("smooth", "nonsmooth"),
                   default="nonsmooth")
    p.add_argument("--n", type=int, default=128)
    _add_solver_flags(p)
    p.add_argument("--f", "--factor", dest="factor", type=float, default=0.8,
                   help="interface-travel fraction of a cell diagonal per step")
    p.add_argument("--diffusion", type=float, default=1.0)
    p.add_argument("--csv", default=None, metavar="PATH")
    p.set_defaults(fn=cmd_sweep_demo)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    # config defaults must reach the subparsers directly: a subcommand
    # parses into its own namespace and would clobber parent-level defaults
    parser.subcommands = list(sub.choices.values())
    dests = set()
    for sp in parser.subcommands:
        dests.update(a.dest for a in sp._actions)
    parser.option_dests = dests - {"help", "fn", "command"}

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, "rb") as fh:
        table = tomllib.load(fh)
    bad = [k for k, v in table.items() if isinstance(v, (dict, list))]
    if bad:
        raise SystemExit(f"config {known.config}: nested keys not supported: "
                         f"{bad}")
    unknown = sorted(set(table) - parser.option_dests)
    if unknown:
        raise SystemExit(f"config {known.config}: unknown keys: {unknown}")
    parser.set_defaults(**table)
    for sp in parser.subcommands:
        sp.set_defaults(**table)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
