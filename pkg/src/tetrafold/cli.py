"""Command-line front end: mesh / bands / common / embed / table.

Every subcommand accepts --manifest PATH to record the invocation, its
parameters and the SHA-256 of every file written; re-running the same
command with the same seed reproduces the outputs byte for byte (the
manifest itself carries timestamps and is excluded from that guarantee).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bands import bands_to_json_dict, strip_svg, trace_bands, unfold_band
from .classify import enumerate_common, groups_to_csv, groups_to_json_dict
from .embed import (
    ConvergenceError,
    RelaxConfig,
    embedding_report,
    relax_max_volume,
    relative_volume,
    volume_table,
    write_obj,
)
from .mesh import build_mesh


class _Manifest:
    def __init__(self, argv: list[str]):
        self.argv = argv
        self.started = datetime.now(timezone.utc).isoformat()
        self.outputs: list[dict] = []

    def record(self, path: Path) -> None:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.outputs.append({"path": str(path), "sha256": digest})

    def write(self, path: Path, command: str, parameters: dict, seed: int | None) -> None:
        doc = {
            "command": command,
            "argv": self.argv,
            "parameters": parameters,
            "seed": seed,
            "tool_version": __version__,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": self.outputs,
        }
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _write(path: str, text: str, manifest: _Manifest) -> None:
    p = Path(path)
    p.write_text(text)
    manifest.record(p)


def _nonneg_pair(a: int, b: int) -> tuple[int, int]:
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise argparse.ArgumentTypeError(
            f"invalid pair ({a}, {b}): need a, b >= 0, not both 0"
        )
    return a, b


def _relax_config(args: argparse.Namespace) -> RelaxConfig:
    return RelaxConfig(
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
        inflation_pressure=(args.pressure, args.pressure_decay),
        restarts=args.restarts,
        seed=args.seed,
    )


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--max-iterations", type=int, default=200_000)
    p.add_argument("--pressure", type=float, default=0.2)
    p.add_argument("--pressure-decay", type=float, default=0.999)


def _cmd_mesh(args: argparse.Namespace, manifest: _Manifest) -> int:
    a, b = _nonneg_pair(args.a, args.b)
    m = build_mesh(a, b)
    doc = json.dumps(m.to_json_dict(), sort_keys=True, indent=2) + "\n"
    if args.out:
        _write(args.out, doc, manifest)
    else:
        sys.stdout.write(doc)
    print(f"mesh ({a},{b}): {m.face_total} faces, {m.edge_total} edges, "
          f"{m.vertex_total} vertices", file=sys.stderr)
    return 0


def _cmd_bands(args: argparse.Namespace, manifest: _Manifest) -> int:
    a, b = _nonneg_pair(args.a, args.b)
    m = build_mesh(a, b)
    bands = trace_bands(m, direction=args.direction)
    n = len(bands)
    print(f"{n} band{'s' if n != 1 else ''} × {len(bands[0])} faces")
    if args.json:
        _write(args.json, json.dumps(bands_to_json_dict(bands, m),
                                     sort_keys=True, indent=2) + "\n", manifest)
    if args.svg:
        stem = Path(args.svg)
        for i, band in enumerate(bands):
            strip = unfold_band(band)
            path = stem if n == 1 else stem.with_name(f"{stem.stem}_band{i}{stem.suffix}")
            _write(str(path), strip_svg(strip, scale_mm=args.scale), manifest)
    return 0


def _cmd_common(args: argparse.Namespace, manifest: _Manifest) -> int:
    groups = enumerate_common(args.s_max, include_non_coprime=args.include_non_coprime)
    for g in groups:
        members = " ".join(f"({a},{b})" for a, b in g.members)
        print(f"S={g.s} (4×{g.s // 4}): {members}")
    print(f"{len(groups)} groups with S <= {args.s_max}", file=sys.stderr)
    if args.csv:
        _write(args.csv, groups_to_csv(groups), manifest)
    if args.json:
        _write(args.json, json.dumps(groups_to_json_dict(groups),
                                     sort_keys=True, indent=2) + "\n", manifest)
    return 0


def _cmd_embed(args: argparse.Namespace, manifest: _Manifest) -> int:
    a, b = _nonneg_pair(args.a, args.b)
    m = build_mesh(a, b)
    cfg = _relax_config(args)
    try:
        emb = relax_max_volume(m, cfg)
    except ConvergenceError as err:
        print(f"embed ({a},{b}): no attempt converged; best residual "
              f"{err.best_residual:.3e}", file=sys.stderr)
        return 1
    rel = relative_volume(emb, m)
    print(f"embed ({a},{b}): relative volume {rel:.6f}, residual "
          f"{emb.residual:.3e}, {emb.iterations} iterations")
    if args.obj:
        _write(args.obj, write_obj(emb, m), manifest)
    if args.report:
        _write(args.report, json.dumps(embedding_report(m, emb, cfg),
                                       sort_keys=True, indent=2) + "\n", manifest)
    return 0


def _cmd_table(args: argparse.Namespace, manifest: _Manifest) -> int:
    cfg = _relax_config(args)
    table = volume_table(args.max, args.max, cfg, jobs=args.jobs)
    csv_text = table.to_csv()
    sys.stdout.write(csv_text)
    if args.csv:
        _write(args.csv, csv_text, manifest)
    bad = [c for c in table.cells.values() if not c.converged]
    if bad:
        print(f"{len(bad)} cells did not converge", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tetrafold",
        description="Geodesic foldings of the regular tetrahedron: meshes, "
                    "bands, common unfoldings, embeddings.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh", help="build the (a, b) deltahedron mesh as JSON")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("-o", "--out", help="output JSON path (default: stdout)")
    p.set_defaults(func=_cmd_mesh)

    p = sub.add_parser("bands", help="geodesic band decomposition")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("-d", "--direction", type=int, choices=(0, 1, 2), default=0)
    p.add_argument("--svg", help="write unfolded strips as SVG (per-band suffix)")
    p.add_argument("--scale", type=float, default=10.0, help="mm per unit edge")
    p.add_argument("--json", help="write band face sequences as JSON")
    p.set_defaults(func=_cmd_bands)

    p = sub.add_parser("common", help="pairs sharing a common band length")
    p.add_argument("--s-max", type=int, required=True)
    p.add_argument("--include-non-coprime", action="store_true")
    p.add_argument("--csv")
    p.add_argument("--json")
    p.set_defaults(func=_cmd_common)

    p = sub.add_parser("embed", help="relax to unit edges and report metrics")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    _add_solver_flags(p)
    p.add_argument("--obj", help="write embedded mesh as OBJ")
    p.add_argument("--report", help="write run report as JSON")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("table", help="relative-volume table for 1 <= a <= b <= max")
    p.add_argument("--max", type=int, default=7)
    _add_solver_flags(p)
    p.add_argument("--csv")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_table)

    for sp in sub.choices.values():
        sp.add_argument("--manifest", help="write a run manifest JSON here")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = _Manifest(argv)
    try:
        code = args.func(args, manifest)
    except (ValueError, argparse.ArgumentTypeError) as err:
        parser.exit(2, f"error: {err}\n")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if args.manifest:
        manifest.write(Path(args.manifest), args.command,
                       {k: v for k, v in vars(args).items() if k != "func"},
                       getattr(args, "seed", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
