"""Operator entry points: offline dataset processing, synthetic dataset
generation, benchmarking, and serving the tuning console.

Config precedence is flags > params-file > defaults; `--params` takes the
same JSON schema as the wire parameter updates, one schema everywhere.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench as bench_mod
from .errors import DepthMatteError
from .matte import MatteParams
from .rgbd_io import (DatasetManifest, ManifestEntry, SceneSpec, save_color,
                      save_manifest, load_manifest, synth_scene, write_depth)
from .service import TuningService, apply_update, default_backgrounds, serve
from .stream import DatasetSource, SyntheticSource, run_stream, timings_to_csv

logger = logging.getLogger("depthmatte.cli")


def _load_params(path: str | None) -> MatteParams:
    params = MatteParams()
    if path is None:
        return params
    update = json.loads(Path(path).read_text())
    return apply_update(params, update)


def _load_scene_spec(path: str | None, seed: int | None) -> SceneSpec:
    if path is None:
        spec = SceneSpec(velocity_px_per_frame=2.0, noise_sigma=0.01)
    else:
        spec = SceneSpec.from_dict(json.loads(Path(path).read_text()))
    if seed is not None:
        spec = SceneSpec.from_dict({**spec.to_dict(), "noise_seed": seed})
    return spec


def _parse_resolutions(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        w, h = part.lower().split("x")
        out.append((int(w), int(h)))
    return out


def cmd_synth(args: argparse.Namespace) -> int:
    spec = _load_scene_spec(args.spec, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(args.frames):
        color, depth = synth_scene(spec, i)
        color_name = f"color_{i:04d}.png"
        depth_name = f"depth_{i:04d}.bin"
        save_color(color, out_dir / color_name)
        write_depth(depth, out_dir / depth_name)
        entries.append(ManifestEntry(color=color_name, depth=depth_name,
                                     depth_width=depth.width, depth_height=depth.height))
    from .service import make_background
    bg = make_background("gradient", spec.color_width, spec.color_height)
    save_color(bg, out_dir / "background.png")
    manifest = DatasetManifest(entries=entries, background="background.png")
    save_manifest(manifest, out_dir / "manifest.json")
    (out_dir / "scene.json").write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    print(f"wrote {args.frames} frame pairs + manifest to {out_dir}")
    return 0


def cmd_process(args: argparse.Namespace) -> int:
    manifest_path = Path(args.manifest)
    manifest = load_manifest(manifest_path)
    base_dir = manifest_path.parent
    manifest.verify(base_dir)
    params = _load_params(args.params)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    source = DatasetSource(manifest, base_dir)
    n = args.frames if args.frames else len(source)

    def sink(out):
        save_color(out.composite, out_dir / f"composite_{out.frame_index:04d}.png")

    rows = run_stream(source, params, sink=sink, n_frames=n)
    (out_dir / "timings.csv").write_text(timings_to_csv(rows))
    print(f"wrote {len(rows)} composites + timings.csv to {out_dir}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    resolutions = _parse_resolutions(args.resolutions)
    kernels = [int(k) for k in args.kernels.split(",")]
    rows = bench_mod.run_bench(resolutions, kernels, args.reps)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench.csv").write_text(bench_mod.bench_rows_to_csv(rows))
    (out_dir / "bench.md").write_text(bench_mod.bench_summary_markdown(rows))
    print(bench_mod.bench_summary_markdown(rows))
    print(f"wrote bench.csv and bench.md to {out_dir}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    if args.manifest:
        manifest_path = Path(args.manifest)
        manifest = load_manifest(manifest_path)
        base = manifest_path.parent

        def source_factory():
            return DatasetSource(manifest, base)
    else:
        spec = _load_scene_spec(args.spec, args.seed)

        def source_factory():
            return SyntheticSource(spec)

    params = _load_params(args.params)
    static = Path(args.ui) if args.ui else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    service = TuningService(source_factory, backgrounds=default_backgrounds(),
                            initial_params=params, realtime=args.realtime,
                            static_dir=static if static.is_dir() else None)
    host, _, port = args.bind.partition(":")
    serve(service, host=host or "127.0.0.1", port=int(port or 8787))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="depthmatte",
                                description="RGB-D background removal and compositing engine")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a synthetic RGB-D dataset + manifest")
    sp.add_argument("--spec", help="SceneSpec JSON file (defaults to a moving ellipse)")
    sp.add_argument("--frames", type=int, default=10)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=None, help="noise seed for reproducibility")
    sp.set_defaults(func=cmd_synth)

    pp = sub.add_parser("process", help="composite a dataset offline")
    pp.add_argument("--manifest", required=True)
    pp.add_argument("--params", help="params JSON (same schema as wire updates)")
    pp.add_argument("--out", required=True)
    pp.add_argument("--frames", type=int, default=0, help="0 = all manifest entries")
    pp.set_defaults(func=cmd_process)

    bp = sub.add_parser("bench", help="close+composite latency by kernel and resolution")
    bp.add_argument("--resolutions", default="320x240,1440x1920")
    bp.add_argument("--kernels", default="0,3,5,7,9")
    bp.add_argument("--reps", type=int, default=9)
    bp.add_argument("--out", required=True)
    bp.set_defaults(func=cmd_bench)

    vp = sub.add_parser("serve", help="run the live tuning service")
    vp.add_argument("--manifest", help="stream a captured dataset instead of synthetics")
    vp.add_argument("--spec", help="SceneSpec JSON for the synthetic source")
    vp.add_argument("--params", help="initial params JSON")
    vp.add_argument("--seed", type=int, default=None)
    vp.add_argument("--bind", default="127.0.0.1:8787")
    vp.add_argument("--ui", help="static console bundle directory")
    vp.add_argument("--realtime", action=argparse.BooleanOptionalAction, default=True,
                    help="pace frames at 60 Hz (disable for as-fast-as-possible)")
    vp.set_defaults(func=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DepthMatteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
