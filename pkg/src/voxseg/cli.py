"""Command-line entry points.

Exit codes: 0 success, 1 file/parse problems, 2 validation problems (grid
mismatch, insufficient seeds, bad op tokens, bad geometry).  Every command
is deterministic given identical inputs and flags; JSON summaries are
single-line objects on stdout, diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import growcut, morphology, phantom, volumetry
from .errors import (
    IoFailure,
    MalformedHeader,
    TruncatedPayload,
    UnsupportedField,
    VoxsegError,
)
from .metrics import dice, hausdorff
from .nrrd_io import read_nrrd, write_nrrd

_IO_ERRORS = (IoFailure, MalformedHeader, TruncatedPayload, UnsupportedField, OSError)


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _roi_dict(roi: growcut.RoiBox) -> dict:
    return {"lo": list(roi.lo), "hi": list(roi.hi)}


def _engine_config(args) -> growcut.GrowCutConfig:
    return growcut.GrowCutConfig(
        connectivity=args.connectivity,
        max_iters=args.max_iters if args.max_iters is not None else "auto",
        use_roi=not args.no_roi,
        worker_count=args.threads if args.threads is not None else "auto",
    )


def cmd_segment(args) -> int:
    image = read_nrrd(args.volume)
    seeds = read_nrrd(args.seeds, as_labels=True)
    result = growcut.growcut_run(image, seeds, _engine_config(args))
    write_nrrd(result.labels, args.out)
    if args.fg_out:
        from .grid import LabelVolume

        fg = LabelVolume(labels=(result.labels.labels == 1).astype("uint8"),
                         spacing=result.labels.spacing, origin=result.labels.origin)
        write_nrrd(fg, args.fg_out)
    _print_json({
        "iterations": result.iterations_run,
        "converged": result.converged,
        "roi": _roi_dict(result.roi),
        "elapsed": result.elapsed,
    })
    return 0


def cmd_morph(args) -> int:
    mask = read_nrrd(getattr(args, "in"), as_labels=True)
    ops = [t for t in args.ops.split(",") if t.strip()]
    out = morphology.apply_pipeline(mask, ops, connectivity=args.connectivity)
    write_nrrd(out, args.out)
    _print_json({"ops": ops, "foreground_voxels": int(out.labels.sum())})
    return 0


def cmd_metrics(args) -> int:
    a = read_nrrd(args.a, as_labels=True)
    b = read_nrrd(args.b, as_labels=True)
    hd = hausdorff(a, b)
    vol_a = volumetry.mask_volume_mm3(a)
    vol_b = volumetry.mask_volume_mm3(b)
    _print_json({
        "dsc": dice(a, b),
        "hd_mm": {"ar": hd.h_ar, "ra": hd.h_ra, "sym": hd.h_sym},
        "vol_a_mm3": vol_a,
        "vol_r_mm3": vol_b,
        "ratio": (vol_a / vol_b) if vol_b > 0 else None,
    })
    return 0


def cmd_volume(args) -> int:
    mask = read_nrrd(args.mask, as_labels=True)
    _print_json({
        "volume_mm3": volumetry.mask_volume_mm3(mask),
        "voxel_count": int(mask.labels.sum()),
        "slice_span": volumetry.slice_span(mask, args.axis),
    })
    return 0


def _read_manifest(path) -> list[volumetry.ReportInput]:
    pairs = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            def _opt(key):
                v = (row.get(key) or "").strip()
                return float(v) if v else None
            pairs.append(volumetry.ReportInput(
                case_id=row["case_id"].strip(),
                manual_path=row["manual_path"].strip(),
                tool_path=row["tool_path"].strip(),
                manual_time_s=_opt("manual_time_s"),
                tool_time_s=_opt("tool_time_s"),
            ))
    return pairs


def cmd_report(args) -> int:
    report = volumetry.build_report(_read_manifest(args.pairs), axis=args.axis)
    csv_text = volumetry.report_to_csv(report)
    json_text = volumetry.report_to_json(report)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(json_text)
    elif args.csv:
        sys.stdout.write(json_text + "\n")
    return 0


def cmd_phantom(args) -> int:
    spec = phantom.PhantomSpec(
        shape=args.shape,
        size=args.size,
        radius=args.radius,
        inside=args.inside,
        outside=args.outside,
        noise_sigma=args.noise_sigma,
        seed=args.rng_seed,
    )
    image, truth = phantom.sphere_phantom(spec)
    write_nrrd(image, args.out)
    if args.truth:
        write_nrrd(truth, args.truth)
    if args.seeds:
        write_nrrd(phantom.canonical_seeds(spec.size, fg_radius=args.fg_radius), args.seeds)
    _print_json({"size": spec.size, "radius": spec.radius,
                 "truth_voxels": int(truth.labels.sum())})
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir=args.data_dir, ui_dir=args.ui_dir),
                host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voxseg",
                                     description="3D competitive region-growing segmentation and volumetry")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="run the segmentation engine on a volume + seed file")
    p.add_argument("--volume", required=True)
    p.add_argument("--seeds", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fg-out", default=None,
                   help="also write the binary foreground mask (label 1)")
    p.add_argument("--connectivity", type=int, choices=(6, 26), default=26)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--no-roi", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("morph", help="apply morphology ops to a binary mask")
    p.add_argument("--in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ops", required=True,
                   help="comma list of dilate,erode,keep-largest,min-size=N")
    p.add_argument("--connectivity", type=int, choices=(6, 18, 26), default=6)
    p.set_defaults(func=cmd_morph)

    p = sub.add_parser("metrics", help="overlap and distance metrics for a mask pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("volume", help="mask volume in mm^3")
    p.add_argument("--mask", required=True)
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("report", help="build a comparative case report from a manifest")
    p.add_argument("--pairs", required=True,
                   help="CSV manifest: case_id,manual_path,tool_path,manual_time_s,tool_time_s")
    p.add_argument("--csv", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--json", default=None, help="output JSON path")
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("phantom", help="generate a synthetic sphere volume + truth mask")
    p.add_argument("--shape", choices=("sphere",), default="sphere")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--radius", type=float, default=20.0)
    p.add_argument("--inside", type=float, default=100.0)
    p.add_argument("--outside", type=float, default=0.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None)
    p.add_argument("--seeds", default=None,
                   help="write a canonical seed volume: center ball label 1, boundary faces label 2")
    p.add_argument("--fg-radius", type=float, default=5.0)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("serve", help="run the interactive segmentation HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--ui-dir", default=None,
                   help="also serve a built browser UI from this directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IO_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (VoxsegError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
