"""Command-line entry point: reproducible pipeline and experiment runs.

Subcommands: ``run`` (layer maps for one image), ``tuning`` (hue sweep
CSVs), ``correlate`` (hue-circle peak-distance correlation), and
``reconstruct`` (stepwise hue regression).  Every command writes its
outputs plus a ``manifest.txt`` with a sha256 per file; reruns with the
same inputs, config, and seed are byte-identical.

Exit codes: 0 success, 1 I/O or configuration error, 2 numerical or
experiment error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import LAYERS, ModelConfig
from .experiments import (
    ExperimentError,
    correlation_experiment,
    emit_layer_maps,
    hue_circle_stimulus,
    reconstruction_experiment,
    save_correlation_csv,
    save_tuning_csv,
    sweep_all_layers,
)
from .imaging import load_rgb
from .model import run_pipeline
from .regression import SingularFitError, save_dataset

log = logging.getLogger("huenet")

# Keys in the config file that parameterize experiments rather than the
# model itself; command-line flags take precedence over these.
EXPERIMENT_KEYS = ("hue", "samples", "seed", "layer", "inner_radius", "outer_radius")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_config(path) -> tuple[ModelConfig, dict]:
    """Split a JSON config into model parameters and experiment defaults."""
    if path is None:
        return ModelConfig(), {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config root must be an object: {path}")
    defaults = {k: data.pop(k) for k in EXPERIMENT_KEYS if k in data}
    return ModelConfig.from_dict(data), defaults


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(outdir: Path, names) -> Path:
    manifest = outdir / "manifest.txt"
    with open(manifest, "w") as fh:
        for name in sorted(names):
            fh.write(f"{_sha256(outdir / name)}  {name}\n")
    return manifest


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_dump(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args, cfg: ModelConfig, defaults: dict) -> int:
    out = _outdir(args)
    image = load_rgb(args.input)
    log.info("running pipeline on %s", args.input)
    result = run_pipeline(image, cfg)
    records = emit_layer_maps(result, out)
    names = [fname for fname, _, _ in records] + ["plane_scales.txt"]
    _write_manifest(out, names)
    print(f"wrote {len(names)} files to {out}")
    return 0


def cmd_tuning(args, cfg: ModelConfig, defaults: dict) -> int:
    out = _outdir(args)
    layer = args.layer or defaults.get("layer")
    layers = [layer.lower()] if layer else list(LAYERS)
    for name in layers:
        if name not in LAYERS:
            raise ValueError(f"unknown layer {name!r}, expected one of {LAYERS}")
    from .figures import save_tuning_figure

    log.info("sweeping 60 hues across layers %s", layers)
    sweeps = sweep_all_layers(cfg)
    names = []
    for name in layers:
        sweep = sweeps[name]
        save_tuning_csv(sweep, out / f"tuning_{name}.csv")
        save_tuning_figure(sweep, out / f"tuning_{name}.png")
        names += [f"tuning_{name}.csv", f"tuning_{name}.png"]
    any_sweep = sweeps[layers[0]]
    _json_dump(
        {
            "layers": layers,
            "hue_count": int(any_sweep.hues_deg.shape[0]),
            "window": cfg.window,
            "mb_axis_scaling": list(any_sweep.mb_scaling),
        },
        out / "tuning_summary.json",
    )
    names.append("tuning_summary.json")
    _write_manifest(out, names)
    print(f"wrote {len(names)} files to {out}")
    return 0


def cmd_correlate(args, cfg: ModelConfig, defaults: dict) -> int:
    out = _outdir(args)
    stimulus = hue_circle_stimulus(
        inner_radius=float(defaults.get("inner_radius", 60.0)),
        outer_radius=float(defaults.get("outer_radius", 110.0)),
    )
    log.info("correlating peak distances on the hue-circle stimulus")
    report = correlation_experiment(cfg, stimulus=stimulus)
    from .figures import save_correlation_figure

    save_correlation_csv(report, out / "correlation_pairs.csv")
    save_correlation_figure(report, out / "correlation_scatter.png")
    _json_dump(
        {
            "r": report.r,
            "p_value": report.p_value,
            "peaks": {k: list(v) for k, v in report.peaks.items()},
            "inner_radius": stimulus.inner_radius,
            "outer_radius": stimulus.outer_radius,
        },
        out / "correlation_summary.json",
    )
    names = ["correlation_pairs.csv", "correlation_scatter.png",
             "correlation_summary.json"]
    _write_manifest(out, names)
    print(f"r={report.r:.4f} p={report.p_value:.3g}; wrote {len(names)} files to {out}")
    return 0


def cmd_reconstruct(args, cfg: ModelConfig, defaults: dict) -> int:
    out = _outdir(args)
    hue = args.hue if args.hue is not None else defaults.get("hue")
    if hue is None:
        raise ValueError("reconstruct requires --hue (or 'hue' in the config file)")
    samples = args.samples if args.samples is not None else int(defaults.get("samples", 500))
    seed = args.seed if args.seed is not None else int(defaults.get("seed", 0))

    log.info("reconstructing hue %.1f from %d samples (seed %d)", hue, samples, seed)
    report = reconstruction_experiment(float(hue), n=samples, seed=seed, cfg=cfg)
    from .figures import save_reconstruction_figure

    save_dataset(out / "reconstruction_dataset.csv", report.dataset)
    save_reconstruction_figure(report, out / "reconstruction_fit.png")
    payload = report.to_dict()
    payload["trace"] = [list(step) for step in report.model.trace]
    _json_dump(payload, out / "reconstruction_report.json")
    names = ["reconstruction_dataset.csv", "reconstruction_fit.png",
             "reconstruction_report.json"]
    _write_manifest(out, names)
    print(
        f"selected {list(payload['selected_types'])} "
        f"error {report.prediction_error_deg:.2e} deg; wrote {len(names)} files to {out}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="huenet", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="JSON model/experiment config file")
        p.add_argument("-v", "--verbose", action="store_true",
                       help="log progress to stderr")

    p_run = sub.add_parser("run", help="write all 18 layer maps for an image")
    common(p_run)
    p_run.add_argument("--input", required=True, help="input RGB image (PNG)")
    p_run.set_defaults(func=cmd_run)

    p_tun = sub.add_parser("tuning", help="60-hue tuning sweep CSVs and figures")
    common(p_tun)
    p_tun.add_argument("--layer", choices=[*LAYERS, *[l.upper() for l in LAYERS]],
                       help="restrict to one layer (default: all)")
    p_tun.set_defaults(func=cmd_tuning)

    p_cor = sub.add_parser("correlate", help="hue-circle peak-distance correlation")
    common(p_cor)
    p_cor.set_defaults(func=cmd_correlate)

    p_rec = sub.add_parser("reconstruct", help="stepwise hue reconstruction")
    common(p_rec)
    p_rec.add_argument("--hue", type=float, help="target hue in (0, 360]; red is 360")
    p_rec.add_argument("--samples", type=int, help="sample count (default 500)")
    p_rec.add_argument("--seed", type=int, help="PRNG seed (default 0)")
    p_rec.set_defaults(func=cmd_reconstruct)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg, defaults = load_config(args.config)
        return args.func(args, cfg, defaults)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"huenet: error: {exc}", file=sys.stderr)
        return 1
    except (ExperimentError, SingularFitError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"huenet: experiment error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
