"""Stimulus generators and the three measurement protocols.

Covers the full-field hue sweep that produces tuning curves, the
hue-circle stimulus whose per-type response peaks are correlated with
hue distance, and the hue-reconstruction regression over random
saturation/lightness samples.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .colorspace import (
    SWEEP_HUE_COUNT,
    chromaticity_scaling,
    hsl_to_rgb,
    lms_to_chromaticity_angle,
    rgb_to_lms,
)
from .config import ModelConfig
from .model import (
    HUE_ANGLES,
    HUE_TYPES,
    OPPONENT_TYPES,
    PipelineResult,
    hue_distance,
    run_pipeline,
)
from .imaging import STANDARD_SIZE, save_plane_png

TUNING_COLUMNS = ("hsl_hue_deg", "mb_angle_deg")


class ExperimentError(RuntimeError):
    """Raised when an experiment cannot produce a meaningful result."""


def central_mean(plane: np.ndarray, window: int) -> float:
    """Mean over the centered window-by-window patch of a plane."""
    h, w = plane.shape
    if not 1 <= window <= min(h, w):
        raise ValueError(f"window {window} does not fit a {h}x{w} plane")
    r0 = (h - window) // 2
    c0 = (w - window) // 2
    return float(plane[r0:r0 + window, c0:c0 + window].mean())


def full_field_stimulus(hue_deg: float, saturation: float = 1.0,
                        lightness: float = 0.5,
                        size: int = STANDARD_SIZE) -> np.ndarray:
    """Uniform image of a single HSL color."""
    rgb = hsl_to_rgb(hue_deg, saturation, lightness)
    return np.broadcast_to(np.asarray(rgb), (size, size, 3)).copy()


@dataclass(frozen=True)
class TuningSweep:
    """Responses of every type in one layer across the 60-hue sweep."""

    layer: str
    hues_deg: np.ndarray
    mb_angles_deg: np.ndarray
    responses: dict
    mb_scaling: tuple[float, float]

    @property
    def type_names(self) -> tuple[str, ...]:
        return HUE_TYPES if self.layer == "v4" else OPPONENT_TYPES

    def curve(self, type_name: str) -> np.ndarray:
        return self.responses[type_name]


def sweep_hue_angles(count: int = SWEEP_HUE_COUNT) -> np.ndarray:
    return np.arange(count) * (360.0 / count)


def half_max_width(responses) -> float:
    """Full width at half maximum of a circular tuning curve, in degrees.

    Crossings between samples are linearly interpolated; a curve that
    never falls below half its peak has width 360.
    """
    r = np.asarray(responses, dtype=float)
    n = r.shape[0]
    peak = int(np.argmax(r))
    top = r[peak]
    if not top > 0:
        raise ValueError("curve peak must be positive to measure a width")
    half = top / 2.0
    step = 360.0 / n

    def walk(direction: int) -> float:
        for k in range(1, n):
            prev = r[(peak + direction * (k - 1)) % n]
            cur = r[(peak + direction * k) % n]
            if cur < half:
                frac = (prev - half) / (prev - cur)
                return (k - 1 + frac) * step
        return 360.0

    return float(min(walk(+1) + walk(-1), 360.0))


def tuning_sweep(layer: str, cfg: ModelConfig | None = None,
                 count: int = SWEEP_HUE_COUNT) -> TuningSweep:
    """Tuning curves for one layer; see :func:`sweep_all_layers`."""
    return sweep_all_layers(cfg, count=count)[layer.lower()]


def sweep_all_layers(cfg: ModelConfig | None = None,
                     count: int = SWEEP_HUE_COUNT) -> dict:
    """Run the full-field hue sweep once and collect every layer's curves.

    Each stimulus is a uniform HSL(hue, 1, 0.5) field; the response of a
    type is the mean activation over the central window.  Chromaticity
    angles of the stimuli are attached for polar plotting.
    """
    cfg = cfg or ModelConfig()
    hues = sweep_hue_angles(count)
    scaling = chromaticity_scaling()
    mb_angles = np.array([
        lms_to_chromaticity_angle(
            rgb_to_lms(np.asarray(hsl_to_rgb(h, 1.0, 0.5))), scaling=scaling
        ).angle_deg
        for h in hues
    ])

    collected: dict[str, dict[str, list[float]]] = {}
    for h in hues:
        result = run_pipeline(full_field_stimulus(h), cfg)
        for acts in result.layers:
            layer_bucket = collected.setdefault(acts.layer.lower(), {})
            for name, plane in acts.planes.items():
                layer_bucket.setdefault(name, []).append(
                    central_mean(plane, cfg.window)
                )

    return {
        layer: TuningSweep(
            layer=layer,
            hues_deg=hues,
            mb_angles_deg=mb_angles,
            responses={k: np.asarray(v) for k, v in bucket.items()},
            mb_scaling=scaling,
        )
        for layer, bucket in collected.items()
    }


def save_tuning_csv(sweep: TuningSweep, path) -> None:
    """Polar-plot-ready CSV: hue, chromaticity angle, one column per type."""
    names = sweep.type_names
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(TUNING_COLUMNS) + list(names))
        for i in range(sweep.hues_deg.shape[0]):
            row = [repr(float(sweep.hues_deg[i])), repr(float(sweep.mb_angles_deg[i]))]
            row += [repr(float(sweep.responses[n][i])) for n in names]
            writer.writerow(row)


@dataclass(frozen=True)
class HueCircleStimulus:
    """Annulus whose hue equals the polar angle, red at three o'clock."""

    image: np.ndarray
    inner_radius: float
    outer_radius: float

    @property
    def size(self) -> int:
        return self.image.shape[0]


def hue_circle_stimulus(inner_radius: float = 60.0, outer_radius: float = 110.0,
                        size: int = STANDARD_SIZE) -> HueCircleStimulus:
    """Hue annulus on a mid-gray field.

    The hue at each annulus pixel equals its polar angle measured
    counterclockwise from three o'clock, so red (0 deg) sits at the
    right and cyan (180 deg) at the left.
    """
    if not 0 < inner_radius < outer_radius:
        raise ValueError("need 0 < inner_radius < outer_radius")
    center = (size - 1) / 2.0
    rows, cols = np.mgrid[0:size, 0:size]
    dx = cols - center
    dy = center - rows
    radius = np.hypot(dx, dy)
    angle = np.degrees(np.arctan2(dy, dx)) % 360.0

    image = np.full((size, size, 3), 0.5)
    mask = (radius >= inner_radius) & (radius <= outer_radius)
    for r, c in np.argwhere(mask):
        image[r, c] = hsl_to_rgb(angle[r, c], 1.0, 0.5)
    return HueCircleStimulus(image, float(inner_radius), float(outer_radius))


@dataclass(frozen=True)
class CorrelationReport:
    """Pairwise hue distance against peak-location pixel distance."""

    peaks: dict
    pairs: tuple
    r: float
    p_value: float

    def __post_init__(self):
        if len(self.pairs) != 15:
            raise ValueError(f"expected 15 pairs, got {len(self.pairs)}")


def correlation_experiment(cfg: ModelConfig | None = None,
                           stimulus: HueCircleStimulus | None = None,
                           result: PipelineResult | None = None) -> CorrelationReport:
    """Correlate hue distances with distances between response peaks.

    Each hue-selective plane contributes the location of its maximal
    activation (ties resolve to the smallest row-major index); the 15
    type pairs yield (hue distance, Euclidean pixel distance) points and
    their Pearson correlation.
    """
    if result is None:
        stimulus = stimulus or hue_circle_stimulus()
        result = run_pipeline(stimulus.image, cfg or ModelConfig())

    peaks = {}
    for name in HUE_TYPES:
        plane = result.v4.planes[name]
        if plane.max() == plane.min():
            raise ExperimentError(f"degenerate plane (all values equal): {name}")
        flat = int(np.argmax(plane))
        peaks[name] = tuple(int(v) for v in divmod(flat, plane.shape[1]))

    pairs = []
    for a, b in itertools.combinations(HUE_TYPES, 2):
        d_hue = hue_distance(HUE_ANGLES[a], HUE_ANGLES[b])
        d_pix = math.hypot(peaks[a][0] - peaks[b][0], peaks[a][1] - peaks[b][1])
        pairs.append((a, b, float(d_hue), float(d_pix)))

    r, p = stats.pearsonr([p[2] for p in pairs], [p[3] for p in pairs])
    return CorrelationReport(peaks=peaks, pairs=tuple(pairs),
                             r=float(r), p_value=float(p))


def save_correlation_csv(report: CorrelationReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["type_a", "type_b", "hue_distance_deg", "pixel_distance"])
        for a, b, dh, dp in report.pairs:
            writer.writerow([a, b, repr(dh), repr(dp)])


@dataclass(frozen=True)
class ReconstructionReport:
    """Stepwise hue reconstruction from hue-selective responses."""

    hue_deg: float
    target_rad: float
    seed: int
    samples: np.ndarray
    dataset: "object"
    model: "object"
    prediction_rad: float

    @property
    def prediction_error_deg(self) -> float:
        return abs(math.degrees(self.prediction_rad - self.target_rad))

    def to_dict(self) -> dict:
        return {
            "hue_deg": self.hue_deg,
            "target_rad": self.target_rad,
            "seed": self.seed,
            "n_samples": int(self.samples.shape[0]),
            "selected_types": [self.dataset.names[j] for j in self.model.selected],
            "coefficients": [float(c) for c in self.model.coefficients],
            "intercept": float(self.model.intercept),
            "residual_rms": float(self.model.residual_rms),
            "prediction_rad": self.prediction_rad,
            "prediction_error_deg": self.prediction_error_deg,
        }


def _open_unit_samples(rng: np.random.Generator, n: int) -> np.ndarray:
    """n-by-2 uniform draws over the open square (0,1)x(0,1)."""
    samples = rng.random((n, 2))
    while True:
        zero = samples == 0.0
        if not zero.any():
            return samples
        samples[zero] = rng.random(int(zero.sum()))


def _v4_central_means(hue_deg, saturation, lightness, cfg) -> list[float]:
    stim = full_field_stimulus(hue_deg, saturation, lightness)
    result = run_pipeline(stim, cfg)
    return [central_mean(result.v4.planes[t], cfg.window) for t in HUE_TYPES]


def reconstruction_experiment(hue_deg: float, n: int = 500, seed: int = 0,
                              cfg: ModelConfig | None = None,
                              intercept: bool = True) -> ReconstructionReport:
    """Fit hue (radians, red as 2*pi) from hue-selective responses.

    Draws n (saturation, lightness) pairs uniformly over (0,1)x(0,1),
    records the six central-mean responses for each full-field stimulus
    at the given hue, and fits a stepwise regression against the
    constant target angle.  The report includes the model's prediction
    for the canonical stimulus (saturation 1, lightness 0.5).
    """
    from .regression import Dataset, stepwise_fit

    if not 0.0 < hue_deg <= 360.0:
        raise ValueError(f"hue must be in (0, 360], got {hue_deg}")
    if n < 8:
        raise ValueError(f"need at least 8 samples, got {n}")
    cfg = cfg or ModelConfig()
    rng = np.random.default_rng(seed)
    samples = _open_unit_samples(rng, n)

    rows = [
        _v4_central_means(hue_deg, s, l, cfg) for s, l in samples
    ]
    target_rad = math.radians(hue_deg)
    dataset = Dataset(np.asarray(rows), np.full(n, target_rad), HUE_TYPES)
    model = stepwise_fit(dataset, intercept=intercept)

    canonical = np.asarray(_v4_central_means(hue_deg, 1.0, 0.5, cfg))
    return ReconstructionReport(
        hue_deg=float(hue_deg),
        target_rad=target_rad,
        seed=int(seed),
        samples=samples,
        dataset=dataset,
        model=model,
        prediction_rad=float(model.predict(canonical)),
    )


def emit_layer_maps(result: PipelineResult, outdir) -> list[tuple[str, float, float]]:
    """Write every activation plane as a grayscale PNG plus a scale sidecar.

    Returns (filename, lo, hi) per plane, where lo/hi are the plane
    values mapped to black and white.  The same triples are written to
    ``plane_scales.txt`` so the PNGs can be read back quantitatively.
    """
    from pathlib import Path

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    records = []
    for acts in result.layers:
        for name, plane in acts.planes.items():
            fname = f"{acts.layer}_{name}.png"
            lo, hi = save_plane_png(plane, outdir / fname)
            records.append((fname, lo, hi))
    with open(outdir / "plane_scales.txt", "w") as fh:
        for fname, lo, hi in records:
            fh.write(f"{fname}\t{lo!r}\t{hi!r}\n")
    return records
