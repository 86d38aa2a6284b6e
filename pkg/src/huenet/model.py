"""Feedforward color-opponency hierarchy.

Four stages, each a Gaussian pooling of the previous one followed by a
linear rectifier:

* LGN: four single-opponent types combining smoothed cone planes with
  fixed cone weights (clamped to [-1, 1], i.e. effectively linear).
* V1 and V2: Gaussian pooling of the previous stage, clamped to [0, 1].
* V4: six hue-selective types, each a convex combination of the four
  pooled opponent planes.

Receptive-field size doubles at every stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .colorspace import rgb_image_to_cone_planes
from .config import ModelConfig, RectifierParams
from .imaging import GaussianKernel, as_plane, convolve, make_gaussian, resize_to_standard

OPPONENT_TYPES = ("L+M-", "L-M+", "S+(L+M)-", "S-(L+M)+")
HUE_TYPES = ("red", "yellow", "green", "cyan", "blue", "magenta")
HUE_ANGLES = {
    "red": 0.0,
    "yellow": 60.0,
    "green": 120.0,
    "cyan": 180.0,
    "blue": 240.0,
    "magenta": 300.0,
}

# Cone weights (L, M, S) per single-opponent type.
LGN_CONE_WEIGHTS = {
    "L+M-": (1.0, -1.0, 0.0),
    "L-M+": (-1.0, 1.0, 0.0),
    "S+(L+M)-": (-0.5, -0.5, 1.0),
    "S-(L+M)+": (0.5, 0.5, -1.0),
}

# Opponent-plane weights per hue-selective type, in OPPONENT_TYPES order.
V4_HUE_WEIGHTS = {
    "red": (0.85636, 0.00028984, 0.041238, 0.10211),
    "yellow": (0.38019, 0.022312, 0.0005716, 0.59692),
    "green": (0.031002, 0.31546, 0.012604, 0.64093),
    "cyan": (0.00038727, 0.68329, 0.2109, 0.10543),
    "blue": (0.014012, 0.29034, 0.69225, 0.0034021),
    "magenta": (0.37948, 0.031779, 0.58531, 0.0034362),
}


def rectify(params: RectifierParams, values):
    """Apply the linear rectifier y = slope * x + base with output
    clamped below at ``lower``; responses that would exceed
    ``saturation`` return 1.

    Output always lies in [lower, 1] and is nondecreasing in the input
    for nonnegative slope.
    """
    x = np.asarray(values, dtype=float)
    y = params.slope * x + params.base
    out = np.where(y < params.lower, params.lower, np.where(y > params.saturation, 1.0, y))
    if np.isscalar(values) or out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class LayerActivations:
    """Named activation planes for one stage of the hierarchy."""

    layer: str
    planes: dict

    def plane(self, name: str) -> np.ndarray:
        if name not in self.planes:
            raise KeyError(f"layer {self.layer} has no plane {name!r}")
        return self.planes[name]


@dataclass(frozen=True)
class PipelineResult:
    cones: dict
    lgn: LayerActivations
    v1: LayerActivations
    v2: LayerActivations
    v4: LayerActivations

    @property
    def layers(self) -> tuple[LayerActivations, ...]:
        return (self.lgn, self.v1, self.v2, self.v4)

    def layer(self, name: str) -> LayerActivations:
        for acts in self.layers:
            if acts.layer == name:
                return acts
        raise KeyError(f"unknown layer {name!r}")


@lru_cache(maxsize=32)
def _kernel(size: int, sigma: float) -> GaussianKernel:
    return make_gaussian(size, sigma)


def lgn_layer(
    l_plane: np.ndarray,
    m_plane: np.ndarray,
    s_plane: np.ndarray,
    cfg: ModelConfig | None = None,
) -> LayerActivations:
    """Compute the four single-opponent planes from cone planes.

    Each cone plane is smoothed with that type's per-cone Gaussian and
    combined with the type's cone weights, then rectified.  Achromatic
    input (equal cone planes) yields zero response in every type since
    all weight triples sum to zero.
    """
    if cfg is None:
        cfg = ModelConfig()
    planes = [as_plane(p) for p in (l_plane, m_plane, s_plane)]
    if planes[0].shape != planes[1].shape or planes[1].shape != planes[2].shape:
        raise ValueError("cone planes must share one shape")
    weights = cfg.lgn_weights or LGN_CONE_WEIGHTS
    rect = cfg.rectifiers["lgn"]
    size = cfg.kernels["lgn"].size
    smoothed: dict[tuple[int, float], np.ndarray] = {}
    out = {}
    for op_type in OPPONENT_TYPES:
        if op_type not in weights:
            raise ValueError(f"missing cone weights for type {op_type!r}")
        acc = np.zeros_like(planes[0])
        for cone_idx, cone in enumerate(("L", "M", "S")):
            w = weights[op_type][cone_idx]
            if w == 0.0:
                continue
            sigma = cfg.cone_sigma(op_type, cone)
            key = (cone_idx, sigma)
            if key not in smoothed:
                smoothed[key] = convolve(planes[cone_idx], _kernel(size, sigma))
            acc = acc + w * smoothed[key]
        out[op_type] = rectify(rect, acc)
    return LayerActivations("LGN", out)


def gaussian_layer(
    acts: LayerActivations, layer_name: str, cfg: ModelConfig | None = None
) -> LayerActivations:
    """Pool every plane of a stage with that stage's Gaussian, then rectify."""
    if cfg is None:
        cfg = ModelConfig()
    key = layer_name.lower()
    kernel = _kernel(cfg.kernels[key].size, cfg.kernels[key].sigma)
    rect = cfg.rectifiers[key]
    out = {
        name: rectify(rect, convolve(plane, kernel)) for name, plane in acts.planes.items()
    }
    return LayerActivations(layer_name.upper(), out)


def v4_layer(v2: LayerActivations, cfg: ModelConfig | None = None) -> LayerActivations:
    """Combine pooled opponent planes into six hue-selective planes."""
    if cfg is None:
        cfg = ModelConfig()
    weights = cfg.v4_weights or V4_HUE_WEIGHTS
    kernel = _kernel(cfg.kernels["v4"].size, cfg.kernels["v4"].sigma)
    rect = cfg.rectifiers["v4"]
    pooled = {}
    for op_type in OPPONENT_TYPES:
        if op_type not in v2.planes:
            raise ValueError(f"input layer lacks opponent plane {op_type!r}")
        pooled[op_type] = convolve(v2.planes[op_type], kernel)
    out = {}
    for hue_type in HUE_TYPES:
        if hue_type not in weights:
            raise ValueError(f"missing hue weights for type {hue_type!r}")
        w = weights[hue_type]
        acc = sum(w[i] * pooled[op] for i, op in enumerate(OPPONENT_TYPES))
        out[hue_type] = rectify(rect, acc)
    return LayerActivations("V4", out)


def hue_distance(a_deg: float, b_deg: float) -> float:
    """Shorter angular distance between two hues, in [0, 180]."""
    d = abs(a_deg - b_deg) % 360.0
    return min(d, 360.0 - d)


def derive_v4_weights(target_deg: float, v2_peaks: dict, sigma_deg: float) -> dict:
    """Weights for a hue-selective unit from opponent peak hues.

    Each opponent type receives the value of a zero-mean normal density
    (width ``sigma_deg``) at its angular distance from the target hue,
    normalized so the weights sum to 1.  A tiny sigma concentrates all
    weight on the nearest peak; a huge sigma tends to uniform weights.
    """
    if not sigma_deg > 0:
        raise ValueError("sigma_deg must be positive")
    missing = [t for t in OPPONENT_TYPES if t not in v2_peaks]
    if missing:
        raise ValueError(f"v2_peaks lacks {missing}")
    dens = {
        t: float(np.exp(-(hue_distance(target_deg, v2_peaks[t]) ** 2) / (2.0 * sigma_deg**2)))
        for t in OPPONENT_TYPES
    }
    total = sum(dens.values())
    if total == 0.0:
        raise ValueError("all densities underflowed; sigma_deg too small")
    return {t: d / total for t, d in dens.items()}


def run_pipeline(image: np.ndarray, cfg: ModelConfig | None = None) -> PipelineResult:
    """Run the full hierarchy on a gamma-encoded sRGB image.

    The image is resized to the standard square input, split into cone
    activation planes, and passed through the four stages.  All
    intermediate activations are returned.
    """
    if cfg is None:
        cfg = ModelConfig()
    arr = np.asarray(image, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image values must lie in [0, 1]")
    resized = resize_to_standard(arr)
    l_plane, m_plane, s_plane = rgb_image_to_cone_planes(resized)
    cones = {"L": l_plane, "M": m_plane, "S": s_plane}
    lgn = lgn_layer(l_plane, m_plane, s_plane, cfg)
    v1 = gaussian_layer(lgn, "V1", cfg)
    v2 = gaussian_layer(v1, "V2", cfg)
    v4 = v4_layer(v2, cfg)
    return PipelineResult(cones=cones, lgn=lgn, v1=v1, v2=v2, v4=v4)
