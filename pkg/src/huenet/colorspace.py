"""Color conversions: HSL, sRGB, cone activations, and chromaticity angles.

The cone space is reached through CIE XYZ: gamma-decoded sRGB is mapped to
XYZ (D65 white) and then to long/medium/short cone activations with the
Hunt-Pointer-Estevez matrix.  The combined matrix is rescaled per row so
that sRGB white (1, 1, 1) produces unit activation in every cone class,
which keeps opponent responses of achromatic inputs at zero.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# sRGB primaries to CIE XYZ under D65 (IEC 61966-2-1).
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)

# Hunt-Pointer-Estevez XYZ -> LMS, normalized to D65.
XYZ_TO_LMS = np.array(
    [
        [0.4002, 0.7076, -0.0808],
        [-0.2263, 1.1653, 0.0457],
        [0.0, 0.0, 0.9182],
    ]
)

_combined = XYZ_TO_LMS @ SRGB_TO_XYZ
# Row rescaling pins linear-RGB white (1,1,1) exactly to LMS (1,1,1).
RGB_LIN_TO_LMS = _combined / _combined.sum(axis=1, keepdims=True)

WHITE_LMS = np.ones(3)

# Full-field stimulus protocol: 60 hues, 6 degrees apart, at s=1, l=0.5.
SWEEP_HUE_COUNT = 60
SWEEP_SATURATION = 1.0
SWEEP_LIGHTNESS = 0.5


def srgb_to_linear(values: np.ndarray | float) -> np.ndarray | float:
    """Decode gamma-encoded sRGB values in [0, 1] to linear light.

    Applies the piecewise IEC 61966-2-1 curve (linear segment below
    0.04045, exponent 2.4 above).  Accepts scalars or arrays.

    Raises
    ------
    ValueError
        If any value falls outside [0, 1].
    """
    arr = np.asarray(values, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("sRGB values must lie in [0, 1]")
    linear = np.where(arr <= 0.04045, arr / 12.92, ((arr + 0.055) / 1.055) ** 2.4)
    if np.isscalar(values) or arr.ndim == 0:
        return float(linear)
    return linear


def hsl_to_rgb(hue_deg: float, saturation: float, lightness: float) -> tuple[float, float, float]:
    """Convert an HSL color to gamma-encoded sRGB.

    Parameters
    ----------
    hue_deg : float
        Hue angle in degrees; values outside [0, 360) are wrapped.
    saturation, lightness : float
        Both in [0, 1].

    Returns
    -------
    tuple of float
        (r, g, b), each in [0, 1].  Hue 0 with s=1, l=0.5 gives pure red.
    """
    if not 0.0 <= saturation <= 1.0:
        raise ValueError(f"saturation {saturation!r} outside [0, 1]")
    if not 0.0 <= lightness <= 1.0:
        raise ValueError(f"lightness {lightness!r} outside [0, 1]")
    h = (hue_deg % 360.0) / 360.0
    return colorsys.hls_to_rgb(h, lightness, saturation)


def rgb_to_hsl(r: float, g: float, b: float) -> tuple[float, float, float]:
    """Inverse of :func:`hsl_to_rgb`; returns (hue_deg, saturation, lightness)."""
    h, l, s = colorsys.rgb_to_hls(r, g, b)
    return (h * 360.0) % 360.0, s, l


def rgb_to_lms(rgb) -> np.ndarray:
    """Map gamma-encoded sRGB to cone activations.

    Parameters
    ----------
    rgb : array-like, shape (3,) or (..., 3)
        Gamma-encoded sRGB in [0, 1].

    Returns
    -------
    ndarray
        Cone activations with the same leading shape; white (1,1,1)
        maps to (1,1,1) and black to (0,0,0).
    """
    arr = np.asarray(rgb, dtype=float)
    if arr.shape[-1] != 3:
        raise ValueError("expected trailing axis of size 3")
    linear = srgb_to_linear(arr)
    return np.asarray(linear) @ RGB_LIN_TO_LMS.T


def rgb_image_to_cone_planes(image: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split an (H, W, 3) sRGB image into three cone activation planes."""
    lms = rgb_to_lms(image)
    return lms[..., 0], lms[..., 1], lms[..., 2]


def macleod_boynton(lms) -> tuple[float, float]:
    """Chromaticity coordinates (l/(l+m), s/(l+m)) of a cone triple.

    Raises
    ------
    ValueError
        If l + m == 0, where the coordinates are undefined.
    """
    l, m, s = (float(v) for v in np.asarray(lms, dtype=float))
    denom = l + m
    if denom == 0.0:
        raise ValueError("l + m is zero; chromaticity undefined")
    return l / denom, s / denom


@dataclass(frozen=True)
class ChromaticityPoint:
    """Angle (degrees, [0, 360)) and radius of a color's scaled deviation
    from the white point in the chromaticity plane.  radius == 0 flags a
    degenerate (achromatic) input whose angle is 0 by convention."""

    angle_deg: float
    radius: float


def sweep_hues(count: int = SWEEP_HUE_COUNT) -> np.ndarray:
    """Evenly spaced HSL hues covering the circle, starting at red (0)."""
    return np.arange(count) * (360.0 / count)


@lru_cache(maxsize=1)
def _sweep_lms() -> np.ndarray:
    rgb = np.array(
        [hsl_to_rgb(h, SWEEP_SATURATION, SWEEP_LIGHTNESS) for h in sweep_hues()]
    )
    return rgb_to_lms(rgb)


def chromaticity_scaling(lms_samples=None, white=None) -> tuple[float, float]:
    """Per-axis scale factors for the chromaticity plane.

    Each axis is scaled by the maximum absolute deviation from the white
    point attained over the sample set, so the sweep stimuli fill a
    roughly unit-sized circle.  With no arguments the factors come from
    the canonical 60-hue sweep.
    """
    if lms_samples is None:
        lms_samples = _sweep_lms()
    if white is None:
        white = WHITE_LMS
    wl, ws = macleod_boynton(white)
    coords = np.array([macleod_boynton(s) for s in np.asarray(lms_samples, dtype=float)])
    dev_l = np.max(np.abs(coords[:, 0] - wl))
    dev_s = np.max(np.abs(coords[:, 1] - ws))
    if dev_l == 0.0 or dev_s == 0.0:
        raise ValueError("sample set has no chromatic deviation on some axis")
    return float(dev_l), float(dev_s)


def lms_to_chromaticity_angle(lms, white=None, scaling=None) -> ChromaticityPoint:
    """Angular position of a color around the white point.

    The deviation of the color's chromaticity coordinates from the white
    point is rescaled per axis (see :func:`chromaticity_scaling`) and the
    angle taken with atan2, mapped to [0, 360).  The white point itself
    has no direction; it returns angle 0 with radius 0.
    """
    if white is None:
        white = WHITE_LMS
    if scaling is None:
        scaling = chromaticity_scaling()
    wl, ws = macleod_boynton(white)
    cl, cs = macleod_boynton(lms)
    x = (cl - wl) / scaling[0]
    y = (cs - ws) / scaling[1]
    radius = float(np.hypot(x, y))
    if radius == 0.0:
        return ChromaticityPoint(0.0, 0.0)
    angle = float(np.degrees(np.arctan2(y, x))) % 360.0
    return ChromaticityPoint(angle, radius)
