"""Model configuration: rectifier and kernel settings per layer.

Defaults follow the standard build: receptive-field sizes double from 19
pixels at the first opponent stage to 152 at the hue-selective stage
(rounded up to odd kernel sizes), each kernel's sigma is size/6 so the
grid spans three standard deviations per side, and rectifiers clamp to
[-1, 1] at the opponent stage and [0, 1] above it.

The v1 rectifier ships with slope 1.7 so the strongest opponent signals
saturate and broaden into plateaus, and the v4 rectifier ships with base
-0.12 so weak off-hue sums are cut to zero.  Together these place each
hue type's peak response near its nominal hue, suppress the response at
the opposite hue, and make the hue-selective curves narrower than the
opponent curves they pool.  Slope 1.0 and base 0.0 (pure clamping) are
available by overriding the per-layer rectifiers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

LAYERS = ("lgn", "v1", "v2", "v4")
CONES = ("L", "M", "S")


@dataclass(frozen=True)
class RectifierParams:
    """Linear rectifier y = clamp(slope * x + base) with output limited
    to [lower, 1]; inputs that map above ``saturation`` return 1."""

    slope: float = 1.0
    base: float = 0.0
    lower: float = 0.0
    saturation: float = 1.0

    def __post_init__(self):
        if not self.lower <= self.saturation <= 1.0:
            raise ValueError(
                f"need lower <= saturation <= 1, got {self.lower}, {self.saturation}"
            )


@dataclass(frozen=True)
class KernelParams:
    size: int
    sigma: float

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be odd and positive, got {self.size}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def _default_kernel(size: int) -> KernelParams:
    return KernelParams(size=size, sigma=size / 6.0)


@dataclass(frozen=True)
class ModelConfig:
    """Complete parameter set for the feedforward pipeline.

    ``lgn_cone_sigmas`` optionally assigns a distinct Gaussian sigma per
    cone class per opponent type, e.g. ``{"L+M-": {"L": 2.0, "M": 4.0}}``;
    unset cones fall back to the lgn kernel sigma.  ``lgn_weights`` and
    ``v4_weights`` override the built-in opponent and hue weight tables
    (mapping type name to a weight sequence).
    """

    rectifiers: dict = field(
        default_factory=lambda: {
            "lgn": RectifierParams(lower=-1.0),
            "v1": RectifierParams(slope=1.7),
            "v2": RectifierParams(),
            "v4": RectifierParams(base=-0.12),
        }
    )
    kernels: dict = field(
        default_factory=lambda: {
            "lgn": _default_kernel(19),
            "v1": _default_kernel(39),
            "v2": _default_kernel(77),
            "v4": _default_kernel(153),
        }
    )
    lgn_cone_sigmas: dict | None = None
    lgn_weights: dict | None = None
    v4_weights: dict | None = None
    window: int = 32

    def __post_init__(self):
        for name in LAYERS:
            if name not in self.rectifiers:
                raise ValueError(f"missing rectifier for layer {name!r}")
            if name not in self.kernels:
                raise ValueError(f"missing kernel for layer {name!r}")
        if self.window < 1:
            raise ValueError("window must be positive")

    def cone_sigma(self, opponent_type: str, cone: str) -> float:
        """Gaussian sigma used for one cone plane of one opponent type."""
        if self.lgn_cone_sigmas is not None:
            per_type = self.lgn_cone_sigmas.get(opponent_type, {})
            if cone in per_type:
                return float(per_type[cone])
        return self.kernels["lgn"].sigma

    def to_dict(self) -> dict:
        out = {
            "rectifiers": {k: asdict(v) for k, v in self.rectifiers.items()},
            "kernels": {k: asdict(v) for k, v in self.kernels.items()},
            "window": self.window,
        }
        if self.lgn_cone_sigmas is not None:
            out["lgn_cone_sigmas"] = self.lgn_cone_sigmas
        if self.lgn_weights is not None:
            out["lgn_weights"] = {k: list(v) for k, v in self.lgn_weights.items()}
        if self.v4_weights is not None:
            out["v4_weights"] = {k: list(v) for k, v in self.v4_weights.items()}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {
            "rectifiers",
            "kernels",
            "lgn_cone_sigmas",
            "lgn_weights",
            "v4_weights",
            "window",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base = cls()
        rectifiers = dict(base.rectifiers)
        for name, params in data.get("rectifiers", {}).items():
            if name not in LAYERS:
                raise ValueError(f"unknown layer {name!r} in rectifiers")
            merged = asdict(rectifiers[name]) | dict(params)
            rectifiers[name] = RectifierParams(**merged)
        kernels = dict(base.kernels)
        for name, params in data.get("kernels", {}).items():
            if name not in LAYERS:
                raise ValueError(f"unknown layer {name!r} in kernels")
            merged = asdict(kernels[name]) | dict(params)
            kernels[name] = KernelParams(**merged)
        return cls(
            rectifiers=rectifiers,
            kernels=kernels,
            lgn_cone_sigmas=data.get("lgn_cone_sigmas"),
            lgn_weights=data.get("lgn_weights"),
            v4_weights=data.get("v4_weights"),
            window=int(data.get("window", base.window)),
        )

    @classmethod
    def load(cls, path) -> "ModelConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
