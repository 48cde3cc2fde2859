"""The 9-parameter eHMI design vector and its resolved rendering.

A design is a point in the unit box [0, 1]^9.  Components, in fixed order
p1..p9: red, green, blue, alpha, blink, width, height, vertical position,
loudness.  ``resolve_geometry`` turns a design into concrete rendering
values: an RGBA color, a blink frequency in Hz, a rectangle in normalized
front-face coordinates, and an audio amplitude fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotFinite, OutOfRange, WrongArity

N_PARAMS = 9

PARAM_NAMES = (
    "r",
    "g",
    "b",
    "alpha",
    "blink",
    "width",
    "height",
    "vertical_position",
    "loudness",
)

# Blink frequency at blink = 1.0, in Hz.
MAX_BLINK_HZ = 4.0


@dataclass(frozen=True)
class DesignParams:
    """One point of the design space; every field lies in [0, 1]."""

    r: float
    g: float
    b: float
    alpha: float
    blink: float
    width: float
    height: float
    vertical_position: float
    loudness: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in PARAM_NAMES)

    def as_list(self) -> list[float]:
        """Ordered p1..p9 list, the wire/log serialization of a design."""
        return list(self.as_tuple())


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in normalized front-face coordinates.

    ``center_u`` is always 0.5: the display is centered horizontally so it
    stays visible from either side of the vehicle.
    """

    center_u: float
    center_v: float
    w: float
    h: float


@dataclass(frozen=True)
class EhmiRendering:
    """Concrete renderable description resolved from a design."""

    color: tuple[float, float, float, float]
    blink_hz: float
    rect: Rect
    loudness: float


def validate_params(raw: Iterable[float] | Sequence[float]) -> DesignParams:
    """Validate a 9-component vector and wrap it as :class:`DesignParams`.

    Raises:
        WrongArity: not exactly 9 components.
        NotFinite: a component is NaN or infinite.
        OutOfRange: a component lies outside [0, 1].
    """
    values = [float(v) for v in raw]
    if len(values) != N_PARAMS:
        raise WrongArity(f"expected {N_PARAMS} components, got {len(values)}")
    for name, value in zip(PARAM_NAMES, values):
        if not math.isfinite(value):
            raise NotFinite(f"{name} is not finite: {value!r}")
        if not 0.0 <= value <= 1.0:
            raise OutOfRange(f"{name}={value} outside [0, 1]")
    return DesignParams(*values)


def blink_frequency_hz(blink: float) -> float:
    """Map the blink parameter in [0, 1] to a frequency in Hz.

    The reciprocal-period mapping 1 / ((1 / blink) * 0.25) simplifies to
    4 * blink.  A value of 0 has no blink period at all and means a
    constantly-on display, so it maps to 0 Hz.
    """
    if blink == 0.0:
        return 0.0
    return 1.0 / ((1.0 / blink) * 0.25)


def resolve_geometry(params: DesignParams) -> EhmiRendering:
    """Resolve a validated design into a renderable description.

    The rectangle keeps the requested width/height; its vertical center is
    clamped so the rectangle never leaves the unit front-face region.  The
    clamp (rather than a rejection) keeps every point of [0, 1]^9 feasible.
    """
    w = params.width
    h = params.height
    lo = h / 2.0
    hi = 1.0 - h / 2.0
    center_v = min(max(params.vertical_position, lo), hi)
    return EhmiRendering(
        color=(params.r, params.g, params.b, params.alpha),
        blink_hz=blink_frequency_hz(params.blink),
        rect=Rect(center_u=0.5, center_v=center_v, w=w, h=h),
        loudness=params.loudness,
    )


def rendering_to_dict(rendering: EhmiRendering) -> dict:
    """JSON-friendly form of a rendering, used by the service payloads."""
    return {
        "color": list(rendering.color),
        "blink_hz": rendering.blink_hz,
        "rect": {
            "center_u": rendering.rect.center_u,
            "center_v": rendering.rect.center_v,
            "w": rendering.rect.w,
            "h": rendering.rect.h,
        },
        "loudness": rendering.loudness,
    }
