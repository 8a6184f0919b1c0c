"""Closed-form reference curves for the layered-codebook constructions.

All rates are in bits, normalized by n*log2(n) where a rate is per channel
use per log block length.  Finite-n curves evaluate the exact inequality
chains behind each construction; nothing here absorbs constants into big-O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .codebook import check_exponent_admissible, exponent_cutoff  # noqa: F401
from .errors import DomainError

LABEL_EXACT = "exact"
LABEL_ASYMPTOTIC = "asymptotic-reference"

_LABELS = (LABEL_EXACT, LABEL_ASYMPTOTIC)


@dataclass(frozen=True)
class BoundCurve:
    name: str
    inputs: Mapping[str, float]
    value: float
    label: str

    def __post_init__(self):
        if self.label not in _LABELS:
            raise DomainError(f"label must be one of {_LABELS}, got {self.label!r}")
        if not math.isfinite(self.value):
            raise DomainError(f"bound value must be finite, got {self.value!r}")


def rate_lower_single(n: int) -> float:
    """1/4 - log2(log2 n)/(2 log2 n), the one-layer rate floor."""
    if n < 4:
        raise DomainError("single-layer rate bound needs n >= 4")
    log_n = math.log2(n)
    return 0.25 - 0.5 * math.log2(log_n) / log_n


def _layered_rate(n: int, depth: int, log2_radius, dim_at, log2_d: float) -> float:
    if n < 2:
        raise DomainError("layered rate bound needs n >= 2")
    if depth < 1:
        raise DomainError("depth must be at least 1")
    total = 0.0
    for layer in range(1, depth + 1):
        log2_ratio = 1.0 + log2_radius(layer) - log2_d
        if log2_ratio <= 0.0:
            raise DomainError(
                f"layer {layer}: packing ratio 2r/d must exceed 1, "
                f"got {2.0 ** log2_ratio:.6g}"
            )
        dim = dim_at(layer)
        if dim < 1:
            raise DomainError(f"layer {layer} leaves no usable dimensions")
        total += (dim / 2.0) * log2_ratio
    return total / (n * math.log2(n))


def rate_lower_finite(n: int, depth: int, radius_scale: float, sigma: float, threshold: float) -> float:
    """Exact rate sum for the shrinking-radius construction at finite n.

    Layer radii are (radius_scale*n)**(1/2**layer), the packing distance is
    3*sigma*threshold, and layer l packs a sphere of dimension n+1-l.
    """
    if radius_scale <= 0:
        raise DomainError("radius_scale must be positive")
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if threshold <= 0:
        raise DomainError("threshold must be positive")
    log2_cn = math.log2(radius_scale) + math.log2(n)
    log2_d = math.log2(3.0 * sigma * threshold)
    return _layered_rate(
        n, depth,
        log2_radius=lambda layer: log2_cn / (2.0 ** layer),
        dim_at=lambda layer: n + 1 - layer,
        log2_d=log2_d,
    )


def rate_lower_universal(n: int, depth: int, margin: float, threshold_abs: float) -> float:
    """Exact rate sum for the noise-free-signature construction at finite n.

    Layer radii are n**((1-margin)/2**layer), the packing distance is
    3*threshold_abs, and layer l packs a sphere of dimension n-l.
    """
    if not 0.0 < margin < 1.0:
        raise DomainError("margin must lie strictly between 0 and 1")
    if threshold_abs <= 0:
        raise DomainError("threshold_abs must be positive")
    log2_n = math.log2(n) if n >= 2 else 0.0
    log2_d = math.log2(3.0 * threshold_abs)
    return _layered_rate(
        n, depth,
        log2_radius=lambda layer: (1.0 - margin) * log2_n / (2.0 ** layer),
        dim_at=lambda layer: n - layer,
        log2_d=log2_d,
    )


def rr_lower(exponent: float, power: float, sigma: float, depth: int) -> float:
    """Achievable rate at error exponent `exponent`: half log2 of P/(9 L sigma^2 E)."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if power <= 0 or sigma <= 0:
        raise DomainError("power and sigma must be positive")
    if exponent <= 0:
        raise DomainError("exponent must be positive")
    check_exponent_admissible(exponent, power, sigma)
    return 0.5 * math.log2(1.0 / exponent) + 0.5 * math.log2(power / (9.0 * depth * sigma * sigma))


def rr_upper(exponent: float, power: float, sigma: float) -> float:
    """Converse reference curve: half log2 of 8P/(sigma^2 E)."""
    if power <= 0 or sigma <= 0:
        raise DomainError("power and sigma must be positive")
    if exponent <= 0:
        raise DomainError("exponent must be positive")
    return 0.5 * math.log2(1.0 / exponent) + 0.5 * math.log2(8.0 * power / (sigma * sigma))


def capacity() -> float:
    """Exact linearithmic reliability limit for this channel family."""
    return 0.5


BOUND_PARAMS: dict[str, tuple[str, ...]] = {
    "rate_lower_single": ("n",),
    "rate_lower_finite": ("n", "depth", "radius_scale", "sigma", "threshold"),
    "rate_lower_universal": ("n", "depth", "margin", "threshold_abs"),
    "rr_lower": ("exponent", "power", "sigma", "depth"),
    "rr_upper": ("exponent", "power", "sigma"),
    "capacity": (),
}

_BOUND_LABELS: dict[str, str] = {
    "rate_lower_single": LABEL_ASYMPTOTIC,
    "rate_lower_finite": LABEL_EXACT,
    "rate_lower_universal": LABEL_EXACT,
    "rr_lower": LABEL_EXACT,
    "rr_upper": LABEL_ASYMPTOTIC,
    "capacity": LABEL_EXACT,
}

_BOUND_FUNCS = {
    "rate_lower_single": rate_lower_single,
    "rate_lower_finite": rate_lower_finite,
    "rate_lower_universal": rate_lower_universal,
    "rr_lower": rr_lower,
    "rr_upper": rr_upper,
    "capacity": capacity,
}


def evaluate_bound(name: str, **params) -> BoundCurve:
    """Evaluate a named bound and wrap it with its inputs and validity label."""
    if name not in _BOUND_FUNCS:
        raise DomainError(f"unknown bound {name!r}; known: {sorted(_BOUND_FUNCS)}")
    expected = BOUND_PARAMS[name]
    if set(params) != set(expected):
        raise DomainError(f"bound {name!r} takes parameters {expected}, got {tuple(sorted(params))}")
    value = _BOUND_FUNCS[name](**params)
    return BoundCurve(name=name, inputs=dict(params), value=value, label=_BOUND_LABELS[name])
