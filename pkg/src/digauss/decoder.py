"""Per-layer projective identification tests and their L-fold intersection.

The layer test accepts a received block y when its scalar component along the
layer's unit path direction deviates from the expected radius by at most the
threshold; a word is identified when every layer accepts.  The decision
depends on y only through L inner products, which is what makes the fast
scalar simulation mode exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, Codeword
from .errors import DimensionMismatch, DomainError
from .geometry import GEOM_RTOL

__all__ = ["DecoderSpec", "spec_for_word", "layer_test", "identify"]


@dataclass(frozen=True, eq=False)
class DecoderSpec:
    """One word's decoder: per-layer unit direction, expected scalar, threshold."""

    word_id: int
    directions: tuple[np.ndarray, ...]
    radii: tuple[float, ...]
    thresholds: tuple[float, ...]

    def __post_init__(self):
        if not self.directions:
            raise DomainError("decoder needs at least one layer")
        if not len(self.directions) == len(self.radii) == len(self.thresholds):
            raise DomainError("per-layer fields must have equal length")
        for k, u in enumerate(self.directions):
            if abs(float(np.linalg.norm(u)) - 1.0) > GEOM_RTOL:
                raise DomainError(f"direction {k + 1} is not unit norm")
            if self.thresholds[k] <= 0:
                raise DomainError(f"threshold {k + 1} must be positive")
            for v in self.directions[k + 1 :]:
                if abs(float(np.dot(u, v))) > GEOM_RTOL:
                    raise DomainError("layer directions must be mutually orthogonal")


def spec_for_word(code: Codebook, word_id: int) -> DecoderSpec:
    w: Codeword = code.word(word_id)
    return DecoderSpec(
        word_id=w.word_id,
        directions=w.directions,
        radii=w.radii,
        thresholds=w.thresholds,
    )


def layer_test(y: np.ndarray, direction: np.ndarray, expected: float, threshold: float) -> bool:
    """|<y, direction> - expected| <= threshold; the boundary accepts."""
    if y.shape[-1] != direction.shape[-1]:
        raise DimensionMismatch("received block and direction dimensions differ")
    return abs(float(np.dot(y, direction)) - expected) <= threshold


def identify(y: np.ndarray, spec: DecoderSpec) -> bool:
    """Conjunction of the layer tests over all layers."""
    return all(
        layer_test(y, spec.directions[k], spec.radii[k], spec.thresholds[k])
        for k in range(len(spec.directions))
    )
