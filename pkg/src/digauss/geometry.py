"""Vector arithmetic, orthogonal projections, and angle-dense packings on spheres.

Points and directions are plain float64 numpy arrays (see ``as_vector``).  A
packing here is a set of points on a sphere, restricted to the orthogonal
complement of a few forbidden directions, such that each point's projection
onto any other point's direction stays at least ``d`` away from that other
point.  Packings are generated by random sequential addition with saturation
detection; an exact equiangular oracle covers the 2D case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGeometry,
    DegenerateSubspace,
    DimensionMismatch,
    DomainError,
    ZeroDirection,
)

#: Relative tolerance for geometric identities (double precision accumulated
#: over up to ~1e5 coordinates).
GEOM_RTOL = 1e-9

_SAMPLE_RETRIES = 16
_U64 = (1 << 64) - 1


def as_vector(components) -> np.ndarray:
    """Validate and freeze a point/direction in R^n.

    Returns a read-only float64 array.  Raises DomainError on empty input or
    non-finite entries.
    """
    v = np.array(components, dtype=np.float64, copy=True).reshape(-1)
    if v.size < 1:
        raise DomainError("vector needs at least one component")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector components must be finite")
    v.flags.writeable = False
    return v


def _check_same_dim(*vecs: np.ndarray) -> None:
    dims = {v.shape[-1] for v in vecs}
    if len(dims) != 1:
        raise DimensionMismatch(f"operands have different dimensions: {sorted(dims)}")


def project(v: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Orthogonal projection of v onto the line spanned by a: (<a,v>/|a|^2) a."""
    _check_same_dim(v, a)
    denom = float(np.dot(a, a))
    if denom == 0.0:
        raise ZeroDirection("cannot project onto the zero vector")
    return (float(np.dot(a, v)) / denom) * a


def projected_distance(p: np.ndarray, q: np.ndarray, center: np.ndarray) -> float:
    """Distance between the projection of p-center onto the q-direction and q-center.

    For two points on a sphere of radius r around ``center`` this equals
    r*(1 - cos angle), the quantity the angle-dense condition talks about.
    """
    _check_same_dim(p, q, center)
    w = q - center
    if float(np.dot(w, w)) == 0.0:
        raise ZeroDirection("q coincides with center; its direction is undefined")
    return float(np.linalg.norm(project(p - center, w) - w))


def sample_on_subspace_sphere(
    center: np.ndarray,
    r: float,
    forbidden_basis: tuple[np.ndarray, ...] | list[np.ndarray],
    rng: np.random.Generator,
) -> np.ndarray:
    """Uniform point on the radius-r sphere around center, orthogonal to the basis.

    Samples an isotropic Gaussian vector, removes its projection onto each
    forbidden direction, and rescales the residual to norm r.  The basis must
    be orthonormal; the complement must have dimension >= 1.
    """
    n = center.shape[-1]
    _validate_basis(forbidden_basis, n)
    if n - len(forbidden_basis) < 1:
        raise DomainError("orthogonal complement is zero-dimensional")
    if r <= 0:
        raise DomainError("sphere radius must be positive")
    for _ in range(_SAMPLE_RETRIES):
        g = rng.standard_normal(n)
        pre = float(np.linalg.norm(g))
        if pre == 0.0:
            continue
        for b in forbidden_basis:
            g = g - float(np.dot(g, b)) * b
        res = float(np.linalg.norm(g))
        if res >= 1e-12 * pre:
            return center + (r / res) * g
    raise DegenerateSubspace(
        "residual norm stayed below 1e-12 of the pre-projection norm; "
        "complement appears numerically empty"
    )


def _validate_basis(basis, n: int) -> None:
    for i, b in enumerate(basis):
        if b.shape[-1] != n:
            raise DimensionMismatch("forbidden basis dimension differs from ambient")
        if abs(float(np.linalg.norm(b)) - 1.0) > GEOM_RTOL:
            raise DomainError(f"forbidden basis vector {i} is not unit norm")
        for c in basis[i + 1 :]:
            if abs(float(np.dot(b, c))) > GEOM_RTOL:
                raise DomainError("forbidden basis vectors are not orthogonal")


@dataclass(frozen=True)
class PackingConfig:
    """Parameters for random sequential packing generation."""

    radius: float
    ambient_dim: int
    subspace_dim: int
    min_projected_distance: float
    max_points: int
    saturation_rejections: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("radius must be positive")
        if self.min_projected_distance <= 0:
            raise DomainError("min_projected_distance must be positive")
        if self.max_points < 1:
            raise DomainError("max_points must be at least 1")
        if self.saturation_rejections < 1:
            raise DomainError("saturation_rejections must be at least 1")
        if self.ambient_dim < 1 or not 1 <= self.subspace_dim <= self.ambient_dim:
            raise DomainError("need 1 <= subspace_dim <= ambient_dim")


@dataclass(frozen=True, eq=False)
class Arrangement:
    """A d-angle-dense point set on a sphere inside a complement subspace.

    ``saturated`` means generation stopped because candidates kept being
    rejected; ``degenerate`` means d exceeded the sphere diameter and only a
    single point was placed.
    """

    center: np.ndarray
    radius: float
    forbidden_basis: tuple[np.ndarray, ...]
    points: tuple[np.ndarray, ...]
    min_projected_distance: float
    saturated: bool = False
    degenerate: bool = False


def greedy_angle_dense(
    cfg: PackingConfig,
    center: np.ndarray | None = None,
    forbidden_basis: tuple[np.ndarray, ...] = (),
    rng: np.random.Generator | None = None,
) -> Arrangement:
    """Random sequential addition: sample candidates, keep those d-far from all kept.

    A candidate is accepted iff its projected distance against every accepted
    point is >= d in both orderings.  Generation stops at max_points or after
    cfg.saturation_rejections consecutive rejections (saturated flag).  If
    d > 2r no pair can coexist; a single-point arrangement with the degenerate
    flag is returned.
    """
    if center is None:
        center = np.zeros(cfg.ambient_dim)
    if center.shape[-1] != cfg.ambient_dim:
        raise DimensionMismatch("center dimension differs from cfg.ambient_dim")
    if cfg.ambient_dim - len(forbidden_basis) != cfg.subspace_dim:
        raise DomainError(
            "subspace_dim must equal ambient_dim minus the forbidden basis size"
        )
    if rng is None:
        rng = np.random.Generator(np.random.Philox(key=[cfg.seed & _U64, 0]))

    d = cfg.min_projected_distance
    r = cfg.radius
    if d > 2 * r:
        point = sample_on_subspace_sphere(center, r, forbidden_basis, rng)
        return Arrangement(
            center=center,
            radius=r,
            forbidden_basis=tuple(forbidden_basis),
            points=(point,),
            min_projected_distance=d,
            degenerate=True,
        )

    points: list[np.ndarray] = []
    rejections = 0
    saturated = False
    while len(points) < cfg.max_points:
        cand = sample_on_subspace_sphere(center, r, forbidden_basis, rng)
        ok = all(
            projected_distance(cand, p, center) >= d
            and projected_distance(p, cand, center) >= d
            for p in points
        )
        if ok:
            points.append(cand)
            rejections = 0
        else:
            rejections += 1
            if rejections >= cfg.saturation_rejections:
                saturated = True
                break
    return Arrangement(
        center=center,
        radius=r,
        forbidden_basis=tuple(forbidden_basis),
        points=tuple(points),
        min_projected_distance=d,
        saturated=saturated,
    )


#: Guard against one-ulp overshoot in 2*pi/theta before flooring (theta from
#: acos can land a hair above the exact angle; e.g. acos(0.5)*6 > 2*pi in
#: float64, which would undercount the r=4, d=2 circle).
_FLOOR_GUARD = 1e-9


def equiangular_2d(r: float, d: float) -> Arrangement:
    """Exact 2D oracle: floor(2*pi/theta) equally spaced points, theta = acos(1 - d/r)."""
    if r <= 0 or d <= 0:
        raise DomainError("need r > 0 and d > 0")
    if d > 2 * r:
        raise DegenerateGeometry("d exceeds the circle diameter; no pair fits")
    theta = math.acos(1.0 - d / r)
    count = int(math.floor(2 * math.pi / theta + _FLOOR_GUARD))
    pts = tuple(
        np.array([r * math.cos(k * theta), r * math.sin(k * theta)])
        for k in range(count)
    )
    return Arrangement(
        center=np.zeros(2),
        radius=r,
        forbidden_basis=(),
        points=pts,
        min_projected_distance=d,
    )


def min_angle_bound(d: float, r: float) -> float:
    """Minimum separation angle of a d-angle-dense pair on a radius-r sphere."""
    if r <= 0 or d <= 0:
        raise DomainError("need r > 0 and d > 0")
    if d > 2 * r:
        raise DomainError("d may not exceed the sphere diameter 2r")
    return 2.0 * math.asin(math.sqrt(d / (2.0 * r)))


def chord_bound(d: float, r: float) -> float:
    """Lower bound sqrt(2rd) on the Euclidean distance of a d-angle-dense pair."""
    if r <= 0 or d <= 0:
        raise DomainError("need r > 0 and d > 0")
    return math.sqrt(2.0 * r * d)


def packing_size_lower_bound(n: int, r: float, d: float) -> float:
    """Asymptotic reference (n/2)*log2(2r/d) on log2 of the packing size.

    This carries the construction's [1+o(1)] exponent; it is not a finite-n
    guarantee and greedy counts at small n may fall below it.
    """
    if n < 1:
        raise DomainError("dimension n must be at least 1")
    if r <= 0 or d <= 0:
        raise DomainError("need r > 0 and d > 0")
    if d > 2 * r:
        raise DomainError("d may not exceed the sphere diameter 2r")
    return (n / 2.0) * math.log2(2.0 * r / d)


def audit_arrangement(arr: Arrangement, rtol: float = GEOM_RTOL) -> list[str]:
    """Full invariant audit; returns a list of violation descriptions (empty = pass)."""
    bad: list[str] = []
    r = arr.radius
    d = arr.min_projected_distance
    for i, p in enumerate(arr.points):
        w = p - arr.center
        if abs(float(np.linalg.norm(w)) - r) > rtol * r:
            bad.append(f"point {i} off the sphere: |p-c| = {np.linalg.norm(w)!r}")
        for j, b in enumerate(arr.forbidden_basis):
            if abs(float(np.dot(w, b))) > rtol * r:
                bad.append(f"point {i} not orthogonal to forbidden direction {j}")
    if arr.degenerate and len(arr.points) <= 1:
        return bad
    chord_floor = chord_bound(d, r) * (1.0 - rtol) if d <= 2 * r else 0.0
    for i, p in enumerate(arr.points):
        for j, q in enumerate(arr.points):
            if i == j:
                continue
            pd = projected_distance(p, q, arr.center)
            if pd < d * (1.0 - rtol):
                bad.append(f"pair ({i},{j}) projected distance {pd!r} < d = {d!r}")
            if i < j:
                chord = float(np.linalg.norm(p - q))
                if chord < chord_floor:
                    bad.append(f"pair ({i},{j}) chord {chord!r} < sqrt(2rd)")
    return bad
