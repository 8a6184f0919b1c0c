"""Builders for the layered identification codebooks and their invariant audits.

A codebook is a sampled tree of sphere arrangements: layer 1 points sit on a
sphere around the origin, each layer-2 group sits on a smaller sphere around a
layer-1 point inside the orthogonal complement of that point's direction, and
so on.  A codeword is a leaf; its vector is the sum of the (mutually
orthogonal) path vectors down the tree.  Four constructions are provided:

* single layer: radius sqrt(n*power), d = 2*sigma*t, threshold sigma*t
* multi layer: radii (c*n)^(1/2^l), d = 3*sigma*t, threshold sigma*t
* universal: radii n^((1-b)/2^l), d = 3*t_abs, threshold t_abs; the builder
  takes neither sigma nor a power budget
* rate-reliability: threshold sigma*x with x = sqrt(2*n*E), d = 3*sigma*x,
  radii from the recursion r_{l+1} = sqrt(r_l*sigma*x/(6L))

Full codebooks are exponentially large; builders sample up to K siblings per
group, which suffices because every error guarantee is per word or per pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, RngSeed, make_rng
from .errors import (
    DegenerateGeometry,
    DigaussError,
    DomainError,
    ExponentTooLarge,
    PowerViolation,
    UnknownPath,
    WordNotFound,
)
from .geometry import (
    GEOM_RTOL,
    Arrangement,
    PackingConfig,
    audit_arrangement,
    greedy_angle_dense,
)

DEFAULT_SATURATION = 500

KIND_SINGLE = "single_layer"
KIND_MULTI = "multi_layer"
KIND_UNIVERSAL = "universal"
KIND_RATE_RELIABILITY = "rate_reliability"


@dataclass(frozen=True)
class LayerSpec:
    """Geometry of one layer: sphere radius, complement dimension, d, threshold."""

    index: int
    radius: float
    subspace_dim: int
    min_projected_distance: float
    threshold: float

    def __post_init__(self):
        if self.index < 1:
            raise DomainError("layer index starts at 1")
        if not self.radius > 0:
            raise DomainError("layer radius must be positive")
        if not self.min_projected_distance > 0:
            raise DomainError("min projected distance must be positive")
        if not self.threshold > 0:
            raise DomainError("threshold must be positive")
        if self.subspace_dim < 1:
            raise DomainError("subspace dimension must be at least 1")


@dataclass(eq=False)
class CodeNode:
    """Tree node: absolute center, the path vector that reached it, children."""

    center: np.ndarray
    path_vector: np.ndarray | None
    depth: int
    children: list["CodeNode"] = field(default_factory=list)
    word_id: int | None = None


@dataclass(frozen=True, eq=False)
class Codeword:
    """Leaf descriptor: the codeword vector plus per-layer decoder data.

    ``offsets`` holds the scalar component of the layer's prefix center along
    the layer direction; orthogonality forces it to ~0 and the audit checks
    that.
    """

    word_id: int
    path: tuple[int, ...]
    vector: np.ndarray
    directions: tuple[np.ndarray, ...]
    radii: tuple[float, ...]
    thresholds: tuple[float, ...]
    offsets: tuple[float, ...]


@dataclass(eq=False)
class Codebook:
    kind: str
    n: int
    channel: ChannelParams | None
    layers: tuple[LayerSpec, ...]
    root: CodeNode
    words: tuple[Codeword, ...]
    seed: RngSeed
    params: dict[str, float]
    sampled: bool = True
    saturated: bool = False
    degenerate: bool = False

    @property
    def depth(self) -> int:
        return len(self.layers)

    def word(self, word_id: int) -> Codeword:
        if 0 <= word_id < len(self.words):
            return self.words[word_id]
        raise WordNotFound(f"word id {word_id} not in codebook of {len(self.words)} words")


def _as_seed(seed: int | RngSeed) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed), 0)


def _normalize_counts(counts, depth: int) -> tuple[int, ...]:
    if isinstance(counts, int):
        counts = [counts] * depth
    counts = tuple(int(k) for k in counts)
    if len(counts) != depth:
        raise DomainError(f"need one sibling count per layer ({depth}), got {len(counts)}")
    if any(k < 1 for k in counts):
        raise DomainError("sibling counts must be at least 1")
    return counts


def _check_radii_decreasing(radii: list[float]) -> None:
    for a, b in zip(radii, radii[1:]):
        if not b < a:
            raise DomainError("layer radii must be strictly decreasing")


def _build_tree(
    n: int,
    specs: tuple[LayerSpec, ...],
    counts: tuple[int, ...],
    rng: np.random.Generator,
    saturation: int,
) -> tuple[CodeNode, tuple[Codeword, ...], bool, bool]:
    root = CodeNode(center=np.zeros(n), path_vector=None, depth=0)
    words: list[Codeword] = []
    state = {"saturated": False, "degenerate": False}
    radii = tuple(s.radius for s in specs)
    thresholds = tuple(s.threshold for s in specs)

    def expand(node: CodeNode, basis, path, dirs, offsets) -> None:
        depth = node.depth
        if depth == len(specs):
            node.word_id = len(words)
            words.append(
                Codeword(
                    word_id=node.word_id,
                    path=tuple(path),
                    vector=node.center,
                    directions=tuple(dirs),
                    radii=radii,
                    thresholds=thresholds,
                    offsets=tuple(offsets),
                )
            )
            return
        spec = specs[depth]
        cfg = PackingConfig(
            radius=spec.radius,
            ambient_dim=n,
            subspace_dim=n - len(basis),
            min_projected_distance=spec.min_projected_distance,
            max_points=counts[depth],
            saturation_rejections=saturation,
        )
        arr = greedy_angle_dense(cfg, center=node.center, forbidden_basis=tuple(basis), rng=rng)
        state["saturated"] |= arr.saturated
        state["degenerate"] |= arr.degenerate
        for idx, point in enumerate(arr.points):
            pv = point - node.center
            unit = pv / np.linalg.norm(pv)
            child = CodeNode(center=point, path_vector=pv, depth=depth + 1)
            node.children.append(child)
            expand(
                child,
                basis + [unit],
                path + [idx],
                dirs + [unit],
                offsets + [float(np.dot(node.center, unit))],
            )

    expand(root, [], [], [], [])
    return root, tuple(words), state["saturated"], state["degenerate"]


def build_single_layer(
    params: ChannelParams, threshold: float, count: int, seed: int | RngSeed = 0
) -> Codebook:
    """Up to ``count`` words on the sphere of radius sqrt(n*power), d = 2*sigma*t."""
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    if count < 1:
        raise DomainError("need at least one word")
    n, sigma = params.n, params.sigma
    radius = math.sqrt(n * params.power)
    d = 2.0 * sigma * threshold
    spec = LayerSpec(1, radius, n, d, sigma * threshold)
    seed = _as_seed(seed)
    rng = make_rng(seed)
    root, words, saturated, degenerate = _build_tree(n, (spec,), (count,), rng, DEFAULT_SATURATION)
    return Codebook(
        kind=KIND_SINGLE,
        n=n,
        channel=params,
        layers=(spec,),
        root=root,
        words=words,
        seed=seed,
        params={"threshold_t": float(threshold)},
        saturated=saturated,
        degenerate=degenerate,
    )


def multi_layer_radii(n: int, depth: int, radius_scale: float) -> list[float]:
    """(c*n)^(1/2^l) for l = 1..depth."""
    return [float((radius_scale * n) ** (1.0 / 2**level)) for level in range(1, depth + 1)]


def minimal_power_feasible_n(depth: int, radius_scale: float, power: float) -> int:
    """Smallest block length whose radii fit the power budget sum r_l^2 <= n*power."""
    if not 0 < radius_scale < power:
        raise DomainError("need 0 < radius_scale < power")

    def fits(m: int) -> bool:
        return sum(x * x for x in multi_layer_radii(m, depth, radius_scale)) <= m * power

    hi = 1
    while not fits(hi):
        hi *= 2
        if hi > 2**62:
            raise DomainError("no feasible block length found")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if fits(mid):
            hi = mid
        else:
            lo = mid
    while hi > 1 and fits(hi - 1):
        hi -= 1
    return hi


def build_multi_layer(
    params: ChannelParams,
    depth: int,
    radius_scale: float,
    threshold: float,
    counts,
    seed: int | RngSeed = 0,
) -> Codebook:
    """Layered codebook with radii (c*n)^(1/2^l) and d = 3*sigma*t."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if not 0 < radius_scale < params.power:
        raise DomainError("need 0 < radius_scale < power")
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    counts = _normalize_counts(counts, depth)
    n, sigma = params.n, params.sigma
    radii = multi_layer_radii(n, depth, radius_scale)
    _check_radii_decreasing(radii)
    d = 3.0 * sigma * threshold
    if radii[-1] < d:
        raise DegenerateGeometry(
            f"innermost radius {radii[-1]:.6g} below d = {d:.6g}; no layer-{depth} pair fits"
        )
    energy = sum(r * r for r in radii)
    if energy > n * params.power * (1.0 + 1e-12):
        raise PowerViolation(
            f"sum of squared radii {energy:.6g} exceeds n*power = {n * params.power:.6g}; "
            f"minimal admissible block length is "
            f"{minimal_power_feasible_n(depth, radius_scale, params.power)}",
            minimal_n=minimal_power_feasible_n(depth, radius_scale, params.power),
        )
    specs = tuple(
        LayerSpec(level + 1, radii[level], n - level, d, sigma * threshold)
        for level in range(depth)
    )
    seed = _as_seed(seed)
    rng = make_rng(seed)
    root, words, saturated, degenerate = _build_tree(n, specs, counts, rng, DEFAULT_SATURATION)
    return Codebook(
        kind=KIND_MULTI,
        n=n,
        channel=params,
        layers=specs,
        root=root,
        words=words,
        seed=seed,
        params={"radius_scale": float(radius_scale), "threshold_t": float(threshold)},
        saturated=saturated,
        degenerate=degenerate,
    )


def universal_radii(n: int, depth: int, margin: float) -> list[float]:
    """n^((1-b)/2^l) for l = 1..depth."""
    return [float(n ** ((1.0 - margin) / 2**level)) for level in range(1, depth + 1)]


def universal_power_feasible_n(depth: int, margin: float, power: float) -> int:
    """Smallest block length at which the universal radii fit a given power budget."""
    if not 0 < margin < 1:
        raise DomainError("need 0 < margin < 1")
    if not power > 0:
        raise DomainError("power must be positive")

    def fits(m: int) -> bool:
        return sum(x * x for x in universal_radii(m, depth, margin)) <= m * power

    hi = 1
    while not fits(hi):
        hi *= 2
        if hi > 2**62:
            raise DomainError("no feasible block length found")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if fits(mid):
            hi = mid
        else:
            lo = mid
    while hi > 1 and fits(hi - 1):
        hi -= 1
    return hi


def build_universal(
    n: int,
    depth: int,
    margin: float,
    threshold: float,
    counts,
    seed: int | RngSeed = 0,
) -> Codebook:
    """Noise- and power-blind codebook: radii n^((1-b)/2^l), absolute threshold.

    Neither the noise level nor a power budget appears in this signature; the
    power certificate (the sum of squared radii, which is O(n^(1-b))) is
    recorded for audit against a caller-supplied budget later.
    """
    if n < 1:
        raise DomainError("block length must be at least 1")
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if not 0 < margin < 1:
        raise DomainError("margin must lie strictly between 0 and 1")
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    counts = _normalize_counts(counts, depth)
    radii = universal_radii(n, depth, margin)
    _check_radii_decreasing(radii)
    d = 3.0 * threshold
    if radii[-1] < d:
        raise DegenerateGeometry(
            f"innermost radius {radii[-1]:.6g} below d = {d:.6g}; no layer-{depth} pair fits"
        )
    specs = tuple(
        LayerSpec(level + 1, radii[level], n - level, d, threshold) for level in range(depth)
    )
    seed = _as_seed(seed)
    rng = make_rng(seed)
    root, words, saturated, degenerate = _build_tree(n, specs, counts, rng, DEFAULT_SATURATION)
    return Codebook(
        kind=KIND_UNIVERSAL,
        n=n,
        channel=None,
        layers=specs,
        root=root,
        words=words,
        seed=seed,
        params={
            "margin": float(margin),
            "threshold_abs": float(threshold),
            "radius_norm_sq": float(sum(r * r for r in radii)),
        },
        saturated=saturated,
        degenerate=degenerate,
    )


def exponent_cutoff(power: float, sigma: float) -> float:
    """Admissibility cutoff E0 = 9*power/sigma^2 for the rate-reliability build."""
    if not power > 0 or not sigma > 0:
        raise DomainError("need power > 0 and sigma > 0")
    return 9.0 * power / (sigma * sigma)


def check_exponent_admissible(exponent: float, power: float, sigma: float) -> float:
    """Validate 0 < E <= E0; returns E0.  The boundary E = E0 is admissible."""
    e0 = exponent_cutoff(power, sigma)
    if not exponent > 0:
        raise DomainError("error exponent must be positive")
    if exponent > e0:
        raise ExponentTooLarge(
            f"exponent {exponent:.6g} exceeds the cutoff E0 = 9*power/sigma^2 = {e0:.6g}",
            e0=e0,
        )
    return e0


def rr_radii_recursion(n: int, power: float, sigma: float, depth: int, exponent: float) -> list[float]:
    """r_1 = sqrt(power*n/2), then r_{l+1} = sqrt(r_l * sigma * x / (6*depth))."""
    x = math.sqrt(2.0 * n * exponent)
    radii = [math.sqrt(power * n / 2.0)]
    for _ in range(depth - 1):
        radii.append(math.sqrt(radii[-1] * sigma * x / (6.0 * depth)))
    return radii


def rr_radii_closed_form(n: int, power: float, sigma: float, depth: int, exponent: float) -> list[float]:
    """sqrt(rho*n*E) * (power/(2*rho*E))^(1/2^l) with rho = (sigma/(3*sqrt(2)*depth))^2."""
    rho = (sigma / (3.0 * math.sqrt(2.0) * depth)) ** 2
    base = math.sqrt(rho * n * exponent)
    ratio = power / (2.0 * rho * exponent)
    return [base * ratio ** (1.0 / 2**level) for level in range(1, depth + 1)]


def build_rate_reliability(
    params: ChannelParams,
    depth: int,
    exponent: float,
    counts,
    seed: int | RngSeed = 0,
) -> Codebook:
    """Codebook tuned to an error exponent: threshold sigma*x, x = sqrt(2*n*E)."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    n, sigma, power = params.n, params.sigma, params.power
    check_exponent_admissible(exponent, power, sigma)
    counts = _normalize_counts(counts, depth)
    x = math.sqrt(2.0 * n * exponent)
    radii = rr_radii_recursion(n, power, sigma, depth, exponent)
    closed = rr_radii_closed_form(n, power, sigma, depth, exponent)
    for a, b in zip(radii, closed):
        if abs(a - b) > 1e-9 * max(abs(a), abs(b)):
            raise DigaussError(
                f"radius recursion and closed form disagree: {a!r} vs {b!r}"
            )
    _check_radii_decreasing(radii)
    d = 3.0 * sigma * x
    if radii[-1] < d:
        raise DegenerateGeometry(
            f"innermost radius {radii[-1]:.6g} below d = {d:.6g}; no layer-{depth} pair fits"
        )
    energy = sum(r * r for r in radii)
    if energy > n * power * (1.0 + 1e-12):
        raise PowerViolation(
            f"sum of squared radii {energy:.6g} exceeds n*power = {n * power:.6g}"
        )
    tau = sigma * x
    specs = tuple(
        LayerSpec(level + 1, radii[level], n - level, d, tau) for level in range(depth)
    )
    seed = _as_seed(seed)
    rng = make_rng(seed)
    root, words, saturated, degenerate = _build_tree(n, specs, counts, rng, DEFAULT_SATURATION)
    rho = (sigma / (3.0 * math.sqrt(2.0) * depth)) ** 2
    return Codebook(
        kind=KIND_RATE_RELIABILITY,
        n=n,
        channel=params,
        layers=specs,
        root=root,
        words=words,
        seed=seed,
        params={"exponent": float(exponent), "threshold_x": float(x), "rho": float(rho)},
        saturated=saturated,
        degenerate=degenerate,
    )


def codeword_vector(code: Codebook, path) -> np.ndarray:
    """Leaf vector addressed by a branch index sequence."""
    path = tuple(int(i) for i in path)
    if len(path) != code.depth:
        raise UnknownPath(f"path length {len(path)} != tree depth {code.depth}")
    node = code.root
    for level, idx in enumerate(path):
        if not 0 <= idx < len(node.children):
            raise UnknownPath(f"branch index {idx} out of range at layer {level + 1}")
        node = node.children[idx]
    return node.center


def sampled_layer_counts(code: Codebook) -> tuple[int, ...]:
    """Smallest sibling-group size at each depth (the sampled per-layer count)."""
    counts: list[int] = []
    level_nodes = [code.root]
    for _ in range(code.depth):
        sizes = [len(nd.children) for nd in level_nodes]
        counts.append(min(sizes))
        level_nodes = [child for nd in level_nodes for child in nd.children]
    return tuple(counts)


def first_differing_layer(code: Codebook, word_a: int, word_b: int) -> int:
    """1-based first layer at which the two words' paths part ways."""
    pa = code.word(word_a).path
    pb = code.word(word_b).path
    for level, (i, j) in enumerate(zip(pa, pb)):
        if i != j:
            return level + 1
    raise DomainError("words share the full path; they are the same leaf")


def audit_codebook(code: Codebook, power: float | None = None, rtol: float = GEOM_RTOL) -> list[str]:
    """Invariant audit over the whole tree; returns violation strings (empty = pass).

    Covers: sibling groups as angle-dense arrangements in their complement
    subspaces, path-vector norms and mutual orthogonality, leaf = sum of path
    vectors, the Pythagoras identity |leaf|^2 = sum r_l^2, the power budget,
    the double-layer projection-offset envelope r2*sin(theta) together with
    its sqrt(2d) ceiling at the packing floor, and the multi-layer separation
    floor d - sqrt(2*L*d).

    The power budget defaults to the channel's; pass ``power`` explicitly for
    codebooks built without one.  With neither, the power check is skipped.
    """
    bad: list[str] = []
    n = code.n
    if power is None and code.channel is not None:
        power = code.channel.power

    def walk(node: CodeNode, basis: list[np.ndarray]) -> None:
        depth = node.depth
        if depth == code.depth:
            return
        spec = code.layers[depth]
        if node.children:
            arr = Arrangement(
                center=node.center,
                radius=spec.radius,
                forbidden_basis=tuple(basis),
                points=tuple(ch.center for ch in node.children),
                min_projected_distance=spec.min_projected_distance,
                degenerate=code.degenerate and len(node.children) == 1,
            )
            for v in audit_arrangement(arr, rtol):
                bad.append(f"layer {depth + 1} group: {v}")
        for ch in node.children:
            pv = ch.path_vector
            nrm = float(np.linalg.norm(pv))
            if abs(nrm - spec.radius) > rtol * spec.radius:
                bad.append(f"layer {depth + 1} path vector norm {nrm!r} != {spec.radius!r}")
            walk(ch, basis + [pv / nrm])

    walk(code.root, [])

    radii_sq = sum(s.radius**2 for s in code.layers)
    for w in code.words:
        vecs = [w.radii[k] * w.directions[k] for k in range(code.depth)]
        for i in range(code.depth):
            for j in range(i + 1, code.depth):
                dot = abs(float(np.dot(vecs[i], vecs[j])))
                if dot > rtol * w.radii[i] * w.radii[j]:
                    bad.append(f"word {w.word_id}: path vectors {i + 1},{j + 1} not orthogonal")
        leaf_norm = float(np.linalg.norm(w.vector))
        resid = float(np.linalg.norm(w.vector - sum(vecs)))
        if resid > rtol * max(1.0, leaf_norm):
            bad.append(f"word {w.word_id}: leaf != sum of path vectors (residual {resid!r})")
        if abs(leaf_norm**2 - radii_sq) > rtol * radii_sq:
            bad.append(f"word {w.word_id}: |leaf|^2 = {leaf_norm**2!r} != sum r^2 = {radii_sq!r}")
        if power is not None and leaf_norm**2 > n * power * (1.0 + 1e-12):
            bad.append(
                f"word {w.word_id}: |leaf|^2 = {leaf_norm**2!r} over the budget {n * power!r}"
            )
        prefix_sq = 0.0
        for k, off in enumerate(w.offsets):
            # the offset is a dot against the prefix center, so rounding scales
            # with the prefix norm, not with the (possibly tiny) layer radius
            if abs(off) > rtol * max(1.0, math.sqrt(prefix_sq)):
                bad.append(f"word {w.word_id}: prefix offset at layer {k + 1} is {off!r}")
            prefix_sq += w.radii[k] ** 2

    if code.depth >= 2:
        r1 = code.layers[0].radius
        r2 = code.layers[1].radius
        d1 = code.layers[0].min_projected_distance
        # The sqrt(2d) ceiling describes the pair at the packing floor; it is
        # the envelope r2*sin(theta) evaluated at the minimum angle and needs
        # r2^2 <= r1 (true for the stock radius schedules, where r2 = sqrt(r1)).
        if r2 * r2 <= r1 * (1.0 + rtol):
            sin_sq_min = max(0.0, (d1 / r1) * (2.0 - d1 / r1))
            if r2 * r2 * sin_sq_min > 2.0 * d1 * (1.0 + rtol):
                bad.append(
                    f"double-layer offset ceiling {r2 * math.sqrt(sin_sq_min)!r} "
                    f"exceeds sqrt(2d) = {math.sqrt(2 * d1)!r} at the packing floor"
                )
        for a in code.root.children:
            ahat = a.path_vector / np.linalg.norm(a.path_vector)
            for b in code.root.children:
                if b is a:
                    continue
                base = float(np.dot(b.center - code.root.center, ahat))
                sin_sq = max(0.0, 1.0 - (base / r1) ** 2)
                envelope = r2 * math.sqrt(sin_sq)
                ceiling = envelope * (1.0 + rtol) + rtol * max(1.0, r2)
                for c in b.children:
                    off = abs(float(np.dot(c.center - code.root.center, ahat)) - base)
                    if off > ceiling:
                        bad.append(
                            f"double-layer offset {off!r} above the pair envelope "
                            f"r2*sin(theta) = {envelope!r}"
                        )

    if len(code.words) >= 2:
        depth = code.depth
        for w_tested in code.words:
            for w_sent in code.words:
                if w_sent.word_id == w_tested.word_id:
                    continue
                layer = first_differing_layer(code, w_tested.word_id, w_sent.word_id)
                spec = code.layers[layer - 1]
                d = spec.min_projected_distance
                floor = d - math.sqrt(2.0 * depth * d)
                if floor <= 0:
                    continue
                sep = abs(
                    float(np.dot(w_sent.vector, w_tested.directions[layer - 1])) - spec.radius
                )
                if sep < floor * (1.0 - rtol):
                    bad.append(
                        f"pair ({w_tested.word_id},{w_sent.word_id}) separation {sep!r} "
                        f"below d - sqrt(2Ld) = {floor!r} at layer {layer}"
                    )
    return bad


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _dump_json(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _dump_json(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _dump_json(v, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(_f17(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps_17g(obj) -> str:
    """JSON text with every float at 17 significant digits (bit-exact round trip)."""
    out: list[str] = []
    _dump_json(obj, out)
    return "".join(out)


def _node_to_dict(node: CodeNode) -> dict:
    return {
        "path_vector": None if node.path_vector is None else [float(x) for x in node.path_vector],
        "word_id": node.word_id,
        "children": [_node_to_dict(ch) for ch in node.children],
    }


def to_json(code: Codebook) -> str:
    """Self-describing document from which the codebook is replayable bit for bit."""
    doc = {
        "format": "digauss-codebook/1",
        "kind": code.kind,
        "n": code.n,
        "sampled": code.sampled,
        "saturated": code.saturated,
        "degenerate": code.degenerate,
        "seed": {"seed": code.seed.seed, "stream": code.seed.stream},
        "channel": None
        if code.channel is None
        else {"n": code.channel.n, "sigma": code.channel.sigma, "power": code.channel.power},
        "params": dict(code.params),
        "layers": [
            {
                "index": s.index,
                "radius": s.radius,
                "subspace_dim": s.subspace_dim,
                "min_projected_distance": s.min_projected_distance,
                "threshold": s.threshold,
            }
            for s in code.layers
        ],
        "tree": _node_to_dict(code.root),
    }
    return dumps_17g(doc)


def from_json(text: str) -> Codebook:
    doc = json.loads(text)
    if doc.get("format") != "digauss-codebook/1":
        raise DomainError(f"unrecognized codebook document format: {doc.get('format')!r}")
    n = int(doc["n"])
    specs = tuple(
        LayerSpec(
            index=int(s["index"]),
            radius=float(s["radius"]),
            subspace_dim=int(s["subspace_dim"]),
            min_projected_distance=float(s["min_projected_distance"]),
            threshold=float(s["threshold"]),
        )
        for s in doc["layers"]
    )
    words: list[Codeword] = []

    def rebuild(d: dict, center: np.ndarray, depth: int) -> CodeNode:
        pv = None if d["path_vector"] is None else np.array(d["path_vector"], dtype=np.float64)
        node = CodeNode(center=center, path_vector=pv, depth=depth, word_id=d["word_id"])
        for ch in d["children"]:
            child_pv = np.array(ch["path_vector"], dtype=np.float64)
            node.children.append(rebuild(ch, center + child_pv, depth + 1))
        return node

    root = rebuild(doc["tree"], np.zeros(n), 0)

    def collect(node: CodeNode, path: tuple[int, ...], chain: list[CodeNode]) -> None:
        if node.depth == len(specs):
            dirs = tuple(
                item.path_vector / np.linalg.norm(item.path_vector) for item in chain
            )
            offsets = []
            center = np.zeros(n)
            for k, item in enumerate(chain):
                offsets.append(float(np.dot(center, dirs[k])))
                center = center + item.path_vector
            words.append(
                Codeword(
                    word_id=len(words),
                    path=path,
                    vector=node.center,
                    directions=dirs,
                    radii=tuple(s.radius for s in specs),
                    thresholds=tuple(s.threshold for s in specs),
                    offsets=tuple(offsets),
                )
            )
            return
        for idx, ch in enumerate(node.children):
            collect(ch, path + (idx,), chain + [ch])

    collect(root, (), [])
    ch = doc["channel"]
    return Codebook(
        kind=doc["kind"],
        n=n,
        channel=None
        if ch is None
        else ChannelParams(n=int(ch["n"]), sigma=float(ch["sigma"]), power=float(ch["power"])),
        layers=specs,
        root=root,
        words=tuple(words),
        seed=RngSeed(int(doc["seed"]["seed"]), int(doc["seed"]["stream"])),
        params={k: float(v) for k, v in doc["params"].items()},
        sampled=bool(doc["sampled"]),
        saturated=bool(doc["saturated"]),
        degenerate=bool(doc["degenerate"]),
    )
