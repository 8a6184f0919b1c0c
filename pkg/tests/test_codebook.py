"""Codebook builders: layer radii, feasibility guards, audits, serialization."""

import inspect
import json
import math

import numpy as np
import pytest

from digauss.channel import ChannelParams, RngSeed
from digauss.codebook import (
    build_multi_layer,
    build_rate_reliability,
    build_single_layer,
    build_universal,
    audit_codebook,
    check_exponent_admissible,
    codeword_vector,
    exponent_cutoff,
    first_differing_layer,
    from_json,
    minimal_power_feasible_n,
    multi_layer_radii,
    rr_radii_closed_form,
    rr_radii_recursion,
    sampled_layer_counts,
    to_json,
    universal_power_feasible_n,
    universal_radii,
)
from digauss.errors import (
    DegenerateGeometry,
    DomainError,
    ExponentTooLarge,
    PowerViolation,
    UnknownPath,
    WordNotFound,
)
from digauss.geometry import projected_distance


def test_single_layer_small_example():
    params = ChannelParams(n=4, sigma=1.0, power=100.0)
    code = build_single_layer(params, threshold=1.0, count=3, seed=1)
    assert code.kind == "single_layer"
    assert len(code.words) == 3
    r = code.layers[0].radius
    assert r == pytest.approx(20.0)  # sqrt(4 * 100)
    assert code.layers[0].min_projected_distance == pytest.approx(2.0)  # 2*sigma*t
    assert code.layers[0].threshold == pytest.approx(1.0)  # sigma*t
    center = np.zeros(4)
    for w in code.words:
        assert float(np.linalg.norm(w.vector)) == pytest.approx(r, rel=1e-12)
    for a in code.words:
        for b in code.words:
            if a.word_id != b.word_id:
                assert projected_distance(a.vector, b.vector, center) >= 2.0
    assert audit_codebook(code) == []


def test_single_layer_saturates_on_circle():
    # n=2, P=8: radius 4, d = 2 -> the exact circle oracle fits 6 points
    params = ChannelParams(n=2, sigma=1.0, power=8.0)
    code = build_single_layer(params, threshold=1.0, count=20, seed=3)
    assert code.saturated
    assert 2 <= len(code.words) <= 6
    assert audit_codebook(code) == []


def test_single_layer_degenerate_flag():
    # d = 2*sigma*t = 6 exceeds the diameter 2r = 4: single word, flagged
    params = ChannelParams(n=4, sigma=3.0, power=1.0)
    code = build_single_layer(params, threshold=1.0, count=5, seed=0)
    assert code.degenerate
    assert len(code.words) == 1


def test_single_layer_validation():
    params = ChannelParams(n=4, sigma=1.0, power=1.0)
    with pytest.raises(DomainError):
        build_single_layer(params, threshold=0.0, count=3)
    with pytest.raises(DomainError):
        build_single_layer(params, threshold=1.0, count=0)


def test_multi_layer_radii_frozen():
    assert multi_layer_radii(256, 3, 1.0) == pytest.approx([16.0, 4.0, 2.0], rel=1e-12)
    assert multi_layer_radii(10_000, 2, 1.0) == pytest.approx([100.0, 10.0], rel=1e-12)


def test_multi_layer_build_and_audit():
    params = ChannelParams(n=256, sigma=0.1, power=2.0)
    code = build_multi_layer(params, depth=3, radius_scale=1.0, threshold=2.0,
                             counts=2, seed=5)
    assert code.depth == 3
    assert len(code.words) == 8
    assert sampled_layer_counts(code) == (2, 2, 2)
    # leaf norm^2 = 256 + 16 + 4 = 276 by orthogonality
    for w in code.words:
        assert float(w.vector @ w.vector) == pytest.approx(276.0, rel=1e-9)
        for i in range(3):
            for j in range(i + 1, 3):
                dot = float(np.dot(w.directions[i], w.directions[j]))
                assert abs(dot) < 1e-9
    assert audit_codebook(code) == []


def test_multi_layer_ten_thousand():
    params = ChannelParams(n=10_000, sigma=1.0, power=1.5)
    code = build_multi_layer(params, depth=2, radius_scale=1.0, threshold=2.0,
                             counts=2, seed=9)
    # sum of squared radii 100^2 + 10^2 = 10100 <= n*P = 15000
    for w in code.words:
        assert float(w.vector @ w.vector) == pytest.approx(10_100.0, rel=1e-9)
    assert audit_codebook(code) == []


def test_multi_layer_power_violation_names_minimal_n():
    params = ChannelParams(n=16, sigma=0.05, power=1.05)
    with pytest.raises(PowerViolation) as err:
        build_multi_layer(params, depth=2, radius_scale=1.0, threshold=1.0,
                          counts=2, seed=0)
    # n + sqrt(n) <= 1.05 n first holds at n = 400
    assert err.value.minimal_n == 400
    assert minimal_power_feasible_n(2, 1.0, 1.05) == 400
    ok = ChannelParams(n=400, sigma=0.05, power=1.05)
    build_multi_layer(ok, depth=2, radius_scale=1.0, threshold=1.0, counts=2, seed=0)


def test_minimal_power_feasible_n_is_minimal():
    for depth, scale, power in [(2, 1.0, 1.05), (3, 0.5, 1.2), (2, 2.0, 2.5)]:
        n_min = minimal_power_feasible_n(depth, scale, power)

        def total(n):
            return sum(r * r for r in multi_layer_radii(n, depth, scale))

        assert total(n_min) <= n_min * power * (1 + 1e-12)
        if n_min > 1:
            assert total(n_min - 1) > (n_min - 1) * power * (1 + 1e-12)


def test_multi_layer_scale_bounds():
    params = ChannelParams(n=256, sigma=0.1, power=2.0)
    with pytest.raises(DomainError):
        build_multi_layer(params, depth=2, radius_scale=2.0, threshold=1.0, counts=2)
    with pytest.raises(DomainError):
        build_multi_layer(params, depth=2, radius_scale=0.0, threshold=1.0, counts=2)


def test_multi_layer_degenerate_geometry_raises():
    # cn = 256 gives r_2 = 4 but d = 3*sigma*t = 12 > r_2
    params = ChannelParams(n=256, sigma=2.0, power=2.0)
    with pytest.raises(DegenerateGeometry):
        build_multi_layer(params, depth=2, radius_scale=1.0, threshold=2.0, counts=2)


def test_multi_layer_radii_must_decrease():
    # cn < 1 would make radii increase with depth
    params = ChannelParams(n=16, sigma=0.01, power=1.0)
    with pytest.raises(DomainError):
        build_multi_layer(params, depth=2, radius_scale=0.01, threshold=1.0, counts=2)


def test_counts_validation():
    params = ChannelParams(n=64, sigma=0.05, power=2.0)
    with pytest.raises(DomainError):
        build_multi_layer(params, depth=2, radius_scale=1.0, threshold=1.0,
                          counts=[2], seed=0)
    with pytest.raises(DomainError):
        build_multi_layer(params, depth=2, radius_scale=1.0, threshold=1.0,
                          counts=[2, 0], seed=0)


def test_universal_radii_frozen():
    got = universal_radii(256, 2, 0.2)
    assert got == pytest.approx([9.1895868399762801, 3.0314331330207962], rel=1e-13)


def test_universal_signature_is_noise_and_power_blind():
    sig = inspect.signature(build_universal)
    names = set(sig.parameters)
    assert "sigma" not in names
    assert "power" not in names
    assert {"n", "depth", "margin", "threshold", "counts", "seed"} <= names


def test_universal_build_and_audit():
    code = build_universal(n=256, depth=2, margin=0.2, threshold=0.8, counts=2, seed=11)
    assert code.channel is None
    assert code.kind == "universal"
    assert len(code.words) == 4
    want_norm_sq = sum(r * r for r in universal_radii(256, 2, 0.2))
    assert code.params["radius_norm_sq"] == pytest.approx(want_norm_sq, rel=1e-12)
    assert audit_codebook(code) == []
    # power certificate: audit against an explicit budget
    assert audit_codebook(code, power=1.0) == []
    over = audit_codebook(code, power=want_norm_sq / 256 * 0.5)
    assert over and any("budget" in m for m in over)


def test_universal_margin_validation():
    with pytest.raises(DomainError):
        build_universal(n=64, depth=1, margin=0.0, threshold=0.5, counts=2)
    with pytest.raises(DomainError):
        build_universal(n=64, depth=1, margin=1.0, threshold=0.5, counts=2)


def test_universal_power_feasible_n_is_minimal():
    for depth, margin, power in [(2, 0.2, 0.5), (1, 0.5, 0.25)]:
        n_min = universal_power_feasible_n(depth, margin, power)

        def total(n):
            return sum(r * r for r in universal_radii(n, depth, margin))

        assert total(n_min) <= n_min * power * (1 + 1e-12)
        if n_min > 2:
            assert total(n_min - 1) > (n_min - 1) * power * (1 + 1e-12)


def test_exponent_cutoff_and_admissibility():
    assert exponent_cutoff(2.0, 1.0) == pytest.approx(18.0)
    # the boundary itself is admissible
    assert check_exponent_admissible(18.0, 2.0, 1.0) == pytest.approx(18.0)
    with pytest.raises(ExponentTooLarge) as err:
        check_exponent_admissible(18.0000001, 2.0, 1.0)
    assert err.value.e0 == pytest.approx(18.0)


def test_rr_radii_frozen_example():
    n, power, sigma, depth, exponent = 10_000, 2.0, 1.0, 2, 0.01
    rec = rr_radii_recursion(n, power, sigma, depth, exponent)
    closed = rr_radii_closed_form(n, power, sigma, depth, exponent)
    assert rec[0] == pytest.approx(100.0, rel=1e-12)
    assert rec[1] == pytest.approx(10.855926040543843, rel=1e-12)
    for a, b in zip(rec, closed):
        assert a == pytest.approx(b, rel=1e-9)


def test_rr_recursion_matches_closed_form_grid():
    for n in (64, 256, 1024, 4096, 10_000):
        for exponent in (0.001, 0.005, 0.01, 0.05, 0.1):
            rec = rr_radii_recursion(n, 2.0, 1.0, 3, exponent)
            closed = rr_radii_closed_form(n, 2.0, 1.0, 3, exponent)
            for a, b in zip(rec, closed):
                assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_rr_radii_decrease_when_feasible():
    radii = rr_radii_recursion(10_000, 2.0, 1.0, 4, 0.01)
    assert all(b < a for a, b in zip(radii, radii[1:]))


def test_rr_build_feasible_and_audited():
    # reverse-engineered feasible point: t = 2 sigma-units, L = 1
    n, sigma, threshold = 64, 1.0, 2.0
    exponent = threshold**2 / (2 * n)
    spacing = sigma * threshold / 6.0
    r1 = 1.05 * spacing * 18.0
    power = 2 * r1 * r1 / n
    code = build_rate_reliability(ChannelParams(n, sigma, power), depth=1,
                                  exponent=exponent, counts=3, seed=21)
    assert code.kind == "rate_reliability"
    x = math.sqrt(2 * n * exponent)
    assert code.layers[0].threshold == pytest.approx(sigma * x, rel=1e-12)
    assert code.layers[0].min_projected_distance == pytest.approx(3 * sigma * x, rel=1e-12)
    assert audit_codebook(code) == []


def test_rr_build_depth_two():
    n, sigma, threshold, depth = 64, 1.0, 2.0, 2
    exponent = threshold**2 / (2 * n)
    spacing = sigma * threshold / (6.0 * depth)
    r1 = 1.05 * spacing * (18.0 * depth) ** 2
    power = 2 * r1 * r1 / n
    code = build_rate_reliability(ChannelParams(n, sigma, power), depth=depth,
                                  exponent=exponent, counts=2, seed=22)
    assert len(code.words) == 4
    assert audit_codebook(code) == []


def test_rr_build_at_cutoff_is_geometrically_degenerate():
    # at E = E0 the packing distance is 18x the top radius; the builder must
    # refuse rather than emit an unusable tree
    power, sigma = 2.0, 1.0
    e0 = exponent_cutoff(power, sigma)
    with pytest.raises(DegenerateGeometry):
        build_rate_reliability(ChannelParams(64, sigma, power), depth=1,
                               exponent=e0, counts=2)
    with pytest.raises(ExponentTooLarge):
        build_rate_reliability(ChannelParams(64, sigma, power), depth=1,
                               exponent=e0 * 1.01, counts=2)


def test_tree_paths_and_lookup():
    params = ChannelParams(n=256, sigma=0.1, power=2.0)
    code = build_multi_layer(params, depth=2, radius_scale=1.0, threshold=2.0,
                             counts=[2, 3], seed=13)
    assert len(code.words) == 6
    assert sampled_layer_counts(code) == (2, 3)
    w = code.word(4)
    assert w.path == (1, 1)
    vec = codeword_vector(code, (1, 1))
    assert np.array_equal(vec, w.vector)
    with pytest.raises(UnknownPath):
        codeword_vector(code, (0,))
    with pytest.raises(UnknownPath):
        codeword_vector(code, (0, 9))
    with pytest.raises(WordNotFound):
        code.word(99)


def test_first_differing_layer():
    params = ChannelParams(n=256, sigma=0.1, power=2.0)
    code = build_multi_layer(params, depth=2, radius_scale=1.0, threshold=2.0,
                             counts=2, seed=13)
    # words in DFS order: (0,0), (0,1), (1,0), (1,1)
    assert first_differing_layer(code, 0, 1) == 2
    assert first_differing_layer(code, 0, 2) == 1
    assert first_differing_layer(code, 1, 3) == 1
    assert first_differing_layer(code, 2, 3) == 2
    with pytest.raises(DomainError):
        first_differing_layer(code, 1, 1)


def test_audit_catches_tampering():
    params = ChannelParams(n=64, sigma=0.05, power=2.0)
    code = build_multi_layer(params, depth=2, radius_scale=1.0, threshold=1.0,
                             counts=2, seed=17)
    assert audit_codebook(code) == []
    code.words[0].vector.flags.writeable = True
    code.words[0].vector[0] += 0.5
    assert audit_codebook(code) != []


def test_json_round_trip_bit_exact():
    params = ChannelParams(n=64, sigma=0.05, power=2.0)
    code = build_multi_layer(params, depth=2, radius_scale=1.0, threshold=1.0,
                             counts=2, seed=19)
    text = to_json(code)
    doc = json.loads(text)  # well-formed JSON
    assert doc["format"] == "digauss-codebook/1"
    clone = from_json(text)
    assert clone.kind == code.kind
    assert clone.n == code.n
    assert clone.seed == code.seed
    assert clone.depth == code.depth
    assert len(clone.words) == len(code.words)
    for a, b in zip(code.words, clone.words):
        assert a.word_id == b.word_id
        assert a.path == b.path
        assert np.array_equal(a.vector, b.vector)
        for da, db in zip(a.directions, b.directions):
            assert np.array_equal(da, db)
    assert to_json(clone) == text
    assert audit_codebook(clone) == []


def test_json_round_trip_universal():
    code = build_universal(n=32, depth=2, margin=0.3, threshold=0.5, counts=2, seed=23)
    clone = from_json(to_json(code))
    assert clone.channel is None
    for a, b in zip(code.words, clone.words):
        assert np.array_equal(a.vector, b.vector)
    assert to_json(clone) == to_json(code)
