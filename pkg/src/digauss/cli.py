"""Batch experiment runner: config in, codebooks/estimates/curves out as CSV+JSON.

Subcommands:

* ``construct``  build a codebook and write its replayable JSON document
* ``simulate``   build, estimate all miss/false rates, write report CSV + JSON
* ``bounds``     evaluate named bound curves over parameter grids
* ``sweep``      rate-reliability tradeoff over an exponent grid

Config is a single JSON document (``--config``), with ``--set key=value``
overrides.  ``--workers`` never changes any output byte; reports derive every
random stream from the resolved seed alone.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .bounds import evaluate_bound, rr_lower, rr_upper
from .channel import ChannelParams, RngSeed, phi, substream
from .codebook import (
    Codebook,
    build_multi_layer,
    build_rate_reliability,
    build_single_layer,
    build_universal,
    dumps_17g,
    exponent_cutoff,
    first_differing_layer,
    sampled_layer_counts,
    to_json,
)
from .errors import ConfigError, DigaussError
from .montecarlo import empirical_rate, estimate_all_pairs, estimate_false, estimate_miss, false_analytic, miss_analytic

REPORT_COLUMNS = (
    "experiment", "kind", "n", "L", "sigma", "P", "threshold",
    "layer_or_pair", "pair_kind", "trials", "hits", "estimate",
    "ci_low", "ci_high", "analytic", "bound", "seed",
)

BOUNDS_COLUMNS = ("name", "n", "L", "c", "b", "sigma", "P", "threshold", "E", "value", "label")

SWEEP_COLUMNS = (
    "experiment", "kind", "n", "L", "sigma", "P", "E", "threshold",
    "empirical_rate", "lambda1_hat", "lambda2_hat", "rr_lower", "rr_upper", "seed",
)

KINDS = ("single", "multi", "universal", "rr")
MODES = ("scalar_fast", "full_vector")

ANALYTIC_ONLY_CUTOFF = 1e-8

SEED_ENV_VAR = "DI_GAUSS_SEED"

_EXPERIMENT_KEYS = frozenset(
    ["name", "kind", "n", "L", "c", "b", "E", "sigma", "P", "threshold_mode",
     "threshold", "K_per_layer", "trials", "seed", "mode", "out_dir"]
)

# short CSV/config keys -> keyword names of the bound functions
_BOUND_KEYMAP: dict[str, dict[str, str]] = {
    "rate_lower_single": {"n": "n"},
    "rate_lower_finite": {"n": "n", "L": "depth", "c": "radius_scale", "sigma": "sigma", "threshold": "threshold"},
    "rate_lower_universal": {"n": "n", "L": "depth", "b": "margin", "threshold": "threshold_abs"},
    "rr_lower": {"E": "exponent", "P": "power", "sigma": "sigma", "L": "depth"},
    "rr_upper": {"E": "exponent", "P": "power", "sigma": "sigma"},
    "capacity": {},
}


class ExperimentConfig:
    """Validated simulate/construct configuration; attributes mirror config keys."""

    def __init__(self, *, name, kind, n, depth, sigma, power, scale, margin,
                 exponent, threshold_mode, threshold, counts, trials, seed, mode, out_dir):
        self.name = name
        self.kind = kind
        self.n = n
        self.depth = depth
        self.sigma = sigma
        self.power = power
        self.scale = scale
        self.margin = margin
        self.exponent = exponent
        self.threshold_mode = threshold_mode
        self.threshold = threshold
        self.counts = counts
        self.trials = trials
        self.seed = seed
        self.mode = mode
        self.out_dir = out_dir


def _cfg_number(doc: dict, key: str, positive: bool = True) -> float:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{key} must be positive, got {value!r}")
    return float(value)


def _cfg_int(doc: dict, key: str, minimum: int) -> int:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key} must be at least {minimum}, got {value}")
    return value


def _require(doc: dict, key: str, kind: str) -> None:
    if key not in doc:
        raise ConfigError(f"kind={kind} requires {key}")


def _forbid(doc: dict, key: str, kind: str, why: str) -> None:
    if key in doc:
        raise ConfigError(f"{key} does not apply to kind={kind}: {why}")


def parse_experiment_config(doc: dict) -> ExperimentConfig:
    """Validate a simulate/construct config document, naming any violated rule."""
    for key in doc:
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    if "kind" not in doc:
        raise ConfigError("kind is required")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    if "n" not in doc:
        raise ConfigError("n is required")
    n = _cfg_int(doc, "n", 1)

    name = doc.get("name", "experiment")
    if not isinstance(name, str) or not name:
        raise ConfigError(f"name must be a non-empty string, got {name!r}")

    depth = _cfg_int(doc, "L", 1) if "L" in doc else 1
    if kind == "single" and depth != 1:
        raise ConfigError("kind=single requires L=1")

    if "sigma" not in doc:
        raise ConfigError("sigma is required (it sets the simulated noise level)")
    sigma = _cfg_number(doc, "sigma")

    power = None
    if kind == "universal":
        _forbid(doc, "P", kind, "the universal construction admits no power parameter")
        _forbid(doc, "c", kind, "use b for the universal radius exponent margin")
        _forbid(doc, "E", kind, "exponents belong to kind=rr")
        _require(doc, "b", kind)
        margin = _cfg_number(doc, "b")
        if not margin < 1:
            raise ConfigError(f"b must lie strictly between 0 and 1, got {margin!r}")
    else:
        _forbid(doc, "b", kind, "b only applies to kind=universal")
        _require(doc, "P", kind)
        power = _cfg_number(doc, "P")
        margin = None

    scale = None
    if kind == "multi":
        _require(doc, "c", kind)
        scale = _cfg_number(doc, "c")
        if not scale < power:
            raise ConfigError(f"c must satisfy 0 < c < P, got c={scale!r}, P={power!r}")
    elif kind in ("single", "rr"):
        _forbid(doc, "c", kind, "c only applies to kind=multi")

    exponent = None
    if kind == "rr":
        _require(doc, "E", kind)
        exponent = _cfg_number(doc, "E")
        e0 = exponent_cutoff(power, sigma)
        if exponent > e0:
            raise ConfigError(
                f"E = {exponent!r} exceeds the admissible cutoff E0 = 9*P/sigma^2 = {e0!r}"
            )
    elif "E" in doc:
        raise ConfigError(f"E does not apply to kind={kind}: exponents belong to kind=rr")

    if kind == "rr":
        _forbid(doc, "threshold", kind, "kind=rr derives its threshold from E")
        _forbid(doc, "threshold_mode", kind, "kind=rr derives its threshold from E")
        threshold_mode = "fixed"
        threshold = math.sqrt(2.0 * n * exponent)
    else:
        threshold_mode = doc.get("threshold_mode", "fixed")
        if threshold_mode not in ("fixed", "paper_log2"):
            raise ConfigError(
                f"threshold_mode must be 'fixed' or 'paper_log2', got {threshold_mode!r}"
            )
        if threshold_mode == "fixed":
            if "threshold" not in doc:
                raise ConfigError("threshold is required when threshold_mode=fixed")
            threshold = _cfg_number(doc, "threshold")
        else:
            if "threshold" in doc:
                raise ConfigError("threshold_mode=paper_log2 derives t = log2(n); drop threshold")
            if n < 2:
                raise ConfigError("threshold_mode=paper_log2 needs n >= 2")
            threshold = math.log2(n)

    counts_raw = doc.get("K_per_layer", 2)
    if isinstance(counts_raw, bool) or not isinstance(counts_raw, (int, list)):
        raise ConfigError(f"K_per_layer must be an integer or a list, got {counts_raw!r}")
    if isinstance(counts_raw, int):
        counts = (counts_raw,) * depth
    else:
        counts = tuple(counts_raw)
        if len(counts) != depth:
            raise ConfigError(f"K_per_layer list must have L = {depth} entries, got {len(counts)}")
    for k in counts:
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ConfigError(f"K_per_layer entries must be integers >= 1, got {k!r}")

    trials = _cfg_int(doc, "trials", 1) if "trials" in doc else 10_000
    seed = None
    if "seed" in doc:
        if isinstance(doc["seed"], bool) or not isinstance(doc["seed"], int):
            raise ConfigError(f"seed must be an integer, got {doc['seed']!r}")
        seed = doc["seed"]
    mode = doc.get("mode", "scalar_fast")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    out_dir = doc.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError(f"out_dir must be a string, got {out_dir!r}")

    return ExperimentConfig(
        name=name, kind=kind, n=n, depth=depth, sigma=sigma, power=power,
        scale=scale, margin=margin, exponent=exponent, threshold_mode=threshold_mode,
        threshold=threshold, counts=counts, trials=trials, seed=seed, mode=mode,
        out_dir=out_dir,
    )


def build_codebook(cfg: ExperimentConfig, seed: int) -> Codebook:
    """Run the builder matching cfg.kind; geometric infeasibility is a config error."""
    try:
        if cfg.kind == "single":
            params = ChannelParams(cfg.n, cfg.sigma, cfg.power)
            return build_single_layer(params, cfg.threshold, cfg.counts[0], seed)
        if cfg.kind == "multi":
            params = ChannelParams(cfg.n, cfg.sigma, cfg.power)
            return build_multi_layer(params, cfg.depth, cfg.scale, cfg.threshold, cfg.counts, seed)
        if cfg.kind == "universal":
            return build_universal(cfg.n, cfg.depth, cfg.margin, cfg.threshold, cfg.counts, seed)
        params = ChannelParams(cfg.n, cfg.sigma, cfg.power)
        return build_rate_reliability(params, cfg.depth, cfg.exponent, cfg.counts, seed)
    except DigaussError as exc:
        raise ConfigError(f"config violates a builder precondition: {exc}") from exc


def _config_echo(cfg: ExperimentConfig, seed: int) -> dict:
    return {
        "name": cfg.name,
        "kind": cfg.kind,
        "n": cfg.n,
        "L": cfg.depth,
        "c": cfg.scale,
        "b": cfg.margin,
        "E": cfg.exponent,
        "sigma": cfg.sigma,
        "P": cfg.power,
        "threshold_mode": cfg.threshold_mode,
        "threshold": cfg.threshold,
        "K_per_layer": list(cfg.counts),
        "trials": cfg.trials,
        "seed": seed,
        "mode": cfg.mode,
    }


def _digest(echo: dict) -> str:
    return "sha256:" + hashlib.sha256(dumps_17g(echo).encode()).hexdigest()


def _word_label(word) -> str:
    return "w" + ".".join(str(i) for i in word.path)


def _bound_entries(cfg: ExperimentConfig) -> list[dict]:
    jobs: list[tuple[str, dict]] = []
    if cfg.kind == "single":
        jobs.append(("rate_lower_single", {"n": cfg.n}))
    elif cfg.kind == "multi":
        jobs.append(("rate_lower_finite", {
            "n": cfg.n, "depth": cfg.depth, "radius_scale": cfg.scale,
            "sigma": cfg.sigma, "threshold": cfg.threshold,
        }))
    elif cfg.kind == "universal":
        jobs.append(("rate_lower_universal", {
            "n": cfg.n, "depth": cfg.depth, "margin": cfg.margin,
            "threshold_abs": cfg.threshold,
        }))
    else:
        jobs.append(("rr_lower", {
            "exponent": cfg.exponent, "power": cfg.power,
            "sigma": cfg.sigma, "depth": cfg.depth,
        }))
        jobs.append(("rr_upper", {
            "exponent": cfg.exponent, "power": cfg.power, "sigma": cfg.sigma,
        }))
    jobs.append(("capacity", {}))
    entries = []
    for bound_name, params in jobs:
        try:
            curve = evaluate_bound(bound_name, **params)
            entries.append({
                "name": curve.name, "inputs": dict(curve.inputs),
                "value": curve.value, "label": curve.label,
            })
        except DigaussError as exc:
            entries.append({"name": bound_name, "inputs": dict(params), "error": str(exc)})
    return entries


def run_experiment(cfg: ExperimentConfig, seed: int, workers: int = 1) -> dict:
    """Build the codebook and estimate every miss/false rate; returns the report.

    Rows are ordered misses first (word order) then ordered pairs; row r draws
    from substream r of the resolved seed, matching estimate_all_pairs, so the
    report is reproducible from (config, seed) alone and worker-independent.
    Under threshold_mode=paper_log2, rows whose analytic value is below 1e-8
    skip simulation and are tagged ``:analytic_only``.
    """
    started = time.monotonic()
    code = build_codebook(cfg, seed)
    if len(code.words) < 2:
        raise ConfigError("simulate needs at least two codewords; raise K_per_layer")
    echo = _config_echo(cfg, seed)
    digest = _digest(echo)
    base = RngSeed(seed, 0)
    sigma = cfg.sigma
    paper_mode = cfg.threshold_mode == "paper_log2"

    rows: list[dict] = []
    stream_index = 0

    def push(label: str, kind_label: str, tested, sent, analytic: float, bound: float, runner) -> None:
        nonlocal stream_index
        row_seed = substream(base, stream_index)
        stream_index += 1
        if paper_mode and analytic < ANALYTIC_ONLY_CUTOFF:
            rows.append({
                "layer_or_pair": label, "pair_kind": kind_label + ":analytic_only",
                "tested": tested, "sent": sent, "trials": 0, "hits": None,
                "estimate": None, "ci_low": None, "ci_high": None,
                "analytic": analytic, "bound": bound,
                "seed": {"seed": row_seed.seed, "stream": row_seed.stream},
                "analytic_only": True, "config_digest": digest,
            })
            return
        rep = runner(row_seed)
        rows.append({
            "layer_or_pair": label, "pair_kind": kind_label,
            "tested": tested, "sent": sent, "trials": rep.trials, "hits": rep.hits,
            "estimate": rep.estimate, "ci_low": rep.ci_low, "ci_high": rep.ci_high,
            "analytic": rep.analytic, "bound": rep.bound,
            "seed": {"seed": rep.seed.seed, "stream": rep.seed.stream},
            "analytic_only": False, "config_digest": digest,
        })

    for word in code.words:
        analytic = miss_analytic(word.thresholds, sigma)
        union = sum(2.0 * phi(-tau / sigma) for tau in word.thresholds)
        push(
            _word_label(word), "same_word", word.word_id, None, analytic, union,
            lambda rs, wid=word.word_id: estimate_miss(
                code, wid, sigma=sigma, trials=cfg.trials, seed=rs,
                mode=cfg.mode, workers=workers,
            ),
        )
    for tested in code.words:
        dirs = np.stack(tested.directions)
        for sent in code.words:
            if tested.word_id == sent.word_id:
                continue
            mu = dirs @ sent.vector
            analytic = false_analytic(mu, tested.radii, tested.thresholds, sigma)
            layer = first_differing_layer(code, tested.word_id, sent.word_id)
            sep = abs(float(mu[layer - 1]) - tested.radii[layer - 1])
            bound = 2.0 * phi(-(sep - tested.thresholds[layer - 1]) / sigma)
            push(
                f"{_word_label(sent)}->{_word_label(tested)}",
                f"differ_at_layer_{layer}", tested.word_id, sent.word_id,
                analytic, bound,
                lambda rs, tid=tested.word_id, sid=sent.word_id: estimate_false(
                    code, tid, sid, sigma=sigma, trials=cfg.trials, seed=rs,
                    mode=cfg.mode, workers=workers,
                ),
            )

    miss_estimates = [r["estimate"] for r in rows if r["sent"] is None and not r["analytic_only"]]
    false_estimates = [r["estimate"] for r in rows if r["sent"] is not None and not r["analytic_only"]]
    budget = None if code.channel is None else float(code.n * code.channel.power)
    max_leaf = max(float(w.vector @ w.vector) for w in code.words)
    return {
        "format": "digauss-report/1",
        "config": echo,
        "config_digest": digest,
        "codebook": {
            "kind": code.kind,
            "n": code.n,
            "depth": code.depth,
            "layer_radii": [s.radius for s in code.layers],
            "layer_thresholds": [s.threshold for s in code.layers],
            "layer_counts": list(sampled_layer_counts(code)),
            "words": len(code.words),
            "max_leaf_norm_sq": max_leaf,
            "power_budget": budget,
            "sampled": code.sampled,
            "saturated": code.saturated,
            "degenerate": code.degenerate,
        },
        "bounds": _bound_entries(cfg),
        "results": rows,
        "lambda1_hat": max(miss_estimates) if miss_estimates else None,
        "lambda2_hat": max(false_estimates) if false_estimates else None,
        "meta": {
            "tool": "digauss",
            "version": __version__,
            "elapsed_seconds": time.monotonic() - started,
        },
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _fmt_seed(seed_doc) -> str:
    return f"{seed_doc['seed']}:{seed_doc['stream']}"


def report_csv_text(report: dict) -> str:
    """Render the pinned 17-column report schema; floats carry 17 significant digits."""
    cfg = report["config"]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in report["results"]:
        writer.writerow([
            cfg["name"], cfg["kind"], _fmt(cfg["n"]), _fmt(cfg["L"]),
            _fmt(cfg["sigma"]), _fmt(cfg["P"]), _fmt(cfg["threshold"]),
            row["layer_or_pair"], row["pair_kind"], _fmt(row["trials"]),
            _fmt(row["hits"]), _fmt(row["estimate"]), _fmt(row["ci_low"]),
            _fmt(row["ci_high"]), _fmt(row["analytic"]), _fmt(row["bound"]),
            _fmt_seed(row["seed"]),
        ])
    return out.getvalue()


def parse_bounds_config(doc: dict) -> tuple[str, list[dict]]:
    """Validate a bounds config; returns (name, evaluated rows)."""
    for key in doc:
        if key not in ("name", "curves", "out_dir"):
            raise ConfigError(f"unknown config key {key!r}")
    name = doc.get("name", "bounds")
    if not isinstance(name, str) or not name:
        raise ConfigError(f"name must be a non-empty string, got {name!r}")
    curves = doc.get("curves")
    if not isinstance(curves, list) or not curves:
        raise ConfigError("bounds config needs a non-empty curves list")
    rows: list[dict] = []
    for pos, entry in enumerate(curves):
        if not isinstance(entry, dict):
            raise ConfigError(f"curves[{pos}] must be an object")
        if "bound" not in entry:
            raise ConfigError(f"curves[{pos}] needs a bound name")
        bound_name = entry["bound"]
        if bound_name not in _BOUND_KEYMAP:
            raise ConfigError(
                f"curves[{pos}]: unknown bound {bound_name!r}; known: {sorted(_BOUND_KEYMAP)}"
            )
        keymap = _BOUND_KEYMAP[bound_name]
        sweep = entry.get("sweep")
        sweep_key = None
        values = [None]
        if sweep is not None:
            if not isinstance(sweep, dict) or "param" not in sweep or "values" not in sweep:
                raise ConfigError(f"curves[{pos}]: sweep needs 'param' and 'values'")
            sweep_key = sweep["param"]
            if sweep_key not in keymap:
                raise ConfigError(
                    f"curves[{pos}]: {bound_name} has no parameter {sweep_key!r}; "
                    f"valid: {sorted(keymap)}"
                )
            values = sweep["values"]
            if not isinstance(values, list) or not values:
                raise ConfigError(f"curves[{pos}]: sweep values must be a non-empty list")
        fixed = {k: v for k, v in entry.items() if k not in ("bound", "sweep")}
        for k in fixed:
            if k not in keymap:
                raise ConfigError(
                    f"curves[{pos}]: {bound_name} has no parameter {k!r}; valid: {sorted(keymap)}"
                )
        needed = set(keymap) - set(fixed) - ({sweep_key} if sweep_key else set())
        if needed:
            raise ConfigError(f"curves[{pos}]: {bound_name} is missing {sorted(needed)}")
        if sweep_key is not None and sweep_key in fixed:
            raise ConfigError(f"curves[{pos}]: {sweep_key!r} is both fixed and swept")
        for value in values:
            params = dict(fixed)
            if sweep_key is not None:
                params[sweep_key] = value
            kwargs = {keymap[k]: v for k, v in params.items()}
            try:
                curve = evaluate_bound(bound_name, **kwargs)
            except DigaussError as exc:
                raise ConfigError(f"curves[{pos}] ({bound_name}): {exc}") from exc
            row = {k: None for k in BOUNDS_COLUMNS}
            row["name"] = bound_name
            row.update(params)
            row["value"] = curve.value
            row["label"] = curve.label
            rows.append(row)
    return name, rows


def bounds_csv_text(rows: list[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BOUNDS_COLUMNS)
    for row in rows:
        writer.writerow([row["name"]] + [_fmt(row[k]) for k in BOUNDS_COLUMNS[1:-1]] + [row["label"]])
    return out.getvalue()


_SWEEP_KEYS = frozenset(
    ["name", "n", "L", "P", "sigma", "E_grid", "K_per_layer", "trials", "seed", "mode", "out_dir"]
)


def parse_sweep_config(doc: dict) -> dict:
    """Validate a rate-reliability sweep config into a plain dict of settings."""
    for key in doc:
        if key not in _SWEEP_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    for key in ("n", "P", "sigma", "E_grid"):
        if key not in doc:
            raise ConfigError(f"sweep requires {key}")
    n = _cfg_int(doc, "n", 1)
    depth = _cfg_int(doc, "L", 1) if "L" in doc else 1
    power = _cfg_number(doc, "P")
    sigma = _cfg_number(doc, "sigma")
    grid = doc["E_grid"]
    if not isinstance(grid, list) or not grid:
        raise ConfigError("E_grid must be a non-empty list")
    e0 = exponent_cutoff(power, sigma)
    exponents = []
    for value in grid:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError(f"E_grid entries must be positive numbers, got {value!r}")
        if value > e0:
            raise ConfigError(
                f"E_grid entry {value!r} exceeds the admissible cutoff E0 = 9*P/sigma^2 = {e0!r}"
            )
        exponents.append(float(value))
    counts_raw = doc.get("K_per_layer", 2)
    if isinstance(counts_raw, int) and not isinstance(counts_raw, bool):
        counts = (counts_raw,) * depth
    elif isinstance(counts_raw, list) and len(counts_raw) == depth:
        counts = tuple(counts_raw)
    else:
        raise ConfigError(f"K_per_layer must be an integer or a list of L = {depth} entries")
    for k in counts:
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ConfigError(f"K_per_layer entries must be integers >= 1, got {k!r}")
    if math.prod(counts) < 2:
        raise ConfigError("sweep needs at least two codewords; raise K_per_layer")
    trials = _cfg_int(doc, "trials", 1) if "trials" in doc else 2000
    seed = None
    if "seed" in doc:
        if isinstance(doc["seed"], bool) or not isinstance(doc["seed"], int):
            raise ConfigError(f"seed must be an integer, got {doc['seed']!r}")
        seed = doc["seed"]
    mode = doc.get("mode", "scalar_fast")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    name = doc.get("name", "sweep")
    if not isinstance(name, str) or not name:
        raise ConfigError(f"name must be a non-empty string, got {name!r}")
    return {
        "name": name, "n": n, "L": depth, "P": power, "sigma": sigma,
        "E_grid": exponents, "K_per_layer": list(counts), "trials": trials,
        "seed": seed, "mode": mode, "out_dir": doc.get("out_dir"),
    }


def run_sweep(settings: dict, seed: int, workers: int = 1) -> dict:
    """One rate-reliability tradeoff row per exponent in the grid."""
    n = settings["n"]
    depth = settings["L"]
    power = settings["P"]
    sigma = settings["sigma"]
    counts = tuple(settings["K_per_layer"])
    base = RngSeed(seed, 0)
    echo = dict(settings)
    echo["seed"] = seed
    echo.pop("out_dir", None)
    digest = _digest(echo)
    rows = []
    for pos, exponent in enumerate(settings["E_grid"]):
        try:
            code = build_rate_reliability(
                ChannelParams(n, sigma, power), depth, exponent, counts,
                seed=substream(base, 2 * pos),
            )
        except DigaussError as exc:
            raise ConfigError(
                f"E_grid entry {exponent!r} violates a builder precondition: {exc}"
            ) from exc
        pair_seed = substream(base, 2 * pos + 1)
        result = estimate_all_pairs(
            code, sigma=sigma, trials_per_pair=settings["trials"], seed=pair_seed,
            mode=settings["mode"], workers=workers,
        )
        rows.append({
            "experiment": settings["name"], "kind": "rr", "n": n, "L": depth,
            "sigma": sigma, "P": power, "E": exponent,
            "threshold": math.sqrt(2.0 * n * exponent),
            "empirical_rate": empirical_rate(sampled_layer_counts(code), n),
            "lambda1_hat": result.lambda1_hat, "lambda2_hat": result.lambda2_hat,
            "rr_lower": rr_lower(exponent, power, sigma, depth),
            "rr_upper": rr_upper(exponent, power, sigma),
            "seed": {"seed": pair_seed.seed, "stream": pair_seed.stream},
        })
    return {"format": "digauss-sweep/1", "config": echo, "config_digest": digest, "rows": rows}


def sweep_csv_text(sweep: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in sweep["rows"]:
        writer.writerow(
            [row[k] if k in ("experiment", "kind") else
             (_fmt_seed(row[k]) if k == "seed" else _fmt(row[k]))
             for k in SWEEP_COLUMNS]
        )
    return out.getvalue()


def resolve_seed(flag_seed: int | None, config_seed: int | None) -> int:
    """Precedence: --seed flag, then config seed, then DI_GAUSS_SEED, then 0."""
    if flag_seed is not None:
        return flag_seed
    if config_seed is not None:
        return config_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return 0


def _load_config_doc(path: str | None, overrides: list[str]) -> dict:
    if path is None:
        doc = {}
    else:
        try:
            with open(path, encoding="utf-8") as handle:
                doc = json.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            doc[key] = json.loads(raw)
        except json.JSONDecodeError:
            doc[key] = raw
    return doc


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _out_dir(flag_dir: str | None, cfg_dir: str | None) -> str:
    out = flag_dir if flag_dir is not None else (cfg_dir or ".")
    os.makedirs(out, exist_ok=True)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="digauss",
        description="Layered identification codebooks over the white Gaussian channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, help_text in (
        ("construct", "build a codebook and write its JSON document"),
        ("simulate", "build, estimate all error rates, write report CSV/JSON"),
        ("bounds", "evaluate bound curves over parameter grids"),
        ("sweep", "rate-reliability tradeoff over an exponent grid"),
    ):
        cmd = sub.add_parser(command, help=help_text)
        cmd.add_argument("--config", default=None, help="JSON config document")
        cmd.add_argument("--set", action="append", default=[], dest="overrides",
                         metavar="KEY=VALUE", help="override a config key")
        cmd.add_argument("--out-dir", default=None, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="seed override")
        cmd.add_argument("--workers", type=int, default=1,
                         help="parallel workers (never changes outputs)")
        cmd.add_argument("--format", choices=("csv", "json", "both"), default="both",
                         help="report file formats")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = _load_config_doc(args.config, args.overrides)
        written: list[str] = []
        if args.command in ("construct", "simulate"):
            cfg = parse_experiment_config(doc)
            seed = resolve_seed(args.seed, cfg.seed)
            out = _out_dir(args.out_dir, cfg.out_dir)
            if args.command == "construct":
                code = build_codebook(cfg, seed)
                path = os.path.join(out, f"{cfg.name}_codebook.json")
                _write(path, to_json(code) + "\n")
                written.append(path)
            else:
                report = run_experiment(cfg, seed, workers=args.workers)
                if args.format in ("csv", "both"):
                    path = os.path.join(out, f"{cfg.name}_report.csv")
                    _write(path, report_csv_text(report))
                    written.append(path)
                if args.format in ("json", "both"):
                    path = os.path.join(out, f"{cfg.name}_report.json")
                    _write(path, dumps_17g(report) + "\n")
                    written.append(path)
        elif args.command == "bounds":
            name, rows = parse_bounds_config(doc)
            out = _out_dir(args.out_dir, doc.get("out_dir"))
            if args.format in ("csv", "both"):
                path = os.path.join(out, f"{name}_bounds.csv")
                _write(path, bounds_csv_text(rows))
                written.append(path)
            if args.format in ("json", "both"):
                path = os.path.join(out, f"{name}_bounds.json")
                _write(path, dumps_17g({"format": "digauss-bounds/1", "name": name, "rows": rows}) + "\n")
                written.append(path)
        else:
            settings = parse_sweep_config(doc)
            seed = resolve_seed(args.seed, settings["seed"])
            out = _out_dir(args.out_dir, settings.get("out_dir"))
            sweep = run_sweep(settings, seed, workers=args.workers)
            if args.format in ("csv", "both"):
                path = os.path.join(out, f"{settings['name']}_sweep.csv")
                _write(path, sweep_csv_text(sweep))
                written.append(path)
            if args.format in ("json", "both"):
                path = os.path.join(out, f"{settings['name']}_sweep.json")
                _write(path, dumps_17g(sweep) + "\n")
                written.append(path)
        for path in written:
            print(f"wrote {path}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DigaussError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
