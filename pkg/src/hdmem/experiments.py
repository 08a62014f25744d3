"""Seeded, figure-level experiments over the state algebra.

Every runner takes an :class:`ExperimentConfig` and returns a
:class:`ResultTable` whose metadata embeds the full config, so each
output file describes the run that produced it. Trials draw from
disjoint random streams keyed by trial index and are aggregated in
index order after collection, which makes result rows byte-identical
for a given seed no matter how many worker threads execute them.

Runners:

* ``run_sparsity``       activity of iterated bundles of dense items
                         against the closed-form recursion and the
                         asymptote
* ``run_mi_curve``       exact vs quadratic-approximation MI as a
                         function of the flipped-bit fraction
* ``run_spc``            per-position MI of the left, right and
                         weighted memory readouts (serial position
                         curves)
* ``run_order_profile``  MI of each sequence item against both folds,
                         including variants where one item is a
                         perturbed copy of an earlier one
* ``run_context_cue``    cue-based retrieval through position-marker,
                         chaining and bound-context encodings
* ``run_image_demo``     both folds over a short image sequence, with
                         per-item profiles and rendered fold bitmaps
"""

from __future__ import annotations

import csv
import io
import json
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    AlgebraParams,
    RngStream,
    State,
    asymptotic_activity,
    bind,
    bundle,
    expected_bundle_activity,
    mean_activity,
    perturb,
    random_qstate,
)
from .images import BitImage, demo_glyphs, ingest_idx_images, write_pgm
from .info import (
    mutual_information_approx,
    mutual_information_exact,
)
from .sequences import (
    cue,
    encode_chaining,
    encode_position_markers,
    l_state,
    memory_state,
    r_state,
)

__all__ = [
    "CONFIG_SCHEMA_VERSION",
    "ConfigError",
    "ExperimentConfig",
    "ResultTable",
    "build_config",
    "config_from_dict",
    "config_to_dict",
    "format_csv",
    "read_results_json",
    "run_context_cue",
    "run_image_demo",
    "run_mi_curve",
    "run_order_profile",
    "run_sparsity",
    "run_spc",
    "spearman",
    "write_results",
]

CONFIG_SCHEMA_VERSION = 1

EXPERIMENTS = (
    "sparsity",
    "mi_curve",
    "spc",
    "order_profile",
    "context_cue",
    "image_demo",
)

_SEQUENCE_EXPERIMENTS = ("sparsity", "spc", "order_profile")


class ConfigError(ValueError):
    """An experiment configuration is invalid or incomplete."""


@dataclass
class ExperimentConfig:
    """One experiment run: algebra parameters plus harness knobs.

    ``list_lengths`` doubles as the bundle-size grid for the sparsity
    experiment. Parameter ranges follow the regime the experiments are
    defined in (0 < q <= 1/2, 1/2 <= theta < 1); the library itself
    accepts the full [0, 1] ranges.
    """

    experiment: str
    params: AlgebraParams
    list_lengths: list[int] = field(default_factory=lambda: [10])
    thetas: list[float] = field(default_factory=lambda: [0.5, 0.6, 0.75, 0.9])
    rho_r: float = 1.0
    rho_l: float = 1.0
    trials: int = 10
    mode: str = "exact"
    output_path: str | None = None
    output_format: str = "csv"
    workers: int = 1
    image_path: str | None = None
    image_count: int = 6
    image_threshold: int = 128

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"experiment must be one of {', '.join(EXPERIMENTS)}, "
                f"got {self.experiment!r}"
            )
        if not 0.0 < self.params.q <= 0.5:
            raise ConfigError(f"q must be in (0, 0.5], got {self.params.q}")
        if not 0.5 <= self.params.theta < 1.0:
            raise ConfigError(
                f"theta must be in [0.5, 1), got {self.params.theta}"
            )
        for theta in self.thetas:
            if not 0.5 <= theta < 1.0:
                raise ConfigError(f"theta must be in [0.5, 1), got {theta}")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.mode not in ("exact", "approx"):
            raise ConfigError(f"mode must be 'exact' or 'approx', got {self.mode!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(
                f"format must be 'csv' or 'json', got {self.output_format!r}"
            )
        for rho_name, rho in (("rho_r", self.rho_r), ("rho_l", self.rho_l)):
            if not 0.0 <= rho <= 1.0:
                raise ConfigError(f"{rho_name} must be in [0, 1], got {rho}")
        if self.experiment in _SEQUENCE_EXPERIMENTS:
            if not self.list_lengths:
                raise ConfigError(
                    f"list_lengths must be non-empty for {self.experiment}"
                )
        for length in self.list_lengths:
            if length < 1:
                raise ConfigError(f"list lengths must be positive, got {length}")
        if self.experiment == "sparsity" and not self.thetas:
            raise ConfigError("thetas must be non-empty for sparsity")
        if not 0 <= self.image_threshold <= 255:
            raise ConfigError(
                f"image threshold must be in [0, 255], got {self.image_threshold}"
            )
        if self.image_count < 2:
            raise ConfigError(
                f"image count must be at least 2, got {self.image_count}"
            )


@dataclass
class ResultTable:
    """Rectangular results plus self-describing metadata.

    ``metadata`` always embeds the full config of the producing run;
    an optional ``metadata["plot"]`` entry ({"x", "series", "group"})
    tells the writer how to lay out the long-form plot file.
    """

    columns: list[str]
    rows: list[list]
    metadata: dict

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def select(self, **filters) -> "ResultTable":
        """Rows whose cells equal every given column=value filter."""
        idx = {name: self.columns.index(name) for name in filters}
        rows = [
            row
            for row in self.rows
            if all(row[idx[name]] == want for name, want in filters.items())
        ]
        return ResultTable(self.columns, rows, self.metadata)


# ---------------------------------------------------------------------------
# config plumbing

_COMMON_DEFAULTS = {
    "n": 10000,
    "q": 1.0 / 3.0,
    "theta": 0.5,
    "seed": None,
    "list_lengths": [10],
    "thetas": [0.5, 0.6, 0.75, 0.9],
    "rho_r": 1.0,
    "rho_l": 1.0,
    "trials": 10,
    "mode": "exact",
    "out": None,
    "format": "csv",
    "workers": 1,
    "images": None,
    "image_count": 6,
    "image_threshold": 128,
}

# per-experiment defaults where the common ones do not fit the figure.
# context_cue runs dense: at q = 1/2 a bind of independent states is
# pairwise independent of its factors, so cueing carries no parasitic
# correlation between a probe-bound marker and the term that shares it;
# at sparser q that correlation rivals the decayed true signal
_EXPERIMENT_DEFAULTS = {
    "mi_curve": {"q": 0.5},
    "context_cue": {"q": 0.5},
    "sparsity": {"list_lengths": list(range(1, 13)) + [50]},
    "spc": {"list_lengths": [10, 15]},
}


def build_config(experiment: str, overrides: dict) -> ExperimentConfig:
    """Merge defaults with override values (schema key names) and validate.

    Overrides with value None count as absent. A seed must be supplied;
    there is no default seed.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}"
        )
    merged = dict(_COMMON_DEFAULTS)
    merged.update(_EXPERIMENT_DEFAULTS.get(experiment, {}))
    unknown = set(overrides) - set(_COMMON_DEFAULTS) - {"schema", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if merged["seed"] is None:
        raise ConfigError("a seed is required for experiment runs")
    if not 0.0 < merged["q"] <= 0.5:
        raise ConfigError(f"q must be in (0, 0.5], got {merged['q']}")
    if not 0.5 <= merged["theta"] < 1.0:
        raise ConfigError(f"theta must be in [0.5, 1), got {merged['theta']}")
    if merged["n"] < 1:
        raise ConfigError(f"n must be positive, got {merged['n']}")
    params = AlgebraParams(
        dimension=int(merged["n"]),
        q=float(merged["q"]),
        theta=float(merged["theta"]),
        seed=int(merged["seed"]),
    )
    config = ExperimentConfig(
        experiment=experiment,
        params=params,
        list_lengths=[int(v) for v in merged["list_lengths"]],
        thetas=[float(v) for v in merged["thetas"]],
        rho_r=float(merged["rho_r"]),
        rho_l=float(merged["rho_l"]),
        trials=int(merged["trials"]),
        mode=str(merged["mode"]),
        output_path=merged["out"],
        output_format=str(merged["format"]),
        workers=int(merged["workers"]),
        image_path=merged["images"],
        image_count=int(merged["image_count"]),
        image_threshold=int(merged["image_threshold"]),
    )
    config.validate()
    return config


def config_to_dict(config: ExperimentConfig) -> dict:
    """The config as the documented JSON schema (version 1)."""
    return {
        "schema": CONFIG_SCHEMA_VERSION,
        "experiment": config.experiment,
        "n": config.params.dimension,
        "q": config.params.q,
        "theta": config.params.theta,
        "seed": config.params.seed,
        "list_lengths": list(config.list_lengths),
        "thetas": list(config.thetas),
        "rho_r": config.rho_r,
        "rho_l": config.rho_l,
        "trials": config.trials,
        "mode": config.mode,
        "out": config.output_path,
        "format": config.output_format,
        "workers": config.workers,
        "images": config.image_path,
        "image_count": config.image_count,
        "image_threshold": config.image_threshold,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Parse a schema-version-1 config dict (e.g. a loaded config file)."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    schema = data.get("schema", CONFIG_SCHEMA_VERSION)
    if schema != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported config schema {schema!r}, expected {CONFIG_SCHEMA_VERSION}"
        )
    experiment = data.get("experiment")
    if experiment is None:
        raise ConfigError("config is missing the 'experiment' key")
    overrides = {k: v for k, v in data.items() if k not in ("schema", "experiment")}
    return build_config(experiment, overrides)


# ---------------------------------------------------------------------------
# trial scheduling

def _run_trials(trials: int, workers: int, fn):
    # map() preserves input order, so aggregation order never depends
    # on completion order
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _build_version() -> str:
    root = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=root,
            capture_output=True,
            text=True,
            timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    return f"hdmem-{__version__}"


def _metadata(config: ExperimentConfig) -> dict:
    return {
        "experiment": config.experiment,
        "seed": config.params.seed,
        "params": {
            "dimension": config.params.dimension,
            "q": config.params.q,
            "theta": config.params.theta,
            "seed": config.params.seed,
        },
        "config": config_to_dict(config),
        "build": _build_version(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _mi(config: ExperimentConfig, container: State, item: State) -> float:
    if config.mode == "approx":
        return mutual_information_approx(container, item, config.params.q)
    return mutual_information_exact(container, item)


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


# ---------------------------------------------------------------------------
# runners

def run_sparsity(config: ExperimentConfig) -> ResultTable:
    """Activity of iterated left-fold bundles of dense items.

    Items are i.i.d. dense states (activity 1/2) regardless of the
    configured q; ``list_lengths`` provides the bundle sizes to report.
    Each row carries the measured activity next to the closed-form
    prediction and the infinite-bundle asymptote.
    """
    config.validate()
    ks = sorted(set(config.list_lengths))
    k_max = ks[-1]
    rows: list[list] = []
    for ti, theta in enumerate(config.thetas):
        dense = replace(config.params, q=0.5, theta=theta)

        def trial(t: int, theta: float = theta, ti: int = ti) -> dict[int, float]:
            base = RngStream(config.params.seed, (ti, t))
            items_rng = base.derive(0)
            noise_rng = base.derive(1)
            acc = random_qstate(dense, items_rng)
            activities = {1: mean_activity(acc)}
            for k in range(2, k_max + 1):
                item = random_qstate(dense, items_rng)
                acc = bundle(acc, item, theta, noise_rng)
                if k in ks:
                    activities[k] = mean_activity(acc)
            return activities

        per_trial = _run_trials(config.trials, config.workers, trial)
        for k in ks:
            measured = _mean(p[k] for p in per_trial)
            rows.append(
                [
                    float(theta),
                    int(k),
                    float(measured),
                    float(expected_bundle_activity(k, theta)),
                    float(asymptotic_activity(0.5, theta)),
                ]
            )
    metadata = _metadata(config)
    metadata["plot"] = {"x": "k", "series": ["activity", "predicted"], "group": ["theta"]}
    return ResultTable(
        ["theta", "k", "activity", "predicted", "asymptote"], rows, metadata
    )


def run_mi_curve(config: ExperimentConfig) -> ResultTable:
    """Exact vs approximate MI of a state and its perturbation.

    Sweeps the flip probability over [0, 1] in steps of 0.05. The
    approximation is reported twice: with the configured q and with q
    re-estimated from the sampled states.
    """
    config.validate()
    eps_grid = [i / 20 for i in range(21)]

    def trial(t: int) -> list[tuple[float, float, float]]:
        base = RngStream(config.params.seed, (t,))
        out = []
        for ei, eps in enumerate(eps_grid):
            x = random_qstate(config.params, base.derive(ei, 0))
            y = perturb(x, eps, base.derive(ei, 1))
            exact = mutual_information_exact(x, y)
            approx = mutual_information_approx(x, y, config.params.q)
            q_est = 0.5 * (mean_activity(x) + mean_activity(y))
            # guard against degenerate all-zero/all-one draws
            q_est = min(max(q_est, 1e-9), 1.0 - 1e-9)
            approx_est = mutual_information_approx(x, y, q_est)
            out.append((exact, approx, approx_est))
        return out

    per_trial = _run_trials(config.trials, config.workers, trial)
    rows = []
    for ei, eps in enumerate(eps_grid):
        rows.append(
            [
                float(eps),
                float(_mean(p[ei][0] for p in per_trial)),
                float(_mean(p[ei][1] for p in per_trial)),
                float(_mean(p[ei][2] for p in per_trial)),
            ]
        )
    metadata = _metadata(config)
    metadata["plot"] = {
        "x": "epsilon",
        "series": ["mi_exact", "mi_approx", "mi_approx_qest"],
        "group": [],
    }
    return ResultTable(
        ["epsilon", "mi_exact", "mi_approx", "mi_approx_qest"], rows, metadata
    )


def run_spc(config: ExperimentConfig) -> ResultTable:
    """Serial position curves: per-position MI of L, R and the readout.

    The readout column is rho_r * I(R; item) + rho_l * I(L; item) with
    the configured weights.
    """
    config.validate()
    rows: list[list] = []
    for li, length in enumerate(config.list_lengths):

        def trial(t: int, length: int = length, li: int = li):
            base = RngStream(config.params.seed, (li, t))
            items_rng = base.derive(0)
            items = [random_qstate(config.params, items_rng) for _ in range(length)]
            eta = random_qstate(config.params, base.derive(1))
            memory = memory_state(items, eta, config.params, base.derive(2))
            out = []
            for item in items:
                mi_l = _mi(config, memory.left, item)
                mi_r = _mi(config, memory.right, item)
                out.append((mi_l, mi_r, config.rho_r * mi_r + config.rho_l * mi_l))
            return out

        per_trial = _run_trials(config.trials, config.workers, trial)
        for pos in range(length):
            rows.append(
                [
                    int(length),
                    pos + 1,
                    float(_mean(p[pos][0] for p in per_trial)),
                    float(_mean(p[pos][1] for p in per_trial)),
                    float(_mean(p[pos][2] for p in per_trial)),
                ]
            )
    metadata = _metadata(config)
    metadata["plot"] = {
        "x": "position",
        "series": ["mi_left", "mi_right", "mi_memory"],
        "group": ["length"],
    }
    return ResultTable(
        ["length", "position", "mi_left", "mi_right", "mi_memory"], rows, metadata
    )


# similar-item variants: (name, source position, target position), both
# 1-based; the target item becomes perturb(source item, 0.1)
_ORDER_VARIANTS = (("iid", None, None), ("D~F", 4, 6), ("C~F", 3, 6))


def run_order_profile(config: ExperimentConfig) -> ResultTable:
    """Per-item MI against both folds, with similar-item variants.

    All variants of one trial share the same base items, medium state
    and fold noise, so the variant curves differ only through the
    replaced item.
    """
    config.validate()
    length = config.list_lengths[0]
    variants = [
        (name, src, dst)
        for name, src, dst in _ORDER_VARIANTS
        if src is None or dst <= length
    ]
    if length <= 26:
        labels = [chr(ord("A") + i) for i in range(length)]
    else:
        labels = [f"I{i + 1}" for i in range(length)]

    def trial(t: int):
        base = RngStream(config.params.seed, (t,))
        items_rng = base.derive(0)
        items = [random_qstate(config.params, items_rng) for _ in range(length)]
        eta = random_qstate(config.params, base.derive(1))
        out = []
        for vi, (_, src, dst) in enumerate(variants):
            seq = list(items)
            if src is not None:
                seq[dst - 1] = perturb(items[src - 1], 0.1, base.derive(3, vi))
            memory = memory_state(seq, eta, config.params, base.derive(2, vi))
            out.append(
                [
                    (_mi(config, memory.left, it), _mi(config, memory.right, it))
                    for it in seq
                ]
            )
        return out

    per_trial = _run_trials(config.trials, config.workers, trial)
    rows: list[list] = []
    for vi, (name, _, _) in enumerate(variants):
        for pos in range(length):
            rows.append(
                [
                    name,
                    pos + 1,
                    labels[pos],
                    float(_mean(p[vi][pos][0] for p in per_trial)),
                    float(_mean(p[vi][pos][1] for p in per_trial)),
                ]
            )
    metadata = _metadata(config)
    metadata["plot"] = {
        "x": "position",
        "series": ["mi_left", "mi_right"],
        "group": ["variant"],
    }
    return ResultTable(
        ["variant", "position", "label", "mi_left", "mi_right"], rows, metadata
    )


_ITEM_LABELS = ("a", "b", "c", "d", "e")
_CONTEXT_LABELS = ("k", "l", "m", "n")
# item i of the bound-context sequence is bound to this context index;
# the second context appears under items 2 and 4
_CONTEXT_OF_ITEM = (0, 1, 2, 1, 3)


def run_context_cue(config: ExperimentConfig) -> ResultTable:
    """Cue-based retrieval through three encodings of a 5-item sequence.

    Profiles emitted, every one under the left fold unless stated:

    * position markers, cued by item b: MI over the five markers
    * position markers, cued by a fresh unrelated item: same candidates
    * chaining, cued by item b: MI over the five items
    * bound contexts (contexts k,l,m,l,n bound to items a..e), cued by
      the repeated context l, under both folds: MI over the five items

    Rows are ranked per profile by trial-averaged MI.
    """
    config.validate()
    n_items = len(_ITEM_LABELS)
    theta = config.params.theta

    def trial(t: int) -> dict[tuple[str, str, str, str], float]:
        base = RngStream(config.params.seed, (t,))
        items_rng = base.derive(0)
        items = [random_qstate(config.params, items_rng) for _ in range(n_items)]
        markers_rng = base.derive(1)
        markers = [random_qstate(config.params, markers_rng) for _ in range(n_items)]
        contexts_rng = base.derive(2)
        contexts = [
            random_qstate(config.params, contexts_rng)
            for _ in range(len(_CONTEXT_LABELS))
        ]
        eta = random_qstate(config.params, base.derive(3))
        out: dict[tuple[str, str, str, str], float] = {}

        encoded = encode_position_markers(
            items, markers, eta, theta, base.derive(4), labels=list(_ITEM_LABELS)
        )
        probe = cue(encoded.state, items[1])
        for j, marker in enumerate(markers):
            out[("marker", "left", "b", f"m{j + 1}")] = _mi(config, probe, marker)
        novel = random_qstate(config.params, base.derive(5))
        probe = cue(encoded.state, novel)
        for j, marker in enumerate(markers):
            out[("marker", "left", "novel", f"m{j + 1}")] = _mi(config, probe, marker)

        chained = encode_chaining(
            items, eta, theta, base.derive(6), labels=list(_ITEM_LABELS)
        )
        probe = cue(chained.state, items[1])
        for j, label in enumerate(_ITEM_LABELS):
            out[("chaining", "left", "b", label)] = _mi(config, probe, items[j])

        terms = [bind(item, contexts[ci]) for item, ci in zip(items, _CONTEXT_OF_ITEM)]
        folds = (
            ("left", l_state(terms, eta, theta, base.derive(7))),
            ("right", r_state(terms, eta, theta, base.derive(8))),
        )
        for fold_name, state in folds:
            probe = cue(state, contexts[1])
            for j, label in enumerate(_ITEM_LABELS):
                out[("bound-context", fold_name, "l", label)] = _mi(
                    config, probe, items[j]
                )
        return out

    per_trial = _run_trials(config.trials, config.workers, trial)
    averaged = {
        key: _mean(p[key] for p in per_trial) for key in per_trial[0]
    }
    profiles: dict[tuple[str, str, str], list[tuple[str, float]]] = {}
    for (scheme, fold, cue_label, label), value in averaged.items():
        profiles.setdefault((scheme, fold, cue_label), []).append((label, value))
    rows: list[list] = []
    for (scheme, fold, cue_label), entries in profiles.items():
        entries.sort(key=lambda pair: (-pair[1], pair[0]))
        for rank, (label, value) in enumerate(entries, start=1):
            rows.append([scheme, fold, cue_label, rank, label, float(value)])
    metadata = _metadata(config)
    metadata["plot"] = {
        "x": "rank",
        "series": ["mi"],
        "group": ["scheme", "fold", "cue"],
    }
    return ResultTable(
        ["scheme", "fold", "cue", "rank", "label", "mi"], rows, metadata
    )


def run_image_demo(config: ExperimentConfig, images: list[BitImage]) -> ResultTable:
    """Fold a short image sequence both ways and profile every item.

    Runs at the configured theta and at theta = 0, for the image states
    and for an i.i.d. random sequence of the same length. When the
    config has an output path, the trial-0 fold states of the image
    sequence are rendered next to it as PGM bitmaps (recorded under
    metadata["bitmaps"]).
    """
    config.validate()
    if len(images) < 2:
        raise ValueError(f"need at least 2 images, got {len(images)}")
    width, height = images[0].width, images[0].height
    for img in images:
        if (img.width, img.height) != (width, height):
            raise ValueError(
                f"image size mismatch: {img.width}x{img.height} "
                f"vs {width}x{height}"
            )
    params = replace(config.params, dimension=width * height)
    image_states = [img.to_state() for img in images]
    count = len(images)
    thetas = [config.params.theta]
    if config.params.theta != 0.0:
        thetas.append(0.0)

    rows: list[list] = []
    bitmaps: list[str] = []
    for si, source in enumerate(("image", "random")):
        for thi, theta in enumerate(thetas):
            fold_params = replace(params, theta=theta)

            def trial(t: int, si: int = si, thi: int = thi, source: str = source,
                      fold_params: AlgebraParams = fold_params):
                base = RngStream(config.params.seed, (si, thi, t))
                if source == "image":
                    items = image_states
                else:
                    items_rng = base.derive(0)
                    items = [random_qstate(params, items_rng) for _ in range(count)]
                eta = random_qstate(params, base.derive(1))
                memory = memory_state(items, eta, fold_params, base.derive(2))
                mis = [
                    (_mi(config, memory.left, it), _mi(config, memory.right, it))
                    for it in items
                ]
                return memory, mis

            per_trial = _run_trials(config.trials, config.workers, trial)
            for pos in range(count):
                rows.append(
                    [
                        source,
                        float(theta),
                        pos + 1,
                        f"{source}{pos + 1}",
                        float(_mean(p[1][pos][0] for p in per_trial)),
                        float(_mean(p[1][pos][1] for p in per_trial)),
                    ]
                )
            if source == "image" and config.output_path:
                stem = Path(config.output_path)
                stem = stem.with_name(stem.stem)
                memory = per_trial[0][0]
                for side, state in (("L", memory.left), ("R", memory.right)):
                    out_path = Path(f"{stem}-{side}-theta{theta:g}.pgm")
                    write_pgm(BitImage.from_state(state, width, height), out_path)
                    bitmaps.append(str(out_path))

    metadata = _metadata(config)
    metadata["plot"] = {
        "x": "position",
        "series": ["mi_left", "mi_right"],
        "group": ["source", "theta"],
    }
    if bitmaps:
        metadata["bitmaps"] = bitmaps
    return ResultTable(
        ["source", "theta", "position", "label", "mi_left", "mi_right"],
        rows,
        metadata,
    )


def load_demo_images(config: ExperimentConfig) -> list[BitImage]:
    """The image sequence for run_image_demo: ingested or built-in glyphs."""
    if config.image_path:
        return ingest_idx_images(
            config.image_path, config.image_threshold, config.image_count
        )
    return demo_glyphs(config.image_count)


# ---------------------------------------------------------------------------
# ranking helpers

def _ranks(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    _, inverse, counts = np.unique(arr, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    # tied values share the mean of the ranks they span
    average = (starts + ends - 1) / 2.0 + 1.0
    return average[inverse]


def spearman(xs, ys) -> float:
    """Spearman rank correlation with average ranks for ties."""
    xr = _ranks(xs)
    yr = _ranks(ys)
    if len(xr) != len(yr):
        raise ValueError(f"length mismatch: {len(xr)} vs {len(yr)}")
    if len(xr) < 2 or np.all(xr == xr[0]) or np.all(yr == yr[0]):
        raise ValueError("need at least two distinct values per side")
    return float(np.corrcoef(xr, yr)[0, 1])


# ---------------------------------------------------------------------------
# result emission

def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def _check_rectangular(table: ResultTable) -> None:
    width = len(table.columns)
    for row in table.rows:
        if len(row) != width:
            raise ValueError(
                f"row of width {len(row)} in a table of {width} columns"
            )


def _write_csv_stream(table: ResultTable, fh) -> None:
    for key, value in table.metadata.items():
        fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(fh)
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format_cell(cell) for cell in row])


def format_csv(table: ResultTable) -> str:
    """The table as CSV text (metadata as leading '#' comment lines)."""
    _check_rectangular(table)
    buffer = io.StringIO(newline="")
    _write_csv_stream(table, buffer)
    return buffer.getvalue()


def _write_json_stream(table: ResultTable, fh) -> None:
    payload = {
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": table.rows,
    }
    json.dump(payload, fh, indent=2)
    fh.write("\n")


def _write_plot_stream(table: ResultTable, fh) -> None:
    plot = table.metadata.get("plot")
    index = {name: i for i, name in enumerate(table.columns)}
    writer = csv.writer(fh)
    writer.writerow(["x", "series", "y"])
    if not plot:
        return
    group_cols = plot.get("group") or []
    for row in table.rows:
        prefix = ";".join(
            f"{col}={_format_cell(row[index[col]])}" for col in group_cols
        )
        for series_col in plot["series"]:
            name = f"{prefix}:{series_col}" if prefix else series_col
            writer.writerow(
                [
                    _format_cell(row[index[plot["x"]]]),
                    name,
                    _format_cell(row[index[series_col]]),
                ]
            )


def plot_path_for(path) -> Path:
    return Path(path).with_suffix(".plot.csv")


def write_results(table: ResultTable, path, output_format: str = "csv") -> None:
    """Write a table as CSV or JSON, plus the adjacent long-form plot file.

    CSV cells use 6 significant digits with '.' as the decimal
    separator regardless of locale; JSON keeps full float precision and
    round-trips through :func:`read_results_json`.
    """
    _check_rectangular(table)
    if output_format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {output_format!r}")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if output_format == "csv":
                _write_csv_stream(table, fh)
            else:
                _write_json_stream(table, fh)
        with open(plot_path_for(path), "w", newline="", encoding="utf-8") as fh:
            _write_plot_stream(table, fh)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results_json(path) -> ResultTable:
    """Read a table written by write_results in JSON format."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return ResultTable(payload["columns"], payload["rows"], payload["metadata"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a result table") from exc
