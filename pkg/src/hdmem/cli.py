"""Command-line front end for the experiment runners and raw state ops.

Exit codes are stable API: 0 success, 1 configuration or usage error,
2 I/O or file-format error. Experiment subcommands merge three layers
of configuration, later layers winning: built-in defaults, a JSON
config file (--config), then individual flags. A seed is mandatory for
every experiment run; there is no silent default.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import (
    AlgebraParams,
    FileFormatError,
    RngStream,
    bind,
    bundle,
    distance,
    load_state,
    mean_activity,
    random_qstate,
    save_state,
)
from .experiments import (
    ConfigError,
    build_config,
    config_to_dict,
    format_csv,
    load_demo_images,
    run_context_cue,
    run_image_demo,
    run_mi_curve,
    run_order_profile,
    run_sparsity,
    run_spc,
    write_results,
)
from .info import mutual_information_approx, mutual_information_exact

__all__ = ["main", "parse_and_dispatch"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

_CANONICAL_EXPERIMENT = {
    "spc": "spc",
    "sparsity": "sparsity",
    "mi-curve": "mi_curve",
    "order": "order_profile",
    "cue": "context_cue",
    "image-demo": "image_demo",
}

_RUNNERS = {
    "spc": run_spc,
    "sparsity": run_sparsity,
    "mi_curve": run_mi_curve,
    "order_profile": run_order_profile,
    "context_cue": run_context_cue,
}


class _UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on errors; convert to an exception so
    # the dispatcher owns the exit code
    def error(self, message):
        raise _UsageError(message, self.format_usage())


def _add_experiment_flags(parser: argparse.ArgumentParser, with_images: bool) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--n", type=int, help="state dimension")
    parser.add_argument("--q", type=float, help="item activity, in (0, 0.5]")
    parser.add_argument(
        "--theta",
        type=float,
        action="append",
        help="bundling threshold in [0.5, 1); repeat to set a grid",
    )
    parser.add_argument("--seed", type=int, help="RNG seed (required)")
    parser.add_argument(
        "--list-length",
        type=int,
        action="append",
        dest="list_length",
        help="sequence length or bundle size; repeatable",
    )
    parser.add_argument("--rho-r", type=float, help="weight of the right fold")
    parser.add_argument("--rho-l", type=float, help="weight of the left fold")
    parser.add_argument("--trials", type=int, help="trials to average over")
    parser.add_argument("--mode", choices=("exact", "approx"), help="MI mode")
    parser.add_argument("--out", metavar="PATH", help="result file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="result format")
    parser.add_argument("--workers", type=int, help="worker threads for trials")
    parser.add_argument(
        "--dump-config",
        action="store_true",
        help="print the effective config as JSON and exit",
    )
    if with_images:
        parser.add_argument(
            "--images", metavar="PATH", help="IDX image file (default: built-in glyphs)"
        )
        parser.add_argument("--image-count", type=int, help="images to use")
        parser.add_argument(
            "--image-threshold", type=int, help="binarization threshold, 0..255"
        )


def build_arg_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hdmem",
        description="Binary hypervector sequence-memory experiments.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    descriptions = {
        "spc": "serial position curves of the memory readout",
        "sparsity": "bundle activity vs the closed-form prediction",
        "mi-curve": "exact vs approximate MI over perturbation strength",
        "order": "per-item MI against the left and right folds",
        "cue": "cued retrieval through three sequence encodings",
        "image-demo": "fold an image sequence and render both folds",
    }
    for name, text in descriptions.items():
        sp = sub.add_parser(name, help=text, description=text)
        _add_experiment_flags(sp, with_images=(name == "image-demo"))
    op = sub.add_parser("op", help="apply one algebra operation to state files")
    op_sub = op.add_subparsers(dest="op_name", metavar="operation", required=True)

    sp = op_sub.add_parser("random", help="draw a fresh q-state")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("-o", "--out", required=True, metavar="PATH")

    sp = op_sub.add_parser("bind", help="component-wise XNOR of two states")
    sp.add_argument("state_a")
    sp.add_argument("state_b")
    sp.add_argument("-o", "--out", required=True, metavar="PATH")

    sp = op_sub.add_parser("bundle", help="stochastic superposition of two states")
    sp.add_argument("state_a")
    sp.add_argument("state_b")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("-o", "--out", required=True, metavar="PATH")

    sp = op_sub.add_parser("distance", help="normed Hamming distance")
    sp.add_argument("state_a")
    sp.add_argument("state_b")

    sp = op_sub.add_parser("activity", help="fraction of set bits")
    sp.add_argument("state_a")

    sp = op_sub.add_parser("mi", help="mutual information in nats")
    sp.add_argument("state_a")
    sp.add_argument("state_b")
    sp.add_argument("--mode", choices=("exact", "approx"), default="exact")
    sp.add_argument("--q", type=float, help="activity parameter for approx mode")
    return parser


def _load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    schema = data.get("schema", 1)
    if schema != 1:
        raise ConfigError(
            f"config file {path}: unsupported schema {schema!r}, expected 1"
        )
    return {k: v for k, v in data.items() if k not in ("schema", "experiment")}


def _flag_overrides(ns: argparse.Namespace) -> dict:
    overrides = {
        "n": ns.n,
        "q": ns.q,
        "seed": ns.seed,
        "list_lengths": ns.list_length,
        "rho_r": ns.rho_r,
        "rho_l": ns.rho_l,
        "trials": ns.trials,
        "mode": ns.mode,
        "out": ns.out,
        "format": ns.format,
        "workers": ns.workers,
        "images": getattr(ns, "images", None),
        "image_count": getattr(ns, "image_count", None),
        "image_threshold": getattr(ns, "image_threshold", None),
    }
    if ns.theta:
        overrides["theta"] = ns.theta[0]
        overrides["thetas"] = list(ns.theta)
    return {k: v for k, v in overrides.items() if v is not None}


def _run_experiment(ns: argparse.Namespace) -> int:
    experiment = _CANONICAL_EXPERIMENT[ns.command]
    overrides = {}
    if ns.config:
        overrides.update(_load_config_file(ns.config))
    overrides.update(_flag_overrides(ns))
    config = build_config(experiment, overrides)
    if ns.dump_config:
        print(json.dumps(config_to_dict(config), indent=2, sort_keys=True))
        return EXIT_OK
    if experiment == "image_demo":
        table = run_image_demo(config, load_demo_images(config))
    else:
        table = _RUNNERS[experiment](config)
    if config.output_path:
        write_results(table, config.output_path, config.output_format)
    else:
        sys.stdout.write(format_csv(table))
    return EXIT_OK


def _run_op(ns: argparse.Namespace) -> int:
    name = ns.op_name
    if name == "random":
        params = AlgebraParams(dimension=ns.n, q=ns.q, theta=0.5, seed=ns.seed)
        state = random_qstate(params, RngStream(ns.seed))
        save_state(state, ns.out)
        return EXIT_OK
    if name == "activity":
        print(format(mean_activity(load_state(ns.state_a)), ".6g"))
        return EXIT_OK
    a = load_state(ns.state_a)
    b = load_state(ns.state_b)
    if name == "bind":
        save_state(bind(a, b), ns.out)
    elif name == "bundle":
        save_state(bundle(a, b, ns.theta, RngStream(ns.seed)), ns.out)
    elif name == "distance":
        print(format(distance(a, b), ".6g"))
    elif name == "mi":
        if ns.mode == "approx":
            if ns.q is None:
                raise ConfigError("approx mode requires --q")
            value = mutual_information_approx(a, b, ns.q)
        else:
            value = mutual_information_exact(a, b)
        print(format(value, ".6g"))
    return EXIT_OK


def parse_and_dispatch(argv: list[str]) -> int:
    """Parse arguments and run; returns the process exit code."""
    parser = build_arg_parser()
    if not argv:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    try:
        ns = parser.parse_args(argv)
        if ns.command == "op":
            return _run_op(ns)
        return _run_experiment(ns)
    except _UsageError as exc:
        sys.stderr.write(exc.usage)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv: list[str] | None = None) -> int:
    return parse_and_dispatch(list(sys.argv[1:]) if argv is None else list(argv))
