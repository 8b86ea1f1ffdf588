"""Command-line interface.

Settings resolve in three layers: built-in defaults, then a flat JSON
config file (``--config``; keys are the long flag names, with ``-`` or
``_``), then explicit flags. Exit status is 0 on success, 2 for
configuration errors and 3 for data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from . import __version__
from .data import (
    read_detections,
    read_series,
    read_windows,
    write_detections,
    write_sweep,
)
from .detect import DetectorConfig, run
from .encode import AdaptiveEncoder, GrfEncoder, RateSample
from .errors import ConfigError, DataError, InputDomainError
from .evaluate import best_row, default_alphas, score, sweep
from .neuron import generate_spikes

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

DETECTOR_FLAGS = {
    # flag name -> (DetectorConfig field, type)
    "n-inputs": ("n_inputs", int),
    "interval-ms": ("interval_ms", float),
    "theta-mv": ("theta_mv", float),
    "tau-ms": ("tau_ms", float),
    "rho-max": ("rho_max", float),
    "weight": ("weight", float),
    "gain-mv": ("gain_mv", float),
    "v-reset-mv": ("v_reset_mv", float),
    "tracker": ("tracker", str),
    "alpha": ("alpha", float),
    "window-k": ("window_k", int),
    "warmup": ("warmup", int),
    "epsilon-sd": ("epsilon_sd", float),
    "spike-mode": ("spike_mode", str),
    "seed": ("seed", int),
}
BOOL_FLAGS = {
    # flag name -> (field, value stored when the flag is given)
    "no-leak": ("leak", False),
    "reset-membrane": ("carry_membrane", False),
}
IO_FLAGS = ("input", "labels", "dataset-key", "out", "alphas", "workers", "spikes",
            "constant-rate")


class _Usage(Exception):
    pass


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("detector")
    for flag, (_field, typ) in DETECTOR_FLAGS.items():
        kw = {"type": typ, "default": argparse.SUPPRESS}
        if flag == "tracker":
            kw["choices"] = ["ewma", "windowed", "cumulative"]
        if flag == "spike-mode":
            kw["choices"] = ["deterministic", "poisson"]
        g.add_argument(f"--{flag}", **kw)
    g.add_argument("--no-leak", action="store_true", default=argparse.SUPPRESS,
                   help="output neuron without leak (pure integrate-and-fire)")
    g.add_argument("--reset-membrane", action="store_true", default=argparse.SUPPRESS,
                   help="reset the output membrane at the start of every data point")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON config file")
    p.add_argument("--print-config", action="store_true",
                   help="print the resolved configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikeanomaly",
        description="Adaptive spike encoding and streaming anomaly detection.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run the detector over a series CSV")
    _add_common(p)
    p.add_argument("--input", default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS)
    p.add_argument("--labels", default=argparse.SUPPRESS)
    p.add_argument("--dataset-key", default=argparse.SUPPRESS)
    _add_detector_flags(p)

    p = sub.add_parser("sweep", help="score the detector over a grid of alpha values")
    _add_common(p)
    p.add_argument("--input", default=argparse.SUPPRESS)
    p.add_argument("--labels", default=argparse.SUPPRESS)
    p.add_argument("--dataset-key", default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS)
    p.add_argument("--alphas", default=argparse.SUPPRESS,
                   help="comma-separated grid (default 0.0005..0.05 step 0.0005)")
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    _add_detector_flags(p)

    p = sub.add_parser("encode", help="trace the adaptive encoder over a series")
    _add_common(p)
    p.add_argument("--input", default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS)
    p.add_argument("--spikes", action="store_true", default=argparse.SUPPRESS,
                   help="emit 'source<TAB>time_ms' spike trace instead of the table")
    p.add_argument("--constant-rate", type=float, default=argparse.SUPPRESS,
                   help="debug: bypass the encoder and use this normalised rate")
    _add_detector_flags(p)

    p = sub.add_parser("grf-encode", help="Gaussian receptive field latencies for one value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--min", type=float, required=True, dest="x_min")
    p.add_argument("--max", type=float, required=True, dest="x_max")
    p.add_argument("--beta", type=float, default=1.5)
    p.add_argument("--value", type=float, required=True)
    p.add_argument("--theta-latency", type=float, default=0.9)
    p.add_argument("--interval-ms", type=float, default=10.0)
    p.add_argument("--spikes", action="store_true")

    p = sub.add_parser("score", help="re-score a detection CSV against labels")
    p.add_argument("--detections", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--dataset-key")
    return parser


def _normalise_key(key: str) -> str:
    return key.replace("_", "-")


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags into one flat settings dict."""
    allowed = set(DETECTOR_FLAGS) | set(BOOL_FLAGS) | set(IO_FLAGS)
    settings: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
        for k, v in doc.items():
            nk = _normalise_key(k)
            if nk not in allowed:
                raise ConfigError(f"{args.config}: unknown key {k!r}")
            settings[nk] = v
    for k, v in vars(args).items():
        nk = _normalise_key(k)
        if nk in allowed:
            settings[nk] = v
    return settings


def detector_config(settings: dict) -> DetectorConfig:
    kw = {}
    for flag, (name, typ) in DETECTOR_FLAGS.items():
        if flag in settings and settings[flag] is not None:
            try:
                kw[name] = typ(settings[flag])
            except (TypeError, ValueError):
                raise ConfigError(f"{flag}: cannot convert {settings[flag]!r}") from None
        elif flag in settings:
            kw[name] = None
    for flag, (name, value) in BOOL_FLAGS.items():
        if settings.get(flag):
            kw[name] = value
    if kw.get("tracker", "ewma") != "ewma" and "alpha" not in kw:
        kw["alpha"] = None
    return DetectorConfig(**kw)


def _require(settings: dict, key: str) -> str:
    if not settings.get(key):
        raise _Usage(f"--{key} is required")
    return settings[key]


def _meta(config: DetectorConfig, **extra) -> dict:
    meta = {"tool": f"spikeanomaly {__version__}"}
    meta.update(extra)
    if config.tracker == "ewma":
        meta.setdefault("alpha", config.alpha)
    meta["seed"] = config.seed
    meta["config"] = json.dumps(config.to_dict(), sort_keys=True)
    return meta


def _format_card(card) -> str:
    return f"TP={card.tp} FP={card.fp} FN={card.fn} score={card.score}"


def _print_config(settings: dict, config: DetectorConfig | None) -> None:
    out = {k: v for k, v in settings.items() if k not in DETECTOR_FLAGS and k not in BOOL_FLAGS}
    if config is not None:
        out["detector"] = config.to_dict()
    print(json.dumps(out, indent=2, sort_keys=True))


def _open_out(settings):
    path = settings.get("out")
    if path:
        return open(path, "w", encoding="utf-8", newline="\n")
    return None


def cmd_detect(args) -> int:
    settings = resolve(args)
    config = detector_config(settings)
    if args.print_config:
        _print_config(settings, config)
        return EXIT_OK
    path = _require(settings, "input")
    warnings: list = []
    points = read_series(path, warnings)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    windows = None
    if settings.get("labels"):
        windows = read_windows(settings["labels"], settings.get("dataset-key"))
    records = run(points, config)
    fh = _open_out(settings)
    try:
        write_detections(fh or sys.stdout, records, _meta(config))
    finally:
        if fh:
            fh.close()
    n_det = sum(r.detected for r in records)
    print(f"{len(records)} rows, {n_det} detections", file=sys.stderr)
    if windows is not None:
        print(_format_card(score(records, windows)))
    return EXIT_OK


def _parse_alphas(raw) -> list[float]:
    if raw is None:
        return default_alphas()
    if isinstance(raw, list):
        items = raw
    else:
        items = [s for s in str(raw).split(",") if s.strip()]
    try:
        return [float(a) for a in items]
    except ValueError:
        raise ConfigError(f"cannot parse alpha grid {raw!r}") from None


def cmd_sweep(args) -> int:
    settings = resolve(args)
    config = detector_config(settings)
    alphas = _parse_alphas(settings.get("alphas"))
    if args.print_config:
        settings = dict(settings, alphas=alphas)
        _print_config(settings, config)
        return EXIT_OK
    path = _require(settings, "input")
    labels = _require(settings, "labels")
    workers = int(settings.get("workers") or 1)
    points = read_series(path)
    windows = read_windows(labels, settings.get("dataset-key"))
    rows = sweep(points, windows, config, alphas, workers=workers)
    meta = _meta(config, alpha="swept", points=len(alphas))
    fh = _open_out(settings)
    try:
        write_sweep(fh or sys.stdout, rows, meta)
    finally:
        if fh:
            fh.close()
    best = best_row(rows)
    print(f"best alpha={best.alpha:.4f} {_format_card(best.card)}")
    return EXIT_OK


def cmd_encode(args) -> int:
    settings = resolve(args)
    config = detector_config(settings)
    if args.print_config:
        _print_config(settings, config)
        return EXIT_OK
    points = read_series(_require(settings, "input"))
    enc = AdaptiveEncoder(config.make_tracker(), rho_max=config.rho_max,
                          epsilon_sd=config.epsilon_sd, warmup=config.warmup)
    fixed = settings.get("constant-rate")
    if fixed is not None and not 0.0 <= float(fixed) < 1.0:
        raise ConfigError(f"constant-rate must lie in [0, 1), got {fixed!r}")
    fh = _open_out(settings)
    out = fh or sys.stdout
    try:
        for k, v in _meta(config).items():
            out.write(f"# {k}: {v}\n")
        if not settings.get("spikes"):
            out.write("index,value,mean,sd,rate\n")
        for i, p in enumerate(points):
            sample = enc.observe(p.value)
            if fixed is not None:
                sample = RateSample(float(fixed), config.rho_max)
            if settings.get("spikes"):
                train = generate_spikes(sample, config.interval_ms, config.spike_mode,
                                        rng=None if config.seed is None else config.seed + i,
                                        source=1, reproducible=True)
                t0 = i * config.interval_ms
                for t in train.times:
                    out.write(f"{train.source}\t{t0 + t:.3f}\n")
            else:
                tr = enc.tracker
                out.write(f"{i},{p.value!r},{tr.mean:.6f},{tr.std_dev:.6f},"
                          f"{sample.rate:.6f}\n")
    finally:
        if fh:
            fh.close()
    return EXIT_OK


def cmd_grf_encode(args) -> int:
    enc = GrfEncoder(args.n, args.x_min, args.x_max, args.beta, args.theta_latency)
    lats = enc.latencies(args.value)
    if args.spikes:
        for lat in lats:
            if lat.fires:
                print(f"{lat.neuron}\t{lat.spike_time(args.interval_ms):.3f}")
        return EXIT_OK
    print(f"# sigma: {enc.sigma!r}")
    print("neuron,center,latency,fires")
    for lat, mu in zip(lats, enc.centers):
        print(f"{lat.neuron},{mu:.6f},{lat.latency:.6f},{int(lat.fires)}")
    return EXIT_OK


def cmd_score(args) -> int:
    records = read_detections(args.detections)
    windows = read_windows(args.labels, args.dataset_key)
    print(_format_card(score(records, windows)))
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "encode": cmd_encode,
    "grf-encode": cmd_grf_encode,
    "score": cmd_score,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, InputDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
