"""Run configuration: argv plus an optional ``key = value`` file, serialization and hashing."""

from __future__ import annotations

import argparse
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .dioph import format_alpha, parse_alpha
from .errors import ContractError, UsageError

COMMANDS = ("params", "sum", "dissect", "vaughan", "scan", "reps", "hua", "sseries", "report")

# Keys that never change the primary output and so stay out of the hash.
UNHASHED = frozenset({"workers", "out", "log"})

# name: (type, default, help)
OPTIONS = {
    "k": (int, None, "power k"),
    "x": (float, None, "start of the summation interval (x, x + y]"),
    "theta": (float, None, "interval exponent, y = x^theta"),
    "y": (float, None, "interval length (instead of theta)"),
    "delta": (float, None, "arc parameter delta"),
    "epsilon": (float, 0.05, "epsilon in the bound exponents"),
    "alpha": (str, None, "a/q, or 0.ddd@B, or a decimal together with --bits"),
    "bits": (int, None, "fixed-point bits B (default 320); also the width of a decimal alpha"),
    "weight": (str, "vonmangoldt", "coefficient weight: vonmangoldt, moebius, primelog, unit"),
    "P": (float, None, "major-arc denominator bound"),
    "Q": (float, None, "arc width parameter"),
    "count": (int, 70, "number of sampled denominators (three alphas each)"),
    "seed": (int, 0, "random seed"),
    "baseline": (str, None, "baseline file to check the scan against"),
    "write_baseline": (str, None, "write the scan as a new baseline file"),
    "s": (int, None, "number of summands"),
    "X": (float, None, "window centre"),
    "Y": (float, None, "window half-width"),
    "n": (int, None, "target integer"),
    "n_min": (int, None, "first target of a range"),
    "n_max": (int, None, "last target of a range"),
    "method": (str, None, "evaluation method"),
    "Q_S": (int, 1000, "truncation point of the singular series"),
    "csv": (str, None, "input CSV"),
    "kind": (str, None, "plot kind: ratio_vs_q, rho_vs_n, series_convergence"),
    "workers": (int, 1, "worker processes"),
    "out": (str, None, "output path (default stdout)"),
    "log": (str, None, "results log path ('none' disables)"),
}

COMMON = ("workers", "out", "log", "seed", "bits")

SUBCOMMANDS = {
    "params": (("k", "x", "theta", "delta", "epsilon"), ("k", "x", "theta", "delta")),
    "sum": (("k", "x", "theta", "y", "alpha", "weight"), ("k", "x", "alpha")),
    "dissect": (("k", "x", "theta", "delta", "epsilon", "P", "Q"), ()),
    "vaughan": (("k", "x", "theta", "delta", "epsilon", "alpha"), ("k", "x", "theta", "delta", "alpha")),
    "scan": (
        ("k", "x", "theta", "delta", "epsilon", "count", "baseline", "write_baseline"),
        ("k", "x", "theta", "delta"),
    ),
    "reps": (("k", "s", "X", "Y", "n", "n_min", "n_max", "method"), ("k", "s", "X", "Y")),
    "hua": (("k", "s", "X", "Y", "method"), ("k", "s", "X", "Y")),
    "sseries": (("n", "s", "k", "Q_S", "method"), ("n", "s", "k")),
    "report": (("csv", "kind"), ("csv", "kind")),
}

METHODS = {
    "reps": ("convolution", "bruteforce"),
    "hua": ("parseval", "quadrature", "both"),
    "sseries": ("truncate", "euler", "both"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="primesums", description="Exponential sums over primes in short intervals.")
    parser.add_argument("--config", help="key = value configuration file")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for cmd, (keys, _) in SUBCOMMANDS.items():
        p = sub.add_parser(cmd)
        p.add_argument("--config", help=argparse.SUPPRESS)
        for key in keys + COMMON:
            typ, default, text = OPTIONS[key]
            flags = [_flag(key)] + (["--qs"] if key == "Q_S" else [])
            p.add_argument(*flags, dest=key, type=typ, default=default, help=text)
    return parser


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


@dataclass(frozen=True)
class RunConfig:
    """A validated subcommand and its options (alpha kept as canonical a/q text)."""

    command: str
    options: dict = field(default_factory=dict)

    def get(self, key, default=None):
        value = self.options.get(key)
        return default if value is None else value

    def canonical(self) -> dict:
        return {
            "command": self.command,
            "options": {k: v for k, v in sorted(self.options.items()) if k not in UNHASHED and v is not None},
        }

    @property
    def hash(self) -> str:
        return config_hash(self)


def config_hash(config: RunConfig) -> str:
    """sha256 over the canonical JSON of everything that affects the output."""
    blob = json.dumps(config.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def parse_config(argv: list[str], config_path=None) -> RunConfig:
    """Build a RunConfig from argv and an optional config file.

    Flags override file keys. Unknown file keys and malformed values raise
    UsageError naming the key.
    """
    argv = list(argv)
    parser = build_parser()
    head = _Parser(add_help=False)
    head.add_argument("--config")
    known, rest = head.parse_known_args(argv)
    config_path = config_path or known.config
    command = next((a for a in rest if not a.startswith("-")), None)
    if command not in SUBCOMMANDS:
        raise UsageError(f"expected a subcommand from {', '.join(COMMANDS)}, got {command!r}")
    subparser = parser._subparsers._group_actions[0].choices[command]  # noqa: SLF001
    actions = {a.dest: a for a in subparser._actions if a.dest not in ("help", "config")}  # noqa: SLF001

    if config_path:
        for key, raw in read_config_file(config_path).items():
            if key not in actions:
                raise UsageError(f"unknown config key {key!r} for {command}")
            try:
                value = actions[key].type(raw)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key!r}: {raw!r}") from exc
            subparser.set_defaults(**{key: value})

    ns = parser.parse_args(rest)
    options = {dest: getattr(ns, dest) for dest in actions}
    return _validate(RunConfig(command, options))


def _validate(config: RunConfig) -> RunConfig:
    opts = dict(config.options)
    if opts.get("alpha") is not None:
        try:
            opts["alpha"] = format_alpha(parse_alpha(opts["alpha"], opts.get("bits")))
        except ContractError as exc:
            raise UsageError(f"bad value for 'alpha': {exc}") from exc
    _, required = SUBCOMMANDS[config.command]
    missing = [key for key in required if opts.get(key) is None]
    if config.command == "sum" and opts.get("theta") is None and opts.get("y") is None:
        missing.append("theta or y")
    if config.command == "dissect" and not (
        opts.get("P") is not None and opts.get("Q") is not None
        or all(opts.get(key) is not None for key in ("k", "x", "theta", "delta"))
    ):
        missing.append("P and Q, or k, x, theta and delta")
    if config.command == "reps" and opts.get("n") is None and None in (opts.get("n_min"), opts.get("n_max")):
        missing.append("n, or n_min and n_max")
    if missing:
        raise UsageError(f"{config.command}: missing {', '.join(missing)}")
    method = opts.get("method")
    if method is not None and method not in METHODS.get(config.command, ()):
        raise UsageError(f"bad value for 'method': {method!r}")
    if opts.get("workers", 1) < 1:
        raise UsageError("bad value for 'workers': must be >= 1")
    if opts.get("bits") is not None and opts["bits"] < 64:
        raise UsageError("bad value for 'bits': need at least 64")
    return RunConfig(config.command, opts)


def serialize(config: RunConfig) -> list[str]:
    """argv that parses back to ``config``."""
    argv = [config.command]
    for key, value in sorted(config.options.items()):
        if value is None:
            continue
        argv += [_flag(key), repr(value) if isinstance(value, float) else str(value)]
    return argv
