"""Command-line front end: parse a RunConfig, dispatch, write CSV and a results log record.

Exit codes: 0 ok, 2 usage, 3 domain, 4 resource, 5 internal invariant violation.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
import traceback
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import WeightKind, sieve_weights
from .bounds import minor_arc_scan, read_baseline, write_baseline
from .circle import hua_moment, rho_s, rho_s_bruteforce, weight_series
from .config import RunConfig, config_hash, parse_config
from .dioph import DEFAULT_BITS, dissect, parse_alpha
from .errors import DomainError, InvariantError, PrimeSumsError
from .expsum import PhaseContext, interval, weighted_sum
from .params import SumParams
from .report import emit_plot_script
from .singular import singular_series
from .vaughan import build_plan, decompose, direct_sum

LOG_ENV = "PRIMESUMS_LOG"
DEFAULT_LOG = "primesums_results.jsonl"

log = logging.getLogger("primesums")


@dataclass(frozen=True)
class ResultRecord:
    timestamp: str
    config_hash: str
    subcommand: str
    payload: dict
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _f(v) -> str:
    return repr(float(v))


def _params(cfg: RunConfig, circle_mode=False) -> SumParams:
    return SumParams(cfg.get("k"), cfg.get("x"), cfg.get("theta"), cfg.get("delta"), cfg.get("epsilon"), circle_mode)


def _alpha(cfg: RunConfig) -> Fraction:
    return parse_alpha(cfg.get("alpha"))


def _bits(cfg: RunConfig) -> int:
    return cfg.get("bits", DEFAULT_BITS)


# ---------------------------------------------------------------------------
# subcommands: each returns (csv text, payload)


def cmd_params(cfg):
    d = _params(cfg).as_dict()
    return _csv(d.keys(), [[_f(v) if isinstance(v, float) else v for v in d.values()]]), d


def cmd_sum(cfg):
    k, x = cfg.get("k"), cfg.get("x")
    if cfg.get("y") is not None:
        y = cfg.get("y")
    else:
        theta = cfg.get("theta")
        if not 0 < theta <= 1:
            raise DomainError(f"theta must lie in (0, 1], got {theta}")
        y = x**theta
    if x < 1 or y <= 0:
        raise DomainError("need x >= 1 and y > 0")
    alpha = _alpha(cfg)
    lo, hi = interval(x, y)
    ctx = PhaseContext(alpha, k, _bits(cfg), workers=cfg.get("workers", 1))
    table = sieve_weights(lo, hi, WeightKind(cfg.get("weight")))
    s = weighted_sum(ctx, table)
    row = [k, _f(x), _f(y), cfg.get("alpha"), cfg.get("weight"), _f(s.value.real), _f(s.value.imag),
           _f(abs(s.value)), s.terms]
    header = ["k", "x", "y", "alpha", "weight", "re", "im", "abs", "terms"]
    return _csv(header, [row]), {"abs": abs(s.value), "terms": s.terms}


def cmd_dissect(cfg):
    if cfg.get("P") is not None and cfg.get("Q") is not None:
        P, Q = cfg.get("P"), cfg.get("Q")
    else:
        p = _params(cfg)
        P, Q = p.P, p.Q
    D = dissect(P, Q)
    rows = [[arc.q, arc.a, _f(arc.center), _f(arc.halfwidth)] for arc in D.arcs]
    payload = {"P": P, "Q": Q, "arcs": len(D.arcs), "major_measure": float(D.major_measure())}
    return _csv(["q", "a", "center", "halfwidth"], rows), payload


def cmd_vaughan(cfg):
    p = _params(cfg)
    plan = build_plan(p)
    x, y = p.x, p.y
    ctx = PhaseContext(_alpha(cfg), p.k, _bits(cfg), workers=cfg.get("workers", 1))
    dec = decompose(plan, ctx, x, y)
    sk = direct_sum(plan, ctx).value
    res = abs(sk - dec.total) / max(1.0, abs(sk))
    header = ["k", "x", "theta", "alpha", "U", "V"]
    row = [p.k, _f(p.x), _f(p.theta), cfg.get("alpha"), plan.U, plan.V]
    for name, v in (("S1", dec.S1.value), ("S2", dec.S2.value), ("S3", dec.S3.value), ("S_k", sk)):
        header += [f"{name}_re", f"{name}_im"]
        row += [_f(v.real), _f(v.imag)]
    header.append("residual")
    row.append(_f(res))
    return _csv(header, [row]), {"residual": res, "U": plan.U, "V": plan.V}


def cmd_scan(cfg):
    p = _params(cfg)
    result = minor_arc_scan(p, count=cfg.get("count"), seed=cfg.get("seed"), bits=_bits(cfg),
                            workers=cfg.get("workers", 1))
    for note in result.notes:
        log.info(note)
    text = result.to_csv()
    payload = {"samples": len(result.records), "skipped": len(result.notes), "max_ratio": result.max_ratio}
    if cfg.get("write_baseline"):
        write_baseline(result, Path(cfg.get("write_baseline")))
    if cfg.get("baseline"):
        constant, body = read_baseline(Path(cfg.get("baseline")))
        payload.update(baseline_max_ratio=constant, identical=body == text)
        if result.max_ratio > constant:
            raise InvariantError(f"max ratio {result.max_ratio!r} exceeds baseline {constant!r}")
    return text, payload


def cmd_reps(cfg):
    k, s, X, Y = cfg.get("k"), cfg.get("s"), cfg.get("X"), cfg.get("Y")
    if cfg.get("n") is not None:
        ns = [cfg.get("n")]
    else:
        ns = list(range(cfg.get("n_min"), cfg.get("n_max") + 1))
    method = cfg.get("method", "convolution")
    if method == "bruteforce":
        counts = [rho_s_bruteforce(n, X, Y, k, s) for n in ns]
    else:
        series = weight_series(X, Y, k)
        counts = [rho_s(n, series, s) for n in ns]
    rows = [[c.n, _f(c.value), c.method] for c in counts]
    payload = {"count": len(ns), "max": max(c.value for c in counts)}
    return _csv(["n", "value", "method"], rows), payload


def cmd_hua(cfg):
    k, s, X, Y = cfg.get("k"), cfg.get("s"), cfg.get("X"), cfg.get("Y")
    series = weight_series(X, Y, k)
    method = cfg.get("method", "both" if s % 2 == 0 else "quadrature")
    methods = ["parseval", "quadrature"] if method == "both" else [method]
    values = {m: hua_moment(series, s, m) for m in methods}
    rows = [[k, s, _f(X), _f(Y), len(series), m, _f(v)] for m, v in values.items()]
    return _csv(["k", "s", "X", "Y", "primes", "method", "value"], rows), values


def cmd_sseries(cfg):
    n, s, k, Q_S = cfg.get("n"), cfg.get("s"), cfg.get("k"), cfg.get("Q_S")
    res = singular_series(n, s, k, Q_S, cfg.get("method", "both"))
    rows = []
    partial = 0.0
    for q, v in res.terms.items():
        partial += v
        rows.append(["term", q, _f(v), _f(partial)])
    summary = {
        "truncate": res.total,
        "euler": res.euler_product_total,
        "discrepancy": res.discrepancy,
        "tail_estimate": res.tail_estimate,
    }
    for name, v in summary.items():
        rows.append([name, Q_S, "" if v is None else _f(v), ""])
    return _csv(["row", "q", "value", "partial"], rows), summary


def cmd_report(cfg):
    out = emit_plot_script(cfg.get("csv"), cfg.get("kind"), cfg.get("out"))
    return None, {"script": str(out)}


COMMANDS = {
    "params": cmd_params,
    "sum": cmd_sum,
    "dissect": cmd_dissect,
    "vaughan": cmd_vaughan,
    "scan": cmd_scan,
    "reps": cmd_reps,
    "hua": cmd_hua,
    "sseries": cmd_sseries,
    "report": cmd_report,
}


def _log_path(cfg: RunConfig) -> Path | None:
    path = cfg.get("log") or os.environ.get(LOG_ENV) or DEFAULT_LOG
    return None if path.lower() == "none" else Path(path)


def run(cfg: RunConfig, stdout=None) -> int:
    """Dispatch one validated config; write CSV to --out or stdout and log a record."""
    stdout = stdout or sys.stdout
    text, payload = COMMANDS[cfg.command](cfg)
    if text is not None:
        if cfg.get("out"):
            Path(cfg.get("out")).write_text(text)
        else:
            stdout.write(text)
    else:
        stdout.write(payload["script"] + "\n")
    path = _log_path(cfg)
    if path is not None:
        record = ResultRecord(datetime.now(timezone.utc).isoformat(), config_hash(cfg), cfg.command, payload)
        with open(path, "a") as fh:
            fh.write(record.to_json() + "\n")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help") or (len(argv) == 2 and argv[1] in ("-h", "--help")):
        from .config import build_parser

        try:
            build_parser().parse_args(argv or ["--help"])
        except SystemExit as exc:
            return int(exc.code or 0)
    try:
        return run(parse_config(argv))
    except PrimeSumsError as exc:
        print(f"primesums: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError as exc:
        print(f"primesums: out of memory: {exc}", file=sys.stderr)
        return 4
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return 5


if __name__ == "__main__":
    sys.exit(main())
