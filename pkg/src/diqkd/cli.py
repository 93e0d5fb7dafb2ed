"""Command-line front end.

Every subcommand prints an envelope: tool version, the fully resolved
configuration, the result payload and an optional timestamp. Feeding an
envelope (or a key=value file mirroring the long flags) back through
``--config`` reproduces the payload; flags given on the command line win.

Exit codes: 0 feasible or pass, 1 usage error, 2 infeasible,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from typing import Optional

from . import __version__
from .bell_oracle import theorem_check
from .chsh_math import DomainError, depolarizing_beta, depolarizing_point
from .experiments import builtin_experiments, evaluate_experiment
from .finite_rates import ATTACK_KINDS
from .param_search import (
    DEFAULT_COMPLETENESS,
    DEFAULT_SOUNDNESS,
    OptimizerConfig,
    min_rounds,
    optimize_rate,
    region_scan,
)
from .protocol_sim import AbortRule, DeviceModel, SimConfig, run_protocol

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3

SCHEMA = "diqkd.envelope/1"
JSON_DIGITS = 12
CSV_DIGITS = 9

RATE_COLUMNS = (
    "attack", "n", "entropy_term", "ec_leakage", "sqrt_n_corrections", "constant_penalties",
    "total_l", "rate", "feasible", "gamma", "delta_est", "delta_con", "pt_ratio",
    "eps_smooth", "eps_ec", "eps_ec_prime", "eps_pa", "eps_ea", "eps_con", "eps_t",
)

# flag destination -> FIXABLE name in param_search
OVERRIDES = {
    "gamma": "gamma", "delta_est": "delta_est", "delta_con": "delta_con", "tangent": "pt_ratio",
    "eps_smooth": "eps_smooth", "eps_ec": "eps_ec", "eps_ec_prime": "eps_ec_prime",
    "eps_pa": "eps_pa", "eps_ea": "eps_ea", "eps_con": "eps_con", "eps_t": "eps_t",
}

POINT_KEYS = ("beta", "nu", "qber", "depolarizing")

DEFAULTS = {
    "eps_sound": DEFAULT_SOUNDNESS,
    "eps_complete": DEFAULT_COMPLETENESS,
    "split_policy": "equal",
    "eat_factor": "table",
    "depolarizing": False,
    "pessimistic": False,
    "timestamp": False,
    "grid_points": 50,
    "trials": 1,
    "delta_est_sim": 0.0,
    "nu": None,
    "thresholds": (),
    "workers": 1,
    "inject_perturbation": 0.0,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ----------------------------------------------------------------------
# value parsing


def parse_count(text) -> int:
    """Non-negative integer that may be written in scientific notation (1e7)."""
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value < 0 or value != math.floor(value):
        raise argparse.ArgumentTypeError(f"not a whole non-negative count: {text!r}")
    return int(value)


def parse_grid(text) -> tuple:
    try:
        rows, cols = (int(p) for p in str(text).lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like RxC, got {text!r}") from None
    if rows < 2 or cols < 2:
        raise argparse.ArgumentTypeError("grid counts must be at least 2")
    return rows, cols


def parse_thresholds(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(parse_count(t)) for t in text)
    return tuple(float(parse_count(t)) for t in str(text).split(",") if t.strip())


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


# ----------------------------------------------------------------------
# parser


def _add_point_flags(p):
    p.add_argument("--attack", choices=ATTACK_KINDS)
    p.add_argument("--beta", type=float, help="CHSH value")
    p.add_argument("--nu", type=float, help="depolarizing noise; sets both beta and QBER")
    p.add_argument("--qber", type=float)
    p.add_argument("--depolarizing", action="store_true", default=None,
                   help="derive beta from --qber along the depolarizing curve")
    p.add_argument("--eps-sound", type=float)
    p.add_argument("--eps-complete", type=float)


def _add_optimizer_flags(p):
    p.add_argument("--split-policy", choices=("equal", "refine"))
    p.add_argument("--eat-factor", choices=("table", "appendix"))
    g = p.add_argument_group("overrides (pin instead of optimizing)")
    g.add_argument("--gamma", type=float)
    g.add_argument("--delta-est", type=float)
    g.add_argument("--delta-con", type=float)
    g.add_argument("--tangent", type=float, help="tangent point as a winning probability")
    for name in ("eps-smooth", "eps-ec", "eps-ec-prime", "eps-pa", "eps-ea", "eps-con", "eps-t"):
        g.add_argument(f"--{name}", type=float)


def _add_common(p, formats=("json", "csv")):
    p.add_argument("--format", choices=formats)
    p.add_argument("--out", help="write the output here instead of stdout")
    p.add_argument("--config", help="key=value file or a previous JSON envelope")
    p.add_argument("--timestamp", action="store_true", default=None,
                   help="record the wall-clock time in the envelope (breaks byte-identical replay)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diqkd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"diqkd {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("rate", help="optimized key length at a fixed number of rounds")
    _add_point_flags(p)
    p.add_argument("--rounds", type=parse_count)
    _add_optimizer_flags(p)
    _add_common(p)

    p = sub.add_parser("min-rounds", help="smallest number of rounds with positive key")
    _add_point_flags(p)
    _add_optimizer_flags(p)
    _add_common(p)

    p = sub.add_parser("region", help="minimum rounds over a (QBER, beta) grid, as CSV")
    p.add_argument("--attack", choices=ATTACK_KINDS)
    p.add_argument("--beta-min", type=float)
    p.add_argument("--beta-max", type=float)
    p.add_argument("--qber-min", type=float)
    p.add_argument("--qber-max", type=float)
    p.add_argument("--grid", type=parse_grid, help="RxC: QBER rows by beta columns")
    p.add_argument("--thresholds", type=parse_thresholds, help="comma-separated round counts")
    p.add_argument("--eps-sound", type=float)
    p.add_argument("--eps-complete", type=float)
    p.add_argument("--split-policy", choices=("equal", "refine"))
    p.add_argument("--eat-factor", choices=("table", "appendix"))
    p.add_argument("--workers", type=int)
    _add_common(p, formats=("csv",))

    p = sub.add_parser("simulate", help="Monte-Carlo run of the honest protocol")
    p.add_argument("--protocol", type=int, choices=(1, 2))
    p.add_argument("--nu", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--rounds", type=parse_count)
    p.add_argument("--blocks", type=parse_count)
    p.add_argument("--seed", type=parse_count)
    p.add_argument("--trials", type=parse_count)
    p.add_argument("--omega-exp", type=float)
    p.add_argument("--delta-est", dest="delta_est_sim", type=float)
    _add_common(p, formats=("json",))

    p = sub.add_parser("experiments", help="feasibility verdicts for the bundled Bell tests")
    p.add_argument("--attack", choices=ATTACK_KINDS)
    p.add_argument("--pessimistic", action="store_true", default=None)
    p.add_argument("--eps-sound", type=float)
    p.add_argument("--eps-complete", type=float)
    _add_common(p)

    p = sub.add_parser("verify-h2", help="numeric check of the closed-form collision entropy")
    p.add_argument("--grid-points", type=parse_count)
    p.add_argument("--inject-perturbation", type=float, help=argparse.SUPPRESS)
    _add_common(p, formats=("json",))
    return parser


# ----------------------------------------------------------------------
# configuration merging


def _load_config(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            env = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path!r} is not valid JSON: {exc}") from None
        if env.get("command") not in (None, command):
            raise UsageError(f"envelope is for {env.get('command')!r}, not {command!r}")
        return dict(env.get("config", env))
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _coerce(action, value):
    """Convert a value read from a config file to what the flag would produce."""
    if value is None:
        return None
    if action.nargs == 0:  # store_true flags
        return _bool(value)
    try:
        if action.type is parse_grid and isinstance(value, (list, tuple)):
            return parse_grid("x".join(str(v) for v in value))
        if action.type is not None and not isinstance(value, (list, tuple)):
            value = action.type(value)
        elif action.type is parse_thresholds:
            value = parse_thresholds(value)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        raise UsageError(f"bad config value for {action.dest}: {exc}") from None
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"bad config value for {action.dest}: {value!r}")
    return value


def _merge(args, subparser) -> dict:
    given = {k: v for k, v in vars(args).items() if v is not None}
    merged = {}
    if args.config:
        actions = {a.dest: a for a in subparser._actions}
        loaded = _load_config(args.config, args.command)
        if any(k in given for k in POINT_KEYS):
            # a point given on the command line replaces the whole point in the file
            loaded = {k: v for k, v in loaded.items() if k not in POINT_KEYS}
        for key, value in loaded.items():
            if key in ("command", "config"):
                continue
            if key not in actions:
                raise UsageError(f"unknown config key {key!r}")
            merged[key] = _coerce(actions[key], value)
    merged.update(given)
    merged.pop("config", None)
    merged.pop("command", None)
    dests = {a.dest for a in subparser._actions}
    fmt = next(a for a in subparser._actions if a.dest == "format")
    merged.setdefault("format", fmt.choices[0])
    for key, value in DEFAULTS.items():
        if key in dests:
            merged.setdefault(key, value)
    for key in dests - {"help", "config"}:
        merged.setdefault(key, None)
    return merged


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise RuntimeError("no subcommands registered")


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError("missing required " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _conflict(cfg, a, b):
    if cfg.get(a) not in (None, False) and cfg.get(b) not in (None, False):
        raise UsageError(f"--{a.replace('_', '-')} conflicts with --{b.replace('_', '-')}")


def _resolve_point(cfg) -> tuple:
    """(beta, qber) from exactly one way of giving the point."""
    _conflict(cfg, "beta", "nu")
    _conflict(cfg, "beta", "depolarizing")
    _conflict(cfg, "nu", "qber")
    _conflict(cfg, "nu", "depolarizing")
    if cfg.get("nu") is not None:
        pt = depolarizing_point(cfg["nu"])
        return pt.beta, pt.q
    if cfg.get("depolarizing"):
        _require(cfg, "qber")
        return depolarizing_beta(cfg["qber"]), cfg["qber"]
    if cfg.get("beta") is None:
        raise UsageError("give one of --beta B --qber Q, --nu NU, or --qber Q --depolarizing")
    _require(cfg, "qber")
    return cfg["beta"], cfg["qber"]


def _optimizer(cfg) -> OptimizerConfig:
    return OptimizerConfig(split_policy=cfg["split_policy"], eat_factor=cfg["eat_factor"])


def _fixed(cfg) -> dict:
    return {name: cfg[flag] for flag, name in OVERRIDES.items() if cfg.get(flag) is not None}


# ----------------------------------------------------------------------
# formatting


def _round(value, digits):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return str(value)
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {str(k): _round(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, digits) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return _round(value.item(), digits)
    return value


def _plain(value):
    """JSON-safe copy of a configuration value without rounding."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{CSV_DIGITS}g}"
    return "" if value is None else str(value)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def envelope(command: str, cfg: dict, payload, timestamp: bool = False) -> dict:
    echo = {k: _plain(v) for k, v in sorted(cfg.items())}
    return {
        "schema": SCHEMA,
        "tool": "diqkd",
        "version": __version__,
        "command": command,
        "config": echo,
        "result": _round(payload, JSON_DIGITS),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat() if timestamp else None,
    }


def _json_text(env) -> str:
    return json.dumps(env, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]):
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out!r}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# subcommands


def _cmd_rate(cfg):
    _require(cfg, "attack", "rounds")
    beta, q = _resolve_point(cfg)
    bd = optimize_rate(cfg["attack"], beta, q, cfg["rounds"], cfg["eps_sound"], cfg["eps_complete"],
                       _optimizer(cfg), _fixed(cfg))
    payload = bd.to_dict()
    if cfg["format"] == "csv":
        flat = {**bd.chosen_params, **{k: v for k, v in payload.items() if k != "chosen_params"}}
        return _csv_text(RATE_COLUMNS, [[flat.get(c) for c in RATE_COLUMNS]]), bd.feasible
    return payload, bd.feasible


def _cmd_min_rounds(cfg):
    _require(cfg, "attack")
    beta, q = _resolve_point(cfg)
    res = min_rounds(cfg["attack"], beta, q, cfg["eps_sound"], cfg["eps_complete"], _optimizer(cfg), _fixed(cfg))
    ok = res.status == "feasible"
    if cfg["format"] == "csv":
        rows = [[h["n"], h["feasible"], h["total_l"]] for h in res.history]
        head = f"# min_rounds={res.value}\n"
        return head + _csv_text(("n", "feasible", "total_l"), rows), ok
    payload = res.to_dict()
    payload["min_rounds"] = res.value
    return payload, ok


def region_header(thresholds) -> list:
    return ["qber", "beta", "asymptotic_rate", "min_rounds"] + [f"feasible_at_{parse_count(t)}" for t in thresholds]


def _cmd_region(cfg):
    _require(cfg, "attack", "beta_min", "beta_max", "qber_min", "qber_max", "grid")
    if not (0.0 <= cfg["beta_min"] < cfg["beta_max"]):
        raise UsageError("need 0 <= --beta-min < --beta-max")
    if not (0.0 <= cfg["qber_min"] < cfg["qber_max"] <= 0.5):
        raise UsageError("need 0 <= --qber-min < --qber-max <= 0.5")
    thresholds = tuple(sorted(cfg["thresholds"]))
    cells = region_scan(
        (cfg["beta_min"], cfg["beta_max"]), (cfg["qber_min"], cfg["qber_max"]), cfg["grid"],
        cfg["attack"], thresholds, cfg["eps_sound"], cfg["eps_complete"], _optimizer(cfg), cfg["workers"],
    )
    rows = [[c.q, c.beta, c.asymptotic_rate, c.min_rounds] + [c.feasible_at[t] for t in thresholds] for c in cells]
    return _csv_text(region_header(thresholds), rows), True


def _cmd_simulate(cfg):
    _require(cfg, "protocol", "gamma", "seed")
    _conflict(cfg, "rounds", "blocks")
    nu = cfg["nu"] if cfg["nu"] is not None else 0.0
    try:
        sim = SimConfig(protocol=cfg["protocol"], gamma=cfg["gamma"], seed=cfg["seed"],
                        n=cfg.get("rounds"), blocks=cfg.get("blocks"), trials=cfg["trials"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    model = DeviceModel(nu)
    omega = cfg.get("omega_exp")
    rule = AbortRule(model.winning_probability() if omega is None else omega, cfg["delta_est_sim"])
    report = run_protocol(sim, model, rule)
    return report.to_dict(), True


def _cmd_experiments(cfg):
    attacks = (cfg["attack"],) if cfg.get("attack") else ATTACK_KINDS
    verdicts = [
        evaluate_experiment(rec, a, cfg["eps_sound"], cfg["eps_complete"], pessimistic=cfg["pessimistic"]).to_dict()
        for rec in builtin_experiments()
        for a in attacks
    ]
    if cfg["format"] == "csv":
        cols = ("name", "platform", "attack", "corner", "beta", "q", "asymptotic_rate", "verdict", "min_rounds")
        return _csv_text(cols, [[v[c] for c in cols] for v in verdicts]), True
    return verdicts, True


def _cmd_verify_h2(cfg):
    grid = cfg["grid_points"]
    if grid < 2:
        raise UsageError("--grid-points must be at least 2")
    report = theorem_check(grid, perturbation=cfg["inject_perturbation"])
    return report, report["passed"]


COMMANDS = {
    "rate": (_cmd_rate, EXIT_INFEASIBLE),
    "min-rounds": (_cmd_min_rounds, EXIT_INFEASIBLE),
    "region": (_cmd_region, EXIT_INFEASIBLE),
    "simulate": (_cmd_simulate, EXIT_INFEASIBLE),
    "experiments": (_cmd_experiments, EXIT_INFEASIBLE),
    "verify-h2": (_cmd_verify_h2, EXIT_VERIFY_FAILED),
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler, fail_code = COMMANDS[args.command]
    try:
        cfg = _merge(args, _subparser(parser, args.command))
        result, ok = handler(cfg)
        if isinstance(result, str):
            text = result
            if args.command == "region" and cfg.get("out"):
                # data to the file, a JSON receipt to stdout
                _emit(text, cfg["out"])
                digest = hashlib.sha256(text.encode()).hexdigest()
                receipt = {"out": cfg["out"], "rows": text.count("\n") - 1, "sha256": digest}
                sys.stdout.write(_json_text(envelope(args.command, cfg, receipt, cfg["timestamp"])))
                return EXIT_OK if ok else fail_code
        else:
            text = _json_text(envelope(args.command, cfg, result, cfg["timestamp"]))
        _emit(text, cfg.get("out"))
    except (UsageError, DomainError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"diqkd {args.command}: error: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK if ok else fail_code


if __name__ == "__main__":
    sys.exit(main())
