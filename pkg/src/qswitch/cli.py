"""Command-line front end.

    qswitch <command> [--seed N] [--out PATH] [--format csv|json|text] [--config FILE] ...

Parameters come from three places, in increasing priority: built-in
defaults, the JSON ``--config`` file, and command-line flags.  Exit codes:
0 success, 1 protocol abort, 2 bad configuration, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction

from . import __version__
from .adversary import (AttackConfig, attack_hooks, collusion_game, decoy_detection_rate)
from .protocols import bcst_run, cqd_run, cqka_run, cqkd_run, cqsdc_run
from .qcore import make_rng
from .transcript import dumps

EXIT_OK, EXIT_ABORT, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3
COMMANDS = ("bcst", "cqd", "cqsdc", "cqkd", "cqka", "attack", "sweep", "verify")
FORMATS = ("csv", "json", "text")


class ConfigError(Exception):
    pass


# -- value parsing ---------------------------------------------------------------

_PI = re.compile(r"^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text) -> float:
    """Radians from a number or a pi expression: "pi", "pi/6", "2pi/3", "-3*pi/4"."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    s = str(text).strip().lower().replace("π", "pi")
    m = _PI.match(s)
    if m:
        sign, num, den = m.groups()
        frac = Fraction(num or "1") / Fraction(den or "1")
        value = float(frac) * math.pi
        return -value if sign == "-" else value
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot read angle {text!r}") from None


def parse_list(text, parse=float) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(parse(v) for v in text)
    return tuple(parse(v) for v in str(text).split(",") if v.strip())


def parse_eta_grid(text) -> tuple:
    """"default" (0, 0.1, .., 1), "fine" (steps of 0.05), "a:b:n" (n points) or a list."""
    from .noise.sweep import DEFAULT_ETAS, FINE_ETAS
    if isinstance(text, str):
        key = text.strip().lower()
        if key == "default":
            return DEFAULT_ETAS
        if key == "fine":
            return FINE_ETAS
        if key.count(":") == 2:
            a, b, n = key.split(":")
            n = int(n)
            if n < 1:
                raise ConfigError("eta grid needs at least one point")
            if n == 1:
                return (float(a),)
            a, b = float(a), float(b)
            return tuple(a + (b - a) * i / (n - 1) for i in range(n))
    return parse_list(text)


def _bits(text, name) -> str:
    s = str(text)
    if not s or set(s) - {"0", "1"}:
        raise ConfigError(f"{name} must be a nonempty bit string, got {text!r}")
    return s


# -- commands -----------------------------------------------------------------------

def _transcript_output(t, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("seq", "step", "actor", "action", "payload"))
        for e in t.events:
            w.writerow((e.seq, e.step, e.actor, e.action, dumps(e.payload)))
        w.writerow((len(t.events), "END", "-", "summary", dumps(t.summary())))
        return buf.getvalue()
    return t.serialize(fmt)


def _protocol_result(t, fmt):
    return _transcript_output(t, fmt), (EXIT_OK if t.ok else EXIT_ABORT)


def cmd_bcst(p, rng, fmt):
    n = int(p["n"])
    t = bcst_run(n, p["disclose"], rng, controllers=int(p["controllers"]))
    return _protocol_result(t, fmt)


def _cqd_kwargs(p):
    return {"error_threshold": float(p["threshold"]), "check_mode": p["check_mode"],
            "withhold_sequence": bool(p["withhold"]), "initial": p["initial"]}


def _random_message(rng, n):
    return "".join(str(int(b)) for b in rng.integers(0, 2, size=2 * n))


def cmd_cqd(p, rng, fmt, hooks=None):
    n = int(p["n"])
    a = _bits(p["alice_msg"], "alice-msg") if p.get("alice_msg") else _random_message(rng, n)
    b = _bits(p["bob_msg"], "bob-msg") if p.get("bob_msg") else _random_message(rng, n)
    if len(a) != 2 * n or len(b) != 2 * n:
        raise ConfigError(f"messages must have 2n = {2 * n} bits")
    t = cqd_run(n, a, b, rng, hooks=hooks, **_cqd_kwargs(p))
    return _protocol_result(t, fmt)


def cmd_cqsdc(p, rng, fmt, hooks=None):
    msg = _bits(p["message"], "message")
    return _protocol_result(cqsdc_run(msg, rng, hooks=hooks, **_cqd_kwargs(p)), fmt)


def cmd_cqkd(p, rng, fmt, hooks=None):
    return _protocol_result(cqkd_run(int(p["key_length"]), rng, hooks=hooks, **_cqd_kwargs(p)),
                            fmt)


def cmd_cqka(p, rng, fmt, hooks=None):
    k_a, k_b = _bits(p["ka"], "ka"), _bits(p["kb"], "kb")
    return _protocol_result(cqka_run(k_a, k_b, rng, hooks=hooks, **_cqd_kwargs(p)), fmt)


def _table(rows: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(rows) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("key", "value"))
        for k in sorted(rows):
            w.writerow((k, rows[k] if not isinstance(rows[k], (dict, list)) else dumps(rows[k])))
        return buf.getvalue()
    return "".join(f"{k}\t{rows[k] if not isinstance(rows[k], (dict, list)) else dumps(rows[k])}\n"
                   for k in sorted(rows))


def cmd_attack(p, rng, fmt):
    kind = p["kind"]
    if kind == "collusion":
        f = collusion_game(int(p["n"]), rng, samples=int(p["samples"]))
        return _table({"attack": "collusion", "n": int(p["n"]), "samples": int(p["samples"]),
                       "mean_fidelity": f}, fmt), EXIT_OK
    config = AttackConfig(basis_strategy=p["strategy"], attack_fraction=float(p["fraction"]))
    if kind == "detection":
        rate, errors, checked = decoy_detection_rate(int(p["trials"]), config, rng,
                                                     mode=p["check_mode"])
        return _table({"attack": "intercept_resend", "strategy": config.basis_strategy.value,
                       "fraction": config.attack_fraction, "checked": checked,
                       "errors": errors, "rate": rate}, fmt), EXIT_OK
    if kind != "intercept_resend":
        raise ConfigError(f"unknown attack kind {kind!r}")
    hooks, _ = attack_hooks(config, rng, legs=("Bob->Alice", "Alice->Bob"))
    runner = {"cqd": cmd_cqd, "cqsdc": cmd_cqsdc, "cqkd": cmd_cqkd, "cqka": cmd_cqka}
    if p["protocol"] not in runner:
        raise ConfigError(f"attack --protocol must be one of {sorted(runner)}")
    return runner[p["protocol"]](p, rng, fmt, hooks=hooks)


def _json_value(text: str):
    try:
        value = float(text)
    except ValueError:
        return text
    return text if math.isnan(value) else value


def cmd_sweep(p, rng, fmt):
    from .noise.sweep import (Grid, emit_figure_data, figure_records, records_csv,
                              sweep)
    if fmt == "text":
        raise ConfigError("sweep writes csv or json")
    if p.get("figure"):
        records = figure_records(str(p["figure"]))
        text = emit_figure_data(records, str(p["figure"]))
    else:
        channel = str(p["channel"]).lower()
        kinds = {"ad": ("AD",), "pd": ("PD",), "both": ("AD", "PD")}.get(channel)
        if kinds is None:
            raise ConfigError("--channel must be ad, pd or both")
        grid = Grid(parse_eta_grid(p["eta_grid"]),
                    *(parse_list(p[k], parse_angle) for k in ("theta1", "theta2", "phi1", "phi2")))
        records = sweep(grid, kinds)
        text = records_csv(records)
    if fmt == "json":
        rows = [{k: _json_value(v) for k, v in row.items()}
                for row in csv.DictReader(io.StringIO(text))]
        return json.dumps(rows, indent=1) + "\n", EXIT_OK
    return text, EXIT_OK


def cmd_verify(p, rng, fmt):
    from .noise.verify import verify
    from .noise.sweep import GRIDS
    if p["grid"] not in GRIDS:
        raise ConfigError(f"--grid must be one of {sorted(GRIDS)}")
    report = verify(p["grid"])
    code = EXIT_OK if report["status"] == "pass" else EXIT_VERIFY
    if fmt == "json":
        return json.dumps(report, indent=1, sort_keys=True) + "\n", code
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("check", "points", "agree", "catalogued", "uncatalogued",
                    "max_abs_err_after_fixes"))
        for c in report["checks"]:
            w.writerow((c["name"], c["points"], c["agree"], c["catalogued"], c["uncatalogued"],
                        repr(c["max_abs_err_after_fixes"])))
        return buf.getvalue(), code
    lines = [f"grid {report['grid']}  tolerance {report['tolerance']}  status {report['status']}"]
    for c in report["checks"]:
        lines.append(f"{c['name']}: {c['points']} points, {c['agree']} agree, "
                     f"{c['catalogued']} catalogued, {c['uncatalogued']} uncatalogued")
    for s in report["spot_checks"]:
        lines.append(f"spot {s['name']}: printed {s['printed_value']}")
    lines.append(f"uncatalogued discrepancies: {report['uncatalogued']}")
    return "\n".join(lines) + "\n", code


HANDLERS = {"bcst": cmd_bcst, "cqd": cmd_cqd, "cqsdc": cmd_cqsdc, "cqkd": cmd_cqkd,
            "cqka": cmd_cqka, "attack": cmd_attack, "sweep": cmd_sweep, "verify": cmd_verify}

_CQD_DEFAULTS = {"threshold": 0.11, "check_mode": "announced", "withhold": False,
                 "initial": "phi+"}
DEFAULTS = {
    "bcst": {"n": 2, "disclose": "both", "controllers": 1},
    "cqd": {"n": 4, "alice_msg": None, "bob_msg": None, **_CQD_DEFAULTS},
    "cqsdc": {"message": "10110100", **_CQD_DEFAULTS},
    "cqkd": {"key_length": 16, **_CQD_DEFAULTS},
    "cqka": {"ka": "1010", "kb": "0110", **_CQD_DEFAULTS},
    "attack": {"kind": "intercept_resend", "protocol": "cqd", "strategy": "random_ZX",
               "fraction": 1.0, "trials": 10000, "samples": 10000, "n": 4, "alice_msg": None,
               "bob_msg": None, "message": "10110100", "key_length": 16, "ka": "1010",
               "kb": "0110", **_CQD_DEFAULTS},
    "sweep": {"channel": "both", "eta_grid": "default", "theta1": "0,pi/8,pi/6,pi/4,pi/3,pi/2",
              "theta2": "0,pi/8,pi/6,pi/4,pi/3,pi/2", "phi1": "0", "phi2": "0", "figure": None},
    "verify": {"grid": "verification"},
}
DEFAULT_FORMAT = {"sweep": "csv", "verify": "json"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qswitch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qswitch {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    S = argparse.SUPPRESS

    def common(sp):
        sp.add_argument("--seed", type=int, default=S, help="RNG seed (default 0)")
        sp.add_argument("--out", default=S, help="output path (default stdout)")
        sp.add_argument("--format", choices=FORMATS, default=S)
        sp.add_argument("--config", default=S, help="JSON file of parameters; flags win")

    def cqd_flags(sp):
        sp.add_argument("--threshold", type=float, default=S, help="decoy error threshold")
        sp.add_argument("--check-mode", choices=("announced", "random"), default=S)
        sp.add_argument("--withhold", action="store_true", default=S,
                        help="Charlie withholds the order at step 8")
        sp.add_argument("--initial", default=S, help="initial Bell state (phi+, psi-, 10, ...)")

    sp = sub.add_parser("bcst", help="bidirectional controlled teleportation")
    common(sp)
    sp.add_argument("--n", type=int, default=S)
    sp.add_argument("--disclose", default=S, help="both, none, AliceToBob or BobToAlice")
    sp.add_argument("--controllers", type=int, choices=(1, 2), default=S)

    sp = sub.add_parser("cqd", help="controlled quantum dialogue")
    common(sp), cqd_flags(sp)
    sp.add_argument("--n", type=int, default=S)
    sp.add_argument("--alice-msg", default=S)
    sp.add_argument("--bob-msg", default=S)

    sp = sub.add_parser("cqsdc", help="controlled secure direct communication")
    common(sp), cqd_flags(sp)
    sp.add_argument("--message", default=S)

    sp = sub.add_parser("cqkd", help="controlled key distribution")
    common(sp), cqd_flags(sp)
    sp.add_argument("--key-length", type=int, default=S)

    sp = sub.add_parser("cqka", help="controlled key agreement")
    common(sp), cqd_flags(sp)
    sp.add_argument("--ka", default=S)
    sp.add_argument("--kb", default=S)

    sp = sub.add_parser("attack", help="intercept-resend, decoy detection or collusion")
    common(sp), cqd_flags(sp)
    sp.add_argument("--kind", choices=("intercept_resend", "detection", "collusion"), default=S)
    sp.add_argument("--protocol", choices=("cqd", "cqsdc", "cqkd", "cqka"), default=S)
    sp.add_argument("--strategy", choices=("random_ZX", "fixed_Z"), default=S)
    sp.add_argument("--fraction", type=float, default=S)
    sp.add_argument("--trials", type=int, default=S, help="checked decoys (detection)")
    sp.add_argument("--samples", type=int, default=S, help="teleported inputs (collusion)")
    sp.add_argument("--n", type=int, default=S)
    sp.add_argument("--alice-msg", default=S)
    sp.add_argument("--bob-msg", default=S)
    sp.add_argument("--message", default=S)
    sp.add_argument("--key-length", type=int, default=S)
    sp.add_argument("--ka", default=S)
    sp.add_argument("--kb", default=S)

    sp = sub.add_parser("sweep", help="noisy BCST fidelity grid or figure data (CSV)")
    common(sp)
    sp.add_argument("--channel", choices=("ad", "pd", "both"), default=S)
    sp.add_argument("--eta-grid", default=S, help='"default", "fine", "a:b:n" or a list')
    for name in ("theta1", "theta2", "phi1", "phi2"):
        sp.add_argument(f"--{name}", default=S, help="comma list; radians or pi/k")
    sp.add_argument("--figure", choices=("1a", "1b", "1c", "1d", "2", "3a", "3b"), default=S)

    sp = sub.add_parser("verify", help="closed forms against the numeric pipeline")
    common(sp)
    sp.add_argument("--grid", default=S, help="verification (5x5x11) or default")
    return parser


_META = ("command", "seed", "out", "format", "config")


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file and flags into one run config."""
    cmd = args.command
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    from_file = {}
    if "config" in flags:
        try:
            with open(flags["config"], encoding="utf-8") as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {flags['config']!r}: {exc}") from None
        if not isinstance(from_file, dict):
            raise ConfigError("config file must hold a JSON object")
        if from_file.get("command", cmd) != cmd:
            raise ConfigError(f"config is for {from_file['command']!r}, not {cmd!r}")
        nested = from_file.get("parameters", {})
        from_file = {**{k: v for k, v in from_file.items() if k != "parameters"}, **nested}
        from_file = {k.replace("-", "_"): v for k, v in from_file.items()}
    params = dict(DEFAULTS[cmd])
    unknown = set(from_file) - set(params) - set(_META)
    if unknown:
        raise ConfigError(f"unknown parameters for {cmd}: {sorted(unknown)}")
    merged = {**params, **from_file, **flags}
    seed = merged.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed must be a 64-bit non-negative integer, got {seed!r}")
    fmt = merged.get("format", DEFAULT_FORMAT.get(cmd, "text"))
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    return {"command": cmd, "seed": seed, "out": merged.get("out"), "format": fmt,
            "parameters": {k: merged[k] for k in params}}


def run(config: dict) -> tuple:
    """Execute a resolved config; returns ``(text, exit code)``."""
    rng = make_rng(config["seed"])
    return HANDLERS[config["command"]](config["parameters"], rng, config["format"])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        config = resolve(args)
        text, code = run(config)
    except (ConfigError, ValueError, TypeError, KeyError) as exc:
        print(f"qswitch: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = config["out"]
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qswitch: error: cannot write {out!r}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())
