"""Command-line front end.

    lens-ehg verify-beta --r 2 --seed 3 --tol 1e-8 --output beta.json
    lens-ehg susy --group su --nc 2 --nf 3 --r 2
    lens-ehg star-star --n 2 --r 2 --config run.cfg

Settings come from three layers: built-in defaults, an optional key=value
config file (keys are the flag names without the leading dashes), and
explicit flags, in increasing order of precedence.

Exit codes: 0 pass, 1 identity failed, 2 configuration or I/O problem,
3 numerically infeasible (poles, contours, accuracy).
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .errors import ConfigurationError, InfeasibleError, LensEHGError
from .identities import (DEFAULT_SIGMA, DEFAULT_TAU, jsonable, verify_an_evaluation, verify_an_involution,
                         verify_an_limit, verify_an_transform, verify_bc1_as_a1, verify_bcn_evaluation,
                         verify_bcn_limit, verify_bcn_transform, verify_cauchy_det, verify_elliptic_beta,
                         verify_frobenius_det, verify_kernel_suite, LIMIT_CFG)
from .kernel import DEFAULT_CONFIG, ModularParams, NumericsConfig, lens_gamma

COMMANDS = ("eval-gamma", "verify-kernel", "verify-beta", "verify-an", "verify-bcn", "verify-det",
            "susy", "star-star")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3

_COMPLEX = re.compile(r"^\s*([+-]?[0-9.]+(?:[eE][+-]?\d+)?)?\s*(?:([+-])\s*([0-9.]*(?:[eE][+-]?\d+)?)\s*[ij])?\s*$")


class UsageError(ConfigurationError):
    pass


def parse_complex(text):
    """Parse "a+bi", "a", "bi" or "-bi" into a complex number ("j" is accepted too)."""
    raw = str(text).strip()
    if re.fullmatch(r"[+-]?[0-9.]*(?:[eE][+-]?\d+)?\s*[ij]", raw):
        # pure imaginary
        mag = raw[:-1].strip()
        if mag in ("", "+", "-"):
            mag += "1"
        try:
            return complex(0.0, float(mag))
        except ValueError:
            raise UsageError(f"malformed complex literal {text!r}; expected a+bi") from None
    m = _COMPLEX.match(raw)
    if not m or m.group(1) is None:
        raise UsageError(f"malformed complex literal {text!r}; expected a+bi")
    try:
        re_part = float(m.group(1))
        im_part = 0.0
        if m.group(2):
            im_part = float(m.group(3) or "1")
            if m.group(2) == "-":
                im_part = -im_part
    except ValueError:
        raise UsageError(f"malformed complex literal {text!r}; expected a+bi") from None
    return complex(re_part, im_part)


def format_complex(z):
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise ValueError("must be at least 1")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise ValueError("must be non-negative")
    return v


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true or false")


# flag name -> (converter, default, help, commands or None for all)
OPTIONS = {
    "sigma": (parse_complex, DEFAULT_SIGMA, "modular parameter sigma, a+bi", None),
    "tau": (parse_complex, DEFAULT_TAU, "modular parameter tau, a+bi", None),
    "r": (_pos_int, 1, "lens order r >= 1", None),
    "seed": (int, 0, "sampling seed", None),
    "tol": (float, None, "relative tolerance (verifier default if omitted)", None),
    "output": (str, "report.json", "report path", None),
    "append": (_bool, False, "append one JSON line instead of overwriting", None),
    "product-tol": (float, DEFAULT_CONFIG.product_tol, "tail tolerance of infinite products", None),
    "product-max-index": (int, DEFAULT_CONFIG.product_max_index, "cap on product indices", None),
    "quad-tol": (float, DEFAULT_CONFIG.quad_tol, "quadrature refinement tolerance", None),
    "quad-start-nodes": (int, DEFAULT_CONFIG.quad_start_nodes, "initial nodes per axis", None),
    "quad-max-nodes": (int, DEFAULT_CONFIG.quad_max_nodes, "maximal nodes per axis", None),
    "pole-guard": (float, DEFAULT_CONFIG.pole_guard, "minimal distance to poles", None),
    "z": (parse_complex, 0.2 + 0.1j, "argument z of the gamma function", ("eval-gamma",)),
    "mm": (int, 0, "discrete argument m of the gamma function", ("eval-gamma",)),
    "samples": (_pos_int, 200, "random points per kernel identity", ("verify-kernel",)),
    "m": (_nonneg_int, 0, "rank m", ("verify-an", "verify-bcn")),
    "n": (_nonneg_int, 1, "rank n (components per spin for star-star)", ("verify-an", "verify-bcn", "verify-det", "star-star")),
    "k": (int, 1, "theta index k for the determinant lemmas", ("verify-det",)),
    "kind": (str, None, "which identity of the family", ("verify-an", "verify-bcn", "verify-det")),
    "group": (str, "su", "gauge group su or sp", ("susy",)),
    "nc": (_pos_int, 2, "number of colours N_c", ("susy",)),
    "nf": (_pos_int, 3, "number of flavours N_f", ("susy",)),
    "n-b": (int, 0, "baryonic holonomy n_B", ("susy",)),
    "baryon": (parse_complex, 0.01j, "baryonic fugacity B", ("susy",)),
}

KINDS = {
    "verify-an": ("transform", "involution", "evaluation", "limit"),
    "verify-bcn": ("transform", "evaluation", "bc1", "limit"),
    "verify-det": ("frobenius", "cauchy"),
}

_NUMERIC_KEYS = {"product-tol": "product_tol", "product-max-index": "product_max_index",
                 "quad-tol": "quad_tol", "quad-start-nodes": "quad_start_nodes",
                 "quad-max-nodes": "quad_max_nodes", "pole-guard": "pole_guard"}


@dataclass
class RunConfig:
    command: str
    numeric: NumericsConfig = DEFAULT_CONFIG
    sigma: complex = DEFAULT_SIGMA
    tau: complex = DEFAULT_TAU
    r: int = 1
    seed: int = 0
    tol: float | None = None
    output_path: str = "report.json"
    append: bool = False
    task: dict = field(default_factory=dict)
    explicit_numeric: tuple = ()

    @property
    def modular(self):
        return ModularParams(self.sigma, self.tau, self.r)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser():
    top = _Parser(prog="lens-ehg", description="Lens elliptic gamma function toolkit.")
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = top.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", default=argparse.SUPPRESS, help="key=value settings file")
        for name, (_, default, helptext, cmds) in OPTIONS.items():
            if cmds is not None and cmd not in cmds:
                continue
            flag = "--m" if name == "mm" else f"--{name}"
            if name == "kind":
                helptext += f": {', '.join(KINDS[cmd])}"
            # every value is kept as text so that file and flag values convert the same way
            extra = {"nargs": "?", "const": "true"} if name == "append" else {}
            p.add_argument(flag, dest=name, default=argparse.SUPPRESS, metavar=name.upper(), help=helptext,
                           **extra)
    return top


def read_config_file(path):
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("_", "-")] = value
    return out


def _allowed(cmd):
    names = {n for n, spec in OPTIONS.items() if spec[3] is None or cmd in spec[3]}
    if cmd != "eval-gamma":
        names.discard("mm")
    return names


def _convert(name, value):
    conv = OPTIONS[name][0]
    flag = "--m" if name == "mm" else f"--{name}"
    try:
        return conv(value)
    except UsageError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {flag}: {value!r} ({exc})") from None


def parse_args(argv) -> RunConfig:
    """argv (without the program name) -> RunConfig; raises UsageError naming the bad flag."""
    ns = vars(_parser().parse_args(list(argv)))
    cmd = ns.pop("command")
    allowed = _allowed(cmd)
    values = {}
    if "config" in ns:
        for key, value in read_config_file(ns.pop("config")).items():
            name = "mm" if (key == "m" and cmd == "eval-gamma") else key
            if name not in allowed:
                raise UsageError(f"unknown key {key!r} in config file for {cmd}")
            values[name] = value
    values.update(ns)
    settings = {name: OPTIONS[name][1] for name in allowed}
    for name, value in values.items():
        settings[name] = _convert(name, value)

    if cmd in KINDS:
        kind = settings.get("kind") or KINDS[cmd][0]
        if kind not in KINDS[cmd]:
            raise UsageError(f"--kind must be one of {', '.join(KINDS[cmd])}, got {kind!r}")
        settings["kind"] = kind
    if cmd == "susy":
        group = str(settings["group"]).lower()
        if group not in ("su", "sp"):
            raise UsageError(f"--group must be su or sp, got {settings['group']!r}")
        settings["group"] = group
    if cmd == "star-star" and settings["n"] < 1:
        raise UsageError("--n must be at least 1 for star-star")
    if cmd == "verify-det" and (settings["k"] not in (1, 2) or settings["n"] < 1):
        raise UsageError("--k must be 1 or 2 and --n at least 1")

    explicit_numeric = tuple(sorted(k for k in values if k in _NUMERIC_KEYS))
    try:
        numeric = DEFAULT_CONFIG.replace(**{_NUMERIC_KEYS[k]: settings[k] for k in _NUMERIC_KEYS})
    except LensEHGError as exc:
        raise UsageError(str(exc)) from None
    common = {"sigma", "tau", "r", "seed", "tol", "output", "append"} | set(_NUMERIC_KEYS)
    task = {k: v for k, v in settings.items() if k not in common}
    return RunConfig(cmd, numeric, settings["sigma"], settings["tau"], settings["r"], settings["seed"],
                     settings["tol"], settings["output"], settings["append"], task, explicit_numeric)


# ---------------------------------------------------------------------------
# reports

def report_payload(report):
    return report if isinstance(report, dict) else report.to_dict()


def write_report(report, path, append=False):
    """One JSON document per file, or one per line in append (batch) mode."""
    payload = report_payload(report)
    try:
        if append:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(payload, sort_keys=True) + "\n")
        else:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise ConfigurationError(f"cannot write report {path}: {exc}") from None


def read_reports(path):
    """Inverse of write_report: a list of payloads (one per line in batch files)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return [json.loads(text)]
    except json.JSONDecodeError:
        return [json.loads(line) for line in text.splitlines() if line.strip()]


# ---------------------------------------------------------------------------
# dispatch

def _kw(cfg: RunConfig):
    kw = {"sigma": cfg.sigma, "tau": cfg.tau}
    if cfg.tol is not None:
        kw["tol"] = cfg.tol
    return kw


def _eval_gamma(cfg: RunConfig):
    start = time.perf_counter()
    z, m = cfg.task["z"], cfg.task["mm"]
    value = complex(lens_gamma(z, m, cfg.modular, cfg.numeric))
    params = {"identity": "eval_gamma", "sigma": cfg.sigma, "tau": cfg.tau, "r": cfg.r, "z": z, "m": m,
              "seed": cfg.seed, "numerics": cfg.numeric.as_dict()}
    return jsonable({"identity_name": "eval_gamma", "params": params, "value": value, "pass": True,
                     "runtime_ms": int(round(1000 * (time.perf_counter() - start))),
                     "artifact_version": __version__, "seed": cfg.seed})


def _limit_cfg(cfg: RunConfig):
    # the limit lemmas need a finer pole guard than the default; explicit flags still win
    keep = {_NUMERIC_KEYS[k]: getattr(cfg.numeric, _NUMERIC_KEYS[k]) for k in cfg.explicit_numeric}
    return LIMIT_CFG.replace(**keep)


def dispatch(cfg: RunConfig):
    t, r, seed, num = cfg.task, cfg.r, cfg.seed, cfg.numeric
    kw = _kw(cfg)
    cmd = cfg.command
    if cmd == "eval-gamma":
        return _eval_gamma(cfg)
    if cmd == "verify-kernel":
        return verify_kernel_suite(r, t["samples"], seed, num, **kw)
    if cmd == "verify-beta":
        return verify_elliptic_beta(r, seed, num, **kw)
    if cmd == "verify-an":
        kind, m, n = t["kind"], t["m"], t["n"]
        if kind == "transform":
            return verify_an_transform(m, n, r, seed, num, **kw)
        if kind == "involution":
            return verify_an_involution(m, n, r, seed, num, **kw)
        if kind == "evaluation":
            return verify_an_evaluation(n, r, seed, num, **kw)
        return verify_an_limit(r, seed, _limit_cfg(cfg), **kw)
    if cmd == "verify-bcn":
        kind, m, n = t["kind"], t["m"], t["n"]
        if kind == "transform":
            return verify_bcn_transform(m, n, r, seed, num, **kw)
        if kind == "evaluation":
            return verify_bcn_evaluation(n, r, seed, num, **kw)
        if kind == "bc1":
            return verify_bc1_as_a1(m, r, seed, num, **kw)
        return verify_bcn_limit(r, seed, _limit_cfg(cfg), **kw)
    if cmd == "verify-det":
        fn = verify_frobenius_det if t["kind"] == "frobenius" else verify_cauchy_det
        return fn(t["n"], r, t["k"], seed, num, **kw)
    if cmd == "susy":
        from .susy_index import check_seiberg_duality, random_spec
        spec = random_spec(t["group"].upper() if t["group"] == "su" else "Sp", t["nc"], t["nf"], r,
                           cfg.sigma, cfg.tau, seed, baryon_B=t["baryon"], n_B=t["n-b"])
        rep = check_seiberg_duality(spec, num, **({"tol": cfg.tol} if cfg.tol is not None else {}))
        rep.seed = seed
        rep.params["seed"] = seed
        return rep
    if cmd == "star-star":
        from .lattice import verify_star_star
        return verify_star_star(t["n"], r, seed, num, **kw)
    raise UsageError(f"unknown command {cmd!r}")


def exit_code(report):
    payload = report_payload(report)
    if payload.get("pass"):
        return EXIT_PASS
    if not isinstance(report, dict) and report.infeasible:
        return EXIT_INFEASIBLE
    return EXIT_FAIL


def run(cfg: RunConfig, stream=None):
    """Dispatch, write the report, print a one-line summary; returns the exit code."""
    stream = sys.stdout if stream is None else stream
    try:
        report = dispatch(cfg)
    except InfeasibleError as exc:
        print(f"lens-ehg: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigurationError, ValueError) as exc:
        print(f"lens-ehg: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        write_report(report, cfg.output_path, cfg.append)
    except ConfigurationError as exc:
        print(f"lens-ehg: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code = exit_code(report)
    payload = report_payload(report)
    if "value" in payload:
        print(f"{payload['identity_name']}: {format_complex(complex(payload['value']['re'], payload['value']['im']))}",
              file=stream)
    else:
        status = {EXIT_PASS: "PASS", EXIT_FAIL: "FAIL", EXIT_INFEASIBLE: "INFEASIBLE"}[code]
        line = f"{payload['identity_name']}: {status} rel_err={payload['rel_err']:.3e} tol={payload['tol']:.1e}"
        if payload.get("failure_reason"):
            line += f" ({payload['failure_reason']})"
        print(line, file=stream)
        if code == EXIT_FAIL:
            print(f"lens-ehg: {payload.get('failure_reason')}", file=sys.stderr)
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except LensEHGError as exc:
        print(f"lens-ehg: usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
