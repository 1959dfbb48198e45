"""Flat ``key = value`` run configuration.

Powers are given in dBm, distances in meters and densities per square
meter; everything is converted to linear units once, here.  Numeric values
may be simple arithmetic expressions such as ``1 / (300**2 * pi)``.
"""

import ast
import dataclasses
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .mcsim import DEFAULT_R_MAX_FACTOR, ScenarioMode
from .params import NetworkParams, dbm_to_watts, watts_to_dbm

__all__ = [
    "SWEEP_VARIABLES", "ENGINES", "SweepSpec", "RunConfig",
    "load_config", "parse_config", "serialize_config",
]

SWEEP_VARIABLES = ("transmit_snr_db", "ris_halflength", "alpha_t", "lambda_b")
ENGINES = ("analytic", "montecarlo")
DEFAULT_SNR_DB = tuple(float(v) for v in np.linspace(90.0, 105.0, 8))

# config key -> NetworkParams field, for keys stored as-is
_PARAM_KEYS = {
    "lambda_b": "lambda_b", "R_L": "R_L", "r_c": "r_c", "a_c": "a_c", "a_t": "a_t",
    "alpha_c": "alpha_c", "alpha_t": "alpha_t", "C": "C", "L_half": "L",
    "m_t": "m_t", "m_c": "m_c", "rho_t": "rho_t", "rho_a": "rho_a",
    "gamma_sic_th": "gamma_sic_th", "gamma_t_th": "gamma_t_th", "gamma_c_th": "gamma_c_th",
    "B_w": "B_w",
}
_ALIASES = {"L": "L_half"}
_INT_FIELDS = {"m_t", "m_c"}


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "transmit_snr_db"
    values: tuple = DEFAULT_SNR_DB
    modes: tuple = tuple(ScenarioMode)
    engines: tuple = ENGINES

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep_variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError("sweep_values must be nonempty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep_values must be strictly increasing")
        modes = tuple(dict.fromkeys(ScenarioMode(m) for m in self.modes))
        engines = tuple(dict.fromkeys(self.engines))
        if not modes or not engines:
            raise ConfigError("modes and engines must be nonempty")
        bad = [e for e in engines if e not in ENGINES]
        if bad:
            raise ConfigError(f"unknown engine(s) {bad}; expected {ENGINES}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "engines", engines)

    def apply(self, p, value):
        """``NetworkParams`` at one sweep point."""
        if self.variable == "transmit_snr_db":
            return p.with_snr_db(value)
        if self.variable == "ris_halflength":
            return p.replace(L=value)
        return p.replace(**{self.variable: value})


@dataclass(frozen=True)
class RunConfig:
    params: NetworkParams = field(default_factory=NetworkParams)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    trials: int = 100_000
    seed: int = 42
    output_path: str = "coverage.csv"
    emit_plot_script: bool = False
    K: int = 64
    c_mode: str = "paper"
    expectation: str = "analytic"
    r_max_factor: float = DEFAULT_R_MAX_FACTOR

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1000:
            raise ConfigError(f"trials must be an integer >= 1000, got {self.trials}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed}")
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError(f"K must be a positive integer, got {self.K}")
        if self.c_mode not in ("paper", "corrected", "numeric"):
            raise ConfigError(f"c_mode must be paper, corrected or numeric, got {self.c_mode!r}")
        if self.expectation not in ("analytic", "empirical"):
            raise ConfigError(f"expectation must be analytic or empirical, got {self.expectation!r}")
        if not self.r_max_factor > 1.0:
            raise ConfigError("r_max_factor must exceed 1")
        for name in ("trials", "seed", "K"):
            object.__setattr__(self, name, int(getattr(self, name)))
        object.__setattr__(self, "r_max_factor", float(self.r_max_factor))
        object.__setattr__(self, "emit_plot_script", bool(self.emit_plot_script))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}


def _eval_number(text):
    """Evaluate a numeric literal or a small arithmetic expression."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"cannot evaluate {text!r}: {exc}") from None


def _as_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _as_int(text):
    v = _eval_number(text)
    if int(v) != v:
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


def _as_list(text):
    return [s.strip() for s in text.split(",") if s.strip()]


_RUN_KEYS = {
    "trials": _as_int, "seed": _as_int, "K": _as_int,
    "output_path": str.strip, "emit_plot_script": _as_bool,
    "c_mode": str.strip, "expectation": str.strip,
    "r_max_factor": lambda t: float(_eval_number(t)),
}
_SWEEP_KEYS = ("sweep_variable", "sweep_values", "modes", "engines")
_POWER_KEYS = ("P_b_dbm", "P_b_w", "transmit_snr_db", "sigma2_dbm", "sigma2_w", "R_t", "R_c")


def parse_config(text):
    """Parse configuration text into a validated :class:`RunConfig`."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _PARAM_KEYS and key not in _RUN_KEYS and key not in _SWEEP_KEYS and key not in _POWER_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = (lineno, value)

    def convert(key, fn):
        lineno, value = raw[key]
        try:
            return fn(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None

    kw = {}
    for key, name in _PARAM_KEYS.items():
        if key in raw:
            kw[name] = convert(key, _as_int if name in _INT_FIELDS else lambda t: float(_eval_number(t)))
    number = lambda t: float(_eval_number(t))  # noqa: E731
    for prefix in ("sigma2", "P_b"):
        dbm, watts = f"{prefix}_dbm", f"{prefix}_w"
        if dbm in raw and watts in raw:
            raise ConfigError(f"line {raw[watts][0]}: give only one of {dbm} and {watts}")
        if dbm in raw:
            kw[prefix] = dbm_to_watts(convert(dbm, number))
        elif watts in raw:
            kw[prefix] = convert(watts, number)
    if "transmit_snr_db" in raw:
        if "P_b_dbm" in raw or "P_b_w" in raw:
            raise ConfigError(f"line {raw['transmit_snr_db'][0]}: transmit_snr_db conflicts with P_b")
        snr = convert("transmit_snr_db", number)
        kw["P_b"] = kw.get("sigma2", NetworkParams.sigma2) * 10.0 ** (snr / 10.0)
    bw = kw.get("B_w", NetworkParams.B_w)
    for rate, th in (("R_t", "gamma_t_th"), ("R_c", "gamma_c_th")):
        if rate in raw:
            if th in kw:
                raise ConfigError(f"line {raw[rate][0]}: {rate} conflicts with {th}")
            kw[th] = NetworkParams.threshold_from_rate(convert(rate, number), bw)
    try:
        params = NetworkParams(**kw)
    except (ConfigError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid network parameters: {exc}") from None

    sweep_kw = {}
    if "sweep_variable" in raw:
        sweep_kw["variable"] = raw["sweep_variable"][1]
    if "sweep_values" in raw:
        sweep_kw["values"] = convert("sweep_values", lambda t: [float(_eval_number(s)) for s in _as_list(t)])
    for key in ("modes", "engines"):
        if key in raw:
            sweep_kw[key] = convert(key, _as_list)
    try:
        sweep = SweepSpec(**sweep_kw)
    except ValueError as exc:
        raise ConfigError(f"invalid sweep: {exc}") from None

    run_kw = {key: convert(key, fn) for key, fn in _RUN_KEYS.items() if key in raw}
    return RunConfig(params=params, sweep=sweep, **run_kw)


def load_config(path):
    """Read and validate a configuration file; missing keys take defaults."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def _power_line(prefix, watts):
    dbm = watts_to_dbm(watts)
    if dbm_to_watts(dbm) == watts:
        return f"{prefix}_dbm = {dbm!r}"
    return f"{prefix}_w = {watts!r}"


def params_lines(p):
    """Parameter block of a config file, lossless."""
    lines = [_power_line("P_b", p.P_b), _power_line("sigma2", p.sigma2)]
    for key, name in _PARAM_KEYS.items():
        lines.append(f"{key} = {getattr(p, name)!r}")
    return lines


def serialize_config(cfg):
    """Text that :func:`parse_config` maps back to an equal ``RunConfig``."""
    s = cfg.sweep
    lines = ["# network parameters (powers in dBm or W, distances in m, density per m^2)"]
    lines += params_lines(cfg.params)
    lines += [
        "# sweep",
        f"sweep_variable = {s.variable}",
        "sweep_values = " + ", ".join(repr(v) for v in s.values),
        "modes = " + ", ".join(m.value for m in s.modes),
        "engines = " + ", ".join(s.engines),
        "# run",
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
        f"K = {cfg.K}",
        f"c_mode = {cfg.c_mode}",
        f"expectation = {cfg.expectation}",
        f"r_max_factor = {cfg.r_max_factor!r}",
        f"output_path = {cfg.output_path}",
        f"emit_plot_script = {str(cfg.emit_plot_script).lower()}",
    ]
    return "\n".join(lines) + "\n"
