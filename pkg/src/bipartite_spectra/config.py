"""Run configuration and the shared tolerance policy.

A JSON config file may set any of the keys below; command-line flags
override file values, which override the defaults.

    {
      "p": 2, "alpha": "1/2", "k_max": 4,
      "weights": {"model": "rademacher"},
      "exact": true,
      "N": 2000, "replicas": 200, "seed": 1, "threads": 1,
      "simulate": true, "cap": 7,
      "format": "csv", "output": null
    }

``p`` and ``alpha`` may be numbers or strings such as "1/5"; strings are
read exactly in exact mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .weights import WeightModel


@dataclass(frozen=True)
class TolerancePolicy:
    # recursion vs oracle in float mode, relative
    float_rel: float = 1e-10
    # Monte Carlo: |mean - m| <= se_bands * stderr + bias_allowance / N
    se_bands: float = 5.0
    bias_allowance: float = 50.0

    def recursion_matches_oracle(self, a, b, exact: bool) -> bool:
        if exact:
            return a == b
        scale = max(abs(float(a)), abs(float(b)))
        return abs(float(a) - float(b)) <= self.float_rel * scale

    def mc_band(self, stderr: float, N: int) -> float:
        return self.se_bands * stderr + self.bias_allowance / N

    def to_dict(self) -> dict:
        return {"float_rel": self.float_rel, "se_bands": self.se_bands, "bias_allowance": self.bias_allowance}


DEFAULT_POLICY = TolerancePolicy()

DEFAULTS = {
    "p": "1",
    "alpha": "1/2",
    "k_max": 4,
    "weights": {"model": "rademacher"},
    "exact": False,
    "N": 1000,
    "replicas": 100,
    "seed": 0,
    "threads": 1,
    "simulate": True,
    "cap": 7,
    "format": "csv",
    "output": None,
}


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def parse_number(value, exact: bool):
    """Exact mode returns a Fraction ("0.3" means 3/10); otherwise a float."""
    if isinstance(value, Fraction):
        return value if exact else float(value)
    if isinstance(value, float):
        return Fraction(repr(value)) if exact else value
    if isinstance(value, int):
        return Fraction(value) if exact else float(value)
    text = str(value).strip()
    frac = Fraction(text)
    return frac if exact else float(frac)


@dataclass
class RunConfig:
    subcommand: str
    p: object
    alpha: object
    k_max: int
    weights: WeightModel
    exact: bool = False
    N: int = 1000
    replicas: int = 100
    seed: int = 0
    threads: int = 1
    simulate: bool = True
    cap: int = 7
    format: str = "csv"
    output: str | None = None
    policy: TolerancePolicy = field(default_factory=TolerancePolicy)

    def echo(self) -> dict:
        """Self-describing, replayable view of the run; contains no timestamps."""
        return {
            "subcommand": self.subcommand,
            "p": _show(self.p),
            "alpha": _show(self.alpha),
            "k_max": self.k_max,
            "weights": self.weights.to_dict(),
            "exact": self.exact,
            "N": self.N,
            "replicas": self.replicas,
            "seed": self.seed,
            "threads": self.threads,
            "simulate": self.simulate,
            "cap": self.cap,
            "format": self.format,
            "tolerances": self.policy.to_dict(),
        }


def _show(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def load_file(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown config key")
    return data


def build_config(subcommand: str, file_values: dict, overrides: dict) -> RunConfig:
    """Merge defaults < file < flags and validate every field."""
    merged = dict(DEFAULTS)
    merged.update(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    exact = bool(merged["exact"])

    try:
        p = parse_number(merged["p"], exact)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError("p", str(e)) from None
    if not p > 0:
        raise ConfigError("p", f"must be positive, got {merged['p']}")
    try:
        alpha = parse_number(merged["alpha"], exact)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError("alpha", str(e)) from None
    if not 0 < alpha < 1:
        raise ConfigError("alpha", f"must lie in the open interval (0, 1), got {merged['alpha']}")

    w = merged["weights"]
    try:
        weights = w if isinstance(w, WeightModel) else (
            WeightModel.from_dict(w) if isinstance(w, dict) else WeightModel.parse(str(w))
        )
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError("weights", str(e)) from None

    ints = {}
    for key, lo in (("k_max", 1), ("N", 2), ("replicas", 2), ("threads", 1), ("cap", 0), ("seed", 0)):
        try:
            ints[key] = int(merged[key])
        except (TypeError, ValueError):
            raise ConfigError(key, f"must be an integer, got {merged[key]!r}") from None
        if ints[key] < lo:
            raise ConfigError(key, f"must be >= {lo}, got {ints[key]}")
    if merged["format"] not in ("csv", "json"):
        raise ConfigError("format", "must be 'csv' or 'json'")
    if float(p) > ints["N"] and subcommand in ("simulate", "scaling", "check") and merged["simulate"]:
        raise ConfigError("p", f"must not exceed N={ints['N']}")

    return RunConfig(
        subcommand=subcommand,
        p=p,
        alpha=alpha,
        weights=weights,
        exact=exact,
        simulate=bool(merged["simulate"]),
        format=merged["format"],
        output=merged["output"],
        **ints,
    )
