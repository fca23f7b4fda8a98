"""Edge-weight distributions: samplers and their even moments."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

KINDS = ("rademacher", "gaussian", "constant", "uniform_symmetric", "custom")


class NotSamplableError(ValueError):
    pass


@dataclass(frozen=True)
class WeightModel:
    """A symmetric weight law.

    ``param`` is sigma for gaussian, c for constant and the half-width a for
    uniform_symmetric.  ``custom`` models carry their even moments
    X_2, X_4, ... directly and cannot be sampled.
    """

    kind: str
    param: float | Fraction | None = None
    custom_moments: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight model {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("gaussian", "uniform_symmetric"):
            if self.param is None or self.param <= 0:
                raise ValueError(f"{self.kind} needs a positive parameter")
        if self.kind == "constant" and self.param is None:
            raise ValueError("constant needs a parameter")
        if self.kind == "custom":
            if any(x < 0 for x in self.custom_moments):
                raise ValueError("even moments of a real variable must be nonnegative")
            _check_log_convex(self.custom_moments)

    @classmethod
    def rademacher(cls):
        return cls("rademacher")

    @classmethod
    def gaussian(cls, sigma=1):
        return cls("gaussian", sigma)

    @classmethod
    def constant(cls, c):
        return cls("constant", c)

    @classmethod
    def uniform_symmetric(cls, a):
        return cls("uniform_symmetric", a)

    @classmethod
    def custom(cls, even_moments: Sequence):
        return cls("custom", custom_moments=tuple(even_moments))

    @property
    def samplable(self) -> bool:
        return self.kind != "custom"

    def to_dict(self) -> dict:
        if self.kind == "custom":
            return {"model": "custom", "even_moments": [_jsonable(x) for x in self.custom_moments]}
        d = {"model": self.kind}
        if self.param is not None:
            d["param"] = _jsonable(self.param)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WeightModel":
        """Parse ``{"model": kind, "param": x}`` or ``{"model": "custom", "even_moments": [...]}``."""
        kind = d.get("model")
        if kind == "custom":
            return cls.custom(d["even_moments"])
        if kind == "rademacher":
            return cls.rademacher()
        if kind not in KINDS:
            raise ValueError(f"unknown weight model {kind!r}")
        return cls(kind, d.get("param", 1 if kind == "gaussian" else None))

    @classmethod
    def parse(cls, text: str) -> "WeightModel":
        """Parse a short CLI spec: ``rademacher``, ``gaussian:2``, ``custom:1,3,15``.

        A JSON object is accepted as well.
        """
        text = text.strip()
        if text.startswith("{"):
            import json

            return cls.from_dict(json.loads(text))
        kind, _, arg = text.partition(":")
        if kind == "custom":
            return cls.custom([_parse_number(x) for x in arg.split(",") if x])
        if arg:
            return cls(kind, _parse_number(arg))
        return cls.from_dict({"model": kind})


def _parse_number(s: str):
    s = s.strip()
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


def _check_log_convex(values):
    for f in range(1, len(values) - 1):
        if values[f] ** 2 > values[f - 1] * values[f + 1] * (1 + 1e-12):
            warnings.warn(
                f"custom moments violate log-convexity at X_{2 * (f + 1)}; "
                "no real distribution has these moments",
                stacklevel=3,
            )
            return


def _double_factorial_odd(f: int) -> int:
    # (2f-1)!!
    out = 1
    for j in range(1, 2 * f, 2):
        out *= j
    return out


def even_moments(model: WeightModel, K: int, exact: bool = False) -> list:
    """Return [X_2, X_4, ..., X_2K] for ``model``.

    With ``exact=True`` values are Fractions; the model parameter must then be
    rational (an int, a Fraction, or a float that is converted exactly).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if model.kind == "custom":
        if len(model.custom_moments) < K:
            raise ValueError(
                f"custom model supplies {len(model.custom_moments)} even moments, need {K}"
            )
        vals = list(model.custom_moments[:K])
        return [Fraction(x) for x in vals] if exact else [float(x) for x in vals]

    num = Fraction if exact else float
    param = None if model.param is None else num(model.param)
    out = []
    for f in range(1, K + 1):
        if model.kind == "rademacher":
            x = num(1)
        elif model.kind == "gaussian":
            x = _double_factorial_odd(f) * param ** (2 * f)
        elif model.kind == "constant":
            x = param ** (2 * f)
        else:
            x = param ** (2 * f) / (2 * f + 1)
        out.append(x)
    return out


def sample_weight(model: WeightModel, rng: np.random.Generator) -> float:
    return float(sample_weights(model, rng, 1)[0])


def sample_weights(model: WeightModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` i.i.d. weights from ``rng``."""
    if not model.samplable:
        raise NotSamplableError("custom moment models cannot be sampled")
    if model.kind == "rademacher":
        return 2.0 * rng.integers(0, 2, size=size) - 1.0
    if model.kind == "gaussian":
        return rng.normal(0.0, float(model.param), size=size)
    if model.kind == "constant":
        return np.full(size, float(model.param))
    a = float(model.param)
    return rng.uniform(-a, a, size=size)


def validate_growth(seq: Sequence) -> float:
    """Smallest C with X_2f^(1/2f) <= C f for every f in the sequence.

    This only fits the finite prefix; a C that keeps growing with K hints
    that the weights are too heavy-tailed for moment determinacy.
    """
    if len(seq) == 0:
        raise ValueError("empty moment sequence")
    return max(float(x) ** (1.0 / (2 * f)) / f for f, x in enumerate(seq, start=1))
