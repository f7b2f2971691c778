"""Reference densities and the certainty measures built on them.

The self-certainty of a target is its relative entropy with respect to a
wide reference density ``q``::

    W(x) = integral p log(p / q) = -H(x) - E_p[log q(x)]

and the total certainty given drivers ``Y`` adds the mutual information,
``W(x | Y) = W(x) + I(x; Y)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import ValidationError
from .estimators import DEFAULT_PARAMS, EstimatorParams, entropy_kl

__all__ = [
    "REFERENCE_KINDS",
    "ReferenceDensity",
    "fit_reference",
    "self_certainty",
    "total_certainty",
    "NEGATIVE_CERTAINTY_WARNING",
]

REFERENCE_KINDS = ("cauchy", "gaussian", "uniform")

#: Self-certainty estimates below this are reported with a warning.
NEGATIVE_CERTAINTY_WARNING = -0.02

# Cauchy width whose entropy log(4 pi gamma) equals that of N(mu, sigma^2)
CAUCHY_WIDTH_FACTOR = math.sqrt(math.e / (8.0 * math.pi))


@dataclass(frozen=True)
class ReferenceDensity:
    """Offset density ``q``; ``params`` holds mu/gamma, mu/sigma or lo/hi."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise ValidationError(f"unknown reference density {self.kind!r}")
        p = {k: float(v) for k, v in self.params.items()}
        required = {"cauchy": ("mu", "gamma"), "gaussian": ("mu", "sigma"),
                    "uniform": ("lo", "hi")}[self.kind]
        missing = [k for k in required if k not in p]
        if missing:
            raise ValidationError(f"{self.kind} reference is missing {missing}")
        if self.kind == "cauchy" and not p["gamma"] > 0:
            raise ValidationError("Cauchy width gamma must be positive")
        if self.kind == "gaussian" and not p["sigma"] > 0:
            raise ValidationError("Gaussian sigma must be positive")
        if self.kind == "uniform" and not p["lo"] < p["hi"]:
            raise ValidationError("uniform reference needs lo < hi")
        object.__setattr__(self, "params", p)

    def logpdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "cauchy":
            g = p["gamma"]
            return np.log(g / math.pi) - np.log(g * g + (x - p["mu"]) ** 2)
        if self.kind == "gaussian":
            s = p["sigma"]
            return -0.5 * ((x - p["mu"]) / s) ** 2 - math.log(s) - 0.5 * math.log(2 * math.pi)
        inside = (x >= p["lo"]) & (x <= p["hi"])
        if not inside.all():
            raise ValidationError("samples fall outside the uniform reference support")
        return np.full(x.shape, -math.log(p["hi"] - p["lo"]))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data) -> "ReferenceDensity":
        return cls(data["kind"], dict(data["params"]))


def fit_reference(samples, kind: str = "cauchy") -> ReferenceDensity:
    """Fit a reference density to target samples.

    Cauchy: location at the sample mean and width ``sqrt(e / 8 pi) * std``,
    so it has the entropy of the moment-matched Gaussian.  Gaussian: sample
    mean and std.  Uniform: the sample range.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValidationError("need at least two samples to fit a reference density")
    std = float(np.std(x))
    if not std > 0:
        raise ValidationError("target samples have zero variance")
    mu = float(np.mean(x))
    if kind == "cauchy":
        return ReferenceDensity("cauchy", {"mu": mu, "gamma": CAUCHY_WIDTH_FACTOR * std})
    if kind == "gaussian":
        return ReferenceDensity("gaussian", {"mu": mu, "sigma": std})
    if kind == "uniform":
        return ReferenceDensity("uniform", {"lo": float(x.min()), "hi": float(x.max())})
    raise ValidationError(f"unknown reference density {kind!r}")


def self_certainty(samples, q: ReferenceDensity,
                   params: EstimatorParams = DEFAULT_PARAMS) -> float:
    """Estimate W(x) = -H(x) - mean(log q(x_i)) in nats.

    The estimate is returned unclamped; values below
    :data:`NEGATIVE_CERTAINTY_WARNING` trigger a ``RuntimeWarning``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    w = -entropy_kl(x, params) - float(np.mean(q.logpdf(x)))
    if w < NEGATIVE_CERTAINTY_WARNING:
        warnings.warn(f"self-certainty estimate is negative ({w:.4f} nats)",
                      RuntimeWarning, stacklevel=2)
    return w


def total_certainty(w_x: float, i_full: float) -> float:
    """W(x | Y) = W(x) + I(x; Y)."""
    return float(w_x) + float(i_full)
