"""Diagnostics for unmodelled drivers and confounding.

:func:`missing_process_test` perturbs the target with extra observational
noise and watches the noise share ``cs(x; eta)``.  When that share is
dominated by observational noise it reacts strongly; when it barely moves,
most of it comes from a process that is not among the drivers.

:func:`confounder_scan` lists drivers whose direct (1link) contribution
vanishes while their total contribution does not.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .certainty import fit_reference, self_certainty
from .core import AnalysisSpec, Dataset, NumericalError, ValidationError
from .decomposition import DecompositionResult, prepare_design, resolve_threads
from .estimators import EstimatorParams, mi_ksg
from .preprocess import gauss_rank_transform

__all__ = [
    "MISSING_LIKELY",
    "NO_MISSING",
    "INCONCLUSIVE",
    "MissingProcessReport",
    "noise_share",
    "missing_process_test",
    "confounder_scan",
]

MISSING_LIKELY = "missing process likely"
NO_MISSING = "no missing process"
INCONCLUSIVE = "inconclusive"

PERTURBATION_FACTOR = 3.0
# perturbations this small relative to the target spread cannot move anything
MIN_RELATIVE_PERTURBATION = 1e-3


@dataclass(frozen=True)
class MissingProcessReport:
    cs_noise_base: float
    cs_noise_perturbed_mean: float
    cs_noise_perturbed_std: float
    rel_change: float
    verdict: str
    obs_noise_sigma: float
    n_reps: int
    threshold: float
    seed: int | None = None

    @property
    def missing_process_likely(self) -> bool:
        return self.verdict == MISSING_LIKELY

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data) -> "MissingProcessReport":
        return cls(**data)


def noise_share(target_raw, drivers, spec: AnalysisSpec) -> float:
    """``W(x) / (W(x) + I(x; Y))`` for a raw target column and prepared drivers.

    Only the full MI is needed for the noise share, so the subset lattice
    is skipped.
    """
    params = EstimatorParams(spec.k, spec.cmi_mode, spec.neighbor_search)
    target = gauss_rank_transform(target_raw, spec.tail_cut) if spec.transform else target_raw
    i_full = mi_ksg(target, drivers, params)
    samples = target_raw if spec.certainty_space == "raw" else target
    w_x = self_certainty(samples, fit_reference(samples, spec.reference), params)
    w_total = w_x + i_full
    if not w_total > 0:
        raise NumericalError(f"total certainty {w_total:.4g} is not positive")
    return w_x / w_total


def missing_process_test(dataset: Dataset, spec: AnalysisSpec, obs_noise_sigma: float,
                         n_reps: int = 10, seed=None, threshold: float = 0.15,
                         threads=None) -> MissingProcessReport:
    """Perturb the target with N(0, (3 sigma)^2) noise and compare noise shares.

    Parameters
    ----------
    dataset, spec
        Data and analysis set-up, as for :func:`full_decomposition`.
    obs_noise_sigma : float
        Assumed observational noise std of the target; the perturbation
        std is three times this value.
    n_reps : int
        Number of independent perturbations (>= 2).
    threshold : float
        ``rel_change`` below this yields the "missing process likely" verdict.

    Notes
    -----
    Only the target column is perturbed.  A lagged copy of the target used
    as a driver keeps its original values.
    """
    if not obs_noise_sigma > 0:
        raise ValidationError("obs_noise_sigma must be positive")
    if int(n_reps) < 2:
        raise ValidationError("n_reps must be >= 2")
    if not threshold > 0:
        raise ValidationError("threshold must be positive")
    n_reps = int(n_reps)

    raw, prepared = prepare_design(dataset, spec)
    drivers = prepared.columns((1 << raw.n_drivers) - 1)
    target = raw.target
    base = noise_share(target, drivers, spec)

    scale = PERTURBATION_FACTOR * obs_noise_sigma
    children = np.random.SeedSequence(seed).spawn(n_reps)

    def one(child):
        noise = scale * np.random.default_rng(child).standard_normal(target.size)
        return noise_share(target + noise, drivers, spec)

    workers = min(resolve_threads(threads), n_reps)
    if workers == 1:
        shares = [one(c) for c in children]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shares = list(pool.map(one, children))

    mean = math.fsum(shares) / n_reps
    std = float(np.std(shares, ddof=1))
    rel = abs(mean - base) / base if base > 0 else math.inf
    if scale / float(np.std(target)) < MIN_RELATIVE_PERTURBATION:
        verdict = INCONCLUSIVE
    elif rel < threshold:
        verdict = MISSING_LIKELY
    else:
        verdict = NO_MISSING
    return MissingProcessReport(
        cs_noise_base=base, cs_noise_perturbed_mean=mean, cs_noise_perturbed_std=std,
        rel_change=rel, verdict=verdict, obs_noise_sigma=float(obs_noise_sigma),
        n_reps=n_reps, threshold=float(threshold), seed=seed,
    )


def confounder_scan(result: DecompositionResult, tol: float = 0.02) -> list[str]:
    """Drivers with ``|1link| < tol`` but total contribution ``> tol`` (both in nats)."""
    if tol < 0:
        raise ValidationError("tol must be non-negative")
    flagged = []
    for i, label in enumerate(result.labels):
        if abs(result.mlinks.pure[1 << i]) < tol and result.totals[i] > tol:
            flagged.append(label)
    return flagged
