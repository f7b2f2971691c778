"""Subset-lattice decomposition of I(x; y_1..y_N) into pure mlinks.

For every non-empty driver subset ``S`` the raw term is the conditional MI
of the target with the drivers in ``S`` given all remaining drivers,
``I(x; y_S | y_{not S})``.  Pure mlinks remove everything already carried
by strict subsets::

    pure(S) = raw(S) - sum(pure(T) for non-empty T strictly inside S)

which is evaluated in order of increasing ``|S|``.  Each driver receives
``pure(S) / |S|`` from every subset it belongs to, and normalising by the
total certainty ``W(x | Y) = W(x) + I(x; Y)`` gives causal strengths that
sum to one together with the unmodelled share ``W(x) / W(x | Y)``.

Subsets are integer bitmasks; bit ``i`` stands for driver ``i``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .certainty import (NEGATIVE_CERTAINTY_WARNING, ReferenceDensity, fit_reference,
                        self_certainty)
from .core import AnalysisSpec, Dataset, DesignMatrix, NumericalError, ValidationError, build_design
from .estimators import EstimatorParams, cmi_ksg, mi_ksg
from .preprocess import gauss_rank_transform

__all__ = [
    "DEFAULT_MAX_DRIVERS",
    "subset_masks",
    "members",
    "subset_key",
    "parse_subset_key",
    "MlinkTable",
    "DecompositionResult",
    "raw_cmi_for_subset",
    "compute_raw_table",
    "pure_mlinks",
    "driver_totals",
    "causal_strengths",
    "prepare_design",
    "decompose_design",
    "full_decomposition",
    "resolve_threads",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_DRIVERS = 16
THREADS_ENV = "CAUSALWEB_THREADS"


def subset_masks(n: int) -> list[int]:
    """All non-empty subsets of ``n`` drivers: by size, then lexicographically."""
    return [sum(1 << i for i in combo)
            for size in range(1, n + 1)
            for combo in combinations(range(n), size)]


def members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def subset_key(mask: int, labels) -> str:
    return "+".join(labels[i] for i in members(mask))


def parse_subset_key(key: str, labels) -> int:
    index = {label: i for i, label in enumerate(labels)}
    try:
        return sum(1 << index[part] for part in key.split("+"))
    except KeyError as exc:
        raise ValidationError(f"unknown driver {exc.args[0]!r} in subset {key!r}") from None


def _proper_submasks(mask):
    sub = (mask - 1) & mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class MlinkTable:
    """Raw subset CMIs and pure mlinks, both keyed by subset bitmask."""

    n_drivers: int
    raw: dict
    pure: dict

    def __post_init__(self):
        expected = (1 << self.n_drivers) - 1
        for name, table in (("raw", self.raw), ("pure", self.pure)):
            if len(table) != expected:
                raise ValidationError(
                    f"{name} table has {len(table)} entries, expected {expected}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n_drivers) - 1


def raw_cmi_for_subset(design: DesignMatrix, mask: int, params: EstimatorParams) -> float:
    """I(target; drivers in ``mask`` | all other drivers)."""
    full = (1 << design.n_drivers) - 1
    if not 0 < mask <= full:
        raise ValidationError(f"invalid subset mask {mask} for {design.n_drivers} drivers")
    active = design.columns(mask)
    rest = full & ~mask
    if rest == 0:
        return mi_ksg(design.target, active, params)
    return cmi_ksg(design.target, active, design.columns(rest), params)


def resolve_threads(threads=None) -> int:
    """Worker count: explicit value, else ``$CAUSALWEB_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ValidationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        else:
            threads = os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValidationError("thread count must be >= 1")
    return threads


def compute_raw_table(design: DesignMatrix, params: EstimatorParams, threads=None) -> dict:
    """Estimate every raw subset term; independent tasks, gathered by mask."""
    masks = subset_masks(design.n_drivers)
    workers = min(resolve_threads(threads), len(masks))
    if workers == 1:
        values = [raw_cmi_for_subset(design, m, params) for m in masks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda m: raw_cmi_for_subset(design, m, params), masks))
    return dict(zip(masks, values))


def pure_mlinks(raw: Mapping[int, float], n: int | None = None) -> dict:
    """Pure mlinks from raw subset terms by subtracting all lower-order links."""
    if n is None:
        n = max(raw).bit_length() if raw else 0
    pure = {}
    for mask in subset_masks(n):
        if mask not in raw:
            raise ValidationError(f"raw table is missing subset {members(mask)}")
        lower = [pure[sub] for sub in _proper_submasks(mask)]
        pure[mask] = float(raw[mask]) - math.fsum(lower)
    return pure


def driver_totals(pure: Mapping[int, float], n: int) -> list[float]:
    """Total contribution of each driver: sum of pure(S) / |S| over subsets containing it."""
    totals = []
    for i in range(n):
        shares = [value / bin(mask).count("1") for mask, value in pure.items() if mask >> i & 1]
        totals.append(math.fsum(shares))
    return totals


def causal_strengths(totals, i_full: float, w_x: float) -> tuple[list[float], float]:
    """Normalise totals and the self-certainty by ``W(x|Y) = W(x) + I_full``."""
    w_total = float(w_x) + float(i_full)
    if not w_total > 0:
        raise NumericalError(f"total certainty W(x|Y) = {w_total:.6g} is not positive")
    return [t / w_total for t in totals], float(w_x) / w_total


@dataclass
class DecompositionResult:
    """Everything a decomposition produces; serialised by :mod:`causalweb.io`."""

    spec: AnalysisSpec
    mlinks: MlinkTable
    totals: list
    i_full: float
    w_x: float
    w_total: float
    cs: list
    cs_noise: float
    reference: ReferenceDensity
    n_rows: int
    seed: int | None = None
    flags: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def labels(self) -> list[str]:
        return self.spec.labels

    @property
    def n_drivers(self) -> int:
        return len(self.spec.drivers)

    def cs_by_label(self) -> dict[str, float]:
        return dict(zip(self.labels, self.cs))

    def totals_by_label(self) -> dict[str, float]:
        return dict(zip(self.labels, self.totals))

    def mask(self, *labels: str) -> int:
        return parse_subset_key("+".join(labels), self.labels)

    def raw(self, *labels: str) -> float:
        return self.mlinks.raw[self.mask(*labels)]

    def pure(self, *labels: str) -> float:
        return self.mlinks.pure[self.mask(*labels)]

    def link_strength(self, *labels: str) -> float:
        """Pure mlink of the named drivers, normalised by W(x|Y)."""
        return self.pure(*labels) / self.w_total

    def normalized_links(self) -> dict[int, float]:
        return {m: v / self.w_total for m, v in self.mlinks.pure.items()}

    def order_contributions(self) -> dict[str, dict[int, float]]:
        """Per driver and link order m: sum of its m-links divided by m, normalised.

        Summing a driver's row over m gives its causal strength.
        """
        out = {}
        for i, label in enumerate(self.labels):
            row = {}
            for size in range(1, self.n_drivers + 1):
                shares = [v / size for m, v in self.mlinks.pure.items()
                          if m >> i & 1 and bin(m).count("1") == size]
                row[size] = math.fsum(shares) / self.w_total
            out[label] = row
        return out


def _check_driver_cap(n, max_drivers):
    if n > max_drivers:
        raise ValidationError(
            f"{n} drivers need {2 ** n - 1} conditional MI estimates; the cap is "
            f"{max_drivers} drivers (raise max_drivers to accept the exponential cost)"
        )


def prepare_design(dataset: Dataset, spec: AnalysisSpec) -> tuple[DesignMatrix, DesignMatrix]:
    """Aligned design in raw units and after the per-column rank transform."""
    design = build_design(dataset, spec)
    if not spec.transform:
        return design, design
    transformed = design.map_columns(lambda col: gauss_rank_transform(col, spec.tail_cut))
    return design, transformed


def decompose_design(design: DesignMatrix, spec: AnalysisSpec, certainty_samples,
                     threads=None, max_drivers: int = DEFAULT_MAX_DRIVERS,
                     seed=None) -> DecompositionResult:
    """Run the decomposition on an already prepared (transformed) design.

    ``certainty_samples`` are the target values the self-certainty and its
    reference density are computed from.
    """
    n = design.n_drivers
    _check_driver_cap(n, max_drivers)
    params = EstimatorParams(spec.k, spec.cmi_mode, spec.neighbor_search)
    raw = compute_raw_table(design, params, threads)
    pure = pure_mlinks(raw, n)
    table = MlinkTable(n, raw, pure)
    i_full = raw[table.full_mask]

    reference = fit_reference(certainty_samples, spec.reference)
    w_x = self_certainty(certainty_samples, reference, params)
    flags = [f"certainty_space:{spec.certainty_space}"]
    if w_x < NEGATIVE_CERTAINTY_WARNING:
        flags.append("negative_self_certainty")

    totals = driver_totals(pure, n)
    cs, cs_noise = causal_strengths(totals, i_full, w_x)
    log.debug("decomposed %d drivers over %d rows: I_full=%.4f W_x=%.4f",
              n, design.n_rows, i_full, w_x)
    return DecompositionResult(
        spec=spec, mlinks=table, totals=totals, i_full=i_full, w_x=w_x,
        w_total=w_x + i_full, cs=cs, cs_noise=cs_noise, reference=reference,
        n_rows=design.n_rows, seed=seed, flags=flags,
    )


def certainty_samples_for(spec: AnalysisSpec, raw: DesignMatrix, transformed: DesignMatrix):
    return raw.target if spec.certainty_space == "raw" else transformed.target


def full_decomposition(dataset: Dataset, spec: AnalysisSpec, threads=None,
                       max_drivers: int = DEFAULT_MAX_DRIVERS, seed=None) -> DecompositionResult:
    """Build the design for ``spec``, estimate all 2^N - 1 terms and W(x), and normalise."""
    _check_driver_cap(len(spec.drivers), max_drivers)
    raw, transformed = prepare_design(dataset, spec)
    return decompose_design(transformed, spec, certainty_samples_for(spec, raw, transformed),
                            threads=threads, max_drivers=max_drivers, seed=seed)
