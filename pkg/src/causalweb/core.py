"""Time-series data model and lagged design matrices.

A driver lag ``l`` relative to a target observed ``lead`` steps ahead selects
the sample ``l - 1`` steps before driver time ``n``: the target sample
``x[n + lead]`` is paired with ``y[n - l + 1]`` for every ``l`` in the lag
list.  With ``lead=1`` and ``lags=(1,)`` this is the usual ``x[n+1]`` versus
``y[n]`` pairing.  Rows that would need an index before the start of the
record are dropped, never padded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "CausalWebError",
    "ValidationError",
    "NumericalError",
    "ProcessSeries",
    "Dataset",
    "DriverSpec",
    "AnalysisSpec",
    "DesignMatrix",
    "build_design",
    "parse_drivers",
]


class CausalWebError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(CausalWebError, ValueError):
    """Invalid input: bad names, shapes, parameters or file contents."""


class NumericalError(CausalWebError, ArithmeticError):
    """A computation produced a non-finite or otherwise unusable result."""


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ProcessSeries:
    """A named, finite, real-valued time series."""

    name: str
    values: np.ndarray

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValidationError("series name must be a non-empty string")
        values = _frozen_array(self.values)
        if values.ndim != 1:
            raise ValidationError(f"series {self.name!r} must be one-dimensional")
        if values.size < 1:
            raise ValidationError(f"series {self.name!r} is empty")
        bad = ~np.isfinite(values)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"series {self.name!r} has a non-finite value at index {idx}"
            )
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def with_values(self, values) -> "ProcessSeries":
        return ProcessSeries(self.name, values)


@dataclass(frozen=True)
class Dataset:
    """Time-aligned collection of equally long series with unique names."""

    series: tuple[ProcessSeries, ...]

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise ValidationError("a dataset needs at least one series")
        names = [s.name for s in series]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ValidationError(f"duplicate series names: {', '.join(dupes)}")
        lengths = {len(s) for s in series}
        if len(lengths) != 1:
            detail = ", ".join(f"{s.name}={len(s)}" for s in series)
            raise ValidationError(f"series lengths differ: {detail}")
        object.__setattr__(self, "series", series)

    @classmethod
    def from_dict(cls, mapping: Mapping[str, Sequence[float]]) -> "Dataset":
        return cls(tuple(ProcessSeries(name, vals) for name, vals in mapping.items()))

    def to_dict(self) -> dict[str, np.ndarray]:
        return {s.name: s.values for s in self.series}

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.series]

    @property
    def length(self) -> int:
        return len(self.series[0])

    def __contains__(self, name) -> bool:
        return any(s.name == name for s in self.series)

    def __getitem__(self, name: str) -> ProcessSeries:
        for s in self.series:
            if s.name == name:
                return s
        raise ValidationError(
            f"unknown process {name!r}; available: {', '.join(self.names)}"
        )

    def replace(self, *updated: ProcessSeries) -> "Dataset":
        """Return a copy with the given series swapped in by name."""
        by_name = {s.name: s for s in updated}
        for name in by_name:
            self[name]  # raises on unknown names
        return Dataset(tuple(by_name.get(s.name, s) for s in self.series))

    def select(self, names: Iterable[str]) -> "Dataset":
        return Dataset(tuple(self[n] for n in names))


@dataclass(frozen=True)
class DriverSpec:
    """One driver block: a process and the lags that make up its columns.

    All lags of one driver are treated as a single block in the
    decomposition.  ``name`` is the label used in results; it defaults to
    the process name.
    """

    process: str
    lags: tuple[int, ...] = (1,)
    name: str | None = None

    def __post_init__(self):
        lags = tuple(int(l) for l in self.lags)
        if not lags:
            raise ValidationError(f"driver {self.process!r} needs at least one lag")
        if any(l < 1 for l in lags):
            raise ValidationError(f"driver {self.process!r}: lags must be positive")
        if len(set(lags)) != len(lags):
            raise ValidationError(f"driver {self.process!r}: duplicate lags {lags}")
        object.__setattr__(self, "lags", tuple(sorted(lags)))
        if self.name == self.process:
            object.__setattr__(self, "name", None)

    @property
    def label(self) -> str:
        return self.name or self.process


def parse_drivers(text: str) -> list[DriverSpec]:
    """Parse ``"name:lag[,lag];..."`` into driver specs.

    A bare name means lag 1, and ``label=name:lags`` sets the result
    label explicitly.  When the same process appears more than once without
    explicit labels each occurrence is labelled ``name@lags`` so labels
    stay unique.
    """
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise ValidationError("no drivers given")
    parsed = []
    for part in parts:
        name, _, lag_text = part.partition(":")
        label, _, name = name.rpartition("=")
        name, label = name.strip(), label.strip() or None
        if not name:
            raise ValidationError(f"missing process name in driver {part!r}")
        try:
            lags = tuple(int(v) for v in lag_text.split(",")) if lag_text.strip() else (1,)
        except ValueError:
            raise ValidationError(f"bad lag list in driver {part!r}") from None
        parsed.append((name, lags, label))
    counts = {}
    for name, _, _ in parsed:
        counts[name] = counts.get(name, 0) + 1
    drivers = []
    for name, lags, label in parsed:
        if label is None and counts[name] > 1:
            label = f"{name}@{','.join(str(l) for l in sorted(lags))}"
        drivers.append(DriverSpec(name, lags, label))
    return drivers


@dataclass(frozen=True)
class AnalysisSpec:
    """What to decompose: target, lead, driver blocks and estimator settings.

    ``certainty_space`` selects the samples the self-certainty is evaluated
    on: ``"raw"`` uses the aligned target before the Gaussian-rank
    transform, ``"transformed"`` uses the transformed target.
    """

    target: str
    drivers: tuple[DriverSpec, ...]
    lead: int = 1
    k: int = 4
    reference: str = "cauchy"
    tail_cut: float = 0.0425
    transform: bool = True
    certainty_space: str = "raw"
    cmi_mode: str = "direct"
    neighbor_search: str = "auto"

    def __post_init__(self):
        drivers = tuple(self.drivers)
        if not drivers:
            raise ValidationError("at least one driver is required")
        if int(self.lead) < 1:
            raise ValidationError("target lead must be >= 1 (cause precedes effect)")
        labels = [d.label for d in drivers]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"driver labels are not unique: {labels}")
        for label in labels:
            if "+" in label:
                raise ValidationError(f"driver label {label!r} may not contain '+'")
        if int(self.k) < 1:
            raise ValidationError("k must be >= 1")
        if self.reference not in ("cauchy", "gaussian", "uniform"):
            raise ValidationError(f"unknown reference density {self.reference!r}")
        if not 0.0 <= self.tail_cut < 0.5:
            raise ValidationError("tail_cut must lie in [0, 0.5)")
        if self.certainty_space not in ("raw", "transformed"):
            raise ValidationError(f"unknown certainty space {self.certainty_space!r}")
        if self.cmi_mode not in ("direct", "chain"):
            raise ValidationError(f"unknown cmi mode {self.cmi_mode!r}")
        if self.neighbor_search not in ("auto", "kdtree", "brute"):
            raise ValidationError(f"unknown neighbor search {self.neighbor_search!r}")
        object.__setattr__(self, "drivers", drivers)
        object.__setattr__(self, "lead", int(self.lead))
        object.__setattr__(self, "k", int(self.k))

    @property
    def labels(self) -> list[str]:
        return [d.label for d in self.drivers]

    @property
    def depth(self) -> int:
        """Number of leading samples lost to lagging."""
        return max(max(d.lags) for d in self.drivers) + self.lead - 1

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "lead": self.lead,
            "drivers": [
                {"name": d.label, "process": d.process, "lags": list(d.lags)}
                for d in self.drivers
            ],
            "k": self.k,
            "reference": self.reference,
            "tail_cut": self.tail_cut,
            "transform": self.transform,
            "certainty_space": self.certainty_space,
            "cmi_mode": self.cmi_mode,
            "neighbor_search": self.neighbor_search,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AnalysisSpec":
        drivers = tuple(
            DriverSpec(d["process"], tuple(d["lags"]), d.get("name"))
            for d in data["drivers"]
        )
        keys = ("lead", "k", "reference", "tail_cut", "transform",
                "certainty_space", "cmi_mode", "neighbor_search")
        return cls(data["target"], drivers, **{k: data[k] for k in keys if k in data})


@dataclass(frozen=True)
class DesignMatrix:
    """Aligned sample matrix: one target column plus one block per driver."""

    target: np.ndarray
    blocks: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    times: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "target", _frozen_array(self.target))
        object.__setattr__(self, "blocks", tuple(_frozen_array(b) for b in self.blocks))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "times", _frozen_array(self.times, dtype=int))
        m = self.target.shape[0]
        for label, block in zip(self.labels, self.blocks):
            if block.ndim != 2 or block.shape[0] != m:
                raise ValidationError(f"block {label!r} has shape {block.shape}, expected ({m}, d)")

    @property
    def n_rows(self) -> int:
        return self.target.shape[0]

    @property
    def n_drivers(self) -> int:
        return len(self.blocks)

    def columns(self, mask: int) -> np.ndarray:
        """Concatenate the driver blocks selected by a bitmask (bit i = driver i)."""
        chosen = [b for i, b in enumerate(self.blocks) if mask >> i & 1]
        if not chosen:
            return np.empty((self.n_rows, 0))
        return np.hstack(chosen)

    def map_columns(self, func, target=True) -> "DesignMatrix":
        """Apply ``func`` to every driver column (and the target) independently."""
        new_target = func(self.target) if target else self.target
        new_blocks = tuple(
            np.column_stack([func(b[:, j]) for j in range(b.shape[1])]) for b in self.blocks
        )
        return DesignMatrix(new_target, new_blocks, self.labels, self.times)

    def with_target(self, target) -> "DesignMatrix":
        return DesignMatrix(target, self.blocks, self.labels, self.times)


def build_design(dataset: Dataset, spec: AnalysisSpec) -> DesignMatrix:
    """Assemble the aligned target/driver sample matrix for ``spec``.

    Row ``m`` holds the target at time ``t = m + depth`` and, for every driver
    lag ``l``, the driver sample at ``t - lead - l + 1``.
    """
    target = dataset[spec.target].values
    n_time = dataset.length
    depth = spec.depth
    n_rows = n_time - depth
    if n_rows < spec.k + 1:
        raise ValidationError(
            f"series length {n_time} leaves {n_rows} rows after lagging (depth {depth}); "
            f"need at least k + 1 = {spec.k + 1}"
        )
    times = np.arange(depth, n_time)
    blocks = []
    for drv in spec.drivers:
        values = dataset[drv.process].values
        blocks.append(np.column_stack([values[times - spec.lead - lag + 1] for lag in drv.lags]))
    return DesignMatrix(target[times], tuple(blocks), tuple(spec.labels), times)
