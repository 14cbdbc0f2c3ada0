"""Calendar-aligned daily series, frames, and the standard transforms.

Dates are plain ``datetime.date`` values (end-of-day stamps, no timezone).
Series sit on irregular business-day calendars; differences and log returns
always span consecutive *available* observations, with no adjustment for
calendar gaps.  All containers are immutable after construction and every
operation is a pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateColumnError,
    DomainError,
    InsufficientDataError,
    SchemaError,
)

TradingDate = dt.date

__all__ = [
    "TradingDate",
    "DailySeries",
    "Frame",
    "StandardizationParams",
    "log_return",
    "diff",
    "to_bps_change",
    "inner_join",
    "standardize",
]


def _readonly(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def _check_dates(dates: Sequence[dt.date], context: str) -> None:
    for a, b in zip(dates, dates[1:]):
        if a >= b:
            raise SchemaError(
                f"{context}: dates must be strictly increasing, got {a} then {b}"
            )


@dataclass(frozen=True, eq=False)
class DailySeries:
    """A named, date-indexed sequence of finite float observations.

    Dates are strictly increasing with no duplicates; values contain no
    NaN or infinity.
    """

    name: str
    dates: tuple[TradingDate, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.ndim != 1:
            raise SchemaError(f"series '{self.name}': values must be 1-dimensional")
        if len(self.dates) != len(self.values):
            raise SchemaError(
                f"series '{self.name}': {len(self.dates)} dates vs "
                f"{len(self.values)} values"
            )
        _check_dates(self.dates, f"series '{self.name}'")
        if self.values.size and not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise DomainError(
                f"series '{self.name}': non-finite value at {self.dates[bad]}"
            )

    @classmethod
    def from_pairs(
        cls, name: str, pairs: Iterable[tuple[TradingDate, float]]
    ) -> "DailySeries":
        items = list(pairs)
        return cls(name, tuple(d for d, _ in items), np.array([v for _, v in items]))

    def __len__(self) -> int:
        return len(self.dates)

    def with_name(self, name: str) -> "DailySeries":
        return dataclasses.replace(self, name=name)

    def window(
        self, start: TradingDate | None = None, end: TradingDate | None = None
    ) -> "DailySeries":
        """Restrict to dates in the closed interval [start, end]."""
        keep = [
            i
            for i, d in enumerate(self.dates)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return DailySeries(
            self.name,
            tuple(self.dates[i] for i in keep),
            self.values[keep] if keep else np.empty(0),
        )


@dataclass(frozen=True, eq=False)
class Frame:
    """Named columns of equal length on a shared, strictly increasing date index."""

    dates: tuple[TradingDate, ...]
    names: tuple[str, ...]
    data: np.ndarray  # shape (n_rows, n_cols)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "names", tuple(self.names))
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            arr = arr.reshape(len(self.dates), len(self.names))
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if len(set(self.names)) != len(self.names):
            dupes = sorted({n for n in self.names if self.names.count(n) > 1})
            raise SchemaError(f"duplicate column names: {dupes}")
        if arr.shape != (len(self.dates), len(self.names)):
            raise SchemaError(
                f"data shape {arr.shape} does not match "
                f"{len(self.dates)} dates x {len(self.names)} columns"
            )
        _check_dates(self.dates, "frame")
        if arr.size and not np.all(np.isfinite(arr)):
            raise DomainError("frame contains non-finite values")

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def n_cols(self) -> int:
        return len(self.names)

    def column(self, name: str) -> np.ndarray:
        if name not in self.names:
            raise SchemaError(f"no column '{name}' in frame {list(self.names)}")
        return self.data[:, self.names.index(name)]

    def series(self, name: str) -> DailySeries:
        return DailySeries(name, self.dates, self.column(name))

    def select(self, names: Sequence[str]) -> "Frame":
        missing = [n for n in names if n not in self.names]
        if missing:
            raise SchemaError(f"columns not in frame: {missing}")
        idx = [self.names.index(n) for n in names]
        return Frame(self.dates, tuple(names), self.data[:, idx])

    def window(
        self, start: TradingDate | None = None, end: TradingDate | None = None
    ) -> "Frame":
        keep = [
            i
            for i, d in enumerate(self.dates)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return Frame(
            tuple(self.dates[i] for i in keep),
            self.names,
            self.data[keep, :] if keep else np.empty((0, self.n_cols)),
        )

    @classmethod
    def from_columns(
        cls, dates: Sequence[TradingDate], columns: Mapping[str, Sequence[float]]
    ) -> "Frame":
        names = tuple(columns)
        if names:
            data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
        else:
            data = np.empty((len(dates), 0))
        return cls(tuple(dates), names, data)


@dataclass(frozen=True, eq=False)
class StandardizationParams:
    """Per-column sample mean and sample standard deviation (n-1 denominator)."""

    names: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "means", _readonly(self.means))
        object.__setattr__(self, "stds", _readonly(self.stds))
        if np.any(self.stds <= 0.0):
            bad = self.names[int(np.flatnonzero(self.stds <= 0.0)[0])]
            raise DegenerateColumnError(f"column '{bad}': standard deviation not > 0")

    def _check_schema(self, frame: Frame) -> None:
        if frame.names != self.names:
            raise SchemaError(
                f"frame columns {list(frame.names)} do not match "
                f"standardization columns {list(self.names)}"
            )

    def transform(self, frame: Frame) -> Frame:
        """Apply the stored (x - mean) / std to a frame with matching columns."""
        self._check_schema(frame)
        return Frame(frame.dates, frame.names, (frame.data - self.means) / self.stds)

    def inverse(self, frame: Frame) -> Frame:
        """Undo :meth:`transform`: x = z * std + mean."""
        self._check_schema(frame)
        return Frame(frame.dates, frame.names, frame.data * self.stds + self.means)


def _require_points(s: DailySeries, n: int, op: str) -> None:
    if len(s) < n:
        raise InsufficientDataError(
            f"{op}: series '{s.name}' has {len(s)} points, needs at least {n}"
        )


def log_return(s: DailySeries) -> DailySeries:
    """Log returns over consecutive available observations.

    The return for each pair of consecutive observations is dated at the
    later one, so the output has one fewer point than the input.  All input
    values must be strictly positive.
    """
    _require_points(s, 2, "log_return")
    if np.any(s.values <= 0.0):
        bad = int(np.flatnonzero(s.values <= 0.0)[0])
        raise DomainError(
            f"log_return: non-positive value {s.values[bad]} at {s.dates[bad]} "
            f"in series '{s.name}'"
        )
    return DailySeries(s.name, s.dates[1:], np.diff(np.log(s.values)))


def diff(s: DailySeries) -> DailySeries:
    """First differences over consecutive available observations, dated at the later one."""
    _require_points(s, 2, "diff")
    return DailySeries(s.name, s.dates[1:], np.diff(s.values))


def to_bps_change(s: DailySeries) -> DailySeries:
    """Daily change of a percent-quoted series, in basis points.

    A move from 13.25 to 13.35 (percentage points) is +10 bps.
    """
    d = diff(s)
    return DailySeries(s.name, d.dates, d.values * 100.0)


def inner_join(series: Sequence[DailySeries]) -> Frame:
    """Align several series on the sorted intersection of their dates.

    Parameters
    ----------
    series
        One or more uniquely named series.

    Returns
    -------
    Frame
        One column per input series, restricted to dates every input has.
        A disjoint calendar yields an empty (0-row) frame, not an error.
    """
    if not series:
        raise InsufficientDataError("inner_join: need at least one series")
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise SchemaError(f"inner_join: duplicate series names: {dupes}")
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    dates = tuple(sorted(common))
    if not dates:
        return Frame((), tuple(names), np.empty((0, len(names))))
    cols = []
    for s in series:
        index = {d: i for i, d in enumerate(s.dates)}
        cols.append(s.values[[index[d] for d in dates]])
    return Frame(dates, tuple(names), np.column_stack(cols))


def standardize(frame: Frame) -> tuple[Frame, StandardizationParams]:
    """Scale every column to zero mean and unit sample standard deviation.

    Returns the standardized frame together with the per-column parameters
    needed to reproduce or invert the scaling.  A column with zero sample
    variance cannot be standardized and raises ``DegenerateColumnError``.
    """
    if frame.n_rows < 2:
        raise InsufficientDataError(
            f"standardize: need at least 2 rows, got {frame.n_rows}"
        )
    means = frame.data.mean(axis=0)
    stds = frame.data.std(axis=0, ddof=1)
    zero = np.flatnonzero(stds == 0.0)
    if zero.size:
        raise DegenerateColumnError(
            f"column '{frame.names[int(zero[0])]}' has zero sample variance"
        )
    z = (frame.data - means) / stds
    # second de-meaning pass keeps |mean| at machine precision even for
    # large-offset columns
    z = z - z.mean(axis=0)
    return Frame(frame.dates, frame.names, z), StandardizationParams(
        frame.names, means, stds
    )
