"""Frequency-response oracles: the only channel into the data-driven loop.

The reduction iteration sees an oracle with a single ``sample(s)`` method,
never system matrices.  Backends: direct state-space evaluation, replay of
recorded samples, and a conjugate-aware memoizing wrapper whose log makes
query budgets auditable.
"""

from __future__ import annotations

import csv
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import MissingSample
from .lti import StateSpaceModel, eval_transfer

__all__ = [
    "FrequencyResponseOracle",
    "SampleLog",
    "state_space_oracle",
    "replay_oracle",
    "caching_oracle",
    "save_samples",
    "load_samples",
]

#: Absolute matching tolerance of the replay backend.
REPLAY_TOL = 1e-12


class FrequencyResponseOracle(ABC):
    """One operation: evaluate the transfer function at a complex point."""

    @abstractmethod
    def sample(self, s: complex) -> complex:
        """Return H(s)."""


@dataclass(frozen=True)
class SampleRecord:
    s: complex
    value: complex
    source: str
    timestamp: float


class SampleLog:
    """Append-only record of oracle traffic with query/hit counters.

    Thread safe; entries are ordered by completion time, so concurrent
    callers must not assume a particular total order.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._records: list[SampleRecord] = []
        self._total = 0
        self._hits = 0

    def record(self, s: complex, value: complex, source: str, hit: bool) -> None:
        with self._lock:
            self._records.append(SampleRecord(s, value, source, time.time()))
            self._total += 1
            if hit:
                self._hits += 1

    @property
    def records(self) -> list[SampleRecord]:
        with self._lock:
            return list(self._records)

    @property
    def total_queries(self) -> int:
        with self._lock:
            return self._total

    @property
    def cache_hits(self) -> int:
        with self._lock:
            return self._hits


class _StateSpaceOracle(FrequencyResponseOracle):
    def __init__(self, model: StateSpaceModel):
        self._model = model
        self._lock = threading.Lock()
        self.total_queries = 0

    def sample(self, s: complex) -> complex:
        with self._lock:
            self.total_queries += 1
        return eval_transfer(self._model, s)


class _ReplayOracle(FrequencyResponseOracle):
    def __init__(self, points: np.ndarray, values: np.ndarray, tol: float):
        self._points = points
        self._values = values
        self._tol = tol
        self._lock = threading.Lock()
        self.total_queries = 0

    def sample(self, s: complex) -> complex:
        with self._lock:
            self.total_queries += 1
        dist = np.abs(self._points - complex(s))
        idx = int(np.argmin(dist))
        if dist[idx] > self._tol:
            raise MissingSample(
                f"no stored sample within {self._tol:.0e} of s = {complex(s)}; "
                "the recorded data set cannot serve this query"
            )
        return complex(self._values[idx])


class _CachingOracle(FrequencyResponseOracle):
    """Memoizing wrapper; stores upper-half-plane keys only.

    A query for conj(s) is served by conjugating the stored value, which
    both halves the stored table and enforces conjugate symmetry of the
    responses.  ``backend_queries`` counts distinct points charged to the
    data source (first-time queries); ``inner_calls`` counts actual calls
    into the wrapped oracle, which conjugate derivation can make smaller.
    """

    def __init__(self, inner: FrequencyResponseOracle, enabled: bool):
        self._inner = inner
        self._enabled = enabled
        self._lock = threading.Lock()
        self._table: dict[complex, complex] = {}
        self._seen: set[complex] = set()
        self.log = SampleLog()
        self.inner_calls = 0

    @staticmethod
    def _canonical(s: complex) -> tuple[complex, bool]:
        if s.imag < 0:
            return np.conj(s), True
        return s, False

    def sample(self, s: complex) -> complex:
        s = complex(s)
        if not self._enabled:
            value = self._inner.sample(s)
            with self._lock:
                self.inner_calls += 1
            self.log.record(s, value, "backend", hit=False)
            return value
        key, flipped = self._canonical(s)
        with self._lock:
            seen = s in self._seen
            stored = self._table.get(key)
        if seen and stored is not None:
            value = np.conj(stored) if flipped else stored
            self.log.record(s, value, "cache", hit=True)
            return complex(value)
        if stored is None:
            value = self._inner.sample(s)
            with self._lock:
                self.inner_calls += 1
                self._table[key] = np.conj(value) if flipped else value
                self._seen.add(s)
            self.log.record(s, value, "backend", hit=False)
            return complex(value)
        # First query of the mirror of a stored point: derived, but a new
        # point of information, so it counts against the backend budget.
        value = complex(np.conj(stored) if flipped else stored)
        with self._lock:
            self._seen.add(s)
        self.log.record(s, value, "conjugate", hit=False)
        return value

    @property
    def total_queries(self) -> int:
        return self.log.total_queries

    @property
    def cache_hits(self) -> int:
        return self.log.cache_hits

    @property
    def backend_queries(self) -> int:
        """Distinct sample points served so far (cache hits excluded)."""
        return self.log.total_queries - self.log.cache_hits


def state_space_oracle(model: StateSpaceModel) -> FrequencyResponseOracle:
    """Oracle evaluating C (s E - A)^{-1} B directly."""
    return _StateSpaceOracle(model)


def replay_oracle(
    records: list[tuple[complex, complex]],
    tol: float = REPLAY_TOL,
) -> FrequencyResponseOracle:
    """Oracle serving previously recorded (s, H(s)) pairs.

    Queries match the nearest stored point within ``tol``; anything
    farther raises MissingSample, signalling that the fixed data set
    cannot serve the adaptive shifts the iteration requests.
    """
    if len(records) == 0:
        raise MissingSample("empty sample set")
    points = np.asarray([complex(s) for s, _ in records])
    values = np.asarray([complex(v) for _, v in records])
    for i in range(points.size):
        close = np.abs(points - points[i]) <= tol
        if np.count_nonzero(close) > 1:
            raise MissingSample(f"duplicate sample points near s = {points[i]}")
    return _ReplayOracle(points, values, tol)


def caching_oracle(
    inner: FrequencyResponseOracle,
    enabled: bool = True,
) -> FrequencyResponseOracle:
    """Wrap an oracle with a conjugate-canonical memo table and a SampleLog."""
    return _CachingOracle(inner, enabled)


def save_samples(records, path) -> None:
    """Write samples as CSV with columns s_re, s_im, H_re, H_im.

    Accepts a SampleLog, a list of SampleRecord, or (s, H) pairs.
    """
    if isinstance(records, SampleLog):
        records = records.records
    rows = []
    for rec in records:
        if isinstance(rec, SampleRecord):
            s, value = rec.s, rec.value
        else:
            s, value = rec
        s, value = complex(s), complex(value)
        rows.append([repr(s.real), repr(s.imag), repr(value.real), repr(value.imag)])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s_re", "s_im", "H_re", "H_im"])
        writer.writerows(rows)


def load_samples(path) -> list[tuple[complex, complex]]:
    """Read a sample CSV back as (s, H) pairs for replay_oracle."""
    out: list[tuple[complex, complex]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"s_re", "s_im", "H_re", "H_im"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise MissingSample(f"sample file {path} must have columns {sorted(expected)}")
        for row in reader:
            s = complex(float(row["s_re"]), float(row["s_im"]))
            h = complex(float(row["H_re"]), float(row["H_im"]))
            out.append((s, h))
    return out
