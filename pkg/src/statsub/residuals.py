"""Residual reports and sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

DEFAULT_SEED = 0x5745
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class Sampler:
    """Uniform points in a box ``[lo, hi]^m`` from a seeded generator."""

    box: tuple[float, float] = (-1.0, 1.0)
    count: int = 100
    seed: int = DEFAULT_SEED
    fixed: tuple[tuple[float, ...], ...] | None = None

    def points(self, dim: int) -> np.ndarray:
        if self.fixed is not None:
            pts = np.asarray(self.fixed, dtype=float)
            if pts.shape[1] != dim:
                raise ValueError(f"fixed point has {pts.shape[1]} coordinates, chart has {dim}")
            return pts
        rng = np.random.default_rng(self.seed)
        lo, hi = self.box
        return rng.uniform(lo, hi, size=(self.count, dim))

    def describe(self) -> dict:
        if self.fixed is not None:
            return {"points": [list(map(float, p)) for p in self.fixed]}
        return {"count": self.count, "seed": hex(self.seed), "box": [float(b) for b in self.box]}

    @classmethod
    def at(cls, *points) -> "Sampler":
        return cls(fixed=tuple(tuple(float(x) for x in p) for p in points))


@dataclass
class Entry:
    name: str
    anchor: str
    max_residual: float | None
    tolerance: float
    status: str
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != FAIL


def max_abs(arr) -> float:
    arr = np.asarray(arr, dtype=float)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


@dataclass
class ResidualReport:
    """Named identities with their max residual over the sample."""

    title: str
    sample: dict = field(default_factory=dict)
    entries: list[Entry] = field(default_factory=list)

    def check(self, name: str, anchor: str, residual, tol: float, note: str = "") -> Entry:
        r = max_abs(residual)
        status = PASS if r < tol else FAIL
        if not np.isfinite(r):
            status = FAIL
        e = Entry(name, anchor, r, tol, status, note)
        self.entries.append(e)
        return e

    def skip(self, name: str, anchor: str, reason: str, tol: float, residual=None) -> Entry:
        r = None if residual is None else max_abs(residual)
        e = Entry(name, anchor, r, tol, SKIP, reason)
        self.entries.append(e)
        return e

    def extend(self, other: "ResidualReport") -> None:
        self.entries.extend(other.entries)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def max_residual(self, *names: str) -> float:
        """Largest residual over the given entries (all evaluated entries if none given)."""
        pool = [self[n] for n in names] if names else self.entries
        vals = [e.max_residual for e in pool if e.status != SKIP and e.max_residual is not None]
        return max(vals, default=0.0)


class PreconditionError(ValueError):
    """A suite was asked to run on a structure that does not meet its hypotheses."""
