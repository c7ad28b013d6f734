"""Tensor fields on a single coordinate chart.

Index conventions, fixed for the whole package:

* connection ``G[i, j, k]`` is the k-th component of ``nabla_{d_i} d_j``;
* complex structure ``J[i, j]`` acts on columns, ``(J E)^i = J[i, j] E^j``,
  so ``J d_j = sum_i J[i, j] d_i``;
* tensor jets carry a leading sample-point axis (see :mod:`statsub.jets`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .expr import ScalarExpr, constant, eval_jet2_batch, is_zero, parse
from .jets import TJet


class FieldError(ValueError):
    pass


def as_points(points, dim: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != dim:
        raise FieldError(f"points have {pts.shape[1]} coordinates, chart has {dim}")
    return pts


class Field:
    """Anything that can produce a tensor jet at a batch of points."""

    dim: int
    shape: tuple[int, ...]

    def jet(self, points) -> TJet:  # pragma: no cover - interface
        raise NotImplementedError


class ExprField(Field):
    """Tensor field whose components are parsed expressions (``None`` is zero)."""

    def __init__(self, components: np.ndarray, dim: int):
        comps = np.asarray(components, dtype=object)
        for idx, e in np.ndenumerate(comps):
            if e is not None and e.dim != dim:
                raise FieldError(f"component {idx} has dimension {e.dim}, expected {dim}")
        self.components = comps
        self.dim = dim
        self.shape = comps.shape

    def jet(self, points) -> TJet:
        pts = as_points(points, self.dim)
        n, m = pts.shape
        val = np.zeros((n,) + self.shape)
        d1 = np.zeros((n,) + self.shape + (m,))
        d2 = np.zeros((n,) + self.shape + (m, m))
        for idx, e in np.ndenumerate(self.components):
            if is_zero(e):
                continue
            v, g, h = eval_jet2_batch(e, pts)
            sl = (slice(None),) + idx
            val[sl], d1[sl], d2[sl] = v, g, h
        return TJet(val, d1, d2)

    def nonzero(self) -> list[tuple[tuple[int, ...], ScalarExpr]]:
        return [(idx, e) for idx, e in np.ndenumerate(self.components) if not is_zero(e)]

    @classmethod
    def _empty(cls, shape):
        return np.full(shape, None, dtype=object)


class MetricField(ExprField):
    """Symmetric metric g_ij built from (i, j, expr) entries, 1-based."""

    def __init__(self, components: np.ndarray, dim: int):
        super().__init__(components, dim)
        if self.shape != (dim, dim):
            raise FieldError("metric must be dim x dim")
        for i in range(dim):
            for j in range(i):
                if self.components[i, j] != self.components[j, i]:
                    raise FieldError(f"metric entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable) -> "MetricField":
        comps = cls._empty((dim, dim))
        for i, j, e in entries:
            e = _expr(e, dim)
            _check_index((i, j), dim)
            for a, b in ((i, j), (j, i)):
                prev = comps[a - 1, b - 1]
                if prev is not None and prev != e:
                    raise FieldError(f"conflicting metric entries at ({i},{j})")
                comps[a - 1, b - 1] = e
        return cls(comps, dim)

    @classmethod
    def diagonal(cls, dim: int, diag: Iterable) -> "MetricField":
        return cls.from_entries(dim, [(i + 1, i + 1, e) for i, e in enumerate(diag)])


class ConnectionField(ExprField):
    """Christoffel symbols; entries are (k, i, j, expr) for Gamma^k_ij."""

    def __init__(self, components: np.ndarray, dim: int):
        super().__init__(components, dim)
        if self.shape != (dim, dim, dim):
            raise FieldError("connection must be dim x dim x dim")

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable) -> "ConnectionField":
        comps = cls._empty((dim, dim, dim))
        for k, i, j, e in entries:
            _check_index((k, i, j), dim)
            comps[i - 1, j - 1, k - 1] = _expr(e, dim)
        return cls(comps, dim)

    @classmethod
    def flat(cls, dim: int) -> "ConnectionField":
        return cls(cls._empty((dim, dim, dim)), dim)


class ComplexStructureField(ExprField):
    """J as a matrix of expressions; entries are (i, j, expr) for J_ij."""

    def __init__(self, components: np.ndarray, dim: int):
        super().__init__(components, dim)
        if dim % 2:
            raise FieldError("an almost complex structure needs even dimension")
        if self.shape != (dim, dim):
            raise FieldError("complex structure must be dim x dim")

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable) -> "ComplexStructureField":
        comps = cls._empty((dim, dim))
        for i, j, e in entries:
            _check_index((i, j), dim)
            comps[i - 1, j - 1] = _expr(e, dim)
        return cls(comps, dim)


class VectorFieldSpec(ExprField):
    def __init__(self, components, dim: int):
        super().__init__(components, dim)
        if self.shape != (dim,):
            raise FieldError("vector field must have dim components")

    @classmethod
    def from_exprs(cls, dim: int, exprs: Iterable) -> "VectorFieldSpec":
        comps = cls._empty((dim,))
        for i, e in enumerate(exprs):
            comps[i] = None if e is None else _expr(e, dim)
        return cls(comps, dim)


def coordinate_field(i: int, dim: int) -> VectorFieldSpec:
    """The coordinate field d_i (1-based)."""
    _check_index((i,), dim)
    comps = ExprField._empty((dim,))
    comps[i - 1] = constant(1.0, dim)
    return VectorFieldSpec(comps, dim)


@dataclass
class DerivedField(Field):
    """A field computed from other fields' jets, e.g. a dual connection."""

    fn: Callable[[np.ndarray], TJet]
    dim: int
    shape: tuple[int, ...]

    def jet(self, points) -> TJet:
        return self.fn(as_points(points, self.dim))


def _expr(e, dim: int) -> ScalarExpr:
    if isinstance(e, ScalarExpr):
        if e.dim != dim:
            raise FieldError(f"expression dimension {e.dim} != chart dimension {dim}")
        return e
    if isinstance(e, int | float):
        return constant(e, dim)
    return parse(str(e), dim)


def _check_index(idx, dim):
    for i in idx:
        if not isinstance(i, int | np.integer) or not 1 <= i <= dim:
            raise FieldError(f"index {i} out of range 1..{dim}")
