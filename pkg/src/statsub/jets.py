"""Batched tensor jets.

A :class:`TJet` holds a tensor field sampled at ``N`` points together with
its first and (optionally) second coordinate derivatives::

    val  (N, *shape)
    d1   (N, *shape, m)        d1[..., a]    = d/dx_a
    d2   (N, *shape, m, m)     d2[..., a, b] = d2/dx_a dx_b

Products follow the Leibniz rule and truncate to the lowest order present,
so differentiating a field (``deriv``) lowers its order by one. Everything
downstream (curvature, covariant derivatives of O'Neill tensors) is built
from these few operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# derivative axes in einsum subscripts; tensor subscripts must be lowercase
_D1, _D2 = "Y", "Z"


def _es(sub, *ops):
    return np.einsum(sub, *ops, optimize=False)


@dataclass(frozen=True, eq=False)
class TJet:
    val: np.ndarray
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None

    @property
    def order(self) -> int:
        if self.d1 is None:
            return 0
        return 1 if self.d2 is None else 2

    @property
    def shape(self) -> tuple[int, ...]:
        return self.val.shape[1:]

    @property
    def npts(self) -> int:
        return self.val.shape[0]

    @classmethod
    def const(cls, arr, npts: int, dim: int, order: int = 2) -> "TJet":
        arr = np.asarray(arr, dtype=float)
        val = np.broadcast_to(arr, (npts,) + arr.shape).copy()
        d1 = np.zeros(val.shape + (dim,)) if order >= 1 else None
        d2 = np.zeros(val.shape + (dim, dim)) if order >= 2 else None
        return cls(val, d1, d2)

    def truncate(self, order: int) -> "TJet":
        order = min(order, self.order)
        return TJet(self.val, self.d1 if order >= 1 else None, self.d2 if order >= 2 else None)

    def deriv(self) -> "TJet":
        """Coordinate gradient as a jet one order lower; new axis is last."""
        if self.d1 is None:
            raise ValueError("cannot differentiate an order-0 jet")
        return TJet(self.d1, self.d2, None)

    def _zip(self, other: "TJet", fn) -> "TJet":
        k = min(self.order, other.order)
        d1 = fn(self.d1, other.d1) if k >= 1 else None
        d2 = fn(self.d2, other.d2) if k >= 2 else None
        return TJet(fn(self.val, other.val), d1, d2)

    def __add__(self, other: "TJet") -> "TJet":
        return self._zip(other, np.add)

    def __sub__(self, other: "TJet") -> "TJet":
        return self._zip(other, np.subtract)

    def __neg__(self) -> "TJet":
        return self.scale(-1.0)

    def scale(self, a: float) -> "TJet":
        return TJet(
            a * self.val,
            None if self.d1 is None else a * self.d1,
            None if self.d2 is None else a * self.d2,
        )

    def __mul__(self, a: float) -> "TJet":
        return self.scale(a)

    __rmul__ = __mul__

    def __getitem__(self, idx) -> "TJet":
        # idx addresses tensor axes only; derivative axes are trailing
        if not isinstance(idx, tuple):
            idx = (idx,)
        full = (slice(None),) + idx
        return TJet(
            self.val[full],
            None if self.d1 is None else self.d1[full],
            None if self.d2 is None else self.d2[full],
        )

    def reshape(self, *shape) -> "TJet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        n = self.npts
        nt = len(self.shape)

        def rs(arr, extra):
            return arr.reshape((n,) + tuple(shape) + arr.shape[1 + nt:])

        return TJet(
            self.val.reshape((n,) + tuple(shape)),
            None if self.d1 is None else rs(self.d1, 1),
            None if self.d2 is None else rs(self.d2, 2),
        )

    def transpose(self, *axes) -> "TJet":
        nt = len(self.shape)

        def tr(arr, extra):
            perm = [0] + [1 + a for a in axes] + list(range(1 + nt, 1 + nt + extra))
            return arr.transpose(perm)

        return TJet(
            tr(self.val, 0),
            None if self.d1 is None else tr(self.d1, 1),
            None if self.d2 is None else tr(self.d2, 2),
        )

    def at(self, k: int) -> "TJet":
        """Restrict to the single sample point ``k`` (keeps a batch axis of 1)."""
        sl = slice(k, k + 1)
        return TJet(
            self.val[sl],
            None if self.d1 is None else self.d1[sl],
            None if self.d2 is None else self.d2[sl],
        )


def stack(jets: list[TJet], axis: int = 0) -> TJet:
    """Stack jets along a new tensor axis (``axis`` counts tensor axes only)."""
    k = min(j.order for j in jets)
    ax = axis + 1
    return TJet(
        np.stack([j.val for j in jets], ax),
        np.stack([j.d1 for j in jets], ax) if k >= 1 else None,
        np.stack([j.d2 for j in jets], ax) if k >= 2 else None,
    )


def _parse(subscripts: str):
    lhs, out = subscripts.replace(" ", "").split("->")
    return lhs.split(","), out


def _contract2(sa: str, a, sb: str, b, so: str):
    """Leibniz rule for one pairwise einsum; either side may be a plain array."""
    ja, jb = isinstance(a, TJet), isinstance(b, TJet)
    pa = "..." + sa if ja else sa
    pb = "..." + sb if jb else sb
    po = "..." + so
    av = a.val if ja else a
    bv = b.val if jb else b
    val = _es(f"{pa},{pb}->{po}", av, bv)
    order = min(x.order for x in (a, b) if isinstance(x, TJet))
    d1 = d2 = None
    if order >= 1:
        d1 = 0
        if ja:
            d1 = d1 + _es(f"{pa}{_D1},{pb}->{po}{_D1}", a.d1, bv)
        if jb:
            d1 = d1 + _es(f"{pa},{pb}{_D1}->{po}{_D1}", av, b.d1)
    if order >= 2:
        d2 = 0
        if ja:
            d2 = d2 + _es(f"{pa}{_D1}{_D2},{pb}->{po}{_D1}{_D2}", a.d2, bv)
        if jb:
            d2 = d2 + _es(f"{pa},{pb}{_D1}{_D2}->{po}{_D1}{_D2}", av, b.d2)
        if ja and jb:
            cross = _es(f"{pa}{_D1},{pb}{_D2}->{po}{_D1}{_D2}", a.d1, b.d1)
            d2 = d2 + cross + np.swapaxes(cross, -1, -2)
    return TJet(val, d1, d2)


def contract(subscripts: str, *ops) -> TJet:
    """Einsum over tensor axes with jets propagated by the product rule.

    Operands are TJets or constant arrays (no batch axis). At least one
    operand must be a TJet. Use lowercase letters only.
    """
    subs, out = _parse(subscripts)
    if len(subs) != len(ops):
        raise ValueError("operand count does not match subscripts")
    if len(ops) == 1:
        ops = ops + (np.array(1.0),)
        subs = subs + [""]
    cur_s, cur = subs[0], ops[0]
    for i in range(1, len(ops)):
        later = "".join(subs[i + 1:]) + out
        keep = "".join(
            dict.fromkeys(c for c in cur_s + subs[i] if c in later)
        )
        if i == len(ops) - 1:
            keep = out
        if not isinstance(cur, TJet) and not isinstance(ops[i], TJet):
            cur = _es(f"{cur_s},{subs[i]}->{keep}", cur, ops[i])
        else:
            cur = _contract2(cur_s, cur, subs[i], ops[i], keep)
        cur_s = keep
    return cur


def matvec(M: TJet, v: TJet) -> TJet:
    """Apply a (1,1) tensor M[k, l] to vectors v[..., l] (any leading field axes)."""
    nb = len(v.shape) - 1
    letters = "abcdefgh"[:nb]
    return contract(f"kl,{letters}l->{letters}k", M, v)


def inv(M: TJet) -> TJet:
    """Matrix inverse of a square-matrix jet."""
    Mi = np.linalg.inv(M.val)
    d1 = d2 = None
    if M.order >= 1:
        d1 = -_es("...ij,...jkY,...kl->...ilY", Mi, M.d1, Mi)
    if M.order >= 2:
        t = _es("...ijY,...jk,...klZ->...ilYZ", M.d1, Mi, M.d1)
        inner = t + np.swapaxes(t, -1, -2) - M.d2
        d2 = _es("...ij,...jkYZ,...kl->...ilYZ", Mi, inner, Mi)
    return TJet(Mi, d1, d2)


def pad_coords(J: TJet, dim: int) -> TJet:
    """Re-express a jet over the first ``n`` coordinates as one over ``dim`` coordinates."""
    def pad(arr, k):
        if arr is None:
            return None
        n = arr.shape[-1]
        widths = [(0, 0)] * (arr.ndim - k) + [(0, dim - n)] * k
        return np.pad(arr, widths)

    return TJet(J.val, pad(J.d1, 1), pad(J.d2, 2))


def restrict_coords(J: TJet, idx) -> TJet:
    """Keep only derivatives along the coordinates ``idx`` (0-based)."""
    idx = list(idx)
    d1 = None if J.d1 is None else J.d1[..., idx]
    d2 = None if J.d2 is None else J.d2[..., idx, :][..., idx]
    return TJet(J.val, d1, d2)


def concat(jets, axis: int = 0) -> TJet:
    """Concatenate along an existing tensor axis."""
    k = min(j.order for j in jets)
    ax = axis + 1
    return TJet(
        np.concatenate([j.val for j in jets], ax),
        np.concatenate([j.d1 for j in jets], ax) if k >= 1 else None,
        np.concatenate([j.d2 for j in jets], ax) if k >= 2 else None,
    )
