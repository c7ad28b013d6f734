"""Shared fixtures.

``twisted`` is a statistical submersion with no special structure: the total
metric is ``[[g~ + B^T h B, B^T h], [h B, h]]`` (so the horizontal lifts are
isometric to the base for any B, h) and the connection is Levi-Civita plus a
totally symmetric cubic form written in the adapted coframe, whose purely
horizontal part depends on the base coordinates only. The base carries the
matching statistical connection, which makes pi_* nabla_X Y = nabla~ X_* Y_*.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from statsub.expr import parse
from statsub.fields import DerivedField, ExprField
from statsub.geometry import lc_gamma
from statsub.jets import TJet, concat, contract, inv
from statsub.manifest import fixture
from statsub.submersion import SubmersionSetup


def expr_field(shape, entries, dim):
    comps = np.full(shape, None, dtype=object)
    for idx, src in entries.items():
        comps[idx] = parse(src, dim)
    return ExprField(comps, dim)


BASE_METRIC = {(0, 0): "2 + 0.3*sin(x2)", (1, 1): "1.5 + 0.2*x1^2", (0, 1): "0.1*x1", (1, 0): "0.1*x1"}
FIBER_METRIC = {(0, 0): "-1 + 0.1*cos(x4)*x1", (1, 1): "1.2 + 0.1*x3*x2", (0, 1): "0.05*x3", (1, 0): "0.05*x3"}
TWIST = {(0, 0): "0.3*x2*x3", (0, 1): "0.2*sin(x4)", (1, 0): "0.1*x1", (1, 1): "0.25*x3*x4"}
# cubic form entries (index triple, expression, purely horizontal)
CUBIC = {
    (0, 0, 0): ("0.2*x2", True),
    (0, 1, 1): ("0.1*x1", True),
    (0, 0, 2): ("0.3*x3", False),
    (1, 2, 3): ("0.2*exp(x1)", False),
    (2, 2, 2): ("0.1*x4", False),
    (1, 3, 3): ("0.15", False),
    (0, 1, 2): ("0.1*x2*x4", False),
}


def _cubic(dim, base_only):
    comps = np.full((4, 4, 4), None, dtype=object)
    for idx, (src, horizontal) in CUBIC.items():
        if base_only and not horizontal:
            continue
        for perm in set(itertools.permutations(idx)):
            comps[perm] = parse(src, dim)
    if base_only:
        comps = comps[:2, :2, :2]
    return ExprField(comps, dim)


def build_twisted():
    gt2 = expr_field((2, 2), BASE_METRIC, 2)
    gt4 = expr_field((2, 2), BASE_METRIC, 4)
    h = expr_field((2, 2), FIBER_METRIC, 4)
    B = expr_field((2, 2), TWIST, 4)
    C4, C2 = _cubic(4, False), _cubic(2, True)

    def gjet(pts):
        G, H, Bj = gt4.jet(pts), h.jet(pts), B.jet(pts)
        BhB = contract("ua,uv,vb->ab", Bj, H, Bj)
        hB = contract("uv,vb->ub", H, Bj)
        return concat([concat([G + BhB, hB.transpose(1, 0)], 1), concat([hB, H], 1)], 0)

    def coframe(pts):
        Bj = B.jet(pts)
        n = len(pts)
        eye = TJet.const(np.eye(2), n, 4)
        zero = TJet.const(np.zeros((2, 2)), n, 4)
        return concat([concat([eye, zero], 1), concat([Bj, eye], 1)], 0)

    def conn(pts):
        gj = gjet(pts)
        gi = inv(gj)
        Th = coframe(pts)
        c = contract("pqr,pi,qj,rk->ijk", C4.jet(pts), Th, Th, Th)
        return lc_gamma(gj, gi) + contract("ijl,lk->ijk", c, gi)

    def bconn(pts):
        gj = gt2.jet(pts)
        gi = inv(gj)
        return lc_gamma(gj, gi) + contract("ijl,lk->ijk", C2.jet(pts), gi)

    g = DerivedField(gjet, 4, (4, 4))
    return g, DerivedField(conn, 4, (4, 4, 4)), gt2, DerivedField(bconn, 2, (2, 2, 2))


SKEW = {(0, 1): "1 + 0.2*x3", (0, 2): "0.3*sin(x1)", (0, 3): "-0.4", (1, 2): "0.5*x4", (1, 3): "1 + 0.1*x1*x2", (2, 3): "0.8 + 0.1*x2"}


def skew_j(g):
    """A g-skew (1,1) tensor g^{-1} W, W antisymmetric. It is not almost complex."""
    W = np.full((4, 4), None, dtype=object)
    for (i, j), src in SKEW.items():
        W[i, j] = parse(src, 4)
        W[j, i] = parse(f"-({src})", 4)
    Wf = ExprField(W, 4)

    def fn(pts):
        return contract("ik,kj->ij", inv(g.jet(pts)), Wf.jet(pts))

    return DerivedField(fn, 4, (4, 4))


@pytest.fixture(scope="session")
def twisted():
    g, conn, bg, bc = build_twisted()
    return SubmersionSetup(g, conn, bg, bc)


@pytest.fixture(scope="session")
def twisted_skew(twisted):
    return SubmersionSetup(twisted.g, twisted.conn, twisted.base_g, twisted.base_conn, skew_j(twisted.g))


@pytest.fixture(scope="session")
def ex1():
    return fixture("example1")


@pytest.fixture(scope="session")
def ex2():
    return fixture("example2")


@pytest.fixture(scope="session")
def flat():
    return fixture("flat_product")


@pytest.fixture(scope="session")
def hyp():
    return fixture("hyperbolic_plane")


@pytest.fixture(scope="session")
def perturbed():
    return fixture("perturbed_example1")
