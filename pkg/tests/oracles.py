"""Independent reference values: the example2 table of known tensor values and a sympy rebuild of the split."""

from __future__ import annotations

import json
from importlib import resources

import numpy as np
import sympy as sp

from statsub.submersion import SubmersionJets

E = np.eye(4)


def _e(k):
    return lambda x: E[k - 1]


def _c(k, f):
    return lambda x: f(x) * E[k - 1]


def _zero(x):
    return np.zeros(4)


def ex1(x):
    return np.exp(x[0])


def emx2(x):
    return np.exp(-x[1])


def ex12(x):
    return np.exp(x[0] - x[1])


def _neg(f):
    return lambda x: -f(x)


# (kind, E index, F index, expected (nabla_E F or tensor_E F) as a function of the point); 1-based
GOLDEN = [
    ("T", 3, 3, _e(2)),
    ("T", 3, 4, _c(1, _neg(emx2))),
    ("T", 4, 3, _c(1, _neg(emx2))),
    ("T", 4, 4, _zero),
    ("T", 3, 1, _e(4)),
    ("T", 3, 2, _c(3, _neg(emx2))),
    ("T", 4, 1, _c(3, _neg(emx2))),
    ("T", 4, 2, _c(4, lambda x: -1.0)),
    ("fiber", 3, 3, _zero),
    ("fiber", 3, 4, _c(4, _neg(ex1))),
    ("fiber", 4, 3, _c(4, _neg(ex1))),
    ("fiber", 4, 4, _c(3, ex12)),
    ("H", 3, 1, _zero),
    ("H", 3, 2, _c(2, ex1)),
    ("H", 4, 1, _c(2, ex1)),
    ("H", 4, 2, _c(1, _neg(ex12))),
    ("A", 1, 3, _zero),
    ("A", 1, 4, _c(2, ex1)),
    ("A", 2, 3, _c(2, ex1)),
    ("A", 2, 4, _c(1, _neg(ex12))),
    ("V", 1, 3, _e(4)),
    ("V", 1, 4, _c(3, _neg(emx2))),
    ("V", 2, 3, _c(3, _neg(emx2))),
    ("V", 2, 4, _c(4, lambda x: -1.0)),
    ("H", 1, 1, _c(2, lambda x: -1.0)),
    ("H", 1, 2, _c(1, emx2)),
    ("H", 2, 1, _c(1, emx2)),
    ("H", 2, 2, _zero),
    ("A", 1, 1, _zero),
    ("A", 1, 2, _c(4, ex1)),
    ("A", 2, 1, _c(4, ex1)),
    ("A", 2, 2, _c(3, _neg(ex12))),
]


def golden_gaps(setup, points) -> np.ndarray:
    """Componentwise |computed - printed| for every table cell, shape (cells, points, 4)."""
    sj = SubmersionJets(setup, points)
    G, H, V = sj.gamma.val, sj.H.val, sj.V.val
    T, A = sj.T.val, sj.A.val
    out = []
    for kind, a, b, f in GOLDEN:
        i, j = a - 1, b - 1
        if kind == "T":
            got = T[:, i, j]
        elif kind == "A":
            got = A[:, i, j]
        elif kind == "H":
            got = np.einsum("nkl,nl->nk", H, G[:, i, j])
        else:  # fiber connection and V nabla are both the vertical part
            got = np.einsum("nkl,nl->nk", V, G[:, i, j])
        want = np.array([f(p) for p in points])
        out.append(np.abs(got - want))
    return np.array(out)


# --- sympy rebuild -----------------------------------------------------------------------


X = sp.symbols("x1:5")


def _sym(src: str):
    return sp.sympify(str(src).replace("^", "**"), locals={f"x{i + 1}": X[i] for i in range(4)})


def load_symbolic(name: str):
    """Metric and Christoffel symbols of a bundled fixture, straight from its JSON."""
    doc = json.loads(resources.files("statsub.fixtures").joinpath(f"{name}.json").read_text())
    m = doc["dim"]
    g = sp.zeros(m, m)
    for i, j, e in doc["metric"]:
        g[i - 1, j - 1] = g[j - 1, i - 1] = _sym(e)
    G = [[[sp.Integer(0)] * m for _ in range(m)] for _ in range(m)]
    for k, i, j, e in doc["connection"]:
        G[i - 1][j - 1][k - 1] = _sym(e)
    n = doc["submersion"]["base_dim"] if "submersion" in doc else None
    return g, G, n


class SymbolicSplit:
    """T, A and their duals computed symbolically from g and Gamma."""

    def __init__(self, g: sp.Matrix, G, n: int):
        m = g.shape[0]
        self.m, self.n, self.g, self.G = m, n, g, G
        x = X[:m]
        ginv = g.inv()
        self.Gs = [[None] * m for _ in range(m)]
        for i in range(m):
            for l in range(m):
                v = sp.Matrix([sp.diff(g[j, l], x[i]) - sum(G[i][j][q] * g[q, l] for q in range(m)) for j in range(m)])
                self.Gs[i][l] = list(ginv * v)
        B = g[n:, n:].inv() * g[n:, :n]
        L = sp.Matrix.vstack(sp.eye(n), -B)
        self.H = L * sp.Matrix.hstack(sp.eye(n), sp.zeros(n, m - n))
        self.V = sp.eye(m) - self.H
        self.x = x

    def nab(self, Gm, Xv, Yv):
        m, x = self.m, self.x
        return sp.Matrix(
            [
                sum(Xv[i] * sp.diff(Yv[k], x[i]) for i in range(m))
                + sum(Xv[i] * Gm[i][j][k] * Yv[j] for i in range(m) for j in range(m))
                for k in range(m)
            ]
        )

    def tensor(self, kind: str, star: bool = False):
        """Lambdified ``[e][f] -> vector`` for T or A on coordinate fields."""
        Gm = self.Gs if star else self.G
        m, H, V = self.m, self.H, self.V
        rows = []
        for e in range(m):
            Ev = sp.Matrix([1 if i == e else 0 for i in range(m)])
            row = []
            for f in range(m):
                Fv = sp.Matrix([1 if i == f else 0 for i in range(m)])
                P = V if kind == "T" else H
                row.append(H * self.nab(Gm, P * Ev, V * Fv) + V * self.nab(Gm, P * Ev, H * Fv))
            rows.append(row)
        flat = [list(c) for r in rows for c in r]
        fn = sp.lambdify(self.x, flat, "numpy")
        return lambda p: np.array(fn(*p), dtype=float).reshape(m, m, m)

    def dual(self):
        fn = sp.lambdify(self.x, [[list(self.Gs[i][l]) for l in range(self.m)] for i in range(self.m)], "numpy")
        return lambda p: np.array(fn(*p), dtype=float)


# --- finite differences and random inputs ---------------------------------------------


def fd_curvature(conn, p, h=1e-5) -> np.ndarray:
    """R[i, j, l, k] from central differences of Gamma values."""
    m = len(p)

    def G(q):
        return conn.jet(np.asarray([q])).val[0]

    dG = np.zeros((m, m, m, m))  # [a, i, j, k] = d_a Gamma[i, j, k]
    for a in range(m):
        step = np.zeros(m)
        step[a] = h
        dG[a] = (G(p + step) - G(p - step)) / (2 * h)
    G0 = G(p)
    return (
        dG
        - np.einsum("jilk->ijlk", dG)
        + np.einsum("jlp,ipk->ijlk", G0, G0)
        - np.einsum("ilp,jpk->ijlk", G0, G0)
    )


def random_source(rng: np.random.Generator, dim: int, depth: int = 0) -> str:
    """A random expression whose domain is all of R^dim."""
    if depth >= 4 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return f"x{rng.integers(1, dim + 1)}"
        return f"{rng.uniform(-2, 2):.3f}"
    kind = rng.integers(0, 8)
    a = random_source(rng, dim, depth + 1)
    b = random_source(rng, dim, depth + 1)
    if kind == 0:
        return f"({a} + {b})"
    if kind == 1:
        return f"({a} - {b})"
    if kind == 2:
        return f"({a} * {b})"
    if kind == 3:
        return f"({a} / (2 + ({b})^2))"
    if kind == 4:
        return f"({a})^{rng.integers(2, 4)}"
    if kind == 5:
        return f"exp(0.3*sin({a}))"
    if kind == 6:
        return f"log(1 + ({a})^2)"
    return f"{'sin' if rng.random() < 0.5 else 'cos'}({a})"
