"""Metrics, affine connections, their duals, and curvature on one chart.

The lower layer works on batched jets (:class:`~statsub.jets.TJet`) and
field batches: a field batch is a jet of shape ``(*B, m)`` holding several
vector fields at once, or a constant array of the same shape. Outer
products over batches give every index choice of an identity in one pass.

The upper layer exposes pointwise operations on fields and the
statistical-manifold residual sweep.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .fields import ConnectionField, DerivedField, Field, MetricField, VectorFieldSpec, as_points
from .jets import TJet, contract, inv
from .residuals import DEFAULT_TOL, ResidualReport, Sampler

SIGNATURE_EPS = 1e-10
DET_EPS = 1e-12


class SingularMetricError(ArithmeticError):
    pass


# --- field-batch calculus ---------------------------------------------------


def _flat(X):
    m = X.shape[-1]
    return X.reshape(-1, m), X.shape[:-1]


def cov(G: TJet, X, Y) -> TJet:
    """nabla_X Y for every pair in the batches; result shape ``(*X, *Y, m)``."""
    Xa, xs = _flat(X)
    Yb, ys = _flat(Y)
    m = Xa.shape[-1]
    out = contract("ai,ijk,bj->abk", Xa, G, Yb)
    if isinstance(Yb, TJet):
        out = out + contract("ai,bki->abk", Xa, Yb.deriv())
    return out.reshape(xs + ys + (m,))


def bracket(X, Y) -> TJet:
    """Lie bracket [X, Y] for every pair; shape ``(*X, *Y, m)``."""
    Xa, xs = _flat(X)
    Yb, ys = _flat(Y)
    m = Xa.shape[-1]
    parts = []
    if isinstance(Yb, TJet):
        parts.append(contract("ai,bki->abk", Xa, Yb.deriv()))
    if isinstance(Xa, TJet):
        parts.append(-contract("bi,aki->abk", Yb, Xa.deriv()))
    if not parts:
        raise ValueError("bracket of two constant fields is identically zero; pass a jet")
    out = parts[0] if len(parts) == 1 else parts[0] + parts[1]
    return out.reshape(xs + ys + (m,))


def pair(g: TJet, E, F) -> TJet:
    """g(E, F) for every pair; shape ``(*E, *F)``."""
    Ea, es = _flat(E)
    Fb, fs = _flat(F)
    return contract("ij,ai,bj->ab", g, Ea, Fb).reshape(es + fs)


def apply12(T: TJet, E, F) -> TJet:
    """T_E F for a (1,2) tensor ``T[i, j, k]``; shape ``(*E, *F, m)``."""
    Ea, es = _flat(E)
    Fb, fs = _flat(F)
    m = Ea.shape[-1]
    return contract("ai,bj,ijk->abk", Ea, Fb, T).reshape(es + fs + (m,))


def apply11(M: TJet, E) -> TJet:
    """(M E)^k = M[k, l] E^l over a batch; shape ``(*E, m)``."""
    Ea, es = _flat(E)
    m = Ea.shape[-1]
    return contract("kl,al->ak", M, Ea).reshape(es + (m,))


def curv(R: TJet, E, F, G) -> TJet:
    """R(E, F)G for ``R[i, j, l, k]``; shape ``(*E, *F, *G, m)``."""
    Ea, es = _flat(E)
    Fb, fs = _flat(F)
    Gc, gs = _flat(G)
    m = Ea.shape[-1]
    return contract("ai,bj,cl,ijlk->abck", Ea, Fb, Gc, R).reshape(es + fs + gs + (m,))


def frame(dim: int, indices=None) -> np.ndarray:
    """Constant coordinate fields d_i as a field batch (0-based indices)."""
    eye = np.eye(dim)
    return eye if indices is None else eye[list(indices)]


# --- tensor formulas ----------------------------------------------------------


def torsion_tensor(G: TJet) -> TJet:
    return G - G.transpose(1, 0, 2)


def nabla_metric(g: TJet, G: TJet) -> TJet:
    """(nabla_e g)(f, h) as ``[e, f, h]``."""
    dg = g.deriv().transpose(2, 0, 1)
    return dg - contract("efm,mh->efh", G, g) - contract("ehm,fm->efh", G, g)


def codazzi_tensor(g: TJet, G: TJet) -> TJet:
    ng = nabla_metric(g, G)
    return ng - ng.transpose(1, 0, 2)


def dual_gamma(g: TJet, G: TJet, ginv: TJet | None = None) -> TJet:
    """Christoffels of the conjugate connection, solved from E g(F,G) = g(nabla_E F, G) + g(F, nabla*_E G)."""
    if ginv is None:
        ginv = inv(g)
    dg = g.deriv()  # [j, l, i]
    W = dg.transpose(2, 0, 1) - contract("ijm,ml->ijl", G, g)
    return contract("kj,ijl->ilk", ginv, W)


def lc_gamma(g: TJet, ginv: TJet | None = None) -> TJet:
    if ginv is None:
        ginv = inv(g)
    dg = g.deriv()  # dg[a, b, c] = d_c g_ab
    # Gamma_{ij,l} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    low = dg.transpose(2, 0, 1) + dg.transpose(0, 2, 1) - dg
    return 0.5 * contract("kl,ijl->ijk", ginv, low)


def curvature_tensor(G: TJet) -> TJet:
    """``R[i, j, l, k]``: k-th component of R(d_i, d_j) d_l."""
    dG = G.deriv()  # [j, l, k, i]
    lin = dG.transpose(3, 0, 1, 2) - dG.transpose(0, 3, 1, 2)
    quad = contract("jlp,ipk->ijlk", G, G) - contract("ilp,jpk->ijlk", G, G)
    return lin + quad


def cov_deriv_12(G: TJet, T: TJet) -> TJet:
    """Covariant derivative of a (1,2) tensor: ``[e, i, j, k]`` = ((nabla_{d_e} T)_{d_i} d_j)^k."""
    dT = T.deriv().transpose(3, 0, 1, 2)
    return (
        dT
        + contract("elk,ijl->eijk", G, T)
        - contract("eil,ljk->eijk", G, T)
        - contract("ejl,ilk->eijk", G, T)
    )


def signature(gval: np.ndarray) -> np.ndarray:
    """Index (count of negative eigenvalues) at each sample point."""
    w = np.linalg.eigvalsh(gval)
    return np.sum(w < -SIGNATURE_EPS, axis=-1)


# --- evaluated structure ------------------------------------------------------


class StructureJets:
    """Jets of (g, nabla) and everything derived from them at a batch of points."""

    def __init__(self, g: Field, conn: Field, points, J: Field | None = None):
        self.metric_field = g
        self.conn_field = conn
        self.J_field = J
        self.points = as_points(points, g.dim)
        self.dim = g.dim

    @cached_property
    def g(self) -> TJet:
        return self.metric_field.jet(self.points)

    @cached_property
    def ginv(self) -> TJet:
        det = np.linalg.det(self.g.val)
        bad = np.abs(det) <= DET_EPS
        if np.any(bad):
            p = self.points[np.argmax(bad)]
            raise SingularMetricError(f"metric is singular at {p.tolist()}")
        return inv(self.g)

    @cached_property
    def gamma(self) -> TJet:
        return self.conn_field.jet(self.points)

    @cached_property
    def gamma_star(self) -> TJet:
        return dual_gamma(self.g, self.gamma, self.ginv)

    @cached_property
    def gamma_lc(self) -> TJet:
        return lc_gamma(self.g, self.ginv)

    @cached_property
    def R(self) -> TJet:
        return curvature_tensor(self.gamma)

    @cached_property
    def R_star(self) -> TJet:
        return curvature_tensor(self.gamma_star)

    @cached_property
    def S(self) -> TJet:
        return self.gamma - self.gamma_star

    @cached_property
    def J(self) -> TJet:
        if self.J_field is None:
            raise ValueError("no complex structure supplied")
        return self.J_field.jet(self.points)

    def conn(self, star: bool = False) -> TJet:
        return self.gamma_star if star else self.gamma

    def nab(self, X, Y, star: bool = False) -> TJet:
        return cov(self.conn(star), X, Y)

    def pair(self, E, F) -> TJet:
        return pair(self.g, E, F)

    @property
    def coords(self) -> np.ndarray:
        return frame(self.dim)


# --- pointwise operations -------------------------------------------------------


def _vec_jet(X, pts):
    if isinstance(X, Field):
        return X.jet(pts)
    return np.asarray(X, dtype=float)


def _vec_val(X, pts) -> np.ndarray:
    if isinstance(X, Field):
        return X.jet(pts).val[0]
    return np.asarray(X, dtype=float)


def covariant_derivative(conn: Field, X: VectorFieldSpec, Y: VectorFieldSpec, p) -> np.ndarray:
    """(nabla_X Y)^k = X^i (d_i Y^k + Gamma^k_ij Y^j) at p."""
    pts = as_points(p, conn.dim)
    return cov(conn.jet(pts), X.jet(pts), Y.jet(pts)).val[0]


def torsion_residual(conn: Field, p, i: int, j: int) -> np.ndarray:
    """Gamma^._ij - Gamma^._ji at p; i, j are 1-based coordinate indices."""
    G = conn.jet(as_points(p, conn.dim)).val[0]
    return G[i - 1, j - 1] - G[j - 1, i - 1]


def codazzi_residual(g: Field, conn: Field, E, F, G, p) -> float:
    """(nabla_E g)(F, G) - (nabla_F g)(E, G) at p."""
    pts = as_points(p, g.dim)
    gj, Gj = g.jet(pts), conn.jet(pts)
    Ej, Fj, Hj = (_vec_jet(v, pts) for v in (E, F, G))

    def ng(A, B, C):
        along = contract("i,i->", pair(gj, B, C).deriv(), A).val[0]
        return along - pair(gj, cov(Gj, A, B), C).val[0] - pair(gj, B, cov(Gj, A, C)).val[0]

    return float(ng(Ej, Fj, Hj) - ng(Fj, Ej, Hj))


def dual_connection(g: Field, conn: Field) -> DerivedField:
    """The conjugate connection as a derived field (jets of order one)."""

    def fn(pts):
        return dual_gamma(g.jet(pts), conn.jet(pts))

    return DerivedField(fn, g.dim, (g.dim,) * 3)


def levi_civita(g: Field) -> DerivedField:
    return DerivedField(lambda pts: lc_gamma(g.jet(pts)), g.dim, (g.dim,) * 3)


def s_tensor(conn: Field, dual: Field, E, F, p) -> np.ndarray:
    """S_E F = nabla_E F - nabla*_E F at p."""
    pts = as_points(p, conn.dim)
    Ej, Fj = _vec_jet(E, pts), _vec_jet(F, pts)
    return (cov(conn.jet(pts), Ej, Fj) - cov(dual.jet(pts), Ej, Fj)).val[0]


def curvature(conn: Field, E, F, G, p) -> np.ndarray:
    """R(E, F)G at p (tensorial, so only the values of E, F, G enter)."""
    pts = as_points(p, conn.dim)
    R = curvature_tensor(conn.jet(pts))
    vals = [_vec_val(v, pts) for v in (E, F, G)]
    return np.einsum("i,j,l,ijlk->k", *vals, R.val[0])


def curvature_duality_residual(g: Field, conn: Field, E, F, G, H, p) -> float:
    """g(R(E,F)G, H) + g(G, R*(E,F)H) at p."""
    sj = StructureJets(g, conn, p)
    e, f, gg, h = (_vec_val(v, sj.points) for v in (E, F, G, H))
    gv = sj.g.val[0]
    r = np.einsum("i,j,l,ijlk->k", e, f, gg, sj.R.val[0])
    rs = np.einsum("i,j,l,ijlk->k", e, f, h, sj.R_star.val[0])
    return float(r @ gv @ h + gg @ gv @ rs)


# --- sweeps -------------------------------------------------------------------


def metric_report(sj: StructureJets, report: ResidualReport) -> None:
    det = np.abs(np.linalg.det(sj.g.val))
    sig = signature(sj.g.val)
    report.check(
        "metric symmetric",
        "symmetric nondegenerate tensor field",
        sj.g.val - np.swapaxes(sj.g.val, -1, -2),
        1e-14,
    )
    report.check(
        "metric nondegenerate",
        "symmetric nondegenerate tensor field",
        np.where(det > DET_EPS, 0.0, 1.0),
        0.5,
        note=f"min |det g| = {det.min():.3e}",
    )
    report.check(
        "constant index",
        "of constant index",
        sig - sig[0],
        0.5,
        note=f"index {int(sig[0])}",
    )


def statistical_entries(g: TJet, G: TJet, report: ResidualReport, tol: float, prefix: str = "") -> None:
    report.check(f"{prefix}torsion", "nabla is torsion-free", torsion_tensor(G).val, tol)
    report.check(f"{prefix}Codazzi", "(nabla_E g)(F,G) = (nabla_F g)(E,G)", codazzi_tensor(g, G).val, tol)


def is_statistical(g: Field, conn: Field, sampler: Sampler | None = None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Torsion and Codazzi residual sweep; passes iff both are below ``tol``."""
    sampler = sampler or Sampler()
    sj = StructureJets(g, conn, sampler.points(g.dim))
    report = ResidualReport("statistical", sampler.describe())
    statistical_entries(sj.g, sj.gamma, report, tol)
    return report


def duality_entries(sj: StructureJets, report: ResidualReport, tol: float) -> None:
    """Conjugate-connection contract: defining identity, involution, metric average, S, curvature duality."""
    m = sj.dim
    E = frame(m)
    g = sj.g
    # E g(F,G) - g(nabla_E F, G) - g(F, nabla*_E G)
    dg = g.deriv().transpose(2, 0, 1).val
    lhs = dg - pair(g, sj.nab(E, E), E).val - np.swapaxes(pair(g, sj.nab(E, E, star=True), E).val, -1, -2)
    report.check("duality", "E g(F,G) = g(nabla_E F, G) + g(F, nabla*_E G)", lhs, min(tol, 1e-10))
    twice = dual_gamma(g, sj.gamma_star, sj.ginv)
    report.check("dual involution", "(nabla*)* = nabla", twice.val - sj.gamma.val, 1e-12)
    avg = 0.5 * (sj.gamma + sj.gamma_star)
    report.check("metric average", "1/2(nabla + nabla*) is a metric connection", avg.val - sj.gamma_lc.val, min(tol, 1e-10))
    report.check("dual torsion", "nabla* is torsion-free", torsion_tensor(sj.gamma_star).val, tol)
    S = sj.S.val
    report.check("S symmetry", "S_E F = S_F E", S - np.swapaxes(S, 1, 2), tol)
    # g(S_E F, G) - g(F, S_E G)
    gS = np.einsum("...efk,...kg->...efg", S, g.val)
    report.check("S self-adjoint", "g(S_E F, G) = g(F, S_E G)", gS - np.swapaxes(gS, -1, -2), tol)
    # g(R(E,F)G, H) + g(G, R*(E,F)H)
    gR = np.einsum("...ijlk,...kh->...ijlh", sj.R.val, g.val)
    gRs = np.einsum("...ijhk,...kl->...ijlh", sj.R_star.val, g.val)
    report.check("curvature duality", "g(R(E,F)G,H) = -g(G,R*(E,F)H)", gR + gRs, tol)
    R = sj.R.val
    report.check("curvature antisymmetry", "R(E,F) = -R(F,E)", R + np.swapaxes(R, 1, 2), tol)
