"""Coordinate-projection statistical submersions.

The total chart has coordinates ``x1..xm``; the submersion is the projection
onto ``x1..xn``. Vertical vectors are spanned by ``d_{n+1}..d_m`` and the
horizontal space is their g-orthogonal complement. Writing

    B = g_VV^{-1} g_VH,     L = [[I_n], [-B]]

the columns of ``L`` are the basic lifts of the base coordinate fields, the
horizontal projector is ``H = L [I_n 0]`` and ``V = I - H``.

All tensors are batched jets over the sample points; see :mod:`statsub.geometry`
for the field-batch conventions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fields import ComplexStructureField, ConnectionField, Field, MetricField, VectorFieldSpec, as_points
from .geometry import (
    DET_EPS,
    SingularMetricError,
    StructureJets,
    apply11,
    apply12,
    bracket,
    cov,
    cov_deriv_12,
    curv,
    curvature_tensor,
    dual_gamma,
    frame,
    metric_report,
    pair,
    statistical_entries,
)
from .jets import TJet, concat, contract, inv, pad_coords, restrict_coords
from .residuals import DEFAULT_TOL, ResidualReport, Sampler


class DegenerateSplitError(SingularMetricError):
    """The metric restricted to the vertical (hence horizontal) space is degenerate."""


@dataclass(frozen=True)
class SubmersionSetup:
    """Total-space structure, base structure, and the projection onto the first ``n`` coordinates."""

    g: MetricField
    conn: ConnectionField
    base_g: MetricField
    base_conn: ConnectionField
    J: ComplexStructureField | None = None

    def __post_init__(self):
        if self.conn.dim != self.g.dim:
            raise ValueError("connection and metric dimensions differ")
        if self.base_conn.dim != self.base_g.dim:
            raise ValueError("base connection and base metric dimensions differ")
        if not 0 < self.n < self.m:
            raise ValueError(f"base dimension {self.n} must be in 1..{self.m - 1}")
        if self.J is not None and self.J.dim != self.m:
            raise ValueError("complex structure dimension differs from the chart")

    @property
    def m(self) -> int:
        return self.g.dim

    @property
    def n(self) -> int:
        return self.base_g.dim

    @property
    def s(self) -> int:
        return self.m - self.n

    def jets(self, points) -> "SubmersionJets":
        return SubmersionJets(self, points)


@dataclass(frozen=True)
class SplitVector:
    horizontal: np.ndarray
    vertical: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.horizontal + self.vertical


class SubmersionJets(StructureJets):
    """Jets of the split, O'Neill tensors and fiber/base geometry at a batch of points."""

    def __init__(self, setup: SubmersionSetup, points):
        super().__init__(setup.g, setup.conn, points, setup.J)
        self.setup = setup
        self.n, self.s = setup.n, setup.s

    # --- the split ----------------------------------------------------------

    @cached_property
    def lift(self) -> TJet:
        """``L`` (m x n): column a is the basic lift of the a-th base coordinate field."""
        n, g = self.n, self.g
        gvv = g[n:, n:]
        det = np.linalg.det(gvv.val)
        bad = np.abs(det) <= DET_EPS
        if np.any(bad):
            p = self.points[np.argmax(bad)]
            raise DegenerateSplitError(f"metric is degenerate on the vertical space at {p.tolist()}")
        B = contract("ab,bc->ac", inv(gvv), g[n:, :n])
        eye = TJet.const(np.eye(n), self.points.shape[0], self.dim)
        return concat([eye, -B], 0)

    @cached_property
    def H(self) -> TJet:
        n = self.n
        pad = np.zeros((n, self.dim))
        pad[:, :n] = np.eye(n)
        return contract("ka,al->kl", self.lift, pad)

    @cached_property
    def V(self) -> TJet:
        eye = TJet.const(np.eye(self.dim), self.points.shape[0], self.dim)
        return eye - self.H

    @cached_property
    def hframe(self) -> TJet:
        """Basic lifts of the base coordinate fields as a field batch ``(n, m)``."""
        return self.lift.transpose(1, 0)

    @property
    def vframe(self) -> np.ndarray:
        """The vertical coordinate fields ``(s, m)``."""
        return frame(self.dim, range(self.n, self.dim))

    def hor(self, X) -> TJet:
        return apply11(self.H, X)

    def ver(self, X) -> TJet:
        return apply11(self.V, X)

    # --- O'Neill tensors ---------------------------------------------------------

    def _oneill(self, G: TJet, kind: str) -> TJet:
        Hc, Vc = self.H.transpose(1, 0), self.V.transpose(1, 0)
        first = Vc if kind == "T" else Hc
        return apply11(self.H, cov(G, first, Vc)) + apply11(self.V, cov(G, first, Hc))

    @cached_property
    def T(self) -> TJet:
        """``T[i, j, k]`` = (T_{d_i} d_j)^k."""
        return self._oneill(self.gamma, "T")

    @cached_property
    def T_star(self) -> TJet:
        return self._oneill(self.gamma_star, "T")

    @cached_property
    def A(self) -> TJet:
        return self._oneill(self.gamma, "A")

    @cached_property
    def A_star(self) -> TJet:
        return self._oneill(self.gamma_star, "A")

    def oneill(self, kind: str, star: bool = False) -> TJet:
        if kind == "T":
            return self.T_star if star else self.T
        return self.A_star if star else self.A

    def Tf(self, E, F, star: bool = False) -> TJet:
        return apply12(self.T_star if star else self.T, E, F)

    def Af(self, E, F, star: bool = False) -> TJet:
        return apply12(self.A_star if star else self.A, E, F)

    def theta(self, X, Y) -> TJet:
        return self.Af(X, Y) + self.Af(X, Y, star=True)

    @cached_property
    def dT(self) -> TJet:
        """``[e, i, j, k]`` = ((nabla_{d_e} T)_{d_i} d_j)^k."""
        return cov_deriv_12(self.gamma, self.T)

    @cached_property
    def dA(self) -> TJet:
        return cov_deriv_12(self.gamma, self.A)

    @cached_property
    def dT_star(self) -> TJet:
        return cov_deriv_12(self.gamma_star, self.T_star)

    @cached_property
    def dA_star(self) -> TJet:
        return cov_deriv_12(self.gamma_star, self.A_star)

    def dtensor(self, kind: str, star: bool = False) -> TJet:
        if kind == "T":
            return self.dT_star if star else self.dT
        return self.dA_star if star else self.dA

    def hnab(self, X, Y, star: bool = False) -> TJet:
        return self.hor(self.nab(X, Y, star))

    def vnab(self, X, Y, star: bool = False) -> TJet:
        """Vertical part of a covariant derivative; for vertical X, Y this is the fiber connection."""
        return self.ver(self.nab(X, Y, star))

    # --- fiber and base ----------------------------------------------------------

    @cached_property
    def fiber_g(self) -> TJet:
        n = self.n
        return restrict_coords(self.g[n:, n:], range(n, self.dim))

    @cached_property
    def fiber_gamma(self) -> TJet:
        """Fiber connection on the fiber chart ``(x_{n+1}..x_m)``, shape ``(s, s, s)``."""
        n, vf = self.n, self.vframe
        full = self.vnab(vf, vf)
        return restrict_coords(full[:, :, n:], range(n, self.dim))

    @cached_property
    def fiber_R(self) -> TJet:
        return curvature_tensor(self.fiber_gamma)

    @cached_property
    def base_points(self) -> np.ndarray:
        return self.points[:, : self.n]

    @cached_property
    def base_g(self) -> TJet:
        return self.setup.base_g.jet(self.base_points)

    @cached_property
    def base_gamma(self) -> TJet:
        return self.setup.base_conn.jet(self.base_points)

    @cached_property
    def base_R(self) -> TJet:
        return curvature_tensor(self.base_gamma)

    def push(self, X) -> TJet | np.ndarray:
        """pi_* on a field batch: the first ``n`` components."""
        return X[..., : self.n]

    def lift_vec(self, Xb) -> TJet:
        """Horizontal lift of base-component batches ``(*B, n)``."""
        if isinstance(Xb, TJet):
            Xa = Xb
            batch = Xb.shape[:-1]
            Xa = Xb.reshape((-1, self.n))
            out = contract("ka,ba->bk", self.lift, Xa)
        else:
            Xb = np.asarray(Xb, dtype=float)
            batch = Xb.shape[:-1]
            out = contract("ka,ba->bk", self.lift, Xb.reshape(-1, self.n))
        return out.reshape(batch + (self.dim,))


# --- pointwise API ---------------------------------------------------------------


def _one(setup: SubmersionSetup, p) -> SubmersionJets:
    return SubmersionJets(setup, as_points(p, setup.m))


def _field(X, pts):
    if isinstance(X, Field):
        return X.jet(pts)
    return np.asarray(X, dtype=float)


def projectors(setup: SubmersionSetup, p) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical projectors ``(H, V)`` at p."""
    sj = _one(setup, p)
    return sj.H.val[0], sj.V.val[0]


def split(setup: SubmersionSetup, v, p) -> SplitVector:
    H, V = projectors(setup, p)
    v = np.asarray(v, dtype=float)
    return SplitVector(H @ v, V @ v)


def basic_lift(setup: SubmersionSetup, base_field: VectorFieldSpec) -> VectorFieldSpec | Field:
    """Horizontal field on the total chart that projects to ``base_field``."""
    from .fields import DerivedField

    if base_field.dim != setup.n:
        raise ValueError(f"base field has dimension {base_field.dim}, base has {setup.n}")

    def fn(pts):
        sj = SubmersionJets(setup, pts)
        Xb = pad_coords(base_field.jet(pts[:, : setup.n]), setup.m)
        return contract("ka,a->k", sj.lift, Xb)

    return DerivedField(fn, setup.m, (setup.m,))


def oneill_T(setup: SubmersionSetup, E, F, p, star: bool = False) -> np.ndarray:
    """T_E F at p (T*_E F with ``star``)."""
    sj = _one(setup, p)
    return sj.Tf(_field(E, sj.points), _field(F, sj.points), star).val[0]


def oneill_A(setup: SubmersionSetup, E, F, p, star: bool = False) -> np.ndarray:
    sj = _one(setup, p)
    return sj.Af(_field(E, sj.points), _field(F, sj.points), star).val[0]


def _cov_deriv(sj: SubmersionJets, kind: str, E, F, G, star: bool) -> np.ndarray:
    D = sj.dtensor(kind, star).val[0]
    e, f, gg = (np.asarray(v.jet(sj.points).val[0] if isinstance(v, Field) else v, dtype=float) for v in (E, F, G))
    return np.einsum("e,i,j,eijk->k", e, f, gg, D)


def cov_deriv_T(setup: SubmersionSetup, E, F, G, p, star: bool = False) -> np.ndarray:
    """(nabla_E T)_F G at p; the starred variant differentiates T* with nabla*."""
    return _cov_deriv(_one(setup, p), "T", E, F, G, star)


def cov_deriv_A(setup: SubmersionSetup, E, F, G, p, star: bool = False) -> np.ndarray:
    return _cov_deriv(_one(setup, p), "A", E, F, G, star)


# --- suites ----------------------------------------------------------------------


def _sj(setup, sampler_or_points) -> tuple[SubmersionJets, dict]:
    if isinstance(sampler_or_points, Sampler):
        return SubmersionJets(setup, sampler_or_points.points(setup.m)), sampler_or_points.describe()
    pts = as_points(sampler_or_points, setup.m)
    return SubmersionJets(setup, pts), {"points": pts.tolist()}


def split_entries(sj: SubmersionJets, report: ResidualReport, tol: float) -> None:
    """Projector algebra, orthogonality, Riemannian and statistical submersion conditions."""
    H, V = sj.H.val, sj.V.val
    HH = np.einsum("...ij,...jk->...ik", H, H)
    HV = np.einsum("...ij,...jk->...ik", H, V)
    report.check("projector idempotent", "H^2 = H", HH - H, 1e-12)
    report.check("projector complementary", "HV = 0", HV, 1e-12)
    vf = sj.vframe
    report.check("vertical kernel", "V(M) = ker pi_*", np.einsum("...ij,bj->...bi", V, vf) - vf, 1e-12)
    orth = np.einsum("...ki,...kl,...lj->...ij", H, sj.g.val, V)
    report.check("split orthogonal", "g(HE, VF) = 0", orth, 1e-12)
    hf = sj.hframe
    gh = pair(sj.g, hf, hf).val
    report.check("horizontal isometry", "g(X, Y) = g~(X_*, Y_*) o pi", gh - sj.base_g.val, min(tol, 1e-10))
    # pi_*(nabla_X Y) = nabla~_{X*} Y* for basic X, Y
    pushed = sj.push(sj.nab(hf, hf)).val
    report.check("statistical submersion", "pi_*(nabla_X Y) = nabla~_{X_*} Y_*", pushed - sj.base_gamma.val, tol)
    # H[X, Y] is basic and pi-related to [X*, Y*] = 0 for coordinate fields
    br = bracket(hf, hf)
    report.check("bracket projectable", "pi_* H[X, Y] = [X_*, Y_*]", sj.push(sj.hor(br)).val, tol)
    report.check("vertical bracket", "V[X, Y] = theta_X Y", sj.ver(br).val - sj.theta(hf, hf).val, max(tol, 1e-9))


def bb_residuals(setup: SubmersionSetup, sampler_or_points=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Pairings of T with T* and A with A*, plus A_X Y = -A*_Y X."""
    sj, sample = _sj(setup, sampler_or_points if sampler_or_points is not None else Sampler())
    report = ResidualReport("O'Neill pairings", sample)
    hf, vf = sj.hframe, sj.vframe
    # g(T_U V, X) + g(V, T*_U X), shape (u, v, x)
    lhs = pair(sj.g, sj.Tf(vf, vf), hf).val + np.einsum("...vux->...uvx", pair(sj.g, vf, sj.Tf(vf, hf, True)).val)
    report.check("T pairing", "g(T_U V, X) = -g(V, T*_U X)", lhs, tol)
    lhs = pair(sj.g, sj.Af(hf, hf), vf).val + np.einsum("...yxu->...xyu", pair(sj.g, hf, sj.Af(hf, vf, True)).val)
    report.check("A pairing", "g(A_X Y, U) = -g(Y, A*_X U)", lhs, tol)
    AXY = sj.Af(hf, hf).val
    AsYX = np.swapaxes(sj.Af(hf, hf, True).val, 1, 2)
    report.check("A dual skew", "A_X Y = -A*_Y X", AXY + AsYX, tol)
    return report


def structure_entries(sj: SubmersionJets, report: ResidualReport, tol: float) -> None:
    """Definition-level properties of T, A and their duals."""
    hf, vf = sj.hframe, sj.vframe
    for star in (False, True):
        mark = "*" if star else ""
        report.check(f"T{mark} horizontal", f"T{mark}_X Y = 0 for horizontal X, Y", sj.Tf(hf, hf, star).val, 1e-12)
        report.check(f"A{mark} vertical", f"A{mark}_U V = 0 for vertical U, V", sj.Af(vf, vf, star).val, 1e-12)
        TUV = sj.Tf(vf, vf, star).val
        report.check(f"T{mark} symmetry", f"T{mark}_U V = T{mark}_V U", TUV - np.swapaxes(TUV, 1, 2), min(tol, 1e-10))
    Gss = dual_gamma(sj.g, sj.gamma_star, sj.ginv)
    report.check("T involution", "(T*)* = T", sj._oneill(Gss, "T").val - sj.T.val, 1e-12)
    report.check("A involution", "(A*)* = A", sj._oneill(Gss, "A").val - sj.A.val, 1e-12)


def lemma_e_residuals(setup: SubmersionSetup, sampler_or_points=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Direct covariant derivatives against their horizontal/vertical reconstruction."""
    sj, sample = _sj(setup, sampler_or_points if sampler_or_points is not None else Sampler())
    report = ResidualReport("decompositions", sample)
    hf, vf = sj.hframe, sj.vframe
    for star in (False, True):
        mark = "*" if star else ""
        cases = [
            ("UV", vf, vf, "nabla{s}_U V = T{s}_U V + nabla-bar{s}_U V", lambda: sj.Tf(vf, vf, star) + sj.vnab(vf, vf, star)),
            ("UX", vf, hf, "nabla{s}_U X = H nabla{s}_U X + T{s}_U X", lambda: sj.hnab(vf, hf, star) + sj.Tf(vf, hf, star)),
            ("XU", hf, vf, "nabla{s}_X U = A{s}_X U + V nabla{s}_X U", lambda: sj.Af(hf, vf, star) + sj.vnab(hf, vf, star)),
            ("XY", hf, hf, "nabla{s}_X Y = H nabla{s}_X Y + A{s}_X Y", lambda: sj.hnab(hf, hf, star) + sj.Af(hf, hf, star)),
        ]
        for tag, E, F, anchor, rebuilt in cases:
            direct = sj.nab(E, F, star)
            report.check(f"decomposition {tag}{mark}", anchor.format(s=mark), direct.val - rebuilt().val, tol)
        basic = sj.hnab(vf, hf, star).val - np.swapaxes(sj.Af(hf, vf, star).val, 1, 2)
        report.check(f"basic X{mark}", f"H nabla{mark}_U X = A{mark}_X U for basic X", basic, tol)
    return report


def theorem_c_check(setup: SubmersionSetup, sampler: Sampler | None = None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """When the total space is statistical: S relations and statistical fiber and base."""
    sj, sample = _sj(setup, Sampler() if sampler is None else sampler)
    report = ResidualReport("induced structures", sample)
    hf, vf = sj.hframe, sj.vframe
    S = sj.S
    SVX = apply12(S, vf, hf)
    AXV = sj.Af(hf, vf) - sj.Af(hf, vf, True)
    report.check("horizontal S", "H S_U X = A_X U - A*_X U", sj.hor(SVX).val - np.swapaxes(AXV.val, 1, 2), tol)
    SXU = apply12(S, hf, vf)
    TUX = sj.Tf(vf, hf) - sj.Tf(vf, hf, True)
    report.check(
        "vertical S",
        "V S_X U = T_U X - T*_U X",
        sj.ver(SXU).val - np.swapaxes(TUX.val, 1, 2),
        tol,
        note="left side read with U as the vertical argument",
    )
    fib = ResidualReport("fiber")
    statistical_entries(sj.fiber_g, sj.fiber_gamma, fib, tol)
    report.check("fiber statistical", "fiber (g-bar, nabla-bar) is statistical", [fib.max_residual()], tol)
    base = ResidualReport("base")
    statistical_entries(sj.base_g, sj.base_gamma, base, tol)
    report.check("base statistical", "base (g~, nabla~) is statistical", [base.max_residual()], tol)
    return report


def submersion_suite(setup: SubmersionSetup, sampler: Sampler | None = None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Everything checked for a statistical submersion short of the curvature identities."""
    sampler = sampler or Sampler()
    sj = SubmersionJets(setup, sampler.points(setup.m))
    report = ResidualReport("submersion", sampler.describe())
    metric_report(sj, report)
    statistical_entries(sj.g, sj.gamma, report, tol, prefix="total ")
    split_entries(sj, report, tol)
    structure_entries(sj, report, tol)
    for sub in (
        bb_residuals(setup, sj.points, tol),
        lemma_e_residuals(setup, sj.points, tol),
        theorem_c_check(setup, sj.points, tol),
    ):
        report.extend(sub)
    return report


# --- curvature identities ----------------------------------------------------------


def d12(D: TJet, E, F, G) -> TJet:
    """(nabla_E T)_F G from ``D[e, i, j, k]`` over field batches."""
    Ea, es = _flat(E)
    Fb, fs = _flat(F)
    Gc, gs = _flat(G)
    m = D.shape[-1]
    return contract("ae,bi,cj,eijk->abck", Ea, Fb, Gc, D).reshape(es + fs + gs + (m,))


def _flat(X):
    m = X.shape[-1]
    return X.reshape(-1, m), X.shape[:-1]


def theorem_f_terms(sj: SubmersionJets) -> dict[str, tuple[np.ndarray, np.ndarray, str]]:
    """Left and right sides of the curvature identities, each of shape ``(N, 4 field axes)``."""
    g = sj.g
    X = sj.hframe
    U = sj.vframe
    R = sj.R
    T, A = sj.Tf, sj.Af
    dT, dA = sj.dT, sj.dA

    def gp(a, b):
        return pair(g, a, b).val

    def lhs(E, F, G, K):
        return gp(curv(R, E, F, G), K)

    out = {}

    # 1: g(R(U,V)W, W')
    Rbar = sj.fiber_R.val  # fiber coordinates
    gbar = sj.fiber_g.val
    rbar = np.einsum("...uvwk,...kz->...uvwz", Rbar, gbar)
    TUW = T(U, U)
    TsUW = T(U, U, True)
    # g(T_U W, T*_V W') - g(T_V W, T*_U W')
    a = pair(g, TUW, TsUW).val  # [u, w, v, z]
    rhs = rbar + np.einsum("...uwvz->...uvwz", a) - np.einsum("...vwuz->...uvwz", a)
    out["F1"] = (lhs(U, U, U, U), rhs, "g(R(U,V)W,W') = g(R-bar(U,V)W,W') + g(T_U W, T*_V W') - g(T_V W, T*_U W')")

    # 2: g(R(U,V)W, X) = g((nabla_U T)_V W, X) - g((nabla_V T)_U W, X)
    b = gp(d12(dT, U, U, U), X)  # [u, v, w, x]
    out["F2"] = (lhs(U, U, U, X), b - np.einsum("...vuwx->...uvwx", b), "g(R(U,V)W,X) = g((nabla_U T)_V W, X) - g((nabla_V T)_U W, X)")

    # 3: g(R(U,V)X, W) = g((nabla_U T)_V X, W) - g((nabla_V T)_U X, W)
    b = gp(d12(dT, U, U, X), U)
    out["F3"] = (lhs(U, U, X, U), b - np.einsum("...vuxw->...uvxw", b), "g(R(U,V)X,W) = g((nabla_U T)_V X, W) - g((nabla_V T)_U X, W)")

    # 4: g(R(U,V)X,Y) = g((nabla_U A)_X V,Y) - g((nabla_V A)_X U,Y) + g(T_U X,T*_V Y) - g(T_V X,T*_U Y)
    #                   - g(A_X U, A*_Y V) + g(A_X V, A*_Y U)
    b = gp(d12(dA, U, X, U), X)  # [u, x, v, y]
    dpart = np.einsum("...uxvy->...uvxy", b) - np.einsum("...vxuy->...uvxy", b)
    c = pair(g, T(U, X), T(U, X, True)).val  # [u, x, v, y]
    tpart = np.einsum("...uxvy->...uvxy", c) - np.einsum("...vxuy->...uvxy", c)
    e = pair(g, A(X, U), A(X, U, True)).val  # [x, u, y, v]
    apart = -np.einsum("...xuyv->...uvxy", e) + np.einsum("...xvyu->...uvxy", e)
    out["F4"] = (
        lhs(U, U, X, X),
        dpart + tpart + apart,
        "g(R(U,V)X,Y) = g((nabla_U A)_X V,Y) - g((nabla_V A)_X U,Y) + g(T_U X,T*_V Y) - g(T_V X,T*_U Y)"
        " - g(A_X U,A*_Y V) + g(A_X V,A*_Y U)",
    )

    # 5: g(R(X,U)V,W) = g([V nabla_X, nabla-bar_U]V, W) - g(nabla_[X,U] V, W) - g(T_U V, A*_X W) + g(T*_U W, A_X V)
    G = sj.gamma
    one = sj.ver(cov(G, X, sj.ver(cov(G, U, U))))  # [x, u, v, k]
    two = sj.ver(cov(G, U, sj.ver(cov(G, X, U))))  # [u, x, v, k]
    comm = one.val - np.einsum("...uxvk->...xuvk", two.val)
    brk = cov(G, bracket(X, U), U).val  # [x, u, v, k]
    first = np.einsum("...xuvk,...kl,wl->...xuvw", comm - brk, g.val, U)
    c = pair(g, T(U, U), A(X, U, True)).val  # [u, v, x, w]
    d = pair(g, T(U, U, True), A(X, U)).val  # [u, w, x, v]
    rhs = first - np.einsum("...uvxw->...xuvw", c) + np.einsum("...uwxv->...xuvw", d)
    out["F5"] = (
        lhs(X, U, U, U),
        rhs,
        "g(R(X,U)V,W) = g([V nabla_X, nabla-bar_U]V,W) - g(nabla_[X,U] V,W) - g(T_U V,A*_X W) + g(T*_U W,A_X V)",
    )

    # 6: g(R(X,U)V,Y) = g((nabla_X T)_U V,Y) - g((nabla_U A)_X V,Y) + g(A_X U,A*_Y V) - g(T_U X,T*_V Y)
    b1 = gp(d12(dT, X, U, U), X)  # [x, u, v, y]
    b2 = gp(d12(dA, U, X, U), X)  # [u, x, v, y]
    c = pair(g, A(X, U), A(X, U, True)).val  # [x, u, y, v]
    d = pair(g, T(U, X), T(U, X, True)).val  # [u, x, v, y]
    rhs = b1 - np.einsum("...uxvy->...xuvy", b2) + np.einsum("...xuyv->...xuvy", c) - np.einsum("...uxvy->...xuvy", d)
    out["F6"] = (
        lhs(X, U, U, X),
        rhs,
        "g(R(X,U)V,Y) = g((nabla_X T)_U V,Y) - g((nabla_U A)_X V,Y) + g(A_X U,A*_Y V) - g(T_U X,T*_V Y)",
    )

    # 7: g(R(X,U)Y,V) = g((nabla_X T)_U Y,V) - g((nabla_U A)_X Y,V) + g(T_U X,T_V Y) - g(A_X U,A_Y V)
    b1 = gp(d12(dT, X, U, X), U)  # [x, u, y, v]
    b2 = gp(d12(dA, U, X, X), U)  # [u, x, y, v]
    c = pair(g, T(U, X), T(U, X)).val  # [u, x, v, y]
    d = pair(g, A(X, U), A(X, U)).val  # [x, u, y, v]
    rhs = b1 - np.einsum("...uxyv->...xuyv", b2) + np.einsum("...uxvy->...xuyv", c) - d
    out["F7"] = (
        lhs(X, U, X, U),
        rhs,
        "g(R(X,U)Y,V) = g((nabla_X T)_U Y,V) - g((nabla_U A)_X Y,V) + g(T_U X,T_V Y) - g(A_X U,A_Y V)",
    )

    # 8: g(R(X,U)Y,Z) = g((nabla_X A)_Y U,Z) - g(T_U X,A*_Y Z) - g(T_U Y,A*_X Z) + g(A_X Y,T*_U Z)
    b = gp(d12(dA, X, X, U), X)  # [x, y, u, z]
    c = pair(g, T(U, X), A(X, X, True)).val  # [u, x, y, z] = g(T_U X, A*_Y Z)
    d = pair(g, A(X, X), T(U, X, True)).val  # [x, y, u, z]
    rhs = (
        np.einsum("...xyuz->...xuyz", b)
        - np.einsum("...uxyz->...xuyz", c)
        - np.einsum("...uyxz->...xuyz", c)
        + np.einsum("...xyuz->...xuyz", d)
    )
    out["F8"] = (
        lhs(X, U, X, X),
        rhs,
        "g(R(X,U)Y,Z) = g((nabla_X A)_Y U,Z) - g(T_U X,A*_Y Z) - g(T_U Y,A*_X Z) + g(A_X Y,T*_U Z)",
    )

    # 9: g(R(X,Y)U,V) = g([V nabla_X, V nabla_Y]U,V) - g(nabla_[X,Y] U,V) + g(A_X U,A*_Y V) - g(A_Y U,A*_X V)
    nest = sj.ver(cov(G, X, sj.ver(cov(G, X, U)))).val  # [x, y, u, k]
    comm = nest - np.einsum("...yxuk->...xyuk", nest)
    brk = cov(G, bracket(X, X), U).val  # [x, y, u, k]
    first = np.einsum("...xyuk,...kl,vl->...xyuv", comm - brk, g.val, U)
    c = pair(g, A(X, U), A(X, U, True)).val  # [x, u, y, v]
    rhs = first + np.einsum("...xuyv->...xyuv", c) - np.einsum("...yuxv->...xyuv", c)
    out["F9"] = (
        lhs(X, X, U, U),
        rhs,
        "g(R(X,Y)U,V) = g([V nabla_X, V nabla_Y]U,V) - g(nabla_[X,Y] U,V) + g(A_X U,A*_Y V) - g(A_Y U,A*_X V)",
    )

    # 10: g(R(X,Y)U,Z) = g((nabla_X A)_Y U,Z) - g((nabla_Y A)_X U,Z) + g(T*_U Z, theta_X Y)
    b = gp(d12(dA, X, X, U), X)  # [x, y, u, z]
    th = sj.theta(X, X)  # [x, y, k]
    c = pair(g, T(U, X, True), th).val  # [u, z, x, y]
    rhs = b - np.einsum("...yxuz->...xyuz", b) + np.einsum("...uzxy->...xyuz", c)
    out["F10"] = (lhs(X, X, U, X), rhs, "g(R(X,Y)U,Z) = g((nabla_X A)_Y U,Z) - g((nabla_Y A)_X U,Z) + g(T*_U Z, theta_X Y)")

    # 11: g(R(X,Y)Z,U) = g((nabla_X A)_Y Z,U) - g((nabla_Y A)_X Z,U) - g(T_U Z, theta_X Y)
    b = gp(d12(dA, X, X, X), U)  # [x, y, z, u]
    c = pair(g, T(U, X), th).val  # [u, z, x, y]
    rhs = b - np.einsum("...yxzu->...xyzu", b) - np.einsum("...uzxy->...xyzu", c)
    out["F11"] = (lhs(X, X, X, U), rhs, "g(R(X,Y)Z,U) = g((nabla_X A)_Y Z,U) - g((nabla_Y A)_X Z,U) - g(T_U Z, theta_X Y)")

    # 12: g(R(X,Y)Z,Z') = g(R^(X,Y)Z,Z') - g(A_Y Z,A*_X Z') + g(A_X Z,A*_Y Z') + g(theta_X Y, A*_Z Z')
    Rb = sj.base_R.val  # [a, b, c, d] on base coordinates; X are lifts of base coordinate fields
    rhat = np.einsum("...abcd,...ld->...abcl", Rb, sj.lift.val)  # lifted, [x, y, z, k]
    first = np.einsum("...xyzk,...kl,...wl->...xyzw", rhat, g.val, X.val)
    c = pair(g, A(X, X), A(X, X, True)).val  # [y, z, x, w] = g(A_Y Z, A*_X W)
    d = pair(g, th, A(X, X, True)).val  # [x, y, z, w]
    rhs = first - np.einsum("...yzxw->...xyzw", c) + np.einsum("...xzyw->...xyzw", c) + d
    out["F12"] = (
        lhs(X, X, X, X),
        rhs,
        "g(R(X,Y)Z,Z') = g(R^(X,Y)Z,Z') - g(A_Y Z,A*_X Z') + g(A_X Z,A*_Y Z') + g(theta_X Y, A*_Z Z')",
    )
    return out


def theorem_f_residuals(setup: SubmersionSetup, sampler: Sampler | None = None, tol: float = 1e-7) -> ResidualReport:
    """The twelve curvature identities of a statistical submersion, each over all frame choices.

    The base-curvature term of the last identity is the horizontal lift of the
    base curvature evaluated on the projected fields.
    """
    sj, sample = _sj(setup, Sampler(count=20) if sampler is None else sampler)
    report = ResidualReport("curvature identities", sample)
    for i, (lhs, rhs, anchor) in enumerate(theorem_f_terms(sj).values(), start=1):
        note = "R^ read as the horizontal lift of the base curvature" if i == 12 else ""
        report.check(f"curvature {i}", anchor, lhs - rhs, tol, note=note)
    return report
