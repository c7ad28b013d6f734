"""Almost complex structures: Hermitian and Kähler tests, parallel fundamental form, space-form fit.

``J`` acts on columns: ``J d_j = sum_i J[i, j] d_i``. With this convention the
bundled 4-dimensional example sends ``d_1`` to ``-d_3`` and ``d_3`` to ``d_1``.
"""

from __future__ import annotations

import numpy as np

from .fields import Field, as_points
from .geometry import StructureJets, _vec_jet, apply11, apply12, cov, curv, frame, pair
from .jets import contract
from .residuals import DEFAULT_TOL, PreconditionError, ResidualReport, Sampler, max_abs

J2_TOL = 1e-10


# --- batch tensors -------------------------------------------------------------


def j_squared(J: np.ndarray) -> np.ndarray:
    """J^2 + I at every sample (values only)."""
    m = J.shape[-1]
    return np.einsum("...ij,...jk->...ik", J, J) + np.eye(m)


def omega(g, J):
    """Fundamental form ``omega[a, b] = g(d_a, J d_b)``."""
    return contract("ak,kb->ab", g, J)


def nabla_omega(sj: StructureJets, star: bool = False):
    """``[e, f, h]`` = (nabla_e omega)(d_f, d_h)."""
    w = omega(sj.g, sj.J)
    G = sj.conn(star)
    dw = w.deriv().transpose(2, 0, 1)
    return dw - contract("efp,ph->efh", G, w) - contract("ehp,fp->efh", G, w)


def nabla_J(G, J):
    """``[e, j, k]`` = ((nabla_{d_e} J) d_j)^k."""
    dJ = J.deriv().transpose(2, 1, 0)  # [e, j, k]
    return dJ + contract("elk,lj->ejk", G, J) - contract("kl,ejl->ejk", J, G)


def space_form_shape(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """The bracket multiplying c/4, as ``[e, f, h, k]`` for E, F, G = d_e, d_f, d_h (values)."""
    m = g.shape[-1]
    eye = np.eye(m)
    gJ = np.einsum("...pa,...pb->...ab", J, g)  # g(J d_a, d_b)
    w = np.einsum("...ep,...pf->...ef", g, J)  # g(d_e, J d_f)
    return (
        np.einsum("...fh,ek->...efhk", g, eye)
        - np.einsum("...eh,fk->...efhk", g, eye)
        + np.einsum("...fh,...ke->...efhk", gJ, J)
        - np.einsum("...eh,...kf->...efhk", gJ, J)
        + 2 * np.einsum("...ef,...kh->...efhk", w, J)
    )


def fit_c(R: np.ndarray, K: np.ndarray) -> float:
    """Least-squares c in ``R = (c/4) K`` over every sampled tuple."""
    kk = float(np.sum(K * K))
    if kk == 0.0:
        return 0.0
    return 4.0 * float(np.sum(R * K)) / kk


# --- pointwise API -----------------------------------------------------------------


def _jets(g: Field, conn: Field | None, J: Field, p) -> StructureJets:
    pts = as_points(p, g.dim)
    return StructureJets(g, conn, pts, J)


def _vals(sj, *fields):
    return [np.asarray(_vec_jet(v, sj.points).val[0] if isinstance(v, Field) else v, dtype=float) for v in fields]


def hermitian_residual(g: Field, J: Field, E, F, p) -> float:
    """g(JE, JF) - g(E, F) at p."""
    sj = _jets(g, None, J, p)
    e, f = _vals(sj, E, F)
    gv, Jv = sj.g.val[0], sj.J.val[0]
    return float((Jv @ e) @ gv @ (Jv @ f) - e @ gv @ f)


def kahler_residual(g: Field, J: Field, E, F, p) -> np.ndarray:
    """(nabla^_E J)F = nabla^_E(JF) - J(nabla^_E F) for the Levi-Civita connection."""
    sj = _jets(g, None, J, p)
    e, f = _vals(sj, E, F)
    return np.einsum("e,j,ejk->k", e, f, nabla_J(sj.gamma_lc, sj.J).val[0])


def nabla_omega_residual(g: Field, conn: Field, J: Field, E, F, G, p) -> float:
    """(nabla_E omega)(F, G) with omega(E, F) = g(E, JF)."""
    sj = _jets(g, conn, J, p)
    Ej, Fj, Gj = (_vec_jet(v, sj.points) for v in (E, F, G))

    def w(A, B):
        return pair(sj.g, A, apply11(sj.J, B))

    along = contract("i,i->", w(Fj, Gj).deriv(), Ej).val[0]
    return float(along - w(cov(sj.gamma, Ej, Fj), Gj).val[0] - w(Fj, cov(sj.gamma, Ej, Gj)).val[0])


def space_form_residual(g: Field, J: Field, conn: Field, c: float, E, F, G, p) -> np.ndarray:
    """R(E,F)G - (c/4){g(F,G)E - g(E,G)F + g(JF,G)JE - g(JE,G)JF + 2g(E,JF)JG} at p."""
    sj = _jets(g, conn, J, p)
    e, f, h = _vals(sj, E, F, G)
    R = sj.R.val[0]
    K = space_form_shape(sj.g.val[0], sj.J.val[0])
    return np.einsum("e,f,h,efhk->k", e, f, h, R - 0.25 * c * K)


def best_fit_c(g: Field, J: Field, conn: Field, sampler: Sampler | None = None) -> tuple[float, float]:
    """Least-squares c for the space-form condition and the remaining max residual."""
    sampler = sampler or Sampler()
    sj = StructureJets(g, conn, sampler.points(g.dim), J)
    R = sj.R.val
    K = space_form_shape(sj.g.val, sj.J.val)
    c = fit_c(R, K)
    return c, max_abs(R - 0.25 * c * K)


# --- suites --------------------------------------------------------------------------


def require_almost_complex(sj: StructureJets) -> float:
    r = max_abs(j_squared(sj.J.val))
    if not r < J2_TOL:
        raise PreconditionError(f"J^2 + I residual {r:.3e} exceeds {J2_TOL:g}; not an almost complex structure")
    return r


def lemma_a_entries(sj: StructureJets, report: ResidualReport, tol: float) -> None:
    require_almost_complex(sj)
    E = frame(sj.dim)
    JE = apply11(sj.J, E)
    lhs = cov(sj.gamma, E, JE).val - apply11(sj.J, sj.nab(E, E, star=True)).val
    report.check("J intertwines duals", "nabla_E(JF) = J nabla*_E F", lhs, tol)
    lhs = curv(sj.R, E, E, JE).val - apply11(sj.J, curv(sj.R_star, E, E, E)).val
    report.check("J intertwines curvatures", "R(E,F)JG = J R*(E,F)G", lhs, tol)
    lhs = apply12(sj.S, E, JE).val + apply11(sj.J, apply12(sj.S, E, E)).val
    report.check("S anticommutes with J", "S_E(JF) = -J(S_E F)", lhs, tol)


def lemma_a_residuals(g: Field, conn: Field, J: Field, sampler=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Consequences of nabla omega = 0; refuses if J is not almost complex."""
    if sampler is None:
        sampler = Sampler()
    if isinstance(sampler, Sampler):
        pts, sample = sampler.points(g.dim), sampler.describe()
    else:
        pts = as_points(sampler, g.dim)
        sample = {"points": pts.tolist()}
    sj = StructureJets(g, conn, pts, J)
    report = ResidualReport("J compatibility", sample)
    lemma_a_entries(sj, report, tol)
    return report


def holomorphic_entries(sj: StructureJets, report: ResidualReport, tol: float) -> None:
    Jv, gv = sj.J.val, sj.g.val
    report.check("J^2 + I", "J^2 = -I", j_squared(Jv), min(tol, J2_TOL))
    herm = np.einsum("...pa,...pq,...qb->...ab", Jv, gv, Jv) - gv
    report.check("Hermitian", "g(JE, JF) = g(E, F)", herm, tol)
    w = omega(sj.g, sj.J).val
    report.check("omega antisymmetry", "g(E, JF) + g(F, JE) = 0", w + np.swapaxes(w, -1, -2), tol)
    report.check("Kähler", "(nabla^_E J)F = 0 for the Levi-Civita connection", nabla_J(sj.gamma_lc, sj.J).val, tol)
    report.check("omega parallel", "nabla omega = 0", nabla_omega(sj).val, tol)
    try:
        lemma_a_entries(sj, report, tol)
    except PreconditionError as e:
        for name, anchor in (
            ("J intertwines duals", "nabla_E(JF) = J nabla*_E F"),
            ("J intertwines curvatures", "R(E,F)JG = J R*(E,F)G"),
            ("S anticommutes with J", "S_E(JF) = -J(S_E F)"),
        ):
            report.skip(name, anchor, str(e), tol)


def holomorphic_suite(g: Field, conn: Field, J: Field, sampler: Sampler | None = None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Holomorphic statistical structure: J almost complex, g Hermitian, omega parallel, and consequences."""
    sampler = sampler or Sampler()
    sj = StructureJets(g, conn, sampler.points(g.dim), J)
    report = ResidualReport("holomorphic", sampler.describe())
    holomorphic_entries(sj, report, tol)
    return report


SPACE_FORM_ANCHOR = "R(E,F)G = (c/4){g(F,G)E - g(E,G)F + g(JF,G)JE - g(JE,G)JF + 2g(E,JF)JG}"


def space_form_entries(sj: StructureJets, report: ResidualReport, tol: float, c: float | None = None) -> float:
    """Space-form residual at the given c, or reported without verdict at the least-squares c."""
    R = sj.R.val
    K = space_form_shape(sj.g.val, sj.J.val)
    if c is None:
        cf = fit_c(R, K)
        report.skip(
            "space form",
            SPACE_FORM_ANCHOR,
            f"no c given; least-squares c = {cf:.12g}, residual reported without verdict",
            tol,
            residual=R - 0.25 * cf * K,
        )
        return cf
    report.check("space form", SPACE_FORM_ANCHOR, R - 0.25 * c * K, tol, note=f"c = {c:g}")
    return c
