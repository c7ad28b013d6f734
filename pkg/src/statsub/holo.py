"""Holomorphic statistical submersions: splitting J, identity suites, classification.

For horizontal X and vertical U write ``JX = PX + FX`` and ``JU = tU + fU`` with
``PX, tU`` horizontal and ``FX, fU`` vertical. As matrices::

    P = H J H,   F = V J H,   t = H J V,   f = V J V

(``F`` is spelled ``Fo`` in code to keep it apart from vector-field letters.)

Conditional identities are guarded: each guard is itself a residual tested
against the suite tolerance, and an identity whose guard fails is reported
as SKIP with the reason, never as FAIL.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .complex_structure import J2_TOL, holomorphic_entries, j_squared, space_form_shape
from .fields import Field, as_points
from .geometry import apply11, apply12, pair
from .jets import TJet, contract
from .residuals import DEFAULT_TOL, PreconditionError, ResidualReport, Sampler, max_abs
from .submersion import SubmersionJets, SubmersionSetup, theorem_f_terms


@dataclass(frozen=True)
class JSplit:
    """The four blocks of J at a point, each an m x m matrix."""

    P: np.ndarray
    Fo: np.ndarray
    t: np.ndarray
    f: np.ndarray

    @property
    def J(self) -> np.ndarray:
        return self.P + self.Fo + self.t + self.f


class HoloJets(SubmersionJets):
    """Submersion jets plus the J blocks and the derived operators."""

    def __init__(self, setup: SubmersionSetup, points):
        if setup.J is None:
            raise PreconditionError("no complex structure supplied")
        super().__init__(setup, points)

    def _block(self, left: TJet, right: TJet) -> TJet:
        return contract("ij,jk,kl->il", left, self.J, right)

    @cached_property
    def P(self) -> TJet:
        return self._block(self.H, self.H)

    @cached_property
    def Fo(self) -> TJet:
        return self._block(self.V, self.H)

    @cached_property
    def t(self) -> TJet:
        return self._block(self.H, self.V)

    @cached_property
    def f(self) -> TJet:
        return self._block(self.V, self.V)

    # operators on field batches
    def P_(self, X):
        return apply11(self.P, X)

    def F_(self, X):
        return apply11(self.Fo, X)

    def t_(self, U):
        return apply11(self.t, U)

    def f_(self, U):
        return apply11(self.f, U)

    def opd(self, op: str, E, F, star: bool = False) -> TJet:
        """Operator derivative: ``P`` gives (H nabla_E P)F, ``f`` gives (V nabla_E f)F.

        With E vertical and F vertical the second is (nabla-bar_E f)F.
        """
        if op == "P":
            return self.hnab(E, self.P_(F), star) - self.P_(self.hnab(E, F, star))
        return self.vnab(E, self.f_(F), star) - self.f_(self.vnab(E, F, star))

    # hypotheses used to guard conditional identities
    @cached_property
    def guards(self) -> dict[str, float]:
        X, U = self.hframe, self.vframe
        return {
            "H nabla_U P = 0": max_abs(self.opd("P", U, X).val),
            "H nabla_X P = 0": max_abs(self.opd("P", X, X).val),
            "nabla-bar_U f = 0": max_abs(self.opd("f", U, U).val),
            "V nabla_X f = 0": max_abs(self.opd("f", X, U).val),
            "P = 0": max_abs(self.P.val),
            "f = 0": max_abs(self.f.val),
            "t = 0": max_abs(self.t.val),
            "T = 0": max(max_abs(self.T.val), max_abs(self.T_star.val)),
        }

    # mean curvature
    def vertical_orthonormal(self) -> tuple[np.ndarray, np.ndarray]:
        """Gram-Schmidt on d_{n+1}..d_m: frames ``(N, s, m)`` and signs ``(N, s)``."""
        g = self.g.val
        npts = g.shape[0]
        base = self.vframe
        frames = np.zeros((npts, self.s, self.dim))
        eps = np.zeros((npts, self.s))
        for a in range(self.s):
            u = np.broadcast_to(base[a], (npts, self.dim)).copy()
            for b in range(a):
                coef = np.einsum("ni,nij,nj->n", u, g, frames[:, b]) * eps[:, b]
                u -= coef[:, None] * frames[:, b]
            norm = np.einsum("ni,nij,nj->n", u, g, u)
            if np.any(np.abs(norm) < 1e-12):
                raise PreconditionError("vertical Gram-Schmidt hit a null vector")
            eps[:, a] = np.sign(norm)
            frames[:, a] = u / np.sqrt(np.abs(norm))[:, None]
        return frames, eps

    @cached_property
    def mean_curvature(self) -> np.ndarray:
        """N = sum_a eps_a T_{U_a} U_a, shape ``(N, m)``."""
        frames, eps = self.vertical_orthonormal()
        return np.einsum("na,nai,naj,nijk->nk", eps, frames, frames, self.T.val)

    @cached_property
    def conformal_residual(self) -> np.ndarray:
        """T_U V - (1/s) g(U, V) N over the vertical coordinate fields."""
        U = self.vframe
        TUV = self.Tf(U, U).val
        gUV = np.einsum("ai,nij,bj->nab", U, self.g.val, U)
        return TUV - np.einsum("nab,nk->nabk", gUV, self.mean_curvature) / self.s


def decompose_j(setup: SubmersionSetup, p) -> JSplit:
    hj = HoloJets(setup, as_points(p, setup.m))
    return JSplit(hj.P.val[0], hj.Fo.val[0], hj.t.val[0], hj.f.val[0])


def _field(X, pts):
    if isinstance(X, Field):
        return X.jet(pts)
    return np.asarray(X, dtype=float)


def nabla_p_residual(setup: SubmersionSetup, E, X, p, star: bool = False) -> np.ndarray:
    """(H nabla_E P)X = H nabla_E(PX) - P(H nabla_E X) at p (E vertical or horizontal)."""
    hj = HoloJets(setup, as_points(p, setup.m))
    return hj.opd("P", _field(E, hj.points), _field(X, hj.points), star).val[0]


def nabla_f_residual(setup: SubmersionSetup, E, U, p, star: bool = False) -> np.ndarray:
    """(V nabla_E f)U = V nabla_E(fU) - f(V nabla_E U); for vertical E this is (nabla-bar_E f)U."""
    hj = HoloJets(setup, as_points(p, setup.m))
    return hj.opd("f", _field(E, hj.points), _field(U, hj.points), star).val[0]


# --- suites ------------------------------------------------------------------------


def _hj(setup: SubmersionSetup, sampler) -> tuple[HoloJets, dict]:
    if sampler is None:
        sampler = Sampler()
    if isinstance(sampler, Sampler):
        return HoloJets(setup, sampler.points(setup.m)), sampler.describe()
    pts = as_points(sampler, setup.m)
    return HoloJets(setup, pts), {"points": pts.tolist()}


def _val(x):
    return x.val if isinstance(x, TJet) else np.asarray(x)


def _swap(x, a=0, b=1):
    """Swap two field axes of a jet/array whose first axis is the sample axis."""
    v = _val(x)
    return np.swapaxes(v, a + 1, b + 1)


def split_entries(hj: HoloJets, report: ResidualReport, tol: float) -> None:
    """Algebra of P, F, t, f inherited from J^2 = -I and g(JE, G) + g(E, JG) = 0."""
    r = max_abs(j_squared(hj.J.val))
    if not r < J2_TOL:
        raise PreconditionError(f"J^2 + I residual {r:.3e}; not an almost complex structure")
    X, U = hj.hframe, hj.vframe
    P, Fo, t, f, H, V = (a.val for a in (hj.P, hj.Fo, hj.t, hj.f, hj.H, hj.V))

    def mm(*ms):
        out = ms[0]
        for b in ms[1:]:
            out = np.einsum("...ij,...jk->...ik", out, b)
        return out

    tight = min(tol, 1e-10)
    rebuilt = (hj.P_(X) + hj.F_(X)).val - apply11(hj.J, X).val
    report.check("JX split", "JX = PX + FX", rebuilt, tight)
    rebuilt = (hj.t_(U) + hj.f_(U)).val - apply11(hj.J, U).val
    report.check("JU split", "JU = tU + fU", rebuilt, tight)
    report.check("P^2", "P^2 = -I - tF", mm(P, P) + H + mm(t, Fo), tight)
    report.check("FP + fF", "FP + fF = 0", mm(Fo, P) + mm(f, Fo), tight)
    report.check("Pt + tf", "Pt + tf = 0", mm(P, t) + mm(t, f), tight)
    report.check("f^2", "f^2 = -I - Ft", mm(f, f) + V + mm(Fo, t), tight)
    g = hj.g
    a = pair(g, hj.P_(X), X).val
    report.check("P skew", "g(PY, Z) + g(Y, PZ) = 0", a + _swap(a), tight)
    a = pair(g, hj.F_(X), U).val + _swap(pair(g, hj.t_(U), X).val)
    report.check("F t skew", "g(FX, U) + g(X, tU) = 0", a, tight)
    a = pair(g, hj.f_(U), U).val
    report.check("f skew", "g(fV, W) + g(V, fW) = 0", a + _swap(a), tight)


def lemma31_entries(hj: HoloJets, report: ResidualReport, tol: float) -> None:
    """Skew pairings of each operator derivative with its dual."""
    X, U = hj.hframe, hj.vframe
    g = hj.g
    cases = [
        ("P", X, X, "g((H nabla_X P)Y, Z) + g(Y, (H nabla*_X P)Z) = 0", "pairing H nabla_X P"),
        ("P", U, X, "g((H nabla_U P)Y, Z) + g(Y, (H nabla*_U P)Z) = 0", "pairing H nabla_U P"),
        ("f", X, U, "g((V nabla_X f)V, W) + g(V, (V nabla*_X f)W) = 0", "pairing V nabla_X f"),
        ("f", U, U, "g((nabla-bar_U f)V, W) + g(V, (nabla-bar*_U f)W) = 0", "pairing nabla-bar_U f"),
    ]
    for op, E, F, anchor, name in cases:
        a = pair(g, hj.opd(op, E, F), F).val  # [e, y, z]
        b = pair(g, F, hj.opd(op, E, F, star=True)).val  # [y, e, z]
        report.check(name, anchor, a + _swap(b), tol)


def lemma31_check(setup: SubmersionSetup, sampler=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """A vanishing operator derivative forces its dual to vanish: the pairing identities."""
    hj, sample = _hj(setup, sampler)
    report = ResidualReport("dual pairings", sample)
    lemma31_entries(hj, report, tol)
    return report


def k_terms(hj: HoloJets) -> list[tuple[str, object, object]]:
    """(formula, lhs, rhs) for the sixteen J-compatibility identities of the split."""
    X, U = hj.hframe, hj.vframe
    P, F, t, f = hj.P_, hj.F_, hj.t_, hj.f_
    T, A, Hn, Vn = hj.Tf, hj.Af, hj.hnab, hj.vnab

    # the eight brace combinations that recur
    hut = Hn(U, t(U)) + T(U, f(U))  # H nabla_U(tV) + T_U(fV)
    vut = T(U, t(U)) + Vn(U, f(U))  # T_U(tV) + nabla-bar_U(fV)
    hup = Hn(U, P(X)) + T(U, F(X))
    vup = T(U, P(X)) + Vn(U, F(X))
    hxt = Hn(X, t(U)) + A(X, f(U))
    vxt = A(X, t(U)) + Vn(X, f(U))
    hxp = Hn(X, P(X)) + A(X, F(X))
    vxp = A(X, P(X)) + Vn(X, F(X))

    return [
        ("H nabla_U(tV) + T_U(fV) = P(T*_U V) + t(nabla-bar*_U V)", hut, P(T(U, U, True)) + t(Vn(U, U, True))),
        ("T_U(tV) + nabla-bar_U(fV) = F(T*_U V) + f(nabla-bar*_U V)", vut, F(T(U, U, True)) + f(Vn(U, U, True))),
        ("H nabla_U(PX) + T_U(FX) = P(H nabla*_U X) + t(T*_U X)", hup, P(Hn(U, X, True)) + t(T(U, X, True))),
        ("T_U(PX) + nabla-bar_U(FX) = F(H nabla*_U X) + f(T*_U X)", vup, F(Hn(U, X, True)) + f(T(U, X, True))),
        ("H nabla_X(tU) + A_X(fU) = P(A*_X U) + t(V nabla*_X U)", hxt, P(A(X, U, True)) + t(Vn(X, U, True))),
        ("A_X(tU) + V nabla_X(fU) = F(A*_X U) + f(V nabla*_X U)", vxt, F(A(X, U, True)) + f(Vn(X, U, True))),
        ("H nabla_X(PY) + A_X(FY) = P(H nabla*_X Y) + t(A*_X Y)", hxp, P(Hn(X, X, True)) + t(A(X, X, True))),
        ("A_X(PY) + V nabla_X(FY) = F(H nabla*_X Y) + f(A*_X Y)", vxp, F(Hn(X, X, True)) + f(A(X, X, True))),
        ("T*_U V = -P{H nabla_U(tV) + T_U(fV)} - t{T_U(tV) + nabla-bar_U(fV)}", T(U, U, True), -(P(hut) + t(vut))),
        ("nabla-bar*_U V = -F{H nabla_U(tV) + T_U(fV)} - f{T_U(tV) + nabla-bar_U(fV)}", Vn(U, U, True), -(F(hut) + f(vut))),
        ("H nabla*_U X = -P{H nabla_U(PX) + T_U(FX)} - t{T_U(PX) + nabla-bar_U(FX)}", Hn(U, X, True), -(P(hup) + t(vup))),
        ("T*_U X = -F{H nabla_U(PX) + T_U(FX)} - f{T_U(PX) + nabla-bar_U(FX)}", T(U, X, True), -(F(hup) + f(vup))),
        ("A*_X U = -P{H nabla_X(tU) + A_X(fU)} - t{A_X(tU) + V nabla_X(fU)}", A(X, U, True), -(P(hxt) + t(vxt))),
        ("V nabla*_X U = -F{H nabla_X(tU) + A_X(fU)} - f{A_X(tU) + V nabla_X(fU)}", Vn(X, U, True), -(F(hxt) + f(vxt))),
        ("H nabla*_X Y = -P{H nabla_X(PY) + A_X(FY)} - t{A_X(PY) + V nabla_X(FY)}", Hn(X, X, True), -(P(hxp) + t(vxp))),
        ("A*_X Y = -F{H nabla_X(PY) + A_X(FY)} - f{A_X(PY) + V nabla_X(FY)}", A(X, X, True), -(F(hxp) + f(vxp))),
    ]


def operator_derivative_terms(hj: HoloJets) -> list[tuple[str, object, object]]:
    """The four operator derivatives expressed through S, T, A and their duals."""
    X, U = hj.hframe, hj.vframe
    P, F, t, f = hj.P_, hj.F_, hj.t_, hj.f_
    T, A = hj.Tf, hj.Af
    S = lambda E, G: apply12(hj.S, E, G)  # noqa: E731
    return [
        ("(nabla-bar_U f)V = -f(V(S_U V)) + F(T*_U V) - T_U(tV)",
         hj.opd("f", U, U), -f(hj.ver(S(U, U))) + F(T(U, U, True)) - T(U, t(U))),
        ("(H nabla_U P)X = -P(H(S_U X)) + t(T*_U X) - T_U(FX)",
         hj.opd("P", U, X), -P(hj.hor(S(U, X))) + t(T(U, X, True)) - T(U, F(X))),
        ("(V nabla_X f)U = -f(V(S_X U)) + F(A*_X U) - A_X(tU)",
         hj.opd("f", X, U), -f(hj.ver(S(X, U))) + F(A(X, U, True)) - A(X, t(U))),
        ("(H nabla_X P)Y = -P(H(S_X Y)) + t(A*_X Y) - A_X(FY)",
         hj.opd("P", X, X), -P(hj.hor(S(X, X))) + t(A(X, X, True)) - A(X, F(X))),
    ]


def guarded_terms(hj: HoloJets) -> list[tuple[str, str, object, object]]:
    """Identities that hold when an operator derivative vanishes: (guard, formula, lhs, rhs)."""
    X, U = hj.hframe, hj.vframe
    P, F, t, f = hj.P_, hj.F_, hj.t_, hj.f_
    T, A, Hn, Vn = hj.Tf, hj.Af, hj.hnab, hj.vnab
    return [
        ("nabla-bar_U f = 0", "T_U(tV) + f(nabla-bar_U V) = F(T*_U V) + f(nabla-bar*_U V)",
         T(U, t(U)) + f(Vn(U, U)), F(T(U, U, True)) + f(Vn(U, U, True))),
        ("H nabla_U P = 0", "P(H nabla_U X) + T_U(FX) = P(H nabla*_U X) + t(T*_U X)",
         P(Hn(U, X)) + T(U, F(X)), P(Hn(U, X, True)) + t(T(U, X, True))),
        ("V nabla_X f = 0", "A_X(tU) + f(V nabla_X U) = F(A*_X U) + f(V nabla*_X U)",
         A(X, t(U)) + f(Vn(X, U)), F(A(X, U, True)) + f(Vn(X, U, True))),
        ("H nabla_X P = 0", "P(H nabla_X Y) + A_X(FY) = P(H nabla*_X Y) + t(A*_X Y)",
         P(Hn(X, X)) + A(X, F(X)), P(Hn(X, X, True)) + t(A(X, X, True))),
    ]


def _check_pair(report, name, anchor, lhs, rhs, tol, note=""):
    report.check(name, anchor, _val(lhs) - _val(rhs), tol, note=note)


def _guarded(report, hj, guard, tol, name, anchor, lhs, rhs, note=""):
    r = hj.guards[guard]
    if r < tol:
        _check_pair(report, name, anchor, lhs, rhs, tol, note=note)
    else:
        res = None if lhs is None else _val(lhs) - _val(rhs)
        report.skip(name, anchor, f"hypothesis not met: {guard} (residual {r:.3e})", tol, residual=res)


def k_identities(setup: SubmersionSetup, sampler=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """J split algebra, dual pairings, the sixteen K-identities, operator derivatives and guarded corollaries."""
    hj, sample = _hj(setup, sampler)
    report = ResidualReport("split identities", sample)
    split_entries(hj, report, tol)
    lemma31_entries(hj, report, tol)
    for k, (formula, lhs, rhs) in enumerate(k_terms(hj)):
        family = "J compatibility of the split" if k < 8 else "dual connection through the split"
        _check_pair(report, formula, family, lhs, rhs, tol)
    for formula, lhs, rhs in operator_derivative_terms(hj):
        _check_pair(report, formula, "operator derivative", lhs, rhs, tol)
    for guard, formula, lhs, rhs in guarded_terms(hj):
        _guarded(report, hj, guard, tol, formula, f"given {guard}", lhs, rhs)
    return report


def section4_terms(hj: HoloJets) -> list[tuple[str | None, str, object, object, str]]:
    """(guard or None, formula, lhs, rhs, note) for the anti-invariant identities."""
    X, U = hj.hframe, hj.vframe
    P, F, t, f = hj.P_, hj.F_, hj.t_, hj.f_
    T, A, Hn, Vn = hj.Tf, hj.Af, hj.hnab, hj.vnab
    S = lambda E, G: apply12(hj.S, E, G)  # noqa: E731
    zero = 0.0
    HUP, HXP = "H nabla_U P = 0", "H nabla_X P = 0"
    out = [
        (HUP, "T_U X = -F(T*_U(FX))", T(U, X), -F(T(U, F(X), True)), ""),
        (HUP, "T*_U X = -F(T_U(FX))", T(U, X, True), -F(T(U, F(X))), ""),
        (HUP, "T_U V = -t(T*_U(tV))", T(U, U), -t(T(U, t(U), True)), ""),
        (HUP, "T*_U V = -t(T_U(tV))", T(U, U, True), -t(T(U, t(U))), ""),
        (HUP, "P(H(S_U X)) - t(T*_U X) + T_U(FX) = 0",
         P(hj.hor(S(U, X))) - t(T(U, X, True)) + T(U, F(X)), zero, "implemented as printed, with the H projection"),
        (HUP, "t(T_U X) = T*_U(FX)", t(T(U, X)), T(U, F(X), True), ""),
        (HUP, "t(T*_U X) = T_U(FX)", t(T(U, X, True)), T(U, F(X)), ""),
        (HUP, "P(T_U V) = 0", P(T(U, U)), zero, ""),
        (HUP, "P(T*_U V) = 0", P(T(U, U, True)), zero, ""),
        (HUP, "F(T_U V) = T*_U(tV)", F(T(U, U)), T(U, t(U), True), ""),
        (HUP, "T*_U(tV) = T*_V(tU)", T(U, t(U), True), _swap(T(U, t(U), True)), ""),
        (HUP, "F(T*_U V) = T_U(tV)", F(T(U, U, True)), T(U, t(U)), ""),
        (HUP, "T_U(tV) = T_V(tU)", T(U, t(U)), _swap(T(U, t(U))), ""),
        (HUP, "T_U(PX) = 0", T(U, P(X)), zero, ""),
        (HUP, "T*_U(PX) = 0", T(U, P(X), True), zero, ""),
        (HUP, "P(H nabla_U X) = P(H nabla*_U X)", P(Hn(U, X)), P(Hn(U, X, True)), ""),
        (None, "F((H nabla_U P)X) + T*_U X + F(T_U(FX)) = 0",
         F(hj.opd("P", U, X)) + T(U, X, True) + F(T(U, F(X))), zero, ""),
        ("T = 0", "H nabla_X P = 0 when the fibers are totally geodesic", hj.opd("P", X, X), zero, ""),
        (HXP, "P(H(S_X Y)) - t(A*_X Y) + A_X(FY) = 0",
         P(hj.hor(S(X, X))) - t(A(X, X, True)) + A(X, F(X)), zero, ""),
        (HXP, "A_X Y = -F(A*_X(FY))", A(X, X), -F(A(X, F(X), True)), ""),
        (HXP, "A*_X Y = -F(A_X(FY))", A(X, X, True), -F(A(X, F(X))),
         "sign fixed: applying F to the preceding identity gives -F(A_X(FY))"),
        (HXP, "A_X U = -t(A*_X(tU))", A(X, U), -t(A(X, t(U), True)), ""),
        (HXP, "A*_X U = -t(A_X(tU))", A(X, U, True), -t(A(X, t(U))), ""),
        (HXP, "F(A_X U) = A*_X(tU)", F(A(X, U)), A(X, t(U), True), ""),
        (HXP, "F(A*_X U) = A_X(tU)", F(A(X, U, True)), A(X, t(U)), ""),
        (HXP, "A_X(PY) = 0", A(X, P(X)), zero, ""),
        (HXP, "A*_X(PY) = 0", A(X, P(X), True), zero, ""),
        (HXP, "P(A_X U) = 0", P(A(X, U)), zero, ""),
        (HXP, "P(A*_X U) = 0", P(A(X, U, True)), zero, ""),
        (HXP, "t(A_X Y) = A*_X(FY)", t(A(X, X)), A(X, F(X), True), ""),
        (HXP, "t(A*_X Y) = A_X(FY)", t(A(X, X, True)), A(X, F(X)), ""),
        (HXP, "A_{PY} U = 0", A(P(X), U), zero, ""),
        (HXP, "A*_{PY} U = 0", A(P(X), U, True), zero, ""),
        (HXP, "P(H nabla_X Y) = P(H nabla*_X Y)", P(Hn(X, X)), P(Hn(X, X, True)), ""),
        (None, "nabla-bar_U V = -F(H nabla*_U(tV))", Vn(U, U), -F(Hn(U, t(U), True)), ""),
        (None, "nabla-bar*_U V = -F(H nabla_U(tV))", Vn(U, U, True), -F(Hn(U, t(U))), ""),
        (HUP, "nabla-bar_U(FX) = F(H nabla*_U X)", Vn(U, F(X)), F(Hn(U, X, True)), ""),
        (HUP, "nabla-bar*_U(FX) = F(H nabla_U X)", Vn(U, F(X), True), F(Hn(U, X)), ""),
        (HUP, "nabla-bar_U(FX) = F(A*_X U) for basic X", Vn(U, F(X)), _swap(F(A(X, U, True))), ""),
        (HUP, "nabla-bar*_U(FX) = F(A_X U) for basic X", Vn(U, F(X), True), _swap(F(A(X, U))), ""),
        (None, "V nabla_X U = -F(H nabla*_X(tU))", Vn(X, U), -F(Hn(X, t(U), True)), ""),
        (None, "V nabla*_X U = -F(H nabla_X(tU))", Vn(X, U, True), -F(Hn(X, t(U))), ""),
        (HXP, "V nabla_X(FY) = F(H nabla*_X Y)", Vn(X, F(X)), F(Hn(X, X, True)), ""),
        (HXP, "V nabla*_X(FY) = F(H nabla_X Y)", Vn(X, F(X), True), F(Hn(X, X)), ""),
    ]
    return out


def p_zero_terms(hj: HoloJets) -> list[tuple[str | None, str, object, object, str]]:
    """Identities for submersions with P = 0, some further guarded."""
    X, U = hj.hframe, hj.vframe
    F, t, f = hj.F_, hj.t_, hj.f_
    T, A, Hn, Vn = hj.Tf, hj.Af, hj.hnab, hj.vnab
    zero = 0.0
    BF, VF = "nabla-bar_U f = 0", "V nabla_X f = 0"
    return [
        (None, "H nabla_U(tV) + T_U(fV) = t(nabla-bar*_U V)", Hn(U, t(U)) + T(U, f(U)), t(Vn(U, U, True)), ""),
        (None, "T_U(tV) + nabla-bar_U(fV) = F(T*_U V) + f(nabla-bar*_U V)",
         T(U, t(U)) + Vn(U, f(U)), F(T(U, U, True)) + f(Vn(U, U, True)), ""),
        (None, "T_U(FX) = t(T*_U X)", T(U, F(X)), t(T(U, X, True)), ""),
        (None, "nabla-bar_U(FX) = F(H nabla*_U X) + f(T*_U X)", Vn(U, F(X)), F(Hn(U, X, True)) + f(T(U, X, True)), ""),
        (None, "H nabla_X(tU) + A_X(fU) = t(V nabla*_X U)", Hn(X, t(U)) + A(X, f(U)), t(Vn(X, U, True)), ""),
        (None, "A_X(tU) + V nabla_X(fU) = F(A*_X U) + f(V nabla*_X U)",
         A(X, t(U)) + Vn(X, f(U)), F(A(X, U, True)) + f(Vn(X, U, True)), ""),
        (None, "A_X(FY) = t(A*_X Y)", A(X, F(X)), t(A(X, X, True)), ""),
        (None, "V nabla_X(FY) = F(H nabla*_X Y) + f(A*_X Y)", Vn(X, F(X)), F(Hn(X, X, True)) + f(A(X, X, True)), ""),
        (None, "H nabla*_U X = A*_X U for basic X", Hn(U, X, True), _swap(A(X, U, True)), ""),
        (None, "H nabla_U X = -t(nabla-bar*_U(FX))", Hn(U, X), -t(Vn(U, F(X), True)), ""),
        (None, "H nabla*_U X = -t(nabla-bar_U(FX))", Hn(U, X, True), -t(Vn(U, F(X))), ""),
        (None, "H nabla_X Y = -t(V nabla*_X(FY))", Hn(X, X), -t(Vn(X, F(X), True)),
         "read with X where U is printed"),
        (None, "H nabla*_X Y = -t(V nabla_X(FY))", Hn(X, X, True), -t(Vn(X, F(X))),
         "read with X where U is printed"),
        (BF, "T_U V = -T_U(FtV)", T(U, U), -T(U, F(t(U))), ""),
        (BF, "T_U V = -t(T*_U(tV))", T(U, U), -t(T(U, t(U), True)), ""),
        (BF, "T*_U V = -T*_U(FtV)", T(U, U, True), -T(U, F(t(U)), True), ""),
        (BF, "T*_U V = -t(T_U(tV))", T(U, U, True), -t(T(U, t(U))), ""),
        (BF, "T_U(fV) = 0", T(U, f(U)), zero, ""),
        (BF, "T_{fV} U = 0", T(f(U), U), zero, ""),
        (BF, "T*_U(fV) = 0", T(U, f(U), True), zero, ""),
        (BF, "T*_{fV} U = 0", T(f(U), U, True), zero, ""),
        (BF, "T_U X = -F(T*_U(FX))", T(U, X), -F(T(U, F(X), True)), ""),
        (BF, "T*_U X = -F(T_U(FX))", T(U, X, True), -F(T(U, F(X))), ""),
        (BF, "f(T_U X) = 0", f(T(U, X)), zero, ""),
        (BF, "f(T*_U X) = 0", f(T(U, X, True)), zero, ""),
        (VF, "A_X U = -t(A*_X(tU))", A(X, U), -t(A(X, t(U), True)), ""),
        (VF, "A_X U = t(A_{tU} X)", A(X, U), _swap(t(A(t(U), X))), ""),
        (VF, "A*_X U = -t(A_X(tU))", A(X, U, True), -t(A(X, t(U))), ""),
        (VF, "A*_X U = t(A*_{tU} X)", A(X, U, True), _swap(t(A(t(U), X, True))), ""),
        (VF, "A_X(fU) = 0", A(X, f(U)), zero, ""),
        (VF, "A*_X(fU) = 0", A(X, f(U), True), zero, ""),
        (VF, "A_X Y = -F(A*_X(FY))", A(X, X), -F(A(X, F(X), True)), ""),
        (VF, "A*_X Y = -F(A_X(FY))", A(X, X, True), -F(A(X, F(X))), ""),
        (VF, "f(A_X Y) = 0", f(A(X, X)), zero, ""),
        (VF, "f(A*_X Y) = 0", f(A(X, X, True)), zero, ""),
    ]


def conformal_terms(hj: HoloJets) -> list[tuple[str | None, str, np.ndarray, np.ndarray, str]]:
    """Conformal-fiber identities, in terms of the mean curvature N."""
    X, U = hj.hframe, hj.vframe
    g = hj.g.val
    N = hj.mean_curvature
    s = hj.s
    gUV = np.einsum("ai,nij,bj->nab", U, g, U)
    gNX = np.einsum("ni,nij,nxj->nx", N, g, X.val)
    Us = np.broadcast_to(U, (g.shape[0],) + U.shape)
    tU = hj.t_(U).val
    gNtV = np.einsum("ni,nij,nvj->nv", N, g, tU)
    return [
        (None, "T_U V = (1/s) g(U,V) N", hj.Tf(U, U).val, np.einsum("nab,nk->nabk", gUV, N) / s, ""),
        (None, "T*_U X = -(1/s) g(N,X) U", hj.Tf(U, X, True).val, -np.einsum("nx,nuk->nuxk", gNX, Us) / s, ""),
        ("H nabla_U P = 0", "T_U V = (1/s) g(N,tV) tU", hj.Tf(U, U).val, np.einsum("nv,nuk->nuvk", gNtV, tU) / s, ""),
    ]


def section4_suite(setup: SubmersionSetup, sampler=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Anti-invariant and P = 0 identities, each guarded by its hypotheses."""
    hj, sample = _hj(setup, sampler)
    report = ResidualReport("anti-invariant and P = 0", sample)
    gd = hj.guards
    anti = gd["f = 0"] < tol
    pzero = gd["P = 0"] < tol
    seen: set[str] = set()

    def label(formula, family, guard):
        context = family + ("" if guard is None else f", {guard}")
        name = formula if formula not in seen else f"{formula} [{context}]"
        seen.add(formula)
        return name, f"given {context}"

    def run(terms, family, gate_ok, gate_reason, extra=None):
        for guard, formula, lhs, rhs, note in terms:
            name, anchor = label(formula, family, guard)
            if not gate_ok:
                report.skip(name, anchor, gate_reason, tol)
            elif extra is not None and not extra[0]:
                report.skip(name, anchor, extra[1], tol, residual=_val(lhs) - _val(rhs))
            elif guard is None:
                _check_pair(report, name, anchor, lhs, rhs, tol, note)
            else:
                _guarded(report, hj, guard, tol, name, anchor, lhs, rhs, note)

    not_anti = "not anti-invariant; anti-invariant identities skipped"
    run(section4_terms(hj), "anti-invariant fiber", anti, not_anti)
    conformal = anti and max_abs(hj.conformal_residual) < tol
    run(conformal_terms(hj), "anti-invariant conformal fiber", anti, not_anti,
        extra=(conformal, "hypothesis not met: conformal fiber"))
    run(p_zero_terms(hj), "P = 0", pzero, f"hypothesis not met: P = 0 (residual {gd['P = 0']:.3e})")
    return report


# --- space-form system -----------------------------------------------------------------


def space_form_rhs(hj: HoloJets) -> dict[str, tuple[np.ndarray, str]]:
    """The braces multiplying c/4 in the twelve curvature identities under the space-form condition."""
    g = hj.g.val
    X, U = hj.hframe.val, np.broadcast_to(hj.vframe, (g.shape[0],) + hj.vframe.shape)

    def op(M, Y):
        return np.einsum("...kl,...al->...ak", M.val, Y)

    P, F, t, f = (lambda Y, M=M: op(M, Y) for M in (hj.P, hj.Fo, hj.t, hj.f))

    def gp(a, b):
        return np.einsum("...ai,...ij,...bj->...ab", a, g, b)

    def e(sub, *ops):
        return np.einsum(sub, *ops)

    out = {}
    out["1"] = (
        e("...vw,...uz->...uvwz", gp(U, U), gp(U, U)) - e("...uw,...vz->...uvwz", gp(U, U), gp(U, U))
        + e("...vw,...uz->...uvwz", gp(f(U), U), gp(f(U), U)) - e("...uw,...vz->...uvwz", gp(f(U), U), gp(f(U), U))
        + 2 * e("...uv,...wz->...uvwz", gp(U, f(U)), gp(f(U), U)),
        "g(V,W)g(U,W') - g(U,W)g(V,W') + g(fV,W)g(fU,W') - g(fU,W)g(fV,W') + 2g(U,fV)g(fW,W')",
    )
    out["2"] = (
        e("...vw,...ux->...uvwx", gp(f(U), U), gp(t(U), X)) - e("...uw,...vx->...uvwx", gp(f(U), U), gp(t(U), X))
        + 2 * e("...uv,...wx->...uvwx", gp(U, f(U)), gp(t(U), X)),
        "g(fV,W)g(tU,X) - g(fU,W)g(tV,X) + 2g(U,fV)g(tW,X)",
    )
    out["3"] = (
        e("...vx,...uw->...uvxw", gp(t(U), X), gp(f(U), U)) - e("...ux,...vw->...uvxw", gp(t(U), X), gp(f(U), U))
        + 2 * e("...uv,...xw->...uvxw", gp(U, f(U)), gp(F(X), U)),
        "g(tV,X)g(fU,W) - g(tU,X)g(fV,W) + 2g(U,fV)g(FX,W)",
    )
    out["4"] = (
        e("...vx,...uy->...uvxy", gp(t(U), X), gp(t(U), X)) - e("...ux,...vy->...uvxy", gp(t(U), X), gp(t(U), X))
        + 2 * e("...uv,...xy->...uvxy", gp(U, f(U)), gp(P(X), X)),
        "g(tV,X)g(tU,Y) - g(tU,X)g(tV,Y) + 2g(U,fV)g(PX,Y)",
    )
    out["5"] = (
        e("...uv,...xw->...xuvw", gp(f(U), U), gp(F(X), U)) - e("...xv,...uw->...xuvw", gp(F(X), U), gp(f(U), U))
        + 2 * e("...xu,...vw->...xuvw", gp(X, t(U)), gp(f(U), U)),
        "g(fU,V)g(FX,W) - g(FX,V)g(fU,W) + 2g(X,tU)g(fV,W)",
    )
    out["6"] = (
        e("...uv,...xy->...xuvy", gp(U, U), gp(X, X)) + e("...uv,...xy->...xuvy", gp(f(U), U), gp(P(X), X))
        - e("...xv,...uy->...xuvy", gp(F(X), U), gp(t(U), X)) + 2 * e("...xu,...vy->...xuvy", gp(X, t(U)), gp(t(U), X)),
        "g(U,V)g(X,Y) + g(fU,V)g(PX,Y) - g(FX,V)g(tU,Y) + 2g(X,tU)g(tV,Y)",
    )
    out["7"] = (
        -e("...xy,...uv->...xuyv", gp(X, X), gp(U, U)) + e("...uy,...xv->...xuyv", gp(t(U), X), gp(F(X), U))
        - e("...xy,...uv->...xuyv", gp(P(X), X), gp(f(U), U)) + 2 * e("...xu,...yv->...xuyv", gp(X, t(U)), gp(F(X), U)),
        "-g(X,Y)g(U,V) + g(tU,Y)g(FX,V) - g(PX,Y)g(fU,V) + 2g(X,tU)g(FY,V)",
    )
    out["8"] = (
        e("...uy,...xz->...xuyz", gp(t(U), X), gp(P(X), X)) - e("...xy,...uz->...xuyz", gp(P(X), X), gp(t(U), X))
        + 2 * e("...xu,...yz->...xuyz", gp(X, t(U)), gp(P(X), X)),
        "g(tU,Y)g(PX,Z) - g(PX,Y)g(tU,Z) + 2g(X,tU)g(PY,Z)",
    )
    out["9"] = (
        e("...yu,...xv->...xyuv", gp(F(X), U), gp(F(X), U)) - e("...xu,...yv->...xyuv", gp(F(X), U), gp(F(X), U))
        + 2 * e("...xy,...uv->...xyuv", gp(X, P(X)), gp(f(U), U)),
        "g(FY,U)g(FX,V) - g(FX,U)g(FY,V) + 2g(X,PY)g(fU,V)",
    )
    out["10"] = (
        e("...yu,...xz->...xyuz", gp(F(X), U), gp(P(X), X)) - e("...xu,...yz->...xyuz", gp(F(X), U), gp(P(X), X))
        + 2 * e("...xy,...uz->...xyuz", gp(X, P(X)), gp(t(U), X)),
        "g(FY,U)g(PX,Z) - g(FX,U)g(PY,Z) + 2g(X,PY)g(tU,Z)",
    )
    out["11"] = (
        e("...yz,...xu->...xyzu", gp(P(X), X), gp(F(X), U)) - e("...xz,...yu->...xyzu", gp(P(X), X), gp(F(X), U))
        + 2 * e("...xy,...zu->...xyzu", gp(X, P(X)), gp(F(X), U)),
        "g(PY,Z)g(FX,U) - g(PX,Z)g(FY,U) + 2g(X,PY)g(FZ,U)",
    )
    out["12"] = (
        e("...yz,...xw->...xyzw", gp(X, X), gp(X, X)) - e("...xz,...yw->...xyzw", gp(X, X), gp(X, X))
        + e("...yz,...xw->...xyzw", gp(P(X), X), gp(P(X), X)) - e("...xz,...yw->...xyzw", gp(P(X), X), gp(P(X), X))
        + 2 * e("...xy,...zw->...xyzw", gp(X, P(X)), gp(P(X), X)),
        "g(Y,Z)g(X,Z') - g(X,Z)g(Y,Z') + g(PY,Z)g(PX,Z') - g(PX,Z)g(PY,Z') + 2g(X,PY)g(PZ,Z')",
    )
    return out


def space_form_system(setup: SubmersionSetup, c: float | None = None, sampler=None, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Curvature identities of the split under the space-form condition; vacuous unless it holds at c."""
    hj, sample = _hj(setup, sampler)
    report = ResidualReport("space form", sample)
    R = hj.R.val
    K = space_form_shape(hj.g.val, hj.J.val)
    from .complex_structure import SPACE_FORM_ANCHOR, fit_c

    fitted = c is None
    if fitted:
        c = fit_c(R, K)
    total = R - 0.25 * c * K
    holds = max_abs(total) < tol
    label = f"c = {c:.12g}" + (" (least squares)" if fitted else "")
    if holds:
        report.check("space form", SPACE_FORM_ANCHOR, total, tol, note=label)
    else:
        report.skip("space form", SPACE_FORM_ANCHOR, f"condition does not hold at {label}", tol, residual=total)
    lhs = theorem_f_terms(hj)
    for key, (brace, anchor) in space_form_rhs(hj).items():
        _, fl, _ = lhs[f"F{key}"]
        res = fl - 0.25 * c * brace
        name = f"space form {key}"
        anchor = f"left side of curvature identity {key} = (c/4){{{anchor}}}"
        if holds:
            report.check(name, anchor, res, tol, note=label)
        else:
            report.skip(name, anchor, f"vacuous: space-form condition fails at {label}", tol, residual=res)
    return report


# --- classification ------------------------------------------------------------------------


@dataclass
class Classification:
    anti_invariant: bool
    invariant: bool
    p_zero: bool
    isometric_fiber: bool
    conformal_fiber: bool
    fiber_dim: int
    mean_curvature: list[float]
    t_norm_center: float
    ft_residual: float | None
    residuals: dict[str, float]
    space_form_c: float | None
    space_form_residual: float | None
    branches: dict[str, str]
    tolerance: float
    center: list[float] = field(default_factory=list)

    def labels(self) -> list[str]:
        out = []
        out.append("anti-invariant" if self.anti_invariant else ("invariant" if self.invariant else "neither invariant nor anti-invariant"))
        out.append("P=0" if self.p_zero else "P!=0")
        out.append("f=0" if self.residuals["f"] < self.tolerance else "f!=0")
        out.append("fiber isometric" if self.isometric_fiber else "fiber not isometric")
        out.append("fiber conformal" if self.conformal_fiber else "fiber not conformal")
        return out

    def summary(self) -> str:
        return ", ".join(self.labels())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["summary"] = self.summary()
        return d


def _theorem_branches(hj: HoloJets, flags: dict, c: float, sf_ok: bool, tol: float) -> dict[str, str]:
    gd = hj.guards
    flat = max_abs(hj.R.val) < tol
    out = {}

    def label(hyps: list[tuple[str, bool]], branches: list[tuple[str, bool]]) -> str:
        missing = [h for h, ok in hyps if not ok]
        if missing:
            return "not applicable: " + "; ".join(missing)
        shown = [b for b, ok in branches if ok]
        return "hypotheses met; exhibits: " + (", ".join(shown) if shown else "no listed branch")

    sf = (f"space-form condition (c = {c:.6g})", sf_ok)
    out["isometric fiber trichotomy"] = label(
        [("isometric fiber", flags["isometric"]), sf],
        [("flat total space", flat), ("invariant fiber", flags["invariant"]), ("anti-invariant fiber", flags["anti"])],
    )
    out["anti-invariant space form"] = label(
        [("anti-invariant", flags["anti"]), sf, ("H nabla_X P = 0", gd["H nabla_X P = 0"] < tol)],
        [("flat total space", flat), ("P=0", flags["pzero"])],
    )
    out["P=0 space form"] = label(
        [("P=0", flags["pzero"]), sf, ("nabla-bar_U f = 0", gd["nabla-bar_U f = 0"] < tol)],
        [("flat total space", flat), ("f=0", flags["fzero"])],
    )
    both = flags["pzero"] == flags["fzero"]
    out["P=0 iff f=0"] = label(
        [sf, ("c != 0", abs(c) > 1e-6), ("H nabla_X P = 0", gd["H nabla_X P = 0"] < tol),
         ("nabla-bar_U f = 0", gd["nabla-bar_U f = 0"] < tol)],
        [("P=0 and f=0 agree", both)],
    )
    out["conformal fiber dimension"] = label(
        [("anti-invariant", flags["anti"]), ("conformal fiber", flags["conformal"]),
         ("H nabla_U P = 0", gd["H nabla_U P = 0"] < tol)],
        [("fiber dimension one", hj.s == 1), ("isometric fiber", flags["isometric"])],
    )
    return out


def classify(setup: SubmersionSetup, sampler: Sampler | None = None, tol: float = DEFAULT_TOL, c: float | None = None) -> Classification:
    """Flags of the J split and the fibers, plus which branch of each structure theorem the instance shows."""
    sampler = sampler or Sampler()
    hj = HoloJets(setup, sampler.points(setup.m))
    gd = hj.guards
    res = {
        "f": gd["f = 0"],
        "t": gd["t = 0"],
        "P": gd["P = 0"],
        "T": gd["T = 0"],
        "conformal": max_abs(hj.conformal_residual),
        **{k: v for k, v in gd.items() if "nabla" in k},
    }
    flags = {
        "anti": res["f"] < tol,
        "invariant": res["t"] < tol,
        "pzero": res["P"] < tol,
        "fzero": res["f"] < tol,
        "isometric": res["T"] < tol,
        "conformal": res["conformal"] < tol,
    }
    ft = None
    if flags["anti"]:
        ft = max_abs(np.einsum("...ij,...jk->...ik", hj.Fo.val, hj.t.val) + hj.V.val)
    R = hj.R.val
    K = space_form_shape(hj.g.val, hj.J.val)
    from .complex_structure import fit_c

    if c is None:
        c = fit_c(R, K)
    sf_res = max_abs(R - 0.25 * c * K)
    if sampler.fixed is not None:
        center = hj.points[:1]
    else:
        lo, hi = sampler.box
        center = np.full((1, setup.m), 0.5 * (lo + hi))
    hc = HoloJets(setup, center)
    return Classification(
        anti_invariant=flags["anti"],
        invariant=flags["invariant"],
        p_zero=flags["pzero"],
        isometric_fiber=flags["isometric"],
        conformal_fiber=flags["conformal"],
        fiber_dim=setup.s,
        mean_curvature=[float(x) for x in hc.mean_curvature[0]],
        t_norm_center=float(np.linalg.norm(hc.T.val[0])),
        ft_residual=ft,
        residuals={k: float(v) for k, v in res.items()},
        space_form_c=float(c),
        space_form_residual=float(sf_res),
        branches=_theorem_branches(hj, flags, c, sf_res < tol, tol),
        tolerance=tol,
        center=[float(x) for x in center[0]],
    )


def classification_entries(cl: Classification, report: ResidualReport) -> None:
    """Flags as report rows: each row passes iff the residual sits on the side the flag claims."""
    tol = cl.tolerance
    for name, anchor, key in (
        ("anti-invariant fiber", "J(V) in H, i.e. f = 0", "f"),
        ("invariant fiber", "J(V) in V, i.e. t = 0", "t"),
        ("P = 0", "P = H J H vanishes", "P"),
        ("isometric fiber", "T = 0", "T"),
        ("conformal fiber", "T_U V = (1/s) g(U,V) N", "conformal"),
    ):
        r = cl.residuals[key]
        verdict = "yes" if r < tol else "no"
        report.skip(name, anchor, f"flag: {verdict}", tol, residual=[r])
    if cl.ft_residual is not None:
        report.check("Ft = -I", "Ft = -I on vertical vectors when f = 0", [cl.ft_residual], min(tol, 1e-10))
