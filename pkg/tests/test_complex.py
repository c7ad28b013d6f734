import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statsub.complex_structure import (
    best_fit_c,
    hermitian_residual,
    holomorphic_suite,
    kahler_residual,
    lemma_a_residuals,
    nabla_omega_residual,
    space_form_residual,
    space_form_shape,
)
from statsub.fields import ComplexStructureField, ConnectionField, MetricField
from statsub.geometry import StructureJets, levi_civita
from statsub.residuals import PreconditionError, Sampler

E4 = np.eye(4)
EUCLID = MetricField.diagonal(4, ["1"] * 4)
FLAT = ConnectionField.flat(4)

# left multiplication by the quaternion units i and j on (a, b, c, d) = a + bi + cj + dk
L_I = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
L_J = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])


def j_from(matrix_of_sources) -> ComplexStructureField:
    entries = [(i + 1, j + 1, s) for (i, j), s in np.ndenumerate(matrix_of_sources) if s]
    return ComplexStructureField.from_entries(4, entries)


def rotated_j() -> ComplexStructureField:
    """cos(x1) L_i + sin(x1) L_j: orthogonal and J^2 = -I everywhere, but not parallel."""
    src = np.full((4, 4), "", dtype=object)
    for (a, b), v in np.ndenumerate(L_I):
        if v:
            src[a, b] = f"{v}*cos(x1)"
    for (a, b), v in np.ndenumerate(L_J):
        if v:
            src[a, b] = f"{v}*sin(x1)"
    return j_from(src)


def constant_j() -> ComplexStructureField:
    return j_from(np.where(L_I != 0, L_I.astype(str), ""))


def test_example1_j_action(ex1):
    J = ex1.complex_structure.jet(np.zeros((1, 4))).val[0]
    np.testing.assert_array_equal(J @ E4[0], -E4[2])
    np.testing.assert_array_equal(J @ E4[2], E4[0])


def test_hermitian(ex1):
    g, J = ex1.metric, ex1.complex_structure
    assert hermitian_residual(g, J, E4[0], E4[0], [0.3, 0.1, 0, 0]) == 0.0
    assert hermitian_residual(g, J, np.zeros(4), np.zeros(4), [0.3, 0.1, 0, 0]) == 0.0
    worst = max(
        abs(hermitian_residual(g, J, E4[a], E4[b], p))
        for p in Sampler(count=50).points(4)
        for a, b in itertools.product(range(4), repeat=2)
    )
    assert worst < 1e-10


def test_kahler(ex1):
    assert not kahler_residual(EUCLID, constant_j(), E4[0], E4[1], [0.2, 0.3, 0.1, 0]).any()
    worst = max(
        np.abs(kahler_residual(ex1.metric, ex1.complex_structure, E4[a], E4[b], p)).max()
        for p in Sampler(count=50).points(4)[::5]
        for a, b in itertools.product(range(4), repeat=2)
    )
    assert worst < 1e-9
    assert holomorphic_suite(ex1.metric, ex1.connection, ex1.complex_structure, Sampler(count=50))["Kähler"].max_residual < 1e-9


def test_rotated_j_is_hermitian_but_not_kahler():
    J = rotated_j()
    rep = holomorphic_suite(EUCLID, FLAT, J, Sampler(count=20))
    assert rep["J^2 + I"].passed and rep["Hermitian"].passed
    assert not rep["Kähler"].passed
    # d/dx1 of J is -sin L_i + cos L_j, which is what the flat Levi-Civita derivative sees
    r = kahler_residual(EUCLID, J, E4[0], E4[0], [0.0, 0, 0, 0])
    np.testing.assert_allclose(r, L_J @ E4[0], atol=1e-14)


def test_nabla_omega(ex1, perturbed):
    g, c, J = ex1.metric, ex1.connection, ex1.complex_structure
    worst = max(
        abs(nabla_omega_residual(g, c, J, E4[a], E4[b], E4[d], p))
        for p in Sampler(count=50).points(4)[::10]
        for a, b, d in itertools.product(range(4), repeat=3)
    )
    assert worst < 1e-9
    assert holomorphic_suite(g, c, J, Sampler(count=50))["omega parallel"].max_residual < 1e-9
    assert nabla_omega_residual(EUCLID, levi_civita(EUCLID), constant_j(), E4[0], E4[1], E4[2], [0.1, 0, 0, 0]) == 0.0
    bad = max(
        abs(nabla_omega_residual(perturbed.metric, perturbed.connection, J, E4[0], E4[b], E4[d], [0.2, 0.1, 0, 0]))
        for b, d in itertools.product(range(4), repeat=2)
    )
    assert bad > 1e-3


def test_j_compatibility(ex1):
    rep = lemma_a_residuals(ex1.metric, ex1.connection, ex1.complex_structure, Sampler(count=50))
    assert len(rep.entries) == 3
    assert rep.max_residual() < 1e-8
    flat = lemma_a_residuals(EUCLID, levi_civita(EUCLID), constant_j(), Sampler(count=5))
    assert flat.max_residual() == 0.0


def test_j_compatibility_refuses_non_complex(ex1):
    doubled = j_from(np.array([["", "", "2", ""], ["", "", "", "2"], ["-2", "", "", ""], ["", "-2", "", ""]]))
    with pytest.raises(PreconditionError, match="J\\^2"):
        lemma_a_residuals(ex1.metric, ex1.connection, doubled, Sampler(count=3))


def test_curvature_intertwining_follows(ex1):
    rep = lemma_a_residuals(ex1.metric, ex1.connection, ex1.complex_structure, Sampler(count=20))
    assert rep["J intertwines duals"].max_residual < 1e-9
    assert rep["J intertwines curvatures"].max_residual < 1e-7


def test_space_form_flat(flat):
    for p in Sampler(count=10).points(4):
        r = space_form_residual(flat.metric, flat.complex_structure, flat.connection, 0.0, E4[0], E4[1], E4[2], p)
        assert not r.any()


def test_space_form_best_fit_matches_lstsq(ex1):
    s = Sampler(count=10)
    c, resid = best_fit_c(ex1.metric, ex1.complex_structure, ex1.connection, s)
    sj = StructureJets(ex1.metric, ex1.connection, s.points(4), ex1.complex_structure)
    K = space_form_shape(sj.g.val, sj.J.val).ravel()
    R = sj.R.val.ravel()
    (ref,), *_ = np.linalg.lstsq(0.25 * K[:, None], R, rcond=None)
    assert c == pytest.approx(ref, rel=1e-12)
    assert resid == pytest.approx(np.abs(R - 0.25 * c * K).max())


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4),
    st.floats(-3, 3, allow_nan=False),
)
def test_space_form_vanishes_on_equal_arguments(ex1, p, E, G, c):
    r = space_form_residual(ex1.metric, ex1.complex_structure, ex1.connection, c, E, E, G, p)
    assert np.abs(r).max() < 1e-9


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4),
)
def test_omega_antisymmetric(ex1, p, E, F):
    sj = StructureJets(ex1.metric, None, [p], ex1.complex_structure)
    g, J = sj.g.val[0], sj.J.val[0]
    E, F = np.asarray(E), np.asarray(F)
    assert abs(E @ g @ (J @ F) + F @ g @ (J @ E)) < 1e-10
