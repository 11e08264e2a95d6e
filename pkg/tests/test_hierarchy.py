import math

import numpy as np
import pytest

from nckepler import duals
from nckepler.geometry import (
    Chart,
    PhasePoint,
    ScalarField,
    coordinate_field,
    flat_sharp_composition,
    gradient,
    interior_product,
    lie_derivative,
    max_abs,
    nijenhuis_torsion,
    schouten_bracket,
)
from nckepler.hierarchy import (
    ClassicalDelaunay,
    DelaunayState,
    OrbitalElements,
    classical_delaunay,
    corrupted_first_level_bivector,
    delaunay_energy_field,
    delaunay_flow_field,
    displayed_bivector_table,
    displayed_two_form_table,
    energy_rescaled_map,
    hierarchy_in_action_angle,
    hierarchy_level,
    ladder_energy_field,
    lambda_bracket,
    level_bivector,
    level_two_form,
    recursion_operator,
    weight_vector,
)
from nckepler.reduced import ReducedParams
from nckepler.sampling import sample_action_angle, sample_delaunay

RP = ReducedParams(thetadot=0.005, phidot=0.3)
M1 = ReducedParams()  # M = 1
PT = PhasePoint((0.5, 1.2, 2.0, 0.7, 1.9, 4.1), Chart.DELAUNAY)


def test_level_zero_energy_is_hamiltonian():
    F0 = ladder_energy_field(0, RP)
    H = delaunay_energy_field(RP)
    for x in sample_delaunay(10, seed=0):
        assert abs(duals.value(F0(x)) - duals.value(H(x))) < 1e-15


def test_level_zero_recursion_is_identity():
    T0 = recursion_operator(0, RP)
    mat = T0(PT)
    for i in range(6):
        for j in range(6):
            assert mat[i][j] == (1.0 if i == j else 0.0)


def test_level_two_recursion_frozen_diagonal():
    T2 = recursion_operator(2, M1)
    mat = T2(PhasePoint((1.0, 2.0, 3.0, 0.0, 0.0, 0.0), Chart.DELAUNAY))
    assert [mat[j][j] for j in range(3)] == [1.0, 4.0, 9.0]
    assert [mat[3 + j][3 + j] for j in range(3)] == [1.0, 4.0, 9.0]


def test_hierarchy_level_bundle():
    lvl = hierarchy_level(2, RP)
    assert lvl.h == 2
    with pytest.raises(ValueError):
        hierarchy_level(-1, RP)


def test_compatibility_of_all_levels():
    P0 = level_bivector(0, RP)
    for h in range(4):
        Ph = level_bivector(h, RP)
        assert max_abs(schouten_bracket(Ph, P0, PT)) < 1e-12
        for hp in range(1, h):
            assert max_abs(schouten_bracket(Ph, level_bivector(hp, RP), PT)) < 1e-12


def test_flow_pairing_every_level():
    X = delaunay_flow_field(RP)
    for h in range(4):
        omega = level_two_form(h, RP)
        F = ladder_energy_field(h, RP)
        ip = interior_product(X, omega, PT)
        dF = gradient(F, PT)
        assert max(abs(duals.value(ip[i]) + duals.value(dF[i])) for i in range(6)) < 1e-12


def test_level_pair_mutually_inverse():
    for h in range(4):
        comp = flat_sharp_composition(level_two_form(h, RP)(PT), level_bivector(h, RP)(PT))
        assert max(abs(comp[i][j] - (i == j)) for i in range(6) for j in range(6)) < 1e-13


def test_recursion_torsion_vanishes_both_charts():
    for h in (1, 2):
        T = recursion_operator(h, RP)
        for a in range(6):
            for b in range(a + 1, 6):
                t = nijenhuis_torsion(T, coordinate_field(Chart.DELAUNAY, a),
                                      coordinate_field(Chart.DELAUNAY, b), PT)
                assert max_abs(t) < 1e-12
    x = PhasePoint((0.3, 0.5, 1.2, 0.4, 2.2, 0.9), Chart.ACTION_ANGLE)
    Taa = hierarchy_in_action_angle(2, RP)[2]
    for a in range(6):
        for b in range(a + 1, 6):
            t = nijenhuis_torsion(Taa, coordinate_field(Chart.ACTION_ANGLE, a),
                                  coordinate_field(Chart.ACTION_ANGLE, b), x)
            assert max_abs(t) < 1e-12


def test_recursion_eigenvalues_flow_invariant():
    X = delaunay_flow_field(RP)
    N = weight_vector(RP)
    for h in (1, 2, 3):
        for j in range(3):
            eig = ScalarField(Chart.DELAUNAY, lambda c, j=j, h=h: N[j] ** h * c[j] ** h)
            assert abs(lie_derivative(X, eig, PT)) < 1e-14


def test_recursion_semigroup():
    for h1 in range(3):
        for h2 in range(3):
            T1 = recursion_operator(h1, RP)(PT)
            T2 = recursion_operator(h2, RP)(PT)
            T12 = recursion_operator(h1 + h2, RP)(PT)
            prod = np.array(T1) @ np.array(T2)
            assert np.max(np.abs(prod - np.array(T12))) < 1e-12


def test_lambda_bracket_level_zero_is_weighted_canonical():
    f = ScalarField(Chart.DELAUNAY, lambda c: c[0] * c[3] + c[2] ** 2)
    g = ScalarField(Chart.DELAUNAY, lambda c: c[1] * c[5])
    v = lambda_bracket(f, g, PT, 0, M1)
    # level 0 with unit weights: canonical bracket in (I, phi)
    from nckepler import duals as D

    df = D.grad(f.func, list(PT.coords))
    dg = D.grad(g.func, list(PT.coords))
    expect = sum(df[i] * dg[3 + i] - df[3 + i] * dg[i] for i in range(3))
    assert abs(v - expect) < 1e-15


def test_lambda_bracket_generates_flow_at_each_level():
    X = delaunay_flow_field(RP)
    for h in range(3):
        F = ladder_energy_field(h, RP)
        for a in range(6):
            coord = ScalarField(Chart.DELAUNAY, lambda c, a=a: c[a])
            v = duals.value(lambda_bracket(F, coord, PT, h, RP))
            assert abs(v - duals.value(X(PT)[a])) < 1e-12


def test_lambda_bracket_antisymmetry_and_leibniz():
    f = ScalarField(Chart.DELAUNAY, lambda c: c[0] * c[4])
    g = ScalarField(Chart.DELAUNAY, lambda c: c[2] + c[5] ** 2)
    fg = ScalarField(Chart.DELAUNAY, lambda c: f.func(c) * g.func(c))
    h_field = ScalarField(Chart.DELAUNAY, lambda c: c[1] + c[3])
    v1 = lambda_bracket(f, g, PT, 2, RP)
    v2 = lambda_bracket(g, f, PT, 2, RP)
    assert abs(v1 + v2) < 1e-13
    lhs = lambda_bracket(fg, h_field, PT, 2, RP)
    rhs = duals.value(f(PT)) * lambda_bracket(g, h_field, PT, 2, RP) \
        + duals.value(g(PT)) * lambda_bracket(f, h_field, PT, 2, RP)
    assert abs(lhs - rhs) < 1e-12


def test_transported_tensors_keep_identities():
    x = PhasePoint((0.35, 0.6, 1.1, 0.5, 2.0, 1.3), Chart.ACTION_ANGLE)
    P0aa, W0aa, _ = hierarchy_in_action_angle(0, RP)
    for h in (1, 2):
        Paa, Waa, Taa = hierarchy_in_action_angle(h, RP)
        assert max_abs(schouten_bracket(Paa, P0aa, x)) < 1e-11
        comp = flat_sharp_composition(Waa(x), Paa(x))
        assert max(abs(comp[i][j] - (i == j)) for i in range(6) for j in range(6)) < 1e-12


def test_transported_pairing_with_in_chart_flow():
    from nckepler.suites import _aa_flow_field

    x = PhasePoint((0.35, 0.6, 1.1, 0.5, 2.0, 1.3), Chart.ACTION_ANGLE)
    X = _aa_flow_field(RP)
    for h in (1, 2, 3):
        Waa = hierarchy_in_action_angle(h, RP)[1]
        F = ladder_energy_field(h, RP, chart=Chart.ACTION_ANGLE)
        ip = interior_product(X, Waa, x)
        dF = gradient(F, x)
        assert max(abs(duals.value(ip[i]) + duals.value(dF[i])) for i in range(6)) < 1e-11


def test_displayed_table_level_zero_is_canonical():
    x = sample_action_angle(1, seed=3)[0]
    tab = displayed_bivector_table(0, RP, list(x.coords))
    for i in range(3):
        assert tab[i][3 + i] == 1.0
    assert tab[1][3] == 0.0 and tab[2][3] == 0.0 and tab[2][4] == 0.0


def test_displayed_table_diagonal_matches_transport_off_diagonal_does_not():
    x = sample_action_angle(1, seed=4)[0]
    for h in (1, 2):
        tab = displayed_bivector_table(h, RP, list(x.coords))
        true = hierarchy_in_action_angle(h, RP)[0](x)
        for i in range(3):
            assert abs(tab[i][3 + i] - duals.value(true[i][3 + i])) < 1e-12
        off = max(abs(tab[i][j] - duals.value(true[i][j])) for i in range(6) for j in range(6))
        assert off > 1e-3  # the displayed off-diagonal pattern is not the transport


def test_displayed_table_internal_relation():
    x = sample_action_angle(1, seed=5)[0]
    for h in (1, 2, 3):
        tab = displayed_bivector_table(h, RP, list(x.coords))
        assert abs(tab[1][3] - (tab[0][3] - tab[1][4]) / RP.M) < 1e-14
        wtab = displayed_two_form_table(h, RP, list(x.coords))
        assert abs(wtab[3][1] - RP.M * (wtab[3][0] - wtab[4][1])) < 1e-14


def test_negative_control_breaks_compatibility():
    Pc = corrupted_first_level_bivector(RP)
    P0 = level_bivector(0, RP)
    assert max_abs(schouten_bracket(Pc, P0, PT)) > 1e-2


def test_energy_rescaled_map_is_canonical():
    fwd = energy_rescaled_map(RP)
    N = weight_vector(RP)
    omega_w = np.zeros((6, 6))
    for j in range(3):
        omega_w[j][3 + j] = 1.0 / N[j]
        omega_w[3 + j][j] = -1.0 / N[j]
    for x in sample_delaunay(5, seed=6):
        J = np.array(duals.jacobian(fwd, list(x.coords)))
        assert np.max(np.abs(J.T @ omega_w @ J - omega_w)) < 1e-11


def test_classical_delaunay_frozen_values():
    el = OrbitalElements(a=1.0, e=0.0, inclination=0.0, n=1.0, t0=0.0)
    cd = classical_delaunay(el, 1.0, 1.0)
    assert (cd.I1, cd.I2, cd.I3) == (1.0, 1.0, 1.0)
    assert cd.mean_anomaly(2.5) == 2.5


def test_classical_delaunay_eccentric_limit():
    i3_ref = classical_delaunay(
        OrbitalElements(a=1.0, e=0.0, inclination=0.3, n=1.0, t0=0.0), 1.0, 1.0
    ).I3
    for e in (0.9, 0.99, 0.999):
        cd = classical_delaunay(
            OrbitalElements(a=1.0, e=e, inclination=0.3, n=1.0, t0=0.0), 1.0, 1.0
        )
        assert cd.I3 == i3_ref
        assert cd.I2 < math.sqrt(1 - e**2) + 1e-12


def test_classical_delaunay_energy_consistency():
    el = OrbitalElements(a=1.3, e=0.4, inclination=0.6, n=0.8, t0=0.0)
    m, k = 1.2, 0.9
    cd = classical_delaunay(el, m, k)
    assert abs(-m * k**2 / (2 * cd.I3**2) - (-k / (2 * el.a))) < 1e-14


def test_orbital_elements_validation():
    with pytest.raises(ValueError):
        OrbitalElements(a=-1.0, e=0.1, inclination=0.1, n=1.0, t0=0.0)
    with pytest.raises(ValueError):
        OrbitalElements(a=1.0, e=1.0, inclination=0.1, n=1.0, t0=0.0)


def test_delaunay_state_guard():
    with pytest.raises(Exception):
        DelaunayState(I1=0.5, I2=0.6, I3=0.0, phi1=0, phi2=0, phi3=0)


def test_transport_of_base_level_is_canonical_pair():
    x = PhasePoint((0.4, 0.7, 1.0, 0.2, 1.5, 2.8), Chart.ACTION_ANGLE)
    P0aa, W0aa, T0aa = hierarchy_in_action_angle(0, RP)
    P = P0aa(x)
    W = W0aa(x)
    T = T0aa(x)
    for i in range(3):
        assert abs(P[i][3 + i] - 1.0) < 1e-14
        assert abs(W[i][3 + i] - 1.0) < 1e-14
    for i in range(6):
        for j in range(6):
            assert abs(T[i][j] - (1.0 if i == j else 0.0)) < 1e-14
            if j != i + 3 and i != j + 3:
                assert abs(P[i][j]) < 1e-14


def test_verify_level_battery():
    from nckepler.hierarchy import verify_level

    points = sample_delaunay(12, seed=9)
    for h in (0, 1, 3):
        rep = verify_level(h, points, RP)
        assert rep.all_passed, [e.identity for e in rep.entries if not e.passed]
    with pytest.raises(ValueError):
        verify_level(-1, points, RP)
