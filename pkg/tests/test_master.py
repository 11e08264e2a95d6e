import math
from fractions import Fraction

import numpy as np
import pytest

from nckepler import duals
from nckepler.charts import forward_jacobian, inverse_jacobian
from nckepler.geometry import (
    Chart,
    PhasePoint,
    ScalarField,
    VectorField,
    hamiltonian_vector_field,
    lie_bracket,
    lie_bracket_field,
    lie_derivative,
    max_abs,
)
from nckepler.hierarchy import (
    delaunay_flow_field,
    ladder_energy_field,
    level_bivector,
    weight_vector,
)
from nckepler.master import (
    apply_recursion_to_vector,
    coefficient_pattern_table,
    conformal_coefficients,
    dynamical_symmetry,
    family_energy_field,
    family_flow_field,
    family_gamma_field,
    family_two_form,
    master_family,
    master_integral,
    master_symmetry_field,
    pairing_residual,
    recursion_family,
    scaling_ledger,
)
from nckepler.reduced import ReducedParams
from nckepler.sampling import sample_delaunay

RP = ReducedParams(thetadot=0.006, phidot=0.25)
PT = PhasePoint((0.6, 1.1, 1.9, 0.3, 2.2, 5.0), Chart.DELAUNAY)


def test_dynamical_symmetries_commute_with_flow():
    XH = delaunay_flow_field(RP)
    for h in range(4):
        Xh = dynamical_symmetry(h, RP)
        assert max_abs(lie_bracket(XH, Xh, PT)) < 1e-13


def test_level_zero_symmetry_is_the_flow():
    X0 = dynamical_symmetry(0, RP)
    XH = delaunay_flow_field(RP)
    assert [duals.value(v) for v in X0(PT)] == [duals.value(v) for v in XH(PT)]


def test_dynamical_symmetry_is_level_hamiltonian_field():
    P0 = level_bivector(0, RP)
    for h in range(3):
        F = ladder_energy_field(h, RP)
        X_from_P = hamiltonian_vector_field(P0, F)
        Xh = dynamical_symmetry(h, RP)
        for x in sample_delaunay(5, seed=1):
            a = [duals.value(v) for v in X_from_P(x)]
            b = [duals.value(v) for v in Xh(x)]
            assert max(abs(u - v) for u, v in zip(a, b)) < 1e-11


def test_ladder_bracket_lands_on_angle_direction_field():
    # the bracket produces the d/dphi^3 field; the action-direction reading
    # of the same display fails by construction
    for i in range(3):
        for mu in range(4):
            Xi = dynamical_symmetry(i, RP)
            G = master_symmetry_field(i, mu, RP)
            br = [duals.value(v) for v in lie_bracket(Xi, G, PT)]
            angle_reading = [duals.value(v) for v in dynamical_symmetry(i + mu, RP)(PT)]
            assert max(abs(a - b) for a, b in zip(br, angle_reading)) < 1e-10
            action_reading = [0.0, 0.0, angle_reading[5], 0.0, 0.0, 0.0]
            assert max(abs(a - b) for a, b in zip(br, action_reading)) > 1e-3


def test_generated_symmetries_commute():
    for i in range(3):
        for mu in range(4):
            Xi = dynamical_symmetry(i, RP)
            Xt = dynamical_symmetry(i + mu, RP)
            assert max_abs(lie_bracket(Xi, Xt, PT)) < 1e-13


def test_degree_one_master_property():
    XH = delaunay_flow_field(RP)
    for mu in range(3):
        G = master_symmetry_field(0, mu, RP)
        first = lie_bracket_field(XH, G)
        assert max_abs(first(PT)) > 1e-4
        assert max_abs(lie_bracket(XH, first, PT)) < 1e-12


def test_master_integral_pairing_on_zero_angle_section():
    for mu in range(4):
        fam = master_family(0, mu, RP)
        assert fam.pairing_residual_on_section < 1e-12
    for x in sample_delaunay(10, seed=2, zero_angles=True):
        for mu in range(4):
            assert pairing_residual(0, mu, RP, x) < 1e-12


def test_master_integral_pairing_obstruction_off_section():
    # for mu != 1 the pairing one-form is not closed: nonzero residual with
    # the predicted phi-linear coefficients
    x = PT
    for mu in (0, 2, 3):
        resid = pairing_residual(0, mu, RP, x)
        N = weight_vector(RP)
        predicted = max(
            abs((mu - 1) * N[j] ** (mu - 1) * x.coords[3 + j] / (3.0 * x.coords[j] ** mu))
            for j in range(3)
        )
        assert abs(resid - predicted) < 1e-12
    assert pairing_residual(0, 1, RP, x) < 1e-14


def test_log_branch_master_integral():
    F2 = master_integral(0, 2, RP)
    x = PT
    expect = sum(
        weight_vector(RP)[j] / 3.0 * (math.log(x.coords[j]) - x.coords[3 + j] / x.coords[j])
        for j in range(3)
    )
    assert abs(duals.value(F2(x)) - expect) < 1e-14


def test_conformal_coefficients_frozen_and_verified():
    cc = conformal_coefficients(0, RP, PT)
    assert cc.alpha == -1.0 / 3.0
    assert cc.beta == 0.0
    assert cc.gamma == -2.0 / 3.0
    assert cc.residual_P < 1e-13
    assert cc.residual_P1 < 1e-13
    assert cc.residual_H < 1e-13
    for i in range(1, 5):
        cc = conformal_coefficients(i, RP, PT)
        assert abs(cc.alpha + 1.0 / (3 + i)) < 1e-15
        assert abs(cc.gamma + 2.0 / (3 + i)) < 1e-15


def test_conformal_energy_scaling_in_action_angle_chart():
    # transported scaling field acts on the action-angle energy with the
    # same coefficient
    from nckepler.reduced import energy_from_actions

    Dinv = inverse_jacobian(RP)
    Dfwd = forward_jacobian(RP)
    G_del = master_symmetry_field(0, 0, RP)

    def gamma_aa(c):
        y = [sum(Dfwd[i][j] * c[j] for j in range(6)) for i in range(6)]
        g = G_del.func(y)
        return [sum(Dinv[i][j] * g[j] for j in range(6)) for i in range(6)]

    G_aa = VectorField(Chart.ACTION_ANGLE, gamma_aa)
    H_aa = ScalarField(Chart.ACTION_ANGLE, lambda c: energy_from_actions(c[:3], RP))
    x = PhasePoint((0.4, 0.7, 1.0, 0.3, 1.1, 2.0), Chart.ACTION_ANGLE)
    lhs = lie_derivative(G_aa, H_aa, x)
    assert abs(duals.value(lhs) + (2.0 / 3.0) * duals.value(H_aa(x))) < 1e-13


def test_recursion_family_closed_forms():
    fam = recursion_family(0, RP)
    XH = delaunay_flow_field(RP)
    assert max(
        abs(duals.value(a) - duals.value(b)) for a, b in zip(fam.flow(PT), XH(PT))
    ) < 1e-15
    for h in range(4):
        Xcf = family_flow_field(h, RP)
        Xap = apply_recursion_to_vector(dynamical_symmetry(0, RP), h, RP)
        Gcf = family_gamma_field(0, h, RP)
        Gap = apply_recursion_to_vector(master_symmetry_field(0, 0, RP), h, RP)
        for x in sample_delaunay(5, seed=3):
            assert max(abs(duals.value(a) - duals.value(b))
                       for a, b in zip(Xcf(x), Xap(x))) < 1e-10
            assert max(abs(duals.value(a) - duals.value(b))
                       for a, b in zip(Gcf(x), Gap(x))) < 1e-10


def test_family_energy_differentials():
    from nckepler.geometry import gradient

    for h in range(4):
        Hh = family_energy_field(h, RP)
        for x in sample_delaunay(5, seed=4):
            g = gradient(Hh, x)
            expect = RP.m * RP.k**2 * x.coords[2] ** (h - 3)
            assert abs(duals.value(g[2]) - expect) < 1e-11
            assert max(abs(duals.value(g[a])) for a in (0, 1, 3, 4, 5)) < 1e-15
    # level 0 energy is the Hamiltonian itself
    H0 = family_energy_field(0, RP)
    assert abs(duals.value(H0(PT)) - (-RP.m * RP.k**2 / (2 * PT.coords[2] ** 2))) < 1e-15


def test_ledger_frozen_flow_coefficient():
    # i = h = l = 0: the flow-family derivative carries coefficient -1
    entries = scaling_ledger(0, 0, 0, RP, PT)
    flow_entry = [e for e in entries if "X'l" in e.identity][0]
    assert flow_entry.coefficient == -1.0
    assert flow_entry.residual < 1e-13


def test_ledger_pairing_constant_at_degree_two():
    # h + l = 2 at i = 0: the pairing is the constant m k^2 / 3
    entries = scaling_ledger(0, 1, 1, RP, PT)
    pair_entry = [e for e in entries if "pairing" in e.identity][0]
    assert pair_entry.residual < 1e-14
    gih = family_gamma_field(0, 1, RP)
    pair = duals.value(gih(PT)[2]) * RP.m * RP.k**2 * PT.coords[2] ** (1 - 3)
    assert abs(pair - RP.m * RP.k**2 / 3.0) < 1e-14


def test_full_ledger_small_residuals():
    for i in range(3):
        for h in range(3):
            for l in range(3):
                for e in scaling_ledger(i, h, l, RP, PT):
                    assert e.residual < 1e-12, (i, h, l, e.identity, e.residual)


def test_coefficient_patterns_match_except_flow_family():
    for i in range(3):
        for h in range(3):
            for l in range(3):
                for row in coefficient_pattern_table(i, h, l):
                    if row.identity == "flow family":
                        assert row.consistent == (l == 1)
                    else:
                        assert row.consistent, (i, h, l, row)


def test_two_form_family_matches_adjoint_application():
    from nckepler.master import apply_recursion_to_covector

    for h in range(3):
        W = family_two_form(h, RP)

        def base_row(c, a):
            # rows of the weighted base form
            N = weight_vector(RP)
            out = [0.0] * 6
            for j in range(3):
                if a == j:
                    out[3 + j] = 1.0 / N[j]
                if a == 3 + j:
                    out[j] = -1.0 / N[j]
            return out

        for x in sample_delaunay(3, seed=5):
            mat = W(x)
            for a in range(6):
                row = apply_recursion_to_covector(lambda c, a=a: base_row(c, a), h, RP)(list(x.coords))
                assert max(abs(duals.value(mat[a][b]) - duals.value(row[b])) for b in range(6)) < 1e-12
