import math

import numpy as np
import pytest

from nckepler import duals
from nckepler.deformation import DeformationParams
from nckepler.errors import ChartDomainError, NonCompactError, TurningPointError
from nckepler.geometry import Chart, PhasePoint, gradient, interior_product, flat_sharp_composition
from nckepler.kepler import hamiltonian, integrate_field
from nckepler.reduced import (
    ActionSet,
    ReducedParams,
    SphericalState,
    actions_from_integrals,
    angles_from_state,
    azimuthal_period_integral,
    continuous_angles,
    energy_from_actions,
    first_integrals,
    frequencies,
    inclination,
    isochronous_derivative,
    kolmogorov_determinant,
    lambda_axis,
    lambda_matrix,
    perturbation_field,
    polar_action_quadrature,
    quadratic_condition_value,
    radial_action_quadrature,
    reduced_hamiltonian_conditions_check,
    reduced_structures,
    spherical_hamiltonian,
    spherical_rhs,
    spherical_structures,
)
from nckepler.sampling import sample_spherical_bound

RP = ReducedParams(thetadot=0.008, phidot=0.35, m=1.0, k=1.0)
CLASSICAL = ReducedParams()


def test_lambda_matrix_vanishes_without_polar_rate():
    assert lambda_matrix(ReducedParams(thetadot=0.0, phidot=0.7), 1.3) == (
        (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)
    )


def test_lambda_matrix_at_zero_azimuth():
    rp = ReducedParams(thetadot=0.01, phidot=0.5)
    lam = lambda_matrix(rp, 0.0)
    assert lam[0][1] == 0.0
    assert abs(lam[0][2] - math.sqrt(2.0) * 0.01 * 0.5) < 1e-17
    assert lam[1][2] == 0.0


def test_lambda_matrix_antisymmetric():
    rng = np.random.default_rng(0)
    rp = ReducedParams(thetadot=0.007, phidot=0.4)
    for phi in rng.uniform(0, 2 * math.pi, size=5):
        lam = lambda_matrix(rp, float(phi))
        for i in range(3):
            for j in range(3):
                assert lam[i][j] == -lam[j][i]


def test_rate_cap_enforced():
    with pytest.raises(ValueError):
        ReducedParams(thetadot=0.5, phidot=0.0, m=1.0)
    ReducedParams(thetadot=0.5, phidot=0.0, m=1.0, max_rate_ratio=0.6)


def test_quadratic_condition_values():
    rp = ReducedParams(thetadot=0.01, phidot=0.5)
    origin = PhasePoint((1e-12, 0, 0, 0.1, 0.2, 0.3), Chart.CARTESIAN)
    assert quadratic_condition_value(origin, rp) < 1e-20
    generic = PhasePoint((1.0, 0.4, 0.7, 0, 0, 0), Chart.CARTESIAN)
    assert quadratic_condition_value(generic, rp) > 0.0
    zero_rate = ReducedParams(thetadot=0.0, phidot=0.5)
    assert quadratic_condition_value(generic, zero_rate) == 0.0
    rep = reduced_hamiltonian_conditions_check(generic, zero_rate)
    assert rep.quadratic_ok


def test_perturbation_field_matches_hamiltonian_difference():
    # with the deformation matrix frozen at the point azimuth, the cartesian
    # energy equals classical Kepler plus the perturbation observable
    rp = ReducedParams(thetadot=0.009, phidot=0.45, m=1.3, k=0.8)
    pert = perturbation_field(rp)
    rng = np.random.default_rng(1)
    for _ in range(10):
        q = rng.uniform(-1.2, 1.2, size=3)
        p = rng.uniform(-0.8, 0.8, size=3)
        if np.linalg.norm(q) < 0.4:
            continue
        x = PhasePoint((*q, *p), Chart.CARTESIAN)
        phi = math.atan2(q[1], q[0])
        params = DeformationParams(lam=lambda_matrix(rp, phi), mass=rp.m, k=rp.k)
        classical = sum(v * v for v in p) / (2 * rp.m) - rp.k / np.linalg.norm(q)
        assert abs(hamiltonian(x, params) - classical - duals.value(pert(x))) < 1e-13


def test_spherical_hamiltonian_classical_circular_point():
    s = SphericalState(r=1.0, theta=math.pi / 2, phi=0.3, p_r=0.0, p_theta=0.0, p_phi=1.0)
    assert abs(spherical_hamiltonian(s, CLASSICAL) - (-0.5)) < 1e-15


def test_spherical_domain_errors():
    with pytest.raises(ChartDomainError):
        SphericalState(r=-1.0, theta=1.0, phi=0.0, p_r=0, p_theta=0, p_phi=0)
    with pytest.raises(ChartDomainError):
        SphericalState(r=1.0, theta=0.0, phi=0.0, p_r=0, p_theta=0, p_phi=0)


def test_first_integrals_classical_limit():
    s = SphericalState(r=1.2, theta=1.1, phi=0.4, p_r=0.2, p_theta=0.3, p_phi=0.5)
    M, d, lt = first_integrals(s, CLASSICAL)
    assert M == 1.0
    assert abs(d - 0.5) < 1e-15
    assert abs(lt**2 - (0.3**2 + 0.25 / math.sin(1.1) ** 2)) < 1e-14


def test_inclination_recovery():
    assert abs(inclination(0.5, 1.0) - math.acos(0.5)) < 1e-15
    assert inclination(-0.3, 0.5) <= math.pi
    with pytest.raises(ChartDomainError):
        inclination(1.2, 1.0)


def test_actions_classical_circular_equatorial():
    J = actions_from_integrals(-0.5, 1.0, 1.0, CLASSICAL)
    assert abs(J.J1) < 1e-15 and abs(J.J2) < 1e-15 and abs(J.J3 - 1.0) < 1e-15


def test_action_sum_identity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        E = -float(rng.uniform(0.1, 0.8))
        lt = float(rng.uniform(0.3, 1.2))
        d = float(rng.uniform(0.1, lt))
        J = actions_from_integrals(E, lt, d, RP)
        S = J.J1 + RP.M * J.J2 + J.J3
        assert abs(S - RP.m * RP.k / math.sqrt(-2 * RP.m * E)) < 1e-12


def test_action_domain_errors():
    with pytest.raises(NonCompactError):
        actions_from_integrals(0.1, 1.0, 0.5, RP)
    with pytest.raises(ChartDomainError):
        actions_from_integrals(-0.5, 0.4, 0.5, RP)


def test_energy_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        E = -float(rng.uniform(0.1, 0.9))
        lt = float(rng.uniform(0.3, 1.1))
        d = float(rng.uniform(0.1, lt))
        J = actions_from_integrals(E, lt, d, RP)
        assert abs(energy_from_actions(J, RP) - E) < 1e-12


def test_energy_frozen_value_and_scaling():
    assert energy_from_actions((0.0, 0.0, 1.0), CLASSICAL) == -0.5
    e1 = energy_from_actions((0.2, 0.3, 0.5), RP)
    e2 = energy_from_actions((0.4, 0.6, 1.0), RP)
    assert abs(e2 - e1 / 4.0) < 1e-15
    with pytest.raises(ChartDomainError):
        energy_from_actions((-1.0, 0.0, 0.5), CLASSICAL)


def test_frequencies_and_isochronous_derivative():
    J = (0.3, 0.4, 0.6)
    fr = frequencies(J, RP)
    assert abs(fr[0] - fr[2]) < 1e-15
    assert abs(fr[1] - RP.M * fr[0]) < 1e-15
    E = energy_from_actions(J, RP)
    assert abs(fr[0] - isochronous_derivative(E, RP)) < 1e-12


def test_kolmogorov_determinant_vanishes():
    assert abs(kolmogorov_determinant((0.3, 0.5, 0.7), RP)) < 1e-14


def test_polar_action_quadrature_matches_closed_form():
    rng = np.random.default_rng(4)
    for _ in range(10):
        lt = float(rng.uniform(0.4, 1.2))
        d = float(rng.uniform(0.1, lt - 0.05))
        J2 = (lt - d) / RP.M
        assert abs(polar_action_quadrature(lt, d, RP) - J2) < 1e-6


def test_radial_action_quadrature_matches_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(10):
        E = -float(rng.uniform(0.15, 0.6))
        s = RP.m * RP.k / math.sqrt(-2 * RP.m * E)
        lt = float(rng.uniform(0.2, 0.95)) * s
        expected = -lt + s
        assert abs(radial_action_quadrature(E, lt, RP) - expected) < 1e-6


def _bound_state():
    return SphericalState(r=1.0, theta=1.1, phi=0.4, p_r=0.12, p_theta=0.35, p_phi=0.55)


def test_angles_at_pericenter_hit_branch_value():
    # at the inner turning point the radial polynomial vanishes and the
    # radial arcsin sits at its -pi/2 branch value
    s0 = _bound_state()
    E = spherical_hamiltonian(s0, RP)
    _, d, lt = first_integrals(s0, RP)
    J = actions_from_integrals(E, lt, d, RP)
    S = J.J1 + RP.M * J.J2 + J.J3
    r_peri = (S / (RP.m * RP.k)) * (S - math.sqrt(S**2 - lt**2))
    u = 1.0 + (RP.thetadot / RP.m) * math.sin(2 * 0.4)
    p_phi = d / math.sqrt(u)
    # at pericenter p_r = 0; choose p_theta consistent with L~ at theta
    theta = 1.2
    p_theta = math.sqrt(max(lt**2 - d**2 / math.sin(theta) ** 2, 0.0)) / RP.M
    s_peri = SphericalState(r=r_peri * (1 + 1e-14), theta=theta, phi=0.4,
                            p_r=0.0, p_theta=p_theta, p_phi=p_phi)
    ang = angles_from_state(s_peri, J, RP)
    assert abs(ang.phi1 - (-math.pi / 2)) < 1e-5
    assert ang.branch_r == 1


def test_angles_circular_orbit_defined():
    # circular: L~ = S, the radial arcsin degenerates and the angle is
    # reported on the declared branch
    rp = CLASSICAL
    s = SphericalState(r=1.0, theta=math.pi / 2, phi=0.2, p_r=0.0, p_theta=0.0, p_phi=1.0)
    E = spherical_hamiltonian(s, rp)
    _, d, lt = first_integrals(s, rp)
    J = actions_from_integrals(E, lt, d, rp)
    ang = angles_from_state(s, J, rp)
    assert ang.phi1 == 0.0
    assert ang.branch_r in (-1, 1)


def test_angle_formula_outside_turning_region_raises():
    s0 = _bound_state()
    E = spherical_hamiltonian(s0, RP)
    _, d, lt = first_integrals(s0, RP)
    J = actions_from_integrals(E, lt, d, RP)
    far = SphericalState(r=50.0, theta=1.1, phi=0.4, p_r=0.0, p_theta=0.1, p_phi=0.5)
    with pytest.raises(TurningPointError):
        angles_from_state(far, J, RP)


def test_angle_rates_match_frequencies_along_flow():
    s0 = _bound_state()
    E = spherical_hamiltonian(s0, RP)
    _, d, lt = first_integrals(s0, RP)
    J = actions_from_integrals(E, lt, d, RP)
    traj = integrate_field(s0.as_point(), spherical_rhs(RP), 5e-4, 1500, method="rk4",
                           energy_monitor=lambda c: spherical_hamiltonian(c, RP))
    assert traj.completed
    phi_seq = np.unwrap([st.coords[2] for st in traj.states])
    angles = np.array([
        continuous_angles(SphericalState.from_point(st), J, RP, phi_unwrapped=float(pu))
        for st, pu in zip(traj.states, phi_seq)
    ])
    t = np.array(traj.times)
    fr = frequencies(J, RP)
    for k in range(3):
        series = np.unwrap(angles[:, k])
        coef = np.polyfit(t, series, 1)
        assert abs(coef[0] - fr[k]) / fr[k] < 1e-5


def test_integrals_conserved_exactly_by_flow_equations():
    # directional derivative of D and L~ along the closed-form flow vanishes
    rhs = spherical_rhs(RP)
    s = _bound_state()
    c = [s.r, s.theta, s.phi, s.p_r, s.p_theta, s.p_phi]
    v = rhs(c)

    def d_func(cc):
        u = 1.0 + (RP.thetadot / RP.m) * duals.sin(2.0 * cc[2])
        return duals.sqrt(u) * cc[5]

    g = duals.grad(d_func, c)
    assert abs(sum(g[i] * v[i] for i in range(6))) < 1e-14

    def lt_func(cc):
        u = 1.0 + (RP.thetadot / RP.m) * duals.sin(2.0 * cc[2])
        d2 = u * cc[5] ** 2
        return duals.sqrt(RP.M_squared * cc[4] ** 2 + d2 / duals.sin(cc[1]) ** 2)

    g = duals.grad(lt_func, c)
    assert abs(sum(g[i] * v[i] for i in range(6))) < 1e-13


def test_reduced_structures_identities():
    bivector, omega, flow = reduced_structures(RP)
    x = PhasePoint((0.3, 0.4, 0.8, 1.0, 2.0, 3.0), Chart.ACTION_ANGLE)
    from nckepler.geometry import ScalarField

    H = ScalarField(Chart.ACTION_ANGLE, lambda c: energy_from_actions(c[:3], RP), name="H")
    ip = interior_product(flow, omega, x)
    dH = gradient(H, x)
    assert max(abs(duals.value(ip[i]) + duals.value(dH[i])) for i in range(6)) < 1e-11
    comp = flat_sharp_composition(omega(x), bivector(x))
    assert max(abs(comp[i][j] - (i == j)) for i in range(6) for j in range(6)) < 1e-15
    assert flow(x)[:3] == [0.0, 0.0, 0.0]


def test_spherical_structures_generate_flow():
    from nckepler.geometry import hamiltonian_vector_field, ScalarField

    omega, bivector = spherical_structures(RP)
    Hf = ScalarField(Chart.SPHERICAL, lambda c: spherical_hamiltonian(c, RP), name="H")
    X = hamiltonian_vector_field(bivector, Hf)
    s = _bound_state()
    v1 = [duals.value(v) for v in X(s.as_point())]
    v2 = spherical_rhs(RP)([s.r, s.theta, s.phi, s.p_r, s.p_theta, s.p_phi])
    assert max(abs(a - b) for a, b in zip(v1, v2)) < 1e-12


def test_maclaurin_regime_bound():
    ratio = abs(RP.thetadot) / RP.m
    worst = max(
        abs(1.0 / math.sqrt(1.0 + ratio * math.sin(2 * phi)) - 1.0)
        for phi in np.linspace(0, 2 * math.pi, 201)
    )
    assert worst <= 0.5 * ratio + ratio**2


def test_out_of_regime_action_reports_average():
    rp = ReducedParams(thetadot=0.3, phidot=0.2, m=1.0, k=1.0, max_rate_ratio=0.5)
    J = actions_from_integrals(-0.4, 0.9, 0.5, rp)
    assert not J.maclaurin_ok
    assert J.azimuthal_action_average is not None
    expected = 0.5 * azimuthal_period_integral(rp) / (2 * math.pi)
    assert abs(J.azimuthal_action_average - expected) < 1e-12


def test_action_angle_state_container():
    from nckepler.reduced import ActionAngleState

    st = ActionAngleState(J1=0.2, J2=0.3, J3=0.5, phi1=0.1, phi2=0.2, phi3=0.3, M=RP.M)
    pt = st.as_point()
    assert pt.chart is Chart.ACTION_ANGLE
    assert abs(energy_from_actions(pt.coords[:3], RP)
               - energy_from_actions((0.2, 0.3, 0.5), RP)) < 1e-15
