"""Conversions between the four phase-space charts.

Cartesian <-> spherical uses the cotangent lift of the point transformation,
so round trips are exact to rounding.  Action-angle <-> Delaunay is the
linear recombination

    I1 = J3,  I2 = M J2 + J3,  I3 = J1 + M J2 + J3,
    phi1 = varphi3 - varphi2 / M,  phi2 = varphi2 - M varphi1,
    phi3 = varphi1,

which preserves the weighted canonical structure.  Spherical to action-angle
goes through the integrals of motion and the closed-form angle expressions
(bound states only).
"""

from __future__ import annotations

import math

import numpy as np

from . import duals
from .errors import ChartDomainError, DegenerateMapError
from .geometry import Chart, PhasePoint
from .reduced import (
    ReducedParams,
    SphericalState,
    actions_from_integrals,
    angles_from_state,
    first_integrals,
    spherical_hamiltonian,
)


def cartesian_to_spherical(x: PhasePoint) -> PhasePoint:
    if x.chart is not Chart.CARTESIAN:
        raise ChartDomainError("cartesian_to_spherical expects a cartesian point")
    q1, q2, q3, p1, p2, p3 = x.coords
    r = math.sqrt(q1 * q1 + q2 * q2 + q3 * q3)
    if r <= 0.0:
        raise ChartDomainError("coordinate r must be positive, got 0")
    ct = q3 / r
    if abs(ct) >= 1.0:
        raise ChartDomainError("coordinate theta left (0, pi): point on the polar axis")
    theta = math.acos(ct)
    phi = math.atan2(q2, q1) % (2.0 * math.pi)
    st = math.sin(theta)
    rhat = (q1 / r, q2 / r, q3 / r)
    that = (math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -st)
    phat = (-math.sin(phi), math.cos(phi), 0.0)
    p = (p1, p2, p3)
    p_r = sum(a * b for a, b in zip(rhat, p))
    p_t = r * sum(a * b for a, b in zip(that, p))
    p_p = r * st * sum(a * b for a, b in zip(phat, p))
    return PhasePoint((r, theta, phi, p_r, p_t, p_p), Chart.SPHERICAL)


def spherical_to_cartesian(x: PhasePoint) -> PhasePoint:
    if x.chart is not Chart.SPHERICAL:
        raise ChartDomainError("spherical_to_cartesian expects a spherical point")
    r, theta, phi, p_r, p_t, p_p = x.coords
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    q = (r * st * cp, r * st * sp, r * ct)
    rhat = (st * cp, st * sp, ct)
    that = (ct * cp, ct * sp, -st)
    phat = (-sp, cp, 0.0)
    p = tuple(
        p_r * rhat[i] + (p_t / r) * that[i] + (p_p / (r * st)) * phat[i] for i in range(3)
    )
    return PhasePoint(q + p, Chart.CARTESIAN)


def action_block_matrix(rp: ReducedParams) -> np.ndarray:
    M = rp.M
    return np.array([[0.0, 0.0, 1.0], [0.0, M, 1.0], [1.0, M, 1.0]])


def angle_block_matrix(rp: ReducedParams) -> np.ndarray:
    M = rp.M
    if M == 0.0:
        raise DegenerateMapError("angle recombination is singular at M = 0")
    return np.array([[0.0, -1.0 / M, 1.0], [-M, 1.0, 0.0], [1.0, 0.0, 0.0]])


def forward_jacobian(rp: ReducedParams) -> np.ndarray:
    """Constant Jacobian of the (J, varphi) -> (I, phi) map."""
    out = np.zeros((6, 6))
    out[:3, :3] = action_block_matrix(rp)
    out[3:, 3:] = angle_block_matrix(rp)
    return out


def inverse_jacobian(rp: ReducedParams) -> np.ndarray:
    return np.linalg.inv(forward_jacobian(rp))


def action_angle_to_delaunay(x: PhasePoint, rp: ReducedParams) -> PhasePoint:
    if x.chart is not Chart.ACTION_ANGLE:
        raise ChartDomainError("expected an action-angle point")
    c = np.array(x.coords)
    out = forward_jacobian(rp) @ c
    return PhasePoint(tuple(out), Chart.DELAUNAY)


def delaunay_to_action_angle(x: PhasePoint, rp: ReducedParams) -> PhasePoint:
    if x.chart is not Chart.DELAUNAY:
        raise ChartDomainError("expected a Delaunay point")
    c = np.array(x.coords)
    out = inverse_jacobian(rp) @ c
    return PhasePoint(tuple(out), Chart.ACTION_ANGLE)


def spherical_to_action_angle(x: PhasePoint, rp: ReducedParams) -> PhasePoint:
    if x.chart is not Chart.SPHERICAL:
        raise ChartDomainError("expected a spherical point")
    s = SphericalState.from_point(x)
    E = spherical_hamiltonian(s, rp)
    _, d_phi, l_tilde = first_integrals(s, rp)
    J = actions_from_integrals(E, l_tilde, d_phi, rp)
    angles = angles_from_state(s, J, rp)
    return PhasePoint(
        (J.J1, J.J2, J.J3, angles.phi1, angles.phi2, angles.phi3), Chart.ACTION_ANGLE
    )


_CONVERSIONS = {
    (Chart.CARTESIAN, Chart.SPHERICAL): lambda x, rp: cartesian_to_spherical(x),
    (Chart.SPHERICAL, Chart.CARTESIAN): lambda x, rp: spherical_to_cartesian(x),
    (Chart.ACTION_ANGLE, Chart.DELAUNAY): action_angle_to_delaunay,
    (Chart.DELAUNAY, Chart.ACTION_ANGLE): delaunay_to_action_angle,
    (Chart.SPHERICAL, Chart.ACTION_ANGLE): spherical_to_action_angle,
    (Chart.CARTESIAN, Chart.ACTION_ANGLE): lambda x, rp: spherical_to_action_angle(
        cartesian_to_spherical(x), rp
    ),
    (Chart.CARTESIAN, Chart.DELAUNAY): lambda x, rp: action_angle_to_delaunay(
        spherical_to_action_angle(cartesian_to_spherical(x), rp), rp
    ),
    (Chart.SPHERICAL, Chart.DELAUNAY): lambda x, rp: action_angle_to_delaunay(
        spherical_to_action_angle(x, rp), rp
    ),
}


def convert(x: PhasePoint, target: Chart, rp: ReducedParams | None = None) -> PhasePoint:
    """Convert a point between charts; raises for undefined conversions."""
    if x.chart is target:
        return x
    key = (x.chart, target)
    if key not in _CONVERSIONS:
        raise ChartDomainError(
            f"no conversion defined from {x.chart.value} to {target.value}"
        )
    if rp is None:
        rp = ReducedParams()
    return _CONVERSIONS[key](x, rp)
