"""Deformed Kepler Hamiltonian, its flow, and structure-monitoring integration.

The Hamiltonian on the cartesian chart is

    H = (1/2m) sum_i (p_i + (1/2) sum_j lam[i][j] q^j)^2 - k / Y,

where ``Y = |q - (1/2) alpha p|`` is the deformed radius.  The closed-form
equations of motion below were re-derived from this Hamiltonian and are
cross-checked against the bivector route ``P(dH, .)`` in the test suite; the
radial coefficients carry the coupling constant k (sigma has k/(4 Y^3) and
sigma-tilde has k/Y^3), and the excluded-diagonal double sums are exactly
what remains after absorbing the diagonal into those coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import duals
from .deformation import (
    DeformationParams,
    nc_symplectic_structures,
    transform_coordinates,
)
from .errors import SingularConfigurationError, StepFailureError
from .geometry import (
    Chart,
    PhasePoint,
    ScalarField,
    VectorField,
    hamiltonian_vector_field,
)


def deformed_radius(x, params: DeformationParams):
    """``Y = |q - (1/2) alpha p|``; raises when the configuration is singular."""
    primed = transform_coordinates(x, params)
    y2 = primed[0] ** 2 + primed[1] ** 2 + primed[2] ** 2
    if duals.value(y2) <= 0.0:
        raise SingularConfigurationError("deformed radius Y vanished (q = alpha p / 2)")
    return duals.sqrt(y2)


def hamiltonian(x, params: DeformationParams):
    """Energy at a cartesian point (kinetic term in primed momenta)."""
    primed = transform_coordinates(x, params)
    y = deformed_radius(x, params)
    kinetic = (primed[3] ** 2 + primed[4] ** 2 + primed[5] ** 2) / (2.0 * params.mass)
    return kinetic - params.k / y


def hamiltonian_field(params: DeformationParams) -> ScalarField:
    return ScalarField(Chart.CARTESIAN, lambda c: hamiltonian(c, params), name="H")


@dataclass(frozen=True)
class KeplerAux:
    """Radial coefficients of the closed-form equations of motion."""

    Y: float
    sigma: tuple
    sigma_tilde: tuple
    R: tuple

    def __post_init__(self):
        if self.Y <= 0.0:
            raise SingularConfigurationError("KeplerAux requires Y > 0")


def kepler_aux(x, params: DeformationParams) -> KeplerAux:
    y = duals.value(deformed_radius(x, params))
    a, l = params.alpha, params.lam
    m, k = params.mass, params.k
    ky3 = k / y**3
    sigma = tuple(
        1.0 / m + 0.25 * ky3 * sum(a[i][mu] ** 2 for i in range(3)) for mu in range(3)
    )
    sigma_tilde = tuple(
        ky3 + 0.25 / m * sum(l[i][mu] ** 2 for i in range(3)) for mu in range(3)
    )
    R = tuple(
        tuple(l[mu][s] / (2.0 * m) - a[s][mu] * 0.5 * ky3 for s in range(3))
        for mu in range(3)
    )
    return KeplerAux(Y=y, sigma=sigma, sigma_tilde=sigma_tilde, R=R)


def hamilton_rhs_closed_form(x, params: DeformationParams) -> list:
    """Closed-form (qdot, pdot); the double sums skip the nu = mu diagonal."""
    coords = list(x.coords) if isinstance(x, PhasePoint) else list(x)
    q, p = coords[:3], coords[3:]
    aux = kepler_aux(coords, params)
    a, l = params.alpha, params.lam
    th = params.theta
    m, k = params.mass, params.k
    ky3 = k / aux.Y**3
    qdot = [0.0] * 3
    pdot = [0.0] * 3
    for mu in range(3):
        dq = aux.sigma[mu] * p[mu] + sum(aux.R[mu][s] * q[s] for s in range(3))
        dp = aux.sigma_tilde[mu] * q[mu] - sum(aux.R[mu][s] * p[s] for s in range(3))
        for nu in range(3):
            if nu == mu:
                continue
            dq += 0.25 * ky3 * sum(a[li][mu] * a[li][nu] for li in range(3)) * p[nu]
            dp += 0.25 / m * sum(l[li][mu] * l[li][nu] for li in range(3)) * q[nu]
        qdot[mu] = dq / th[mu]
        pdot[mu] = -dp / th[mu]
    return qdot + pdot


def hamilton_rhs_primed_form(x, params: DeformationParams) -> list:
    """The same flow written in primed coordinates.

    The momentum half matches the bracket-generated flow with the overall
    sign chosen so its commutative limit is the attractive force; the
    opposite overall sign fails that limit.
    """
    coords = list(x.coords) if isinstance(x, PhasePoint) else list(x)
    primed = transform_coordinates(coords, params)
    qp, pp = primed[:3], primed[3:]
    y = duals.value(deformed_radius(coords, params))
    a, l = params.alpha, params.lam
    th = params.theta
    m, k = params.mass, params.k
    ky3 = k / y**3
    qdot = [
        (pp[i] / m + 0.5 * ky3 * sum(a[i][j] * qp[j] for j in range(3))) / th[i]
        for i in range(3)
    ]
    pdot = [
        (0.5 / m * sum(l[i][j] * pp[j] for j in range(3)) - ky3 * qp[i]) / th[i]
        for i in range(3)
    ]
    return qdot + pdot


def hamiltonian_vector_field_nc(params: DeformationParams) -> VectorField:
    """The flow field built from the bivector route ``P(dH, .)``."""
    _, bivector = nc_symplectic_structures(params)
    return hamiltonian_vector_field(bivector, hamiltonian_field(params))


def _rhs_fast(params: DeformationParams) -> Callable[[Sequence[float]], list]:
    """Closed-form right-hand side specialized for speed inside integrators."""
    if params.is_commutative:
        m, k = params.mass, params.k

        def rhs(c):
            q1, q2, q3, p1, p2, p3 = c
            r2 = q1 * q1 + q2 * q2 + q3 * q3
            if r2 <= 0.0:
                raise SingularConfigurationError("radius vanished")
            f = -k / (r2 * math.sqrt(r2))
            return [p1 / m, p2 / m, p3 / m, f * q1, f * q2, f * q3]

        return rhs
    return lambda c: hamilton_rhs_closed_form(c, params)


@dataclass
class Trajectory:
    """Fixed-step trajectory with monitor values recorded at every state."""

    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    monitor_names: list = field(default_factory=list)
    monitors: list = field(default_factory=list)  # one row per state
    termination_reason: str | None = None

    @property
    def completed(self) -> bool:
        return self.termination_reason is None

    def monitor_series(self, name: str) -> list:
        idx = self.monitor_names.index(name)
        return [row[idx] for row in self.monitors]

    def to_csv(self) -> str:
        names = ("q1", "q2", "q3", "p1", "p2", "p3")
        header = "t," + ",".join(names) + (
            "," + ",".join(self.monitor_names) if self.monitor_names else ""
        )
        lines = [header]
        for t, state, row in zip(self.times, self.states, self.monitors):
            vals = [t, *state.coords, *row]
            lines.append(",".join(f"{v:.17g}" for v in vals))
        return "\n".join(lines) + "\n"


def _rk4_step(rhs, c, dt):
    k1 = rhs(c)
    k2 = rhs([c[i] + 0.5 * dt * k1[i] for i in range(6)])
    k3 = rhs([c[i] + 0.5 * dt * k2[i] for i in range(6)])
    k4 = rhs([c[i] + dt * k3[i] for i in range(6)])
    return [
        c[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(6)
    ]


def _implicit_midpoint_step(rhs, c, dt, residual_tol=1e-12, max_iter=50):
    s = rhs(c)
    for _ in range(max_iter):
        mid = [c[i] + 0.5 * dt * s[i] for i in range(6)]
        s_new = rhs(mid)
        resid = max(abs(s_new[i] - s[i]) for i in range(6))
        s = s_new
        if resid < residual_tol:
            return [c[i] + dt * s[i] for i in range(6)]
    raise StepFailureError(
        f"implicit midpoint stage iteration did not reach {residual_tol} in {max_iter} iterations"
    )


def integrate_field(
    x0: PhasePoint,
    rhs: Callable[[Sequence[float]], list],
    dt: float,
    n_steps: int,
    method: str = "rk4",
    monitors: Sequence[ScalarField] = (),
    guard: Callable[[Sequence[float]], str | None] | None = None,
    energy_monitor: Callable[[Sequence[float]], float] | None = None,
    energy_step_tol: float = 1e-2,
) -> Trajectory:
    """Fixed-step integration with singularity guards.

    Termination reasons: the configured guard firing, a non-finite state, an
    implicit stage failure, or a per-step jump of the monitored energy beyond
    ``energy_step_tol`` relative (the collision detector: near a singular
    configuration a fixed step cannot hold the energy, and the run is
    truncated rather than continued through garbage states).
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if method not in ("rk4", "implicit_midpoint"):
        raise ValueError(f"unknown method {method!r}")
    stepper = _rk4_step if method == "rk4" else _implicit_midpoint_step

    traj = Trajectory(monitor_names=[m.name or f"monitor{i}" for i, m in enumerate(monitors)])

    def record(t, coords):
        traj.times.append(t)
        traj.states.append(PhasePoint(tuple(coords), x0.chart))
        traj.monitors.append([duals.value(m.func(coords)) for m in monitors])

    c = list(x0.coords)
    record(0.0, c)
    e_prev = energy_monitor(c) if energy_monitor is not None else None
    e_scale = 1.0 + abs(e_prev) if e_prev is not None else None
    for step in range(1, n_steps + 1):
        try:
            c_new = stepper(rhs, c, dt)
        except SingularConfigurationError as err:
            traj.termination_reason = f"singular configuration: {err}"
            return traj
        except StepFailureError as err:
            traj.termination_reason = f"step failure: {err}"
            return traj
        if any(not math.isfinite(v) for v in c_new):
            traj.termination_reason = "singular configuration: state left the chart (non-finite)"
            return traj
        if guard is not None:
            reason = guard(c_new)
            if reason is not None:
                traj.termination_reason = reason
                return traj
        if energy_monitor is not None:
            e_new = energy_monitor(c_new)
            if not math.isfinite(e_new) or abs(e_new - e_prev) > energy_step_tol * e_scale:
                traj.termination_reason = (
                    "singular configuration: energy step error exploded (collision)"
                )
                return traj
            e_prev = e_new
        c = c_new
        record(step * dt, c)
    return traj


def integrate(
    x0: PhasePoint,
    params: DeformationParams,
    dt: float,
    n_steps: int,
    method: str = "rk4",
    monitors: Sequence[ScalarField] = (),
) -> Trajectory:
    """Integrate the deformed Kepler flow from a cartesian point.

    Aborts with a singularity reason when the deformed radius falls below
    1e-9 of its initial value or a step loses energy accuracy (collision).
    """
    y0 = duals.value(deformed_radius(x0, params))
    floor = 1e-9 * y0

    def guard(coords):
        primed = transform_coordinates(coords, params)
        y2 = primed[0] ** 2 + primed[1] ** 2 + primed[2] ** 2
        if y2 < floor * floor:
            return "singular configuration: deformed radius below 1e-9 of its initial value"
        return None

    return integrate_field(
        x0,
        _rhs_fast(params),
        dt,
        n_steps,
        method=method,
        monitors=monitors,
        guard=guard,
        energy_monitor=lambda c: duals.value(hamiltonian(c, params)),
    )
