"""Seeded point and parameter samplers for the verification suites.

All sampling is reproducible: a fixed seed yields the same points on every
run, so reports are byte-identical across invocations.
"""

from __future__ import annotations

import math

import numpy as np

from .deformation import DeformationParams
from .geometry import Chart, PhasePoint
from .kepler import deformed_radius, hamiltonian
from .reduced import ReducedParams, SphericalState, first_integrals, spherical_hamiltonian

DEFAULT_SEED = 42


def sample_cartesian(
    n: int,
    seed: int = DEFAULT_SEED,
    params: DeformationParams | None = None,
    energy_sign: str | None = None,
) -> list:
    """Cartesian points with the deformed radius bounded away from zero.

    ``energy_sign`` of "minus"/"plus" rejects points whose energy does not
    have the requested sign (margin 0.05 in absolute value).
    """
    params = params or DeformationParams()
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        q = rng.uniform(-1.6, 1.6, size=3)
        p = rng.uniform(-1.1, 1.1, size=3)
        coords = (*q, *p)
        try:
            x = PhasePoint(coords, Chart.CARTESIAN)
            if deformed_radius(x, params) < 0.35:
                continue
            if energy_sign is not None:
                H = hamiltonian(x, params)
                if energy_sign == "minus" and H > -0.05:
                    continue
                if energy_sign == "plus" and H < 0.05:
                    continue
        except Exception:
            continue
        out.append(x)
    return out


def sample_spherical_bound(n: int, seed: int = DEFAULT_SEED, rp: ReducedParams | None = None) -> list:
    """Bound spherical states with well-separated integrals (E < 0,
    L~ > |D| > 0)."""
    rp = rp or ReducedParams()
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        s = SphericalState(
            r=float(rng.uniform(0.7, 1.8)),
            theta=float(rng.uniform(0.7, math.pi - 0.7)),
            phi=float(rng.uniform(0.1, 6.1)),
            p_r=float(rng.uniform(-0.35, 0.35)),
            p_theta=float(rng.uniform(-0.45, 0.45)),
            p_phi=float(rng.uniform(0.15, 0.65)),
        )
        E = spherical_hamiltonian(s, rp)
        if E > -0.08:
            continue
        _, d, lt = first_integrals(s, rp)
        if abs(d) < 0.08 or lt < abs(d) + 0.03:
            continue
        out.append(s)
    return out


def sample_action_angle(n: int, seed: int = DEFAULT_SEED) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        j = rng.uniform([0.15, 0.15, 0.25], [1.1, 1.1, 1.4])
        ang = rng.uniform(0.0, 2.0 * math.pi, size=3)
        out.append(PhasePoint((*j, *ang), Chart.ACTION_ANGLE))
    return out


def sample_delaunay(n: int, seed: int = DEFAULT_SEED, zero_angles: bool = False) -> list:
    """Delaunay points ordered as bound motion requires (I3 >= I2 >= I1 > 0)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        i1 = rng.uniform(0.25, 0.85)
        i2 = rng.uniform(0.95, 1.65)
        i3 = rng.uniform(1.75, 2.55)
        ang = (0.0, 0.0, 0.0) if zero_angles else tuple(rng.uniform(0.0, 2.0 * math.pi, size=3))
        out.append(PhasePoint((i1, i2, i3, *ang), Chart.DELAUNAY))
    return out


def sample_deformations(n: int, seed: int = DEFAULT_SEED, scale: float = 0.25) -> list:
    """Random valid deformation parameter sets (antisymmetric, theta != 0)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a = rng.uniform(-scale, scale, size=3)
        l = rng.uniform(-scale, scale, size=3)
        alpha = [[0.0, a[0], a[1]], [-a[0], 0.0, a[2]], [-a[1], -a[2], 0.0]]
        lam = [[0.0, l[0], l[1]], [-l[0], 0.0, l[2]], [-l[1], -l[2], 0.0]]
        mass = float(rng.uniform(0.8, 1.5))
        k = float(rng.uniform(0.8, 1.8))
        try:
            out.append(DeformationParams(alpha=alpha, lam=lam, mass=mass, k=k))
        except Exception:
            continue
    return out


def random_polynomial_field(rng, chart: Chart):
    """A random quadratic observable (smooth everywhere) for bracket tests."""
    from .geometry import ScalarField

    lin = rng.uniform(-1.0, 1.0, size=6)
    quad = rng.uniform(-0.5, 0.5, size=(6, 6))

    def f(c, lin=lin, quad=quad):
        total = 0.0
        for i in range(6):
            total = total + lin[i] * c[i]
            for j in range(6):
                total = total + quad[i][j] * c[i] * c[j]
        return total

    return ScalarField(chart, f, name="poly")
