"""Conserved-vector candidates and their bracket algebra on the cartesian chart.

The angular momentum ``L = q' x p'`` and the Runge-Lenz vector
``A = p' x L - m k q' / Y`` are built from the primed coordinates.  Their
brackets close in several layered forms:

* the exact autodiff bracket (the arbiter for everything else);
* an equivalent chain-rule route through the constant structure matrices
  F, D, E of the primed coordinates;
* displayed closed forms for the brackets with the Hamiltonian, valid at
  generic deformations;
* structure-constant forms (so(3), so(4), so(1,3) patterns), exact in the
  commutative limit and reported with residuals elsewhere.

Scaled Runge-Lenz vectors live on the negative/positive-energy regions, and
the generator sets assemble the 4x4 antisymmetric patterns from them.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import duals
from .deformation import DeformationParams, nc_bracket, transform_coordinates
from .errors import ChartDomainError, SingularConfigurationError
from .geometry import Chart, PhasePoint, ScalarField
from .kepler import deformed_radius, hamiltonian


def levi_civita(i: int, j: int, k: int) -> float:
    """epsilon with 0-based indices, normalized so epsilon(0,1,2) = +1."""
    a, b, c = i + 1, j + 1, k + 1
    return 0.5 * (a - b) * (b - c) * (c - a)


class EnergySign(enum.Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class StructureMatrices:
    """Constant brackets of the primed coordinates: {p', q'} = F,
    {p', p'} = D, {q', q'} = E, and Fprime = -F."""

    F: tuple
    D: tuple
    E: tuple

    @property
    def Fprime(self) -> tuple:
        return tuple(tuple(-v for v in row) for row in self.F)


def structure_matrices(params: DeformationParams) -> StructureMatrices:
    a, l = params.alpha, params.lam
    th = params.theta
    F = [[0.0] * 3 for _ in range(3)]
    D = [[0.0] * 3 for _ in range(3)]
    E = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            F[i][j] = (1.0 / th[i] if i == j else 0.0) + 0.25 * sum(
                l[i][r] * a[j][r] / th[r] for r in range(3)
            )
            D[i][j] = 0.5 * l[j][i] * (1.0 / th[i] + 1.0 / th[j])
            E[i][j] = 0.5 * a[j][i] * (1.0 / th[i] + 1.0 / th[j])
    to_t = lambda m: tuple(tuple(row) for row in m)
    return StructureMatrices(F=to_t(F), D=to_t(D), E=to_t(E))


def angular_momentum(x, params: DeformationParams) -> list:
    """Components of L = q' x p' (generic in the scalar type)."""
    z = transform_coordinates(x, params)
    q, p = z[:3], z[3:]
    return [
        q[1] * p[2] - q[2] * p[1],
        q[2] * p[0] - q[0] * p[2],
        q[0] * p[1] - q[1] * p[0],
    ]


def lrl_vector(x, params: DeformationParams) -> list:
    """Components of A = p' x L - m k q' / Y."""
    z = transform_coordinates(x, params)
    q, p = z[:3], z[3:]
    L = angular_momentum(x, params)
    y = deformed_radius(x, params)
    mk = params.mass * params.k
    return [
        p[1] * L[2] - p[2] * L[1] - mk * q[0] / y,
        p[2] * L[0] - p[0] * L[2] - mk * q[1] / y,
        p[0] * L[1] - p[1] * L[0] - mk * q[2] / y,
    ]


def angular_momentum_field(params: DeformationParams, i: int) -> ScalarField:
    return ScalarField(
        Chart.CARTESIAN, lambda c: angular_momentum(c, params)[i], name=f"L{i + 1}"
    )


def lrl_field(params: DeformationParams, i: int) -> ScalarField:
    return ScalarField(
        Chart.CARTESIAN, lambda c: lrl_vector(c, params)[i], name=f"A{i + 1}"
    )


# -- chain-rule bracket through the structure matrices -----------------------


def primed_chain_bracket(f_primed, g_primed, x, params: DeformationParams):
    """Bracket of observables given as functions of the primed coordinates,
    computed from the constant structure matrices rather than the weights."""
    sm = structure_matrices(params)
    z = [duals.value(v) for v in transform_coordinates(x, params)]
    B = [[0.0] * 6 for _ in range(6)]
    for i in range(3):
        for j in range(3):
            B[i][j] = sm.E[i][j]
            B[i][3 + j] = -sm.F[j][i]
            B[3 + i][j] = sm.F[i][j]
            B[3 + i][3 + j] = sm.D[i][j]
    df = duals.grad(f_primed, z)
    dg = duals.grad(g_primed, z)
    return sum(
        df[u] * B[u][v] * dg[v] for u in range(6) for v in range(6) if B[u][v] != 0.0
    )


def primed_observables(params: DeformationParams):
    """H, L_i, A_i as functions of the primed coordinates (for the chain route)."""
    m, k = params.mass, params.k

    def ham(z):
        y = duals.sqrt(z[0] ** 2 + z[1] ** 2 + z[2] ** 2)
        return (z[3] ** 2 + z[4] ** 2 + z[5] ** 2) / (2.0 * m) - k / y

    def ang(i):
        def f(z, i=i):
            q, p = z[:3], z[3:]
            j, kk = (i + 1) % 3, (i + 2) % 3
            return q[j] * p[kk] - q[kk] * p[j]

        return f

    def lrl(i):
        def f(z, i=i):
            q, p = z[:3], z[3:]
            L = [ang(a)(z) for a in range(3)]
            j, kk = (i + 1) % 3, (i + 2) % 3
            y = duals.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2)
            return p[j] * L[kk] - p[kk] * L[j] - m * k * q[i] / y

        return f

    return ham, [ang(i) for i in range(3)], [lrl(i) for i in range(3)]


# -- closed forms for the brackets with the Hamiltonian ----------------------


def _primed_split(x, params):
    z = transform_coordinates(x, params)
    return [duals.value(v) for v in z[:3]], [duals.value(v) for v in z[3:]]


def bracket_H_with_L(x, params: DeformationParams, i: int) -> float:
    """Closed form of the bracket of H with L_i at a cartesian point."""
    qp, pp = _primed_split(x, params)
    y = duals.value(deformed_radius(x, params))
    sm = structure_matrices(params)
    m, k = params.mass, params.k
    ky3 = k / y**3
    Dp = [sum(sm.D[nu][j] * pp[j] for j in range(3)) for nu in range(3)]
    Fq = [sum(sm.F[nu][j] * qp[j] for j in range(3)) for nu in range(3)]
    Fp = [sum(sm.F[j][nu] * pp[j] for j in range(3)) for nu in range(3)]
    Eq = [sum(sm.E[j][nu] * qp[j] for j in range(3)) for nu in range(3)]
    total = 0.0
    for mu in range(3):
        for nu in range(3):
            eps = levi_civita(mu, i, nu)
            if eps == 0.0:
                continue
            total += eps * (
                (Dp[nu] / m + ky3 * Fq[nu]) * qp[mu] + (Fp[nu] / m + ky3 * Eq[nu]) * pp[mu]
            )
    return total


def bracket_H_with_A(x, params: DeformationParams, i: int) -> float:
    """Closed form of the bracket of H with A_i at a cartesian point.

    The middle group pairs the coefficient row with the Levi-Civita index
    that also labels the momentum derivative of H (pairing it with the
    angular-momentum index instead fails the autodiff cross-check).
    """
    qp, pp = _primed_split(x, params)
    y = duals.value(deformed_radius(x, params))
    sm = structure_matrices(params)
    m, k = params.mass, params.k
    ky3 = k / y**3
    L = [duals.value(v) for v in angular_momentum(x, params)]
    G = [
        sum(sm.D[rho][j] * pp[j] for j in range(3)) / m
        + ky3 * sum(sm.F[rho][j] * qp[j] for j in range(3))
        for rho in range(3)
    ]
    B = [bracket_H_with_L(x, params, rho) for rho in range(3)]
    total = 0.0
    for eta in range(3):
        for rho in range(3):
            eps = levi_civita(i, eta, rho)
            if eps == 0.0:
                continue
            total += eps * (B[rho] * pp[eta] + G[rho] * L[eta])
    total -= (m * k / y) * sum(
        sm.F[j][i] * pp[j] / m + ky3 * sm.E[j][i] * qp[j] for j in range(3)
    )
    total += (m * k / y**3) * sum(
        (sm.F[j][h] * pp[j] / m + ky3 * sm.E[j][h] * qp[j]) * qp[h] * qp[i]
        for j in range(3)
        for h in range(3)
    )
    return total


# -- pairwise bracket closed forms -------------------------------------------


def ll_bracket_bilinear(x, params: DeformationParams, i: int, j: int) -> float:
    """{L_i, L_j} expanded through the constant primed brackets."""
    qp, pp = _primed_split(x, params)
    sm = structure_matrices(params)
    total = 0.0
    for a in range(3):
        for b in range(3):
            e1 = levi_civita(i, a, b)
            if e1 == 0.0:
                continue
            for c in range(3):
                for d in range(3):
                    e2 = levi_civita(j, c, d)
                    if e2 == 0.0:
                        continue
                    total += e1 * e2 * (
                        qp[a] * qp[c] * sm.D[b][d]
                        + qp[a] * pp[d] * sm.F[b][c]
                        - qp[c] * pp[b] * sm.F[d][a]
                        + pp[b] * pp[d] * sm.E[a][c]
                    )
    return total


def ll_structure_form(x, params: DeformationParams, i: int, j: int) -> float:
    """so(3) pattern sum_h eps_ijh Fprime_hh L_h."""
    sm = structure_matrices(params)
    L = [duals.value(v) for v in angular_momentum(x, params)]
    return sum(levi_civita(i, j, h) * (-sm.F[h][h]) * L[h] for h in range(3))


def aa_structure_form(x, params: DeformationParams, i: int, j: int) -> float:
    """Pattern -2 m sum_h eps_ijh Fprime_hh H L_h."""
    sm = structure_matrices(params)
    L = [duals.value(v) for v in angular_momentum(x, params)]
    H = duals.value(hamiltonian(x, params))
    return -2.0 * params.mass * sum(
        levi_civita(i, j, h) * (-sm.F[h][h]) * H * L[h] for h in range(3)
    )


def lai_structure_form(x, params: DeformationParams) -> float:
    """Pattern sum_jh Fprime_jh (L_h p'_j + L_j p'_h) for the diagonal {L_i, A_i}."""
    _, pp = _primed_split(x, params)
    sm = structure_matrices(params)
    L = [duals.value(v) for v in angular_momentum(x, params)]
    return sum(
        -sm.F[j][h] * (L[h] * pp[j] + L[j] * pp[h]) for j in range(3) for h in range(3)
    )


def la_structure_form(x, params: DeformationParams, i: int, j: int) -> float:
    """Pattern sum_h eps_ijh (Fprime_hh A_h - Fprime_hj (mk/Y) q'^j
    + Fprime_hj L_i p'_h), the whole sum under the Levi-Civita symbol."""
    qp, pp = _primed_split(x, params)
    sm = structure_matrices(params)
    y = duals.value(deformed_radius(x, params))
    L = [duals.value(v) for v in angular_momentum(x, params)]
    A = [duals.value(v) for v in lrl_vector(x, params)]
    mky = params.mass * params.k / y
    total = 0.0
    for h in range(3):
        eps = levi_civita(i, j, h)
        if eps == 0.0:
            continue
        fp = -sm.F[h][j]
        total += eps * ((-sm.F[h][h]) * A[h] - fp * mky * qp[j] + fp * L[i] * pp[h])
    return total


@dataclass(frozen=True)
class BracketEntry:
    ad: float
    chain: float
    closed: float | None

    @property
    def ad_vs_chain(self) -> float:
        return abs(self.ad - self.chain)

    @property
    def ad_vs_closed(self) -> float:
        return abs(self.ad - self.closed) if self.closed is not None else float("nan")


def pairwise_bracket_table(x, params: DeformationParams) -> dict:
    """All pairwise brackets of (L, A), each computed three ways.

    ``ad`` is the weighted-bracket autodiff value, ``chain`` the
    structure-matrix route (these two agree at any deformation), and
    ``closed`` the structure-constant pattern (exact in the commutative
    limit; residuals elsewhere are reported, not suppressed).
    """
    ham_z, L_z, A_z = primed_observables(params)
    L_f = [angular_momentum_field(params, i) for i in range(3)]
    A_f = [lrl_field(params, i) for i in range(3)]
    table = {"LL": {}, "AA": {}, "LA": {}}
    for i in range(3):
        for j in range(3):
            ad = nc_bracket(L_f[i], L_f[j], x, params)
            chain = primed_chain_bracket(L_z[i], L_z[j], x, params)
            table["LL"][(i, j)] = BracketEntry(ad, chain, ll_structure_form(x, params, i, j))
            ad = nc_bracket(A_f[i], A_f[j], x, params)
            chain = primed_chain_bracket(A_z[i], A_z[j], x, params)
            table["AA"][(i, j)] = BracketEntry(ad, chain, aa_structure_form(x, params, i, j))
            ad = nc_bracket(L_f[i], A_f[j], x, params)
            chain = primed_chain_bracket(L_z[i], A_z[j], x, params)
            closed = (
                lai_structure_form(x, params)
                if i == j
                else la_structure_form(x, params, i, j)
            )
            table["LA"][(i, j)] = BracketEntry(ad, chain, closed)
    return table


# -- involution conditions ----------------------------------------------------


@dataclass(frozen=True)
class InvolutionReport:
    condition1_residual: float
    condition2_residual: float
    condition3_residual: float
    condition1_ok: bool
    condition2_ok: bool
    condition3_ok: bool
    bracket_H_L: tuple
    bracket_H_A: tuple


def involution_conditions(params: DeformationParams, x, tol: float = 1e-10) -> InvolutionReport:
    """Diagnostics for the sufficient involution conditions at a point.

    Condition 1 constrains the products lam_ij alpha_ij, condition 2 the
    primed coordinates of the point, condition 3 the symmetry of F.  All are
    reported with residuals; nothing is asserted.
    """
    a, l = params.alpha, params.lam
    th = params.theta
    r1 = 0.0
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            kap = 3 - i - j
            lhs = l[i][j] * a[i][j]
            rhs = -(0.5 * (l[i][kap] * a[i][kap] + l[j][kap] * a[j][kap]) + 4.0)
            r1 = max(r1, abs(lhs - rhs))
    qp, pp = _primed_split(x, params)
    r2 = 0.0
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            for kap in range(3):
                r2 = max(r2, abs(qp[i] * l[kap][j] * th[i] - qp[j] * l[kap][i] * th[j]))
                r2 = max(r2, abs(qp[i] * a[kap][i] * th[j] + qp[j] * a[kap][j] * th[i]))
                r2 = max(r2, abs(pp[i] * a[kap][j] * th[i] - pp[j] * a[kap][i] * th[j]))
                r2 = max(r2, abs(pp[i] * l[kap][i] * th[j] + pp[j] * l[kap][j] * th[i]))
    sm = structure_matrices(params)
    r3 = 0.0
    for i in range(3):
        for j in range(3):
            r3 = max(r3, abs(sm.F[i][j] - sm.F[j][i]))
    r3 = max(r3, abs(sm.F[0][0] - sm.F[1][1]), abs(sm.F[0][0] - sm.F[2][2]))
    L_f = [angular_momentum_field(params, i) for i in range(3)]
    A_f = [lrl_field(params, i) for i in range(3)]
    Hf = ScalarField(Chart.CARTESIAN, lambda c: hamiltonian(c, params), name="H")
    bl = tuple(nc_bracket(Hf, L_f[i], x, params) for i in range(3))
    ba = tuple(nc_bracket(Hf, A_f[i], x, params) for i in range(3))
    return InvolutionReport(
        condition1_residual=r1,
        condition2_residual=r2,
        condition3_residual=r3,
        condition1_ok=r1 <= tol,
        condition2_ok=r2 <= tol,
        condition3_ok=r3 <= tol,
        bracket_H_L=bl,
        bracket_H_A=ba,
    )


@dataclass(frozen=True)
class InvolutionSearchResult:
    found: bool
    best_residual: float
    best_params: DeformationParams | None
    note: str


def involution_parameter_search(seed: int = 42, n_draws: int = 400) -> InvolutionSearchResult:
    """Search deformation space for parameters meeting conditions 1 and 3.

    Condition 1 is a linear system in the products s_ij = lam_ij alpha_ij
    whose unique solution is s_ij = -2 for every pair; that forces every
    theta weight to 1 + (s_i. sum)/4 = 0, which the bracket excludes.  The
    random search documents how close valid deformations can get.
    """
    rng = np.random.default_rng(seed)
    best = math.inf
    best_params = None
    for _ in range(n_draws):
        vals = rng.uniform(-2.0, 2.0, size=6)
        a = [[0.0, vals[0], vals[1]], [-vals[0], 0.0, vals[2]], [-vals[1], -vals[2], 0.0]]
        l = [[0.0, vals[3], vals[4]], [-vals[3], 0.0, vals[5]], [-vals[4], -vals[5], 0.0]]
        try:
            params = DeformationParams(alpha=a, lam=l)
        except Exception:
            continue
        rep_r1 = 0.0
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                kap = 3 - i - j
                lhs = l[i][j] * a[i][j]
                rhs = -(0.5 * (l[i][kap] * a[i][kap] + l[j][kap] * a[j][kap]) + 4.0)
                rep_r1 = max(rep_r1, abs(lhs - rhs))
        sm = structure_matrices(params)
        r3 = max(
            abs(sm.F[i][j] - sm.F[j][i]) for i in range(3) for j in range(3)
        )
        r3 = max(r3, abs(sm.F[0][0] - sm.F[1][1]), abs(sm.F[0][0] - sm.F[2][2]))
        resid = max(rep_r1, r3)
        if resid < best:
            best = resid
            best_params = params
    return InvolutionSearchResult(
        found=best <= 1e-9,
        best_residual=best,
        best_params=best_params,
        note=(
            "the pairwise-product system behind condition 1 forces lam_ij alpha_ij = -2 "
            "for every pair, which makes every theta weight vanish; no valid deformation "
            "can satisfy it exactly"
        ),
    )


# -- scaled vectors and generator sets ----------------------------------------


def scaled_runge_lenz(x, params: DeformationParams, tau: EnergySign) -> list:
    """A / sqrt(-2mH) on the negative-energy region, A / sqrt(2mH) on the
    positive one; zero energy is excluded."""
    H = duals.value(hamiltonian(x, params))
    if abs(H) < 1e-12:
        raise ChartDomainError("scaled Runge-Lenz vector undefined at zero energy")
    if tau is EnergySign.MINUS and H >= 0.0:
        raise ChartDomainError(f"energy sign mismatch: H = {H} is not negative")
    if tau is EnergySign.PLUS and H <= 0.0:
        raise ChartDomainError(f"energy sign mismatch: H = {H} is not positive")
    scale = math.sqrt(-2.0 * params.mass * H if tau is EnergySign.MINUS else 2.0 * params.mass * H)
    return [duals.value(v) / scale for v in lrl_vector(x, params)]


def scaled_runge_lenz_field(params: DeformationParams, tau: EnergySign, i: int) -> ScalarField:
    def evaluate(c):
        H = hamiltonian(c, params)
        Hv = duals.value(H)
        if tau is EnergySign.MINUS and Hv >= 0.0:
            raise ChartDomainError(f"energy sign mismatch: H = {Hv} is not negative")
        if tau is EnergySign.PLUS and Hv <= 0.0:
            raise ChartDomainError(f"energy sign mismatch: H = {Hv} is not positive")
        scale = duals.sqrt(-2.0 * params.mass * H if tau is EnergySign.MINUS else 2.0 * params.mass * H)
        return lrl_vector(c, params)[i] / scale

    return ScalarField(Chart.CARTESIAN, evaluate, name=f"G{i + 1}")


@dataclass(frozen=True)
class GeneratorSet:
    kind: str  # so3 | so4 | so13
    fields: tuple  # 4x4 (or 3x3 for so3) matrix of ScalarField or None

    def evaluate(self, x) -> list:
        n = len(self.fields)
        return [
            [0.0 if f is None else duals.value(f(x)) for f in row] for row in self.fields
        ]


def generator_sets(params: DeformationParams, kind: str) -> GeneratorSet:
    """Antisymmetric-patterned generator matrices built from L and the scaled
    Runge-Lenz vector; diagonal corner entry is identically zero."""
    sm = structure_matrices(params)
    L = [angular_momentum_field(params, i) for i in range(3)]

    def block(h, j):
        def evaluate(c, h=h, j=j):
            return sum(
                levi_civita(h, j, i) * (-sm.F[i][i]) * L[i](c) for i in range(3)
            )

        return ScalarField(Chart.CARTESIAN, evaluate, name=f"Phi{h + 1}{j + 1}")

    if kind == "so3":
        rows = tuple(tuple(block(h, j) for j in range(3)) for h in range(3))
        return GeneratorSet(kind="so3", fields=rows)
    if kind not in ("so4", "so13"):
        raise ValueError(f"unknown generator set kind {kind!r}")
    tau = EnergySign.MINUS if kind == "so4" else EnergySign.PLUS
    G = [scaled_runge_lenz_field(params, tau, i) for i in range(3)]
    corner_sign = 1.0 if kind == "so4" else -1.0

    def corner(h):
        def evaluate(c, h=h):
            return corner_sign * (-sm.F[h][h]) * G[h](c)

        return ScalarField(Chart.CARTESIAN, evaluate, name=f"corner{h + 1}")

    rows = []
    for h in range(3):
        row = [block(h, j) for j in range(3)]
        row.append(corner(h))
        rows.append(tuple(row))
    last = []
    for h in range(3):
        f = corner(h)
        if kind == "so4":
            neg = ScalarField(Chart.CARTESIAN, lambda c, f=f: -f(c), name=f"-{f.name}")
            last.append(neg)
        else:
            last.append(f)
    last.append(None)
    rows.append(tuple(last))
    return GeneratorSet(kind=kind, fields=tuple(rows))


def constraint_predicates(x, params: DeformationParams) -> dict:
    """Pointwise constraints preceding the algebra statements: antisymmetry
    of L_h p'_j and the virial-like relation (m/Y) q'^j = eps_ijh L_i p'_h.

    They single out circular equatorial configurations; residuals are
    reported so the closure test can state its regime honestly.
    """
    qp, pp = _primed_split(x, params)
    y = duals.value(deformed_radius(x, params))
    L = [duals.value(v) for v in angular_momentum(x, params)]
    anti = max(abs(L[h] * pp[j] + L[j] * pp[h]) for h in range(3) for j in range(3))
    virial = 0.0
    for i in range(3):
        for j in range(3):
            for h in range(3):
                if levi_civita(i, j, h) == 0.0:
                    continue
                virial = max(
                    virial,
                    abs(params.mass / y * qp[j] - levi_civita(i, j, h) * L[i] * pp[h]),
                )
    return {"antisymmetry_residual": anti, "virial_residual": virial}


@dataclass(frozen=True)
class ClosureFit:
    pattern: str
    coefficient_LL: float
    coefficient_GG: float
    coefficient_LG: float
    residual: float


def closure_fit(points: Sequence[PhasePoint], params: DeformationParams, tau: EnergySign) -> ClosureFit:
    """Least-squares structure constants of the six fields (L, scaled A).

    Fits each bracket value against the basis values at the sample points;
    the so(4) pattern has the GG coefficient equal to the LL one, the
    so(1,3) pattern flips its sign.
    """
    L_f = [angular_momentum_field(params, i) for i in range(3)]
    G_f = [scaled_runge_lenz_field(params, tau, i) for i in range(3)]
    basis = L_f + G_f

    def fit_block(pairs, targets):
        rows, rhs = [], []
        for x in points:
            bevals = [duals.value(b(x)) for b in basis]
            for (f, g), tgt in zip(pairs, targets):
                rows.append([bevals[t] for t in tgt])
                rhs.append(nc_bracket(f, g, x, params))
        A = np.array(rows)
        b = np.array(rhs)
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        resid = float(np.max(np.abs(A @ coef - b))) if len(b) else 0.0
        return coef, resid

    # {L_i, L_j} ~ c_LL eps_ijh L_h ; {G_i, G_j} ~ c_GG eps_ijh L_h ;
    # {L_i, G_j} ~ c_LG eps_ijh G_h    (single-coefficient fits per block)
    def single_coeff(pairs, target_index_map):
        rows, rhs = [], []
        for x in points:
            bevals = [duals.value(b(x)) for b in basis]
            for (f, g), tgt in zip(pairs, target_index_map):
                rows.append([bevals[tgt]])
                rhs.append(nc_bracket(f, g, x, params))
        A = np.array(rows)
        b = np.array(rhs)
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        resid = float(np.max(np.abs(A @ coef - b))) if len(b) else 0.0
        return float(coef[0]), resid

    ll_pairs = [(L_f[0], L_f[1]), (L_f[1], L_f[2]), (L_f[2], L_f[0])]
    ll_targets = [2, 0, 1]
    c_ll, r1 = single_coeff(ll_pairs, ll_targets)
    gg_pairs = [(G_f[0], G_f[1]), (G_f[1], G_f[2]), (G_f[2], G_f[0])]
    c_gg, r2 = single_coeff(gg_pairs, ll_targets)
    lg_pairs = [(L_f[0], G_f[1]), (L_f[1], G_f[2]), (L_f[2], G_f[0])]
    lg_targets = [5, 3, 4]
    c_lg, r3 = single_coeff(lg_pairs, lg_targets)
    pattern = "so4" if tau is EnergySign.MINUS else "so13"
    return ClosureFit(
        pattern=pattern,
        coefficient_LL=c_ll,
        coefficient_GG=c_gg,
        coefficient_LG=c_lg,
        residual=max(r1, r2, r3),
    )
