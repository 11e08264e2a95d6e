import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nckepler import duals
from nckepler.deformation import DeformationParams
from nckepler.geometry import (
    BivectorField,
    Chart,
    PhasePoint,
    ScalarField,
    VectorField,
    bivector_bracket,
    constant_bivector,
    coordinate_field,
    gradient,
    hamiltonian_vector_field,
    interior_product,
    lie_bracket,
    lie_derivative,
    max_abs,
    nijenhuis_torsion,
    schouten_bracket,
    MixedTensor,
)
from nckepler.kepler import hamiltonian_field

CANONICAL = [[0.0] * 6 for _ in range(6)]
for _nu in range(3):
    CANONICAL[3 + _nu][_nu] = 1.0
    CANONICAL[_nu][3 + _nu] = -1.0

P_CANONICAL = constant_bivector(Chart.CARTESIAN, CANONICAL, name="P")

POINT = PhasePoint((1.0, 0.5, -0.3, 0.2, 1.1, 0.4), Chart.CARTESIAN)


def central_difference(f, coords, i, h=1e-5):
    up = list(coords)
    dn = list(coords)
    up[i] += h
    dn[i] -= h
    return (f(up) - f(dn)) / (2.0 * h)


def test_gradient_polynomial_exact():
    f = ScalarField(Chart.CARTESIAN, lambda c: sum(ci**2 for ci in c))
    g = gradient(f, PhasePoint((1, 2, 3, 4, 5, 6), Chart.CARTESIAN))
    assert g == [2.0, 4.0, 6.0, 8.0, 10.0, 12.0]


def test_gradient_constant_zero():
    f = ScalarField(Chart.CARTESIAN, lambda c: 3.0)
    assert gradient(f, POINT) == [0.0] * 6


def test_gradient_matches_central_differences_for_energy():
    params = DeformationParams()
    H = hamiltonian_field(params)
    g = gradient(H, POINT)
    for i in range(6):
        fd = central_difference(H.func, list(POINT.coords), i)
        assert abs(g[i] - fd) / max(1.0, abs(fd)) < 1e-6


def test_hamiltonian_field_of_momentum_matches_bracket_sign():
    # X_{p1} must act as {p1, .}: on q^1 the canonical bracket gives +1
    f = ScalarField(Chart.CARTESIAN, lambda c: c[3], name="p1")
    X = hamiltonian_vector_field(P_CANONICAL, f)
    v = X(POINT)
    assert v == [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]


def test_hamiltonian_field_of_constant_vanishes():
    f = ScalarField(Chart.CARTESIAN, lambda c: 2.0)
    assert hamiltonian_vector_field(P_CANONICAL, f)(POINT) == [0.0] * 6


def test_hamiltonian_field_with_zero_bivector():
    zero = constant_bivector(Chart.CARTESIAN, [[0.0] * 6 for _ in range(6)])
    f = ScalarField(Chart.CARTESIAN, lambda c: c[0] * c[4])
    assert hamiltonian_vector_field(zero, f)(POINT) == [0.0] * 6


def _poly_vector_field(coeffs):
    def f(c):
        return [
            coeffs[i][0] + sum(coeffs[i][1 + j] * c[j] for j in range(6))
            + coeffs[i][7] * c[i] * c[(i + 1) % 6]
            for i in range(6)
        ]

    return VectorField(Chart.CARTESIAN, f)


def test_lie_bracket_of_field_with_itself_vanishes():
    rng = np.random.default_rng(0)
    X = _poly_vector_field(rng.uniform(-1, 1, size=(6, 8)))
    assert max_abs(lie_bracket(X, X, POINT)) < 1e-15


def test_lie_bracket_of_constant_fields_vanishes():
    X = VectorField(Chart.CARTESIAN, lambda c: [1.0, 2, 3, 4, 5, 6])
    Y = VectorField(Chart.CARTESIAN, lambda c: [0.5] * 6)
    assert max_abs(lie_bracket(X, Y, POINT)) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_lie_bracket_antisymmetry(seed):
    rng = np.random.default_rng(seed)
    X = _poly_vector_field(rng.uniform(-1, 1, size=(6, 8)))
    Y = _poly_vector_field(rng.uniform(-1, 1, size=(6, 8)))
    pt = PhasePoint(tuple(rng.uniform(-1, 1, size=6)), Chart.CARTESIAN)
    ab = lie_bracket(X, Y, pt)
    ba = lie_bracket(Y, X, pt)
    assert max(abs(a + b) for a, b in zip(ab, ba)) < 1e-11


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_lie_derivative_leibniz_on_products(seed):
    rng = np.random.default_rng(seed)
    Z = _poly_vector_field(rng.uniform(-1, 1, size=(6, 8)))
    cf, cg = rng.uniform(-1, 1, size=(2, 6))
    f = ScalarField(Chart.CARTESIAN, lambda c: sum(cf[i] * c[i] for i in range(6)) + c[0] * c[3])
    g = ScalarField(Chart.CARTESIAN, lambda c: sum(cg[i] * c[i] for i in range(6)) + c[1] ** 2)
    fg = ScalarField(Chart.CARTESIAN, lambda c: f.func(c) * g.func(c))
    pt = PhasePoint(tuple(rng.uniform(-1, 1, size=6)), Chart.CARTESIAN)
    lhs = lie_derivative(Z, fg, pt)
    rhs = lie_derivative(Z, f, pt) * g(pt) + f(pt) * lie_derivative(Z, g, pt)
    assert abs(lhs - rhs) < 1e-11


def test_lie_derivative_along_zero_field():
    Z = VectorField(Chart.CARTESIAN, lambda c: [0.0] * 6)
    f = ScalarField(Chart.CARTESIAN, lambda c: c[0] ** 3 + c[4])
    assert lie_derivative(Z, f, POINT) == 0.0


def _jacobiator(P, x):
    coords = [
        ScalarField(Chart.CARTESIAN, lambda c, a=a: c[a], name=f"x{a}") for a in range(6)
    ]
    worst = 0.0
    for a in range(6):
        for b in range(a + 1, 6):
            for c in range(b + 1, 6):
                s = (
                    duals.value(bivector_bracket(P, coords[a], bivector_bracket(P, coords[b], coords[c]))(x))
                    + duals.value(bivector_bracket(P, coords[b], bivector_bracket(P, coords[c], coords[a]))(x))
                    + duals.value(bivector_bracket(P, coords[c], bivector_bracket(P, coords[a], coords[b]))(x))
                )
                worst = max(worst, abs(s))
    return worst


def test_schouten_constant_bivector_vanishes():
    assert max_abs(schouten_bracket(P_CANONICAL, P_CANONICAL, POINT)) == 0.0


def test_schouten_vanishes_iff_jacobi_holds():
    # Poisson direction: the canonical bivector has zero self-bracket and
    # zero Jacobiator.  Non-Poisson direction: an x-dependent entry breaks
    # both, with the same vanishing locus.
    assert _jacobiator(P_CANONICAL, POINT) < 1e-12

    def bad(c):
        mat = [list(row) for row in CANONICAL]
        mat[0][1] = c[2]
        mat[1][0] = -c[2]
        return mat

    P_bad = BivectorField(Chart.CARTESIAN, bad, name="bad")
    s = max_abs(schouten_bracket(P_bad, P_bad, POINT))
    j = _jacobiator(P_bad, POINT)
    assert s > 1e-3
    assert j > 1e-3


def test_schouten_symmetric_in_its_bivector_arguments():
    def other(c):
        mat = [[0.0] * 6 for _ in range(6)]
        mat[0][3] = 1.0 + c[1] ** 2
        mat[3][0] = -mat[0][3]
        mat[1][4] = 2.0
        mat[4][1] = -2.0
        mat[2][5] = 1.0
        mat[5][2] = -1.0
        return mat

    Q = BivectorField(Chart.CARTESIAN, other)
    spq = schouten_bracket(P_CANONICAL, Q, POINT)
    sqp = schouten_bracket(Q, P_CANONICAL, POINT)
    diff = max(
        abs(spq[i][j][k] - sqp[i][j][k])
        for i in range(6) for j in range(6) for k in range(6)
    )
    assert diff < 1e-14


def test_nijenhuis_identity_operator():
    T = MixedTensor(Chart.CARTESIAN, lambda c: [[1.0 if i == j else 0.0 for j in range(6)] for i in range(6)])
    rng = np.random.default_rng(1)
    X = _poly_vector_field(rng.uniform(-1, 1, size=(6, 8)))
    Y = _poly_vector_field(rng.uniform(-1, 1, size=(6, 8)))
    assert max_abs(nijenhuis_torsion(T, X, Y, POINT)) < 1e-13


def test_nijenhuis_constant_diagonal():
    T = MixedTensor(Chart.CARTESIAN, lambda c: [[float(i + 1) if i == j else 0.0 for j in range(6)] for i in range(6)])
    X = coordinate_field(Chart.CARTESIAN, 0)
    Y = coordinate_field(Chart.CARTESIAN, 4)
    assert max_abs(nijenhuis_torsion(T, X, Y, POINT)) == 0.0


def test_interior_product_zero_field():
    from nckepler.deformation import nc_symplectic_structures

    omega, _ = nc_symplectic_structures(DeformationParams())
    X = VectorField(Chart.CARTESIAN, lambda c: [0.0] * 6)
    assert interior_product(X, omega, POINT) == [0.0] * 6


def test_interior_product_of_flow_is_minus_differential():
    from nckepler.deformation import nc_symplectic_structures
    from nckepler.kepler import hamiltonian_vector_field_nc

    params = DeformationParams()
    omega, _ = nc_symplectic_structures(params)
    H = hamiltonian_field(params)
    X = hamiltonian_vector_field_nc(params)
    rng = np.random.default_rng(7)
    for _ in range(10):
        q = rng.uniform(0.5, 1.5, size=3)
        p = rng.uniform(-1, 1, size=3)
        x = PhasePoint((*q, *p), Chart.CARTESIAN)
        ip = interior_product(X, omega, x)
        dH = gradient(H, x)
        assert max(abs(duals.value(ip[i]) + duals.value(dH[i])) for i in range(6)) < 1e-10
