import math

import pytest

from nckepler import duals
from nckepler.duals import Dual, grad, hessian, jacobian, value


def central_difference(f, coords, i, h=1e-6):
    up = list(coords)
    dn = list(coords)
    up[i] += h
    dn[i] -= h
    return (f(up) - f(dn)) / (2.0 * h)


def test_polynomial_gradient_exact():
    f = lambda c: sum(ci**2 for ci in c)
    assert grad(f, [1, 2, 3, 4, 5, 6]) == [2.0, 4.0, 6.0, 8.0, 10.0, 12.0]


def test_constant_gradient_zero():
    f = lambda c: 7.5
    assert grad(f, [1.0] * 6) == [0.0] * 6


def test_transcendental_gradient_matches_central_differences():
    def f(c):
        return duals.sin(c[0]) * duals.cos(c[1]) + duals.sqrt(c[2]) + duals.log(c[3]) \
            + duals.arcsin(0.3 * c[4]) + duals.exp(0.2 * c[5])

    coords = [0.4, 1.1, 2.3, 1.7, 0.9, 0.5]
    g = grad(f, coords)
    for i in range(6):
        fd = central_difference(f, coords, i)
        assert abs(g[i] - fd) < 1e-9 * max(1.0, abs(fd))


def test_atan2_derivatives():
    f = lambda c: duals.atan2(c[1], c[0])
    coords = [0.8, -0.6, 0, 0, 0, 0]
    g = grad(f, coords)
    r2 = 0.8**2 + 0.6**2
    assert abs(g[0] - 0.6 / r2) < 1e-14
    assert abs(g[1] - 0.8 / r2) < 1e-14


def test_integer_power_at_zero():
    f = lambda c: c[0] ** 3
    assert grad(f, [0.0] * 6)[0] == 0.0


def test_jacobian():
    def vf(c):
        return [c[0] * c[1], c[2] ** 2, duals.sin(c[3]), c[4], c[5], 1.0]

    J = jacobian(vf, [1.0, 2.0, 3.0, 0.5, 0.1, 0.2])
    assert abs(J[0][0] - 2.0) < 1e-15
    assert abs(J[0][1] - 1.0) < 1e-15
    assert abs(J[1][2] - 6.0) < 1e-15
    assert abs(J[2][3] - math.cos(0.5)) < 1e-15
    assert J[5][5] == 0.0


def test_nested_hessian():
    def f(c):
        return c[0] ** 2 * c[1] + duals.sin(c[2]) + c[0] * c[2]

    H = hessian(f, [1.5, 2.0, 0.3, 0.0, 0.0, 0.0])
    assert abs(H[0][0] - 2.0 * 2.0) < 1e-14
    assert abs(H[0][1] - 2.0 * 1.5) < 1e-14
    assert abs(H[1][0] - H[0][1]) < 1e-14
    assert abs(H[2][2] + math.sin(0.3)) < 1e-14
    assert abs(H[0][2] - 1.0) < 1e-14


def test_value_unwraps_nesting():
    d = Dual(Dual(2.5, 1.0), Dual(3.0, 0.0))
    assert value(d) == 2.5


def test_division_chain():
    f = lambda c: 1.0 / (c[0] + c[1] ** 2)
    coords = [2.0, 3.0, 0, 0, 0, 0]
    g = grad(f, coords)
    denom = (2.0 + 9.0) ** 2
    assert abs(g[0] + 1.0 / denom) < 1e-15
    assert abs(g[1] + 6.0 / denom) < 1e-15
