"""The sphere moment closed form against the Gaussian-moment oracle.

Every residue coefficient in the package flows through
sphere_monomial_average, so the closed form is validated here against an
independent derivation (ratios of Gaussian moments) before anything else
is allowed to trust it.
"""
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from wrescalc.multiindex import enumerate_up_to, zero_index
from wrescalc.polyring import MultiPoly, jet_gen
from wrescalc.sphere import (double_factorial, gaussian_moment,
                             gaussian_radial_moment, integrate_poly_on_sphere,
                             sphere_average_oracle, sphere_monomial_average)


def test_double_factorial():
    assert [double_factorial(k) for k in (-1, 0, 1, 2, 3, 5, 7)] == \
        [1, 1, 1, 2, 3, 15, 105]


def test_total_mass_one():
    for n in range(2, 11):
        assert sphere_monomial_average(n, zero_index(n)) == 1


def test_odd_monomials_vanish():
    assert sphere_monomial_average(4, (1, 0, 0, 0)) == 0
    assert sphere_monomial_average(4, (2, 1, 0, 2)) == 0
    assert sphere_monomial_average(3, (1, 1, 1)) == 0


def test_low_moments_closed_values():
    for n in range(2, 9):
        e2 = (2,) + (0,) * (n - 1)
        e4 = (4,) + (0,) * (n - 1)
        e22 = (2, 2) + (0,) * (n - 2)
        assert sphere_monomial_average(n, e2) == Fraction(1, n)
        assert sphere_monomial_average(n, e4) == Fraction(3, n * (n + 2))
        assert sphere_monomial_average(n, e22) == Fraction(1, n * (n + 2))


def test_closed_form_equals_gaussian_oracle_exhaustive():
    # the load-bearing validation: all even multi-indices through degree 8
    for n in (2, 3, 4, 6):
        for a in enumerate_up_to(n, 4):
            alpha = tuple(2 * v for v in a)
            assert sphere_monomial_average(n, alpha) == \
                sphere_average_oracle(n, alpha), (n, alpha)


@given(st.integers(min_value=2, max_value=10),
       st.lists(st.integers(min_value=0, max_value=3), min_size=2, max_size=10))
def test_closed_form_equals_gaussian_oracle_random(n, halves):
    halves = (halves + [0] * n)[:n]
    alpha = tuple(2 * v for v in halves)
    assert sphere_monomial_average(n, alpha) == sphere_average_oracle(n, alpha)


def test_gaussian_moment_values():
    assert gaussian_moment((2,)) == 1
    assert gaussian_moment((4,)) == 3
    assert gaussian_moment((6,)) == 15
    assert gaussian_moment((2, 4)) == 3
    assert gaussian_moment((1, 2)) == 0
    assert gaussian_radial_moment(3, 1) == 3
    # E[|x|^4] = n(n+2)
    assert gaussian_radial_moment(5, 2) == 35


def test_quadratic_form_rotation_invariance():
    # integral of <xi,u><xi,v> = <u,v>/n for rational u, v
    n = 4
    u = [Fraction(1), Fraction(-2), Fraction(1, 2), Fraction(0)]
    v = [Fraction(3), Fraction(1), Fraction(2), Fraction(-1)]
    acc = Fraction(0)
    for i in range(n):
        for j in range(n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            acc += u[i] * v[j] * sphere_monomial_average(n, tuple(e))
    dot = sum(a * b for a, b in zip(u, v))
    assert acc == Fraction(dot, n)


def test_integrate_poly_passes_gens_through():
    n = 2
    f1 = jet_gen("f", (1, 0))
    p = MultiPoly.monomial(n, (2, 0), ((f1, 1),)) + MultiPoly.monomial(n, (1, 1))
    out = integrate_poly_on_sphere(p, n)
    assert out == MultiPoly.from_gen(n, f1, Fraction(1, 2))
