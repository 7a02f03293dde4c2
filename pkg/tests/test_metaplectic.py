import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfpoincare.metaplectic import (HalfIntegerWeight, IwasawaCoordinates, MetaplecticElement, a_y, act, central,
                                      chi_m, classical_lift, element, from_iwasawa, identity, im_transform, inverse,
                                      is_close, iwasawa, kappa, lift_value, n_x, principal_sqrt, random_element,
                                      slash)

coords = st.builds(IwasawaCoordinates,
                   st.floats(-5, 5), st.floats(0.05, 20), st.floats(0, 4 * math.pi - 1e-9))
upper = st.builds(complex, st.floats(-3, 3), st.floats(0.1, 5))


def f_test(z):
    return np.exp(2j * np.pi * z) + 0.3 * np.exp(4j * np.pi * z)


@pytest.mark.parametrize("z, expected", [(1, 1), (-1, 1j), (2j, 1 + 1j), (-4, 2j), (-1 - 0j, 1j)])
def test_principal_sqrt_examples(z, expected):
    assert principal_sqrt(z) == pytest.approx(expected, abs=1e-15)


# subnormal negative imaginary parts make the true real part of the root underflow
@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)
       .filter(lambda z: z.imag >= 0 or z.imag < -1e-300))
def test_principal_sqrt_branch(z):
    w = principal_sqrt(z)
    assert abs(w * w - z) <= 1e-12 * max(1, abs(z))
    # arg(w) in (-pi/2, pi/2]: positive real part, or on the imaginary axis with Im >= 0
    assert w.real > 0 or (w.real == 0 and w.imag >= 0)


@pytest.mark.parametrize("text, num", [("13/2", 13), ("1/2", 1), ("5.5", 11), ("3/2", 3)])
def test_weight_parse(text, num):
    assert HalfIntegerWeight.parse(text).numerator == num


@pytest.mark.parametrize("bad", ["6/2", "2", "1/3", "-1/2"])
def test_weight_parse_rejects(bad):
    with pytest.raises(ValueError):
        HalfIntegerWeight.parse(bad)


def test_element_validation():
    with pytest.raises(ValueError):
        MetaplecticElement(1, 1, 1, 1, 1.0)          # det 0
    with pytest.raises(ValueError):
        MetaplecticElement(1, 0, 0, 1, 1j)           # eta^2 != 1


def test_kappa_pi_squared_is_minus_one():
    s = kappa(math.pi) * kappa(math.pi)
    assert is_close(s, MetaplecticElement(1, 0, 0, 1, -1.0), 1e-15)


def test_centre_exact():
    assert central(1) * central(1) == central(2)
    assert central(2) * central(2) == identity()
    assert central(1) * central(3) == identity()


def test_translations_compose():
    s = n_x(0.25) * n_x(1.5)
    assert is_close(s, n_x(1.75))
    assert s.eta(0.3 + 2j) == 1


@pytest.mark.parametrize("t", [0.3, 1.0, math.pi, 5.0])
def test_inverse_of_kappa(t):
    assert is_close(inverse(kappa(t)), kappa(-t) if t != math.pi else kappa(3 * math.pi), 1e-12)


def test_inverse_central_order_two():
    m1 = central(2)
    assert inverse(m1) == m1


@given(coords, coords, coords)
@settings(max_examples=60, deadline=None)
def test_associativity(c1, c2, c3):
    s1, s2, s3 = from_iwasawa(c1), from_iwasawa(c2), from_iwasawa(c3)
    assert is_close((s1 * s2) * s3, s1 * (s2 * s3), 1e-9)


@given(coords)
@settings(max_examples=60, deadline=None)
def test_inverse(c):
    s = from_iwasawa(c)
    assert is_close(s * inverse(s), identity(), 1e-9)
    assert is_close(inverse(s) * s, identity(), 1e-9)


@given(coords, coords, upper)
@settings(max_examples=60, deadline=None)
def test_action_and_eta_cocycle(c1, c2, z):
    s1, s2 = from_iwasawa(c1), from_iwasawa(c2)
    w = act(s2, z)
    assert act(s1 * s2, z) == pytest.approx(act(s1, w), rel=1e-9, abs=1e-12)
    assert (s1 * s2).eta(z) == pytest.approx(s1.eta(w) * s2.eta(z), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 1.0, 2.5, 7.0])
def test_kappa_fixes_i(t):
    assert act(kappa(t), 1j) == pytest.approx(1j, abs=1e-14)


@given(coords)
def test_iwasawa_factors_move_i(c):
    w = act(from_iwasawa(c), 1j)
    assert w == pytest.approx(complex(c.x, c.y), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("s, expected", [
    (identity(), (0, 1, 0)),
    (n_x(3) * a_y(2), (3, 2, 0)),
    (kappa(5 * math.pi), (0, 1, math.pi)),
])
def test_iwasawa_examples(s, expected):
    got = iwasawa(s)
    assert (got.x, got.y, got.t) == pytest.approx(expected, abs=1e-12)


@given(coords)
@settings(max_examples=80, deadline=None)
def test_iwasawa_round_trip(c):
    s = from_iwasawa(c)
    r = iwasawa(s)
    assert (r.x, r.y) == pytest.approx((c.x, c.y), rel=1e-9, abs=1e-9)
    # t is defined mod 4 pi and determined by eta(i) = y^(-1/4) e^(it/2)
    assert abs(np.exp(0.5j * r.t) - np.exp(0.5j * c.t)) < 1e-9


def test_act_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        act(identity(), -1j)


def test_im_transform_matches_act(rng):
    for _ in range(50):
        s = random_element(rng)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.1, 3))
        assert im_transform(s, z) == pytest.approx(act(s, z).imag, rel=1e-12)


def test_slash_identity():
    z = np.array([0.1 + 1j, -0.7 + 0.3j])
    np.testing.assert_allclose(slash(f_test, "13/2", identity())(z), f_test(z))


@pytest.mark.parametrize("m", ["1/2", "13/2", "3/2"])
def test_slash_by_minus_one_negates(m):
    z = np.array([0.1 + 1j, -0.7 + 0.3j])
    np.testing.assert_allclose(slash(f_test, m, central(2))(z), -f_test(z))
    # agrees with chi_m at t = 2 pi
    assert chi_m(m, 2 * math.pi) == pytest.approx(-1)


def test_slash_is_right_action(rng):
    m = HalfIntegerWeight.parse("13/2")
    for _ in range(100):
        s1, s2 = random_element(rng), random_element(rng)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        lhs = slash(slash(f_test, m, s1), m, s2)(z)
        rhs = slash(f_test, m, s1 * s2)(z)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@pytest.mark.parametrize("y, expected", [(1.0, 1.0), (4.0, 4 ** 0.25)])
def test_classical_lift_constant(y, expected):
    assert classical_lift(lambda z: 1.0, "1/2", IwasawaCoordinates(0, y, 0)) == pytest.approx(expected)


def test_lift_matches_classical_formula(rng):
    m = "13/2"
    for _ in range(30):
        c = IwasawaCoordinates(rng.uniform(-1, 1), rng.uniform(0.3, 2), rng.uniform(0, 4 * math.pi))
        got = lift_value(f_test, m, from_iwasawa(c))
        assert got == pytest.approx(classical_lift(f_test, m, c), rel=1e-10, abs=1e-14)


def test_lift_kappa_twist(rng):
    m = HalfIntegerWeight.parse("13/2")
    for _ in range(30):
        s = random_element(rng, 1.0)
        t = rng.uniform(0, 4 * math.pi)
        lhs = lift_value(f_test, m, s * kappa(t))
        rhs = lift_value(f_test, m, s) * chi_m(m, t)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_element_sign():
    s = element(0, -1, 1, 0, sign=-1)
    assert s.sign == -1
    assert s.eta(2j) == pytest.approx(-principal_sqrt(2j))
