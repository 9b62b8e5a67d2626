"""Contact profile: values, derivatives, smoothness order, vectorization."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from relcrawl.smoothing import (
    RAW_C1,
    SmoothingProfile,
    chi,
    chi_double_prime,
    chi_prime,
)

MOLL = SmoothingProfile("mollified", mollifier_width=1e-2)


def test_raw_values_below_ground():
    assert chi(-2.0) == pytest.approx(2.0)
    assert chi(-0.3) == pytest.approx(0.045)
    assert chi_prime(-0.3) == pytest.approx(-0.3)
    assert chi_double_prime(-0.3) == 1.0


def test_raw_values_above_ground():
    for x in (0.0, 1e-12, 0.5, 3.0):
        assert chi(x) == 0.0
        assert chi_prime(x) == 0.0
        assert chi_double_prime(x) == 0.0


def test_raw_is_c1_at_zero():
    eps = 1e-8
    assert chi(-eps) == pytest.approx(0.0, abs=1e-15)
    assert chi_prime(-eps) == pytest.approx(0.0, abs=1e-7)


def test_vectorization_and_scalars():
    x = np.array([-1.0, -0.5, 0.0, 0.5])
    v = chi(x)
    assert v.shape == x.shape
    assert np.allclose(v, [0.5, 0.125, 0.0, 0.0])
    assert isinstance(chi(-1.0), float)
    assert isinstance(chi_prime(-1.0), float)


def test_mollified_matches_raw_outside_blend():
    w = MOLL.mollifier_width
    for x in (-5.0, -1.0, -2 * w, 2 * w, 1.0):
        assert chi(x, MOLL) == pytest.approx(chi(x), abs=1e-15)
        assert chi_prime(x, MOLL) == pytest.approx(chi_prime(x), abs=1e-15)
        assert chi_double_prime(x, MOLL) == pytest.approx(chi_double_prime(x), abs=1e-15)


def _fd_derivative(f, x, h=1e-7):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def test_mollified_is_c2():
    w = MOLL.mollifier_width
    # first and second derivatives are continuous across the blend edges
    for edge in (-w, 0.0, w):
        left = chi_prime(edge - 1e-12, MOLL)
        right = chi_prime(edge + 1e-12, MOLL)
        assert left == pytest.approx(right, abs=1e-9)
        left2 = chi_double_prime(edge - 1e-12, MOLL)
        right2 = chi_double_prime(edge + 1e-12, MOLL)
        assert left2 == pytest.approx(right2, abs=1e-6)


def test_mollified_derivatives_consistent():
    xs = np.linspace(-3 * MOLL.mollifier_width, 3 * MOLL.mollifier_width, 41)
    for x in xs:
        fd1 = _fd_derivative(lambda u: chi(u, MOLL), x)
        assert chi_prime(x, MOLL) == pytest.approx(fd1, abs=1e-6)
        fd2 = _fd_derivative(lambda u: chi_prime(u, MOLL), x)
        assert chi_double_prime(x, MOLL) == pytest.approx(fd2, abs=1e-4)


@given(st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
def test_profile_properties(x):
    for prof in (RAW_C1, MOLL):
        assert chi(x, prof) >= 0.0
        if x <= 0.0:
            assert chi_prime(x, prof) <= 1e-15  # non-increasing left of contact
    assert chi_prime(x, RAW_C1) <= 1e-15  # raw profile: non-increasing everywhere
    if x <= -MOLL.mollifier_width:
        assert chi_prime(x, MOLL) == x
        assert chi_double_prime(x, MOLL) == 1.0


def test_profile_validation():
    with pytest.raises(ValueError):
        SmoothingProfile("parabolic")
    with pytest.raises(ValueError):
        SmoothingProfile("mollified", mollifier_width=0.0)
