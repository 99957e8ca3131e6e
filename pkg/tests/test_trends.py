"""Trend catalogue: values, certified bounds, derivatives, text grammar."""

import numpy as np
import pytest

from hermite_trend.trends import (
    DerivativeUnavailable,
    constant_trend,
    parse_trend,
    polynomial_trend,
    sinusoid_trend,
    weierstrass_trend,
)

# frozen by direct summation / closed form
W_AT_1 = 0.8925553267706385
W_AT_037 = 0.5276509974043655
W_GAMMA = 0.4649735207179272
W_HOLDER_CONST = 17.387624984889342


def central_diff(f, t, h=1e-5):
    return (f(t + h) - f(t - h)) / (2.0 * h)


class TestValuesAndBounds:
    def test_constant(self):
        th = constant_trend(0.7, horizon=2.0)
        assert th(0.3) == 0.7
        assert np.all(th(np.linspace(0, 2, 50)) == 0.7)
        assert th.bound == 0.7
        assert th.rho == np.inf

    def test_sinusoid_value_and_bound(self):
        th = sinusoid_trend(offset=0.5, amplitude=0.8, omega=3.0, horizon=2.0)
        ts = np.linspace(0.0, 2.0, 801)
        vals = th(ts)
        assert np.allclose(vals, 0.5 + 0.8 * np.sin(3.0 * ts), atol=0, rtol=1e-15)
        assert th.bound == pytest.approx(1.3)
        assert np.max(np.abs(vals)) <= th.bound + 1e-12

    def test_polynomial_value_and_bound(self):
        th = polynomial_trend([0.2, -0.4, 0.1], horizon=2.0)
        assert th(1.5) == pytest.approx(0.2 - 0.4 * 1.5 + 0.1 * 1.5**2)
        # bound sum |c_i| T^i dominates the dense-grid sup
        ts = np.linspace(0.0, 2.0, 2001)
        assert np.max(np.abs(th(ts))) <= th.bound + 1e-12
        assert th.bound == pytest.approx(0.2 + 0.8 + 0.4)

    def test_weierstrass_values(self):
        th = weierstrass_trend(
            amplitude=1.0, decay=0.6, lacunarity=3.0, terms=12, horizon=2.0
        )
        assert th(1.0) == pytest.approx(W_AT_1, abs=1e-14)
        assert th(0.37) == pytest.approx(W_AT_037, abs=1e-14)

    def test_weierstrass_holder_metadata(self):
        th = weierstrass_trend(
            amplitude=1.0, decay=0.6, lacunarity=3.0, terms=12, horizon=2.0
        )
        assert th.smoothness == "holder"
        assert th.holder_k == 1
        assert th.gamma == pytest.approx(W_GAMMA, abs=1e-15)
        assert th.rho == pytest.approx(1.0 + W_GAMMA)
        assert th.holder_constant == pytest.approx(W_HOLDER_CONST, rel=1e-13)

    def test_weierstrass_holder_inequality_sampled(self):
        # |theta'(t) - theta'(s)| <= C |t - s|^gamma on a grid of pairs
        th = weierstrass_trend(
            amplitude=1.0, decay=0.6, lacunarity=3.0, terms=12, horizon=2.0
        )
        d1 = th.derivative(1)
        ts = np.linspace(0.0, 2.0, 257)
        vals = d1(ts)
        diff = np.abs(vals[:, None] - vals[None, :])
        gaps = np.abs(ts[:, None] - ts[None, :]) ** th.gamma
        mask = gaps > 0
        assert np.max(diff[mask] / gaps[mask]) <= th.holder_constant


class TestDerivatives:
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_sinusoid_derivatives_match_finite_difference(self, order):
        th = sinusoid_trend(offset=0.5, amplitude=0.8, omega=3.0, horizon=2.0)
        d = th.derivative(order)
        lower = th.derivative(order - 1) if order > 1 else th.value
        for t in (0.2, 0.9, 1.6):
            assert d(t) == pytest.approx(central_diff(lower, t), abs=1e-6)

    def test_polynomial_derivatives_exact(self):
        th = polynomial_trend([0.2, -0.4, 0.1, 0.05], horizon=2.0)
        d2 = th.derivative(2)
        # 2*0.1 + 6*0.05*t
        assert d2(1.0) == pytest.approx(0.2 + 0.3, abs=1e-14)
        d5 = th.derivative(5)
        assert d5(0.7) == 0.0

    def test_constant_higher_derivatives_vanish(self):
        th = constant_trend(0.7, horizon=2.0)
        assert th.derivative(1)(0.5) == 0.0
        assert th.derivative(4)(1.2) == 0.0

    def test_weierstrass_first_derivative_only(self):
        th = weierstrass_trend(
            amplitude=1.0, decay=0.6, lacunarity=3.0, terms=12, horizon=2.0
        )
        d1 = th.derivative(1)
        # the h^2 truncation term carries a (decay * lac^2)^j factor, so the
        # finite difference is only loosely accurate here
        for t in (0.3, 1.1):
            assert d1(t) == pytest.approx(central_diff(th.value, t), abs=5e-3)
        with pytest.raises(DerivativeUnavailable):
            th.derivative(2)

    def test_derivative_order_zero_is_value(self):
        th = sinusoid_trend(offset=0.0, amplitude=1.0, omega=2.0, horizon=1.0)
        assert th.derivative(0)(0.4) == th(0.4)


class TestParser:
    def test_const(self):
        th = parse_trend("const:0.5", horizon=2.0)
        assert th(1.0) == 0.5
        assert th.label == "const:0.5"

    def test_sin(self):
        th = parse_trend("sin:0.5,0.8,3.0", horizon=2.0)
        assert th(0.7) == pytest.approx(0.5 + 0.8 * np.sin(2.1))

    def test_poly(self):
        th = parse_trend("poly:0.2,-0.4,0.1", horizon=2.0)
        assert th(1.5) == pytest.approx(0.2 - 0.6 + 0.225)

    def test_weier(self):
        th = parse_trend("weier:1.0,0.6,3.0,12", horizon=2.0)
        assert th(1.0) == pytest.approx(W_AT_1, abs=1e-14)

    @pytest.mark.parametrize(
        "text",
        [
            "const:",  # missing argument
            "sin:1.0,2.0",  # wrong arity
            "weier:1.0,0.6,3.0,12.5",  # non-integer term count
            "step:1.0",  # unknown kind
            "poly:",  # empty coefficient list
            "const:abc",
        ],
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_trend(text, horizon=2.0)

    def test_error_names_the_kind(self):
        with pytest.raises(ValueError, match="sin"):
            parse_trend("sin:1.0", horizon=2.0)
