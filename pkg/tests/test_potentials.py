from math import factorial, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpcodes.orthopoly import Poly, gegenbauer_expand, integrate
from sharpcodes.potentials import (
    DominationError, NodeMultiset, annihilation_data, case_interpolant, cell600_data,
    cell600_interpolant, cell600_multiset, check_domination, custom, divided_differences,
    domination_excess, exp_potential, hermite_interpolant, log_potential, parse_potential, riesz,
    second_level_interpolant, trunc_exp,
)
from sharpcodes.quadrature import pulb_case_i, pulb_case_ii, pulb_value, skip1add2

ABS_MONOTONE = ["riesz:1", "riesz:2", "riesz:3", "log", "exp:1", "exp:2.5"]


def poly_potential(coeffs):
    p = Poly(coeffs)
    return custom(p, p.deriv(), "custom", name="poly")


@pytest.mark.parametrize("spec", ABS_MONOTONE + ["riesz:-1", "trunc_exp:1", "trunc_exp:0.5:9"])
def test_derivative_matches_finite_differences(spec):
    h = parse_potential(spec)
    t = np.random.default_rng(1).uniform(-0.99, 0.9, 50)
    e = 1e-6
    fd = (h(t + e) - h(t - e)) / (2 * e)
    assert np.allclose(h.d(t), fd, rtol=1e-6, atol=1e-8)


def test_kernel_formulas():
    assert riesz(2)(0.5) == pytest.approx(1.0)
    assert riesz(1)(-1.0) == pytest.approx(0.5)
    assert riesz(-1)(-1.0) == pytest.approx(2.0)
    assert log_potential()(0.0) == pytest.approx(-0.5 * np.log(2))
    assert exp_potential(2)(0.5) == pytest.approx(np.e)
    assert trunc_exp(1)(1.0) == pytest.approx(sum(1 / factorial(i) for i in range(16)))
    assert riesz(1).sign_case == "abs_monotone" and riesz(-1).sign_case == "case_ii"


def test_singular_kernels_clamp_at_one():
    h = riesz(1)
    assert np.isfinite(h(1.0))
    assert h.singular and not riesz(-1).singular


@pytest.mark.parametrize("bad", ["riesz", "riesz:x", "gauss:1", "log:2", "riesz:0", ""])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_potential(bad)


def test_parse_roundtrip_spec():
    for s in ("riesz:1", "riesz:-1", "log", "exp:1", "trunc_exp:1"):
        assert parse_potential(s).spec == s


def test_divided_differences_trivial():
    sq = poly_potential([0, 0, 1])
    assert np.allclose(divided_differences(sq, NodeMultiset((0.0, 1.0), (1, 1))), [0, 1])
    c = 0.3
    assert np.allclose(divided_differences(sq, NodeMultiset((c,), (2,))), [c * c, 2 * c])


def test_multiplicity_above_two_rejected():
    with pytest.raises(ValueError):
        NodeMultiset((0.0,), (3,))


def test_divided_differences_icosahedron_nonnegative():
    b = skip1add2(3, 3).nodes
    d = divided_differences(riesz(1), NodeMultiset(tuple(b), (2,) * 4))
    assert np.all(d >= -1e-12)


@pytest.mark.parametrize("spec", ABS_MONOTONE)
@pytest.mark.parametrize("n,tau", [(3, 5), (8, 7), (24, 11), (4, 3), (22, 4)])
def test_divided_differences_nonnegative_case_i(spec, n, tau):
    h = parse_potential(spec)
    nodes = pulb_case_i(n, tau).nodes
    # order 0 is h itself, which may be negative (log)
    assert np.all(divided_differences(h, NodeMultiset.interior_doubled(nodes))[1:] >= -1e-12)


def test_hermite_single_node_constant():
    H = hermite_interpolant(riesz(1), NodeMultiset((0.2,), (1,)))
    assert H.degree == 0 and H(0.7) == pytest.approx(riesz(1)(0.2))


@settings(max_examples=30, deadline=None)
@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=8))
def test_hermite_reproduces_polynomials(coeffs):
    h = poly_potential(coeffs)
    nodes = (-0.9, -0.3, 0.2, 0.8)
    H = hermite_interpolant(h, NodeMultiset(nodes, (2, 2, 2, 2)))
    t = np.linspace(-1, 1, 21)
    assert np.allclose(H(t), h(t), atol=1e-10)


def test_hermite_interpolates_values_and_slopes():
    h = riesz(3)
    nodes = (-0.8, -0.1, 0.5)
    H = hermite_interpolant(h, NodeMultiset(nodes, (2, 2, 2)))
    x = np.array(nodes)
    assert np.allclose(H(x), h(x), rtol=1e-9)
    assert np.allclose(H.deriv()(x), h.d(x), rtol=1e-9)


def test_case_i_interpolant_n3_tau3_dominated():
    h = riesz(3)
    H = case_interpolant(3, 3, "i", h)
    assert H.degree == 3
    assert domination_excess(H, h)[0] <= 1e-9


def test_case_i_icosahedron_bound_from_interpolant():
    h = riesz(1)
    H = case_interpolant(3, 5, "i", h)
    assert 12 * integrate(3, H) == pytest.approx(pulb_value(pulb_case_i(3, 5), h, 12), rel=1e-12)


def test_case_ii_interpolant_dominated():
    h = riesz(-1)
    for n, tau in [(8, 7), (3, 5), (23, 7), (6, 4)]:
        H = case_interpolant(n, tau, "ii", h)
        assert domination_excess(H, h)[0] <= 1e-9
        N = {7: 240, 5: 12, 4: 27}.get(tau, 4600)
        assert N * integrate(n, H) == pytest.approx(pulb_value(pulb_case_ii(n, tau), h, N), rel=1e-10)


def test_case_ii_rejects_singular_kernel():
    with pytest.raises(ValueError):
        case_interpolant(3, 5, "ii", riesz(1))


def test_linear_interpolant_is_exact():
    h = poly_potential([0.3, 2.0])
    H = case_interpolant(4, 1, "i", h)
    assert np.allclose(H.coeffs, [0.3, 2.0])


@pytest.mark.parametrize("n,k,e", [(3, 3, 128 / 3465), (8, 4, 143 / 2048), (24, 6, 516925 / 5292032)])
def test_annihilation_constants(n, k, e):
    _, _, _, e2k = annihilation_data(n, k, riesz(1))
    assert e2k == pytest.approx(e, rel=1e-12)


def test_h6_explicit_formula():
    h = riesz(1)
    b = skip1add2(3, 3).nodes
    d = divided_differences(h, NodeMultiset(tuple(b), (2,) * 4))
    _, _, h6, _ = annihilation_data(3, 3, h)
    ref = 16 / 231 * d[6] + 16 * sqrt(75 + 30 * sqrt(5)) / 3465 * d[7]
    assert h6 == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("spec", ["riesz:1", "riesz:2", "riesz:3", "exp:1", "log"])
@pytest.mark.parametrize("n,k,N", [(3, 3, 12), (8, 4, 240), (24, 6, 196560)])
def test_second_level_interpolant_properties(spec, n, k, N):
    h = parse_potential(spec)
    G = second_level_interpolant(n, k, h)
    r = skip1add2(n, k)
    assert abs(gegenbauer_expand(n, G)[2 * k]) <= 1e-10
    assert np.allclose(G(r.nodes), h(r.nodes), rtol=1e-9)
    assert np.allclose(G.deriv()(r.nodes), h.d(r.nodes), rtol=1e-7)
    assert integrate(n, G) == pytest.approx(r.apply(h), rel=1e-10)


def test_domination_error_carries_point():
    h = riesz(1)
    too_high = Poly([10.0])
    with pytest.raises(DominationError) as ei:
        check_domination(too_high, h)
    assert -1 <= ei.value.t <= 1 and ei.value.excess > 0


def test_cell600_constants():
    g, g16, g12, e12 = cell600_data(trunc_exp(1))
    assert e12 == pytest.approx(13 / 16384, rel=1e-12)
    assert cell600_multiset().expanded().size == 16


def test_cell600_interpolant_properties():
    h = trunc_exp(1)
    H = cell600_interpolant(h)
    assert H.degree == 16
    assert abs(gegenbauer_expand(4, H)[12]) <= 1e-10
    x = np.array(cell600_multiset().nodes)
    assert np.allclose(H(x), h(x), rtol=1e-10)


def test_cell600_constant_and_odd():
    c = custom(lambda t: 0 * t + 1.5, lambda t: 0 * t, "custom")
    H = cell600_interpolant(c)
    assert np.allclose(H(np.linspace(-1, 1, 9)), 1.5)
    lin = custom(lambda t: t, lambda t: 0 * t + 1.0, "custom")
    assert 120 * integrate(4, cell600_interpolant(lin)) == pytest.approx(0.0, abs=1e-12)


def test_cell600_rejects_large_truncated_exponential():
    with pytest.raises(DominationError):
        cell600_interpolant(trunc_exp(4))


def test_cell600_rejects_negative_square_root_surrogate():
    # -(2-2t)^(1/2) has a positive 16th derivative, outside the construction's hypotheses
    s = custom(lambda t: 2 - np.sqrt(2 - 2 * t), lambda t: 1 / np.sqrt(2 - 2 * t), "custom")
    with pytest.raises(DominationError):
        cell600_interpolant(s)


def test_cell600_rejects_decreasing_kernel():
    with pytest.raises(ValueError):
        cell600_interpolant(riesz(-1))
