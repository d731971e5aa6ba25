import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualgambit.cones import (
    ConeSpec,
    ConeVec,
    Lorentz,
    Orthant,
    Psd,
    XiEvaluator,
    barrier_dual_value,
    barrier_primal_value,
    factorize,
    grad_dual,
    interior_dual,
    local_norm_dual,
    nu,
    prepare_xi,
    xi_eval,
)
from dualgambit.errors import NotInterior

from conftest import MIXED_BLOCKS, random_direction, random_interior

SINGLE = [Orthant(4), Lorentz(5), Psd(4)]
ALL = [ConeSpec([b]) for b in SINGLE] + [ConeSpec(MIXED_BLOCKS)]
IDS = ["orthant", "lorentz", "psd", "mixed"]


def test_nu_and_dimensions():
    cone = ConeSpec([Orthant(3), Lorentz(7), Psd(4)])
    assert nu(cone) == 3 + 2 + 4
    assert cone.dim == 3 + 7 + 16


@pytest.mark.parametrize("cone,expected", [
    (ConeSpec([Orthant(3)]), -3.0),
    (ConeSpec([Psd(4)]), -4.0),
    (ConeSpec([Lorentz(3)]), -2.0 + 2.0 * math.log(2.0)),
])
def test_dual_barrier_at_unit(cone, expected):
    assert barrier_dual_value(cone, cone.unit()) == pytest.approx(expected, abs=1e-15)
    assert barrier_primal_value(cone, cone.unit()) == pytest.approx(0.0, abs=1e-15)


def test_orthant_values():
    cone = ConeSpec([Orthant(2)])
    s = ConeVec([np.array([2.0, 0.5])])
    assert barrier_dual_value(cone, s) == pytest.approx(-2.0)
    assert np.allclose(grad_dual(cone, s)[0], [-0.5, -2.0])


def test_psd_grad_is_negative_inverse(rng):
    cone = ConeSpec([Psd(4)])
    S = random_interior(rng, cone)
    assert np.allclose(grad_dual(cone, S)[0], -np.linalg.inv(S[0]))


@pytest.mark.parametrize("cone,point", [
    (ConeSpec([Orthant(2)]), [np.array([1.0, -1e-12])]),
    (ConeSpec([Lorentz(3)]), [np.array([1.0, 1.0, 0.0])]),
    (ConeSpec([Lorentz(3)]), [np.array([-2.0, 0.0, 0.0])]),
    (ConeSpec([Psd(2)]), [np.array([[1.0, 2.0], [2.0, 1.0]])]),
])
def test_not_interior(cone, point):
    v = ConeVec(point)
    assert not interior_dual(cone, v)
    with pytest.raises(NotInterior):
        factorize(cone, v)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        factorize(ConeSpec([Orthant(3)]), ConeVec([np.ones(2)]))


def test_conevec_algebra():
    a = ConeVec([np.array([1.0, 2.0]), np.eye(2)])
    b = ConeVec([np.array([3.0, -1.0]), 2 * np.eye(2)])
    assert (a + b).dot(a) == pytest.approx(1 * 4 + 2 * 1 + 3 + 3)
    assert (2 * a - a).dot(a) == pytest.approx(a.dot(a))
    assert (a / 2).norm() == pytest.approx(a.norm() / 2)
    assert (-a).flat().tolist() == [-1.0, -2.0, -1.0, -0.0, -0.0, -1.0]


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_gradient_finite_difference(cone, rng):
    for _ in range(5):
        s = random_interior(rng, cone)
        h = random_direction(rng, cone)
        fact = factorize(cone, s)
        eps = 1e-6
        fd = (barrier_dual_value(cone, s + eps * h) - barrier_dual_value(cone, s - eps * h)) / (2 * eps)
        exact = fact.grad().dot(h)
        assert fd == pytest.approx(exact, rel=1e-4, abs=1e-8)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_hessian_finite_difference(cone, rng):
    for _ in range(5):
        s = random_interior(rng, cone)
        h = random_direction(rng, cone)
        k = random_direction(rng, cone)
        eps = 1e-5
        gp = factorize(cone, s + eps * h).grad()
        gm = factorize(cone, s - eps * h).grad()
        fd = (gp - gm).dot(k) / (2 * eps)
        exact = factorize(cone, s).hess(h).dot(k)
        assert fd == pytest.approx(exact, rel=1e-3, abs=1e-7)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_hessian_symmetric_and_inverse(cone, rng):
    s = random_interior(rng, cone)
    fact = factorize(cone, s)
    h, k = random_direction(rng, cone), random_direction(rng, cone)
    assert fact.hess(h).dot(k) == pytest.approx(fact.hess(k).dot(h), rel=1e-12)
    back = fact.hess_inv(fact.hess(h))
    assert np.allclose(back.flat(), h.flat(), rtol=1e-9, atol=1e-9)
    assert local_norm_dual(fact, h) ** 2 == pytest.approx(fact.hess(h).dot(h))
    assert fact.local_norm(h) * fact.local_norm_inv(fact.hess(h)) == pytest.approx(fact.local_norm(h) ** 2)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_homogeneity_identities(cone, rng):
    n = cone.nu
    for _ in range(5):
        x = random_interior(rng, cone)
        fact = factorize(cone, x)
        g = fact.grad()
        # hess F(x) x = -grad F(x)
        assert np.allclose(fact.hess(x).flat(), (-g).flat(), rtol=1e-9, atol=1e-9)
        assert g.dot(x) == pytest.approx(-n, rel=1e-9)
        # |grad F(x)|_x^2 = nu
        assert fact.local_norm_inv(g) ** 2 == pytest.approx(n, rel=1e-9)
        tau = float(np.exp(rng.standard_normal()))
        assert barrier_primal_value(cone, tau * x) == pytest.approx(fact.primal_value() - n * math.log(tau),
                                                                    rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_conjugate_pair_attains_fenchel_bound(cone, rng):
    n = cone.nu
    x = random_interior(rng, cone)
    fact = factorize(cone, x)
    s = -fact.grad()
    total = fact.primal_value() + factorize(cone, s).dual_value()
    assert total == pytest.approx(-n, abs=1e-9)
    # the gradient maps are mutually inverse
    assert np.allclose((-factorize(cone, s).grad()).flat(), x.flat(), rtol=1e-9)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_fenchel_inequality(cone, rng):
    n = cone.nu
    for _ in range(30):
        x = random_interior(rng, cone, spread=1.0)
        s = random_interior(rng, cone, spread=1.0)
        lhs = barrier_primal_value(cone, x) + barrier_dual_value(cone, s)
        rhs = -n * math.log(s.dot(x) / n) - n
        assert lhs >= rhs - 1e-9


def direct_xi(cone, v, dv, alpha):
    f = lambda p: barrier_dual_value(cone, p)
    return f(v + alpha * dv) + f(v - alpha / (1 - alpha) * dv) - 2 * f(v)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_xi_matches_direct(cone, rng):
    for _ in range(5):
        v = random_interior(rng, cone)
        dv = 0.3 * random_direction(rng, cone)
        ev = prepare_xi(factorize(cone, v), dv)
        assert xi_eval(ev, 0.0) == 0.0
        for alpha in (0.05, 0.2, 0.4):
            try:
                ref = direct_xi(cone, v, dv, alpha)
            except NotInterior:
                assert ev(alpha) == math.inf
                continue
            assert ev(alpha) == pytest.approx(ref, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("cone", ALL, ids=IDS)
def test_xi_infinite_outside_domain(cone, rng):
    v = random_interior(rng, cone)
    ev = factorize(cone, v).xi(-100.0 * v)
    assert ev(0.5) == math.inf
    ev = factorize(cone, v).xi(100.0 * v)
    assert ev(0.5) == math.inf  # second point v - 100 v leaves the cone


def test_xi_rejects_bad_alpha(rng):
    cone = ConeSpec([Orthant(2)])
    ev = factorize(cone, cone.unit()).xi(cone.unit())
    with pytest.raises(ValueError):
        ev(1.0)
    with pytest.raises(ValueError):
        ev(-0.1)


def test_xi_zero_direction():
    cone = ConeSpec(MIXED_BLOCKS)
    ev = factorize(cone, cone.unit()).xi(cone.zeros())
    assert all(ev(a) == 0.0 for a in (0.1, 0.5, 0.99))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), alpha=st.floats(0.01, 0.6))
def test_lorentz_single_log_form(seed, alpha):
    rng = np.random.default_rng(seed)
    cone = ConeSpec([Lorentz(4)])
    v = random_interior(rng, cone)
    dv = 0.2 * random_direction(rng, cone)
    ev = factorize(cone, v).xi(dv)
    val = ev(alpha)
    if math.isfinite(val):
        assert ev.parts[0].single_log(alpha) == pytest.approx(val, rel=1e-9, abs=1e-12)


def test_xi_is_nonnegative_and_increasing(rng):
    cone = ConeSpec(MIXED_BLOCKS)
    v = random_interior(rng, cone)
    ev = factorize(cone, v).xi(0.3 * random_direction(rng, cone))
    vals = [ev(a) for a in np.linspace(0.0, 0.9, 40)]
    finite = [x for x in vals if math.isfinite(x)]
    assert all(x >= -1e-12 for x in finite)
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_xi_evaluator_composes_blocks(rng):
    cone = ConeSpec(MIXED_BLOCKS)
    v = random_interior(rng, cone)
    dv = 0.2 * random_direction(rng, cone)
    ev = factorize(cone, v).xi(dv)
    parts = [factorize(ConeSpec([b]), ConeVec([vb])).xi(ConeVec([db]))
             for b, vb, db in zip(cone.blocks, v.blocks, dv.blocks)]
    assert ev(0.3) == pytest.approx(sum(p(0.3) for p in parts))
    assert isinstance(ev, XiEvaluator)
