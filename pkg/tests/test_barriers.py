import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from conftest import algebras, rel, seeds
from symcone.barriers import (
    BarrierSpec,
    barrier_gradient,
    barrier_hessian,
    barrier_scaling_point,
    barrier_value,
    check_self_scaled,
    conjugate_spec,
    conjugate_value,
    newton_decrement_sq,
    perturbed_decrement_bound,
    random_spec,
    upsilon,
    upsilon_residual,
)
from symcone.exceptions import DomainError, StructuralError
from symcone.geometry import scaling_point
from symcone.jordan import (
    SpinFactor,
    SymMatrix,
    direct_sum,
    inner,
    inverse,
    quadratic_rep,
    random_element,
    sample_cone,
)

weights = st.floats(min_value=0.3, max_value=5.0)


def test_value_is_weighted_log_det():
    alg = direct_sum(SymMatrix(3), SpinFactor(4))
    rng = np.random.default_rng(0)
    x = sample_cone(alg, rng)
    spec = BarrierSpec(alg, 0.7, (2.0, 3.0))
    X, v = alg.split(x)
    expected = 0.7 - 2.0 * np.linalg.slogdet(SymMatrix(3).to_matrix(X))[1]
    expected -= 3.0 * np.log(v.coords[0] ** 2 - v.coords[1:] @ v.coords[1:])
    assert barrier_value(spec, x) == pytest.approx(expected, rel=1e-12)
    assert spec.nu == pytest.approx(2.0 * 3 + 3.0 * 2)


@given(algebras, seeds)
def test_gradient_and_hessian_match_finite_differences(alg, seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(alg, rng, low=0.5, high=3.0)
    x = sample_cone(alg, rng, spread=0.5)
    d = random_element(alg, rng)
    h = 1e-5
    fd = (barrier_value(spec, x + h * d) - barrier_value(spec, x - h * d)) / (2 * h)
    assert fd == pytest.approx(inner(barrier_gradient(spec, x), d), rel=1e-6, abs=1e-6)
    fd_grad = (barrier_gradient(spec, x + h * d) - barrier_gradient(spec, x - h * d)) / (2 * h)
    assert rel(fd_grad.coords, barrier_hessian(spec, x)(d).coords) < 1e-6


def test_conjugate_matches_numerical_maximization():
    # sup_x -<x, s> - H(x) over 2x2 positive definite x = L L^T
    alg = SymMatrix(2)
    spec = BarrierSpec(alg, 0.3, (2.5,))
    s = alg.from_matrix(np.array([[2.0, 0.4], [0.4, 1.0]]))

    def neg_objective(p):
        L = np.array([[p[0], 0.0], [p[1], p[2]]])
        x = alg.from_matrix(L @ L.T)
        return inner(x, s) + barrier_value(spec, x)

    best = min(
        (minimize(neg_objective, p0, method="Nelder-Mead",
                  options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
         for p0 in ([1.0, 0.0, 1.0], [2.0, -0.5, 1.5])),
        key=lambda r: r.fun,
    )
    assert conjugate_value(spec, s) == pytest.approx(-best.fun, abs=1e-8)


@given(algebras, seeds)
def test_conjugate_is_an_involution(alg, seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(alg, rng, low=0.5, high=3.0)
    twice = conjugate_spec(conjugate_spec(spec))
    assert twice.weights == spec.weights
    assert twice.c0 == pytest.approx(spec.c0, abs=1e-12)
    # maximizer x = c s^(-1) attains the sup; a perturbation does not beat it
    s = sample_cone(alg, rng)
    xs = alg.join([c * inverse(si) for c, si in zip(spec.weights, alg.split(s))])
    at_max = -inner(xs, s) - barrier_value(spec, xs)
    assert at_max == pytest.approx(conjugate_value(spec, s), rel=1e-10, abs=1e-10)
    other = quadratic_rep(sample_cone(alg, rng, spread=0.1))(xs)
    assert -inner(other, s) - barrier_value(spec, other) <= at_max + 1e-9


@given(algebras, seeds)
def test_family_scaling_point_and_upsilon(alg, seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(alg, rng)
    x, s = sample_cone(alg, rng), sample_cone(alg, rng)
    rep = barrier_scaling_point(spec, x, s)
    assert rep.residual < 1e-9
    assert rel(barrier_hessian(spec, rep.w)(x).coords, s.coords) < 1e-9
    y = upsilon(spec, x)
    assert upsilon_residual(spec, x, y) < 1e-9
    assert rel(upsilon(spec, rep.w).coords, scaling_point(x, s).coords) < 1e-9


@given(algebras, seeds)
def test_hessian_factorization(alg, seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(alg, rng)
    x, s = sample_cone(alg, rng), sample_cone(alg, rng)
    w = barrier_scaling_point(spec, x, s).w
    Hw = barrier_hessian(spec, w)
    rhs = Hw @ barrier_hessian(spec, s) @ Hw
    assert (barrier_hessian(spec, x) - rhs).norm() <= 1e-8 * rhs.norm()


@given(algebras, seeds, weights)
def test_newton_decrement_equals_nu(alg, seed, c):
    rng = np.random.default_rng(seed)
    spec = BarrierSpec(alg, 0.0, (c,) * len(alg.parts))
    x = sample_cone(alg, rng)
    assert newton_decrement_sq(spec, x) == pytest.approx(spec.nu, abs=1e-9)


def test_self_scaled_check_accepts_weights_at_least_one():
    alg = direct_sum(SymMatrix(2), SpinFactor(3))
    rep = check_self_scaled(BarrierSpec(alg, 0.5, (1.0, 2.0)), trials=100)
    assert rep.passed and rep.max_violation < 1e-9
    assert rep.details["axiom_a"] == 0.0


def test_self_scaled_check_rejects_small_weights():
    rep = check_self_scaled(BarrierSpec(SymMatrix(3), 0.0, (0.5,)), trials=20)
    assert not rep.passed
    assert rep.details["weights_at_least_one"] is False


def test_self_scaled_check_is_seeded():
    spec = BarrierSpec(SpinFactor(4), 0.0, (1.5,))
    a = check_self_scaled(spec, trials=30, seed=9)
    b = check_self_scaled(spec, trials=30, seed=9)
    assert a.to_json() == b.to_json()


def test_perturbed_bound_is_a_lower_bound():
    # the squared decrement of lam F + <Y, .> at X is |X^(1/2) Y X^(1/2) - lam I|_F^2 / lam
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        alg = SymMatrix(n)
        for _ in range(20):
            lam = rng.uniform(0.5, 3.0)
            X = sample_cone(alg, rng)
            Y = random_element(alg, rng)
            Xm, Ym = alg.to_matrix(X), alg.to_matrix(Y)
            w, Q = np.linalg.eigh(Xm)
            Xh = (Q * np.sqrt(w)) @ Q.T
            exact = np.linalg.norm(Xh @ Ym @ Xh - lam * np.eye(n)) ** 2 / lam
            bound = perturbed_decrement_bound(X, Y, lam)
            if np.sqrt(np.trace(Xm @ Ym @ Xm @ Ym)) >= lam * np.sqrt(n):
                assert bound <= exact * (1 + 1e-12) + 1e-12


def test_perturbed_bound_without_perturbation_is_nu():
    alg = SymMatrix(3)
    for t in (1.0, 10.0, 1e3):
        assert perturbed_decrement_bound(t * alg.e, alg.zeros(), 2.0) == pytest.approx(6.0, rel=1e-15)


def test_perturbed_bound_grows_along_rays():
    alg = SymMatrix(3)
    Y = alg.from_matrix(np.diag([0.1, 0.0, 0.0]))
    vals = [perturbed_decrement_bound(t * alg.e, Y, 1.0) for t in (10, 100, 1000)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 10 * 3


def test_spec_validation_and_errors():
    alg = direct_sum(SymMatrix(2), SpinFactor(3))
    with pytest.raises(StructuralError):
        BarrierSpec(alg, 0.0, (1.0,))
    with pytest.raises(ValueError):
        BarrierSpec(SymMatrix(2), 0.0, (-1.0,))
    with pytest.raises(DomainError):
        barrier_value(BarrierSpec(SymMatrix(2)), -SymMatrix(2).e)
    with pytest.raises(StructuralError):
        barrier_value(BarrierSpec(SymMatrix(2)), SpinFactor(3).e)
    with pytest.raises(StructuralError):
        perturbed_decrement_bound(SpinFactor(3).e, SpinFactor(3).e, 1.0)
    spec = BarrierSpec(alg, 0.25, (1.5, 2.0))
    assert BarrierSpec.from_dict(spec.to_dict()) == spec
