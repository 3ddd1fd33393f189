import warnings

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given

from conftest import algebras, rel, seeds
from symcone.exceptions import DomainError, NearBoundaryWarning
from symcone.geometry import (
    GeodesicQuery,
    geodesic,
    geometric_mean,
    require_cone,
    riemannian_distance,
    scaling_point,
    scaling_residual,
)
from symcone.jordan import SpinFactor, SymMatrix, inverse, norm, quadratic_rep, sample_cone
from symcone.verification import random_automorphism, random_spd


def _sqrtm(A):
    return sla.sqrtm(A).real


def test_geometric_mean_matches_matrix_formula():
    alg = SymMatrix(4)
    A = random_spd(4, 1)
    B = random_spd(4, 2)
    Ah = _sqrtm(A)
    Aih = np.linalg.inv(Ah)
    expected = Ah @ _sqrtm(Aih @ B @ Aih) @ Ah
    got = alg.to_matrix(geometric_mean(alg.from_matrix(A), alg.from_matrix(B)))
    assert rel(got, expected) < 1e-10
    # Riccati characterization X A^(-1) X = B
    assert rel(got @ np.linalg.solve(A, got), B) < 1e-10


def test_distance_matches_generalized_eigenvalues():
    alg = SymMatrix(3)
    A = random_spd(3, 5)
    B = random_spd(3, 6)
    lam = sla.eigh(B, A, eigvals_only=True)
    expected = np.sqrt(np.sum(np.log(lam) ** 2))
    assert riemannian_distance(alg.from_matrix(A), alg.from_matrix(B)) == pytest.approx(expected, rel=1e-10)


def test_spin_mean_of_jointly_diagonal_points():
    # points sharing a Jordan frame: eigenvalues of the mean are sqrt(lambda_i mu_i)
    alg = SpinFactor(3)
    u = np.array([0.6, 0.8])
    a = alg.element(np.concatenate([[(4.0 + 1.0) / 2], (4.0 - 1.0) / 2 * u]))
    b = alg.element(np.concatenate([[(9.0 + 16.0) / 2], (9.0 - 16.0) / 2 * u]))
    m = geometric_mean(a, b)
    expected = np.concatenate([[(6.0 + 4.0) / 2], (6.0 - 4.0) / 2 * u])
    assert np.allclose(m.coords, expected)


@given(algebras, seeds)
def test_mean_identities(alg, seed):
    rng = np.random.default_rng(seed)
    a, b = sample_cone(alg, rng), sample_cone(alg, rng)
    m = geometric_mean(a, b)
    assert rel(quadratic_rep(m)(inverse(a)).coords, b.coords) < 1e-9
    assert rel(geometric_mean(b, a).coords, m.coords) < 1e-9
    assert rel(geometric_mean(a, inverse(a)).coords, alg.e.coords) < 1e-9
    assert rel(geometric_mean(a, a).coords, a.coords) < 1e-12


@given(algebras, seeds)
def test_mean_is_equivariant(alg, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (sample_cone(alg, rng) for _ in range(3))
    g = random_automorphism(alg, rng) @ quadratic_rep(c)
    assert rel(geometric_mean(g(a), g(b)).coords, g(geometric_mean(a, b)).coords) < 1e-8


@given(algebras, seeds)
def test_distance_metric_properties(alg, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (sample_cone(alg, rng) for _ in range(3))
    dab = riemannian_distance(a, b)
    assert dab == pytest.approx(riemannian_distance(b, a), rel=1e-9, abs=1e-12)
    assert riemannian_distance(a, a) < 1e-12
    assert dab <= riemannian_distance(a, c) + riemannian_distance(c, b) + 1e-9
    assert riemannian_distance(inverse(a), inverse(b)) == pytest.approx(dab, rel=1e-8, abs=1e-12)
    P = quadratic_rep(c)
    assert riemannian_distance(P(a), P(b)) == pytest.approx(dab, rel=1e-8, abs=1e-12)


@given(algebras, seeds)
def test_geodesic_is_constant_speed(alg, seed):
    rng = np.random.default_rng(seed)
    a, b = sample_cone(alg, rng), sample_cone(alg, rng)
    d = riemannian_distance(a, b)
    assert rel(geodesic(a, b, 0.0).coords, a.coords) < 1e-12
    assert rel(geodesic(a, b, 1.0).coords, b.coords) < 1e-10
    for t in (0.25, 0.5, 0.8):
        g = geodesic(a, b, t)
        assert riemannian_distance(a, g) == pytest.approx(t * d, rel=1e-8, abs=1e-10)
        assert riemannian_distance(g, b) == pytest.approx((1 - t) * d, rel=1e-8, abs=1e-10)


@given(algebras, seeds)
def test_scaling_point_maps_x_to_s(alg, seed):
    rng = np.random.default_rng(seed)
    x, s = sample_cone(alg, rng), sample_cone(alg, rng)
    w = scaling_point(x, s)
    assert scaling_residual(w, x, s) < 1e-10
    assert rel(w.coords, geometric_mean(x, inverse(s)).coords) < 1e-9
    assert rel(quadratic_rep(w)(s).coords, x.coords) < 1e-10


def test_geodesic_query():
    alg = SymMatrix(2)
    q = GeodesicQuery(alg.e, 4.0 * alg.e, 0.5)
    assert np.allclose(q.evaluate().coords, 2.0 * alg.e.coords)
    with pytest.raises(DomainError):
        GeodesicQuery(alg.e, -alg.e, 0.5)


def test_boundary_handling():
    alg = SymMatrix(2)
    with pytest.raises(DomainError):
        geometric_mean(alg.e, alg.from_matrix(np.diag([1.0, 0.0])))
    near = alg.from_matrix(np.diag([1.0, 1e-13]))
    with pytest.warns(NearBoundaryWarning):
        require_cone(near)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        require_cone(alg.from_matrix(np.diag([1.0, 1e-6])))
    assert norm(alg.e) == pytest.approx(np.sqrt(2))
