import json

import numpy as np
import pytest
from hypothesis import given

from conftest import algebras, rel, seeds
from symcone.exceptions import DomainError, StructuralError
from symcone.jordan import (
    DirectSum,
    Element,
    LinMap,
    SpinFactor,
    SymMatrix,
    algebra_from_dict,
    det,
    direct_sum,
    eigenvalues,
    exp,
    in_cone,
    inner,
    inverse,
    jordan_product,
    log,
    log_det,
    multiplication_map,
    norm,
    parse_algebra,
    power,
    quadratic_rep,
    random_element,
    sample_cone,
    spectral,
    sqrt,
    trace,
)


# Matrix-arithmetic oracles for the symmetric-matrix algebra


def test_sym_product_is_symmetrized_matrix_product(rng):
    alg = SymMatrix(4)
    X = rng.standard_normal((4, 4))
    Y = rng.standard_normal((4, 4))
    X, Y = X + X.T, Y + Y.T
    got = alg.to_matrix(jordan_product(alg.from_matrix(X), alg.from_matrix(Y)))
    assert np.allclose(got, 0.5 * (X @ Y + Y @ X), atol=1e-13)


def test_sym_inner_is_trace_form(rng):
    alg = SymMatrix(3)
    X = rng.standard_normal((3, 3))
    Y = rng.standard_normal((3, 3))
    X, Y = X + X.T, Y + Y.T
    assert inner(alg.from_matrix(X), alg.from_matrix(Y)) == pytest.approx(np.trace(X @ Y), abs=1e-12)


def test_sym_quadratic_rep_is_congruence(rng):
    alg = SymMatrix(4)
    X = rng.standard_normal((4, 4))
    Y = rng.standard_normal((4, 4))
    X, Y = X + X.T, Y + Y.T
    got = alg.to_matrix(quadratic_rep(alg.from_matrix(X))(alg.from_matrix(Y)))
    assert np.allclose(got, X @ Y @ X, atol=1e-12)


def test_sym_spectrum_matches_eigvalsh(rng):
    alg = SymMatrix(5)
    X = rng.standard_normal((5, 5))
    X = X + X.T
    x = alg.from_matrix(X)
    assert np.allclose(np.sort(eigenvalues(x)), np.linalg.eigvalsh(X))
    assert det(x) == pytest.approx(np.linalg.det(X), rel=1e-10)
    assert trace(x) == pytest.approx(np.trace(X))


def test_sym_functions_match_matrix_functions(rng):
    from scipy.linalg import expm, sqrtm

    alg = SymMatrix(3)
    A = rng.standard_normal((3, 3))
    S = A @ A.T + np.eye(3)
    s = alg.from_matrix(S)
    assert np.allclose(alg.to_matrix(inverse(s)), np.linalg.inv(S))
    assert np.allclose(alg.to_matrix(sqrt(s)), sqrtm(S).real)
    assert np.allclose(alg.to_matrix(exp(s)), expm(S))
    assert log_det(s) == pytest.approx(np.linalg.slogdet(S)[1])


# Spin-factor oracles in natural coordinates (x0, xbar)


def test_spin_product_and_spectrum(rng):
    alg = SpinFactor(5)
    x = rng.standard_normal(5)
    y = rng.standard_normal(5)
    got = jordan_product(alg.element(x), alg.element(y)).coords
    assert np.allclose(got, np.concatenate([[x @ y], x[0] * y[1:] + y[0] * x[1:]]))
    r = np.linalg.norm(x[1:])
    assert np.allclose(eigenvalues(alg.element(x)), [x[0] + r, x[0] - r])
    assert det(alg.element(x)) == pytest.approx(x[0] ** 2 - r**2)
    assert inner(alg.element(x), alg.element(y)) == pytest.approx(2 * x @ y)


def test_spin_quadratic_rep_closed_form(rng):
    # P(x) y = 2 (x . y) x - det(x) R y with R = diag(1, -1, ..., -1)
    alg = SpinFactor(4)
    x = rng.standard_normal(4)
    y = rng.standard_normal(4)
    R = np.diag([1.0, -1.0, -1.0, -1.0])
    expected = 2 * (x @ y) * x - (x[0] ** 2 - x[1:] @ x[1:]) * (R @ y)
    assert np.allclose(quadratic_rep(alg.element(x))(alg.element(y)).coords, expected)


def test_spin_degenerate_vector_part():
    alg = SpinFactor(3)
    x = alg.element([2.0, 0.0, 0.0])
    sp = spectral(x)
    assert np.allclose(sp.eigenvalues, [2.0, 2.0])
    assert np.allclose(sp.reconstruct().coords, x.coords)
    assert np.allclose(sqrt(x).coords, [np.sqrt(2), 0, 0])


# Algebraic identities on every algebra


@given(algebras, seeds)
def test_jordan_axioms(alg, seed):
    rng = np.random.default_rng(seed)
    x, y = random_element(alg, rng), random_element(alg, rng)
    x2 = jordan_product(x, x)
    assert rel(jordan_product(x, y).coords, jordan_product(y, x).coords) < 1e-12
    lhs = jordan_product(x2, jordan_product(x, y))
    rhs = jordan_product(x, jordan_product(x2, y))
    assert norm(lhs - rhs) <= 1e-11 * (1 + norm(lhs))
    assert rel(jordan_product(alg.e, x).coords, x.coords) < 1e-14


@given(algebras, seeds)
def test_multiplication_is_self_adjoint(alg, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_element(alg, rng) for _ in range(3))
    assert inner(jordan_product(x, y), z) == pytest.approx(inner(y, jordan_product(x, z)), abs=1e-10)
    Lx = multiplication_map(x)
    assert np.allclose(Lx.adjoint().matrix, Lx.matrix, atol=1e-12)


@given(algebras, seeds)
def test_quadratic_rep_definition_and_fundamental_formula(alg, seed):
    rng = np.random.default_rng(seed)
    x, y = sample_cone(alg, rng), sample_cone(alg, rng)
    Lx = multiplication_map(x)
    P = quadratic_rep(x)
    assert (P - (2.0 * (Lx @ Lx) - multiplication_map(jordan_product(x, x)))).norm() <= 1e-11 * P.norm()
    rhs = P @ quadratic_rep(y) @ P
    assert (quadratic_rep(P(y)) - rhs).norm() <= 1e-9 * rhs.norm()


@given(algebras, seeds)
def test_spectral_reconstruction_and_calculus(alg, seed):
    rng = np.random.default_rng(seed)
    x = sample_cone(alg, rng)
    sp = spectral(x)
    assert len(sp.eigenvalues) == alg.rank
    assert rel(sp.reconstruct().coords, x.coords) < 1e-12
    assert np.all(np.diff(sp.eigenvalues) <= 0)
    assert rel(jordan_product(x, inverse(x)).coords, alg.e.coords) < 1e-10
    assert rel(power(x, 0.5).coords, sqrt(x).coords) < 1e-12
    assert rel(exp(log(x)).coords, x.coords) < 1e-10
    assert det(x) == pytest.approx(np.prod(eigenvalues(x)), rel=1e-10)
    assert trace(x) == pytest.approx(np.sum(eigenvalues(x)), rel=1e-10)


@given(algebras, seeds)
def test_quadratic_rep_is_cone_automorphism(alg, seed):
    rng = np.random.default_rng(seed)
    x, y = sample_cone(alg, rng), sample_cone(alg, rng)
    assert in_cone(quadratic_rep(x)(y))
    assert det(quadratic_rep(x)(y)) == pytest.approx(det(x) ** 2 * det(y), rel=1e-8)


def test_direct_sum_acts_blockwise(rng):
    alg = direct_sum(SymMatrix(2), SpinFactor(3))
    x, y = sample_cone(alg, rng), sample_cone(alg, rng)
    got = alg.split(quadratic_rep(x)(y))
    for part_x, part_y, part in zip(alg.split(x), alg.split(y), got):
        assert np.allclose(quadratic_rep(part_x)(part_y).coords, part.coords)
    assert alg.rank == 4 and alg.dim == 6
    assert np.allclose(np.sort(eigenvalues(x)),
                       np.sort(np.concatenate([eigenvalues(p) for p in alg.split(x)])))


def test_nested_sums_flatten():
    alg = direct_sum(SymMatrix(2), direct_sum(SpinFactor(3), SymMatrix(1)))
    assert isinstance(alg, DirectSum)
    assert [str(p) for p in alg.parts] == ["sym:2", "spin:3", "sym:1"]
    assert direct_sum(SymMatrix(3)) == SymMatrix(3)


def test_cone_membership():
    alg = SymMatrix(2)
    assert in_cone(alg.e)
    assert not in_cone(alg.from_matrix(np.diag([1.0, 0.0])))
    assert not in_cone(alg.from_matrix(np.diag([1.0, -1.0])))
    assert in_cone(alg.e, margin=0.5) and not in_cone(alg.e, margin=1.0)


def test_domain_errors_name_the_eigenvalue():
    alg = SpinFactor(3)
    x = alg.element([1.0, 2.0, 0.0])
    with pytest.raises(DomainError) as info:
        log(x)
    assert info.value.eigenvalue == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        inverse(alg.element([1.0, 1.0, 0.0]))
    with pytest.raises(DomainError):
        log_det(x)


def test_structural_errors():
    with pytest.raises(StructuralError):
        jordan_product(SymMatrix(2).e, SpinFactor(3).e)
    with pytest.raises(StructuralError):
        Element(SymMatrix(2), [1.0, 2.0])
    with pytest.raises(StructuralError):
        SymMatrix(0)
    with pytest.raises(StructuralError):
        parse_algebra("herm:3")
    with pytest.raises(StructuralError):
        algebra_from_dict({"kind": "sym"})


@pytest.mark.parametrize("text", ["sym:3", "spin:4", "sum:sym:3,spin:4", "sym:2+spin:3+sym:1"])
def test_algebra_text_and_dict_round_trip(text):
    alg = parse_algebra(text)
    assert parse_algebra(str(alg)) == alg
    assert algebra_from_dict(json.loads(json.dumps(alg.to_dict()))) == alg
    assert algebra_from_dict(text) == alg


def test_element_round_trip(rng):
    alg = direct_sum(SymMatrix(3), SpinFactor(4))
    x = random_element(alg, rng)
    y = Element.from_dict(json.loads(json.dumps(x.to_dict())))
    assert y.algebra == alg and np.array_equal(y.coords, x.coords)
    with pytest.raises(ValueError):
        x.coords[0] = 1.0


def test_linmap_adjoint_is_trace_form_adjoint(rng):
    alg = direct_sum(SymMatrix(2), SpinFactor(3))
    A = LinMap(alg, rng.standard_normal((alg.dim, alg.dim)))
    x, y = random_element(alg, rng), random_element(alg, rng)
    assert inner(A(x), y) == pytest.approx(inner(x, A.adjoint()(y)), abs=1e-12)
    assert np.allclose((A @ A.inv()).matrix, np.eye(alg.dim), atol=1e-10)


def test_sampling_is_seeded():
    alg = direct_sum(SymMatrix(3), SpinFactor(4))
    a = sample_cone(alg, 7)
    b = sample_cone(alg, 7)
    assert np.array_equal(a.coords, b.coords)
    assert np.allclose(sample_cone(alg, 3, spread=0.0).coords, alg.e.coords)
    with pytest.raises(ValueError):
        sample_cone(alg, 0, spread=-1.0)
