"""Numerical certificates for the classification of self-scaled barriers.

The routines here make the moving parts of the argument computable:
polar decomposition of cone automorphisms, the factorization of
non-defective matrices into two positive definite factors, the rotations
``N^(-1) (N N^T)^(1/2)`` they generate, the rank of the Lie span of those
rotations, and invariance (isotropy) tests built on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .barriers import barrier_hessian
from .exceptions import DomainError, NotInKError, StructuralError
from .geometry import geometric_mean
from .jordan import (
    Algebra,
    Element,
    LinMap,
    SymMatrix,
    _sym_basis,
    _svec,
    as_generator,
    in_cone,
    inverse,
    norm,
    quadratic_rep,
    sample_cone,
    spectral_map,
)
from .reports import CheckReport

DEFECT_COND = 1e8
SPAN_RTOL = 1e-10


###############################################################################
# Small dense helpers


def sym_function(A: np.ndarray, f) -> np.ndarray:
    """``f(A)`` for a symmetric matrix through its eigendecomposition."""
    A = 0.5 * (A + A.T)
    w, Q = np.linalg.eigh(A)
    return (Q * f(w)) @ Q.T


def sqrtm_spd(A: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(0.5 * (A + A.T))
    if w.min() < 0:
        raise DomainError(f"matrix square root of a matrix with eigenvalue {float(w.min())!r}",
                          eigenvalue=float(w.min()))
    return (Q * np.sqrt(w)) @ Q.T


def is_spd(A: np.ndarray, atol: float = 1e-10) -> bool:
    """Symmetric to ``atol`` (relative) and Cholesky-factorizable."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    if np.linalg.norm(A - A.T) > atol * max(np.linalg.norm(A), 1.0):
        return False
    try:
        np.linalg.cholesky(0.5 * (A + A.T))
    except np.linalg.LinAlgError:
        return False
    return True


def random_orthogonal(n: int, seed=None, proper: bool = False) -> np.ndarray:
    """Haar-distributed orthogonal matrix; ``proper=True`` forces det +1."""
    rng = as_generator(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if proper and np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_spd(n: int, seed=None, spread: float = 1.0) -> np.ndarray:
    alg = SymMatrix(n)
    return alg.to_matrix(sample_cone(alg, seed, spread))


def sample_k(n: int, seed=None, spread: float = 1.0) -> np.ndarray:
    """Random element of K: a product of two random SPD matrices."""
    rng = as_generator(seed)
    return random_spd(n, rng, spread) @ random_spd(n, rng, spread)


###############################################################################
# Cone automorphisms and the polar decomposition


def conjugation_map(algebra: SymMatrix, Q: np.ndarray) -> LinMap:
    """The automorphism ``Y -> Q Y Q^T`` of the positive definite cone."""
    B = _sym_basis(algebra.n)
    return LinMap(algebra, _svec(Q @ B @ Q.T, algebra.n).T)


def random_automorphism(algebra: Algebra, seed=None) -> LinMap:
    """Random orthogonal automorphism of the cone.

    Conjugations by orthogonal matrices on symmetric blocks, rotations of
    the vector part on spin blocks.
    """
    rng = as_generator(seed)
    blocks = []
    for p in algebra.parts:
        if p.kind == "sym":
            blocks.append(conjugation_map(p, random_orthogonal(p.n, rng)).matrix)
        else:
            R = np.eye(p.d)
            R[1:, 1:] = random_orthogonal(p.d - 1, rng)
            blocks.append(R)
    return LinMap(algebra, block_diag(*blocks))


def _self_adjoint_function(M: np.ndarray, metric: np.ndarray, f) -> np.ndarray:
    """``f(M)`` for ``M`` self-adjoint in the metric ``diag(metric)``."""
    g = np.sqrt(metric)
    T = (g[:, None] * M) / g[None, :]
    F = sym_function(T, f)
    return (F / g[:, None]) * g[None, :]


def operator_sqrt(A: LinMap) -> LinMap:
    """Square root of a self-adjoint positive semidefinite map."""
    return LinMap(A.algebra, _self_adjoint_function(A.matrix, A.algebra.metric,
                                                    lambda v: np.sqrt(np.maximum(v, 0.0))))


@dataclass(frozen=True)
class PolarResult:
    """``theta = omega o F''(w)`` with ``omega`` orthogonal."""

    omega: LinMap
    w: Element
    residual: float
    orthogonality: float


def polar_decompose(theta: LinMap) -> PolarResult:
    """Polar decomposition of a cone automorphism.

    ``S = (theta* theta)^(1/2)`` equals ``P(w^(-1))``, so ``S(e) = w^(-2)``
    determines ``w``, and ``omega = theta S^(-1)``.  Both factors come from
    one singular value decomposition of ``theta`` in orthonormal coordinates.

    Parameters
    ----------
    theta : LinMap
        An automorphism of the cone.

    Returns
    -------
    PolarResult
        ``residual`` is ``|theta - omega P(w^(-1))| / |theta|`` and
        ``orthogonality`` is ``|omega* omega - id|``.

    Raises
    ------
    StructuralError
        If ``theta`` is singular.
    DomainError
        If ``S(e)`` is not a cone point, i.e. ``theta`` does not preserve
        the cone.
    """
    alg = theta.algebra
    T = theta.matrix
    g = np.sqrt(alg.metric)
    # orthonormal coordinates; SVD avoids squaring the condition number
    U, sigma, Vt = np.linalg.svd((g[:, None] * T) / g[None, :])
    if sigma[-1] <= sigma[0] * alg.dim * np.finfo(float).eps:
        raise StructuralError("theta is singular")
    S = ((Vt.T * sigma) @ Vt / g[:, None]) * g[None, :]
    se = Element(alg, S @ alg.e.coords)
    if not in_cone(se):
        raise DomainError("theta is not a cone automorphism: S(e) is outside the cone")
    w = spectral_map(se, lambda v: v ** -0.5)
    omega = LinMap(alg, ((U @ Vt) / g[:, None]) * g[None, :])
    recon = omega @ quadratic_rep(inverse(w))
    residual = (theta - recon).norm() / theta.norm()
    orth = (omega.adjoint() @ omega - LinMap.identity(alg)).norm()
    return PolarResult(omega, w, float(residual), float(orth))


###############################################################################
# The set K of non-defective matrices with positive spectrum


def _k_eig(N, cond_max=DEFECT_COND):
    N = np.asarray(N, dtype=float)
    if N.ndim != 2 or N.shape[0] != N.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {N.shape}")
    vals, P = np.linalg.eig(N)
    scale = max(np.abs(vals).max(), np.finfo(float).tiny)
    if np.iscomplexobj(vals):
        if np.abs(vals.imag).max() > 1e-12 * scale:
            raise NotInKError("not in K: complex eigenvalues")
        vals, P = vals.real, P.real
    if vals.min() <= 0:
        raise NotInKError(f"not in K: eigenvalue {float(vals.min())!r} is not positive",
                          eigenvalue=float(vals.min()))
    P = P / np.linalg.norm(P, axis=0)
    if np.linalg.cond(P) > cond_max:
        raise NotInKError("not in K: matrix is defective (ill-conditioned eigenvectors)")
    return vals, P


def in_k(N, cond_max=DEFECT_COND) -> bool:
    """Real positive spectrum and a well-conditioned eigenvector basis."""
    try:
        _k_eig(N, cond_max)
    except NotInKError:
        return False
    return True


def factor_nondefective(N) -> tuple[np.ndarray, np.ndarray]:
    """Write ``N = X S`` with ``X``, ``S`` symmetric positive definite.

    With ``N = P D P^(-1)`` (unit-length eigenvectors), ``X = P P^T`` and
    ``S = P^(-T) D P^(-1)``.

    Raises
    ------
    NotInKError
        Complex or non-positive eigenvalues, or eigenvector matrix with
        condition number above ``1e8``.
    """
    vals, P = _k_eig(N)
    Pinv = np.linalg.inv(P)
    X = P @ P.T
    S = (Pinv.T * vals) @ Pinv
    return 0.5 * (X + X.T), 0.5 * (S + S.T)


def rotation_from(N) -> np.ndarray:
    """The special orthogonal matrix ``N^(-1) (N N^T)^(1/2)`` for ``N`` in K."""
    _k_eig(N)
    # N = U S V^T gives N^(-1) (N N^T)^(1/2) = V U^T, orthogonal to rounding
    U, _, Vt = np.linalg.svd(np.asarray(N, dtype=float))
    return Vt.T @ U.T


def skew_vector(A: np.ndarray) -> np.ndarray:
    """Upper-triangle coordinates of the skew part ``A^T - A``."""
    iu = np.triu_indices(A.shape[0], 1)
    return (A.T - A)[iu]


def skew_span_dimension(mats) -> int:
    """Dimension of the span of ``{A^T - A}`` (SVD rank, threshold ``1e-10 sigma_max``)."""
    vecs = np.array([skew_vector(np.asarray(A, dtype=float)) for A in mats])
    if vecs.size == 0:
        return 0
    sv = np.linalg.svd(vecs, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > SPAN_RTOL * sv[0]))


@dataclass(frozen=True)
class LieSpanReport:
    n: int
    samples_used: int
    span_dimension: int
    target: int

    @property
    def full(self) -> bool:
        return self.span_dimension == self.target


def lie_span_probe(n: int, samples: int = 100, seed=0) -> LieSpanReport:
    """Rank of the span of skew parts ``D^T - D`` over random ``D`` in K.

    Sampling stops as soon as the span reaches ``n(n-1)/2``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = as_generator(seed)
    target = n * (n - 1) // 2
    deltas, dim = [], 0
    for k in range(samples):
        deltas.append(sample_k(n, rng))
        dim = skew_span_dimension(deltas)
        if dim == target:
            break
    return LieSpanReport(n=n, samples_used=len(deltas), span_dimension=dim, target=target)


def rotation_generators(n: int, count: int = 10, seed=0) -> list:
    """Rotations ``N^(-1) (N N^T)^(1/2)`` for random ``N`` in K."""
    rng = as_generator(seed)
    return [rotation_from(sample_k(n, rng)) for _ in range(count)]


_SEED_P = np.array([[1.0, 0.0], [2.0, 1.0]])
_SEED_D = np.diag([0.5, 1.0])


def _swap(n, a, b):
    P = np.eye(n)
    P[[a, b]] = P[[b, a]]
    return P


def basis_skew_generator(i: int, j: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Element of K whose skew part is the basis matrix ``e_i e_j^T - e_j e_i^T``.

    Built from the 2x2 seed ``P^(-1) D P`` with ``P = [[1, 0], [2, 1]]`` and
    ``D = diag(1/2, 1)``, padded with the identity and moved into rows and
    columns ``i, j`` by transpositions.  Indices are 1-based, ``1 <= i < j <= n``.

    Returns
    -------
    Delta : ndarray
        The element of K (validated).
    skew : ndarray
        ``Delta^T - Delta``.
    """
    if not (1 <= i < j <= n):
        raise StructuralError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    pad = np.eye(n)
    left, mid, right = pad.copy(), pad.copy(), pad.copy()
    left[:2, :2] = np.linalg.inv(_SEED_P)
    mid[:2, :2] = _SEED_D
    right[:2, :2] = _SEED_P
    perm = _swap(n, 0, i - 1) @ _swap(n, 1, j - 1)
    Delta = (perm @ left) @ mid @ (right @ perm.T)
    _k_eig(Delta)
    return Delta, Delta.T - Delta


def isotropy_certificate(M, generators, words: int = 32, max_len: int = 4, seed=0) -> float:
    """Largest relative change ``|R M R^T - M| / |M|`` over the generators and
    random words of length at most ``max_len`` in them.

    Zero certifies invariance of ``M`` under the group the generators produce.
    """
    M = np.asarray(M, dtype=float)
    gens = [np.asarray(R, dtype=float) for R in generators]
    if not gens:
        raise ValueError("need at least one generator")
    rng = as_generator(seed)
    candidates = list(gens)
    for _ in range(words):
        length = int(rng.integers(2, max_len + 1))
        idx = rng.integers(0, len(gens), size=length)
        R = np.eye(M.shape[0])
        for k in idx:
            R = R @ gens[k]
        candidates.append(R)
    scale = np.linalg.norm(M)
    return float(max(np.linalg.norm(R @ M @ R.T - M) / scale for R in candidates))


def scalar_part(M) -> float:
    """Minimizer of ``|M - lambda I|_F`` over ``lambda``."""
    M = np.asarray(M, dtype=float)
    return float(np.trace(M) / M.shape[0])


###############################################################################
# Hessian-ratio and alpha mechanisms


def hessian_ratio_deviation(spec, x: Element) -> float:
    """``|H''(x) F''(x)^(-1) - c id| / c`` for a spec with one component of weight ``c``."""
    if len(spec.weights) != 1:
        raise StructuralError("ratio certificate needs an irreducible algebra")
    c = spec.weights[0]
    H = barrier_hessian(spec, x).matrix
    F = barrier_hessian(spec.unit, x).matrix
    ratio = np.linalg.solve(F.T, H.T).T
    return float(np.linalg.norm(ratio - c * np.eye(len(ratio))) / c)


def _default_a0(algebra):
    # e + 0.5 * (a primitive idempotent): not a multiple of e
    if algebra.kind == "sym":
        c = np.zeros(algebra.dim)
        c[0] = 1.0
    else:
        c = np.zeros(algebra.dim)
        c[0], c[1] = 0.5, 0.5
    return algebra.e + 0.5 * Element(algebra, c)


def alpha_mechanism_check(lam: float, algebra: Algebra, trials: int = 500, seed=0,
                          a0: Element | None = None, tol: float = 1e-8,
                          witness_threshold: float = 1e-3, spread: float = 1.0) -> CheckReport:
    """Test ``x^(-1) # y = alpha(x)^(-1) # alpha(y)`` for two kinds of ``alpha``.

    For ``alpha = lam * id`` the identity must hold on every sampled pair.
    For ``alpha(x) = P(x^(1/2)) a0`` with ``a0`` not a multiple of ``e``
    some sampled pair must violate it by more than ``witness_threshold``;
    the worst such pair is returned as the witness.
    """
    if len(algebra.parts) != 1:
        raise StructuralError("alpha mechanism needs an irreducible algebra")
    if not lam > 0:
        raise ValueError("lam must be positive")
    a0 = _default_a0(algebra) if a0 is None else a0

    def alpha_nonscalar(x):
        return quadratic_rep(spectral_map(x, np.sqrt))(a0)

    worst_scalar = worst_nonscalar = 0.0
    witness = None
    for k in range(trials):
        rng = np.random.default_rng([int(seed), k])
        x = sample_cone(algebra, rng, spread)
        y = sample_cone(algebra, rng, spread)
        ref = geometric_mean(inverse(x), y)
        scale = norm(ref)
        got = geometric_mean(inverse(lam * x), lam * y)
        worst_scalar = max(worst_scalar, norm(got - ref) / scale)
        bad = geometric_mean(inverse(alpha_nonscalar(x)), alpha_nonscalar(y))
        v = norm(bad - ref) / scale
        if v > worst_nonscalar:
            worst_nonscalar = v
            witness = {"trial": k, "x": x.coords.tolist(), "y": y.coords.tolist(), "violation": v}
    found = worst_nonscalar > witness_threshold
    return CheckReport(
        check="alpha",
        trials=trials,
        max_violation=worst_scalar,
        passed=bool(worst_scalar <= tol and found),
        tol=tol,
        witness=witness,
        details={
            "algebra": str(algebra),
            "lambda": float(lam),
            "a0": a0.coords.tolist(),
            "nonscalar_max_violation": worst_nonscalar,
            "witness_found": found,
        },
    )
