"""Primal-dual path following with Nesterov-Todd scaling.

Solves ``min <c, x>  s.t.  <a_i, x> = b_i,  x in cone`` together with its dual
``max b^T y  s.t.  sum_i y_i a_i + s = c,  s in cone``.  Inner products are
the trace form; ``A`` holds the coordinates of the ``a_i`` as rows.

The loop is deliberately plain: a fixed centering parameter, no corrector,
dense Cholesky of the ``m x m`` Schur complement, and a strictly feasible
start found by a barrier phase-one (no homogeneous embedding).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .exceptions import (
    DegenerateProgramError,
    DomainError,
    InitializationError,
    StallError,
    StructuralError,
)
from .geometry import scaling_point, scaling_residual
from .jordan import (
    Algebra,
    Element,
    SpinFactor,
    SymMatrix,
    algebra_from_dict,
    as_generator,
    direct_sum,
    inner,
    min_eigenvalue,
    quadratic_rep,
    spectral_map,
)
from .verification import random_orthogonal

SIGMA = 0.1
STEP_FRACTION = 0.99
MIN_STEP = 1e-14


@dataclass(frozen=True)
class ConicProgram:
    """Linear objective and equality constraints over a symmetric cone."""

    algebra: Algebra
    c: Element
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        dim = self.algebra.dim
        if self.c.algebra != self.algebra:
            raise StructuralError("objective lives in a different algebra")
        if A.shape[1] != dim or A.shape[0] != b.shape[0]:
            raise StructuralError(f"A must be m x {dim} with m = len(b); got {A.shape}, {b.shape}")
        if A.shape[0] > dim:
            raise StructuralError("more constraints than dimensions")
        if np.linalg.matrix_rank(A) < A.shape[0]:
            raise StructuralError("constraint elements are linearly dependent")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def A_metric(self) -> np.ndarray:
        """Rows ``metric * a_i`` so that ``A_metric @ x.coords = (<a_i, x>)_i``."""
        return self.A * self.algebra.metric

    def apply(self, x: Element) -> np.ndarray:
        return self.A_metric @ x.coords

    def adjoint(self, y) -> Element:
        return Element(self.algebra, self.A.T @ np.asarray(y, dtype=float))

    def objective(self, x: Element) -> float:
        return inner(self.c, x)

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra.to_dict(),
            "c": self.c.coords.tolist(),
            "A": self.A.tolist(),
            "b": self.b.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConicProgram":
        try:
            alg = algebra_from_dict(d["algebra"])
            return cls(alg, Element(alg, d["c"]), np.array(d["A"], dtype=float),
                       np.array(d["b"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, StructuralError):
                raise
            raise StructuralError(f"malformed program: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ConicProgram":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class IterateState:
    x: Element
    y: np.ndarray
    s: Element

    @property
    def mu(self) -> float:
        return inner(self.x, self.s) / self.x.algebra.rank


@dataclass
class SolveReport:
    status: str
    state: IterateState
    iterations: int
    primal_objective: float
    dual_objective: float
    trace: list = field(default_factory=list)

    @property
    def x(self):
        return self.state.x

    @property
    def gap(self):
        return inner(self.state.x, self.state.s)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "iterations": self.iterations,
            "primal_objective": self.primal_objective,
            "dual_objective": self.dual_objective,
            "gap": self.gap,
            "x": self.state.x.coords.tolist(),
            "y": np.asarray(self.state.y).tolist(),
            "s": self.state.s.coords.tolist(),
            "trace": self.trace,
        }


def _max_step(v: Element, dv: Element) -> float:
    """Largest ``alpha`` with ``v + alpha dv`` in the cone, for ``v`` in the cone."""
    v_isqrt = spectral_map(v, lambda w: 1.0 / np.sqrt(w))
    lo = min_eigenvalue(quadratic_rep(v_isqrt)(dv))
    return np.inf if lo >= 0 else -1.0 / lo


def _direction(state: IterateState, program: ConicProgram, sigma: float):
    x, y, s = state.x, state.y, state.s
    alg = program.algebra
    w = scaling_point(x, s)
    w_sqrt = spectral_map(w, np.sqrt)
    w_isqrt = spectral_map(w, lambda v: 1.0 / np.sqrt(v))
    P_w = quadratic_rep(w).matrix
    v = quadratic_rep(w_isqrt)(x)
    mu = state.mu
    # v o (dx~ + ds~) = sigma mu e - v o v  =>  dx~ + ds~ = sigma mu v^-1 - v
    r_c = spectral_map(v, lambda lam: sigma * mu / lam - lam)
    R = quadratic_rep(w_sqrt)(r_c).coords
    r_p = program.b - program.apply(x)
    r_d = program.c.coords - program.A.T @ y - s.coords
    AG = program.A_metric
    M = AG @ P_w @ program.A.T
    rhs = r_p - AG @ R + AG @ (P_w @ r_d)
    try:
        dy = cho_solve(cho_factor(M), rhs)
    except LinAlgError as exc:
        raise DegenerateProgramError("Schur complement is singular") from exc
    ds = r_d - program.A.T @ dy
    dx = R - P_w @ ds
    dx_t = quadratic_rep(w_isqrt)(Element(alg, dx))
    ds_t = quadratic_rep(w_sqrt)(Element(alg, ds))
    return w, v, Element(alg, dx), dy, Element(alg, ds), dx_t, ds_t


def _step(state: IterateState, program: ConicProgram, sigma: float):
    w, v, dx, dy, ds, dx_t, ds_t = _direction(state, program, sigma)
    alpha_max = min(_max_step(v, dx_t), _max_step(v, ds_t))
    alpha = min(1.0, STEP_FRACTION * alpha_max)
    for _ in range(60):
        if alpha < MIN_STEP:
            raise StallError(f"step length {alpha:.3e} below {MIN_STEP:.0e}")
        x_new = state.x + alpha * dx
        s_new = state.s + alpha * ds
        if min_eigenvalue(x_new) > 0 and min_eigenvalue(s_new) > 0:
            break
        alpha *= 0.5
    else:  # pragma: no cover - sixty halvings always reach MIN_STEP
        raise StallError("could not keep the iterate interior")
    return IterateState(x_new, state.y + alpha * dy, s_new), w, alpha


def nt_step(state: IterateState, program: ConicProgram, sigma: float = SIGMA) -> IterateState:
    """One Nesterov-Todd step toward the central-path point with target ``sigma * mu``.

    The direction solves the linearized central-path equations in the frame
    scaled by ``w = x # s^(-1)``; the step is 0.99 of the largest step that
    keeps both ``x`` and ``s`` in the cone (capped at 1).

    Raises
    ------
    DomainError
        If ``x`` or ``s`` is not an interior point (so ``mu > 0`` fails).
    DegenerateProgramError
        If the Schur complement is singular.
    StallError
        If the step length drops below ``1e-14``.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    if min_eigenvalue(state.x) <= 0 or min_eigenvalue(state.s) <= 0 or not state.mu > 0:
        raise DomainError("iterate must be strictly interior with mu > 0")
    return _step(state, program, sigma)[0]


###############################################################################
# Phase one


def _interior_point(base: Element, directions: np.ndarray, max_newton: int = 200):
    """Find ``z`` with ``base + directions @ z`` strictly inside the cone.

    Barrier method on ``min tau  s.t.  base + directions z + tau e in cone``:
    stops as soon as ``tau <= -1`` (the point clears the boundary by at least
    one unit of ``e``) or, when that margin is not available, at the
    barrier optimum if it has ``tau < 0``.  Returns ``None`` if the affine set
    misses the interior.
    """
    alg = base.algebra
    g = alg.metric
    e = alg.e.coords
    k = directions.shape[1]
    J = np.hstack([directions, e[:, None]])
    tau = max(0.0, -min_eigenvalue(base)) + 1.0
    zeta = np.zeros(k + 1)
    zeta[-1] = tau
    reg = 1e-8
    t = 1.0
    rank = alg.rank

    def point(z):
        return Element(alg, base.coords + J @ z)

    for _ in range(max_newton):
        u = point(zeta)
        if zeta[-1] <= -1.0:
            break
        u_inv = spectral_map(u, lambda v: 1.0 / v)
        grad = t * np.eye(k + 1)[-1] - J.T @ (g * u_inv.coords) + reg * np.r_[zeta[:-1], 0.0]
        H = J.T @ (g[:, None] * quadratic_rep(u_inv).matrix) @ J
        H[np.arange(k), np.arange(k)] += reg
        step = -np.linalg.solve(H, grad)
        dec = float(-grad @ step)
        amax = _max_step(u, Element(alg, J @ step))
        alpha = 1.0 / (1.0 + np.sqrt(dec)) if dec > 0.25 else 1.0
        alpha = min(alpha, 0.99 * amax)
        zeta = zeta + alpha * step
        if dec < 1e-10:
            if rank / t < 1e-9:
                break
            t *= 8.0
    if zeta[-1] < 0:
        return zeta[:-1]
    return None


def initial_state(program: ConicProgram) -> IterateState:
    """Strictly feasible starting point.

    ``x = e`` when feasible, ``y = 0`` when ``c`` is interior; otherwise a
    barrier phase-one on the affine set supplies the point.

    Raises
    ------
    InitializationError
        If either affine set misses the interior of the cone.
    """
    alg = program.algebra
    A, AG, b = program.A, program.A_metric, program.b
    e = alg.e
    scale_b = 1.0 + np.linalg.norm(b)
    if np.linalg.norm(program.apply(e) - b) <= 1e-12 * scale_b:
        x = e
    else:
        x_ls = np.linalg.lstsq(AG, b, rcond=None)[0]
        _, sv, Vt = np.linalg.svd(AG)
        null = Vt[np.sum(sv > 1e-12 * sv[0]):].T
        z = _interior_point(Element(alg, x_ls), null)
        if z is None:
            raise InitializationError("no strictly feasible primal point")
        x = Element(alg, x_ls + null @ z)
    if min_eigenvalue(program.c) > 0:
        y = np.zeros(program.m)
    else:
        y = _interior_point(program.c, -A.T)
        if y is None:
            raise InitializationError("no strictly feasible dual point")
    s = Element(alg, program.c.coords - A.T @ y)
    return IterateState(x, y, s)


def solve(program: ConicProgram, tol: float = 1e-8, max_iters: int = 50, seed=None,
          sigma: float = SIGMA, state: IterateState | None = None) -> SolveReport:
    """Run Nesterov-Todd steps until the gap and residuals fall below ``tol``.

    Converged means ``<x, s> <= tol (1 + |<c, x>|)``,
    ``|b - A x| <= tol (1 + |b|)`` and ``|c - A^T y - s| <= tol (1 + |c|)``.
    ``seed`` is accepted for interface uniformity; the method is deterministic.

    Returns
    -------
    SolveReport
        ``status`` is ``"optimal"``, ``"stall"`` or ``"iteration_limit"``;
        ``trace`` has one record per iterate (gap, mu, residuals, step and
        the Nesterov-Todd residual ``|P(w^(-1)) x - s| / |s|``).
    """
    state = initial_state(program) if state is None else state
    nb = 1.0 + np.linalg.norm(program.b)
    nc = 1.0 + np.linalg.norm(program.c.coords)
    trace = []
    status = "iteration_limit"
    it = 0
    while True:
        x, s = state.x, state.s
        gap = inner(x, s)
        pobj = program.objective(x)
        pres = float(np.linalg.norm(program.b - program.apply(x)))
        dres = float(np.linalg.norm(program.c.coords - program.A.T @ state.y - s.coords))
        record = {"iter": it, "gap": gap, "mu": state.mu, "primal_objective": pobj,
                  "primal_residual": pres, "dual_residual": dres}
        trace.append(record)
        if gap <= tol * (1 + abs(pobj)) and pres <= tol * nb and dres <= tol * nc:
            status = "optimal"
            break
        if it >= max_iters:
            break
        try:
            new_state, w, alpha = _step(state, program, sigma)
        except StallError:
            status = "stall"
            break
        record["nt_residual"] = scaling_residual(w, x, s)
        record["step"] = alpha
        state = new_state
        it += 1
    return SolveReport(
        status=status,
        state=state,
        iterations=it,
        primal_objective=program.objective(state.x),
        dual_objective=float(program.b @ state.y),
        trace=trace,
    )


###############################################################################
# Instance builders


def sdp_2x2() -> ConicProgram:
    """``min tr X  s.t.  X_11 = 1,  X psd``; optimum 1 at ``diag(1, 0)``."""
    alg = SymMatrix(2)
    return ConicProgram(alg, alg.e, np.array([[1.0, 0.0, 0.0]]), np.array([1.0]))


def lp_program(c, A, b) -> ConicProgram:
    """Linear program ``min c^T x, A x = b, x >= 0`` as a diagonal SDP (sum of 1x1 blocks)."""
    c = np.asarray(c, dtype=float)
    alg = direct_sum(*[SymMatrix(1)] * len(c)) if len(c) > 1 else SymMatrix(1)
    return ConicProgram(alg, Element(alg, c), np.atleast_2d(A), np.atleast_1d(b))


def lp_example() -> ConicProgram:
    """``min x1 + x2  s.t.  x1 + 2 x2 = 2,  x >= 0``; optimum 1 at ``(0, 1)``."""
    return lp_program([1.0, 1.0], [[1.0, 2.0]], [2.0])


def soc_toy(xbar=(3.0, 4.0)) -> ConicProgram:
    """``min x0`` over the Lorentz cone with the vector part fixed; optimum ``|xbar|``.

    The trace form on a spin factor is ``2 (x0 y0 + xbar . ybar)``, hence the
    halved objective and doubled right-hand side.
    """
    xbar = np.asarray(xbar, dtype=float)
    d = len(xbar) + 1
    alg = SpinFactor(d)
    c = np.zeros(d)
    c[0] = 0.5
    A = np.eye(d)[1:]
    return ConicProgram(alg, Element(alg, c), A, 2.0 * xbar)


def centered_program(algebra: Algebra) -> ConicProgram:
    """``c = a_1 = e`` and ``b_1 = <e, e>``: the start ``x = s = e`` is already central."""
    e = algebra.e
    return ConicProgram(algebra, e, e.coords[None, :].copy(), np.array([inner(e, e)]))


def random_sdp(n: int = 3, m: int = 3, seed=None, lifted: int | None = None):
    """Random SDP with a known optimal value.

    Picks complementary ``X* = Q diag(d, 0) Q^T`` and ``S* = Q diag(0, f) Q^T``,
    random constraint matrices and multipliers ``y*``, then sets
    ``b = A(X*)`` and ``c = S* + A^T y*``; the optimal value is ``b^T y*``.

    Returns
    -------
    program : ConicProgram
    value : float
    """
    rng = as_generator(seed)
    alg = SymMatrix(n)
    k = n - 1 if lifted is None else lifted
    Q = random_orthogonal(n, rng)
    dx = np.r_[rng.uniform(0.5, 2.0, k), np.zeros(n - k)]
    ds = np.r_[np.zeros(k), rng.uniform(0.5, 2.0, n - k)]
    X = alg.from_matrix((Q * dx) @ Q.T)
    S = alg.from_matrix((Q * ds) @ Q.T)
    A = rng.standard_normal((m, alg.dim))
    y = rng.standard_normal(m)
    b = A @ X.coords
    c = Element(alg, S.coords + A.T @ y)
    return ConicProgram(alg, c, A, b), float(b @ y)


def lp_vertex_oracle(c, A, b) -> float:
    """Optimal value of ``min c^T x, A x = b, x >= 0`` by enumerating bases."""
    c, A, b = np.asarray(c, float), np.atleast_2d(np.asarray(A, float)), np.atleast_1d(b)
    m, n = A.shape
    best = np.inf
    for cols in combinations(range(n), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b)
        if np.all(xb >= -1e-12):
            x = np.zeros(n)
            x[list(cols)] = xb
            best = min(best, float(c @ x))
    return best


__all__ = [
    "ConicProgram",
    "IterateState",
    "SolveReport",
    "nt_step",
    "solve",
    "initial_state",
    "sdp_2x2",
    "lp_program",
    "lp_example",
    "soc_toy",
    "centered_program",
    "random_sdp",
    "lp_vertex_oracle",
]
