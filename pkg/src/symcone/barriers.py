"""Self-scaled barrier family ``H = c0 + sum_i c_i F_i`` over direct sums.

``F_i(x_i) = -ln det(x_i)`` is the standard barrier of the i-th irreducible
component.  Gradients and Hessians are taken with respect to the trace form,
so ``F'(x) = -x^(-1)`` and ``F''(x) = P(x^(-1))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .exceptions import StructuralError
from .geometry import require_cone, scaling_point
from .jordan import (
    Algebra,
    Element,
    LinMap,
    algebra_from_dict,
    as_generator,
    eigenvalues,
    inner,
    inverse,
    norm,
    quadratic_rep,
    sample_cone,
)
from .reports import CheckReport


@dataclass(frozen=True)
class BarrierSpec:
    """Additive constant ``c0`` and one positive weight per irreducible component."""

    algebra: Algebra
    c0: float = 0.0
    weights: tuple = field(default=None)

    def __post_init__(self):
        parts = self.algebra.parts
        weights = (1.0,) * len(parts) if self.weights is None else self.weights
        weights = tuple(float(c) for c in np.atleast_1d(weights))
        if len(weights) != len(parts):
            raise StructuralError(
                f"{len(parts)} irreducible components but {len(weights)} weights"
            )
        if not all(c > 0 and np.isfinite(c) for c in weights):
            raise ValueError(f"weights must be positive and finite, got {weights}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "c0", float(self.c0))

    @property
    def nu(self) -> float:
        """Barrier parameter ``sum_i c_i r_i``."""
        return float(sum(c * p.rank for c, p in zip(self.weights, self.algebra.parts)))

    @property
    def unit(self) -> "BarrierSpec":
        """The standard barrier ``F`` on the same algebra."""
        return BarrierSpec(self.algebra)

    def to_dict(self) -> dict:
        return {"c0": self.c0, "weights": list(self.weights), "algebra": self.algebra.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "BarrierSpec":
        try:
            return cls(algebra_from_dict(d["algebra"]), d.get("c0", 0.0), d.get("weights"))
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed barrier spec: {d!r}") from exc


@dataclass(frozen=True)
class ScalingReport:
    w: Element
    residual: float


def _check(spec, x, name="x"):
    if x.algebra != spec.algebra:
        raise StructuralError(f"barrier on {spec.algebra} evaluated on {x.algebra}")
    require_cone(x, name)


def barrier_value(spec: BarrierSpec, x: Element) -> float:
    """``c0 + sum_i c_i (-ln det x_i)``."""
    _check(spec, x)
    total = spec.c0
    for c, xi in zip(spec.weights, spec.algebra.split(x)):
        total -= c * float(np.sum(np.log(eigenvalues(xi))))
    return total


def barrier_gradient(spec: BarrierSpec, x: Element) -> Element:
    _check(spec, x)
    return spec.algebra.join(
        [-c * inverse(xi) for c, xi in zip(spec.weights, spec.algebra.split(x))]
    )


def barrier_hessian(spec: BarrierSpec, x: Element) -> LinMap:
    """Block diagonal map with blocks ``c_i P(x_i^(-1))``."""
    _check(spec, x)
    blocks = [
        c * quadratic_rep(inverse(xi)).matrix
        for c, xi in zip(spec.weights, spec.algebra.split(x))
    ]
    return LinMap(spec.algebra, block_diag(*blocks))


def barrier_scaling_point(spec: BarrierSpec, x: Element, s: Element) -> ScalingReport:
    """Scaling point ``w_H`` with ``H''(w) x = s``: componentwise ``sqrt(c_i) (x_i # s_i^(-1))``.

    The residual ``|H''(w) x - s| / |s|`` is always computed and returned.
    """
    _check(spec, x, "x")
    _check(spec, s, "s")
    alg = spec.algebra
    w = alg.join(
        [
            np.sqrt(c) * scaling_point(xi, si)
            for c, xi, si in zip(spec.weights, alg.split(x), alg.split(s))
        ]
    )
    residual = norm(barrier_hessian(spec, w)(x) - s) / norm(s)
    return ScalingReport(w, residual)


def upsilon(spec: BarrierSpec, x: Element, check_tol: float | None = 1e-9) -> Element:
    """The cone point ``Y(x)`` with ``H''(x) = P(Y(x)^(-1))``, i.e. ``x_i / sqrt(c_i)``.

    With ``check_tol`` set, the defining equation is re-verified and an
    ``ArithmeticError`` raised if its relative residual exceeds the tolerance.
    """
    _check(spec, x)
    alg = spec.algebra
    y = alg.join([xi / np.sqrt(c) for c, xi in zip(spec.weights, alg.split(x))])
    if check_tol is not None:
        res = upsilon_residual(spec, x, y)
        if res > check_tol:
            raise ArithmeticError(f"Upsilon residual {res:.3e} exceeds {check_tol:.1e}")
    return y


def upsilon_residual(spec: BarrierSpec, x: Element, y: Element) -> float:
    """``|H''(x) - P(y^(-1))| / |H''(x)|``."""
    H = barrier_hessian(spec, x)
    return (H - quadratic_rep(inverse(y))).norm() / H.norm()


def conjugate_value(spec: BarrierSpec, s: Element) -> float:
    """Exact conjugate ``H#(s) = max_x -<x, s> - H(x)``.

    Each component contributes ``c_i F(s_i) + c_i r_i (ln c_i - 1)``; the
    maximizer is ``x_i = c_i s_i^(-1)``.
    """
    _check(spec, s, "s")
    return barrier_value(conjugate_spec(spec), s)


def conjugate_spec(spec: BarrierSpec) -> BarrierSpec:
    """The conjugate barrier as a member of the same family."""
    shift = sum(
        c * p.rank * (np.log(c) - 1.0) for c, p in zip(spec.weights, spec.algebra.parts)
    )
    return BarrierSpec(spec.algebra, shift - spec.c0, spec.weights)


def newton_decrement_sq(spec: BarrierSpec, x: Element) -> float:
    """``<H'(x), H''(x)^(-1) H'(x)>``, equal to ``nu`` everywhere for this family."""
    g = barrier_gradient(spec, x)
    H = barrier_hessian(spec, x)
    step = np.linalg.solve(H.matrix, g.coords)
    return inner(g, Element(spec.algebra, step))


def perturbed_decrement_bound(X: Element, Y: Element, lam: float) -> float:
    """Lower bound ``(sqrt(tr[(XY)^2]) - lam sqrt(n))^2 / lam`` on the squared
    Newton decrement of ``lam F + <Y, .>`` at ``X`` (symmetric matrices only).

    Grows without bound along rays ``t X`` unless ``Y = 0``.
    """
    alg = X.algebra
    if alg.kind != "sym" or Y.algebra != alg:
        raise StructuralError("perturbed_decrement_bound needs two elements of one SymMatrix algebra")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    require_cone(X, "X")
    XY = alg.to_matrix(X) @ alg.to_matrix(Y)
    t = max(float(np.trace(XY @ XY)), 0.0)
    return (np.sqrt(t) - lam * np.sqrt(alg.n)) ** 2 / lam


###############################################################################
# Self-scaled axioms


def _trial_rng(seed, trial):
    return np.random.default_rng([int(seed), int(trial)])


def check_self_scaled(spec: BarrierSpec, trials: int = 1000, tol: float = 1e-8, seed: int = 0,
                      spread: float = 1.0):
    """Sample ``(x, w)`` pairs and test both self-scaled axioms.

    Axiom (a) asks ``H''(w) x`` to lie in the cone; its violation is
    ``max(0, -lambda_min) / |H''(w) x|``.  Axiom (b) asks
    ``H#(H''(w) x) = H(x) - 2 H(w) - nu``; its violation is the absolute
    difference divided by ``1 + |rhs|``.  Trial ``k`` draws from the stream
    seeded by ``(seed, k)``.

    Returns
    -------
    CheckReport
        ``passed`` additionally requires every weight to be at least 1.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    alg = spec.algebra
    worst_a = worst_b = 0.0
    witness = None
    for k in range(trials):
        rng = _trial_rng(seed, k)
        x = sample_cone(alg, rng, spread)
        w = x if k == 0 else sample_cone(alg, rng, spread)
        hx = barrier_hessian(spec, w)(x)
        lo = float(eigenvalues(hx).min())
        va = max(0.0, -lo) / norm(hx)
        rhs = barrier_value(spec, x) - 2.0 * barrier_value(spec, w) - spec.nu
        vb = abs(conjugate_value(spec, hx) - rhs) / (1.0 + abs(rhs)) if lo > 0 else np.inf
        if max(va, vb) > max(worst_a, worst_b):
            witness = {"trial": k}
        worst_a, worst_b = max(worst_a, va), max(worst_b, vb)
    weights_ok = all(c >= 1 for c in spec.weights)
    worst = max(worst_a, worst_b)
    return CheckReport(
        check="self-scaled",
        trials=trials,
        max_violation=worst,
        passed=bool(worst <= tol and weights_ok),
        tol=tol,
        witness=witness,
        details={
            "algebra": str(alg),
            "weights": list(spec.weights),
            "axiom_a": worst_a,
            "axiom_b": worst_b,
            "weights_at_least_one": weights_ok,
        },
    )


def random_spec(algebra: Algebra, seed=None, low: float = 1.0, high: float = 4.0) -> BarrierSpec:
    """Family member with uniform weights in ``[low, high)`` and a random ``c0``."""
    rng = as_generator(seed)
    weights = rng.uniform(low, high, size=len(algebra.parts))
    return BarrierSpec(algebra, float(rng.normal()), tuple(weights))


__all__ = [
    "BarrierSpec",
    "ScalingReport",
    "barrier_value",
    "barrier_gradient",
    "barrier_hessian",
    "barrier_scaling_point",
    "upsilon",
    "upsilon_residual",
    "conjugate_value",
    "conjugate_spec",
    "newton_decrement_sq",
    "perturbed_decrement_bound",
    "check_self_scaled",
    "random_spec",
]
