"""Invariant Riemannian geometry of a symmetric cone.

Everything is evaluated through spectral functions of the Jordan algebra,
so one code path serves symmetric matrices, spin factors and their sums.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, NearBoundaryWarning
from .jordan import (
    Element,
    _check_same,
    eigenvalues,
    norm,
    power,
    quadratic_rep,
    spectral_map,
)

BOUNDARY_RATIO = 1e-10


def require_cone(x: Element, name: str = "x") -> np.ndarray:
    """Check that ``x`` lies in the open cone and return its eigenvalues.

    Raises :class:`DomainError` outside the cone and emits a
    :class:`NearBoundaryWarning` when the smallest eigenvalue is below
    ``1e-10 * |x|``.
    """
    w = eigenvalues(x)
    lo = float(w.min())
    if not lo > 0:
        raise DomainError(f"{name} is not in the cone (eigenvalue {lo!r})", eigenvalue=lo)
    if lo < BOUNDARY_RATIO * norm(x):
        warnings.warn(
            f"{name} is near the cone boundary (min eigenvalue {lo:.3e})",
            NearBoundaryWarning,
            stacklevel=3,
        )
    return w


def _half_powers(a: Element):
    """``(a^(1/2), a^(-1/2))`` from a single decomposition."""
    root = spectral_map(a, np.sqrt)
    inv_root = spectral_map(a, lambda w: 1.0 / np.sqrt(w))
    return root, inv_root


def riemannian_distance(a: Element, b: Element) -> float:
    """Distance ``(sum_i log^2 lambda_i)^(1/2)``, ``lambda_i`` the eigenvalues of ``P(a^(-1/2)) b``."""
    _check_same(a, b)
    require_cone(a, "a")
    require_cone(b, "b")
    _, a_isqrt = _half_powers(a)
    w = eigenvalues(quadratic_rep(a_isqrt)(b))
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def geodesic(a: Element, b: Element, t: float) -> Element:
    """Point ``P(a^(1/2)) (P(a^(-1/2)) b)^t`` of the geodesic from ``a`` (t=0) to ``b`` (t=1)."""
    _check_same(a, b)
    require_cone(a, "a")
    require_cone(b, "b")
    a_sqrt, a_isqrt = _half_powers(a)
    inner_pt = quadratic_rep(a_isqrt)(b)
    return quadratic_rep(a_sqrt)(power(inner_pt, t))


@dataclass(frozen=True)
class GeodesicQuery:
    """A pair of cone points and a curve parameter."""

    a: Element
    b: Element
    t: float

    def __post_init__(self):
        _check_same(self.a, self.b)
        require_cone(self.a, "a")
        require_cone(self.b, "b")

    def evaluate(self) -> Element:
        return geodesic(self.a, self.b, self.t)


def geometric_mean(a: Element, b: Element) -> Element:
    """Geometric mean ``a # b = P(a^(1/2)) (P(a^(-1/2)) b)^(1/2)``.

    The geodesic midpoint of ``a`` and ``b``; for positive definite
    matrices it is ``A^(1/2) (A^(-1/2) B A^(-1/2))^(1/2) A^(1/2)``.

    Parameters
    ----------
    a, b : Element
        Points of the open cone, same algebra.

    Returns
    -------
    Element
        The mean, a cone point.
    """
    return geodesic(a, b, 0.5)


def scaling_point(x: Element, s: Element) -> Element:
    """Scaling point ``w = x # s^(-1)`` of the log-det barrier, ``P(w^(-1)) x = s``.

    Evaluated as ``P(x^(1/2)) (P(x^(1/2)) s)^(-1/2)``, which never inverts
    ``x`` or ``s`` individually; the intermediate ``P(x^(1/2)) s`` stays
    well conditioned along an interior-point central path.
    """
    _check_same(x, s)
    require_cone(x, "x")
    require_cone(s, "s")
    px = quadratic_rep(spectral_map(x, np.sqrt))
    u = px(s)
    return px(spectral_map(u, lambda w: 1.0 / np.sqrt(w), lambda w: w > 0, "inverse sqrt"))


def scaling_residual(w: Element, x: Element, s: Element) -> float:
    """Relative residual ``|P(w^(-1)) x - s| / |s|``."""
    w_inv = spectral_map(w, lambda v: 1.0 / v)
    return norm(quadratic_rep(w_inv)(x) - s) / norm(s)
