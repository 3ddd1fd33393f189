"""Euclidean Jordan algebras of real symmetric matrices and spin factors.

Elements are stored as coordinate vectors.  Symmetric matrices use the
scaled vectorization ``[X_00, ..., X_nn, sqrt(2) X_01, sqrt(2) X_02, ...]``
(diagonal first, then the strict upper triangle row-major) so that the
coordinate dot product equals the trace form ``tr(XY)``.  Spin factors use
the natural coordinates ``(x0, xbar)``; their trace form is
``2 (x0 y0 + xbar . ybar)``, i.e. the coordinate dot product weighted by
``Algebra.metric``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import block_diag

from .exceptions import DomainError, StructuralError

SQRT2 = np.sqrt(2.0)


def as_generator(seed=None):
    """Turn ``None``, an int, a seed sequence or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


###############################################################################
# Algebras


class Algebra:
    """Base class of the algebra descriptors.

    Subclasses are frozen dataclasses and therefore hashable and comparable.
    """

    kind: str

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def rank(self) -> int:
        raise NotImplementedError

    @property
    def parts(self) -> tuple:
        """Irreducible components, in order."""
        return (self,)

    @cached_property
    def metric(self) -> np.ndarray:
        """Diagonal of the trace-form Gram matrix in coordinates."""
        return np.concatenate([p._metric() for p in self.parts])

    @cached_property
    def slices(self) -> tuple:
        out, start = [], 0
        for p in self.parts:
            out.append(slice(start, start + p.dim))
            start += p.dim
        return tuple(out)

    @property
    def e(self) -> "Element":
        return Element(self, self._identity())

    def element(self, coords) -> "Element":
        return Element(self, coords)

    def zeros(self) -> "Element":
        return Element(self, np.zeros(self.dim))

    def split(self, x: "Element") -> list:
        """Component elements of ``x``, one per irreducible part."""
        return [Element(p, x.coords[s]) for p, s in zip(self.parts, self.slices)]

    def join(self, pieces: Sequence["Element"]) -> "Element":
        return Element(self, np.concatenate([p.coords for p in pieces]))

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __str__(self):
        return algebra_to_string(self)


@dataclass(frozen=True)
class SymMatrix(Algebra):
    """Real symmetric ``n x n`` matrices with ``X o Y = (XY + YX) / 2``."""

    n: int
    kind = "sym"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise StructuralError(f"SymMatrix needs n >= 1, got {self.n!r}")

    @property
    def dim(self):
        return self.n * (self.n + 1) // 2

    @property
    def rank(self):
        return self.n

    def _metric(self):
        return np.ones(self.dim)

    def _identity(self):
        c = np.zeros(self.dim)
        c[: self.n] = 1.0
        return c

    def to_matrix(self, coords) -> np.ndarray:
        """Symmetric matrix from coordinates (also accepts an Element)."""
        if isinstance(coords, Element):
            coords = coords.coords
        return _smat(np.asarray(coords, dtype=float), self.n)

    def from_matrix(self, X) -> "Element":
        X = np.asarray(X, dtype=float)
        if X.shape != (self.n, self.n):
            raise StructuralError(f"expected {self.n}x{self.n} matrix, got {X.shape}")
        return Element(self, _svec(0.5 * (X + X.T), self.n))

    def _product(self, x, y):
        X, Y = _smat(x, self.n), _smat(y, self.n)
        XY = X @ Y
        return _svec(0.5 * (XY + XY.T), self.n)

    def _lmat(self, x):
        X = _smat(x, self.n)
        B = _sym_basis(self.n)
        XB = X @ B
        return _svec(0.5 * (XB + XB.transpose(0, 2, 1)), self.n).T

    def _pmat(self, x):
        X = _smat(x, self.n)
        M = X @ _sym_basis(self.n) @ X
        M = 0.5 * (M + M.transpose(0, 2, 1))
        P = _svec(M, self.n).T
        return 0.5 * (P + P.T)

    def _eig(self, x):
        w, Q = np.linalg.eigh(_smat(x, self.n))
        w, Q = w[::-1], Q[:, ::-1]
        frames = _svec(Q.T[:, :, None] * Q.T[:, None, :], self.n)
        return w, frames

    def _apply(self, x, f):
        w, Q = np.linalg.eigh(_smat(x, self.n))
        fw = f(w)
        return w, _svec((Q * fw) @ Q.T, self.n)

    def to_dict(self):
        return {"kind": "sym", "n": int(self.n)}


@dataclass(frozen=True)
class SpinFactor(Algebra):
    """Spin factor ``R x R^(d-1)`` whose cone is the Lorentz cone."""

    d: int
    kind = "spin"

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise StructuralError(f"SpinFactor needs d >= 2, got {self.d!r}")

    @property
    def dim(self):
        return self.d

    @property
    def rank(self):
        return 2

    def _metric(self):
        return np.full(self.d, 2.0)

    def _identity(self):
        c = np.zeros(self.d)
        c[0] = 1.0
        return c

    def _product(self, x, y):
        out = np.empty(self.d)
        out[0] = x @ y
        out[1:] = x[0] * y[1:] + y[0] * x[1:]
        return out

    def _lmat(self, x):
        L = x[0] * np.eye(self.d)
        L[0, 1:] = x[1:]
        L[1:, 0] = x[1:]
        return L

    def _pmat(self, x):
        L = self._lmat(x)
        P = 2.0 * L @ L - self._lmat(self._product(x, x))
        return 0.5 * (P + P.T)

    def _eig(self, x):
        r = np.linalg.norm(x[1:])
        if r == 0.0:
            u = np.zeros(self.d - 1)
            u[0] = 1.0
        else:
            u = x[1:] / r
        frames = np.empty((2, self.d))
        frames[:, 0] = 0.5
        frames[0, 1:] = 0.5 * u
        frames[1, 1:] = -0.5 * u
        return np.array([x[0] + r, x[0] - r]), frames

    def _apply(self, x, f):
        w, frames = self._eig(x)
        return w, f(w) @ frames

    def to_dict(self):
        return {"kind": "spin", "d": int(self.d)}


@dataclass(frozen=True)
class DirectSum(Algebra):
    """Direct sum of irreducible algebras; nested sums are flattened."""

    components: tuple = field()
    kind = "sum"

    def __post_init__(self):
        flat = []
        for p in self.components:
            if isinstance(p, DirectSum):
                flat.extend(p.components)
            elif isinstance(p, (SymMatrix, SpinFactor)):
                flat.append(p)
            else:
                raise StructuralError(f"not an algebra: {p!r}")
        if not flat:
            raise StructuralError("DirectSum needs at least one part")
        object.__setattr__(self, "components", tuple(flat))

    @property
    def parts(self):
        return self.components

    @property
    def dim(self):
        return sum(p.dim for p in self.components)

    @property
    def rank(self):
        return sum(p.rank for p in self.components)

    def _identity(self):
        return np.concatenate([p._identity() for p in self.components])

    def _blocks(self, x):
        return [x[s] for s in self.slices]

    def _product(self, x, y):
        return np.concatenate(
            [p._product(a, b) for p, a, b in zip(self.parts, self._blocks(x), self._blocks(y))]
        )

    def _lmat(self, x):
        return block_diag(*[p._lmat(a) for p, a in zip(self.parts, self._blocks(x))])

    def _pmat(self, x):
        return block_diag(*[p._pmat(a) for p, a in zip(self.parts, self._blocks(x))])

    def _eig(self, x):
        vals, frames = [], []
        for p, s, a in zip(self.parts, self.slices, self._blocks(x)):
            w, fr = p._eig(a)
            full = np.zeros((len(w), self.dim))
            full[:, s] = fr
            vals.append(w)
            frames.append(full)
        vals, frames = np.concatenate(vals), np.vstack(frames)
        order = np.argsort(-vals, kind="stable")
        return vals[order], frames[order]

    def _apply(self, x, f):
        ws, cs = [], []
        for p, a in zip(self.parts, self._blocks(x)):
            w, c = p._apply(a, f)
            ws.append(w)
            cs.append(c)
        return np.concatenate(ws), np.concatenate(cs)

    def to_dict(self):
        return {"kind": "sum", "parts": [p.to_dict() for p in self.parts]}


def direct_sum(*parts) -> Algebra:
    """Direct sum of algebras; a single part is returned unchanged."""
    if len(parts) == 1 and not isinstance(parts[0], DirectSum):
        return parts[0]
    return DirectSum(tuple(parts))


def algebra_from_dict(d) -> Algebra:
    """Inverse of ``Algebra.to_dict``; a string is handed to :func:`parse_algebra`."""
    if isinstance(d, str):
        return parse_algebra(d)
    try:
        kind = d["kind"]
        if kind == "sym":
            return SymMatrix(int(d["n"]))
        if kind == "spin":
            return SpinFactor(int(d["d"]))
        if kind == "sum":
            return DirectSum(tuple(algebra_from_dict(p) for p in d["parts"]))
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"malformed algebra description: {d!r}") from exc
    raise StructuralError(f"unknown algebra kind {kind!r}")


def parse_algebra(text: str) -> Algebra:
    """Parse ``sym:N``, ``spin:D`` or a sum such as ``sum:sym:3,spin:4``.

    ``sym:3+spin:4`` is accepted as shorthand for the sum.
    """
    text = text.strip()
    if text.startswith("sum:"):
        text = text[4:]
    items = [t for t in text.replace("+", ",").split(",") if t.strip()]
    parts = []
    for item in items:
        kind, _, size = item.strip().partition(":")
        try:
            size = int(size)
        except ValueError:
            raise StructuralError(f"cannot parse algebra {item!r}") from None
        if kind == "sym":
            parts.append(SymMatrix(size))
        elif kind == "spin":
            parts.append(SpinFactor(size))
        else:
            raise StructuralError(f"unknown algebra kind {kind!r}")
    if not parts:
        raise StructuralError("empty algebra description")
    return direct_sum(*parts)


def algebra_to_string(alg: Algebra) -> str:
    names = [f"sym:{p.n}" if p.kind == "sym" else f"spin:{p.d}" for p in alg.parts]
    return "+".join(names)


###############################################################################
# Coordinate helpers for symmetric matrices


@lru_cache(maxsize=None)
def _sym_index(n):
    iu = np.triu_indices(n, 1)
    return np.arange(n), iu


@lru_cache(maxsize=None)
def _sym_basis(n):
    dim = n * (n + 1) // 2
    diag, (iu, ju) = _sym_index(n)
    B = np.zeros((dim, n, n))
    B[diag, diag, diag] = 1.0
    k = np.arange(n, dim)
    B[k, iu, ju] = 1.0 / SQRT2
    B[k, ju, iu] = 1.0 / SQRT2
    B.setflags(write=False)
    return B


def _svec(X, n):
    diag, (iu, ju) = _sym_index(n)
    return np.concatenate(
        [X[..., diag, diag], SQRT2 * X[..., iu, ju]], axis=-1
    )


def _smat(c, n):
    diag, (iu, ju) = _sym_index(n)
    X = np.empty((n, n))
    X[diag, diag] = c[:n]
    off = c[n:] / SQRT2
    X[iu, ju] = off
    X[ju, iu] = off
    return X


###############################################################################
# Elements and linear maps


class Element:
    """Point of the algebra's underlying Euclidean space.

    Supports ``+``, ``-`` and scalar ``*``/``/``; the Jordan product is
    :func:`jordan_product`.
    """

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: Algebra, coords):
        coords = np.array(coords, dtype=float)
        if coords.shape != (algebra.dim,):
            raise StructuralError(
                f"{algebra} needs {algebra.dim} coordinates, got shape {coords.shape}"
            )
        coords.setflags(write=False)
        self.algebra = algebra
        self.coords = coords

    def _same(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        _check_same(self, other)
        return other

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return Element(self.algebra, -self.coords)

    def __mul__(self, t):
        if isinstance(t, Element):
            return NotImplemented
        return Element(self.algebra, self.coords * float(t))

    __rmul__ = __mul__

    def __truediv__(self, t):
        return Element(self.algebra, self.coords / float(t))

    def __repr__(self):
        return f"Element({self.algebra}, {np.array2string(self.coords, precision=6)})"

    def to_dict(self) -> dict:
        return {"algebra": self.algebra.to_dict(), "coords": self.coords.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Element":
        try:
            return cls(algebra_from_dict(d["algebra"]), d["coords"])
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed element: {d!r}") from exc


class LinMap:
    """Linear operator on ``V`` acting on coordinate vectors.

    ``A(x)`` and ``A @ x`` apply the map; ``A @ B`` composes.
    """

    __slots__ = ("algebra", "matrix")

    def __init__(self, algebra: Algebra, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.shape != (algebra.dim, algebra.dim):
            raise StructuralError(
                f"LinMap on {algebra} must be {algebra.dim}x{algebra.dim}, got {matrix.shape}"
            )
        matrix.setflags(write=False)
        self.algebra = algebra
        self.matrix = matrix

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, np.eye(algebra.dim))

    def __call__(self, x: Element) -> Element:
        if x.algebra != self.algebra:
            raise StructuralError(f"map on {self.algebra} applied to element of {x.algebra}")
        return Element(self.algebra, self.matrix @ x.coords)

    def __matmul__(self, other):
        if isinstance(other, Element):
            return self(other)
        if isinstance(other, LinMap):
            if other.algebra != self.algebra:
                raise StructuralError("composing maps on different algebras")
            return LinMap(self.algebra, self.matrix @ other.matrix)
        return NotImplemented

    def __add__(self, other):
        return LinMap(self.algebra, self.matrix + other.matrix)

    def __sub__(self, other):
        return LinMap(self.algebra, self.matrix - other.matrix)

    def __mul__(self, t):
        return LinMap(self.algebra, self.matrix * float(t))

    __rmul__ = __mul__

    def adjoint(self) -> "LinMap":
        """Adjoint with respect to the trace form."""
        g = self.algebra.metric
        return LinMap(self.algebra, (self.matrix.T * g) / g[:, None])

    def inv(self) -> "LinMap":
        return LinMap(self.algebra, np.linalg.inv(self.matrix))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def __repr__(self):
        return f"LinMap({self.algebra}, dim={self.algebra.dim})"


@dataclass(frozen=True)
class Spectral:
    """Jordan frame and eigenvalues, eigenvalues sorted descending."""

    frame: tuple
    eigenvalues: np.ndarray

    def reconstruct(self) -> Element:
        alg = self.frame[0].algebra
        return Element(alg, sum(lam * c.coords for lam, c in zip(self.eigenvalues, self.frame)))


def _check_same(x, y):
    if x.algebra != y.algebra:
        raise StructuralError(f"algebra mismatch: {x.algebra} vs {y.algebra}")


###############################################################################
# Operations


def jordan_product(x: Element, y: Element) -> Element:
    """Jordan product ``x o y``."""
    _check_same(x, y)
    return Element(x.algebra, x.algebra._product(x.coords, y.coords))


def multiplication_map(x: Element) -> LinMap:
    """Left multiplication ``L(x): y -> x o y``."""
    return LinMap(x.algebra, x.algebra._lmat(x.coords))


def quadratic_rep(x: Element) -> LinMap:
    """Quadratic representation ``P(x) = 2 L(x)^2 - L(x^2)``.

    On symmetric matrices this is ``Y -> XYX``, which is how it is
    evaluated there.
    """
    return LinMap(x.algebra, x.algebra._pmat(x.coords))


def inner(x: Element, y: Element) -> float:
    """Trace form ``tr(x o y)``."""
    _check_same(x, y)
    return float(np.sum(x.algebra.metric * x.coords * y.coords))


def norm(x: Element) -> float:
    return float(np.sqrt(inner(x, x)))


def spectral(x: Element) -> Spectral:
    """Spectral decomposition ``x = sum_i lambda_i c_i`` over a Jordan frame."""
    w, frames = x.algebra._eig(x.coords)
    return Spectral(tuple(Element(x.algebra, c) for c in frames), np.asarray(w))


def eigenvalues(x: Element) -> np.ndarray:
    """Eigenvalues of ``x``, sorted descending."""
    if isinstance(x.algebra, SymMatrix):
        return np.linalg.eigvalsh(x.algebra.to_matrix(x.coords))[::-1]
    return x.algebra._eig(x.coords)[0]


def min_eigenvalue(x: Element) -> float:
    return float(np.min(eigenvalues(x)))


def spectral_map(
    x: Element,
    f: Callable[[np.ndarray], np.ndarray],
    domain_guard: Callable[[np.ndarray], np.ndarray] | None = None,
    name: str = "f",
) -> Element:
    """Apply a scalar function through the spectrum: ``sum_i f(lambda_i) c_i``.

    Parameters
    ----------
    x : Element
        Argument.
    f : callable
        Vectorized scalar function applied to the eigenvalues.
    domain_guard : callable, optional
        Vectorized predicate; every eigenvalue must satisfy it.
    name : str
        Used in error messages.

    Raises
    ------
    DomainError
        If some eigenvalue fails ``domain_guard``.
    """
    guarded = f
    if domain_guard is not None:
        def guarded(w):
            ok = np.asarray(domain_guard(w), dtype=bool)
            if not ok.all():
                bad = float(w[~ok][0])
                raise DomainError(f"eigenvalue {bad!r} outside the domain of {name}", eigenvalue=bad)
            return f(w)
    _, coords = x.algebra._apply(x.coords, guarded)
    return Element(x.algebra, coords)


def inverse(x: Element) -> Element:
    return spectral_map(x, lambda w: 1.0 / w, lambda w: w != 0, "inverse")


def sqrt(x: Element) -> Element:
    return spectral_map(x, np.sqrt, lambda w: w >= 0, "sqrt")


def power(x: Element, t: float) -> Element:
    """``x^t``; non-integer or negative exponents need a positive spectrum."""
    t = float(t)
    if t >= 0 and t == int(t):
        return spectral_map(x, lambda w: w**t)
    return spectral_map(x, lambda w: w**t, lambda w: w > 0, f"power {t}")


def exp(x: Element) -> Element:
    return spectral_map(x, np.exp)


def log(x: Element) -> Element:
    return spectral_map(x, np.log, lambda w: w > 0, "log")


def det_trace(x: Element) -> tuple[float, float]:
    """Jordan determinant and trace (product and sum of eigenvalues)."""
    w = eigenvalues(x)
    return float(np.prod(w)), float(np.sum(w))


def det(x: Element) -> float:
    return det_trace(x)[0]


def trace(x: Element) -> float:
    """Trace, computed linearly as ``<x, e>``."""
    return inner(x, x.algebra.e)


def log_det(x: Element) -> float:
    """``ln det x`` for cone points, summed over eigenvalues to avoid overflow."""
    w = eigenvalues(x)
    if np.any(w <= 0):
        bad = float(w[w <= 0][0])
        raise DomainError(f"eigenvalue {bad!r}: log det needs a cone point", eigenvalue=bad)
    return float(np.sum(np.log(w)))


def in_cone(x: Element, margin: float = 0.0) -> bool:
    """True iff the smallest eigenvalue of ``x`` exceeds ``margin``."""
    return bool(min_eigenvalue(x) > margin)


def random_element(algebra: Algebra, seed=None, scale: float = 1.0) -> Element:
    """Element with independent ``N(0, scale^2)`` coordinates."""
    rng = as_generator(seed)
    return Element(algebra, scale * rng.standard_normal(algebra.dim))


def sample_cone(algebra: Algebra, seed=None, spread: float = 1.0) -> Element:
    """Random cone point with eigenvalues ``exp(spread * N(0, 1))`` in a uniformly random frame.

    The frame is Haar distributed (a random orthogonal matrix for symmetric
    matrices, a uniform unit vector for spin factors), so the law is
    invariant under the rotations fixing the identity.
    """
    if not np.isfinite(spread) or spread < 0:
        raise ValueError(f"spread must be finite and non-negative, got {spread!r}")
    rng = as_generator(seed)
    pieces = []
    for part in algebra.parts:
        lam = np.exp(spread * rng.standard_normal(part.rank))
        if isinstance(part, SymMatrix):
            Q, R = np.linalg.qr(rng.standard_normal((part.n, part.n)))
            Q = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
            pieces.append(part.from_matrix((Q * lam) @ Q.T))
        else:
            u = rng.standard_normal(part.d - 1)
            u /= np.linalg.norm(u)
            pieces.append(part.element(np.concatenate([[lam.mean()], 0.5 * (lam[0] - lam[1]) * u])))
    return algebra.join(pieces)
