"""Named verification suites.

Each suite takes a :class:`RunConfig` and returns a list of
:class:`~symcone.reports.CheckReport`.  All randomness is drawn from streams
keyed by ``(seed, suite name, algebra index, trial)``, so reports are
reproducible bit for bit and independent of evaluation order.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from . import barriers as bar
from . import geometry as geo
from . import ipm
from . import verification as ver
from .jordan import (
    Algebra,
    SpinFactor,
    SymMatrix,
    direct_sum,
    eigenvalues,
    inverse,
    norm,
    quadratic_rep,
    sample_cone,
    spectral_map,
)
from .reports import CheckReport


@dataclass
class RunConfig:
    """Knobs shared by the suites; ``None`` means the suite default."""

    seed: int = 0
    tol: float | None = None
    trials: int | None = None
    algebras: list | None = None
    samples: int = 100
    n: int | None = None
    spread: float = 1.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be >= 1")


def stream(seed: int, *keys) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``; string keys are hashed."""
    ints = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for k in keys:
        ints.append(zlib.crc32(k.encode()) if isinstance(k, str) else int(k))
    return np.random.default_rng(ints)


def _rel(a, b):
    """``|a - b| / |b|`` for elements or maps."""
    if hasattr(a, "coords"):
        return norm(a - b) / norm(b)
    return (a - b).norm() / b.norm()


def _report(check, alg, trials, worst, tol, witness=None, **details):
    details = {"algebra": str(alg), **details} if alg is not None else details
    return CheckReport(check=check, trials=trials, max_violation=float(worst),
                       passed=bool(worst <= tol), tol=tol, witness=witness, details=details)


def _tol(cfg, default):
    return default if cfg.tol is None else cfg.tol


def _trials(cfg, default):
    return default if cfg.trials is None else cfg.trials


def _panel(cfg, default):
    return list(default) if cfg.algebras is None else list(cfg.algebras)


FUNDAMENTAL_PANEL = (
    [SymMatrix(n) for n in range(2, 7)]
    + [SpinFactor(d) for d in range(3, 11)]
    + [direct_sum(SymMatrix(3), SpinFactor(4))]
)
SCALING_PANEL = (
    [SymMatrix(n) for n in range(2, 6)]
    + [SpinFactor(d) for d in range(3, 7)]
    + [direct_sum(SymMatrix(3), SpinFactor(4)), direct_sum(SymMatrix(2), SpinFactor(3))]
)
GEOMEAN_PANEL = (
    [SymMatrix(n) for n in (3, 4)]
    + [SpinFactor(d) for d in (3, 5)]
    + [direct_sum(SymMatrix(2), SpinFactor(3))]
)
SELF_SCALED_PANEL = [SymMatrix(3), SpinFactor(5), direct_sum(SymMatrix(2), SpinFactor(3))]
POLAR_PANEL = [SymMatrix(n) for n in range(2, 6)] + [SpinFactor(3), SpinFactor(5)]
IRREDUCIBLE_PANEL = [SymMatrix(n) for n in range(2, 6)] + [SpinFactor(d) for d in range(3, 7)]


###############################################################################


def suite_fundamental(cfg: RunConfig) -> list:
    """``P(P(x) y) = P(x) P(y) P(x)`` on random cone pairs."""
    tol, trials = _tol(cfg, 1e-9), _trials(cfg, 1000)
    out = []
    for ai, alg in enumerate(_panel(cfg, FUNDAMENTAL_PANEL)):
        worst = 0.0
        for k in range(trials):
            rng = stream(cfg.seed, "fundamental", ai, k)
            x = sample_cone(alg, rng, cfg.spread)
            y = sample_cone(alg, rng, cfg.spread)
            Px = quadratic_rep(x)
            rhs = Px @ quadratic_rep(y) @ Px
            worst = max(worst, _rel(quadratic_rep(Px(y)), rhs))
        out.append(_report("fundamental", alg, trials, worst, tol))
    return out


def suite_thm12(cfg: RunConfig) -> list:
    """Scaling points of the barrier family and the identities they satisfy."""
    tol = cfg.tol
    tol_res = 1e-9 if tol is None else tol
    tol_fac = 1e-8 if tol is None else tol
    trials = _trials(cfg, 200)
    out = []
    for ai, alg in enumerate(_panel(cfg, SCALING_PANEL)):
        w_res = w_fac = w_aut = w_ups = 0.0
        for k in range(trials):
            rng = stream(cfg.seed, "thm12", ai, k)
            spec = bar.random_spec(alg, rng)
            x = sample_cone(alg, rng, cfg.spread)
            s = sample_cone(alg, rng, cfg.spread)
            z = sample_cone(alg, rng, cfg.spread)
            rep = bar.barrier_scaling_point(spec, x, s)
            w_res = max(w_res, rep.residual)
            Hw = bar.barrier_hessian(spec, rep.w)
            rhs = Hw @ bar.barrier_hessian(spec, s) @ Hw
            w_fac = max(w_fac, _rel(bar.barrier_hessian(spec, x), rhs))
            hz = Hw(z)
            w_aut = max(w_aut, max(0.0, -float(eigenvalues(hz).min())) / norm(hz))
            wf = geo.scaling_point(x, s)
            ups_s = bar.upsilon(spec, s, check_tol=None)
            w_ups = max(w_ups,
                        _rel(bar.upsilon(spec, rep.w, check_tol=None), wf),
                        _rel(bar.upsilon(spec, x, check_tol=None), quadratic_rep(wf)(ups_s)))
        out.append(_report("family-scaling-residual", alg, trials, w_res, tol_res))
        out.append(_report("family-hessian-factorization", alg, trials, w_fac, tol_fac))
        out.append(_report("family-hessian-automorphism", alg, trials, w_aut, tol_fac))
        out.append(_report("upsilon-chain", alg, trials, w_ups, tol_fac))
    return out


def suite_geomean(cfg: RunConfig) -> list:
    """Properties (a)-(e) of the geometric mean and the midpoint property."""
    tol, trials = _tol(cfg, 1e-8), _trials(cfg, 500)
    names = ["geo-mean-a", "geo-mean-b", "geo-mean-c", "geo-mean-d", "geo-mean-e",
             "geo-mean-midpoint", "geodesic-endpoints"]
    out = []
    for ai, alg in enumerate(_panel(cfg, GEOMEAN_PANEL)):
        worst = dict.fromkeys(names, 0.0)
        for k in range(trials):
            rng = stream(cfg.seed, "geo-mean", ai, k)
            a = sample_cone(alg, rng, cfg.spread)
            b = sample_cone(alg, rng, cfg.spread)
            c = sample_cone(alg, rng, cfg.spread)
            m = geo.geometric_mean(a, b)
            v = {}
            v["geo-mean-a"] = _rel(quadratic_rep(m)(inverse(a)), b)
            v["geo-mean-b"] = _rel(geo.geometric_mean(b, a), m)
            v["geo-mean-c"] = _rel(geo.geometric_mean(inverse(a), inverse(b)), inverse(m))
            a_sqrt = quadratic_rep(spectral_map(a, np.sqrt))
            a_isqrt = quadratic_rep(spectral_map(a, lambda t: 1 / np.sqrt(t)))
            middle = ver.operator_sqrt(a_isqrt @ quadratic_rep(b) @ a_isqrt)
            v["geo-mean-d"] = _rel(a_sqrt @ middle @ a_sqrt, quadratic_rep(m))
            worst_e = 0.0
            for g in (quadratic_rep(c), ver.random_automorphism(alg, rng) @ quadratic_rep(c)):
                worst_e = max(worst_e, _rel(geo.geometric_mean(g(a), g(b)), g(m)))
            v["geo-mean-e"] = worst_e
            d = geo.riemannian_distance(a, b)
            v["geo-mean-midpoint"] = max(abs(geo.riemannian_distance(a, m) - d / 2),
                                         abs(geo.riemannian_distance(m, b) - d / 2)) / d
            v["geodesic-endpoints"] = max(_rel(geo.geodesic(a, b, 0.0), a),
                                          _rel(geo.geodesic(a, b, 1.0), b))
            for key, val in v.items():
                worst[key] = max(worst[key], val)
        out.extend(_report(key, alg, trials, worst[key], tol) for key in names)
    return out


def self_scaled_specs(alg: Algebra) -> list:
    """Unit weights, weights 2.5, and mixed weights of at least one."""
    r = len(alg.parts)
    mixed = (1.7,) if r == 1 else tuple(1.3 + 1.8 * i for i in range(r))
    return [bar.BarrierSpec(alg, 0.0, (1.0,) * r),
            bar.BarrierSpec(alg, -0.4, (2.5,) * r),
            bar.BarrierSpec(alg, 1.1, mixed)]


def suite_self_scaled(cfg: RunConfig) -> list:
    tol, trials = _tol(cfg, 1e-8), _trials(cfg, 1000)
    out = []
    for ai, alg in enumerate(_panel(cfg, SELF_SCALED_PANEL)):
        for si, spec in enumerate(self_scaled_specs(alg)):
            seed = int(stream(cfg.seed, "self-scaled", ai, si).integers(2**31))
            out.append(bar.check_self_scaled(spec, trials, tol, seed, cfg.spread))
    return out


def suite_decrement(cfg: RunConfig) -> list:
    """Squared Newton decrement equals ``nu`` at every sampled point."""
    tol, trials = _tol(cfg, 1e-9), _trials(cfg, 1000)
    out = []
    for ai, alg in enumerate(_panel(cfg, SELF_SCALED_PANEL)):
        for si, spec in enumerate(self_scaled_specs(alg)):
            worst = 0.0
            for k in range(trials):
                x = sample_cone(alg, stream(cfg.seed, "decrement", ai, si, k), cfg.spread)
                worst = max(worst, abs(bar.newton_decrement_sq(spec, x) - spec.nu))
            out.append(_report("newton-decrement", alg, trials, worst, tol,
                               weights=list(spec.weights), nu=spec.nu))
    return out


def suite_polar(cfg: RunConfig) -> list:
    """Compose ``omega o P(w^(-1))`` and recover ``(omega, w)``."""
    tol, trials = _tol(cfg, 1e-8), _trials(cfg, 200)
    out = []
    for ai, alg in enumerate(_panel(cfg, POLAR_PANEL)):
        worst, worst_orth = 0.0, 0.0
        for k in range(trials):
            rng = stream(cfg.seed, "polar", ai, k)
            omega = ver.random_automorphism(alg, rng)
            w = sample_cone(alg, rng, cfg.spread)
            res = ver.polar_decompose(omega @ quadratic_rep(inverse(w)))
            worst = max(worst, _rel(res.omega, omega), _rel(res.w, w), res.residual)
            worst_orth = max(worst_orth, res.orthogonality)
        out.append(_report("polar", alg, trials, max(worst, worst_orth), tol,
                           recovery=worst, orthogonality=worst_orth))
    return out


def suite_nondefective(cfg: RunConfig) -> list:
    """Products of SPD pairs lie in K, and every element of K factors back."""
    tol, trials = _tol(cfg, 1e-8), _trials(cfg, 500)
    sizes = [cfg.n] if cfg.n else list(range(2, 9))
    worst_spec, fail_k, worst_res, fail_spd = 0.0, 0, 0.0, 0
    for k in range(trials):
        n = sizes[k % len(sizes)]
        rng = stream(cfg.seed, "nondefective", k)
        N = ver.sample_k(n, rng, cfg.spread)
        vals = np.linalg.eigvals(N)
        scale = np.abs(vals).max()
        worst_spec = max(worst_spec, np.abs(vals.imag).max() / scale,
                         max(0.0, -vals.real.min()) / scale)
        if not ver.in_k(N):
            fail_k += 1
            continue
        X, S = ver.factor_nondefective(N)
        worst_res = max(worst_res, np.linalg.norm(X @ S - N) / np.linalg.norm(N))
        if not (ver.is_spd(X) and ver.is_spd(S)):
            fail_spd += 1
    direction1 = CheckReport("products-in-K", trials, float(worst_spec), fail_k == 0,
                             tol, details={"sizes": sizes, "not_in_K": fail_k})
    direction2 = CheckReport("k-factorization", trials, float(worst_res),
                             bool(worst_res <= tol and fail_spd == 0), tol,
                             details={"sizes": sizes, "non_spd_factors": fail_spd})
    return [direction1, direction2]


def suite_lie_span(cfg: RunConfig) -> list:
    sizes = [cfg.n] if cfg.n else list(range(2, 7))
    out = []
    for n in sizes:
        rep = ver.lie_span_probe(n, cfg.samples, stream(cfg.seed, "lie-span", n))
        out.append(CheckReport("lie-span", rep.samples_used, float(rep.target - rep.span_dimension),
                               rep.full, 0.0,
                               details={"n": n, "span_dimension": rep.span_dimension,
                                        "target": rep.target, "samples_used": rep.samples_used}))
    worst, count = 0.0, 0
    for n in range(2, max(sizes) + 1):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                _, skew = ver.basis_skew_generator(i, j, n)
                E = np.zeros((n, n))
                E[i - 1, j - 1], E[j - 1, i - 1] = 1.0, -1.0
                worst = max(worst, np.abs(skew - E).max())
                count += 1
    out.append(CheckReport("basis-skew", count, float(worst), worst == 0.0, 0.0,
                           details={"max_n": max(sizes)}))
    return out


def suite_isotropy(cfg: RunConfig) -> list:
    """Rotations from K move every non-scalar SPD matrix and fix scalar ones."""
    trials = _trials(cfg, 20)
    threshold = 1e-2
    tol_scalar = _tol(cfg, 1e-12)
    sizes = [cfg.n] if cfg.n else [2, 3, 4, 5]
    gens = {n: ver.rotation_generators(n, 10, stream(cfg.seed, "isotropy-gens", n)) for n in sizes}
    min_cert, max_scalar, worst_recover = np.inf, 0.0, 0.0
    for k in range(trials):
        n = sizes[k % len(sizes)]
        rng = stream(cfg.seed, "isotropy", k)
        M = ver.random_spd(n, rng, cfg.spread)
        min_cert = min(min_cert, ver.isotropy_certificate(M, gens[n], seed=rng))
        lam = float(rng.uniform(0.1, 10.0))
        L = lam * np.eye(n)
        cert = ver.isotropy_certificate(L, gens[n], seed=rng)
        max_scalar = max(max_scalar, cert)
        if cert <= 1e-9:
            worst_recover = max(worst_recover, np.linalg.norm(L - ver.scalar_part(L) * np.eye(n)))
    return [
        CheckReport("isotropy-nonscalar", trials, float(max(0.0, threshold - min_cert)),
                    bool(min_cert > threshold), 0.0,
                    details={"min_certificate": float(min_cert), "threshold": threshold}),
        CheckReport("isotropy-scalar", trials, float(max_scalar), bool(max_scalar <= tol_scalar),
                    tol_scalar, details={"scalar_recovery": float(worst_recover)}),
    ]


def suite_alpha(cfg: RunConfig) -> list:
    trials = _trials(cfg, 500)
    tol = _tol(cfg, 1e-8)
    out = []
    for ai, alg in enumerate(_panel(cfg, [SymMatrix(3), SpinFactor(4)])):
        for lam in (1.0, 3.0):
            seed = int(stream(cfg.seed, "alpha", ai, int(lam * 1000)).integers(2**31))
            out.append(ver.alpha_mechanism_check(lam, alg, trials, seed, tol=tol, spread=cfg.spread))
    return out


def suite_classification(cfg: RunConfig) -> list:
    """``H''(x) F''(x)^(-1) = c id`` on irreducible cones, plus ``Y(x) = P(x^(1/2)) Y(e)``."""
    tol, trials = _tol(cfg, 1e-8), _trials(cfg, 100)
    out = []
    for ai, alg in enumerate(_panel(cfg, IRREDUCIBLE_PANEL)):
        if len(alg.parts) != 1:
            continue
        weight_rng = stream(cfg.seed, "classification-weights", ai)
        for c in (1.0, 2.5, 0.5, float(weight_rng.uniform(1.0, 10.0))):
            spec = bar.BarrierSpec(alg, 0.0, (c,))
            worst = worst_ups = 0.0
            for k in range(trials):
                x = sample_cone(alg, stream(cfg.seed, "classification", ai, k), cfg.spread)
                worst = max(worst, ver.hessian_ratio_deviation(spec, x))
                ups_e = bar.upsilon(spec, alg.e, check_tol=None)
                mech = quadratic_rep(spectral_map(x, np.sqrt))(ups_e)
                worst_ups = max(worst_ups, _rel(bar.upsilon(spec, x), mech))
            out.append(_report("hessian-proportional", alg, trials, worst, tol, weight=c))
            out.append(_report("upsilon-mechanism", alg, trials, worst_ups, tol, weight=c))
    return out


def suite_refutation(cfg: RunConfig) -> list:
    """Newton-decrement lower bound for ``lam F + <Y, .>`` grows along ``X = t I`` unless ``Y = 0``."""
    trials = _trials(cfg, 20)
    sizes = [cfg.n] if cfg.n else [2, 3, 4]
    ts = (10.0, 100.0, 1000.0)
    fails, worst_zero = [], 0.0
    ratio_min = np.inf
    for k in range(trials):
        n = sizes[k % len(sizes)]
        alg = SymMatrix(n)
        rng = stream(cfg.seed, "refutation", k)
        lam = float(rng.uniform(0.5, 3.0))
        nu = lam * n
        Y = alg.element(rng.standard_normal(alg.dim))
        vals = [bar.perturbed_decrement_bound(t * alg.e, Y, lam) for t in ts]
        ratio_min = min(ratio_min, vals[-1] / (10 * nu))
        if not (vals[0] < vals[1] < vals[2] and vals[-1] > 10 * nu):
            fails.append(k)
        zero_vals = [bar.perturbed_decrement_bound(t * alg.e, alg.zeros(), lam) for t in ts]
        worst_zero = max(worst_zero, max(abs(v - nu) / nu for v in zero_vals))
    return [
        CheckReport("refutation-growth", trials, float(len(fails)), not fails, 0.0,
                    witness={"trials": fails} if fails else None,
                    details={"min_ratio_to_10nu": float(ratio_min), "t": list(ts)}),
        CheckReport("refutation-zero", trials, float(worst_zero), worst_zero <= 1e-14, 1e-14),
    ]


def ipm_instances():
    return [("sdp2x2", ipm.sdp_2x2(), 1.0),
            ("lp-embedding", ipm.lp_example(), 1.0),
            ("soc-toy", ipm.soc_toy(), 5.0)]


def suite_ipm(cfg: RunConfig) -> list:
    """Solve the three analytic instances; absolute gap, value and Nesterov-Todd residual at each iterate.

    The solver stops on a relative gap, so it runs at a tenth of ``tol`` to
    bring the absolute gap under ``tol``.
    """
    tol = _tol(cfg, 1e-6)
    out = []
    for name, prog, value in ipm_instances():
        rep = ipm.solve(prog, tol=0.1 * tol, max_iters=50)
        nt = max(r.get("nt_residual", 0.0) for r in rep.trace)
        gap = rep.gap
        err = abs(rep.primal_objective - value)
        ok = rep.status == "optimal" and gap <= tol and nt <= 1e-8 and err <= tol
        out.append(CheckReport(f"ipm-{name}", rep.iterations, float(max(gap, err)), bool(ok), tol,
                               details={"status": rep.status, "objective": rep.primal_objective,
                                        "expected": value, "gap": gap, "nt_residual_max": nt,
                                        "gap_trace": [r["gap"] for r in rep.trace]}))
    return out


SUITES = {
    "fundamental": suite_fundamental,
    "thm12": suite_thm12,
    "geo-mean": suite_geomean,
    "self-scaled": suite_self_scaled,
    "polar": suite_polar,
    "nondefective": suite_nondefective,
    "lie-span": suite_lie_span,
    "isotropy": suite_isotropy,
    "alpha": suite_alpha,
    "classification": suite_classification,
    "decrement": suite_decrement,
    "refutation": suite_refutation,
    "ipm": suite_ipm,
}


def run_suite(name: str, cfg: RunConfig | None = None) -> list:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](cfg or RunConfig())


__all__ = ["RunConfig", "SUITES", "run_suite", "stream"]
