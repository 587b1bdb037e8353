"""Optimizers behind the figure-level questions.

Minimal symmetric power and minimal conference capacity are found by outer
bisection over a monotone feasibility predicate.  The quantizer scheme's
inner feasibility is a deterministic multistart compass search over its free
parameters (rates boxed to [0, 8] bits, splits to [0, 1]), run on three
nested families: the no-conference slice, the unlimited-conference slice
(when applicable), and the full parameter set.  The slice searches make the
scheme orderings robust: every configuration reachable at zero conference
capacity is polled verbatim when the capacity is larger.

All schedules are fixed, so identical inputs give identical results,
iteration counts included.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import bounds, separation, vqscheme
from .model import (
    UNLIMITED,
    ChannelSpec,
    DistortionPair,
    DomainError,
    SourceSpec,
    is_unlimited,
)
from .rdlib import rd_joint
from ._mc import halton_points
from ._opt import compass_search_max, refine_grid_max

SLACK_TOL = -1e-9
RATE_BOX_BITS = 8.0
_STOP_AT = 1e-7  # early-exit slack for pure feasibility queries


class UnboundedError(RuntimeError):
    """No feasible point below the configured ceiling."""


class Scheme(enum.Enum):
    VQ = "vq"
    SEP1 = "sep1"
    SEP2 = "sep2"
    NECESSARY = "necessary"
    FULL_COOP = "fullcoop"


@dataclass(frozen=True)
class OptimizationResult:
    objective: float
    witness: dict
    iterations: int
    converged: bool
    bracket: tuple[float, float]


def _vq_slack_core(src: SourceSpec, ch: ChannelSpec, target: DistortionPair,
                   r1, r2, rc, b1, b2) -> np.ndarray:
    """Worst slack (bits) of the full scheme at explicit parameter arrays."""
    _, _, bnd = vqscheme._raw_quantities(
        src.sigma2, src.rho, ch.p1, ch.p2, ch.n0, r1, r2, rc, b1, b2)
    combos = {
        "r1": r1, "r2": r2, "rc": rc, "r1+r2": r1 + r2, "r1+rc": r1 + rc,
        "r2+rc": r2 + rc, "r1+r2+rc": r1 + r2 + rc,
    }
    slack = np.minimum.reduce([bnd[name] - combos[name] for name in combos])
    if not is_unlimited(ch.c12):
        req, _ = vqscheme._conf_requirement_arrays(src.rho, r1, rc)
        slack = np.minimum(slack, ch.c12 - req)
    d1a, d2a = vqscheme._distortion_arrays(src.rho, r1, r2, rc)
    slack = np.minimum(slack, 0.5 * (math.log2(target.d1) - np.log2(d1a)))
    slack = np.minimum(slack, 0.5 * (math.log2(target.d2) - np.log2(d2a)))
    return slack


def _vq_slack_batch(src: SourceSpec, ch: ChannelSpec, target: DistortionPair,
                    pts: np.ndarray, rate_cap: float) -> np.ndarray:
    """Box points (r1, r2, rc, b1, b2) with rates scaled by ``rate_cap``."""
    return _vq_slack_core(src, ch, target, pts[:, 0] * rate_cap,
                          pts[:, 1] * rate_cap, pts[:, 2] * rate_cap,
                          pts[:, 3], pts[:, 4])


def _rc_budget(rho: float, r1: np.ndarray, c12: float) -> np.ndarray:
    """Largest shared rate whose conference requirement fits the budget.

    The requirement ``rc - binning(r1, rc)`` is strictly increasing in ``rc``
    (for rho < 1), so the saturating rate is found by bisection on the
    bracket [c12, c12 + binning cap].
    """
    r1 = np.asarray(r1, dtype=float)
    lo = np.full_like(r1, c12)
    cap = -0.5 * np.log2(np.maximum(1.0 - rho**2 * 2.0 ** (-2.0 * r1), 1e-300))
    hi = c12 + cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        req, _ = vqscheme._conf_requirement_arrays(rho, r1, mid)
        take = req <= c12
        lo = np.where(take, mid, lo)
        hi = np.where(take, hi, mid)
    return lo


def _vq_slack_batch_budget(src: SourceSpec, ch: ChannelSpec, target: DistortionPair,
                           pts: np.ndarray, rate_cap: float, c12: float) -> np.ndarray:
    """Box points (r1, r2, t, b1, b2); the shared rate is ``t`` times the
    budget-saturating rate, so the conference constraint holds by construction
    (and is dropped from the objective, else it would pin the max-min at 0 on
    the saturated surface) and the search moves freely along it."""
    r1 = pts[:, 0] * rate_cap
    rc = pts[:, 2] * _rc_budget(src.rho, r1, c12)
    ch_free = ChannelSpec(ch.p1, ch.p2, ch.n0, UNLIMITED)
    return _vq_slack_core(src, ch_free, target, r1, pts[:, 1] * rate_cap, rc,
                          pts[:, 3], pts[:, 4])


def _vq_unlimited_slack_batch(src: SourceSpec, ch: ChannelSpec, target: DistortionPair,
                              pts: np.ndarray, rate_cap: float) -> np.ndarray:
    """Worst slack on the unlimited-conference slice, points (r2, rc, beta)."""
    r2 = pts[:, 0] * rate_cap
    rc = pts[:, 1] * rate_cap
    beta = pts[:, 2]
    bnd, d1a, d2a, _ = vqscheme._unlimited_raw(
        src.sigma2, src.rho, ch.p1, ch.p2, ch.n0, r2, rc, beta)
    slack = np.minimum.reduce([bnd["r2"] - r2, bnd["rc"] - rc, bnd["r2+rc"] - (r2 + rc)])
    slack = np.minimum(slack, 0.5 * (math.log2(target.d1) - np.log2(d1a)))
    slack = np.minimum(slack, 0.5 * (math.log2(target.d2) - np.log2(d2a)))
    return slack


class _VqFeasibility:
    """Scheme feasibility with warm-started searches across repeated queries."""

    def __init__(self, src: SourceSpec, target: DistortionPair,
                 rate_cap: float = RATE_BOX_BITS):
        self.src = src
        self.target = target
        self.rate_cap = rate_cap
        self.warm5: np.ndarray | None = None
        self.warm3: np.ndarray | None = None
        self.witness: vqscheme.VqConfig | None = None

    def _run(self, f, dim, warm, saturated_axis: int | None = None):
        base = halton_points(16, dim)
        starts = [base]
        if saturated_axis is not None:
            boundary = base.copy()
            boundary[:, saturated_axis] = 1.0  # optima sit on the active budget surface
            starts.append(boundary)
        if dim == 5:
            # no-conference and unlimited-slice corners help the full search
            starts.append(np.array([[0.3, 0.3, 0.0, 0.0, 0.0],
                                    [0.0, 0.3, 0.3, 1.0, 0.5]]))
        if warm is not None:
            starts.append(warm[None, :])
        val, pt, _ = compass_search_max(f, np.vstack(starts), stop_at=_STOP_AT)
        if -0.3 <= val < _STOP_AT:
            # grid refinement climbs the max-min ridges that axis polls miss;
            # skipped when the compass value is hopeless
            rval, rpt = refine_grid_max(f, pt, stop_at=_STOP_AT)
            if rval > val:
                val, pt = rval, rpt
        return val, pt

    def __call__(self, p1: float, p2: float, n0: float, c12) -> bool:
        src, target, cap = self.src, self.target, self.rate_cap
        ch = ChannelSpec(p1, p2, n0, c12)
        best_val = -math.inf
        best_cfg = None

        if not is_unlimited(c12) and c12 == 0.0:
            # only the no-conference slice is reachable
            def f2(pts):
                full = np.zeros((pts.shape[0], 5))
                full[:, :2] = pts
                return _vq_slack_batch(src, ch, target, full, cap)
            warm = self.warm5[:2] if self.warm5 is not None else None
            val, pt = self._run(f2, 2, warm)
            best_val = val
            best_cfg = vqscheme.VqConfig(pt[0] * cap, pt[1] * cap, 0.0, 0.0, 0.0)
            self.warm5 = np.array([pt[0], pt[1], 0.0, 0.0, 0.0])
        elif is_unlimited(c12):
            val, pt = self._run(
                lambda pts: _vq_unlimited_slack_batch(src, ch, target, pts, cap),
                3, self.warm3)
            best_val = val
            best_cfg = vqscheme.VqConfig(0.0, pt[0] * cap, pt[1] * cap, 1.0, pt[2])
            self.warm3 = pt
            if best_val < _STOP_AT:
                val, pt = self._run(
                    lambda pts: _vq_slack_batch(src, ch, target, pts, cap),
                    5, self.warm5)
                if val > best_val:
                    best_val = val
                    best_cfg = vqscheme.VqConfig(pt[0] * cap, pt[1] * cap, pt[2] * cap,
                                                 pt[3], pt[4])
                self.warm5 = pt
        else:
            # generous budgets first: the unlimited-slice optimum may already
            # fit within c12, a basin the budget-saturating search undercovers
            val3, pt3 = self._run(
                lambda pts: _vq_unlimited_slack_batch(src, ch, target, pts, cap),
                3, self.warm3)
            self.warm3 = pt3
            req3, _ = vqscheme._conf_requirement_arrays(src.rho, 0.0, pt3[1] * cap)
            best_val = min(val3, c12 - float(req3))
            best_cfg = vqscheme.VqConfig(0.0, pt3[0] * cap, pt3[1] * cap, 1.0, pt3[2])

            if best_val < _STOP_AT:
                # budget-saturating parameterization: third coordinate is the
                # fraction of the largest shared rate the budget admits
                f5 = lambda pts: _vq_slack_batch_budget(src, ch, target, pts, cap, c12)
                warm4 = (np.delete(self.warm5, 2) if self.warm5 is not None else None)
                val, pt = self._run(f5, 5, self.warm5, saturated_axis=2)
                self.warm5 = pt
                best_pt = None
                if val > best_val:
                    best_val = val
                    best_pt = pt
                if best_val < _STOP_AT:
                    # optima with an active budget sit on the t = 1 slice
                    def f4(pts):
                        full = np.insert(pts, 2, 1.0, axis=1)
                        return f5(full)
                    val, pt4 = self._run(f4, 4, warm4)
                    if val > best_val:
                        best_val = val
                        best_pt = np.insert(pt4, 2, 1.0)
                if best_pt is not None:
                    rc = float(best_pt[2] * _rc_budget(src.rho, np.asarray(best_pt[0] * cap), c12))
                    best_cfg = vqscheme.VqConfig(best_pt[0] * cap, best_pt[1] * cap, rc,
                                                 best_pt[3], best_pt[4])

        if best_val >= SLACK_TOL:
            self.witness = best_cfg
            return True
        return False


def _vq_witness_ok(src: SourceSpec, ch: ChannelSpec, cfg: vqscheme.VqConfig,
                   target: DistortionPair) -> bool:
    """Closed-form re-validation of a search witness (slack tolerance -1e-9 bits)."""
    report = vqscheme.vq_rate_region(src, ch, cfg, margin=SLACK_TOL)
    ach = vqscheme.vq_distortion(src, cfg)
    bits = min(0.5 * (math.log2(target.d1) - math.log2(ach.d1)),
               0.5 * (math.log2(target.d2) - math.log2(ach.d2)))
    return report.feasible and bits >= SLACK_TOL


def _expand_and_bisect(predicate, start: float, ceiling: float, tol_rel: float,
                       tol_abs: float = 0.0) -> tuple[float, float, int]:
    """Find the feasibility threshold of a monotone predicate by doubling + bisection."""
    iterations = 0
    lo, hi = 0.0, start
    while not predicate(hi):
        lo = hi
        hi *= 2.0
        iterations += 1
        if hi > ceiling:
            raise UnboundedError(f"infeasible below ceiling {ceiling:g}")
    while hi - lo > tol_rel * hi + tol_abs and iterations < 200:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
        iterations += 1
    return lo, hi, iterations


def min_power_symmetric(src: SourceSpec, scheme: Scheme, target: DistortionPair,
                        c12=UNLIMITED, n0: float = 1.0, tol: float = 1e-6,
                        p_ceiling: float | None = None) -> OptimizationResult:
    """Least symmetric power ``p1 = p2 = p`` at which the scheme meets the target.

    Outer bisection over the scheme's feasibility predicate, which is monotone
    in power (raising the power only enlarges every bound).  ``tol`` is the
    relative bracket width; ``p_ceiling`` (default ``1e6 n0``) bounds the
    search and triggers :class:`UnboundedError` when exceeded.
    """
    if p_ceiling is None:
        p_ceiling = 1e6 * n0
    if target.d1 >= 1.0 and target.d2 >= 1.0:
        return OptimizationResult(0.0, {}, 0, True, (0.0, 0.0))

    if scheme is Scheme.FULL_COOP:
        need = rd_joint(src, target)
        p = (4.0**need - 1.0) * n0 / 4.0
        return OptimizationResult(p, {"joint_rate": need}, 0, True, (p, p))

    witness_out: dict = {}
    if scheme is Scheme.VQ:
        inner = _VqFeasibility(src, target)

        def predicate(p: float) -> bool:
            return inner(p, p, n0, c12)
    elif scheme is Scheme.NECESSARY:
        def predicate(p: float) -> bool:
            return bounds.necessary_condition(src, ChannelSpec(p, p, n0, c12), target).feasible
    elif scheme is Scheme.SEP1:
        def predicate(p: float) -> bool:
            return separation.sep1_feasible(src, ChannelSpec(p, p, n0, c12), target).feasible
    elif scheme is Scheme.SEP2:
        def predicate(p: float) -> bool:
            return separation.sep2_feasible(src, ChannelSpec(p, p, n0, c12), target).feasible
    else:
        raise DomainError("scheme", f"unsupported scheme {scheme}")

    lo, hi, iterations = _expand_and_bisect(predicate, n0, p_ceiling, tol)

    # the witness from the last feasible query certifies hi exactly
    if scheme is Scheme.VQ:
        cfg = inner.witness
        if cfg is None or not _vq_witness_ok(src, ChannelSpec(hi, hi, n0, c12), cfg, target):
            raise AssertionError("bisection invariant violated: witness fails at hi")
        ach = vqscheme.vq_distortion(src, cfg)
        witness_out = {
            "r1": cfg.r1, "r2": cfg.r2, "rc": cfg.rc,
            "beta1": cfg.beta1, "beta2": cfg.beta2,
            "d1": ach.d1, "d2": ach.d2,
        }
    elif not predicate(hi):  # stateless predicates: re-validate directly
        raise AssertionError("bisection invariant violated: hi not feasible")
    if scheme is Scheme.NECESSARY:
        witness_out = dict(bounds.necessary_condition(
            src, ChannelSpec(hi, hi, n0, c12), target).witness)
    elif scheme in (Scheme.SEP1, Scheme.SEP2):
        fn = separation.sep1_feasible if scheme is Scheme.SEP1 else separation.sep2_feasible
        witness_out = dict(fn(src, ChannelSpec(hi, hi, n0, c12), target).witness)

    return OptimizationResult(hi, witness_out, iterations, True, (lo, hi))


def min_conf_capacity(src: SourceSpec, ch_powers: ChannelSpec, scheme: Scheme,
                      target: DistortionPair, tol: float = 1e-6) -> OptimizationResult:
    """Least conference capacity at which the scheme meets the target.

    Powers and noise come from ``ch_powers`` (its own ``c12`` is ignored).
    Raises :class:`UnboundedError` when even unlimited capacity fails.
    """
    p1, p2, n0 = ch_powers.p1, ch_powers.p2, ch_powers.n0

    if scheme is Scheme.VQ:
        inner = _VqFeasibility(src, target)

        def predicate_at(c) -> bool:
            return inner(p1, p2, n0, c)
    elif scheme is Scheme.SEP1:
        def predicate_at(c) -> bool:
            return separation.sep1_feasible(
                src, ChannelSpec(p1, p2, n0, c), target).feasible
    else:
        raise DomainError("scheme", f"conference search supports VQ and SEP1, got {scheme}")

    if not predicate_at(UNLIMITED):
        raise UnboundedError("target infeasible even with unlimited conference capacity")
    if predicate_at(0.0):
        return OptimizationResult(0.0, {}, 0, True, (0.0, 0.0))

    lo, hi, iterations = _expand_and_bisect(
        lambda c: predicate_at(c), 1.0, 300.0, 0.0, tol_abs=tol)

    witness: dict = {}
    if scheme is Scheme.VQ:
        cfg = inner.witness
        if cfg is None or not _vq_witness_ok(src, ChannelSpec(p1, p2, n0, hi), cfg, target):
            raise AssertionError("bisection invariant violated: witness fails at hi")
        req, _ = vqscheme.vq_conf_requirement(src, cfg)
        witness = {"r1": cfg.r1, "r2": cfg.r2, "rc": cfg.rc,
                   "beta1": cfg.beta1, "beta2": cfg.beta2, "required_c12": req}
    else:
        if not predicate_at(hi):
            raise AssertionError("bisection invariant violated: hi not feasible")
        witness = dict(separation.sep1_feasible(
            src, ChannelSpec(p1, p2, n0, hi), target).witness)
    return OptimizationResult(hi, witness, iterations, True, (lo, hi))


def min_d1_unlimited(src: SourceSpec, ch_powers: ChannelSpec, d2_target: float,
                     tol: float = 1e-7) -> OptimizationResult:
    """Smallest ``d1`` the unlimited-conference scheme reaches at ``d2 <= d2_target``.

    Bisection on ``log2 d1`` with the unlimited-slice feasibility search; the
    rate box grows with the coherent sum capacity so high-SNR operating
    points stay reachable.
    """
    p1, p2, n0 = ch_powers.p1, ch_powers.p2, ch_powers.n0
    rate_cap = 0.5 * math.log2(1.0 + (p1 + p2 + 2.0 * math.sqrt(p1 * p2)) / n0) + 1.0
    warm: dict = {"pt": None}

    def feasible(d1: float) -> bool:
        target = DistortionPair(d1, d2_target)
        ch = ChannelSpec(p1, p2, n0, UNLIMITED)
        starts = [halton_points(16, 3)]
        if warm["pt"] is not None:
            starts.append(warm["pt"][None, :])
        val, pt, _ = compass_search_max(
            lambda pts: _vq_unlimited_slack_batch(src, ch, target, pts, rate_cap),
            np.vstack(starts), stop_at=_STOP_AT)
        if val >= SLACK_TOL:
            warm["pt"] = pt
            return True
        return False

    if not feasible(1.0):
        raise UnboundedError("even d1 = 1 infeasible at these powers")
    lo_log = -2.0 * (rate_cap + 2.0)
    hi_log = 0.0
    iterations = 0
    while hi_log - lo_log > tol and iterations < 200:
        mid = 0.5 * (lo_log + hi_log)
        if feasible(2.0**mid):
            hi_log = mid
        else:
            lo_log = mid
        iterations += 1
    d1 = 2.0**hi_log
    pt = warm["pt"]
    witness = {}
    if pt is not None:
        witness = {"r2": pt[0] * rate_cap, "rc": pt[1] * rate_cap, "beta": pt[2]}
    return OptimizationResult(d1, witness, iterations, True, (2.0**lo_log, d1))


class CurveKind(enum.Enum):
    PMIN_VS_ALPHA = "pmin-vs-alpha"
    C12_VS_ALPHA = "c12-vs-alpha"
    D1D2_VS_SNR = "d1d2-vs-snr"


# trace scheme tokens -> (Scheme, c12 override); None means use the --c12 value
TRACE_SCHEMES = {
    "vq": (Scheme.VQ, None),
    "vq-unlimited": (Scheme.VQ, UNLIMITED),
    "vq-none": (Scheme.VQ, 0.0),
    "sep1": (Scheme.SEP1, None),
    "sep2": (Scheme.SEP2, None),
    "necessary": (Scheme.NECESSARY, None),
    "fullcoop": (Scheme.FULL_COOP, None),
}


def trace_curve(kind: CurveKind, params: dict, grid) -> list[dict]:
    """One row per grid point; per-row failures are recorded, not raised.

    ``params`` carries the fixed problem data: ``rho``, ``n0``, ``d2``,
    ``schemes`` (list of trace tokens) and ``c12`` for PMIN_VS_ALPHA;
    additionally ``p`` for C12_VS_ALPHA; ``rho``, ``d2`` for D1D2_VS_SNR.
    """
    grid = [float(g) for g in grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid", "must be nonempty and strictly increasing")
    src = SourceSpec(params.get("sigma2", 1.0), params["rho"])
    n0 = params.get("n0", 1.0)
    tol = params.get("tol", 1e-9)
    rows = []

    if kind is CurveKind.PMIN_VS_ALPHA:
        d2 = params["d2"]
        tokens = params.get("schemes", ["fullcoop", "necessary", "vq-unlimited", "vq-none"])
        for alpha in grid:
            row = {"alpha": alpha, "d1": alpha * d2, "d2": d2}
            errors = []
            target = DistortionPair(alpha * d2, d2)
            for token in tokens:
                scheme, c12 = TRACE_SCHEMES[token]
                if c12 is None:
                    c12 = params.get("c12", UNLIMITED)
                try:
                    res = min_power_symmetric(src, scheme, target, c12=c12, n0=n0, tol=tol)
                    row[f"pmin_{token}"] = res.objective
                except UnboundedError as exc:
                    row[f"pmin_{token}"] = math.nan
                    errors.append(f"{token}:UnboundedError:{exc}")
            row["errors"] = ";".join(errors)
            rows.append(row)

    elif kind is CurveKind.C12_VS_ALPHA:
        d2 = params["d2"]
        p = params["p"]
        ch = ChannelSpec(p, p, n0, UNLIMITED)
        tokens = params.get("schemes", ["vq", "sep1"])
        for alpha in grid:
            row = {"alpha": alpha, "d1": alpha * d2, "d2": d2, "p": p}
            errors = []
            target = DistortionPair(alpha * d2, d2)
            for token in tokens:
                scheme, _ = TRACE_SCHEMES[token]
                try:
                    # capacity rows resolve to curve precision, not bisection depth
                    res = min_conf_capacity(src, ch, scheme, target, tol=max(tol, 1e-6))
                    row[f"c12_{token}"] = res.objective
                except UnboundedError as exc:
                    row[f"c12_{token}"] = math.nan
                    errors.append(f"{token}:UnboundedError:{exc}")
            row["errors"] = ";".join(errors)
            rows.append(row)

    elif kind is CurveKind.D1D2_VS_SNR:
        d2 = params["d2"]
        for snr in grid:
            row = {"p_over_n": snr}
            errors = []
            try:
                res = min_d1_unlimited(src, ChannelSpec(snr * n0, snr * n0, n0), d2)
                product = res.objective * d2
                predicted = bounds.semi_symmetric_product(src.rho, snr * n0, n0, d2)
                row.update({"d1d2_vq": product, "d1d2_predicted": predicted,
                            "ratio": product / predicted})
            except UnboundedError as exc:
                row.update({"d1d2_vq": math.nan, "d1d2_predicted": math.nan,
                            "ratio": math.nan})
                errors.append(f"vq-unlimited:UnboundedError:{exc}")
            row["errors"] = ";".join(errors)
            rows.append(row)
    else:
        raise DomainError("kind", f"unknown curve kind {kind}")
    return rows
