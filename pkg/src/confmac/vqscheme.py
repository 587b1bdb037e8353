"""Two-stage vector-quantizer scheme: constants, gains, rate region, distortions.

Encoder 1 quantizes its source component at rate ``r1`` and the residual at
rate ``rc``; the residual description is shared with Encoder 2 over the
conference link (with binning against Encoder 2's side information), so both
encoders superimpose it coherently on the channel.  Encoder 2 quantizes its
own component at rate ``r2``.  ``beta1``/``beta2`` split each encoder's power
between its private description and the shared one.

Everything here is closed-form.  The private ``*_arrays`` helpers broadcast
over numpy arrays so the optimizers can poll many configurations at once; the
public functions are thin scalar wrappers around them.

Degenerate-factor convention: a gain whose formula turns 0/0 because its
power share is zero or its codebook is empty (rate 0, variance factor 0) is
defined as 0 -- the corresponding signal component is absent.  In particular
``rc = 0`` means the shared description is absent: its gains, ``eta`` and
``bar_rho`` all vanish, and the ``rc`` rate bound evaluates to exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ChannelSpec,
    DistortionPair,
    DomainError,
    FeasibilityReport,
    SourceSpec,
    is_unlimited,
)
from .rdlib import DegenerateError

RATE_BOUND_NAMES = ("r1", "r2", "rc", "r1+r2", "r1+rc", "r2+rc", "r1+r2+rc")


@dataclass(frozen=True)
class VqConfig:
    """Free parameters of the scheme: three rates (bits) and two power splits."""

    r1: float
    r2: float
    rc: float
    beta1: float
    beta2: float

    def __post_init__(self):
        for name in ("r1", "r2", "rc"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not (math.isfinite(value) and value >= 0.0):
                raise DomainError(name, f"must be finite and >= 0, got {value}")
        for name in ("beta1", "beta2"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not 0.0 <= value <= 1.0:
                raise DomainError(name, f"must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class VqGains:
    """Channel-input amplitude gains and the shared-component variance."""

    a11: float
    a12: float
    a21: float
    a22: float
    alpha: float
    sigma_v2: float


@dataclass(frozen=True)
class VqConstants:
    tilde_rho: float
    bar_rho: float
    lambda2: float
    eta: float
    lambda_c: float
    lambda12: float
    lambda1c: float
    lambda2c: float


def _half_log2_ratio(num, den):
    """0.5*log2(num/den) with den <= 0 mapped to +inf.

    The rate bounds are used as ``rate < 0.5 log2(num/den)``; in the
    exponentiated form ``den * 4^rate < num`` a nonpositive denominator
    (possible only in extreme corners, via ``lambda_c``) makes the
    constraint vacuous, i.e. the bound is +inf.
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 0.5 * np.log2(np.where(den > 0.0, num, 1.0) / np.where(den > 0.0, den, 1.0))
    return np.where(den > 0.0, out, np.inf)


def _raw_quantities(sigma2, rho, p1, p2, n0, r1, r2, rc, b1, b2):
    """All gains, constants and rate-bound right-hand sides, broadcast over arrays."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    rc = np.asarray(rc, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    s = float(sigma2)

    f1 = -np.expm1(-2.0 * r1 * math.log(2.0))  # 1 - 2^-2r1, accurate near 0
    f2 = -np.expm1(-2.0 * r2 * math.log(2.0))
    fc = -np.expm1(-2.0 * rc * math.log(2.0))
    e1 = 2.0 ** (-2.0 * r1)
    sv2 = s * e1 * fc
    sv = np.sqrt(sv2)
    bb1 = 1.0 - b1
    bb2 = 1.0 - b2

    with np.errstate(divide="ignore", invalid="ignore"):
        a11 = np.where((bb1 * p1 > 0.0) & (f1 > 0.0),
                       np.sqrt(bb1 * p1 / np.where(f1 > 0.0, s * f1, 1.0)), 0.0)
        a12 = np.where((b1 * p1 > 0.0) & (sv2 > 0.0),
                       np.sqrt(b1 * p1 / np.where(sv2 > 0.0, sv2, 1.0)), 0.0)
        a21 = np.where((bb2 * p2 > 0.0) & (f2 > 0.0),
                       np.sqrt(bb2 * p2 / np.where(f2 > 0.0, s * f2, 1.0)), 0.0)
        coh = rho**2 * bb2 * f2
        a22 = np.where(
            sv2 > 0.0,
            np.sqrt(p2 / s)
            * (np.sqrt(coh + s * b2 / np.where(sv2 > 0.0, sv2, 1.0)) - np.sqrt(coh)),
            0.0,
        )

    trho = rho * np.sqrt(f1 * f2)
    brho = rho * np.sqrt(e1 * f2 * fc)
    eta = np.where(sv2 > 0.0, np.sqrt(b1 * p1), 0.0) + a22 * sv

    a_res = 1.0 - trho**2 - brho**2  # residual after both shared correlations
    lam2 = n0**2 * brho**2 * trho**2 * (2.0 + trho**2) / (b2 * p2 * a_res + n0)
    # bar_rho^2 / sigma_v^2 == rho^2 f2 / sigma^2, finite even as sv2 -> 0
    brho2_over_sv2 = rho**2 * f2 / s
    lamc = (
        n0**2
        * brho2_over_sv2
        * (brho**2 * bb1 * p1 - trho**2 * sv2)
        / (eta**2 * a_res + n0 * (1.0 - trho**2))
    )
    lam12 = bb1 * p1 + 2.0 * trho * np.sqrt(bb1 * bb2 * p1 * p2) + bb2 * p2
    # bar_rho^2 / sigma_v == rho^2 f2 sigma_v / sigma^2
    lam1c = (
        bb1 * p1 * (1.0 - trho**2)
        + eta**2 * (1.0 - brho**2)
        - 2.0 * eta * (rho**2 * f2 * sv / s) * np.sqrt(bb1 * p1 * s * f1)
    )
    lam2c = bb2 * p2 + 2.0 * eta * brho * np.sqrt(bb2 * p2) + eta**2

    with np.errstate(divide="ignore", invalid="ignore"):
        frac12 = np.where(lam12 > 0.0, bb2 * p2 * brho**2 / np.where(lam12 > 0.0, lam12, 1.0), 0.0)
        frac2c = np.where(lam2c > 0.0, bb2 * p2 * trho**2 / np.where(lam2c > 0.0, lam2c, 1.0), 0.0)

    bounds = {
        "r1": _half_log2_ratio(bb1 * p1 * a_res + n0 * (1.0 - brho**2), n0 * a_res),
        "r2": _half_log2_ratio(bb2 * p2 * a_res + n0, n0 * a_res + lam2),
        "rc": _half_log2_ratio(eta**2 * a_res + n0 * (1.0 - trho**2), n0 * a_res + lamc),
        "r1+r2": _half_log2_ratio(
            lam12 - bb2 * p2 * brho**2 + n0, (1.0 - frac12) * n0 * (1.0 - trho**2)
        ),
        "r1+rc": _half_log2_ratio((lam1c + n0) * (bb1 * p1 + eta**2), lam1c * n0),
        "r2+rc": _half_log2_ratio(
            lam2c - bb2 * p2 * trho**2 + n0, (1.0 - frac2c) * n0 * (1.0 - brho**2)
        ),
        "r1+r2+rc": _half_log2_ratio(
            lam12 + 2.0 * eta * brho * np.sqrt(bb2 * p2) + eta**2 + n0,
            n0 * (1.0 - trho**2) * (1.0 - brho**2),
        ),
    }
    gains = {"a11": a11, "a12": a12, "a21": a21, "a22": a22, "sv2": sv2}
    consts = {
        "trho": trho, "brho": brho, "lam2": lam2, "eta": eta,
        "lamc": lamc, "lam12": lam12, "lam1c": lam1c, "lam2c": lam2c,
    }
    return gains, consts, bounds


def _distortion_arrays(rho, r1, r2, rc):
    """Normalized distortion pair of the scheme, broadcast over arrays."""
    a = 2.0 ** (-2.0 * (np.asarray(r1, dtype=float) + np.asarray(rc, dtype=float)))
    b = 2.0 ** (-2.0 * np.asarray(r2, dtype=float))
    den = 1.0 - rho**2 * (1.0 - b) * (1.0 - a)
    d1 = a * (1.0 - rho**2 * (1.0 - b)) / den
    d2 = b * (1.0 - rho**2 * (1.0 - a)) / den
    return d1, d2


def _conf_requirement_arrays(rho, r1, rc):
    """(required conference bits, per-symbol log bin size), broadcast over arrays."""
    r1 = np.asarray(r1, dtype=float)
    rc = np.asarray(rc, dtype=float)
    fc = -np.expm1(-2.0 * rc * math.log(2.0))
    binning = -0.5 * np.log2(1.0 - rho**2 * 2.0 ** (-2.0 * r1) * fc)
    return rc - binning, binning


def vq_constants(src: SourceSpec, ch: ChannelSpec, cfg: VqConfig) -> tuple[VqGains, VqConstants]:
    """Amplitude gains and derived constants for one configuration."""
    gains, consts, _ = _raw_quantities(
        src.sigma2, src.rho, ch.p1, ch.p2, ch.n0,
        cfg.r1, cfg.r2, cfg.rc, cfg.beta1, cfg.beta2,
    )
    g = {k: float(v) for k, v in gains.items()}
    c = {k: float(v) for k, v in consts.items()}
    if cfg.rc > 0.0 and g["sv2"] <= 0.0:
        raise DegenerateError("rc > 0 with zero shared-component variance")
    return (
        VqGains(g["a11"], g["a12"], g["a21"], g["a22"], g["a12"] + g["a22"], g["sv2"]),
        VqConstants(c["trho"], c["brho"], c["lam2"], c["eta"],
                    c["lamc"], c["lam12"], c["lam1c"], c["lam2c"]),
    )


def vq_rate_region(src: SourceSpec, ch: ChannelSpec, cfg: VqConfig,
                   margin: float = 0.0) -> FeasibilityReport:
    """Feasibility of a configuration: seven rate bounds plus the conference bound.

    Slacks are ``bound - rate`` in bits.  The inequalities are evaluated as
    closed; callers that need strictness pass ``margin > 0`` and feasibility
    then requires every slack >= margin.  The ``c12`` slack is +inf when the
    conference capacity is unlimited.
    """
    _, _, bounds = _raw_quantities(
        src.sigma2, src.rho, ch.p1, ch.p2, ch.n0,
        cfg.r1, cfg.r2, cfg.rc, cfg.beta1, cfg.beta2,
    )
    rates = {
        "r1": cfg.r1, "r2": cfg.r2, "rc": cfg.rc,
        "r1+r2": cfg.r1 + cfg.r2, "r1+rc": cfg.r1 + cfg.rc,
        "r2+rc": cfg.r2 + cfg.rc, "r1+r2+rc": cfg.r1 + cfg.r2 + cfg.rc,
    }
    slacks = {name: float(bounds[name]) - rates[name] for name in RATE_BOUND_NAMES}
    requirement, _ = _conf_requirement_arrays(src.rho, cfg.r1, cfg.rc)
    if is_unlimited(ch.c12):
        slacks["c12"] = math.inf
    else:
        slacks["c12"] = ch.c12 - float(requirement)
    feasible = all(v >= margin for v in slacks.values())
    return FeasibilityReport(feasible=feasible, slacks=slacks, witness={
        "r1": cfg.r1, "r2": cfg.r2, "rc": cfg.rc,
        "beta1": cfg.beta1, "beta2": cfg.beta2,
    })


def vq_distortion(src: SourceSpec, cfg: VqConfig) -> DistortionPair:
    """Normalized distortions achieved by the scheme (infimum values)."""
    d1, d2 = _distortion_arrays(src.rho, cfg.r1, cfg.r2, cfg.rc)
    return DistortionPair(float(d1), float(d2))


def vq_conf_requirement(src: SourceSpec, cfg: VqConfig) -> tuple[float, float]:
    """Conference capacity the configuration needs, and the binning discount.

    Returns ``(rc - binning, binning)`` where ``binning`` is the per-symbol
    log bin count ``-(1/2)log2(1 - rho^2 2^-2r1 (1 - 2^-2rc))`` saved by
    binning the shared codebook against Encoder 2's side information.
    """
    requirement, binning = _conf_requirement_arrays(src.rho, cfg.r1, cfg.rc)
    return float(requirement), float(binning)


def _unlimited_raw(sigma2, rho, p1, p2, n0, r2, rc, beta):
    """Rate bounds and distortions of the unlimited-conference region."""
    r2 = np.asarray(r2, dtype=float)
    rc = np.asarray(rc, dtype=float)
    beta = np.asarray(beta, dtype=float)
    f2 = -np.expm1(-2.0 * r2 * math.log(2.0))
    fc = -np.expm1(-2.0 * rc * math.log(2.0))
    hrho2 = rho**2 * f2 * fc
    bb = 1.0 - beta
    d1 = 2.0 ** (-2.0 * rc) * (1.0 - rho**2 * f2) / (1.0 - hrho2)
    d2 = 2.0 ** (-2.0 * r2) * (1.0 - rho**2 * fc) / (1.0 - hrho2)
    delta1 = np.sqrt(p1) + np.sqrt(p2) * (np.sqrt(bb * hrho2 + beta) - np.sqrt(bb * hrho2))
    delta2 = p1 + p2 + 2.0 * np.sqrt((bb * hrho2 + beta) * p1 * p2)
    bounds = {
        "r2": _half_log2_ratio(bb * p2 * (1.0 - hrho2) + n0, n0 * (1.0 - hrho2)),
        "rc": _half_log2_ratio(delta1**2 * (1.0 - hrho2) + n0, n0 * (1.0 - hrho2)),
        "r2+rc": _half_log2_ratio(delta2 + n0, n0 * (1.0 - hrho2)),
    }
    return bounds, d1, d2, np.sqrt(hrho2)


def vq_unlimited_region(src: SourceSpec, ch: ChannelSpec, r2: float, rc: float,
                        beta: float, margin: float = 0.0) -> tuple[FeasibilityReport, DistortionPair]:
    """Unlimited-conference form of the scheme at ``(r2, rc, beta)``.

    With unlimited conference capacity the first-stage private description is
    useless (``r1 = 0``, all of Encoder 1's power on the shared component);
    the region then depends on the scaled correlation
    ``hat_rho = rho sqrt((1-2^-2r2)(1-2^-2rc))`` and the coherent-power terms
    ``delta1``, ``delta2``.  Returns the three-bound report and the
    distortions, which use ``2^-2rc`` where the full scheme has
    ``2^-2(r1+rc)``.
    """
    if not 0.0 <= beta <= 1.0:
        raise DomainError("beta", f"must lie in [0, 1], got {beta}")
    if rc < 0.0 or r2 < 0.0:
        raise DomainError("rc" if rc < 0.0 else "r2", "must be >= 0")
    bounds, d1, d2, _ = _unlimited_raw(src.sigma2, src.rho, ch.p1, ch.p2, ch.n0, r2, rc, beta)
    slacks = {
        "r2": float(bounds["r2"]) - r2,
        "rc": float(bounds["rc"]) - rc,
        "r2+rc": float(bounds["r2+rc"]) - (r2 + rc),
    }
    report = FeasibilityReport(
        feasible=all(v >= margin for v in slacks.values()),
        slacks=slacks,
        witness={"r2": r2, "rc": rc, "beta": beta},
    )
    return report, DistortionPair(float(d1), float(d2))
