"""Outer bound and high-SNR asymptotics.

The necessary condition reduces the two-user channel to a point-to-point one
whose input power is inflated by the best correlation the encoders can build,
``sqrt(rho^2 (1-beta) + beta)`` for a coherence split ``beta``; the second
constraint caps the private rate of Encoder 2 given Encoder 1's component.
The maximum-correlation construction that attains the bound is sampled here
as a Monte-Carlo check.

High-SNR quantities collect the asymptotically optimal correlations of each
approach and the corresponding predictions for the distortion product.
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
from .rdlib import rd_conditional, rd_joint
from ._mc import accumulate_chunks


class RegimeError(ValueError):
    """Inputs violate the high-SNR regime proxy or a radicand went negative."""


def _coherent_sum_bound(src: SourceSpec, ch: ChannelSpec, beta: float) -> float:
    gain = math.sqrt(src.rho**2 * (1.0 - beta) + beta)
    return 0.5 * math.log2(
        1.0 + (ch.p1 + ch.p2 + 2.0 * gain * math.sqrt(ch.p1 * ch.p2)) / ch.n0
    )


def _private_bound(src: SourceSpec, ch: ChannelSpec, beta: float) -> float:
    return 0.5 * math.log2(1.0 + (1.0 - beta) * ch.p2 * (1.0 - src.rho**2) / ch.n0)


def necessary_condition(src: SourceSpec, ch: ChannelSpec,
                        target: DistortionPair) -> FeasibilityReport:
    """Outer-bound test: is the target pair possibly achievable at all?

    Feasible iff some ``beta`` in [0, 1] satisfies both

    * joint rate:   R(d1, d2) <= (1/2)log2(1 + (P1+P2+2 sqrt(rho^2(1-beta)+beta) sqrt(P1 P2))/N)
    * private rate: R(d2 | component 1) <= (1/2)log2(1 + (1-beta) P2 (1-rho^2)/N)

    The first right-hand side increases with ``beta``, the second decreases,
    so it suffices to check the first bound at the largest ``beta`` the
    second allows; that crossing is found by bisection.
    """
    need_joint = rd_joint(src, target)
    need_cond = rd_conditional(src, target.d2)

    if _private_bound(src, ch, 0.0) < need_cond:
        beta = 0.0  # even full private power cannot carry the conditional rate
    elif _private_bound(src, ch, 1.0) >= need_cond:
        beta = 1.0
    else:
        lo, hi = 0.0, 1.0  # private bound >= need at lo, < need at hi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _private_bound(src, ch, mid) >= need_cond:
                lo = mid
            else:
                hi = mid
        beta = lo
    slacks = {
        "joint_rate": _coherent_sum_bound(src, ch, beta) - need_joint,
        "cond_rate": _private_bound(src, ch, beta) - need_cond,
    }
    return FeasibilityReport(all(v >= 0.0 for v in slacks.values()), slacks,
                             witness={"beta": beta})


@dataclass(frozen=True)
class MaxCorrEstimate:
    """Sampled moments of the maximum-correlation linear mappings."""

    mean1: float
    mean2: float
    var1: float
    var2: float
    corr: float
    cond_var: float
    corr_se: float
    cond_var_se: float
    sample_count: int


def maxcorr_linear_maps(src: SourceSpec, beta: float, sample_count: int,
                        seed: int) -> MaxCorrEstimate:
    """Monte-Carlo moments of the unit-variance linear maps attaining the bound.

    phi1 = S1/sigma and phi2 = sqrt(1-beta)/sigma S2 +
    (sqrt(rho^2(1-beta)+beta) - sqrt(rho^2(1-beta)))/sigma S1.  The sampled
    correlation converges to ``sqrt(rho^2(1-beta)+beta)`` and the residual
    variance of phi2 given S1 to ``(1-beta)(1-rho^2)``.  Deterministic given
    the seed; standard errors are the asymptotic normal ones.
    """
    if not 0.0 <= beta <= 1.0:
        raise DomainError("beta", f"must lie in [0, 1], got {beta}")
    if sample_count < 1:
        raise DomainError("sample_count", f"must be >= 1, got {sample_count}")
    rho = src.rho
    sigma = math.sqrt(src.sigma2)
    bb = 1.0 - beta
    gain = math.sqrt(rho**2 * bb + beta) - math.sqrt(rho**2 * bb)

    def chunk(rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, 2))
        s1 = sigma * z[:, 0]
        s2 = sigma * (rho * z[:, 0] + math.sqrt(1.0 - rho**2) * z[:, 1])
        phi1 = s1 / sigma
        phi2 = (math.sqrt(bb) * s2 + gain * s1) / sigma
        return np.column_stack([phi1, phi2, phi1**2, phi2**2, phi1 * phi2])

    acc = accumulate_chunks(chunk, seed, sample_count)
    m1, m2, m11, m22, m12 = (float(v) for v in acc.mean)
    var1 = m11 - m1**2
    var2 = m22 - m2**2
    cov = m12 - m1 * m2
    corr = cov / math.sqrt(var1 * var2)
    cond_var = var2 * (1.0 - corr**2)
    n = sample_count
    corr_se = (1.0 - corr**2) / math.sqrt(n)
    cond_var_se = cond_var * math.sqrt(2.0 / n)
    return MaxCorrEstimate(m1, m2, var1, var2, corr, cond_var,
                           corr_se, cond_var_se, n)


@dataclass(frozen=True)
class AsymptoticQuantities:
    """High-SNR correlation coefficients and distortion-product predictions."""

    varrho_inf: float
    varrho_sep1: float
    varrho_sep1_fixed: float
    varrho_vq_lower: float
    check_rho: float
    d1d2_limit: float
    d1d2_limit_sep1_fixed: float
    d1d2_limit_vq_fixed: float


def high_snr_quantities(src: SourceSpec, ch: ChannelSpec, target: DistortionPair,
                        c12=None, regime_threshold: float = 0.1) -> AsymptoticQuantities:
    """Asymptotic correlations and predicted distortion products.

    The regime is enforced through the finite proxy ``N/(d_i P_i) <=
    regime_threshold`` for both components; outside it the asymptotics are
    meaningless and :class:`RegimeError` is raised.

    ``check_rho`` is the shared-description correlation at the operating
    point that saturates the conference budget with no private first stage,
    ``rho sqrt((1-2^-2C)/(1 - rho^2 2^-2C))``; it enters only the
    scheme-side product prediction at finite link capacity.
    """
    if c12 is None:
        c12 = ch.c12
    rho, n0 = src.rho, ch.n0
    d1, d2 = target.d1, target.d2
    x1 = n0 / (d1 * ch.p1)
    x2 = n0 / (d2 * ch.p2)
    if x1 > regime_threshold or x2 > regime_threshold:
        raise RegimeError(
            f"outside high-SNR regime: N/(d1 P1)={x1:.4g}, N/(d2 P2)={x2:.4g} "
            f"exceed threshold {regime_threshold}"
        )
    att = 0.0 if is_unlimited(c12) else 2.0 ** (-2.0 * float(c12))

    for name, radicand in (("varrho_inf", 1.0 - x2 * (1.0 - rho**2)),
                           ("varrho_sep1_fixed", 1.0 - x1 * (1.0 - rho**2) * att),
                           ("varrho_vq_lower", 1.0 - x1 * att)):
        if radicand < 0.0:
            raise RegimeError(f"negative radicand in {name}")

    varrho_inf = math.sqrt(1.0 - x2 * (1.0 - rho**2))
    varrho_sep1_fixed = math.sqrt(1.0 - x1 * (1.0 - rho**2) * att) * varrho_inf
    varrho_vq_lower = (rho * math.sqrt(att) * math.sqrt(x1 * x2)
                       + math.sqrt(1.0 - x1 * att) * math.sqrt(1.0 - x2))
    if is_unlimited(c12):
        check_rho = rho
    else:
        check_rho = rho * math.sqrt((1.0 - att) / (1.0 - rho**2 * att))

    def product(varrho: float, extra: float = 1.0) -> float:
        return (n0 * (1.0 - rho**2) * extra
                / (ch.p1 + ch.p2 + 2.0 * varrho * math.sqrt(ch.p1 * ch.p2)))

    return AsymptoticQuantities(
        varrho_inf=varrho_inf,
        varrho_sep1=varrho_inf,
        varrho_sep1_fixed=varrho_sep1_fixed,
        varrho_vq_lower=varrho_vq_lower,
        check_rho=check_rho,
        d1d2_limit=product(varrho_inf),
        d1d2_limit_sep1_fixed=product(varrho_sep1_fixed),
        d1d2_limit_vq_fixed=product(varrho_vq_lower, 1.0 - check_rho**2),
    )


def compare_threshold(c_bits: float, alpha: float) -> float:
    """Correlation threshold ``2 * 2^-C sqrt(alpha) / (2^-2C + alpha)``.

    Below it, at fixed link capacity and symmetric powers with
    ``d1 = alpha d2``, the quantizer scheme's asymptotic correlation lower
    bound exceeds the first separation scheme's.  Equals exactly 1 at
    ``alpha = 2^-2C``.
    """
    if c_bits < 0.0:
        raise DomainError("c_bits", f"must be >= 0, got {c_bits}")
    if alpha <= 0.0:
        raise DomainError("alpha", f"must be > 0, got {alpha}")
    att = 2.0 ** (-2.0 * c_bits)
    if alpha == att:
        return 1.0  # the peak of 2 u s / (u^2 + s^2) at u = s, exact
    return 2.0 * 2.0 ** (-c_bits) * math.sqrt(alpha) / (att + alpha)


def semi_symmetric_product(rho: float, p: float, n0: float, d2: float) -> float:
    """Predicted optimal distortion product at symmetric power, unlimited link.

    ``(N/2P) (1-rho^2) / (1 + sqrt(1 - N(1-rho^2)/(d2 P)))``.
    """
    radicand = 1.0 - n0 * (1.0 - rho**2) / (d2 * p)
    if radicand < 0.0:
        raise RegimeError("semi-symmetric prediction needs N(1-rho^2)/(d2 P) <= 1")
    return (n0 / (2.0 * p)) * (1.0 - rho**2) / (1.0 + math.sqrt(radicand))
