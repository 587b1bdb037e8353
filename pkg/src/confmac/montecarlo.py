"""Stochastic oracles for the quantizer scheme, plus sphere-geometry checks.

The surrogate model replaces the spherical codebooks with jointly Gaussian
test channels having the same second moments: the decoder-side analysis
treats the tuple as jointly Gaussian, and every closed-form quantity under
test depends on second moments only.  Concretely, with
``nu = 1 - 2^-2R`` per stage,

    U1 = nu1 S1 + W1          (first-stage description of S1)
    ZQ1 = S1 - U1             (first-stage residual, orthogonal to U1)
    V  = nu3 ZQ1 + Wc         (shared refinement, orthogonal to U1)
    U2 = nu2 S2 + W2          (description of S2)

with W1, Wc, W2 independent of everything else.  The induced 5x5 covariance
over (S1, S2, U1, V, U2) reproduces the scheme's scaled correlations
exactly; sampling uses this structural recipe (no matrix factorization), so
zero-variance components are harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .model import DomainError, SourceSpec
from .vqscheme import VqConfig, _distortion_arrays
from ._mc import MomentAccumulator, accumulate_chunks

_VARS = ("s1", "s2", "u1", "v", "u2")


class SingularError(ArithmeticError):
    """The description Gram matrix is singular after degenerate rows were removed."""


@dataclass(frozen=True)
class SurrogateModel:
    """Jointly Gaussian stand-in for (S1, S2, U1, V, U2)."""

    sigma2: float
    rho: float
    nu1: float
    nu2: float
    nu3: float
    covariance: np.ndarray  # 5x5, order (S1, S2, U1, V, U2)

    def index(self, name: str) -> int:
        return _VARS.index(name)


def build_surrogate(src: SourceSpec, cfg: VqConfig) -> SurrogateModel:
    """Covariance of the Gaussian test-channel model for one configuration."""
    s, rho = src.sigma2, src.rho
    nu1 = 1.0 - 2.0 ** (-2.0 * cfg.r1)
    nu2 = 1.0 - 2.0 ** (-2.0 * cfg.r2)
    nu3 = 1.0 - 2.0 ** (-2.0 * cfg.rc)
    sv2 = s * (1.0 - nu1) * nu3
    cov = np.array([
        [s,            rho * s,       nu1 * s,        sv2,            nu2 * rho * s],
        [rho * s,      s,             nu1 * rho * s,  rho * sv2,      nu2 * s],
        [nu1 * s,      nu1 * rho * s, nu1 * s,        0.0,            nu1 * nu2 * rho * s],
        [sv2,          rho * sv2,     0.0,            sv2,            nu2 * rho * sv2],
        [nu2 * rho * s, nu2 * s,      nu1 * nu2 * rho * s, nu2 * rho * sv2, nu2 * s],
    ])
    return SurrogateModel(s, rho, nu1, nu2, nu3, cov)


@dataclass(frozen=True)
class GammaCoeffs:
    """Linear estimator gains: row 1 estimates S1, row 2 estimates S2."""

    g11: float
    g12: float
    g13: float
    g21: float
    g22: float
    g23: float


def mmse_gamma(src: SourceSpec, cfg: VqConfig) -> GammaCoeffs:
    """Closed-form MMSE estimator coefficients of S_nu given (U1, U2, V).

    With ``a = 2^-2(r1+rc)`` and ``b = 2^-2r2`` and the common denominator
    ``1 - rho^2 (1-b)(1-a)``:

        g11 = g13 = (1 - rho^2 (1-b)) / den      g12 = rho a / den
        g21 = g23 = rho b / den                  g22 = (1 - rho^2 (1-a)) / den
    """
    rho = src.rho
    a = 2.0 ** (-2.0 * (cfg.r1 + cfg.rc))
    b = 2.0 ** (-2.0 * cfg.r2)
    den = 1.0 - rho**2 * (1.0 - b) * (1.0 - a)
    g11 = (1.0 - rho**2 * (1.0 - b)) / den
    g12 = rho * a / den
    g21 = rho * b / den
    g22 = (1.0 - rho**2 * (1.0 - a)) / den
    return GammaCoeffs(g11, g12, g11, g21, g22, g21)


def mmse_gamma_oracle(model: SurrogateModel) -> GammaCoeffs:
    """Solve the normal equations from the surrogate covariance directly.

    Zero-variance descriptions (rate-0 stages) are removed before the solve;
    their coefficients are reported as 0.  Raises :class:`SingularError` if
    the remaining Gram matrix is still singular.
    """
    cov = model.covariance
    cols = [i for i, name in zip((2, 4, 3), ("u1", "u2", "v")) if cov[i, i] > 0.0]
    if not cols:
        return GammaCoeffs(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    gram = cov[np.ix_(cols, cols)]
    if np.linalg.cond(gram) > 1e12:
        raise SingularError("description Gram matrix is numerically singular")
    sol1 = np.linalg.solve(gram, cov[0, cols])
    sol2 = np.linalg.solve(gram, cov[1, cols])
    order = {c: k for k, c in enumerate(cols)}
    def pick(sol, idx):
        return float(sol[order[idx]]) if idx in order else 0.0
    return GammaCoeffs(
        pick(sol1, 2), pick(sol1, 4), pick(sol1, 3),
        pick(sol2, 2), pick(sol2, 4), pick(sol2, 3),
    )


def _sample_tuple(rng: np.random.Generator, n: int, model: SurrogateModel) -> np.ndarray:
    """Draw n rows of (s1, s2, u1, v, u2) via the structural recipe."""
    s, rho = model.sigma2, model.rho
    nu1, nu2, nu3 = model.nu1, model.nu2, model.nu3
    z = rng.standard_normal((n, 5))
    s1 = math.sqrt(s) * z[:, 0]
    s2 = math.sqrt(s) * (rho * z[:, 0] + math.sqrt(1.0 - rho**2) * z[:, 1])
    u1 = nu1 * s1 + math.sqrt(s * nu1 * (1.0 - nu1)) * z[:, 2]
    zq1 = s1 - u1
    v = nu3 * zq1 + math.sqrt(s * (1.0 - nu1) * nu3 * (1.0 - nu3)) * z[:, 3]
    u2 = nu2 * s2 + math.sqrt(s * nu2 * (1.0 - nu2)) * z[:, 4]
    return np.column_stack([s1, s2, u1, v, u2])


@dataclass(frozen=True)
class GenieEstimate:
    d1_hat: float
    d1_se: float
    d2_hat: float
    d2_se: float
    sample_count: int


def genie_distortion_mc(src: SourceSpec, cfg: VqConfig, sample_count: int,
                        seed: int) -> GenieEstimate:
    """Empirical normalized distortions of the genie-aided linear decoder.

    Samples the surrogate, applies the closed-form estimator gains, and
    returns the mean squared errors normalized by the source variance with
    their standard errors.  Deterministic given ``(seed, sample_count)``
    regardless of thread count.
    """
    if sample_count < 1000:
        raise DomainError("sample_count", f"must be >= 1000, got {sample_count}")
    model = build_surrogate(src, cfg)
    g = mmse_gamma(src, cfg)

    def chunk(rng: np.random.Generator, n: int) -> np.ndarray:
        t = _sample_tuple(rng, n, model)
        s1, s2, u1, v, u2 = t.T
        e1 = (s1 - (g.g11 * u1 + g.g12 * u2 + g.g13 * v)) ** 2
        e2 = (s2 - (g.g21 * u1 + g.g22 * u2 + g.g23 * v)) ** 2
        return np.column_stack([e1, e2]) / src.sigma2

    acc = accumulate_chunks(chunk, seed, sample_count)
    se = acc.se_of_mean
    return GenieEstimate(float(acc.mean[0]), float(se[0]),
                         float(acc.mean[1]), float(se[1]), sample_count)


@dataclass(frozen=True)
class AngleMomentEstimate:
    """Empirical cosines between the block description vectors."""

    cos_u1_u2: float
    se_u1_u2: float
    cos_v_u2: float
    se_v_u2: float
    cos_v_u1: float
    se_v_u1: float
    draws: int
    dim: int


def surrogate_angle_moments(src: SourceSpec, cfg: VqConfig, dim: int,
                            draws: int, seed: int) -> AngleMomentEstimate:
    """Per-draw cosines of the angle between dim-long description vectors.

    Each draw stacks ``dim`` independent copies of the surrogate tuple into
    vectors and records cos(angle) for (U1, U2), (V, U2) and (V, U1); their
    means converge to the scheme's scaled correlations.
    """
    model = build_surrogate(src, cfg)

    def chunk(rng: np.random.Generator, n: int) -> np.ndarray:
        t = _sample_tuple(rng, n * dim, model).reshape(n, dim, 5)
        u1, v, u2 = t[:, :, 2], t[:, :, 3], t[:, :, 4]
        def cos(a, b):
            denom = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
            denom = np.where(denom > 0.0, denom, 1.0)
            return np.einsum("ij,ij->i", a, b) / denom
        return np.column_stack([cos(u1, u2), cos(v, u2), cos(v, u1)])

    acc = accumulate_chunks(chunk, seed, draws, chunk=1 << 12)
    se = acc.se_of_mean
    return AngleMomentEstimate(
        float(acc.mean[0]), float(se[0]),
        float(acc.mean[1]), float(se[1]),
        float(acc.mean[2]), float(se[2]),
        draws, dim,
    )


def expected_cosine(r: float, dim: int) -> float:
    """First-order finite-block expectation of the angle cosine.

    For a pair of ``dim``-long jointly Gaussian vectors with per-coordinate
    correlation ``r``, the empirical cos(angle) is biased low by
    ``r (1 - r^2) / (2 dim)`` at first order; the residual is O(1/dim^2).
    """
    return r * (1.0 - (1.0 - r**2) / (2.0 * dim))


def genie_distortion_closed_form(src: SourceSpec, cfg: VqConfig) -> tuple[float, float]:
    """Normalized MSE of the genie-aided decoder (equals the scheme distortions)."""
    d1, d2 = _distortion_arrays(src.rho, cfg.r1, cfg.r2, cfg.rc)
    return float(d1), float(d2)


# ---------------------------------------------------------------------------
# Sphere geometry: polar-cap area ratios and the gamma-ratio series.
# ---------------------------------------------------------------------------

def cap_ratio_exact(n: int, phi: float) -> float:
    """Fraction of the unit n-sphere's surface within angle ``phi`` of a pole.

    Equals ``(1/2) I_{sin^2 phi}((n-1)/2, 1/2)`` with ``I`` the regularized
    incomplete beta function; reduces to ``phi/pi`` for n = 2 and
    ``(1 - cos phi)/2`` for n = 3.
    """
    if n < 2:
        raise DomainError("n", f"dimension must be >= 2, got {n}")
    if not 0.0 < phi <= math.pi / 2.0:
        raise DomainError("phi", f"must lie in (0, pi/2], got {phi}")
    return 0.5 * float(special.betainc((n - 1) / 2.0, 0.5, math.sin(phi) ** 2))


def cap_ratio_bounds(n: int, phi: float) -> tuple[float, float]:
    """Sandwich bounds on the polar-cap area ratio.

    base = Gamma(n/2 + 1) sin^(n-1) phi / (n Gamma((n+1)/2) sqrt(pi) cos phi);
    the upper bound is ``base`` and the lower bound carries the
    ``(1 - tan^2 phi / n)`` correction (informative only while positive).
    Requires ``phi < pi/2`` (the bounds blow up at the equator).
    """
    if n < 2:
        raise DomainError("n", f"dimension must be >= 2, got {n}")
    if not 0.0 < phi < math.pi / 2.0:
        raise DomainError("phi", f"must lie in (0, pi/2), got {phi}")
    log_base = (
        special.gammaln(n / 2.0 + 1.0)
        - special.gammaln((n + 1) / 2.0)
        - math.log(n)
        - 0.5 * math.log(math.pi)
        + (n - 1) * math.log(math.sin(phi))
        - math.log(math.cos(phi))
    )
    upper = float(np.exp(log_base))
    lower = upper * (1.0 - math.tan(phi) ** 2 / n)
    return lower, upper


def sphere_cap_fraction_mc(n: int, phi: float, sample_count: int, seed: int) -> tuple[float, float]:
    """Empirical cap fraction from uniform sphere samples, with binomial SE."""
    if n < 2:
        raise DomainError("n", f"dimension must be >= 2, got {n}")
    cos_phi = math.cos(phi)

    def chunk(rng: np.random.Generator, m: int) -> np.ndarray:
        x = rng.standard_normal((m, n))
        frac = x[:, 0] / np.linalg.norm(x, axis=1)
        return (frac >= cos_phi).astype(float)[:, None]

    acc = accumulate_chunks(chunk, seed, sample_count)
    p = float(acc.mean[0])
    se = math.sqrt(max(p * (1.0 - p), 1e-300) / sample_count)
    return p, se


_GAMMA_RATIO_COEFFS = (1.0, -1.0 / 8.0, 1.0 / 128.0, 5.0 / 1024.0, -21.0 / 32768.0)


def gamma_ratio_series(x: float, terms: int = 3) -> float:
    """Truncated asymptotic series for Gamma(x + 1/2)/Gamma(x).

    ``sqrt(x) (1 - 1/(8x) + 1/(128 x^2) + 5/(1024 x^3) - 21/(32768 x^4))``,
    keeping the first ``terms`` bracketed terms (1 to 5).
    """
    if x <= 0.0:
        raise DomainError("x", f"must be > 0, got {x}")
    if not 1 <= terms <= 5:
        raise DomainError("terms", f"must lie in 1..5, got {terms}")
    acc = 0.0
    for k in range(terms):
        acc += _GAMMA_RATIO_COEFFS[k] / x**k
    return math.sqrt(x) * acc


def gamma_ratio_exact(x: float) -> float:
    """Gamma(x + 1/2)/Gamma(x) via log-gamma (reference path).

    For large ``x`` the direct difference of two log-gamma values loses
    digits to cancellation, so it is evaluated there as a Taylor expansion of
    the log-gamma increment in the polygamma functions, which keeps the
    relative error at machine epsilon.
    """
    if x <= 0.0:
        raise DomainError("x", f"must be > 0, got {x}")
    if x < 16.0:
        return float(np.exp(special.gammaln(x + 0.5) - special.gammaln(x)))
    diff = 0.0
    fact = 1.0
    power = 1.0
    for k in range(1, 15):
        fact *= k
        power *= 0.5
        diff += float(special.polygamma(k - 1, x)) * power / fact
    return math.exp(diff)
