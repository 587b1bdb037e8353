import math

import numpy as np
import pytest

from confmac.model import ChannelSpec, DomainError, SourceSpec
from confmac import montecarlo
from confmac.montecarlo import (
    SingularError,
    build_surrogate,
    cap_ratio_bounds,
    cap_ratio_exact,
    gamma_ratio_exact,
    gamma_ratio_series,
    genie_distortion_closed_form,
    genie_distortion_mc,
    mmse_gamma,
    mmse_gamma_oracle,
    sphere_cap_fraction_mc,
    surrogate_angle_moments,
)
from confmac.vqscheme import VqConfig, vq_constants


def test_surrogate_second_moments_match_constants():
    rng = np.random.default_rng(0)
    ch = ChannelSpec(1.0, 1.0, 1.0)
    for _ in range(300):
        src = SourceSpec(float(rng.uniform(0.3, 3.0)), float(rng.uniform(0.0, 0.99)))
        cfg = VqConfig(*(float(v) for v in rng.uniform(0.05, 4.0, 3)), 0.0, 0.0)
        model = build_surrogate(src, cfg)
        cov = model.covariance
        assert np.allclose(cov, cov.T)
        w = np.linalg.eigvalsh(cov)
        assert w.min() >= -1e-10 * max(w.max(), 1.0)
        _, consts = vq_constants(src, ch, cfg)
        s = src.sigma2
        var_u1, var_v, var_u2 = cov[2, 2], cov[3, 3], cov[4, 4]
        assert var_u1 == pytest.approx(s * (1 - 4.0**-cfg.r1), abs=1e-12)
        assert var_v == pytest.approx(s * 4.0**-cfg.r1 * (1 - 4.0**-cfg.rc), abs=1e-12)
        assert var_u2 == pytest.approx(s * (1 - 4.0**-cfg.r2), abs=1e-12)
        assert cov[2, 4] / math.sqrt(var_u1 * var_u2) == pytest.approx(
            consts.tilde_rho, abs=1e-12)
        if var_v > 0:
            assert cov[3, 4] / math.sqrt(var_v * var_u2) == pytest.approx(
                consts.bar_rho, abs=1e-12)
        assert cov[2, 3] == 0.0


def test_surrogate_degenerate_blocks():
    src = SourceSpec(1.0, 0.5)
    model = build_surrogate(src, VqConfig(1.0, 1.0, 0.0, 0, 0))
    assert np.all(model.covariance[3, :] == 0.0)
    assert np.all(model.covariance[:, 3] == 0.0)

    model = build_surrogate(SourceSpec(1.0, 0.0), VqConfig(1.0, 1.0, 0.5, 0, 0))
    cross = model.covariance[np.ix_([0, 2, 3], [1, 4])]
    assert np.all(cross == 0.0)

    model = build_surrogate(src, VqConfig(1.0, 1.0, 0.5, 0, 0))
    bar_rho = model.covariance[3, 4] / math.sqrt(
        model.covariance[3, 3] * model.covariance[4, 4])
    assert bar_rho == pytest.approx(0.5 * math.sqrt(0.25 * 0.5 * 0.75), abs=1e-12)


def test_gamma_closed_form_matches_normal_equations():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        rho = float(rng.uniform(0.05, 0.98))
        src = SourceSpec(float(rng.uniform(0.5, 2.0)), rho)
        cfg = VqConfig(*(float(v) for v in rng.uniform(0.05, 5.0, 3)), 0.0, 0.0)
        g = mmse_gamma(src, cfg)
        o = mmse_gamma_oracle(build_surrogate(src, cfg))
        for name in ("g11", "g12", "g13", "g21", "g22", "g23"):
            assert abs(getattr(g, name) - getattr(o, name)) <= 1e-10
        # range bounds on the gains
        assert 0.0 < g.g11 <= 1.0 and 0.0 < g.g13 <= 1.0 and 0.0 < g.g22 <= 1.0
        assert 0.0 < g.g12 <= rho and 0.0 < g.g21 <= rho and 0.0 < g.g23 <= rho


def test_gamma_zero_rho_is_identity():
    src = SourceSpec(1.0, 0.0)
    g = mmse_gamma(src, VqConfig(1.0, 2.0, 0.5, 0, 0))
    assert (g.g11, g.g13, g.g22) == (1.0, 1.0, 1.0)
    assert (g.g12, g.g21, g.g23) == (0.0, 0.0, 0.0)


def test_gamma_oracle_removes_absent_description():
    src = SourceSpec(1.0, 0.5)
    o = mmse_gamma_oracle(build_surrogate(src, VqConfig(1.0, 1.0, 0.0, 0, 0)))
    assert o.g13 == 0.0 and o.g23 == 0.0
    g = mmse_gamma(src, VqConfig(1.0, 1.0, 0.0, 0, 0))
    assert o.g12 == pytest.approx(g.g12, abs=1e-12)


def test_gamma_oracle_singular():
    src = SourceSpec(1.0, 1.0)  # fully correlated: U1 and U2 colinear directions
    model = build_surrogate(src, VqConfig(30.0, 30.0, 30.0, 0, 0))
    with pytest.raises(SingularError):
        mmse_gamma_oracle(model)


def test_genie_mc_matches_closed_form():
    src = SourceSpec(1.0, 0.5)
    cfg = VqConfig(1.0, 1.0, 0.5, 0, 0)
    est = genie_distortion_mc(src, cfg, 200_000, seed=7)
    d1, d2 = genie_distortion_closed_form(src, cfg)
    assert abs(est.d1_hat - d1) <= 3 * est.d1_se
    assert abs(est.d2_hat - d2) <= 3 * est.d2_se
    # the closed form is the exact genie error, so the estimate cannot sit
    # far below it either
    assert est.d1_hat >= d1 - 3 * est.d1_se
    assert est.d2_hat >= d2 - 3 * est.d2_se


def test_genie_mc_trivial_cases():
    src = SourceSpec(1.0, 0.5)
    est = genie_distortion_mc(src, VqConfig(0, 0, 0, 0, 0), 20_000, seed=3)
    assert abs(est.d1_hat - 1.0) <= 3 * est.d1_se

    src0 = SourceSpec(1.0, 0.0)
    est = genie_distortion_mc(src0, VqConfig(1, 1, 1, 0, 0), 100_000, seed=4)
    assert abs(est.d1_hat - 2.0**-4) <= 3 * est.d1_se
    assert abs(est.d2_hat - 0.25) <= 3 * est.d2_se

    with pytest.raises(DomainError):
        genie_distortion_mc(src, VqConfig(1, 1, 1, 0, 0), 100, seed=1)


def test_mc_deterministic_across_thread_counts(monkeypatch):
    src = SourceSpec(1.0, 0.5)
    cfg = VqConfig(1.0, 1.0, 0.5, 0, 0)
    monkeypatch.setenv("GMAC_THREADS", "1")
    serial = genie_distortion_mc(src, cfg, 150_000, seed=11)
    monkeypatch.setenv("GMAC_THREADS", "4")
    threaded = genie_distortion_mc(src, cfg, 150_000, seed=11)
    assert serial == threaded


def test_surrogate_angle_moments():
    src = SourceSpec(1.0, 0.5)
    cfg = VqConfig(1.0, 1.0, 0.5, 0, 0)
    dim = 64
    est = surrogate_angle_moments(src, cfg, dim=dim, draws=4000, seed=5)
    _, consts = vq_constants(src, ChannelSpec(1, 1, 1), cfg)
    assert abs(est.cos_u1_u2 - montecarlo.expected_cosine(consts.tilde_rho, dim)) \
        <= 3 * est.se_u1_u2 + 2 * consts.tilde_rho / dim**2
    assert abs(est.cos_v_u2 - montecarlo.expected_cosine(consts.bar_rho, dim)) \
        <= 3 * est.se_v_u2 + 2 * consts.bar_rho / dim**2
    assert abs(est.cos_v_u1) <= 3 * est.se_v_u1


def test_cap_ratio_small_dimensions():
    for phi in np.linspace(0.05, math.pi / 2, 20):
        assert cap_ratio_exact(2, float(phi)) == pytest.approx(phi / math.pi, abs=1e-12)
        assert cap_ratio_exact(3, float(phi)) == pytest.approx(
            (1 - math.cos(phi)) / 2, abs=1e-12)
    assert cap_ratio_exact(3, math.pi / 3) == pytest.approx(0.25, abs=1e-15)


def test_cap_ratio_sandwich():
    for n in range(4, 201, 13):
        for phi in np.linspace(0.1, 1.4, 14):
            lower, upper = cap_ratio_bounds(n, float(phi))
            exact = cap_ratio_exact(n, float(phi))
            assert exact <= upper * (1 + 1e-12)
            if lower > 0.0:
                assert lower <= exact * (1 + 1e-12)


def test_cap_ratio_domain():
    with pytest.raises(DomainError):
        cap_ratio_exact(1, 0.5)
    with pytest.raises(DomainError):
        cap_ratio_bounds(8, math.pi / 2)
    with pytest.raises(DomainError):
        cap_ratio_exact(8, 0.0)


def test_sphere_cap_sampling():
    frac, se = sphere_cap_fraction_mc(8, 0.9, 40_000, seed=9)
    assert abs(frac - cap_ratio_exact(8, 0.9)) <= 3 * se


def test_gamma_ratio_series():
    assert abs(gamma_ratio_series(1e4, terms=3) / gamma_ratio_exact(1e4) - 1) <= 1e-12
    assert gamma_ratio_exact(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-12)
    # leading term only: ratio / sqrt(x) -> 1
    x = 1e8
    assert gamma_ratio_series(x, terms=1) == math.sqrt(x)
    assert abs(gamma_ratio_exact(x) / math.sqrt(x) - 1) <= 1.0 / (4 * x)
    with pytest.raises(DomainError):
        gamma_ratio_series(1.0, terms=6)
    with pytest.raises(DomainError):
        gamma_ratio_series(-1.0)
