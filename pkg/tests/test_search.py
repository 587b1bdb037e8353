import math

import pytest

from confmac.model import UNLIMITED, ChannelSpec, DistortionPair, SourceSpec
from confmac import search, vqscheme
from confmac.search import (
    CurveKind,
    Scheme,
    UnboundedError,
    min_conf_capacity,
    min_d1_unlimited,
    min_power_symmetric,
    trace_curve,
)

SRC = SourceSpec(1.0, 0.5)
TARGET = DistortionPair(0.2, 0.2)


def test_full_cooperation_closed_form():
    res = min_power_symmetric(SRC, Scheme.FULL_COOP, TARGET)
    assert res.objective == pytest.approx(4.4375, abs=1e-12)  # (18.75 - 1)/4
    assert res.converged and res.iterations == 0


def test_trivial_target_costs_nothing():
    trivial = DistortionPair(1.0, 1.0)
    for scheme in Scheme:
        res = min_power_symmetric(SRC, scheme, trivial)
        assert res.objective == 0.0


def test_bisection_invariants_and_witness():
    res = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=UNLIMITED, tol=1e-6)
    lo, hi = res.bracket
    assert res.converged and hi - lo <= 1e-6 * hi + 1e-15
    assert res.objective == hi
    cfg = vqscheme.VqConfig(res.witness["r1"], res.witness["r2"], res.witness["rc"],
                            res.witness["beta1"], res.witness["beta2"])
    ch = ChannelSpec(hi, hi, 1.0, UNLIMITED)
    report = vqscheme.vq_rate_region(SRC, ch, cfg, margin=-1e-9)
    assert report.feasible
    ach = vqscheme.vq_distortion(SRC, cfg)
    assert ach.d1 <= TARGET.d1 * (1 + 1e-8) and ach.d2 <= TARGET.d2 * (1 + 1e-8)


def test_determinism():
    a = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=0.0, tol=1e-7)
    b = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=0.0, tol=1e-7)
    assert a == b


def test_bracket_sides_revalidate_for_stateless_predicates():
    from confmac import bounds, separation

    res = min_power_symmetric(SRC, Scheme.NECESSARY, TARGET, tol=1e-7)
    lo, hi = res.bracket
    assert not bounds.necessary_condition(SRC, ChannelSpec(lo, lo, 1.0), TARGET).feasible
    assert bounds.necessary_condition(SRC, ChannelSpec(hi, hi, 1.0), TARGET).feasible

    res = min_power_symmetric(SRC, Scheme.SEP1, TARGET, c12=UNLIMITED, tol=1e-7)
    lo, hi = res.bracket
    ch = ChannelSpec(lo, lo, 1.0, UNLIMITED)
    assert not separation.sep1_feasible(SRC, ch, TARGET).feasible
    assert separation.sep1_feasible(SRC, ch.with_power(hi), TARGET).feasible


def test_scheme_orderings_single_alpha():
    tol = 1e-9
    p_fc = min_power_symmetric(SRC, Scheme.FULL_COOP, TARGET).objective
    p_nec = min_power_symmetric(SRC, Scheme.NECESSARY, TARGET, tol=tol).objective
    p_vq_inf = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=UNLIMITED, tol=tol).objective
    p_vq_0 = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=0.0, tol=tol).objective
    p_sep2 = min_power_symmetric(SRC, Scheme.SEP2, TARGET, c12=UNLIMITED, tol=tol).objective
    assert p_fc <= p_nec <= p_vq_inf <= p_vq_0
    assert p_vq_inf <= p_sep2


def test_pmin_monotone_in_link_capacity():
    values = []
    for c12 in (0.0, 0.5, 1.0, UNLIMITED):
        values.append(min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=c12,
                                          tol=1e-5).objective)
    assert all(a >= b - 1e-4 for a, b in zip(values, values[1:])), values


def test_pmin_monotone_in_alpha():
    values = []
    for alpha in (0.3, 0.6, 1.0):
        target = DistortionPair(alpha * 0.2, 0.2)
        values.append(min_power_symmetric(SRC, Scheme.VQ, target, c12=UNLIMITED,
                                          tol=1e-7).objective)
    assert values[0] >= values[1] >= values[2]


def test_min_power_unbounded():
    with pytest.raises(UnboundedError):
        min_power_symmetric(SRC, Scheme.VQ, DistortionPair(1e-5, 1e-5),
                            c12=UNLIMITED, p_ceiling=10.0)


def test_min_conf_trivial_and_unbounded():
    res = min_conf_capacity(SRC, ChannelSpec(1, 1, 1), Scheme.VQ, DistortionPair(1, 1))
    assert res.objective == 0.0
    with pytest.raises(UnboundedError):
        min_conf_capacity(SRC, ChannelSpec(0.1, 0.1, 1.0), Scheme.VQ, TARGET)
    with pytest.raises(Exception):
        min_conf_capacity(SRC, ChannelSpec(1, 1, 1), Scheme.SEP2, TARGET)


def test_min_conf_zero_when_power_is_ample():
    ch = ChannelSpec(30.0, 30.0, 1.0)
    assert min_conf_capacity(SRC, ch, Scheme.VQ, TARGET, tol=1e-4).objective == 0.0
    assert min_conf_capacity(SRC, ch, Scheme.SEP1, TARGET, tol=1e-4).objective == 0.0


def test_min_conf_nonincreasing_in_power():
    p_inf = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=UNLIMITED, tol=1e-9).objective
    values = []
    for scale in (1.04, 1.10):
        ch = ChannelSpec(scale * p_inf, scale * p_inf, 1.0)
        values.append(min_conf_capacity(SRC, ch, Scheme.VQ, TARGET, tol=1e-4).objective)
    assert values[0] >= values[1] - 1e-4


def test_min_conf_loose_second_component():
    """With d2 = 1 near the coherence-limited minimum power, the quantizer link
    cost approaches the side-information rate and separation 1 approaches the
    plain description rate -- the binning discount separates them."""
    from confmac import rdlib

    d1 = 0.1
    target = DistortionPair(d1, 1.0)
    p = 1.002 * (1.0 / d1 - 1.0) / 4.0
    ch = ChannelSpec(p, p, 1.0)
    c_vq = min_conf_capacity(SRC, ch, Scheme.VQ, target, tol=1e-5).objective
    c_sep1 = min_conf_capacity(SRC, ch, Scheme.SEP1, target, tol=1e-5).objective
    wz = rdlib.wz_rate(SRC, d1)
    plain = 0.5 * math.log2(1.0 / d1)
    assert c_vq == pytest.approx(wz, abs=0.02)
    assert c_vq <= wz + 1e-4
    assert c_sep1 == pytest.approx(plain, abs=0.05)
    assert c_vq < c_sep1


def test_min_d1_unlimited_matches_min_power_inverse():
    # just above the minimal power for (0.2, 0.2), the best reachable d1 is near 0.2
    p_inf = min_power_symmetric(SRC, Scheme.VQ, TARGET, c12=UNLIMITED, tol=1e-9).objective
    res = min_d1_unlimited(SRC, ChannelSpec(p_inf * 1.02, p_inf * 1.02, 1.0), 0.2)
    assert res.objective <= 0.2 * 1.01
    assert res.objective >= 0.2 * 0.8


def test_trace_single_alpha_consistent_with_direct_call():
    rows = trace_curve(CurveKind.PMIN_VS_ALPHA,
                       {"rho": 0.5, "d2": 0.2, "n0": 1.0, "tol": 1e-7,
                        "schemes": ["fullcoop", "vq-none"]},
                       [0.5])
    assert len(rows) == 1
    row = rows[0]
    direct_fc = min_power_symmetric(SRC, Scheme.FULL_COOP, DistortionPair(0.1, 0.2),
                                    tol=1e-7).objective
    direct_vq = min_power_symmetric(SRC, Scheme.VQ, DistortionPair(0.1, 0.2),
                                    c12=0.0, tol=1e-7).objective
    assert row["pmin_fullcoop"] == direct_fc
    assert row["pmin_vq-none"] == direct_vq
    assert row["errors"] == ""


def test_trace_records_row_errors():
    rows = trace_curve(CurveKind.C12_VS_ALPHA,
                       {"rho": 0.5, "d2": 0.2, "n0": 1.0, "p": 0.5,
                        "schemes": ["vq"], "tol": 1e-4},
                       [0.5])
    assert math.isnan(rows[0]["c12_vq"])
    assert "UnboundedError" in rows[0]["errors"]


def test_trace_rejects_bad_grid():
    with pytest.raises(Exception):
        trace_curve(CurveKind.PMIN_VS_ALPHA, {"rho": 0.5, "d2": 0.2}, [])
    with pytest.raises(Exception):
        trace_curve(CurveKind.PMIN_VS_ALPHA, {"rho": 0.5, "d2": 0.2}, [0.5, 0.5])


def test_trace_d1d2_vs_snr_row():
    rows = trace_curve(CurveKind.D1D2_VS_SNR, {"rho": 0.5, "d2": 0.2, "n0": 1.0}, [1e4])
    row = rows[0]
    assert row["ratio"] == pytest.approx(1.0, abs=0.05)
    assert row["errors"] == ""
