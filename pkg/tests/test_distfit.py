import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topicnet.distfit import (
    REFERENCE_EXPONENTIAL,
    REFERENCE_POWER_LAW,
    ExponentialFit,
    PowerLawFit,
    fit_exponential,
    fit_power_law_tail,
    log_binned_histogram,
    overlay_curve,
)


def power_law_sample(alpha, x_min, n, seed):
    u = np.random.default_rng(seed).random(n)
    return x_min * (1.0 - u) ** (-1.0 / (alpha - 1.0))


def trunc_exp_sample(lam, lo, hi, n, seed):
    u = np.random.default_rng(seed).random(n)
    return lo - np.log1p(-u * -np.expm1(-lam * (hi - lo))) / lam


def test_presets():
    assert REFERENCE_POWER_LAW.alpha == 1.9 and REFERENCE_POWER_LAW.x_min == pytest.approx(10 ** -1.5)
    assert (REFERENCE_EXPONENTIAL.lam, REFERENCE_EXPONENTIAL.lo, REFERENCE_EXPONENTIAL.hi) == (0.6, 1.0, 6.0)
    assert not REFERENCE_POWER_LAW.fitted


def test_geometric_edges():
    h = log_binned_histogram([0.01, 0.05, 1.0], 2)
    np.testing.assert_allclose(h.edges, [0.01, 0.1, 1.0])
    assert h.count.tolist() == [2, 1]


def test_one_bin_holds_all():
    h = log_binned_histogram([1.0, 1.01, 1.02, 100.0], 3)
    assert h.count.tolist() == [3, 0, 1]
    h = log_binned_histogram([2.0, 2.0, 2.0], 4)
    assert h.count.sum() == 3


def test_nonpositive_fatal():
    with pytest.raises(ValueError):
        log_binned_histogram([0.0, 1.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=200), st.integers(2, 40))
def test_histogram_invariants(values, bins):
    h = log_binned_histogram(values, bins)
    assert np.all(np.diff(h.edges) > 0)
    assert h.count.sum() == len(values)
    assert math.fsum((h.density * h.widths).tolist()) == pytest.approx(1.0, abs=1e-9)


def test_histogram_slope_recovers_alpha():
    x = power_law_sample(1.9, 10 ** -1.5, 10**5, 1)
    h = log_binned_histogram(x, 30)
    keep = h.count > 0
    mids = np.sqrt(h.edges[:-1] * h.edges[1:])[keep]
    slope = np.polyfit(np.log(mids), np.log(h.density[keep]), 1)[0]
    assert abs(slope + 1.9) < 0.1


def test_power_law_closed_form():
    fit = fit_power_law_tail([0.5 * math.e] * 20, 0.5)
    assert fit.alpha == pytest.approx(2.0, abs=1e-12)
    assert fit.n_tail == 20


def test_power_law_insufficient_tail():
    with pytest.raises(ValueError, match="only 3"):
        fit_power_law_tail([1.0, 2.0, 3.0, 0.1], 1.0)


@pytest.mark.parametrize("alpha,lo,hi", [(1.9, 1.85, 1.95), (3.0, 2.95, 3.05)])
def test_power_law_recovery(alpha, lo, hi):
    x = power_law_sample(alpha, 10 ** -1.5, 10**5, 2)
    assert lo <= fit_power_law_tail(x, 10 ** -1.5).alpha <= hi


@pytest.mark.parametrize("lam,lo,hi", [(0.6, 0.57, 0.63), (2.0, 1.9, 2.1)])
def test_exponential_recovery(lam, lo, hi):
    s = trunc_exp_sample(lam, 1.0, 6.0, 10**5, 3)
    fit = fit_exponential(s, (1.0, 6.0))
    assert lo <= fit.lam <= hi
    assert fit.n == 10**5 and not fit.at_boundary


def test_exponential_boundary():
    fit = fit_exponential(np.linspace(1.0, 6.0, 101), (1.0, 6.0))
    assert fit.at_boundary and fit.lam == 0.0


def test_exponential_insufficient():
    with pytest.raises(ValueError):
        fit_exponential([1.5, 2.0, 9.0], (1.0, 6.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.1, 10.0))
def test_scale_consistency(seed, c):
    x = power_law_sample(2.5, 0.1, 500, seed)
    a1 = fit_power_law_tail(x, 0.1).alpha
    a2 = fit_power_law_tail(x * c, 0.1 * c).alpha
    assert a2 == pytest.approx(a1, rel=1e-9)
    y = trunc_exp_sample(0.8, 1.0, 6.0, 500, seed)
    l1 = fit_exponential(y, (1.0, 6.0)).lam
    l2 = fit_exponential(y * c, (1.0 * c, 6.0 * c)).lam
    assert l2 == pytest.approx(l1 / c, rel=1e-6)


def test_bias_shrinks_with_n():
    def mean_err(n):
        errs = [abs(fit_power_law_tail(power_law_sample(1.9, 0.03, n, s), 0.03).alpha - 1.9) for s in range(50)]
        return np.mean(errs)

    assert mean_err(10**5) < mean_err(10**2)


def test_overlays():
    x = power_law_sample(1.9, 10 ** -1.5, 10**4, 4)
    h = log_binned_histogram(x, 30)
    fit = PowerLawFit(1.9, 10 ** -1.5)
    grid, y = overlay_curve(fit, [fit.x_min, 1.0], h)
    assert y[0] == h.density_at(fit.x_min)
    g, y = overlay_curve(ExponentialFit(0.6, 1.0, 6.0), [1.0, 1.0 + math.log(2) / 0.6, 1.0 + 2 * math.log(2) / 0.6], anchor=3.0)
    np.testing.assert_allclose(y, [3.0, 1.5, 0.75])
    g, y = overlay_curve(fit, [])
    assert len(g) == 0 and len(y) == 0


def test_fit_speed():
    x = power_law_sample(1.9, 10 ** -1.5, 10**5, 5)
    s = trunc_exp_sample(0.6, 1.0, 6.0, 10**5, 5)
    t0 = time.perf_counter()
    fit_power_law_tail(x, 10 ** -1.5)
    fit_exponential(s)
    assert time.perf_counter() - t0 < 10
