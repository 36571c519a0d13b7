import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from refl.inference import FunctionObjective, ParameterSpace
from refl.mcmc import (
    Chain,
    InsufficientSamplesError,
    MCMCConfig,
    PosteriorSummary,
    acceptance_probability,
    metropolis_step,
    posterior_predictive,
    run_chain,
    run_chains,
    summarize,
    trim_burn_in,
)


def std_normal_target(lo=-10.0, hi=10.0):
    return FunctionObjective(ParameterSpace(["t"], [lo], [hi]), lambda t: -0.5 * float(t[0] ** 2))


def flat(n=2):
    return FunctionObjective(ParameterSpace([f"x{i}" for i in range(n)], [0.0] * n, [1.0] * n), lambda t: 0.0)


def make_chain(samples, burn_in=0):
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    return Chain(samples, np.zeros(n), np.ones(n, bool), burn_in, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        MCMCConfig(n_samples=10, burn_in=10)
    with pytest.raises(ValueError):
        MCMCConfig(step_scale=[0.1, 0.0])
    with pytest.raises(ValueError):
        MCMCConfig(n_chains=0)


def test_default_step_is_two_percent_of_width():
    space = ParameterSpace(["a", "b"], [0, -5], [10, 5])
    np.testing.assert_allclose(MCMCConfig().steps_for(space), [0.2, 0.2])


@pytest.mark.parametrize("delta, p", [(0.0, 1.0), (5.0, 1.0), (-math.log(2), 0.5)])
def test_acceptance_probability(delta, p):
    assert acceptance_probability(delta) == pytest.approx(p)


class GapObjective:
    """lnL(anything proposed) = current - gap"""

    def __init__(self, gap):
        self.space = ParameterSpace(["x"], [-1e9], [1e9])
        self.gap = gap

    def log_likelihood(self, theta):
        return -self.gap


@pytest.mark.parametrize("gap", [0.0, -5.0])
def test_uphill_or_level_always_accepted(gap):
    obj = GapObjective(gap)
    rng = np.random.default_rng(0)
    assert all(metropolis_step(obj, [0.0], 0.0, [1.0], rng)[2] for _ in range(500))


def test_acceptance_frequency_matches_closed_form():
    obj = GapObjective(math.log(2))
    rng = np.random.default_rng(123)
    n = 10_000
    hits = sum(metropolis_step(obj, [0.0], 0.0, [1.0], rng)[2] for _ in range(n))
    freq = hits / n
    se = math.sqrt(0.25 / n)
    assert abs(freq - 0.5) < 3 * se
    assert abs(freq - 0.5) < 0.02


def test_out_of_bounds_never_accepted():
    obj = flat(1)
    rng = np.random.default_rng(0)
    for _ in range(200):
        theta, lnL, ok = metropolis_step(obj, [0.999], 0.0, [10.0], rng)
        if ok:
            assert 0 <= theta[0] <= 1


def test_start_out_of_bounds():
    with pytest.raises(ValueError):
        run_chain(flat(), [1.5, 0.5], MCMCConfig(n_samples=10, burn_in=0))


def test_tiny_step_degenerates():
    chain = run_chain(std_normal_target(), [0.3], MCMCConfig(step_scale=[1e-300], n_samples=500, burn_in=0, tune=False))
    assert chain.acceptance_rate == 1.0
    assert np.all(chain.samples == 0.3)


def test_flat_target_accepts_all_in_bounds():
    cfg = MCMCConfig(step_scale=[1e-3, 1e-3], n_samples=2000, burn_in=0, tune=False)
    chain = run_chain(flat(), [0.5, 0.5], cfg)
    assert chain.acceptance_rate == 1.0


def test_flat_target_rejects_only_outside():
    cfg = MCMCConfig(step_scale=[0.3, 0.3], n_samples=3000, burn_in=0, tune=False)
    chain = run_chain(flat(), [0.5, 0.5], cfg)
    assert np.all((chain.samples >= 0) & (chain.samples <= 1))
    # a rejected step repeats the previous sample
    rejected = np.flatnonzero(~chain.accepted[1:]) + 1
    np.testing.assert_array_equal(chain.samples[rejected], chain.samples[rejected - 1])


def test_standard_normal_moments():
    chain = run_chain(std_normal_target(), [0.0], MCMCConfig(n_samples=100_000, burn_in=25_000, seed=7))
    x = trim_burn_in(chain).samples[:, 0]
    assert abs(x.mean()) < 0.05
    assert abs(x.std() - 1) < 0.05
    assert 0.2 <= trim_burn_in(chain).acceptance_rate <= 0.6


def test_tuning_freezes_after_burn_in():
    cfg = MCMCConfig(n_samples=3000, burn_in=1000, seed=1)
    a = run_chain(std_normal_target(), [0.0], cfg)
    longer = run_chain(std_normal_target(), [0.0], MCMCConfig(n_samples=6000, burn_in=1000, seed=1))
    np.testing.assert_array_equal(a.step_scale, longer.step_scale)


def test_reproducible():
    cfg = MCMCConfig(n_samples=2000, burn_in=500, seed=3)
    a = run_chain(std_normal_target(), [0.1], cfg)
    b = run_chain(std_normal_target(), [0.1], cfg)
    np.testing.assert_array_equal(a.samples, b.samples)
    np.testing.assert_array_equal(a.accepted, b.accepted)


def test_trim():
    chain = make_chain(np.arange(10.0)[:, None], burn_in=0)
    assert len(trim_burn_in(chain)) == 10
    chain = make_chain(np.arange(10.0)[:, None], burn_in=5)
    once = trim_burn_in(chain)
    assert len(once) == 5 and once.burn_in == 0
    np.testing.assert_array_equal(trim_burn_in(once).samples, once.samples)
    assert once.samples[0, 0] == 5.0


def test_summary_degenerate():
    chain = make_chain(np.tile([1.0, 2.0], (200, 1)))
    s = summarize([chain], ["a", "b"])
    assert np.all(s.std == 0)
    assert s.degenerate.all()
    np.testing.assert_array_equal(s.correlation, np.eye(2))


def test_summary_independent_coordinates():
    rng = np.random.default_rng(0)
    n = 20_000
    chain = make_chain(rng.normal(size=(n, 3)))
    s = summarize([chain])
    off = s.correlation[~np.eye(3, dtype=bool)]
    assert np.all(np.abs(off) < 3 / math.sqrt(n))
    np.testing.assert_allclose(s.correlation, s.correlation.T)
    assert np.all(s.lower < s.median) and np.all(s.median < s.upper)


def test_summary_pooling():
    rng = np.random.default_rng(1)
    a = make_chain(rng.normal(size=(300, 2)), burn_in=50)
    b = make_chain(rng.normal(size=(400, 2)), burn_in=100)
    joined = make_chain(np.vstack([a.samples[50:], b.samples[100:]]))
    s1, s2 = summarize([a, b]), summarize([joined])
    np.testing.assert_allclose(s1.mean, s2.mean)
    np.testing.assert_allclose(s1.std, s2.std)
    np.testing.assert_allclose(s1.correlation, s2.correlation)


def test_summary_needs_samples():
    with pytest.raises(InsufficientSamplesError):
        summarize([make_chain(np.zeros((150, 1)), burn_in=100)])


def test_summary_roundtrip():
    rng = np.random.default_rng(2)
    s = summarize([make_chain(rng.normal(size=(500, 2)))], ["a", "b"])
    back = PosteriorSummary.from_dict(s.to_dict())
    np.testing.assert_array_equal(back.mean, s.mean)
    np.testing.assert_array_equal(back.correlation, s.correlation)
    assert back.names == ["a", "b"]


class LineObjective:
    def __init__(self):
        self.space = ParameterSpace(["m"], [0.0], [10.0])
        self.x = np.linspace(0, 1, 5)

    def model_curve(self, theta):
        return theta[0] * self.x


def test_predictive_single_draw():
    obj = LineObjective()
    chain = make_chain(np.linspace(1, 2, 200)[:, None])
    rng = np.random.default_rng(0)
    curves = posterior_predictive(obj, [chain], 1, rng)
    assert len(curves) == 1
    slope = curves[0][-1]
    assert slope in chain.samples[:, 0]
    np.testing.assert_allclose(curves[0], slope * obj.x)


def test_predictive_degenerate_and_too_many():
    obj = LineObjective()
    chain = make_chain(np.full((120, 1), 3.0))
    curves = posterior_predictive(obj, [chain], 20, np.random.default_rng(0))
    assert all(np.array_equal(c, curves[0]) for c in curves)
    with pytest.raises(InsufficientSamplesError):
        posterior_predictive(obj, [chain], 121, np.random.default_rng(0))


def test_multiple_chains_distinct_but_reproducible():
    cfg = MCMCConfig(n_samples=1000, burn_in=200, n_chains=2, seed=5)
    a = run_chains(std_normal_target(), [0.0], cfg)
    b = run_chains(std_normal_target(), [0.0], cfg)
    assert a[0].seed != a[1].seed
    assert not np.array_equal(a[0].samples, a[1].samples)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.samples, y.samples)


@settings(max_examples=15)
@given(st.floats(0.01, 5.0), st.integers(0, 1000))
def test_samples_stay_in_bounds(step, seed):
    obj = std_normal_target(-0.5, 0.5)
    chain = run_chain(obj, [0.0], MCMCConfig(step_scale=[step], n_samples=300, burn_in=100, seed=seed))
    assert np.all((chain.samples >= -0.5) & (chain.samples <= 0.5))
    assert 0.0 <= chain.acceptance_rate <= 1.0
