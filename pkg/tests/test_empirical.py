import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extropy.datasets import BLOOD_CANCER, DATASETS, NEURON_SPIKES, REFERENCE_VALUES
from extropy.errors import DegenerateWeightError, ParameterError, UndefinedAtPointError
from extropy.empirical import (
    Sample,
    empirical_cdf,
    empirical_dfe,
    empirical_fe,
    empirical_wdfe,
    empirical_wfe,
    fe_estimator_moments,
    fig2_series,
    load_sample,
    matching_variant,
    mc_consistency_study,
    mc_report_json,
)
from extropy.transforms import WEIGHTS, WeightFunction

samples = st.lists(st.floats(0, 1e3, allow_nan=False), min_size=2, max_size=40)


def brute_fe(x):
    """Direct integral of the squared step cdf, interval by interval, in exact arithmetic."""
    x = sorted(Fraction(v) for v in x)
    n = len(x)
    total = sum(Fraction(sum(1 for v in x if v <= x[j]), n) ** 2 * (x[j + 1] - x[j]) for j in range(n - 1))
    return float(-total / 2)


# -- Sample ------------------------------------------------------------------------


def test_sample_validation():
    s = Sample([3.0, 1.0, 2.0])
    assert s.x.tolist() == [1.0, 2.0, 3.0] and s.n == 3
    with pytest.raises(ValueError):
        s.x[0] = 9
    for bad in ([1.0], [1.0, float("nan")], [1.0, -2.0], [[1.0, 2.0]], [1.0, float("inf")]):
        with pytest.raises(ParameterError):
            Sample(bad)


def test_datasets_shipped():
    assert len(BLOOD_CANCER) == 40 and len(NEURON_SPIKES) == 29
    assert set(DATASETS) == {"blood-cancer", "neuron-spikes"}
    assert Sample.from_dataset("blood-cancer").n == 40


def test_load_sample_formats(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("time\n# comment\n3, 1\n2\n\n4;5\n")
    assert load_sample(p).x.tolist() == [1, 2, 3, 4, 5]
    q = tmp_path / "b.txt"
    q.write_text("1.5 2.5\t0.5\n")
    assert load_sample(q).x.tolist() == [0.5, 1.5, 2.5]
    e = tmp_path / "empty.txt"
    e.write_text("# nothing\n")
    with pytest.raises(ParameterError):
        load_sample(e)
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\nabc\n")
    with pytest.raises(ParameterError):
        load_sample(bad)


# -- estimators ----------------------------------------------------------------------


def test_empirical_cdf():
    s = Sample([1, 2, 3])
    assert empirical_cdf(s, 0.5) == 0
    assert empirical_cdf(s, 2) == pytest.approx(2 / 3)
    assert empirical_cdf(s, 3) == 1 and empirical_cdf(s, 99) == 1


def test_fe_examples():
    assert empirical_fe(Sample([1, 3])).value == -0.25
    assert empirical_fe(Sample.from_dataset("blood-cancer")).value == pytest.approx(-222.752, abs=5e-3)
    assert empirical_fe(Sample.from_dataset("neuron-spikes")).value == pytest.approx(-113.135, abs=5e-3)
    assert empirical_fe(Sample([2, 2, 2])).value == 0.0


def test_dfe_examples():
    b = Sample.from_dataset("blood-cancer")
    r = empirical_dfe(b, 1000)
    assert r.value == pytest.approx(-128.069, abs=5e-3) and r.estimator == "dfe" and r.t == 1000
    assert empirical_dfe(Sample.from_dataset("neuron-spikes"), 340).value == pytest.approx(-39.8138, abs=5e-3)
    first = empirical_dfe(b, b.x[0])
    assert first.value == 0.0 and str(first.value) == "0.0"
    with pytest.raises(UndefinedAtPointError):
        empirical_dfe(b, b.x[0] - 1)


def test_dfe_tail_is_linear_past_the_sample():
    s = Sample([1, 2, 4])
    base = empirical_dfe(s, 4).value
    assert base == empirical_fe(s).value
    assert empirical_dfe(s, 7).value == pytest.approx(base - 1.5)


@given(samples)
@settings(max_examples=80, deadline=None)
def test_fe_matches_exact_step_integral(xs):
    s = Sample(xs)
    assert empirical_fe(s).value == pytest.approx(brute_fe(xs), rel=1e-12, abs=1e-12)
    assert empirical_fe(s).value <= 0
    assert empirical_dfe(s, s.x[-1]).value == empirical_fe(s).value


@given(samples, st.floats(0.01, 100), st.floats(0, 100))
@settings(max_examples=60, deadline=None)
def test_scale_and_shift(xs, a, b):
    s = Sample(xs)
    moved = Sample(a * np.asarray(xs) + b)
    assert empirical_fe(moved).value == pytest.approx(a * empirical_fe(s).value, rel=1e-9, abs=1e-9)


@given(samples)
@settings(max_examples=60, deadline=None)
def test_plugin_unit_weight_is_bit_identical(xs):
    s = Sample(xs)
    one = WEIGHTS["one"]
    assert empirical_wfe(s, one, "plugin").value == empirical_fe(s).value
    for t in s.x:
        assert empirical_wdfe(s, one, t, "plugin").value == empirical_dfe(s, t).value


def test_weighted_dataset_values():
    assert matching_variant() == "paper"
    assert matching_variant() == matching_variant()
    for name, ref in REFERENCE_VALUES.items():
        s = Sample.from_dataset(name)
        assert empirical_wfe(s, "id").value == pytest.approx(ref["wfe"], abs=5e-2)
        assert empirical_wdfe(s, "id", ref["t"]).value == pytest.approx(ref["wdfe"], abs=5e-2)
        # the plug-in reading does not reproduce the published numbers
        assert abs(empirical_wfe(s, "id", "plugin").value - ref["wfe"]) > 1


def test_weighted_names_and_edges():
    s = Sample([1, 2, 5])
    r = empirical_wfe(s, "id")
    assert r.estimator == "wfe" and r.weight == "id"
    assert empirical_wfe(s, "id", "plugin").estimator == "wfe-plugin"
    for variant in ("paper", "plugin"):
        assert empirical_wdfe(s, "square", 1.0, variant).value == 0.0
    with pytest.raises(ParameterError):
        empirical_wfe(s, "id", "other")
    zero = WeightFunction("zero", np.zeros_like)
    with pytest.raises(DegenerateWeightError):
        empirical_wfe(s, zero)


def test_fig2_series_shape_and_order():
    s = Sample.from_dataset("blood-cancer")
    t, series = fig2_series(s)
    assert list(series) == ["sqrt", "id", "square", "cube"]
    assert t[0] == s.x[0] and t[-1] == s.x[-1]
    for v in series.values():
        assert v[0] == 0.0 and np.all(v <= 0)
    end = [series[k][-1] for k in series]
    assert end == sorted(end)


# -- moments ------------------------------------------------------------------------


def test_moment_examples():
    assert fe_estimator_moments("uniform01", 2)[0] == pytest.approx(-1 / 24)
    assert fe_estimator_moments("exponential", 2, 1.0)[0] == pytest.approx(-0.125)
    mean, var = fe_estimator_moments("uniform01", 20000)
    assert mean == pytest.approx(-1 / 6, abs=1e-4) and var < 1e-5
    m1, v1 = fe_estimator_moments("exp(2)", 5)
    m2, v2 = fe_estimator_moments("exponential", 5, 1.0)
    assert m1 == pytest.approx(m2 / 2) and v1 == pytest.approx(v2 / 4)
    with pytest.raises(ParameterError):
        fe_estimator_moments("gamma", 5)
    with pytest.raises(ParameterError):
        fe_estimator_moments("uniform01", 1)


@pytest.mark.parametrize("n", [2, 3, 7, 10])
def test_exact_uniform_variance_against_dirichlet_covariance(n):
    # spacings of n uniforms: Var = n/((n+1)^2 (n+2)), Cov = -1/((n+1)^2 (n+2)); exact rationals
    a = [Fraction(j, n) ** 2 / 2 for j in range(1, n)]
    d = Fraction(1, (n + 1) ** 2 * (n + 2))
    var = sum(ai * aj * (n * d if i == j else -d) for i, ai in enumerate(a) for j, aj in enumerate(a))
    assert fe_estimator_moments("uniform01", n, exact=True)[1] == pytest.approx(float(var), rel=1e-13)
    diagonal = sum(ai * ai * n * d for ai in a)
    assert fe_estimator_moments("uniform01", n)[1] == pytest.approx(float(diagonal), rel=1e-13)


def test_mc_study_deterministic_and_json():
    a = mc_consistency_study("uniform01", [5, 10], 2000, seed=3)
    b = mc_consistency_study("uniform01", [5, 10], 2000, seed=3)
    c = mc_consistency_study("uniform01", [5, 10], 2000, seed=4)
    assert a == b and a != c
    data = json.loads(mc_report_json(a))
    assert [r["n"] for r in data] == [5, 10] and data[0]["seed"] == 3
    # chunking does not change the draws
    chunked = mc_consistency_study("uniform01", [5, 10], 2000, seed=3, chunk_elements=70)
    for x, y in zip(chunked, a):
        assert x.mc_mean == pytest.approx(y.mc_mean, rel=1e-13)
        assert x.mc_var == pytest.approx(y.mc_var, rel=1e-12)
    with pytest.raises(ParameterError):
        mc_consistency_study("uniform01", [10], 999, seed=1)


def test_mc_exponential_means():
    row = mc_consistency_study("exponential", [10], 20000, seed=9, rate=2.0)[0]
    assert abs(row.z_mean) < 4 and abs(row.z_var) < 4
    assert row.family == "exponential(2)"


@pytest.mark.slow
def test_uniform_estimator_converges():
    rows = mc_consistency_study("uniform01", [50, 500, 5000], 1000, seed=17)
    gaps = [abs(r.mc_mean + 1 / 6) for r in rows]
    assert gaps[0] > gaps[1] > gaps[2]
    assert rows[0].mc_var > rows[1].mc_var > rows[2].mc_var
    assert all(r.mc_mean < 0 for r in rows)
