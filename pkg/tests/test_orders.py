import json

import numpy as np
import pytest
from scipy import integrate as si

from extropy.distributions import Exponential, Pareto, Power, TypeIIIExtreme, Uniform
from extropy.measures import dynamic_failure_extropy, failure_extropy
from extropy.orders import (
    DEFAULT_CHAINS,
    KINDS,
    affine_preservation_check,
    check_order,
    implication_harness,
    random_family_pairs,
    transform_preservation_check,
)
from extropy.transforms import OrderStatistic, PowerTransformed, transform_affine


def test_power_pair_st_and_fe():
    X, Y = Power(1), Power(2)
    assert check_order("st", X, Y).holds == "yes"
    fe = check_order("fe", X, Y)
    assert fe.holds == "yes"
    assert failure_extropy(X).value == pytest.approx(-1 / 6)
    assert failure_extropy(Y).value == pytest.approx(-1 / 10)
    assert check_order("st", Y, X).holds == "no"
    assert check_order("fe", Y, X).holds == "no"


@pytest.mark.parametrize("d", [Uniform(0, 2), Power(0.4), TypeIIIExtreme(1.5, 1.0), Exponential(0.8),
                               Pareto(2.5, 1.0), PowerTransformed(Exponential(1), 3)], ids=str)
def test_reflexive(d):
    for kind in KINDS:
        assert check_order(kind, d, d).holds == "yes", kind


def test_max_of_three_is_rh_and_dfe_larger():
    X = Power(1)
    Y = PowerTransformed(X, 3)
    assert check_order("rh", X, Y).holds == "yes"
    assert check_order("dfe", X, Y).holds == "yes"
    for t in np.linspace(0.05, 1, 20):
        fx = -0.5 * si.quad(lambda u: (u / t) ** 2, 0, t)[0]
        fy = -0.5 * si.quad(lambda u: (u / t) ** 6, 0, t)[0]
        assert fx <= fy
        assert dynamic_failure_extropy(X, t).value == pytest.approx(fx, rel=1e-10)
        assert dynamic_failure_extropy(Y, t).value == pytest.approx(fy, rel=1e-10)


def test_verdict_witness_and_dict():
    v = check_order("st", Power(2), Power(1))
    assert v.holds == "no" and not v
    assert 0 < v.witness < 1
    d = v.as_dict()
    assert d["kind"] == "st" and d["holds"] == "no"
    json.dumps(d)
    dv = check_order("disp", Uniform(0, 2), Uniform(0, 1))
    assert dv.holds == "no" and isinstance(dv.as_dict()["witness"], list)
    with pytest.raises(ValueError):
        check_order("bogus", Power(1), Power(2))


def test_disp_scale_and_shift():
    assert check_order("disp", Uniform(0, 1), Uniform(0, 2)).holds == "yes"
    assert check_order("disp", Uniform(3, 4), Uniform(0, 1)).holds == "yes"
    assert check_order("disp", Exponential(2), Exponential(1)).holds == "yes"
    assert check_order("disp", Exponential(1), Exponential(2)).holds == "no"


def test_hazard_and_likelihood_ratio():
    assert check_order("hr", Exponential(2), Exponential(1)).holds == "yes"
    assert check_order("hr", Exponential(1), Exponential(2)).holds == "no"
    assert check_order("lr", Power(1), Power(3)).holds == "yes"
    assert check_order("lr", Power(3), Power(1)).holds == "no"


def test_order_statistic_ladder():
    m = 4
    values = [failure_extropy(OrderStatistic(Uniform(0, 1), k, m)).value for k in range(1, m + 1)]
    oracle = [-0.5 * si.quad(lambda x, k=k: OrderStatistic(Uniform(0, 1), k, m).cdf(x) ** 2, 0, 1,
                             epsabs=1e-13)[0] for k in range(1, m + 1)]
    assert np.allclose(values, oracle, atol=1e-10)
    assert np.all(np.diff(values) > 0)
    for lo_rank in range(1, m):
        for hi_rank in range(lo_rank + 1, m + 1):
            X = OrderStatistic(Uniform(0, 1), lo_rank, m)
            Y = OrderStatistic(Uniform(0, 1), hi_rank, m)
            assert check_order("fe", X, Y).holds == "yes"
            assert check_order("st", X, Y).holds == "yes"


def test_harness_power_pairs():
    rng = np.random.default_rng(7)
    pairs = [(Power(a), Power(b)) for a, b in rng.uniform(0.2, 6, size=(50, 2))]
    report = implication_harness(pairs, chains=[("st", "fe")])
    assert report.falsification_count == 0
    assert len(report.pairs) == 50
    assert sum(p["verdicts"]["st"]["holds"] == "yes" for p in report.pairs) > 10


def test_harness_identity_pairs():
    pairs = [(d, d) for d in (Uniform(0, 1), Power(2), Exponential(1))]
    report = implication_harness(pairs)
    assert report.falsification_count == 0 and report.skipped == 0
    assert report.chains == DEFAULT_CHAINS


def test_harness_report_json():
    report = implication_harness(random_family_pairs(3, count=6), grid=128)
    data = json.loads(report.to_json())
    assert data["pair_count"] == 6 and data["grid"] == 128
    assert data["chains"] == ["disp=>st", "st=>fe", "rh=>dfe", "lr=>st"]
    assert data["falsification_count"] == len(data["falsifications"])


def test_random_pairs_are_seeded():
    a = [(x.descriptor, y.descriptor) for x, y in random_family_pairs(11, 30)]
    b = [(x.descriptor, y.descriptor) for x, y in random_family_pairs(11, 30)]
    c = [(x.descriptor, y.descriptor) for x, y in random_family_pairs(12, 30)]
    assert a == b and a != c


def test_fe_implication_needs_matching_upper_endpoint():
    # U(0,1) <=_st U(0,2) but the longer support lowers the measure
    X, Y = Uniform(0, 1), Uniform(0, 2)
    assert check_order("st", X, Y).holds == "yes"
    assert check_order("fe", X, Y).holds == "no"
    assert check_order("fe", Y, X).holds == "yes"
    # common upper endpoint restores the implication
    assert check_order("st", Uniform(0, 2), Uniform(1, 2)).holds == "yes"
    assert check_order("fe", Uniform(0, 2), Uniform(1, 2)).holds == "yes"


def test_disp_does_not_imply_st_without_common_left_endpoint():
    X, Y = Uniform(3, 4), Uniform(0, 2)
    assert check_order("disp", X, Y).holds == "yes"
    assert check_order("st", X, Y).holds == "no"


def test_unrestricted_pairs_can_falsify():
    report = implication_harness(random_family_pairs(1, count=40, shared_support=False), grid=256)
    assert report.falsification_count > 0
    assert {f["chain"] for f in report.falsifications} <= {"disp=>st", "st=>fe", "rh=>dfe", "lr=>st"}


def test_fe_transitive():
    laws = [Power(a) for a in (0.3, 0.9, 1.7, 4.0)] + [Uniform(0, 1), TypeIIIExtreme(2, 1),
                                                        OrderStatistic(Uniform(0, 1), 2, 3)]
    rel = {(i, j): check_order("fe", a, b).holds == "yes" for i, a in enumerate(laws)
           for j, b in enumerate(laws)}
    n = len(laws)
    for i in range(n):
        assert rel[i, i]
        for j in range(n):
            assert rel[i, j] or rel[j, i]
            for k in range(n):
                if rel[i, j] and rel[j, k]:
                    assert rel[i, k]


def test_squaring_preserves_dfe_order():
    X = Power(1)
    Y = PowerTransformed(X, 2)
    rep = transform_preservation_check(X, Y, np.square, np.sqrt, lambda x: 2 * x, name="square")
    assert rep.holds == "yes"
    assert rep.premises[0].holds == "yes"


def test_identity_preservation_matches_dfe_check():
    X, Y = Power(1.5), Power(3)
    rep = transform_preservation_check(X, Y, lambda x: x, lambda x: x, np.ones_like)
    assert rep.holds == check_order("dfe", X, Y).holds == "yes"


def test_preservation_without_premise_is_inconclusive():
    rep = transform_preservation_check(Power(3), Power(1), np.square, np.sqrt, lambda x: 2 * x)
    assert rep.holds == "inconclusive"


def test_affine_preservation_uniform_pair():
    rep = affine_preservation_check(Uniform(0, 1), Uniform(0, 1), 1.0, 0.1, 2.0, 0.2)
    assert rep.holds == "yes"
    direct = check_order("dfe", transform_affine(Uniform(0, 1), 1.0, 0.1),
                         transform_affine(Uniform(0, 1), 2.0, 0.2))
    assert direct.holds == "yes"
    bad = affine_preservation_check(Uniform(0, 1), Uniform(0, 1), 2.0, 0.1, 1.0, 0.2)
    assert bad.holds == "inconclusive"
