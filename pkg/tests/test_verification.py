import random

import pytest

from discrete_appell.functions import Appell1Params, Appell2Params
from discrete_appell.series import SeriesOptions
from discrete_appell.verification import (
    ALIASES,
    FAMILIES,
    Draw,
    DrawPolicy,
    FamilySummary,
    Report,
    Status,
    check_identity,
    default_families,
    family_residuals,
    family_tolerance,
    first_params,
    recursion_sides,
    rel_residual,
    resolve_families,
    run_suite,
    second_params,
    summarize,
)

FAST = ["reduction_classical_f1", "theta_power", "recursion_a_plus", "second_finite_sum_b1"]


def test_residual_definition():
    assert rel_residual(1, 1) == 0
    assert rel_residual(2, 0) == pytest.approx(2 / 3)
    assert rel_residual(0, 0) == 0


def test_draws_respect_ranges():
    rng = random.Random(0)
    for _ in range(200):
        p = first_params(rng, "terminating")
        assert abs(p.x) <= 0.35 and abs(p.y) <= 0.35
        assert p.k1 in (1, 2, 3) and p.t1 in range(3 * p.k1, 3 * p.k1 + 5)
        assert 1.5 <= p.c.real <= 4 and p.c.imag != 0
        for u in (p.a, p.b1, p.b2):
            assert 0.5 <= u.real <= 3 and abs(u.imag) <= 1
        q = second_params(rng, "classical")
        assert q.k == 0 and -3 <= complex(q.t).real <= 3


def test_report_deterministic():
    policy = DrawPolicy("terminating", 4, 7)
    a = run_suite(policy, FAST)
    b = run_suite(policy, FAST)
    assert a.same_results(b)
    assert a.to_dict()["families"] == b.to_dict()["families"]
    assert a.suite == "terminating-4" and a.seed == 7


def test_different_seed_different_draws():
    fam = FAMILIES["theta_power"]
    d1 = next(DrawPolicy(seed=1).draws(fam)).params
    d2 = next(DrawPolicy(seed=2).draws(fam)).params
    assert d1 != d2


def test_tighter_tolerance_never_creates_passes():
    policy = DrawPolicy("terminating", 10, 3)
    for fid in FAST:
        loose = family_residuals(fid, policy)
        tight = family_residuals(fid, policy, tolerances={fid: family_tolerance(FAMILIES[fid]) / 10})
        for lo, hi in zip(loose, tight):
            if lo.status == Status.FAIL:
                assert hi.status == Status.FAIL


def test_tighter_series_tolerance_keeps_passes():
    policy = DrawPolicy("terminating", 10, 5)
    tight = SeriesOptions(rel_tol=1e-13)
    for fid in FAST:
        for r in family_residuals(fid, policy, opts=tight):
            assert r.status != Status.FAIL


def test_zero_shift_recursion_is_exact():
    for seed in range(5):
        p = first_params(random.Random(seed), "terminating")
        lhs, rhs = recursion_sides(p, "a_plus", 0)
        assert lhs == rhs
        q = second_params(random.Random(seed), "classical")
        lhs, rhs = recursion_sides(q, "c_minus", 0)
        assert lhs == rhs


def test_infinite_sum_at_zero_is_exact():
    fam = FAMILIES["infinite_sum_a"]
    p = first_params(random.Random(4), "terminating")
    r = check_identity(fam, Draw(p, {"z": 0j}))
    assert r.status == Status.PASS
    assert r.lhs == r.rhs


def test_empty_family_list():
    report = run_suite(DrawPolicy(), [])
    assert report.families == [] and report.ok
    assert report.to_dict()["families"] == []


def test_unsupported_regime_is_all_skipped_and_not_ok():
    res = family_residuals("operator_cross_first", DrawPolicy("classical", 3, 1))
    assert [r.status for r in res] == [Status.SKIPPED] * 3
    summary = summarize("operator_cross_first", res)
    assert not summary.ok
    assert not Report("x", 1, [summary]).ok


def test_summary_ok_rules():
    assert FamilySummary("f", 3, 0, 2).ok
    assert not FamilySummary("f", 3, 1, 0).ok
    assert FamilySummary("f").ok


def test_json_round_trip():
    report = run_suite(DrawPolicy("classical", 2, 9), FAST[:2])
    back = Report.from_json(report.to_json())
    assert back.same_results(report)
    assert back.wall_ms == report.wall_ms
    assert back.to_dict() == report.to_dict()


def test_wall_time_ignored_in_comparison():
    s = [FamilySummary("f", 1, 0, 0, 1e-15)]
    assert Report("a", 1, s, 3.0).same_results(Report("a", 1, s, 99.0))
    assert not Report("a", 1, s).same_results(Report("a", 2, s))


def test_alias_resolution():
    assert resolve_families(["Reduction3_3"]) == ALIASES["Reduction3_3"]
    ids = resolve_families(["theta_power", "theta_power", " "])
    assert ids == ["theta_power"]
    for name, ids in ALIASES.items():
        assert ids and all(i in FAMILIES for i in ids), name
    with pytest.raises(KeyError):
        resolve_families(["no_such_family"])


def test_mirror_aliases_point_at_second_form():
    mirrors = [name for name in ALIASES if name.startswith("F2Mirror_")]
    assert mirrors
    for name in mirrors:
        assert all(i.startswith("second_") for i in ALIASES[name])


def test_default_families_by_regime():
    term = default_families("terminating")
    classical = default_families("classical")
    assert set(term) | set(classical) == set(FAMILIES)
    assert "operator_cross_first" in term and "operator_cross_first" not in classical
    assert "integral_euler" in classical


def test_policy_validation():
    with pytest.raises(ValueError):
        DrawPolicy("formal")
    with pytest.raises(ValueError):
        DrawPolicy(count=-1)


def test_failing_identity_is_reported():
    # a family whose evaluator is off by a fixed factor must fail
    fam = FAMILIES["theta_power"]
    broken = type(fam)(fam.id, fam.description, fam.category, fam.regimes, fam.draw,
                       lambda d, o: (lambda l, r: (l, 1.001 * r))(*fam.evaluate(d, o)))
    d = next(DrawPolicy(count=1).draws(fam))
    assert check_identity(broken, d).status == Status.FAIL


def test_skipped_reason_recorded():
    fam = FAMILIES["reduction_classical_f1"]
    p = Appell1Params(1, 1, 1, -2.0, 3, 3, 1, 1, 0.1, 0.1)
    r = check_identity(fam, Draw(p))
    assert r.status == Status.SKIPPED and r.reason


def test_rate_family_reports_ratio():
    fam = FAMILIES["second_degeneration_phi2"]
    d = fam.draw(random.Random(0), "classical")
    r = check_identity(fam, d)
    assert r.status == Status.PASS
    assert 1.5 <= r.lhs.real <= 2.5 and r.rhs == 2


def test_second_form_draw_type():
    d = FAMILIES["second_theta_power"].draw(random.Random(0), "terminating")
    assert isinstance(d.params, Appell2Params)
