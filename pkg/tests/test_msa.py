import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msalab.ensemble import DisorderModel, hamiltonian
from msalab.errors import DomainError, ValidationError
from msalab.geometry import BoxSpec, Separation
from msalab.montecarlo import FAIL, INCONCLUSIVE, PASS, MonteCarloEstimate, clopper_pearson
from msalab.msa import (BootstrapConfig, MSAParams, Regular, ScheduleConfig, SubexpSuitable, Suitable, Verdict,
                        admissibility, build_schedule, certify_interval_regularity, classify_box, delta_window,
                        entry_thresholds, estimate_singular_prob, estimate_two_box_fail, fitted_mass,
                        format_reports, mass_from_norm, run_bootstrap, subexp_to_regular_mass,
                        suitable_to_regular_mass, two_box_statistics)
from msalab.spectral import dense_green_block_norm

FREE = DisorderModel(0.0)


def test_mass_conversions():
    assert suitable_to_regular_mass(4, 12) == pytest.approx(8 * math.log(12) / 12)
    assert suitable_to_regular_mass(4, 12) == pytest.approx(1.6566, abs=1e-4)
    assert suitable_to_regular_mass(1, math.e) == pytest.approx(2 / math.e)
    assert subexp_to_regular_mass(0.5, 16) == pytest.approx(2 / 4)
    assert mass_from_norm(math.exp(-0.3 * 36 / 2), 36) == pytest.approx(0.3)


def test_classify_free_box_against_dense_oracle():
    op = hamiltonian(FREE, BoxSpec((0,), 12), 0)
    v = classify_box(op, Regular(0.1, -1.0))
    assert v.threshold == pytest.approx(math.exp(-0.6))
    box = op.box
    ref = dense_green_block_norm(op, -1.0, box.belt_indices(), box.indices_in(box.core()))
    assert v.norm_value == pytest.approx(ref, rel=1e-10)
    assert v.regular == (ref <= math.exp(-0.6))


def test_in_spectrum_verdict():
    op = hamiltonian(FREE, BoxSpec((0,), 12), 0)
    v = classify_box(op, Regular(0.1, 2.0))   # 2 - 2cos(pi/2) is an eigenvalue
    assert v.verdict is Verdict.IN_SPECTRUM and not v.regular


def test_classify_requires_6n():
    with pytest.raises(DomainError):
        classify_box(hamiltonian(FREE, BoxSpec((0,), 14), 0), Regular(0.1, -1.0))


@given(st.sampled_from([12, 18, 24, 36]), st.floats(0.5, 8), st.floats(-1, 9), st.sampled_from([0.0, 1.0, 8.0]),
       st.integers(0, 1000))
@settings(max_examples=60, deadline=None)
def test_suitable_equals_regular(L, theta, E, lam, trial):
    op = hamiltonian(DisorderModel(lam, "uniform", 1), BoxSpec((0,), L), trial)
    a = classify_box(op, Suitable(theta, E))
    b = classify_box(op, Regular(suitable_to_regular_mass(theta, L), E))
    assert a.verdict == b.verdict


@given(st.floats(0.01, 3), st.floats(0.01, 3), st.integers(0, 200))
@settings(max_examples=40, deadline=None)
def test_regular_monotone_in_mass(m1, m2, trial):
    op = hamiltonian(DisorderModel(4.0), BoxSpec((0,), 24), trial)
    lo, hi = sorted((m1, m2))
    if classify_box(op, Regular(hi, 0.1)).regular:
        assert classify_box(op, Regular(lo, 0.1)).regular


def test_regularity_params_validation():
    with pytest.raises(DomainError):
        SubexpSuitable(1.2, 0.0)
    with pytest.raises(DomainError):
        Regular(0.0, 0.0)


def test_clopper_pearson_and_verdicts():
    lo, hi = clopper_pearson(0, 100)
    assert lo == 0 and hi == pytest.approx(1 - 0.025 ** (1 / 100))
    e = MonteCarloEstimate.from_counts(3, 1000)
    assert e.ci95[0] <= e.p_hat <= e.ci95[1]
    assert e.below(0.5) == PASS and e.below(1e-4) == FAIL and e.below(0.004) == INCONCLUSIVE
    assert MonteCarloEstimate.from_counts(0, 10, exact=True).below(1e-9) == PASS


@given(st.integers(0, 200), st.integers(1, 200))
def test_estimate_invariants(k, n):
    k = min(k, n)
    e = MonteCarloEstimate.from_counts(k, n)
    assert e.ci95[0] <= e.p_hat <= e.ci95[1]
    assert e.p_hat == k / n


def test_estimate_singular_prob_deterministic_and_errors():
    e = estimate_singular_prob(FREE, 24, Regular(0.2, -1.0), 50)
    assert e.p_hat == 0 and e.exact
    e = estimate_singular_prob(FREE, 36, Suitable(4.0, 2.0), 50)
    assert e.p_hat == 1
    with pytest.raises(DomainError):
        estimate_singular_prob(DisorderModel(1.0), 12, Regular(0.2, 0.0), 0)


def test_singular_prob_decreases_with_disorder():
    par = Suitable(1.0, 0.0)
    a = estimate_singular_prob(DisorderModel(8.0), 24, par, 400)
    b = estimate_singular_prob(DisorderModel(2.0), 24, par, 400)
    assert a.p_hat <= b.p_hat + 3 * max(b.sigma, 1 / 400)


def test_schedules():
    assert build_schedule(ScheduleConfig("power", 12, alpha=1.5, cap=300)).scales == (12, 36, 216)
    assert build_schedule(ScheduleConfig("geometric", 12, Y=11, cap=2000)).scales == (12, 132, 1452)
    with pytest.raises(ValidationError) as exc:
        build_schedule(ScheduleConfig("power", 12, alpha=1.5, msa_grade=True))
    assert any("α < (2p+2d)/(p+2d)" in d for d in exc.value.diagnostics)
    with pytest.raises(ValidationError):
        build_schedule(ScheduleConfig("geometric", 12, Y=12))


@given(st.sampled_from([6, 12, 18, 24, 36]), st.floats(1.05, 2.0))
@settings(deadline=None)
def test_schedule_invariants(L0, alpha):
    try:
        sch = build_schedule(ScheduleConfig("power", L0, alpha=alpha, cap=5000))
    except DomainError:
        return
    assert all(L % 6 == 0 for L in sch.scales)
    assert all(a < b for a, b in zip(sch.scales, sch.scales[1:]))


def test_admissibility():
    assert admissibility(MSAParams()) == []
    diags = admissibility(MSAParams(p=1.5, p_prime=1.0))
    assert any(d.startswith("violates 0 < p < p′") for d in diags)
    diags = admissibility(MSAParams(theta=3.0), interval_stage=True)
    assert any("θ > 2p + (b+1)d" in d for d in diags)
    assert any("α <" in d for d in admissibility(MSAParams(alpha=1.5)))


def test_entry_thresholds():
    t = entry_thresholds()
    assert t["hypH"] == pytest.approx(1 - 1 / 841)
    assert t["hypH"] == pytest.approx(0.9988, abs=1e-4)
    assert t["hypH2"] == pytest.approx(1 - 29 ** -2)
    assert t["hypH2"] == pytest.approx(0.99881, abs=1e-5)


def test_delta_window_formula():
    m0, m1 = suitable_to_regular_mass(4, 12), suitable_to_regular_mass(3.5, 12)
    d = delta_window(12, m0, m1, 2.5)
    assert d == pytest.approx((math.exp(-m1 * 6) - math.exp(-m0 * 6)) / (2 * 12 ** 5))
    assert d > 0


def test_certify_degenerate_interval():
    op = hamiltonian(FREE, BoxSpec((0,), 24), 0)
    c = certify_interval_regularity(op, 0.2, (-1.0, -1.0))
    assert c.certified == classify_box(op, Regular(0.2, -1.0)).regular
    assert len(c.energies) == 1


def test_delta_window_accepted_with_margin():
    # A box that is m0-regular at E0 is m0'-regular across the window.
    L0 = 36
    m0, m0p = suitable_to_regular_mass(4, L0), suitable_to_regular_mass(3.5, L0)
    d = delta_window(L0, m0, m0p, 2.5)
    found = 0
    for t in range(40):
        op = hamiltonian(DisorderModel(8.0), BoxSpec((0,), L0), t)
        v = classify_box(op, Regular(m0, 0.0))
        if v.regular and v.spectral_distance > 2 * L0 ** -2.5:
            found += 1
            assert certify_interval_regularity(op, m0p, (-d, d), grid_n=2).certified
    assert found > 0


@given(st.integers(0, 300), st.floats(0.05, 1.0), st.floats(-0.5, 0.5), st.floats(1e-6, 0.05))
@settings(max_examples=25, deadline=None)
def test_certificate_survives_refinement(trial, m, E0, w):
    op = hamiltonian(DisorderModel(8.0), BoxSpec((0,), 24), trial)
    if certify_interval_regularity(op, m, (E0 - w, E0 + w), grid_n=4).certified:
        fine = np.linspace(E0 - w, E0 + w, 41)
        assert all(classify_box(op, Regular(m, E)).regular for E in fine)


def test_two_box_free_and_separation():
    est = estimate_two_box_fail(FREE, 0.1, 12, (-1.0, -1.0), (0,), (14,), 20)
    assert est.p_hat == 0
    with pytest.raises(DomainError):
        two_box_statistics(FREE, 0.1, 12, (-1, -1), (0,), (12,), 10)
    with pytest.raises(DomainError):
        two_box_statistics(FREE, 0.1, 12, (-1, -1), (0,), (14,), 10, Separation(2))


def test_two_box_product_law_small():
    m = suitable_to_regular_mass(4, 12) / 2
    st_ = two_box_statistics(DisorderModel(8.0), m, 12, (0.0, 0.0), (0,), (13,), 600)
    single_hi = max(st_["x"].ci95[1], st_["y"].ci95[1])
    assert st_["both"].p_hat <= single_hi ** 2 + 3 * st_["both"].sigma + 1e-12


def test_fitted_mass_free_converges():
    # The core sits L/3 from the belt, so the mass tends to 2/3 of the free decay
    # rate arccosh(3/2); the Green function prefactor 1/(2 sinh g) < 1 makes the
    # approach monotone from above.
    target = 2 * math.acosh(1.5) / 3
    ms = [fitted_mass(FREE, -1.0, L, 1).median for L in (12, 24, 48, 96)]
    gaps = [m - target for m in ms]
    assert all(g > 0 for g in gaps)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.03


def test_fitted_mass_tracks_lyapunov():
    from msalab.diagnostics import lyapunov_1d
    g = lyapunov_1d(DisorderModel(8.0), 0.0, 200_000).gamma
    fm = fitted_mass(DisorderModel(8.0), 0.0, 108, 200)
    assert abs(fm.median - 2 * g / 3) / (2 * g / 3) < 0.3


def test_bootstrap_free_all_pass():
    cfg = BootstrapConfig(L0=48, trials=50, cap=300)
    reports = run_bootstrap(FREE, -1.0, cfg)
    assert len(reports) == 4
    assert all(r.verdict == PASS for r in reports)
    assert all(c.estimate.p_hat == 0 for r in reports for c in r.checks)
    assert "hypH" in format_reports(reports)


def test_bootstrap_rejects_bad_params():
    with pytest.raises(ValidationError):
        run_bootstrap(FREE, -1.0, BootstrapConfig(params=MSAParams(alpha=1.5)))
    with pytest.raises(ValidationError):
        run_bootstrap(FREE, -1.0, BootstrapConfig(L0=14))


def test_bootstrap_halts_on_entry_failure():
    reports = run_bootstrap(DisorderModel(1.0), 0.0, BootstrapConfig(L0=12, trials=200))
    assert len(reports) == 1 and reports[0].halted and reports[0].verdict == FAIL


# The next two follow the strong-disorder starting-scale examples literally.
# At lambda=8, L=12 the belt is only 4 sites from the core and no sampled box
# reaches the theta=4 mass 8 ln12/12; both are expected to fail (decisions log).

def test_strong_disorder_entry_probability():
    e = estimate_singular_prob(DisorderModel(8.0), 12, Suitable(4.0, 0.0), 2000)
    assert e.ci95[1] < 1 / 841


def test_strong_disorder_two_box_at_half_mass():
    m = suitable_to_regular_mass(4.0, 12) / 2
    e = estimate_two_box_fail(DisorderModel(8.0), m, 12, (0.0, 0.0), (0,), (14,), 2000)
    assert e.p_hat < 1 / 12 ** 2
