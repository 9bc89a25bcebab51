from scipy.integrate import quad
from scipy.stats import beta as beta_dist, betabinom
import numpy as np
import pytest

from bayes_trials.distributions import (BetaParams, BinomialSummary,
                                        posterior, uniform_grid, update_beta)
from bayes_trials.exceptions import (BudgetExceededError,
                                     InvalidParameterError)
from bayes_trials.rules import (NO_MONITORING, DecisionKind, EvidenceCache,
                                FinalAnalysis, FutilityRule, InterimState,
                                LossSpec, MonitoringRule, SuccessRule,
                                conditional_power, conditional_power_region,
                                effect_prob_two_arm, evaluate_interim,
                                expected_losses, loss_threshold,
                                posterior_success, ppos)

UNIFORM = BetaParams(1, 1)


def _state(successes, look, looks):
    return InterimState((BinomialSummary(successes, looks[look][0]), ),
                        look, looks)


def test_effect_prob_exchangeable_posteriors():
    post = BetaParams(3, 5)
    assert effect_prob_two_arm(post, post, 0.0) == pytest.approx(0.5,
                                                                 abs=1e-8)


def test_effect_prob_separated_posteriors():
    assert effect_prob_two_arm(BetaParams(1000, 1), BetaParams(1, 1000),
                               0.5) > 0.99


def test_effect_prob_matches_sampling():
    rng = np.random.default_rng(11)
    size = 1_000_000
    draws = rng.beta(9, 3, size) - rng.beta(4, 8, size)
    p = float(np.mean(draws > 0.2))
    se = np.sqrt(p * (1 - p) / size)
    value = effect_prob_two_arm(BetaParams(9, 3), BetaParams(4, 8), 0.2)
    assert abs(value - p) < 4 * se


def test_effect_prob_grid_control_agrees_with_conjugate():
    data = BinomialSummary(4, 12)
    grid_post = posterior(uniform_grid(2001), data)
    beta_post = update_beta(UNIFORM, data)
    treatment = BetaParams(8, 6)
    assert effect_prob_two_arm(treatment, grid_post,
                               0.1) == pytest.approx(effect_prob_two_arm(
                                   treatment, beta_post, 0.1),
                                                     abs=1e-3)


@pytest.mark.parametrize('a', [-0.3, 0.0, 0.15, 0.4])
def test_effect_prob_complements_lower_tail(a):
    post_t, post_c = BetaParams(9, 5), BetaParams(4, 7)
    # Pr(p_t - p_c < a) integrated over the control density
    lower, _ = quad(
        lambda x: beta_dist.pdf(x, 4, 7) * beta_dist.cdf(x + a, 9, 5),
        0.0,
        1.0,
        epsabs=1e-12,
        limit=200)
    assert effect_prob_two_arm(post_t, post_c, a) + lower == pytest.approx(
        1.0, abs=1e-7)


def test_effect_prob_threshold_range():
    with pytest.raises(InvalidParameterError):
        effect_prob_two_arm(UNIFORM, UNIFORM, 1.5)


def test_posterior_success_one_arm():
    check = posterior_success([UNIFORM], SuccessRule(0.5, 0.6))
    assert not check.passed
    assert check.evidence == pytest.approx(0.5)
    check = posterior_success([BetaParams(4, 8)], SuccessRule(0.5, 0.1))
    assert check.passed
    assert check.evidence == pytest.approx(0.11328125, abs=1e-10)


def test_rule_application():
    assert SuccessRule(0.5, 0.95).is_met(0.97)
    assert not SuccessRule(0.5, 0.95).is_met(0.94)


def test_rule_validation():
    with pytest.raises(InvalidParameterError):
        SuccessRule(0.3, 1.5)
    with pytest.raises(InvalidParameterError):
        SuccessRule(-0.1, 0.9)
    assert SuccessRule(-0.1, 0.9, 'two-arm').arms == 2
    with pytest.raises(InvalidParameterError):
        MonitoringRule('ppos')
    with pytest.raises(InvalidParameterError):
        MonitoringRule('conditional-power', 0.9)
    with pytest.raises(InvalidParameterError):
        FutilityRule(1.0)


def test_loss_threshold():
    assert loss_threshold(LossSpec(1, 1)) == pytest.approx(0.5)
    assert loss_threshold(LossSpec(19, 1)) == pytest.approx(0.95)
    assert loss_threshold(LossSpec(9, 1)) == pytest.approx(0.9)
    assert SuccessRule.from_loss(
        0.3, LossSpec(19, 1)).posterior_cutoff == pytest.approx(0.95)
    with pytest.raises(InvalidParameterError):
        LossSpec(0, 1)


def test_expected_losses_pick_the_cheaper_action():
    declare_success, declare_failure = expected_losses(0.91, LossSpec(9, 1))
    assert declare_success == pytest.approx(0.81)
    assert declare_failure == pytest.approx(0.91)
    assert declare_success < declare_failure


@pytest.mark.parametrize('spec',
                         [LossSpec(1, 1), LossSpec(19, 1), LossSpec(1, 4)])
def test_loss_threshold_minimises_expected_loss(spec):
    cutoff = loss_threshold(spec)
    for evidence in np.linspace(0.0, 1.0, 1001):
        declare_success, declare_failure = expected_losses(evidence, spec)
        if evidence >= cutoff:
            assert declare_success <= declare_failure + 1e-12
        else:
            assert declare_failure <= declare_success + 1e-12


def test_ppos_with_nothing_remaining():
    looks = ((10, ), )
    rule = SuccessRule(0.3, 0.9)
    assert ppos(_state(8, 0, looks), [UNIFORM], rule) == 1.0
    assert ppos(_state(1, 0, looks), [UNIFORM], rule) == 0.0


def test_ppos_increases_with_current_successes():
    looks = ((4, ), (8, ), (12, ), (16, ))
    for prior in (UNIFORM, BetaParams(2, 5)):
        analysis = FinalAnalysis.build([prior], SuccessRule(0.3, 0.85),
                                       (16, ))
        for look in range(3):
            values = [
                analysis.ppos(_state(y, look, looks))
                for y in range(looks[look][0] + 1)
            ]
            assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))


def test_ppos_matches_enumeration():
    looks = ((10, ), (20, ))
    value = ppos(_state(5, 0, looks), [UNIFORM], SuccessRule(0.3, 0.9))
    expected = sum(
        betabinom.pmf(y, 10, 6, 6) for y in range(11)
        if beta_dist.sf(0.3, 6 + y, 16 - y) >= 0.9)
    assert value == pytest.approx(expected, abs=1e-12)


def test_ppos_tower_property():
    looks = ((10, ), (20, ), (30, ))
    analysis = FinalAnalysis.build([BetaParams(2, 3)], SuccessRule(0.3, 0.9),
                                   (30, ))
    for y0 in range(11):
        now = analysis.ppos(_state(y0, 0, looks))
        post = update_beta(BetaParams(2, 3), BinomialSummary(y0, 10))
        later = sum(
            betabinom.pmf(z, 10, post.alpha, post.beta) *
            analysis.ppos(_state(y0 + z, 1, looks)) for z in range(11))
        assert now == pytest.approx(later, abs=1e-10)


def test_two_arm_ppos_tower_property():
    looks = ((4, 4), (8, 8))
    analysis = FinalAnalysis.build([UNIFORM, UNIFORM],
                                   SuccessRule(0.0, 0.8, 'two-arm'), (8, 8))
    state = InterimState((BinomialSummary(3, 4), BinomialSummary(1, 4)), 0,
                         looks)
    now = analysis.ppos(state)
    total = 0.0
    for zt in range(5):
        for zc in range(5):
            final = [BinomialSummary(3 + zt, 8), BinomialSummary(1 + zc, 8)]
            weight = betabinom.pmf(zt, 4, 4, 2) * betabinom.pmf(zc, 4, 2, 4)
            total += weight * analysis.check(final).passed
    assert now == pytest.approx(total, abs=1e-10)


def test_two_arm_region_matches_brute_force():
    cache = EvidenceCache([UNIFORM, BetaParams(2, 2)], 0.05, 'two-arm')
    region = cache.region((6, 7), 0.85)
    for yt in range(7):
        for yc in range(8):
            evidence = cache.evidence(
                [BinomialSummary(yt, 6),
                 BinomialSummary(yc, 7)])
            assert region[yt, yc] == (evidence >= 0.85)


def test_region_budget():
    cache = EvidenceCache([UNIFORM], 0.3)
    with pytest.raises(BudgetExceededError,
                       match='enumeration budget exceeded'):
        cache.region((100, ), 0.9, cell_budget=50)


def test_conditional_power():
    looks = ((10, ), (20, ))
    state = _state(3, 0, looks)
    assert conditional_power(state, [0.5], 10) == pytest.approx(0.171875)
    assert conditional_power(state, [0.5], 3) == 1.0
    assert conditional_power(state, [0.0], 10) == 0.0


def test_conditional_power_region_matches_critical_count():
    looks = ((10, ), (20, ))
    analysis = FinalAnalysis.build([UNIFORM], SuccessRule(0.3, 0.95), (20, ))
    critical = analysis.critical_count()
    for y in range(11):
        state = _state(y, 0, looks)
        assert conditional_power_region(
            state, [0.45], analysis) == pytest.approx(conditional_power(
                state, [0.45], critical),
                                                      abs=1e-12)


def test_interim_efficacy_stop():
    looks = ((10, ), (20, ))
    decision = evaluate_interim(_state(9, 0, looks), [UNIFORM],
                                SuccessRule(0.3, 0.95))
    assert decision.kind is DecisionKind.STOP_EFFICACY
    assert decision.evidence >= 0.95


def test_interim_futility_stop():
    looks = ((10, ), (20, ))
    decision = evaluate_interim(_state(1, 0, looks), [UNIFORM],
                                SuccessRule(0.5, 0.95), FutilityRule(0.10))
    assert decision.kind is DecisionKind.STOP_FUTILITY
    assert decision.evidence < 0.10


def test_interim_continue_without_monitoring():
    looks = ((10, ), (20, ))
    decision = evaluate_interim(_state(9, 0, looks), [UNIFORM],
                                SuccessRule(0.3, 0.95),
                                monitoring=NO_MONITORING)
    assert decision.kind is DecisionKind.CONTINUE
    assert not decision.kind.terminal


def test_ppos_monitoring_uses_predictive_probability():
    looks = ((10, ), (20, ))
    rule = SuccessRule(0.3, 0.95)
    state = _state(8, 0, looks)
    decision = evaluate_interim(state, [UNIFORM], rule,
                                monitoring=MonitoringRule('ppos', 0.9))
    assert decision.evidence == pytest.approx(ppos(state, [UNIFORM], rule))


def test_final_look_decisions():
    looks = ((10, ), (20, ))
    rule = SuccessRule(0.5, 0.95)
    low = evaluate_interim(_state(9, 1, looks), [UNIFORM], rule)
    assert low.kind is DecisionKind.FINAL_FAILURE
    assert low.evidence < 0.95
    high = evaluate_interim(_state(17, 1, looks), [UNIFORM], rule)
    assert high.kind is DecisionKind.FINAL_SUCCESS
    assert high.kind.success


def test_state_must_match_schedule():
    with pytest.raises(InvalidParameterError):
        InterimState((BinomialSummary(2, 9), ), 0, ((10, ), (20, )))
    with pytest.raises(InvalidParameterError):
        InterimState((BinomialSummary(2, 10), ), 2, ((10, ), (20, )))


def test_optional_stopping_coherence():
    rng = np.random.default_rng(5)
    for _ in range(200):
        prior = BetaParams(*rng.uniform(0.5, 5.0, 2))
        increments = rng.integers(1, 15, rng.integers(1, 5))
        p = rng.uniform()
        sequential = prior
        total = BinomialSummary(0, 0)
        for n in increments:
            chunk = BinomialSummary(int(rng.binomial(n, p)), int(n))
            sequential = update_beta(sequential, chunk)
            total = total + chunk
        batch = update_beta(prior, total)
        assert sequential.alpha == pytest.approx(batch.alpha, abs=1e-12)
        assert sequential.beta == pytest.approx(batch.beta, abs=1e-12)
        rule = SuccessRule(float(rng.uniform(0.1, 0.9)), 0.8)
        step = posterior_success([sequential], rule)
        once = posterior_success([batch], rule)
        assert step.evidence == pytest.approx(once.evidence, abs=1e-12)
        if abs(once.evidence - 0.8) > 1e-9:
            assert step.passed == once.passed
