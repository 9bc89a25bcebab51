import numpy as np
import pytest

from bayes_trials.dosefinding import (CrmSpec, DoseToxState, EscalationDesign,
                                      EscalationKind, MtpiSpec,
                                      boin_boundaries, boin_decide,
                                      crm_posterior, crm_recommend,
                                      decision_table, mtpi_decide, mtpi_upm,
                                      overdose_eliminate, rule_3p3, rule_i3p3,
                                      select_mtd, simulate_escalation,
                                      simulate_escalation_oc)
from bayes_trials.engine import ReplicateStream
from bayes_trials.exceptions import DoseFindingError, InvalidParameterError

ESCALATE = EscalationKind.ESCALATE
STAY = EscalationKind.STAY
DE_ESCALATE = EscalationKind.DE_ESCALATE
SKELETON = (0.05, 0.1, 0.2, 0.3, 0.45)


@pytest.mark.parametrize('n,y,kind', [(3, 0, ESCALATE), (3, 1, STAY),
                                      (3, 2, DE_ESCALATE), (6, 1, ESCALATE),
                                      (6, 2, DE_ESCALATE)])
def test_rule_3p3(n, y, kind):
    assert rule_3p3(DoseToxState.single(n, y)).kind is kind


def test_rule_3p3_undefined_cohort():
    with pytest.raises(DoseFindingError):
        rule_3p3(DoseToxState.single(4, 1))


@pytest.mark.parametrize('n,y,kind', [(3, 0, ESCALATE), (3, 1, STAY),
                                      (3, 2, DE_ESCALATE), (5, 2, STAY),
                                      (6, 3, DE_ESCALATE)])
def test_rule_i3p3(n, y, kind):
    decision = rule_i3p3(DoseToxState.single(n, y), 0.3, 0.25, 0.35)
    assert decision.kind is kind


def test_boin_boundaries():
    b = boin_boundaries(0.3)
    assert b.lambda_e == pytest.approx(0.2365, abs=1e-4)
    assert b.lambda_d == pytest.approx(0.3585, abs=1e-4)
    with pytest.raises(InvalidParameterError):
        boin_boundaries(0.3, phi1=0.35)


def test_boin_decisions():
    b = boin_boundaries(0.3)
    assert boin_decide(DoseToxState.single(3, 0), b).kind is ESCALATE
    assert boin_decide(DoseToxState.single(3, 1), b).kind is STAY
    assert boin_decide(DoseToxState.single(3, 2), b).kind is DE_ESCALATE


def test_escalation_past_top_dose_becomes_stay():
    top = DoseToxState((0, 3), (0, 0), 1)
    assert boin_decide(top, boin_boundaries(0.3)).kind is STAY
    blocked = DoseToxState((3, 0, 0), (0, 0, 0), 0, (False, True, True))
    assert boin_decide(blocked, boin_boundaries(0.3)).kind is STAY


def test_untreated_dose_has_no_decision():
    with pytest.raises(DoseFindingError):
        boin_decide(DoseToxState.empty(3), boin_boundaries(0.3))


def test_mtpi_unit_probability_mass():
    state = DoseToxState.single(3, 0)
    under, target, over = mtpi_upm(state, MtpiSpec(0.3))
    assert under == pytest.approx(2.734, abs=1e-3)
    assert target == pytest.approx(1.379, abs=1e-3)
    assert over == pytest.approx(0.275, abs=1e-3)
    assert mtpi_decide(state, MtpiSpec(0.3)).kind is ESCALATE


def test_mtpi2_uses_equal_width_sub_intervals():
    state = DoseToxState.single(3, 0)
    under, target, _ = mtpi_upm(state, MtpiSpec(0.3, variant='mtpi2'))
    assert target == pytest.approx(1.379, abs=1e-3)
    # Beta(1, 4) mass on [0, 0.05] over its width
    assert under == pytest.approx((1 - 0.95**4) / 0.05, rel=1e-9)


def test_mtpi_decisions():
    spec = MtpiSpec(0.3)
    assert mtpi_decide(DoseToxState.single(3, 3), spec).kind is DE_ESCALATE
    assert mtpi_decide(DoseToxState.single(10, 3), spec).kind is STAY


def test_overdose_elimination():
    flags = overdose_eliminate(DoseToxState.single(3, 3), 0.3)
    assert flags == (False, True, True)
    assert not any(overdose_eliminate(DoseToxState.single(3, 1), 0.3))
    assert not any(overdose_eliminate(DoseToxState.single(2, 2), 0.3))


def test_crm_prior_and_posterior():
    spec = CrmSpec(SKELETON, 0.3)
    empty = DoseToxState.empty(5)
    assert crm_posterior(empty, spec) is spec.grid
    rec = crm_recommend(empty, spec)
    assert np.all(np.diff(rec.toxicity_means) > 0)
    safe = DoseToxState((3, 0, 0, 0, 0), (0, 0, 0, 0, 0), 0)
    assert crm_recommend(safe, spec).dose == 1


def test_crm_without_no_skip_can_jump():
    spec = CrmSpec(SKELETON, 0.3, no_skip=False)
    safe = DoseToxState((6, 0, 0, 0, 0), (0, 0, 0, 0, 0), 0)
    assert crm_recommend(safe, spec).dose > 1


def test_crm_toxic_data_de_escalates():
    spec = CrmSpec(SKELETON, 0.3)
    toxic = DoseToxState((3, 3, 0, 0, 0), (0, 3, 0, 0, 0), 1)
    assert crm_recommend(toxic, spec).dose == 0


def test_crm_skips_eliminated_doses():
    spec = CrmSpec(SKELETON, 0.3, no_skip=False)
    state = DoseToxState((6, 0, 0, 0, 0), (0, 0, 0, 0, 0), 0,
                         (False, True, True, True, True))
    assert crm_recommend(state, spec).dose == 0


def test_crm_spec_validation():
    with pytest.raises(InvalidParameterError):
        CrmSpec((0.1, 0.1, 0.2), 0.3)
    with pytest.raises(InvalidParameterError):
        CrmSpec((0.1, 0.2, 1.0), 0.3)
    with pytest.raises(InvalidParameterError):
        crm_posterior(DoseToxState.empty(3), CrmSpec(SKELETON, 0.3))


def test_select_mtd_3p3():
    state = DoseToxState((6, 6, 3), (0, 1, 2), 1)
    assert select_mtd(state, 0.3, '3+3') == 1
    assert select_mtd(DoseToxState((3, 0), (2, 0), 0), 0.3, '3+3') is None


def test_select_mtd_isotonic():
    state = DoseToxState((3, 6, 6), (0, 1, 4), 1)
    assert select_mtd(state, 0.3, 'boin') == 1
    # pooling a violation ties both doses above the target
    pooled = DoseToxState((6, 6, 0), (3, 1, 0), 1)
    assert select_mtd(pooled, 0.3, 'boin') == 0
    assert select_mtd(DoseToxState.empty(3), 0.3, 'boin') is None


def test_3p3_trial_without_toxicity():
    design = EscalationDesign('3+3', 5, 0.3)
    result = simulate_escalation(design, (0.0, ) * 5,
                                 ReplicateStream(1, 0, 0))
    assert result.treated == (3, 3, 3, 3, 6)
    assert result.mtd == 4
    assert result.final_dose == 4
    assert not result.stopped_early


def test_3p3_trial_toxic_at_first_dose():
    design = EscalationDesign('3+3', 4, 0.3)
    result = simulate_escalation(design, (1.0, ) * 4,
                                 ReplicateStream(1, 0, 0))
    assert result.stopped_early
    assert result.mtd is None
    assert result.treated == (3, 0, 0, 0)
    assert result.final_dose is None


def test_boin_trial_without_toxicity():
    design = EscalationDesign('boin', 5, 0.3, max_n=30)
    result = simulate_escalation(design, (0.0, ) * 5,
                                 ReplicateStream(2, 0, 0))
    assert result.treated == (3, 3, 3, 3, 18)
    assert sum(result.dlts) == 0
    assert result.final_dose == 4
    assert result.mtd is not None


def test_boin_trial_stops_when_first_dose_is_toxic():
    design = EscalationDesign('boin', 4, 0.3)
    result = simulate_escalation(design, (1.0, ) * 4,
                                 ReplicateStream(1, 0, 0))
    assert result.stopped_early
    assert result.mtd is None
    assert all(result.eliminated)


def test_escalation_truth_validation():
    design = EscalationDesign('boin', 3, 0.3)
    with pytest.raises(InvalidParameterError):
        simulate_escalation(design, (0.1, 0.2), ReplicateStream(1, 0, 0))


@pytest.mark.parametrize('method', ['3+3', 'i3+3', 'boin', 'mtpi'])
def test_escalation_oc_summary(method):
    design = EscalationDesign(method, 4, 0.3, max_n=24)
    oc = simulate_escalation_oc(design, (0.05, 0.15, 0.3, 0.5), 200, 11)
    assert sum(oc.selection_pct) + oc.no_mtd_pct == pytest.approx(100.0)
    assert sum(oc.mean_treated) <= 24
    assert all(d <= t for d, t in zip(oc.mean_dlts, oc.mean_treated))
    assert 0.0 <= oc.stop_prob <= 1.0


def test_crm_escalation_oc():
    design = EscalationDesign('crm',
                              5,
                              0.3,
                              max_n=24,
                              crm=CrmSpec(SKELETON, 0.3))
    oc = simulate_escalation_oc(design, SKELETON, 100, 5)
    assert sum(oc.selection_pct) + oc.no_mtd_pct == pytest.approx(100.0)
    assert sum(oc.mean_treated) <= 24.0 + 1e-9


def test_escalation_oc_independent_of_workers():
    design = EscalationDesign('boin', 4, 0.3, max_n=18)
    truth = (0.1, 0.2, 0.35, 0.5)
    serial = simulate_escalation_oc(design, truth, 60, 3)
    parallel = simulate_escalation_oc(design, truth, 60, 3, workers=2)
    assert serial == parallel


def test_boin_decision_table():
    design = EscalationDesign('boin', 5, 0.3)
    rows = decision_table(design, 6)
    assert len(rows) == sum(n + 1 for n in range(1, 7))
    by_count = {(r.n, r.y): r for r in rows}
    assert by_count[3, 0].decision == 'Escalate'
    assert by_count[3, 1].decision == 'Stay'
    assert by_count[3, 2].decision == 'DeEscalate'
    assert by_count[3, 3].eliminate
    assert not by_count[3, 1].eliminate


def test_3p3_decision_table():
    rows = decision_table(EscalationDesign('3+3', 3, 0.3), 12)
    assert [(r.n, r.y) for r in rows][:4] == [(3, 0), (3, 1), (3, 2), (3, 3)]
    assert len(rows) == 4 + 7
    assert not any(r.eliminate for r in rows)


def test_crm_has_no_decision_table():
    design = EscalationDesign('crm', 5, 0.3, crm=CrmSpec(SKELETON, 0.3))
    with pytest.raises(DoseFindingError):
        decision_table(design, 6)


def test_escalation_design_validation():
    with pytest.raises(InvalidParameterError):
        EscalationDesign('crm', 5, 0.3)
    with pytest.raises(DoseFindingError):
        EscalationDesign('3+3', 5, 0.3, cohort_size=2)
    with pytest.raises(InvalidParameterError):
        EscalationDesign('up-and-down', 5, 0.3)
    with pytest.raises(InvalidParameterError):
        EscalationDesign('crm', 4, 0.3, crm=CrmSpec(SKELETON, 0.3))


def _decision_ranks(decide, n):
    order = {ESCALATE: 0, STAY: 1, DE_ESCALATE: 2}
    return [
        order[decide(DoseToxState.single(n, y)).kind] for y in range(n + 1)
    ]


@pytest.mark.parametrize('variant', ['mtpi', 'mtpi2'])
def test_mtpi_decisions_are_contiguous(variant):
    spec = MtpiSpec(0.3, variant=variant)
    for n in range(1, 13):
        ranks = _decision_ranks(lambda s: mtpi_decide(s, spec), n)
        assert ranks == sorted(ranks), (n, ranks)


def test_boin_decisions_are_contiguous():
    for target in (0.2, 0.25, 0.3, 0.35):
        b = boin_boundaries(target)
        for n in range(1, 31):
            ranks = _decision_ranks(lambda s: boin_decide(s, b), n)
            assert ranks == sorted(ranks), (target, n, ranks)


def test_crm_dlt_never_lowers_toxicity_estimates():
    spec = CrmSpec(SKELETON, 0.3)
    rng = np.random.default_rng(20240611)
    for _ in range(500):
        treated = rng.integers(0, 7, size=5)
        dlts = rng.binomial(treated, 0.3)
        dose = int(rng.integers(0, 5))
        state = DoseToxState(tuple(treated), tuple(dlts), dose)
        before = np.array(crm_recommend(state, spec).toxicity_means)
        with_dlt = np.array(
            crm_recommend(state.with_cohort(1, 1), spec).toxicity_means)
        without_dlt = np.array(
            crm_recommend(state.with_cohort(1, 0), spec).toxicity_means)
        assert np.all(with_dlt >= before - 1e-10)
        assert np.all(without_dlt <= before + 1e-10)


def test_boin_selects_the_target_dose_most_often():
    design = EscalationDesign('boin', 4, 0.3, cohort_size=3, max_n=30)
    oc = simulate_escalation_oc(design, (0.05, 0.15, 0.30, 0.50), 10_000,
                                2024)
    target = oc.selection_pct[2]
    assert all(target > pct for j, pct in enumerate(oc.selection_pct)
               if j != 2)


def _replay_is_safe(design, result):
    treated = [0] * design.n_doses
    dlts = [0] * design.n_doses
    flags = (False, ) * design.n_doses
    previous = design.start_dose
    for dose, y in result.cohorts:
        assert not flags[dose]
        assert dose <= previous + 1
        size = min(design.cohort_size, design.max_n - sum(treated))
        treated[dose] += size
        dlts[dose] += y
        if design.eliminate and design.method != '3+3':
            state = DoseToxState(tuple(treated), tuple(dlts), 0, flags)
            flags = overdose_eliminate(state, design.target,
                                       design.elimination_cutoff)
        previous = dose
    assert tuple(treated) == result.treated
    assert tuple(dlts) == result.dlts
    assert sum(result.treated) <= design.max_n


@pytest.mark.parametrize('method', ['3+3', 'i3+3', 'boin', 'mtpi', 'crm'])
def test_escalation_respects_safety_rules(method):
    crm = CrmSpec(SKELETON[:4], 0.3) if method == 'crm' else None
    design = EscalationDesign(method, 4, 0.3, max_n=24, crm=crm)
    truth = (0.1, 0.3, 0.5, 0.7)
    for replicate in range(200):
        result = simulate_escalation(design, truth,
                                     ReplicateStream(9, 0, replicate))
        _replay_is_safe(design, result)
        assert (result.final_dose is None) == result.stopped_early
