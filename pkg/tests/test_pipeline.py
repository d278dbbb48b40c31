import random

import pytest

from promoq import (
    Coupling,
    LevelConfig,
    NotFoundError,
    PipelineModel,
    ValidationError,
    analyze_pipeline,
    authority_grant,
)
from reference import CASE_6_2, CASE_8_3


def level(level_id, lam, mu, capacity=10, designation="staff", signing_limit=None, label=None):
    return LevelConfig(
        level_id=level_id,
        label=label or f"L{level_id}",
        arrival_rate=lam,
        service_rate=mu,
        capacity=capacity,
        designation=designation,
        signing_limit=signing_limit if signing_limit is not None else 100 * level_id,
    )


@pytest.fixture
def three_level_model():
    return PipelineModel(
        levels=(
            level(1, 6, 2, designation="engineer", signing_limit=100),
            level(2, 8, 3, designation="manager", signing_limit=1000),
            level(3, 4, 4, designation="director", signing_limit=5000),
        )
    )


class TestModelValidation:
    def test_zero_capacity_names_level(self):
        with pytest.raises(ValidationError, match="level 2.*capacity"):
            level(2, 1, 1, capacity=0)

    def test_nonpositive_rates_rejected(self):
        with pytest.raises(ValidationError, match="arrival rate"):
            level(1, 0, 1)
        with pytest.raises(ValidationError, match="service rate"):
            level(1, 1, -3)

    def test_ids_must_be_consecutive_from_one(self):
        with pytest.raises(ValidationError, match="consecutive"):
            PipelineModel(levels=(level(1, 1, 1), level(3, 1, 1)))
        with pytest.raises(ValidationError, match="consecutive"):
            PipelineModel(levels=(level(2, 1, 1),))

    def test_signing_limits_must_not_decrease(self):
        with pytest.raises(ValidationError, match="level 2.*signing limit"):
            PipelineModel(levels=(level(1, 1, 1, signing_limit=500),
                                  level(2, 1, 1, signing_limit=499)))

    def test_empty_pipeline_rejected(self):
        with pytest.raises(ValidationError, match="at least one level"):
            PipelineModel(levels=())

    def test_unknown_coupling_rejected(self):
        with pytest.raises(ValidationError, match="coupling"):
            PipelineModel(levels=(level(1, 1, 1),), coupling="parallel")

    def test_coupling_accepts_strings(self):
        model = PipelineModel(levels=(level(1, 1, 1),), coupling="tandem")
        assert model.coupling is Coupling.TANDEM


class TestAnalyzePipeline:
    def test_single_level_reproduces_reference_case(self):
        model = PipelineModel(levels=(level(1, 6, 2),))
        report = analyze_pipeline(model)
        entry = report[0]
        assert entry.metrics.expected_in_system == pytest.approx(
            CASE_6_2["mean_in_system"], abs=1e-4
        )
        for computed, printed in zip(entry.distribution, CASE_6_2["probabilities"]):
            assert computed == pytest.approx(printed, abs=2e-5)

    def test_tandem_balanced_levels_feed_ten_elevenths(self):
        lam = 3.0
        model = PipelineModel(
            levels=(level(1, lam, lam), level(2, lam, lam)), coupling=Coupling.TANDEM
        )
        report = analyze_pipeline(model)
        assert report[1].arrival_rate == pytest.approx(lam * 10 / 11, rel=1e-12)

    def test_three_level_independent_values(self, three_level_model):
        report = analyze_pipeline(three_level_model)
        means = [entry.metrics.expected_in_system for entry in report]
        assert means[0] == pytest.approx(CASE_6_2["mean_in_system"], abs=1e-4)
        assert means[1] == pytest.approx(CASE_8_3["mean_in_system"], abs=1e-3)
        assert means[2] == 5.0

    def test_report_order_and_length_match_model(self, three_level_model):
        report = analyze_pipeline(three_level_model)
        assert len(report) == len(three_level_model.levels)
        assert [entry.level_id for entry in report] == [1, 2, 3]
        assert [entry.label for entry in report] == ["L1", "L2", "L3"]

    def test_tandem_throughput_never_increases(self):
        rng = random.Random(404)
        for _ in range(25):
            n_levels = rng.randint(1, 5)
            levels = tuple(
                level(i, rng.uniform(0.2, 6.0), rng.uniform(0.2, 6.0),
                      capacity=rng.randint(1, 15), signing_limit=100 * i)
                for i in range(1, n_levels + 1)
            )
            report = analyze_pipeline(PipelineModel(levels=levels, coupling=Coupling.TANDEM))
            throughputs = [entry.throughput for entry in report]
            for upstream, downstream in zip(throughputs, throughputs[1:]):
                assert downstream <= upstream + 1e-12

    def test_independent_equals_tandem_when_rates_already_coupled(self):
        first = level(1, 6, 2, designation="engineer", signing_limit=100)
        handoff = analyze_pipeline(PipelineModel(levels=(first,)))[0].throughput
        second = level(2, handoff, 3, designation="manager", signing_limit=1000)
        independent = analyze_pipeline(
            PipelineModel(levels=(first, second), coupling=Coupling.INDEPENDENT)
        )
        tandem = analyze_pipeline(
            PipelineModel(levels=(first, second), coupling=Coupling.TANDEM)
        )
        for lhs, rhs in zip(independent, tandem):
            assert lhs.arrival_rate == rhs.arrival_rate
            assert lhs.distribution.probabilities == rhs.distribution.probabilities
            assert lhs.metrics == rhs.metrics


class TestAuthorityGrant:
    def test_grant_lookup(self, three_level_model):
        assert authority_grant(three_level_model, 2) == ("manager", 1000)

    def test_level_zero_not_found(self, three_level_model):
        with pytest.raises(NotFoundError):
            authority_grant(three_level_model, 0)

    def test_top_level_grant(self, three_level_model):
        assert authority_grant(three_level_model, 3) == ("director", 5000)
