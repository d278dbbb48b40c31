import random

import pytest

from promoq import (
    REASON_ALLOWED,
    AuthorityDatabase,
    AuthorizationRequest,
    Decision,
    LevelConfig,
    NotFoundError,
    PipelineModel,
    PolicyDocument,
    PolicyParseError,
    PolicySchemaError,
    PolicyValueError,
    PromotionEvent,
    SimulationConfig,
    ValidationError,
    apply_event_log,
    apply_promotion,
    evaluate,
    load_database,
    parse_policy,
    save_database,
    serialize_policy,
    simulate_pipeline,
)

SMITH_XML = """\
<Policy>
<user>
  <name>smith</name>
  <id>1</id>
  <designation>manager</designation>
  <signing_limit>1000</signing_limit>
</user>
</Policy>
"""

SMITH = PolicyDocument(name="smith", id=1, designation="manager", signing_limit=1000)


def three_level_model():
    return PipelineModel(
        levels=(
            LevelConfig(1, "L1", 6, 2, 10, "engineer", 100),
            LevelConfig(2, "L2", 8, 3, 10, "manager", 1000),
            LevelConfig(3, "L3", 4, 4, 10, "director", 5000),
        )
    )


class TestParsePolicy:
    def test_reference_document(self):
        assert parse_policy(SMITH_XML) == SMITH

    def test_missing_signing_limit_names_element(self):
        text = SMITH_XML.replace("  <signing_limit>1000</signing_limit>\n", "")
        with pytest.raises(PolicySchemaError, match="signing_limit"):
            parse_policy(text)

    def test_child_order_is_not_semantic(self):
        reordered = """
        <Policy><user>
          <signing_limit>1000</signing_limit>
          <designation>manager</designation>
          <name>smith</name>
          <id>1</id>
        </user></Policy>
        """
        assert parse_policy(reordered) == SMITH

    def test_malformed_xml_reports_position(self):
        with pytest.raises(PolicyParseError) as info:
            parse_policy("<Policy><user></Policy>")
        assert info.value.line == 1
        assert info.value.column is not None

    def test_non_numeric_id_is_value_error(self):
        with pytest.raises(PolicyValueError, match="id"):
            parse_policy(SMITH_XML.replace("<id>1</id>", "<id>one</id>"))

    def test_wrong_root_tag_is_schema_error(self):
        with pytest.raises(PolicySchemaError, match="Policy"):
            parse_policy("<Record><user><name>x</name></user></Record>")

    def test_whitespace_around_content_trimmed(self):
        padded = SMITH_XML.replace("<name>smith</name>", "<name>  smith\n  </name>")
        assert parse_policy(padded).name == "smith"


class TestSerializePolicy:
    def test_round_trip(self):
        assert parse_policy(serialize_policy(SMITH)) == SMITH

    def test_predefined_entities_escape_and_round_trip(self):
        doc = PolicyDocument(name="a&b", id=3, designation="<'\">&", signing_limit=5)
        text = serialize_policy(doc)
        assert "&amp;" in text
        assert "&lt;" in text
        assert parse_policy(text) == doc

    def test_zero_limit_serialized_as_zero_text(self):
        text = serialize_policy(PolicyDocument(name="n", id=0, designation="d", signing_limit=0))
        assert "<signing_limit>0</signing_limit>" in text

    def test_round_trip_random_documents(self):
        rng = random.Random(1234)
        alphabet = "abc XYZ&<>'\"0123"
        for _ in range(50):
            doc = PolicyDocument(
                name="".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12))).strip() or "x",
                id=rng.randint(0, 10**6),
                designation="".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12))).strip() or "y",
                signing_limit=rng.randint(0, 10**9),
            )
            assert parse_policy(serialize_policy(doc)) == doc


class TestEvaluate:
    def test_matching_request_allowed(self):
        db = AuthorityDatabase.of([SMITH])
        decision = evaluate(db, AuthorizationRequest("smith", 1, "manager", 1000))
        assert decision.allowed
        assert decision.reason == REASON_ALLOWED

    def test_amount_one_over_limit_denied(self):
        db = AuthorityDatabase.of([SMITH])
        decision = evaluate(db, AuthorizationRequest("smith", 1, "manager", 1001))
        assert not decision.allowed
        assert "signing limit" in decision.reason

    def test_empty_database_denies_on_existence(self):
        decision = evaluate(AuthorityDatabase.empty(),
                            AuthorizationRequest("smith", 1, "manager", 10))
        assert not decision.allowed
        assert "no record" in decision.reason

    def test_first_failing_predicate_reported(self):
        db = AuthorityDatabase.of([SMITH])
        # name and designation both wrong: the name check fires first
        decision = evaluate(db, AuthorizationRequest("jones", 1, "clerk", 99999))
        assert "name" in decision.reason
        # designation wrong and amount too high: designation fires first
        decision = evaluate(db, AuthorizationRequest("smith", 1, "clerk", 99999))
        assert "designation" in decision.reason

    def test_matching_is_case_sensitive(self):
        db = AuthorityDatabase.of([SMITH])
        assert not evaluate(db, AuthorizationRequest("Smith", 1, "manager", 10)).allowed

    def test_monotone_in_amount(self):
        db = AuthorityDatabase.of([SMITH])
        rng = random.Random(55)
        for _ in range(50):
            low = rng.randint(0, 2000)
            high = rng.randint(low, 2500)
            high_allowed = evaluate(db, AuthorizationRequest("smith", 1, "manager", high)).allowed
            low_allowed = evaluate(db, AuthorizationRequest("smith", 1, "manager", low)).allowed
            if high_allowed:
                assert low_allowed

    def test_evaluation_is_pure(self):
        db = AuthorityDatabase.of([SMITH])
        request = AuthorizationRequest("smith", 1, "manager", 500)
        before = dict(db.records)
        assert evaluate(db, request) == evaluate(db, request)
        assert dict(db.records) == before

    def test_decision_consistency_enforced(self):
        with pytest.raises(ValidationError):
            Decision(allowed=True, reason="nope")
        with pytest.raises(ValidationError):
            Decision(allowed=False, reason=REASON_ALLOWED)


class TestApplyPromotion:
    def test_grant_replaced_name_and_id_kept(self):
        db = AuthorityDatabase.of([SMITH])
        updated = apply_promotion(db, 1, "senior manager", 5000)
        record = updated.records[1]
        assert record == PolicyDocument("smith", 1, "senior manager", 5000)
        assert db.records[1] == SMITH  # original snapshot untouched

    def test_equal_limit_accepted_designation_may_change(self):
        db = AuthorityDatabase.of([SMITH])
        updated = apply_promotion(db, 1, "acting director", 1000)
        assert updated.records[1].designation == "acting director"
        assert updated.records[1].signing_limit == 1000

    def test_unknown_employee_not_found(self):
        with pytest.raises(NotFoundError):
            apply_promotion(AuthorityDatabase.of([SMITH]), 999, "boss", 9999)

    def test_limit_decrease_rejected(self):
        with pytest.raises(ValidationError, match="reduce"):
            apply_promotion(AuthorityDatabase.of([SMITH]), 1, "clerk", 999)

    def test_other_records_untouched(self):
        other = PolicyDocument("jones", 2, "clerk", 1200)
        db = AuthorityDatabase.of([SMITH, other])
        updated = apply_promotion(db, 1, "senior manager", 5000)
        assert updated.records[2] == other


class TestApplyEventLog:
    def test_arrival_then_promotion(self):
        events = (
            PromotionEvent(employee_id=1, from_level=0, to_level=1, timestamp=0.5),
            PromotionEvent(employee_id=1, from_level=1, to_level=2, timestamp=1.5),
        )
        db = apply_event_log(AuthorityDatabase.empty(), events, three_level_model())
        assert db.records[1] == PolicyDocument("emp-1", 1, "manager", 1000)

    def test_empty_log_is_identity(self):
        db = AuthorityDatabase.of([SMITH])
        assert apply_event_log(db, (), three_level_model()) == db

    def test_blocked_arrival_is_noop(self):
        events = (PromotionEvent(1, 0, 1, 0.5, blocked=True),)
        db = apply_event_log(AuthorityDatabase.empty(), events, three_level_model())
        assert len(db) == 0

    def test_blocked_promotion_removes_employee(self):
        events = (
            PromotionEvent(1, 0, 1, 0.5),
            PromotionEvent(1, 1, 2, 1.0, blocked=True),
        )
        db = apply_event_log(AuthorityDatabase.empty(), events, three_level_model())
        assert len(db) == 0

    def test_departure_past_top_removes_employee(self):
        events = (
            PromotionEvent(1, 0, 1, 0.1),
            PromotionEvent(1, 1, 2, 0.2),
            PromotionEvent(1, 2, 3, 0.3),
            PromotionEvent(1, 3, 4, 0.4),
        )
        db = apply_event_log(AuthorityDatabase.empty(), events, three_level_model())
        assert len(db) == 0

    def test_level_absent_from_model_rejected(self):
        events = (
            PromotionEvent(1, 0, 1, 0.1),
            PromotionEvent(1, 4, 5, 0.2),
        )
        with pytest.raises(ValidationError, match="level 5"):
            apply_event_log(AuthorityDatabase.empty(), events, three_level_model())

    def test_unordered_timestamps_rejected(self):
        events = (
            PromotionEvent(1, 0, 1, 1.0),
            PromotionEvent(2, 0, 1, 0.5),
        )
        with pytest.raises(ValidationError, match="ordered"):
            apply_event_log(AuthorityDatabase.empty(), events, three_level_model())

    def test_replaying_last_event_again_changes_nothing(self):
        events = [
            PromotionEvent(1, 0, 1, 0.1),
            PromotionEvent(2, 0, 1, 0.2),
            PromotionEvent(1, 1, 2, 0.3),
        ]
        model = three_level_model()
        once = apply_event_log(AuthorityDatabase.empty(), events, model)
        twice = apply_event_log(AuthorityDatabase.empty(), events + [events[-1]], model)
        assert once == twice

    def test_full_replay_matches_simulator_counters(self):
        model = three_level_model()
        config = SimulationConfig(seed=2718, measured_arrivals=20000, warmup_arrivals=0)
        results, events = simulate_pipeline(model, config)
        db = apply_event_log(AuthorityDatabase.empty(), events, model)
        admissions = results[0].admitted_count
        departures = results[-1].completed_count
        losses = sum(result.blocked_count for result in results[1:])
        assert len(db) == admissions - departures - losses

    def test_signing_limits_never_decrease_during_replay(self):
        model = three_level_model()
        _, events = simulate_pipeline(
            model, SimulationConfig(seed=4, measured_arrivals=5000, warmup_arrivals=0)
        )
        db = AuthorityDatabase.empty()
        limits: dict[int, int] = {}
        for event in events:
            db = apply_event_log(db, (event,), model)
            for employee_id, record in db.records.items():
                if employee_id in limits:
                    assert record.signing_limit >= limits[employee_id]
                limits[employee_id] = record.signing_limit


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        db = AuthorityDatabase.of([SMITH, PolicyDocument("jones", 2, "clerk", 1500)])
        save_database(db, tmp_path / "authority")
        assert load_database(tmp_path / "authority") == db

    def test_save_prunes_departed_records(self, tmp_path):
        directory = tmp_path / "authority"
        save_database(AuthorityDatabase.of([SMITH]), directory)
        save_database(AuthorityDatabase.empty(), directory)
        assert load_database(directory) == AuthorityDatabase.empty()
        assert not list(directory.glob("*.xml"))

    def test_filename_id_mismatch_rejected(self, tmp_path):
        directory = tmp_path / "authority"
        directory.mkdir()
        (directory / "7.xml").write_text(SMITH_XML, encoding="utf-8")
        with pytest.raises(ValidationError, match="7"):
            load_database(directory)

    def test_non_policy_files_ignored(self, tmp_path):
        directory = tmp_path / "authority"
        save_database(AuthorityDatabase.of([SMITH]), directory)
        (directory / "README.txt").write_text("not a policy")
        assert load_database(directory) == AuthorityDatabase.of([SMITH])

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            AuthorityDatabase.of([SMITH, PolicyDocument("clone", 1, "manager", 1000)])
