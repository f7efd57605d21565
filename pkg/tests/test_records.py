import json
import math
import random

import pytest

from helpers import make_result
from iabench.core.records import (
    Answer,
    Criterion,
    FeedbackRound,
    GEvalResult,
    IAPair,
    Instruction,
    JudgeVerdict,
    Topic,
)
from iabench.errors import RecordError


def _random_instruction(rng: random.Random, k: int) -> Instruction:
    discarded = rng.random() < 0.4
    return Instruction(
        id=f"qt1-i000-{k:03d}",
        text=f"Question {rng.randint(0, 999)} about 'things'?",
        language=rng.choice(["English", "Italian"]),
        question_type_id="qt1",
        topic_ids=[f"Topic {rng.randint(0, 9)}" for _ in range(rng.randint(1, 3))],
        origin=rng.choice(["generated", "improved", "difficulty_enhanced"]),
        retry_count=rng.randint(0, 3),
        scores=[make_result([rng.randint(0, 10) for _ in range(4)])
                for _ in range(rng.randint(0, 2))],
        status="discarded" if discarded else "active",
        discard_reason="exhausted" if discarded else None,
    )


def test_round_trip_instruction_records():
    rng = random.Random(7)
    for k in range(50):
        record = _random_instruction(rng, k)
        decoded = Instruction.from_dict(json.loads(json.dumps(record.to_dict())))
        assert decoded == record


def test_round_trip_topic_and_pair():
    topic = Topic(text="Roman trade", question_type_id="qt1",
                  scores=make_result([9, 8]), status="retained")
    assert Topic.from_dict(topic.to_dict()) == topic

    instruction = Instruction(id="a", text="t?", language="English",
                              question_type_id="qt1", topic_ids=["x"])
    answer = Answer(id="a-ans", instruction_id="a", text="ok", language="English")
    norm = math.sqrt(0.6 ** 2 + 0.8 ** 2)
    pair = IAPair(instruction=instruction, answer=answer,
                  embedding=[0.6 / norm, 0.8 / norm], dve_status="kept")
    assert IAPair.from_dict(pair.to_dict()) == pair


def test_retained_topic_word_limit_enforced():
    with pytest.raises(RecordError):
        Topic(text="History of the Roman Empire", question_type_id="qt1",
              status="retained")


def test_rejected_topic_needs_reason():
    with pytest.raises(RecordError):
        Topic(text="Rome", question_type_id="qt1", status="rejected")


def test_discarded_instruction_needs_reason():
    with pytest.raises(RecordError):
        Instruction(id="x", text="t", language="en", question_type_id="qt1",
                    topic_ids=[], status="discarded")


def test_verdict_score_range():
    criterion = Criterion(parameters=["Diversity"], criterion_text="rubric")
    with pytest.raises(RecordError):
        JudgeVerdict(score=12, reason="r", criterion=criterion)
    with pytest.raises(RecordError):
        JudgeVerdict(score=-1, reason="r", criterion=criterion)
    with pytest.raises(RecordError):
        JudgeVerdict(score=5, reason="", criterion=criterion)


def test_geval_overall_must_be_mean():
    result = make_result([8, 9, 10])
    assert result.overall == pytest.approx(9.0, abs=1e-12)
    bad = result.to_dict()
    bad["overall"] = 8.9
    with pytest.raises(RecordError):
        GEvalResult.from_dict(bad)


def test_pair_embedding_must_be_unit():
    instruction = Instruction(id="a", text="t?", language="en",
                              question_type_id="qt1", topic_ids=[])
    answer = Answer(id="a-ans", instruction_id="a", text="ok", language="en")
    with pytest.raises(RecordError):
        IAPair(instruction=instruction, answer=answer, embedding=[0.6, 0.8001])


def test_dropped_pair_records_distance():
    instruction = Instruction(id="a", text="t?", language="en",
                              question_type_id="qt1", topic_ids=[])
    answer = Answer(id="a-ans", instruction_id="a", text="ok", language="en")
    with pytest.raises(RecordError):
        IAPair(instruction=instruction, answer=answer, dve_status="dropped")
    pair = IAPair(instruction=instruction, answer=answer, dve_status="dropped",
                  dve_min_distance=0.12, dve_conflicting_pair_id="b")
    assert IAPair.from_dict(pair.to_dict()) == pair


def test_feedback_round_accounting_invariant():
    FeedbackRound(round_index=0, items_in=5, items_passed=2, items_improved=2,
                  items_discarded=1)
    with pytest.raises(RecordError):
        FeedbackRound(round_index=0, items_in=5, items_passed=2, items_improved=2,
                      items_discarded=2)
