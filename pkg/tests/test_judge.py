import random

import pytest

from helpers import judge_pattern, make_result, verdict_json
from iabench.core.records import Criterion
from iabench.errors import JudgeError
from iabench.judge import geval, judge_criterion, load_criteria, passes
from iabench.judge.geval import render_judge_prompt
from iabench.provider.mock import MockProvider

DIVERSITY = Criterion(parameters=["Diversity"],
                      criterion_text="Instructions use diverse language and types.")


def _judge_calls(provider):
    return [r for r in provider.request_log
            if "Given the evaluation criteria below" in r.prompt]


def test_prompt_renders_all_slots():
    prompt = render_judge_prompt(DIVERSITY, "the user prompt", "the response")
    assert "using the Diversity fields" in prompt
    assert "Instructions use diverse language and types." in prompt
    assert "the user prompt" in prompt
    assert "\n    the response\n" in prompt
    assert '"score": an integer from 0 to 10' in prompt


def test_judge_criterion_parses_scripted_verdict():
    provider = MockProvider(seed=1, fixtures=[
        (judge_pattern("Diversity", "batch subject"), verdict_json(9, "varied phrasing")),
    ])
    verdict = judge_criterion(provider, "judge-model", "ctx", "batch subject", DIVERSITY)
    assert verdict.score == 9
    assert verdict.reason == "varied phrasing"
    assert len(_judge_calls(provider)) == 1
    assert provider.request_log[0].temperature == 0.0


def test_judge_reprompts_once_on_garbage():
    provider = MockProvider(seed=1, fixtures=[
        (r"not a valid verdict", verdict_json(8)),  # repair prompt marker
        (judge_pattern(subject="flaky subject"), "totally not json"),
    ])
    verdict = judge_criterion(provider, "judge-model", "ctx", "flaky subject", DIVERSITY)
    assert verdict.score == 8
    assert len(provider.request_log) == 2


def test_out_of_range_score_is_not_clamped():
    provider = MockProvider(seed=1, fixtures=[
        (judge_pattern(subject="overflow subject"), verdict_json(12)),
    ])
    with pytest.raises(JudgeError):
        judge_criterion(provider, "judge-model", "ctx", "overflow subject", DIVERSITY)
    assert len(provider.request_log) == 2  # first try plus one repair


def test_geval_one_call_per_criterion_and_mean():
    criteria = load_criteria("instruction", "English")
    provider = MockProvider(seed=1, fixtures=[
        (judge_pattern("Diversity"), verdict_json(8)),
        (judge_pattern("Relevance"), verdict_json(9)),
        (judge_pattern("Conciseness"), verdict_json(10)),
        (judge_pattern("Correctness"), verdict_json(9)),
    ])
    result = geval(provider, "judge-model", "ctx", "the subject", criteria)
    assert len(_judge_calls(provider)) == len(criteria) == 4
    assert result.overall == pytest.approx(9.0, abs=1e-12)
    assert all(r.temperature == 0.0 for r in provider.request_log)


def test_geval_single_criterion_identity():
    provider = MockProvider(seed=1, fixtures=[(judge_pattern("Diversity"), verdict_json(7))])
    result = geval(provider, "judge-model", "ctx", "s", [DIVERSITY])
    assert result.overall == 7.0


def test_geval_error_poisons_whole_result():
    criteria = load_criteria("topic", "English")
    provider = MockProvider(seed=1, fixtures=[
        (judge_pattern("Relatedness"), verdict_json(9)),
        (judge_pattern("Correctness"), "never json"),
    ])
    with pytest.raises(JudgeError):
        geval(provider, "judge-model", "ctx", "subject", criteria)


def test_overall_is_permutation_invariant():
    criteria = load_criteria("answer", "English")
    fixtures = [(judge_pattern(c.parameters[0]), verdict_json(5 + i))
                for i, c in enumerate(criteria)]
    rng = random.Random(3)
    baseline = None
    for _ in range(5):
        shuffled = list(criteria)
        rng.shuffle(shuffled)
        result = geval(MockProvider(seed=1, fixtures=fixtures), "judge-model",
                       "ctx", "subject", shuffled)
        baseline = baseline if baseline is not None else result.overall
        assert result.overall == baseline


def test_geval_parallel_matches_sequential():
    criteria = load_criteria("instruction", "English")
    fixtures = [(judge_pattern(c.parameters[0]), verdict_json(6 + i))
                for i, c in enumerate(criteria)]
    sequential = geval(MockProvider(seed=1, fixtures=fixtures), "judge-model",
                       "ctx", "subject", criteria, parallelism=1)
    parallel_provider = MockProvider(seed=1, fixtures=fixtures)
    parallel = geval(parallel_provider, "judge-model", "ctx", "subject", criteria,
                     parallelism=4)
    assert parallel.overall == sequential.overall
    assert [v.score for v in parallel.verdicts] == [v.score for v in sequential.verdicts]
    assert len(parallel_provider.request_log) == len(criteria)


def test_geval_requires_criteria():
    with pytest.raises(JudgeError):
        geval(MockProvider(seed=1), "judge-model", "ctx", "subject", [])


def test_passes_per_criterion_rule():
    assert passes(make_result([8, 8, 8, 8]), 8.0)
    assert not passes(make_result([7, 10, 10, 10]), 8.0)
    assert passes(make_result([0, 0]), 0.0)  # tau 0 always passes


def test_passes_mean_mode_switch():
    result = make_result([7, 10, 10, 10])
    assert passes(result, 8.0, mode="mean")
    assert not passes(result, 8.0, mode="per_criterion")


def test_passes_monotone_in_tau():
    rng = random.Random(11)
    taus = [0, 2, 4, 6, 8, 10]
    for _ in range(50):
        result = make_result([rng.randint(0, 10) for _ in range(4)])
        outcomes = [passes(result, t) for t in taus]
        # once failing, never passes again at a higher tau
        assert outcomes == sorted(outcomes, reverse=True)


def test_criteria_language_substitution():
    criteria = load_criteria("instruction", "Italian")
    conciseness = [c for c in criteria if c.parameters == ["Conciseness"]][0]
    assert "Italian" in conciseness.criterion_text
    assert "{instruction_language}" not in conciseness.criterion_text


def test_custom_criteria_loadable_from_file(tmp_path):
    import json

    path = tmp_path / "custom.json"
    path.write_text(json.dumps([
        {"parameters": ["Tone"], "criterion_text": "Responses stay formal in {instruction_language}."},
    ]))
    loaded = load_criteria(str(path), "German")
    assert loaded[0].parameters == ["Tone"]
    assert loaded[0].criterion_text == "Responses stay formal in German."


def test_unknown_criteria_set_rejected():
    from iabench.errors import UsageError

    with pytest.raises(UsageError):
        load_criteria("nonexistent", "English")


def test_criteria_sets_have_expected_parameters():
    expected = {
        "topic": ["Relatedness", "Correctness"],
        "instruction": ["Diversity", "Relevance", "Conciseness", "Correctness"],
        "difficulty": ["Difficulty", "Conciseness", "Correctness"],
        "answer": ["Correctness", "Relevance", "Conciseness", "Completeness", "Safety"],
        "meta": ["Accuracy", "Relevance", "Completeness"],
    }
    for name, parameters in expected.items():
        loaded = load_criteria(name, "English")
        assert [c.parameters[0] for c in loaded] == parameters
