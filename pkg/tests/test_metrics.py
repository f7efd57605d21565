import math
import random

import pytest

from iabench.errors import MetricError
from iabench.metrics import answer_relevance, lcs_length, rouge_l, semantic_f1, tokenize
from iabench.provider.mock import MockProvider


def test_tokenize_strips_edge_punctuation():
    assert tokenize("The cat, sat.") == ["the", "cat", "sat"]


def test_tokenize_empty():
    assert tokenize("") == []
    assert tokenize("  ...  !!") == []


def test_tokenize_unicode_lowercase():
    assert tokenize("È però") == ["è", "però"]


def test_tokenize_keeps_inner_punctuation():
    assert tokenize("don't stop-motion") == ["don't", "stop-motion"]


def test_rouge_identity_and_disjoint():
    assert rouge_l("some shared words", "some shared words").value == 1.0
    assert rouge_l("alpha beta", "gamma delta").value == 0.0
    assert rouge_l("", "words").value == 0.0
    assert rouge_l("words", "").value == 0.0


def test_rouge_hand_computed_example():
    score = rouge_l("the cat sat", "the cat was sat")
    precision, recall = score.components
    assert precision == pytest.approx(1.0)
    assert recall == pytest.approx(0.75)
    assert score.value == pytest.approx(2 * 1.0 * 0.75 / 1.75)


def test_rouge_symmetry_on_random_pairs():
    rng = random.Random(17)
    vocab = "abcdefgh"
    for _ in range(100):
        a = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 12)))
        b = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 12)))
        assert rouge_l(a, b).value == rouge_l(b, a).value


def test_lcs_small_cases():
    assert lcs_length([], ["a"]) == 0
    assert lcs_length(list("abcde"), list("ace")) == 3
    assert lcs_length(list("abc"), list("abc")) == 3


def _fixed_embed(mapping):
    def embed(texts):
        return [mapping[t] for t in texts]
    return embed


def test_semantic_f1_hand_computed_fixture():
    # sim(a, a) = 1, sim(b, a) = 0.5 -> P = 0.75, R = 1.0, F1 = 0.857142...
    mapping = {"a": [1.0, 0.0], "b": [0.5, math.sqrt(3) / 2]}
    score = semantic_f1("a b", "a", _fixed_embed(mapping))
    precision, recall = score.components
    assert precision == pytest.approx(0.75)
    assert recall == pytest.approx(1.0)
    assert score.value == pytest.approx(2 * 0.75 / 1.75)


def test_semantic_f1_orthogonal_is_zero():
    mapping = {"x": [1.0, 0.0], "y": [0.0, 1.0]}
    assert semantic_f1("x", "y", _fixed_embed(mapping)).value == 0.0


def test_semantic_f1_identity_with_mock_embeddings():
    provider = MockProvider(seed=5)
    embed = lambda texts: provider.embed(texts, "e")
    for text in ["a single sentence", "più parole qui", "one"]:
        assert semantic_f1(text, text, embed).value == pytest.approx(1.0)


def test_semantic_f1_negative_similarity_clamped():
    mapping = {"p": [1.0, 0.0], "q": [-1.0, 0.0]}
    assert semantic_f1("p", "q", _fixed_embed(mapping)).value == 0.0


def test_answer_relevance_verbatim_regeneration_scores_one():
    instruction = "What is the capital of France?"
    chat = lambda prompt: '{"questions": ["%s", "%s", "%s"]}' % ((instruction,) * 3)
    provider = MockProvider(seed=5)
    embed = lambda texts: provider.embed(texts, "e")
    score = answer_relevance(instruction, "Paris.", chat, embed, k=3)
    assert score.value == pytest.approx(1.0)


def test_answer_relevance_orthogonal_is_zero():
    mapping = {"instr": [1.0, 0.0], "q1": [0.0, 1.0], "q2": [0.0, -1.0]}
    chat = lambda prompt: '{"questions": ["q1", "q2"]}'
    score = answer_relevance("instr", "whatever", chat, _fixed_embed(mapping), k=2)
    assert score.value == 0.0


def test_answer_relevance_mean_and_order_invariance():
    mapping = {
        "instr": [1.0, 0.0, 0.0],
        "qa": [0.9, math.sqrt(1 - 0.81), 0.0],
        "qb": [0.8, math.sqrt(1 - 0.64), 0.0],
        "qc": [0.7, math.sqrt(1 - 0.49), 0.0],
    }
    for order in (["qa", "qb", "qc"], ["qc", "qa", "qb"]):
        chat = lambda prompt, o=order: '{"questions": ["%s", "%s", "%s"]}' % tuple(o)
        score = answer_relevance("instr", "ans", chat, _fixed_embed(mapping), k=3)
        assert score.value == pytest.approx(0.8)


def test_answer_relevance_generation_failure_is_metric_error():
    chat = lambda prompt: "no json"
    provider = MockProvider(seed=5)
    embed = lambda texts: provider.embed(texts, "e")
    with pytest.raises(MetricError):
        answer_relevance("instr", "ans", chat, embed, k=3)


def test_metric_values_bounded_on_random_pairs():
    provider = MockProvider(seed=5)
    embed = lambda texts: provider.embed(texts, "e")
    rng = random.Random(23)
    words = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
    for _ in range(100):
        a = " ".join(rng.choice(words) for _ in range(rng.randint(1, 10)))
        b = " ".join(rng.choice(words) for _ in range(rng.randint(1, 10)))
        for score in (rouge_l(a, b), semantic_f1(a, b, embed)):
            assert 0.0 <= score.value <= 1.0
