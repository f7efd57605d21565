import math
import random

import pytest

from iabench.core.records import Answer, IAPair, Instruction
from iabench.genpipe.dve import dve, embedding_text


def _pair(k, qt="qt1", text=None):
    instruction = Instruction(id=f"{qt}-p{k:03d}", text=text or f"Question {k}?",
                              language="English", question_type_id=qt, topic_ids=[])
    answer = Answer(id=f"{qt}-p{k:03d}-ans", instruction_id=instruction.id,
                    text=f"Answer {k}.", language="English")
    return IAPair(instruction=instruction, answer=answer)


def _fixed_embed(mapping):
    def embed(texts):
        return [mapping[t] for t in texts]
    return embed


def _unit(values):
    norm = math.sqrt(sum(x * x for x in values))
    return [x / norm for x in values]


def test_duplicate_vector_dropped():
    pairs = [_pair(0), _pair(1), _pair(2)]
    mapping = {
        embedding_text(pairs[0]): [1.0, 0.0],
        embedding_text(pairs[1]): [0.0, 1.0],
        embedding_text(pairs[2]): [1.0, 0.0],
    }
    kept, dropped = dve(pairs, 0.3, _fixed_embed(mapping))
    assert [p.pair_id for p in kept] == ["qt1-p000", "qt1-p001"]
    assert [p.pair_id for p in dropped] == ["qt1-p002"]
    assert dropped[0].dve_min_distance == pytest.approx(0.0)
    assert dropped[0].dve_conflicting_pair_id == "qt1-p000"


def test_hand_computed_cosine_distance_keeps_both():
    pairs = [_pair(0), _pair(1)]
    mapping = {
        embedding_text(pairs[0]): [1.0, 0.0],
        embedding_text(pairs[1]): [0.6, 0.8],  # cosine distance 1 - 0.6 = 0.4
    }
    kept, dropped = dve(pairs, 0.3, _fixed_embed(mapping))
    assert len(kept) == 2 and dropped == []


def test_threshold_zero_keeps_everything():
    rng = random.Random(5)
    pairs = [_pair(k) for k in range(20)]
    mapping = {embedding_text(p): _unit([rng.gauss(0, 1) for _ in range(4)])
               for p in pairs}
    kept, dropped = dve(pairs, 0.0, _fixed_embed(mapping))
    assert len(kept) == 20 and dropped == []


def test_groups_are_per_question_type():
    pairs = [_pair(0, "qt1"), _pair(1, "qt2")]
    vector = [1.0, 0.0]
    mapping = {embedding_text(p): vector for p in pairs}
    kept, dropped = dve(pairs, 0.3, _fixed_embed(mapping))
    # identical vectors survive because they sit in different groups
    assert len(kept) == 2 and dropped == []


def test_embeddings_attached_and_normalized():
    pairs = [_pair(0)]
    mapping = {embedding_text(pairs[0]): [3.0, 4.0]}
    kept, _ = dve(pairs, 0.3, _fixed_embed(mapping))
    assert kept[0].embedding == pytest.approx([0.6, 0.8])


def test_kept_set_matches_bruteforce_greedy_oracle():
    rng = random.Random(99)
    for trial in range(30):
        count = rng.randint(1, 40)
        threshold = rng.choice([0.1, 0.3, 0.7, 1.1])
        pairs = [_pair(k, qt=rng.choice(["qt1", "qt2"])) for k in range(count)]
        mapping = {embedding_text(p): _unit([rng.gauss(0, 1) for _ in range(6)])
                   for p in pairs}
        kept, dropped = dve(pairs, threshold, _fixed_embed(mapping))

        # oracle: independent greedy sweep over the full distance matrix
        expected_kept = []
        for pair in pairs:
            vector = mapping[embedding_text(pair)]
            group = [p for p in expected_kept
                     if p.instruction.question_type_id == pair.instruction.question_type_id]
            ok = True
            for other in group:
                other_vector = mapping[embedding_text(other)]
                distance = 1.0 - sum(a * b for a, b in zip(vector, other_vector))
                if distance < threshold:
                    ok = False
                    break
            if ok:
                expected_kept.append(pair)
        assert [p.pair_id for p in kept] == [p.pair_id for p in expected_kept], trial
        assert len(kept) + len(dropped) == count
