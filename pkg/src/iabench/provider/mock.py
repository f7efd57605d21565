"""Deterministic offline provider for tests and CI runs.

Every response is a pure function of (seed, prompt), so full pipeline runs
are byte-identical across reruns and resumes regardless of call order.

Behavior is scriptable: fixtures map a regex on the rendered prompt to a
canned response string or a callable ``(match, request) -> str``. The first
matching fixture wins; unmatched prompts fall back to hash-derived responses
shaped for the prompt family (topic lists, judge verdicts, instruction
batches, answers, and so on).
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from typing import Sequence

from iabench.provider.base import ChatRequest, EmbeddingVector, Provider, unit_normalize
from iabench.provider.jsonx import find_balanced

_ADJECTIVES = (
    "Ancient", "Coastal", "Digital", "Forgotten", "Glacial", "Hidden", "Industrial",
    "Lunar", "Medieval", "Nomadic", "Orbital", "Polar", "Quiet", "Rural", "Solar",
    "Tidal", "Urban", "Volcanic", "Wandering", "Zonal",
)
_NOUNS = (
    "archives", "bridges", "canals", "dialects", "engines", "festivals", "gardens",
    "harbors", "instruments", "journeys", "kilns", "lighthouses", "markets",
    "networks", "orchards", "pigments", "quarries", "rituals", "satellites", "trades",
)
_VERBS = ("compare", "trace", "rank", "date", "map", "summarize")

# Judge scores: roughly four in five draws land in the passing band {8, 9, 10},
# the rest in {4..7}, so feedback loops see both outcomes.
_FAIL_ONE_IN = 5

_COUNT_TOPICS_RE = re.compile(r"generate (\d+) diverse topics")
_COUNT_INSTRUCTIONS_RE = re.compile(r"a set of (\d+) diverse instructions")
_COUNT_QUESTIONS_RE = re.compile(r"write (\d+) plausible questions")


class MockProvider(Provider):
    def __init__(self, seed: int, *, fixtures: Sequence[tuple[str, object]] = (),
                 embedding_dim: int = 32, log_requests: bool = True) -> None:
        super().__init__(log_requests=log_requests)
        self.seed = seed
        self.embedding_dim = embedding_dim
        self._fixtures: list[tuple[re.Pattern[str], object]] = []
        for pattern, responder in fixtures:
            self.add_fixture(pattern, responder)

    def add_fixture(self, pattern: str, responder: object) -> None:
        """Register a scripted response; earlier fixtures take precedence."""
        self._fixtures.append((re.compile(pattern, re.DOTALL), responder))

    # ------------------------------------------------------------------
    # Provider interface
    # ------------------------------------------------------------------

    def chat(self, request: ChatRequest) -> str:
        self._record(request)
        for pattern, responder in self._fixtures:
            match = pattern.search(request.prompt)
            if match:
                if callable(responder):
                    return responder(match, request)
                return str(responder)
        return self._default_chat(request.prompt)

    def embed(self, texts: Sequence[str], model_id: str) -> list[EmbeddingVector]:
        vectors = []
        for text in texts:
            rng = random.Random(self._digest("embed", text))
            values = [rng.gauss(0.0, 1.0) for _ in range(self.embedding_dim)]
            vectors.append(EmbeddingVector(values=unit_normalize(values), model_id=model_id))
        return vectors

    # ------------------------------------------------------------------
    # Default hash-derived responses
    # ------------------------------------------------------------------

    def _digest(self, *parts: str) -> int:
        payload = "\x1f".join((str(self.seed),) + parts).encode("utf-8")
        return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")

    def _word(self, words: tuple[str, ...], *parts: str) -> str:
        return words[self._digest(*parts) % len(words)]

    def _default_chat(self, prompt: str) -> str:
        if "improve the difficulty of a set of existing instructions" in prompt:
            items = self._embedded_instruction_texts(prompt)
            return _json_obj("instructions", [f"Harder: {text}" for text in items])
        if "improve a set of instructions" in prompt:
            items = self._embedded_instruction_texts(prompt)
            return _json_obj("instructions", [f"Improved: {text}" for text in items])
        if "improve 1 answer" in prompt:
            answer = _after_marker(prompt, "The answer to improve is: ")
            return _json_obj("answer", f"Improved: {answer}")
        if "output an answer to a given instruction" in prompt:
            return _json_obj("answer", self._answer_for(prompt))
        if _COUNT_QUESTIONS_RE.search(prompt):
            count = int(_COUNT_QUESTIONS_RE.search(prompt).group(1))
            return _json_obj("questions", self._questions_for(prompt, count))
        if '"score"' in prompt:
            return self._judge_verdict(prompt)
        match = _COUNT_TOPICS_RE.search(prompt)
        if match:
            return _json_obj("topics", self._topics_for(prompt, int(match.group(1))))
        if '"topic"' in prompt:
            return _json_obj("topic", self._topics_for(prompt, 1)[0])
        match = _COUNT_INSTRUCTIONS_RE.search(prompt)
        if match:
            return _json_obj("instructions",
                             self._instructions_for(prompt, int(match.group(1))))
        # Plain prompt: behaves as an echo-style model under test.
        stub = " ".join(prompt.split())[:60]
        return f"Mock reply {self._digest('reply', prompt) % 10_000:04d} regarding: {stub}"

    def _judge_verdict(self, prompt: str) -> str:
        h = self._digest("judge", prompt)
        if h % _FAIL_ONE_IN == 0:
            score = 4 + (h >> 8) % 4
            reason = "The response misses part of the stated requirements."
        else:
            score = 8 + (h >> 8) % 3
            reason = "The response satisfies the stated requirements."
        return json.dumps({"score": score, "reason": reason})

    def _topics_for(self, prompt: str, count: int) -> list[str]:
        return [
            f"{self._word(_ADJECTIVES, 'adj', prompt, str(i))} "
            f"{self._word(_NOUNS, 'noun', prompt, str(i))}"
            for i in range(count)
        ]

    def _instructions_for(self, prompt: str, count: int) -> list[str]:
        topics = _embedded_list(prompt, "The topics are: ") or ["general matters"]
        out = []
        for i in range(count):
            h = self._digest("inst", prompt, str(i))
            first = topics[h % len(topics)]
            second = topics[(h >> 8) % len(topics)]
            verb = _VERBS[(h >> 16) % len(_VERBS)]
            noun = _NOUNS[(h >> 24) % len(_NOUNS)]
            out.append(f"Can you {verb} '{first}' against '{second}' in terms of {noun}?")
        return out

    def _answer_for(self, prompt: str) -> str:
        instruction = _after_marker(prompt, "The instruction is: ")
        h = self._digest("answer", instruction)
        return (f"It comes down to {_NOUNS[h % len(_NOUNS)]} shaped by "
                f"{_NOUNS[(h >> 8) % len(_NOUNS)]}.")

    def _questions_for(self, prompt: str, count: int) -> list[str]:
        return [
            f"What explains the {self._word(_NOUNS, 'q', prompt, str(i))} mentioned here?"
            for i in range(count)
        ]

    def _embedded_instruction_texts(self, prompt: str) -> list[str]:
        items = _embedded_list(prompt, "The instructions to improve are: ")
        out = []
        for item in items:
            if isinstance(item, dict) and "instruction" in item:
                out.append(str(item["instruction"]))
            else:
                out.append(str(item))
        return out


def _json_obj(key: str, value: object) -> str:
    return json.dumps({key: value}, ensure_ascii=False)


def _after_marker(prompt: str, marker: str) -> str:
    index = prompt.find(marker)
    if index < 0:
        return ""
    rest = prompt[index + len(marker):]
    return rest.split("\n", 1)[0].strip()


def _embedded_list(prompt: str, marker: str) -> list:
    """Parse the JSON array rendered after ``marker`` in a prompt."""
    index = prompt.find(marker)
    if index < 0:
        return []
    start = prompt.find("[", index)
    if start < 0:
        return []
    end = find_balanced(prompt, start)
    if end is None:
        return []
    try:
        value = json.loads(prompt[start:end])
    except json.JSONDecodeError:
        return []
    return value if isinstance(value, list) else []
