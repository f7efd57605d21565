"""Provider abstractions: chat/embedding requests and the common interface."""

from __future__ import annotations

import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

from iabench.errors import JsonParseError, JsonSchemaError, ProviderError
from iabench.provider.jsonx import extract_json


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    prompt: str
    temperature: float = 0.0
    max_output_tokens: int = 1024

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ProviderError(f"temperature {self.temperature} outside [0, 2]")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    model_id: str


@dataclass
class ProviderConfig:
    """Connection settings. Only the *name* of the API key env var is stored,
    so credentials never end up in run artifacts."""

    endpoint_url: str = ""
    api_key_env_var: str = "IABENCH_API_KEY"
    requests_per_minute: int = 60
    max_retries: int = 3
    backoff_base_ms: int = 250


def unit_normalize(values: Sequence[float]) -> tuple[float, ...]:
    norm = math.sqrt(sum(x * x for x in values))
    if norm == 0.0:
        raise ProviderError("cannot normalize a zero embedding vector")
    return tuple(x / norm for x in values)


class Provider(ABC):
    """Uniform chat + embedding access.

    Implementations are safe for concurrent calls; the request log (when
    enabled) records every chat request for protocol assertions in tests.
    """

    def __init__(self, *, log_requests: bool = False) -> None:
        self.log_requests = log_requests
        self.request_log: list[ChatRequest] = []
        self._log_lock = threading.Lock()

    def _record(self, request: ChatRequest) -> None:
        if self.log_requests:
            with self._log_lock:
                self.request_log.append(request)

    @abstractmethod
    def chat(self, request: ChatRequest) -> str:
        """Send one chat request and return the raw response text."""

    @abstractmethod
    def embed(self, texts: Sequence[str], model_id: str) -> list[EmbeddingVector]:
        """Embed texts, order-preserving, one unit-normalized vector each."""


REPAIR_SUFFIX = (
    "\n\nThe previous reply was not valid JSON for the requested schema. "
    "Return only the JSON object, with no extra text."
)


def chat_json(provider: Provider, request: ChatRequest,
              expected_keys: dict[str, str], *, repair: bool = True) -> dict:
    """Chat, parse, validate; on failure re-prompt once with the raw reply.

    Raises the second parse/schema error when the repair attempt also fails.
    """
    raw = provider.chat(request)
    try:
        return extract_json(raw, expected_keys)
    except (JsonParseError, JsonSchemaError):
        if not repair:
            raise
    repair_request = ChatRequest(
        model_id=request.model_id,
        prompt=f"{request.prompt}\n\nYour reply was:\n{raw}{REPAIR_SUFFIX}",
        temperature=request.temperature,
        max_output_tokens=request.max_output_tokens,
    )
    return extract_json(provider.chat(repair_request), expected_keys)
