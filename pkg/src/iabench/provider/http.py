"""JSON-over-HTTP provider speaking the common chat-completions wire shape.

POST {endpoint}/chat/completions with {"model", "messages", "temperature",
"max_tokens"}; POST {endpoint}/embeddings with {"model", "input"}. Vendors
with other shapes get their own adapter subclass; model ids are plain
config strings.
"""

from __future__ import annotations

import logging
import os
import time
from typing import Any, Callable, Sequence

import requests

from iabench.errors import CredentialError, TransportError
from iabench.provider.base import (
    ChatRequest,
    EmbeddingVector,
    Provider,
    ProviderConfig,
    unit_normalize,
)
from iabench.provider.ratelimit import RateLimiter

logger = logging.getLogger(__name__)

REQUEST_TIMEOUT_SECONDS = 120.0
_RETRYABLE_STATUS = frozenset({429}) | frozenset(range(500, 600))


class HttpProvider(Provider):
    def __init__(self, config: ProviderConfig, *, session: Any | None = None,
                 limiter: RateLimiter | None = None,
                 sleep: Callable[[float], None] = time.sleep,
                 log_requests: bool = False) -> None:
        super().__init__(log_requests=log_requests)
        if not config.endpoint_url:
            raise TransportError("http provider requires an endpoint_url")
        self.config = config
        self._session = session if session is not None else requests.Session()
        self._limiter = limiter if limiter is not None else RateLimiter(
            config.requests_per_minute)
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env_var, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return headers

    def _post(self, path: str, body: dict) -> dict:
        url = self.config.endpoint_url.rstrip("/") + path
        last_error = "no attempt made"
        for attempt in range(self.config.max_retries + 1):
            self._limiter.acquire()
            try:
                response = self._session.post(url, json=body, headers=self._headers(),
                                              timeout=REQUEST_TIMEOUT_SECONDS)
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_error = f"transport failure: {exc}"
            else:
                status = response.status_code
                if status in (401, 403):
                    raise CredentialError(f"authentication rejected (HTTP {status})")
                if status == 200:
                    return response.json()
                if status not in _RETRYABLE_STATUS:
                    raise TransportError(f"HTTP {status}: {response.text[:200]}")
                last_error = f"HTTP {status}"
            if attempt < self.config.max_retries:
                delay = self.config.backoff_base_ms / 1000.0 * (2 ** attempt)
                logger.debug("retrying %s after %s (%.2fs backoff)", path, last_error, delay)
                self._sleep(delay)
        raise TransportError(
            f"{url} failed after {self.config.max_retries + 1} attempts: {last_error}")

    def chat(self, request: ChatRequest) -> str:
        self._record(request)
        body = {
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        data = self._post("/chat/completions", body)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed chat response: {exc}") from exc

    def embed(self, texts: Sequence[str], model_id: str) -> list[EmbeddingVector]:
        if not texts:
            return []
        data = self._post("/embeddings", {"model": model_id, "input": list(texts)})
        try:
            rows = [item["embedding"] for item in data["data"]]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed embeddings response: {exc}") from exc
        if len(rows) != len(texts):
            raise TransportError(
                f"embeddings response has {len(rows)} vectors for {len(texts)} inputs")
        return [EmbeddingVector(values=unit_normalize(row), model_id=model_id)
                for row in rows]
