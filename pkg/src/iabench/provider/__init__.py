"""Chat/embedding providers: HTTP client, deterministic mock, JSON extraction."""

from iabench.provider.base import (
    ChatRequest,
    EmbeddingVector,
    Provider,
    ProviderConfig,
    chat_json,
    unit_normalize,
)
from iabench.provider.http import HttpProvider
from iabench.provider.jsonx import (
    INTEGER,
    LIST_OF_STRINGS,
    NUMBER,
    STRING,
    extract_json,
    find_balanced,
)
from iabench.provider.mock import MockProvider
from iabench.provider.ratelimit import RateLimiter

__all__ = [
    "ChatRequest",
    "EmbeddingVector",
    "HttpProvider",
    "INTEGER",
    "LIST_OF_STRINGS",
    "MockProvider",
    "NUMBER",
    "Provider",
    "ProviderConfig",
    "RateLimiter",
    "STRING",
    "chat_json",
    "extract_json",
    "find_balanced",
    "unit_normalize",
]
