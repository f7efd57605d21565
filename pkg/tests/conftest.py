from __future__ import annotations

import pytest

from iabench.provider.mock import MockProvider


@pytest.fixture
def mock_provider() -> MockProvider:
    return MockProvider(seed=42)
