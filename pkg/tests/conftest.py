"""Shared fixtures and small factories for the test suite."""

from __future__ import annotations

import pytest

from trailnote.actions import default_taxonomy
from trailnote.events import EntityKey, InteractionEvent


@pytest.fixture(scope="session")
def taxonomy():
    return default_taxonomy()


def make_event(
    action: str,
    timestamp: int,
    participant: str = "p01",
    session: str = "s01",
    target: EntityKey | None = None,
    duration_ms: int | None = None,
) -> InteractionEvent:
    return InteractionEvent(
        session_id=session,
        participant_id=participant,
        timestamp=timestamp,
        action=action,
        target=target,
        duration_ms=duration_ms,
    )
