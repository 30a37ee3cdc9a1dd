from .core import (
    SessionState,
    StaleStateVersion,
    ask,
    canonical_json,
    create_session,
    export_transcript,
    feed_updates,
    inject,
    pop_injection,
    replay_transcript,
)
from .store import SessionStore
