"""Interactive authoring service: event-sourced sessions over HTTP."""
from .state import SessionState, build_report, canonical_report_json, replay_events
from .store import SessionStore

__all__ = ["SessionState", "SessionStore", "build_report", "canonical_report_json", "replay_events"]
