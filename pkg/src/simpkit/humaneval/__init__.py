"""Manual annotation workflow: rubric, event-sourced store, HTTP service."""

from .rubric import CRITERIA, RUBRIC, SCORE_LEVELS, RubricCriterion, rubric_as_dicts, validate_scores
from .service import create_app
from .store import STATUSES, AnnotationItem, EventStore

__all__ = [
    "AnnotationItem",
    "CRITERIA",
    "EventStore",
    "RUBRIC",
    "RubricCriterion",
    "SCORE_LEVELS",
    "STATUSES",
    "create_app",
    "rubric_as_dicts",
    "validate_scores",
]
