"""The four-criterion 0..4 rating rubric used for manual review.

Each criterion carries the full level descriptors so interfaces can show
annotators exactly what each score means; the texts are the canonical
guidelines the annotation workflow was calibrated on.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputError

CRITERIA = ("G", "R", "M", "S")
SCORE_LEVELS = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class RubricCriterion:
    code: str
    name: str
    description: str
    level_descriptors: tuple[str, str, str, str, str]

    def __post_init__(self) -> None:
        if self.code not in CRITERIA:
            raise InputError(f"rubric code must be one of {CRITERIA}, got {self.code!r}")
        if len(self.level_descriptors) != len(SCORE_LEVELS):
            raise InputError(f"criterion {self.code}: needs exactly five level descriptors")

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "name": self.name,
            "description": self.description,
            "level_descriptors": {
                str(level): text
                for level, text in zip(SCORE_LEVELS, self.level_descriptors)
            },
        }


RUBRIC: tuple[RubricCriterion, ...] = (
    RubricCriterion(
        code="G",
        name="Grammaticality",
        description=(
            "This criterion evaluates the grammatical correctness of the text, "
            "ensuring it is free from grammatical errors."
        ),
        level_descriptors=(
            "The text contains numerous grammatical mistakes, making it unreadable.",
            "There are significant grammatical errors, making the sentence difficult to understand.",
            "A few errors are present but do not heavily hinder understanding.",
            "Minor grammatical mistakes that do not affect understanding.",
            "The grammar is perfect, with no mistakes.",
        ),
    ),
    RubricCriterion(
        code="R",
        name="Readability",
        description=(
            "This criterion assesses how easy the text is to read and understand, "
            "as well as its naturalness and flow. Consideration is given to sentence "
            "length, word complexity, and overall coherence."
        ),
        level_descriptors=(
            "The text is completely incoherent and unreadable.",
            "It is very difficult to read and understand.",
            "The text is readable but requires significant effort.",
            "The text is mostly coherent, with minor effort required to understand.",
            "The text is very easy to read and understand, flowing naturally.",
        ),
    ),
    RubricCriterion(
        code="M",
        name="Preservation of Meaning",
        description=(
            "This criterion evaluates how well the simplified text retains the "
            "original meaning and important information."
        ),
        level_descriptors=(
            "The meaning is completely lost, with significant changes in the text.",
            "The meaning is poorly preserved, with significant loss of information.",
            "The meaning is somewhat preserved, but important details are missing.",
            "The meaning is mostly preserved, with only minor information loss.",
            "The meaning is fully preserved, with no loss of key information.",
        ),
    ),
    RubricCriterion(
        code="S",
        name="Simplification",
        description=(
            "This criterion evaluates how effectively the text has been simplified. "
            "It considers whether the text is shorter, uses simpler verbs, and "
            "removes unnecessary information."
        ),
        level_descriptors=(
            "The text is not simplified or is more difficult to understand.",
            "Simplification is poor, with only slight improvement in ease of understanding.",
            "The text is somewhat easier to understand.",
            "Good simplification, making the text easier to understand.",
            "Excellent simplification, with the text significantly easier to understand "
            "while retaining meaning.",
        ),
    ),
)


def rubric_as_dicts() -> list[dict]:
    return [criterion.to_dict() for criterion in RUBRIC]


def validate_scores(scores: object) -> dict[str, int]:
    """Check a {G,R,M,S} -> 0..4 score map, naming the offending criterion."""
    if not isinstance(scores, dict):
        raise InputError("scores must be an object mapping criteria to integers")
    extra = sorted(set(scores) - set(CRITERIA))
    if extra:
        raise InputError(f"unknown criteria in scores: {', '.join(extra)}")
    clean: dict[str, int] = {}
    for code in CRITERIA:
        if code not in scores:
            raise InputError(f"missing score for criterion {code}")
        value = scores[code]
        if isinstance(value, bool) or not isinstance(value, int) or value not in SCORE_LEVELS:
            raise InputError(
                f"score for criterion {code} must be an integer in 0..4, got {value!r}"
            )
        clean[code] = value
    return clean
