"""Persona prompt templates and deterministic rendering.

A template renders to a single flat prompt text with the sections in a
fixed order: instruction, rules, persona, few-shot examples, then the
target sentence. Rendering is a pure function, so identical inputs give
byte-identical prompts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import InputError
from ..ioutil import atomic_write_text

STAGES = ("lexical", "syntactic", "combined")

_STAGE_TITLES = {
    "lexical": "Lexical Simplification",
    "syntactic": "Syntactic Simplification",
    "combined": "Simplification",
}


@dataclass(frozen=True)
class PromptTemplate:
    version: str
    stage: str
    instruction: str
    persona: str
    rules: tuple[str, ...] = ()
    few_shot: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if not self.version:
            raise InputError("template version must be non-empty")
        if self.stage not in STAGES:
            raise InputError(f"template stage {self.stage!r} not one of {', '.join(STAGES)}")
        for pair in self.few_shot:
            if len(pair) != 2 or not pair[0] or not pair[1]:
                raise InputError(
                    f"template {self.version}: few-shot pairs must be two non-empty strings"
                )

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "stage": self.stage,
            "instruction": self.instruction,
            "persona": self.persona,
            "rules": list(self.rules),
            "few_shot": [list(p) for p in self.few_shot],
        }

    @classmethod
    def from_dict(cls, obj: dict, where: str = "template") -> "PromptTemplate":
        for key in ("version", "stage", "instruction", "persona"):
            if key not in obj:
                raise InputError(f"{where}: missing field {key!r}")
        return cls(
            version=str(obj["version"]),
            stage=str(obj["stage"]),
            instruction=str(obj["instruction"]),
            persona=str(obj["persona"]),
            rules=tuple(str(r) for r in obj.get("rules", [])),
            few_shot=tuple((str(a), str(b)) for a, b in obj.get("few_shot", [])),
        )


@dataclass(frozen=True)
class RenderedPrompt:
    messages: tuple[dict, ...]
    text: str
    length: int


def render_prompt(template: PromptTemplate, sentence: str) -> RenderedPrompt:
    """Render a template against one target sentence.

    Section order is fixed: instruction, rules (omitted when empty),
    persona, examples, target. The prompt ends with an unterminated
    "Simplified:" line for the model to complete.
    """
    if not sentence:
        raise InputError("cannot render a prompt for an empty sentence")
    parts = [f"Instruction:\n{template.instruction}"]
    if template.rules:
        bullet_block = "\n".join(f"- {rule}" for rule in template.rules)
        parts.append(f"{_STAGE_TITLES[template.stage]}:\n{bullet_block}")
    parts.append(f"Persona:\n{template.persona}")
    if template.few_shot:
        examples = "\n".join(
            f"Original: {original}\nSimplified: {simplified}"
            for original, simplified in template.few_shot
        )
        parts.append(f"Examples:\n{examples}")
    parts.append(f"Original: {sentence}\nSimplified:")
    text = "\n\n".join(parts)
    return RenderedPrompt(
        messages=({"role": "user", "content": text},),
        text=text,
        length=len(text),
    )


# The lexical template carries the published excerpt of the persona
# prompt; the syntactic and combined ones are stand-ins (the full
# guidelines document is not public) and are marked non-canonical.
LEXICAL_TEMPLATE = PromptTemplate(
    version="lexical-1",
    stage="lexical",
    instruction=(
        "You are a lexical simplification assistant tasked with simplifying Estonian text. "
        "Your role is to receive Estonian sentences and transform them by simplifying "
        "complex words and phrases while maintaining the original meaning."
    ),
    persona=(
        "You are an expert in lexical simplification, focused on making Estonian text "
        "more accessible. Your approach balances reducing complexity with maintaining "
        "meaning, ensuring the text remains clear and true to the original."
    ),
    rules=(
        "Replace difficult words with simpler, more common alternatives.",
        "Carefully consider context to preserve the original meaning.",
        "Avoid simplifying proper nouns, technical terms without simpler equivalents, "
        "and words essential to the sentence's meaning.",
        "If adjectives do not add critical meaning, remove them.",
        "Use simple, common verbs.",
        "Prefer simpler tenses to enhance clarity.",
    ),
    few_shot=(
        (
            "Epidemioloogia uurib nakkushaigusi ja nende tõkestamist.",
            "Epidemioloogia uurib nakkushaigusi ja nende peatamist.",
        ),
    ),
)

SYNTACTIC_TEMPLATE = PromptTemplate(
    version="syntactic-1",
    stage="syntactic",
    instruction=(
        "You are a syntactic simplification assistant for Estonian text. You receive a "
        "sentence whose vocabulary has already been simplified and restructure it into "
        "shorter, clearer sentences. Non-canonical stand-in template."
    ),
    persona=(
        "You are an expert in Estonian sentence structure who splits long sentences, "
        "removes non-essential clauses, and keeps the core statement intact."
    ),
    rules=(
        "Split long sentences into shorter ones.",
        "Prefer main clauses over nested subordinate clauses.",
        "Keep the subject and main verb close together.",
        "Drop parenthetical asides that carry no essential information.",
    ),
    few_shot=(
        (
            "Epidemioloogia, mis on teadusharu, uurib nakkushaigusi ja nende peatamist.",
            "Epidemioloogia on teadusharu. See uurib nakkushaigusi ja nende peatamist.",
        ),
    ),
)

COMBINED_V1_TEMPLATE = PromptTemplate(
    version="v1",
    stage="combined",
    instruction=(
        "Simplify the following Estonian sentence. Use simpler words and shorter "
        "sentence structures while keeping the meaning. Non-canonical stand-in for the "
        "original single-pass template."
    ),
    persona="You are an assistant that rewrites Estonian sentences in simpler language.",
    rules=(),
    few_shot=(
        (
            "Epidemioloogia uurib nakkushaigusi ja nende tõkestamist.",
            "Epidemioloogia uurib nakkushaigusi ja nende peatamist.",
        ),
    ),
)

BUILTIN_TEMPLATES = {
    LEXICAL_TEMPLATE.version: LEXICAL_TEMPLATE,
    SYNTACTIC_TEMPLATE.version: SYNTACTIC_TEMPLATE,
    COMBINED_V1_TEMPLATE.version: COMBINED_V1_TEMPLATE,
}


def load_template(path: str | Path) -> PromptTemplate:
    path = Path(path)
    if not path.exists():
        raise InputError(f"template file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid template JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{path}: template must be a JSON object")
    return PromptTemplate.from_dict(obj, where=str(path))


def save_template(template: PromptTemplate, path: str | Path) -> None:
    atomic_write_text(path, json.dumps(template.to_dict(), ensure_ascii=False, indent=2) + "\n")


def resolve_template(name_or_path: str) -> PromptTemplate:
    """Accept either a builtin template version name or a file path."""
    if name_or_path in BUILTIN_TEMPLATES:
        return BUILTIN_TEMPLATES[name_or_path]
    return load_template(name_or_path)
