"""Multi-reference BLEU, SARI, and FKGL with pinned conventions.

Published implementations of these metrics disagree in the corners
(zero-count n-grams, keep-recall denominators, brevity-penalty ties), so
every convention used here is fixed and documented on the operation that
owns it. Scores are floats in [0, 100]; SARI components are in [0, 1].

Tokenization modes:
  metric  lowercase, punctuation split into single-character tokens,
          diacritics preserved; used by BLEU and SARI
  raw     whitespace split; used for word counts (FKGL, filtering)
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .corpus import DEFAULT_RULES, segment_sentences
from .errors import InputError
from .ioutil import atomic_write_text, json_line, read_jsonl

FKGL_NOTE = "English-calibrated formula, heuristic syllables"

_VOWELS = {
    "et": frozenset("aeiouõäöü"),
    "en": frozenset("aeiouy"),
}

_METRIC_TOKEN = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize(text: str, mode: str = "metric") -> list[str]:
    """Split text into tokens. Deterministic; empty input gives []."""
    if mode == "raw":
        return text.split()
    if mode == "metric":
        return _METRIC_TOKEN.findall(text.lower())
    raise InputError(f"unknown tokenizer mode {mode!r} (expected 'metric' or 'raw')")


def ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class EvalInstance:
    """One scoring unit: a source sentence, a system output, and >= 1 references."""

    id: str
    input: str
    output: str
    references: tuple[str, ...]

    def validate(self) -> None:
        if not self.references:
            raise InputError(f"instance {self.id!r}: needs at least one reference")
        if not self.input or not self.output or any(not r for r in self.references):
            raise InputError(f"instance {self.id!r}: all texts must be non-empty")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "input": self.input,
            "output": self.output,
            "references": list(self.references),
        }

    @classmethod
    def from_dict(cls, obj: dict, where: str = "record") -> "EvalInstance":
        for key in ("id", "input", "output", "references"):
            if key not in obj:
                raise InputError(f"{where}: missing field {key!r}")
        refs = obj["references"]
        if not isinstance(refs, list):
            raise InputError(f"{where}: references must be an array")
        inst = cls(
            id=str(obj["id"]),
            input=str(obj["input"]),
            output=str(obj["output"]),
            references=tuple(str(r) for r in refs),
        )
        inst.validate()
        return inst


def load_instances(path: str | Path) -> list[EvalInstance]:
    instances = [EvalInstance.from_dict(obj, where=f"{path}:{lineno}") for lineno, obj in read_jsonl(path)]
    if not instances:
        raise InputError(f"no instances in {path}")
    return instances


def write_instances(instances: list[EvalInstance], path: str | Path) -> None:
    from .ioutil import atomic_write_jsonl

    atomic_write_jsonl(path, (i.to_dict() for i in instances))


def _effective_ref_len(cand_len: int, ref_lens: list[int]) -> int:
    # Closest reference length; ties go to the shorter reference.
    return min(ref_lens, key=lambda rl: (abs(rl - cand_len), rl))


def bleu_corpus(instances: list[EvalInstance], max_n: int = 4) -> float:
    """Corpus BLEU with pooled clipped counts.

    Per n, clipped matches (clip = max count over the instance's
    references) and candidate totals are summed over all instances.
    BLEU = BP * exp(mean log p_n) * 100 with BP = min(1, exp(1 - r/c));
    r pools per-instance effective reference lengths. Any p_n = 0 makes
    the corpus score 0; there is no smoothing at corpus level.
    """
    if not instances:
        raise InputError("BLEU is undefined for an empty instance list")
    matched = [0] * max_n
    totals = [0] * max_n
    r_sum = 0
    c_sum = 0
    for inst in instances:
        inst.validate()
        cand = tokenize(inst.output)
        refs = [tokenize(ref) for ref in inst.references]
        c_sum += len(cand)
        r_sum += _effective_ref_len(len(cand), [len(ref) for ref in refs])
        for n in range(1, max_n + 1):
            cand_counts = ngram_counts(cand, n)
            if not cand_counts:
                continue
            clip: Counter = Counter()
            for ref in refs:
                for gram, count in ngram_counts(ref, n).items():
                    if count > clip[gram]:
                        clip[gram] = count
            matched[n - 1] += sum(min(count, clip[gram]) for gram, count in cand_counts.items())
            totals[n - 1] += sum(cand_counts.values())
    if c_sum == 0:
        return 0.0
    # An order with no candidate n-grams anywhere in the corpus (all
    # candidates shorter than n) is vacuously perfect: there is nothing to
    # penalize, and identity corpora of short sentences must score 100.
    precisions = [m / t if t else 1.0 for m, t in zip(matched, totals)]
    if any(p == 0.0 for p in precisions):
        return 0.0
    brevity = min(1.0, math.exp(1.0 - r_sum / c_sum))
    return brevity * math.exp(sum((1.0 / max_n) * math.log(p) for p in precisions)) * 100.0


def bleu_sentence(output: str, references: list[str], max_n: int = 4) -> float:
    """Sentence-level BLEU diagnostic with add-one smoothing for n >= 2.

    Never used in headline reports; corpus scores come from bleu_corpus.
    """
    cand = tokenize(output)
    refs = [tokenize(ref) for ref in references]
    if not refs:
        raise InputError("sentence BLEU needs at least one reference")
    if not cand:
        return 0.0
    precisions = []
    for n in range(1, max_n + 1):
        cand_counts = ngram_counts(cand, n)
        clip: Counter = Counter()
        for ref in refs:
            for gram, count in ngram_counts(ref, n).items():
                if count > clip[gram]:
                    clip[gram] = count
        matched = sum(min(count, clip[gram]) for gram, count in cand_counts.items())
        total = sum(cand_counts.values())
        if n == 1:
            precisions.append(matched / total if total else 0.0)
        else:
            precisions.append((matched + 1.0) / (total + 1.0))
    if precisions[0] == 0.0:
        return 0.0
    r = _effective_ref_len(len(cand), [len(ref) for ref in refs])
    brevity = min(1.0, math.exp(1.0 - r / len(cand)))
    return brevity * math.exp(sum((1.0 / max_n) * math.log(p) for p in precisions)) * 100.0


def _harmonic(p: float, r: float) -> float:
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def _sari_components_for_n(src: list[str], out: list[str], refs: list[list[str]], n: int) -> tuple[float, float, float]:
    numref = len(refs)
    src_counts = ngram_counts(src, n)
    out_counts = ngram_counts(out, n)
    ref_counts = [ngram_counts(ref, n) for ref in refs]

    # Multiset counters: source and output scaled by the reference count,
    # references summed, per the pinned SARI variant.
    scaled_src = Counter({g: c * numref for g, c in src_counts.items()})
    scaled_out = Counter({g: c * numref for g, c in out_counts.items()})
    ref_sum: Counter = Counter()
    for counts in ref_counts:
        ref_sum.update(counts)
    ref_union = set(ref_sum)

    # ADD: set semantics over distinct n-grams.
    added = set(out_counts) - set(src_counts)
    add_good = added & ref_union
    add_all = ref_union - set(src_counts)
    add_p = len(add_good) / len(added) if added else 0.0
    add_r = len(add_good) / len(add_all) if add_all else 0.0
    f_add = _harmonic(add_p, add_r)

    # KEEP: multiset, precision over kept grams, recall over keepable grams.
    kept = scaled_src & scaled_out
    kept_good = kept & ref_sum
    keepable = scaled_src & ref_sum
    keep_p = sum(kept_good[g] / kept[g] for g in kept) / len(kept) if kept else 0.0
    keep_r = sum(kept_good[g] / keepable[g] for g in keepable) / len(keepable) if keepable else 0.0
    f_keep = _harmonic(keep_p, keep_r)

    # DELETE: multiset, precision only (over-deletion is unmeasurable
    # against references that also deleted).
    deleted = scaled_src - scaled_out
    deleted_good = deleted - ref_sum
    p_del = sum(deleted_good[g] / deleted[g] for g in deleted) / len(deleted) if deleted else 0.0

    return f_add, f_keep, p_del


def sari_instance(instance: EvalInstance) -> tuple[float, dict[str, float]]:
    """Per-instance SARI over n = 1..4 on metric tokens.

    Returns (score, components); components are the means over n of
    F_add, F_keep and the deletion precision, and the score is
    100 * (f_add + f_keep + p_del) / 3.
    """
    instance.validate()
    src = tokenize(instance.input)
    out = tokenize(instance.output)
    refs = [tokenize(ref) for ref in instance.references]
    f_add = f_keep = p_del = 0.0
    for n in range(1, 5):
        a, k, d = _sari_components_for_n(src, out, refs, n)
        f_add += a
        f_keep += k
        p_del += d
    components = {"f_add": f_add / 4.0, "f_keep": f_keep / 4.0, "p_del": p_del / 4.0}
    score = 100.0 * (components["f_add"] + components["f_keep"] + components["p_del"]) / 3.0
    return score, components


def sari_corpus(instances: list[EvalInstance]) -> tuple[float, dict[str, float]]:
    """Corpus SARI: mean of per-instance scores; components are corpus means."""
    if not instances:
        raise InputError("SARI is undefined for an empty instance list")
    scores = []
    sums = {"f_add": 0.0, "f_keep": 0.0, "p_del": 0.0}
    for inst in instances:
        score, components = sari_instance(inst)
        scores.append(score)
        for key, value in components.items():
            sums[key] += value
    n = len(instances)
    return sum(scores) / n, {key: value / n for key, value in sums.items()}


def count_syllables(word: str, language: str = "et") -> int:
    """Syllables as maximal vowel runs, minimum 1.

    A heuristic: Estonian diphthongs and long vowels count as one syllable
    nucleus under this rule, which is the pinned convention for FKGL here.
    """
    if language not in _VOWELS:
        raise InputError(f"unknown language {language!r} (expected 'et' or 'en')")
    if not any(ch.isalpha() for ch in word):
        raise InputError(f"cannot count syllables of {word!r}: no letters")
    vowels = _VOWELS[language]
    runs = 0
    in_run = False
    for ch in word.lower():
        is_vowel = ch in vowels
        if is_vowel and not in_run:
            runs += 1
        in_run = is_vowel
    return max(runs, 1)


def _text_stats(outputs: list[str], language: str) -> tuple[int, int, int]:
    words = sentences = syllables = 0
    for text in outputs:
        tokens = tokenize(text, "raw")
        words += len(tokens)
        sentences += len(segment_sentences(text, DEFAULT_RULES))
        for token in tokens:
            if any(ch.isalpha() for ch in token):
                syllables += count_syllables(token, language)
    return words, sentences, syllables


def fkgl(outputs: list[str], language: str = "et") -> float:
    """Flesch-Kincaid grade level over whole texts.

    0.39 * words/sentences + 11.8 * syllables/words - 15.59, with words as
    raw whitespace tokens, sentences from segment_sentences, and syllables
    from count_syllables. Letterless tokens count as words with zero
    syllables. Note: the formula is English-calibrated and the syllable
    rule is heuristic; reports carry that caveat.
    """
    if not outputs:
        raise InputError("FKGL is undefined for an empty output list")
    words, sentences, syllables = _text_stats(outputs, language)
    if words == 0:
        raise InputError("FKGL is undefined: zero words in the outputs")
    return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59


@dataclass
class MetricReport:
    bleu: float
    sari: float
    sari_components: dict[str, float]
    fkgl: float
    n_instances: int
    token_stats: dict[str, int]

    def validate(self) -> None:
        if not (0.0 <= self.bleu <= 100.0 and 0.0 <= self.sari <= 100.0):
            raise InputError("BLEU and SARI must lie in [0, 100]")
        for key in ("f_add", "f_keep", "p_del"):
            value = self.sari_components.get(key)
            if value is None or not (0.0 <= value <= 1.0):
                raise InputError(f"SARI component {key} must lie in [0, 1], got {value!r}")
        recombined = 100.0 * sum(self.sari_components.values()) / 3.0
        if abs(recombined - self.sari) > 1e-9:
            raise InputError(
                f"SARI {self.sari!r} does not match its components (recombined {recombined!r})"
            )

    def to_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "sari": self.sari,
            "sari_components": dict(sorted(self.sari_components.items())),
            "fkgl": self.fkgl,
            "n_instances": self.n_instances,
            "token_stats": dict(sorted(self.token_stats.items())),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MetricReport":
        return cls(
            bleu=float(obj["bleu"]),
            sari=float(obj["sari"]),
            sari_components={k: float(v) for k, v in obj["sari_components"].items()},
            fkgl=float(obj["fkgl"]),
            n_instances=int(obj["n_instances"]),
            token_stats={k: int(v) for k, v in obj["token_stats"].items()},
        )


def score_instances(instances: list[EvalInstance], language: str = "et") -> MetricReport:
    """Score a full instance list with corpus BLEU, SARI, and FKGL."""
    if not instances:
        raise InputError("cannot score an empty instance list")
    bleu = bleu_corpus(instances)
    sari, components = sari_corpus(instances)
    outputs = [inst.output for inst in instances]
    words, sentences, syllables = _text_stats(outputs, language)
    report = MetricReport(
        bleu=bleu,
        sari=sari,
        sari_components=components,
        fkgl=fkgl(outputs, language),
        n_instances=len(instances),
        token_stats={"words": words, "sentences": sentences, "syllables": syllables},
    )
    report.validate()
    return report


def write_report(report: MetricReport, path: str | Path, language: str = "et") -> None:
    """Write a machine report: all MetricReport fields plus provenance."""
    payload = report.to_dict()
    payload["toolkit_version"] = __version__
    payload["tokenizer"] = "metric"
    payload["language"] = language
    payload["fkgl_note"] = FKGL_NOTE
    atomic_write_text(path, json_line(payload) + "\n")


def format_report(report: MetricReport) -> str:
    """Two-decimal human-readable rendering of a report."""
    lines = [
        f"instances: {report.n_instances}",
        f"BLEU:  {report.bleu:.2f}",
        f"SARI:  {report.sari:.2f}  (add {report.sari_components['f_add']:.3f}, "
        f"keep {report.sari_components['f_keep']:.3f}, del {report.sari_components['p_del']:.3f})",
        f"FKGL:  {report.fkgl:.2f}  ({FKGL_NOTE})",
    ]
    return "\n".join(lines)
