"""Corpus construction: sentence segmentation, candidate filtering, dataset
assembly and splitting.

The module deals in three record shapes, all serialized as one JSON object
per line (UTF-8):

  sentence records   id, text, word_count, article_id, char_offset
  aligned pairs      id, source, simple, origin, template_version, corrected
  manifest           counts_by_origin, total, split_sizes, seed

Pair files are the canonical interchange format for the rest of the
toolkit; readers tolerate extra fields (silver files carry a few more),
writers emit exactly the canonical ones.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import InputError
from .ioutil import atomic_write_jsonl, atomic_write_text, json_line, read_jsonl

ORIGINS = ("turk", "wiki2", "llm_v1", "llm_agents", "manual")

# Common Estonian abbreviations that end in a period mid-sentence. The list
# is deliberately small; callers with real corpora pass their own.
ESTONIAN_ABBREVIATIONS = (
    "nt.", "jne.", "vt.", "lk.", "st.", "jt.", "jm.", "jms.", "u.",
    "ca.", "dr.", "prof.", "hr.", "pr.", "mnt.", "pst.", "tn.", "vrd.",
    "nn.", "s.o.", "s.t.",
)

_TERMINALS = ".!?"
_OPENING_QUOTES = frozenset('"\'«„“‘‚')


def _normalize_abbrev(entry: str) -> str:
    entry = entry.strip().lower()
    if entry and not entry.endswith("."):
        entry += "."
    return entry


@dataclass(frozen=True)
class SegmentationRules:
    """Configuration for segment_sentences: currently just the abbreviation
    list that suppresses sentence breaks after a period."""

    abbreviations: frozenset[str] = frozenset()

    def __post_init__(self):
        normalized = frozenset(_normalize_abbrev(a) for a in self.abbreviations if a.strip())
        object.__setattr__(self, "abbreviations", normalized)

    @classmethod
    def from_file(cls, path: str | Path) -> "SegmentationRules":
        path = Path(path)
        if not path.exists():
            raise InputError(f"abbreviation file not found: {path}")
        entries = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
        return cls(abbreviations=frozenset(e for e in entries if e and not e.startswith("#")))


DEFAULT_RULES = SegmentationRules(abbreviations=frozenset(ESTONIAN_ABBREVIATIONS))


@dataclass(frozen=True)
class SentenceRecord:
    id: str
    text: str
    word_count: int
    article_id: str | None = None
    char_offset: int | None = None

    def validate(self) -> None:
        if self.word_count != len(self.text.split()):
            raise InputError(
                f"sentence {self.id!r}: word_count {self.word_count} does not match "
                f"its text ({len(self.text.split())} tokens)"
            )
        if "\n" in self.text or "\r" in self.text:
            raise InputError(f"sentence {self.id!r}: text contains a line break")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "word_count": self.word_count,
            "article_id": self.article_id,
            "char_offset": self.char_offset,
        }

    @classmethod
    def from_dict(cls, obj: dict, where: str = "record") -> "SentenceRecord":
        try:
            rec = cls(
                id=str(obj["id"]),
                text=str(obj["text"]),
                word_count=int(obj.get("word_count", len(str(obj["text"]).split()))),
                article_id=obj.get("article_id"),
                char_offset=obj.get("char_offset"),
            )
        except KeyError as exc:
            raise InputError(f"{where}: missing field {exc.args[0]!r}") from exc
        rec.validate()
        return rec


def _token_before(document: str, dot_pos: int) -> str:
    start = dot_pos
    while start > 0 and not document[start - 1].isspace():
        start -= 1
    return document[start : dot_pos + 1]


def _is_abbreviation(document: str, dot_pos: int, rules: SegmentationRules) -> bool:
    token = _token_before(document, dot_pos)
    # Strip leading punctuation such as an opening parenthesis or quote.
    while token and not (token[0].isalnum() or token[0] == "."):
        token = token[1:]
    return token.lower() in rules.abbreviations


def segment_sentences(document: str, rules: SegmentationRules = DEFAULT_RULES) -> list[SentenceRecord]:
    """Split a document into sentence records.

    A sentence break is a terminal character (. ! ?) followed by whitespace
    and then an uppercase letter or an opening quote; a period whose
    preceding token is in the abbreviation list never breaks. Sentence
    texts are whitespace-normalized, which preserves both the order of all
    non-whitespace characters and the whitespace token count.
    """
    return segment_article(document, rules=rules, article_id=None)


def segment_article(
    document: str,
    rules: SegmentationRules = DEFAULT_RULES,
    article_id: str | None = None,
) -> list[SentenceRecord]:
    n = len(document)
    starts = [0]
    ends = []
    for match in re.finditer(r"[.!?]", document):
        end = match.end()
        follow = end
        while follow < n and document[follow].isspace():
            follow += 1
        if follow == end or follow >= n:
            continue  # no whitespace after the terminal, or end of document
        ch = document[follow]
        if not (ch in _OPENING_QUOTES or (ch.isalpha() and ch.isupper())):
            continue
        if match.group() == "." and _is_abbreviation(document, match.start(), rules):
            continue
        ends.append(end)
        starts.append(follow)
    ends.append(n)

    records = []
    prefix = article_id if article_id is not None else "s"
    for start, end in zip(starts, ends):
        raw = document[start:end]
        text = " ".join(raw.split())
        if not text:
            continue
        offset = start + (len(raw) - len(raw.lstrip()))
        index = len(records) + 1
        records.append(
            SentenceRecord(
                id=f"{prefix}-{index:04d}",
                text=text,
                word_count=len(text.split()),
                article_id=article_id,
                char_offset=offset,
            )
        )
    return records


def filter_candidates(records: list[SentenceRecord], min_words: int = 16) -> list[SentenceRecord]:
    """Keep records with word_count >= min_words, preserving order.

    The default keeps sentences of strictly more than 15 words. min_words=0
    is allowed and keeps everything.
    """
    if min_words < 0:
        raise InputError(f"min_words must be >= 0, got {min_words}")
    return [r for r in records if r.word_count >= min_words]


def write_sentences(records: list[SentenceRecord], path: str | Path) -> None:
    atomic_write_jsonl(path, (r.to_dict() for r in records))


def read_sentences(path: str | Path) -> list[SentenceRecord]:
    return [SentenceRecord.from_dict(obj, where=f"{path}:{lineno}") for lineno, obj in read_jsonl(path)]


@dataclass(frozen=True)
class AlignedPair:
    id: str
    source: str
    simple: str
    origin: str
    template_version: str | None = None
    corrected: bool = False

    def validate(self) -> None:
        if not self.source or not self.simple:
            raise InputError(f"pair {self.id!r}: source and simple must be non-empty")
        if self.origin not in ORIGINS:
            raise InputError(
                f"pair {self.id!r}: origin {self.origin!r} not one of {', '.join(ORIGINS)}"
            )
        is_llm = self.origin in ("llm_v1", "llm_agents")
        if is_llm and not self.template_version:
            raise InputError(f"pair {self.id!r}: origin {self.origin} requires a template_version")
        if not is_llm and self.template_version is not None:
            raise InputError(
                f"pair {self.id!r}: template_version is only valid for llm origins, "
                f"not {self.origin}"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "simple": self.simple,
            "origin": self.origin,
            "template_version": self.template_version,
            "corrected": self.corrected,
        }


def _resolve_origin(obj: dict, origin_tag: str | None, where: str) -> str:
    stated = obj.get("origin")
    if origin_tag is None or origin_tag in ORIGINS:
        if stated is None and origin_tag is None:
            raise InputError(f"{where}: record has no origin and no origin tag was given")
        if stated is not None and origin_tag is not None and stated != origin_tag:
            raise InputError(
                f"{where}: record origin {stated!r} contradicts source tag {origin_tag!r}"
            )
        return stated if stated is not None else origin_tag
    if origin_tag == "llm":
        if stated is not None:
            if stated not in ("llm_v1", "llm_agents"):
                raise InputError(
                    f"{where}: origin {stated!r} does not belong under an 'llm' source tag"
                )
            return stated
        version = obj.get("template_version")
        if version == "v1":
            return "llm_v1"
        if version == "agents":
            return "llm_agents"
        raise InputError(
            f"{where}: cannot infer llm origin from template_version {version!r} "
            "(expected 'v1' or 'agents')"
        )
    raise InputError(f"unknown origin tag {origin_tag!r} (use one of {', '.join(ORIGINS)} or 'llm')")


def pair_from_dict(obj: dict, origin_tag: str | None = None, where: str = "record") -> AlignedPair:
    for key in ("id", "source", "simple"):
        if key not in obj:
            raise InputError(f"{where}: missing field {key!r}")
    origin = _resolve_origin(obj, origin_tag, where)
    pair = AlignedPair(
        id=str(obj["id"]),
        source=str(obj["source"]),
        simple=str(obj["simple"]),
        origin=origin,
        template_version=obj.get("template_version"),
        corrected=bool(obj.get("corrected", False)),
    )
    pair.validate()
    return pair


def read_pairs(path: str | Path, origin_tag: str | None = None) -> list[AlignedPair]:
    return [pair_from_dict(obj, origin_tag, where=f"{path}:{lineno}") for lineno, obj in read_jsonl(path)]


def write_pairs(pairs: list[AlignedPair], path: str | Path) -> None:
    atomic_write_jsonl(path, (p.to_dict() for p in pairs))


@dataclass
class DatasetManifest:
    counts_by_origin: dict[str, int]
    total: int
    split_sizes: dict[str, int] | None = None
    seed: int | None = None

    def validate(self) -> None:
        if self.total != sum(self.counts_by_origin.values()):
            raise InputError(
                f"manifest total {self.total} does not equal the sum of per-origin "
                f"counts {sum(self.counts_by_origin.values())}"
            )
        if self.split_sizes is not None and sum(self.split_sizes.values()) != self.total:
            raise InputError(
                f"split sizes sum to {sum(self.split_sizes.values())}, expected {self.total}"
            )

    def to_dict(self) -> dict:
        return {
            "counts_by_origin": dict(sorted(self.counts_by_origin.items())),
            "total": self.total,
            "split_sizes": self.split_sizes,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "DatasetManifest":
        manifest = cls(
            counts_by_origin={str(k): int(v) for k, v in obj["counts_by_origin"].items()},
            total=int(obj["total"]),
            split_sizes=obj.get("split_sizes"),
            seed=obj.get("seed"),
        )
        manifest.validate()
        return manifest


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    atomic_write_text(path, json_line(manifest.to_dict()) + "\n")


@dataclass(frozen=True)
class PairSource:
    """A pair file plus the origin tag to apply to its records.

    origin_tag may be one of the five origins, 'llm' (records carry their
    own llm_v1/llm_agents split, usually via template_version), or None
    (records must each state an origin).
    """

    path: Path
    origin_tag: str | None = None


def build_dataset(
    sources: list[PairSource],
    out_path: str | Path,
    manifest_path: str | Path | None = None,
) -> DatasetManifest:
    """Merge pair source files into one canonical pair file plus a manifest.

    Ids must be unique across all sources; the first duplicate is reported.
    """
    pairs: list[AlignedPair] = []
    seen: dict[str, str] = {}
    counts: Counter[str] = Counter()
    for source in sources:
        tag = source.origin_tag
        if tag is not None and tag != "llm" and tag not in ORIGINS:
            raise InputError(
                f"unknown origin tag {tag!r} (use one of {', '.join(ORIGINS)} or 'llm')"
            )
        for lineno, obj in read_jsonl(source.path):
            pair = pair_from_dict(obj, tag, where=f"{source.path}:{lineno}")
            if pair.id in seen:
                raise InputError(
                    f"duplicate pair id {pair.id!r} at {source.path}:{lineno} "
                    f"(first seen in {seen[pair.id]})"
                )
            seen[pair.id] = str(source.path)
            pairs.append(pair)
            counts[pair.origin] += 1

    write_pairs(pairs, out_path)
    manifest = DatasetManifest(counts_by_origin=dict(counts), total=len(pairs))
    manifest.validate()
    if manifest_path is not None:
        write_manifest(manifest, manifest_path)
    return manifest


def _split_sizes(n: int, ratios: dict[str, float]) -> tuple[int, int, int]:
    r_train, r_dev = ratios["train"], ratios["dev"]
    cut1 = round(n * r_train)
    cut2 = round(n * (r_train + r_dev))
    cut1 = min(max(cut1, 0), n)
    cut2 = min(max(cut2, cut1), n)
    return cut1, cut2 - cut1, n - cut2


def split_dataset(
    pairs: list[AlignedPair],
    seed: int,
    ratios: dict[str, float],
    gold_ids: list[str] | None = None,
    out_dir: str | Path | None = None,
) -> DatasetManifest:
    """Partition pairs into train/dev/test plus a gold holdout.

    Deterministic for a given seed; split sizes depend only on the pair
    count and ratios, so changing the seed reshuffles membership without
    changing sizes. When out_dir is given, writes train.jsonl, dev.jsonl,
    test.jsonl, gold.jsonl and manifest.json there.
    """
    expected = {"train", "dev", "test"}
    if set(ratios) != expected:
        raise InputError(f"ratios must have exactly the keys train, dev, test; got {sorted(ratios)}")
    if abs(sum(ratios.values()) - 1.0) > 1e-9:
        raise InputError(f"ratios must sum to 1, got {sum(ratios.values())!r}")

    by_id = {p.id: p for p in pairs}
    gold_ids = list(gold_ids or [])
    for gid in gold_ids:
        if gid not in by_id:
            raise InputError(f"gold id {gid!r} is not in the dataset")
    gold_set = set(gold_ids)

    non_gold = [p for p in pairs if p.id not in gold_set]
    shuffled = list(non_gold)
    random.Random(seed).shuffle(shuffled)
    n_train, n_dev, _ = _split_sizes(len(shuffled), ratios)
    member: dict[str, str] = {}
    for i, pair in enumerate(shuffled):
        if i < n_train:
            member[pair.id] = "train"
        elif i < n_train + n_dev:
            member[pair.id] = "dev"
        else:
            member[pair.id] = "test"

    splits = {name: [] for name in ("train", "dev", "test", "gold")}
    for pair in pairs:  # input order within each split keeps files diff-friendly
        splits[member.get(pair.id, "gold")].append(pair)

    counts = Counter(p.origin for p in pairs)
    manifest = DatasetManifest(
        counts_by_origin=dict(counts),
        total=len(pairs),
        split_sizes={name: len(splits[name]) for name in ("train", "dev", "test", "gold")},
        seed=seed,
    )
    manifest.validate()

    if out_dir is not None:
        out_dir = Path(out_dir)
        for name, members in splits.items():
            write_pairs(members, out_dir / f"{name}.jsonl")
        write_manifest(manifest, out_dir / "manifest.json")
    return manifest
