"""Append-only event store for the manual annotation workflow.

Single-file JSONL event log (assignments, ratings, consensus) plus an
in-memory projection rebuilt on startup. Appends are validated against
the current projection and serialized under a lock; reads never lock.

Item lifecycle: pending -> rated -> (disputed ->) consensus. "rated"
(everyone submitted, scores identical) collapses immediately into an
auto-created consensus record, so observable statuses are pending,
disputed, and consensus. Once an item has consensus, its ratings are
frozen: identical resubmissions are accepted as no-ops, changes are
conflicts.
"""

from __future__ import annotations

import datetime
import json
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import (
    AuthorizationError,
    ConflictError,
    InputError,
    NotFoundError,
)
from .rubric import CRITERIA, validate_scores

STATUSES = ("pending", "rated", "disputed", "consensus")


@dataclass(frozen=True)
class AnnotationItem:
    item_id: str
    system_name: str
    source: str
    output: str

    def validate(self) -> None:
        for name in ("item_id", "system_name", "source", "output"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise InputError(f"annotation item field {name} must be a non-empty string")

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "system_name": self.system_name,
            "source": self.source,
            "output": self.output,
        }


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class EventStore:
    """Annotation state backed by one append-only JSONL event file."""

    def __init__(self, path: str | Path, create: bool = True):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._events: list[dict] = []
        self._items: dict[str, AnnotationItem] = {}
        self._annotators: list[str] = []
        # item_id -> annotator -> {"scores", "note", "offset"}
        self._ratings: dict[str, dict[str, dict]] = {}
        # item_id -> {"scores", "resolved_by", "auto"}
        self._consensus: dict[str, dict] = {}

        if not self.path.exists():
            if not create:
                raise InputError(f"event log not found: {self.path}")
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()
        self._replay()
        self._handle = open(self.path, "a", encoding="utf-8")

    # ------------------------------------------------------------ plumbing

    def close(self) -> None:
        self._handle.close()

    @property
    def offset(self) -> int:
        """Number of events in the log; grows by one per accepted write."""
        return len(self._events)

    def _replay(self) -> None:
        with open(self.path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                if not raw.strip():
                    continue
                try:
                    event = json.loads(raw)
                    self._apply(event)
                except (json.JSONDecodeError, InputError, KeyError, TypeError, ValueError) as exc:
                    raise InputError(
                        f"{self.path}:{lineno}: unreadable event: {exc!r}"
                    ) from exc

    def _append(self, event: dict) -> None:
        self._handle.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
        self._handle.flush()
        self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "assign":
            for name in event["annotators"]:
                if name not in self._annotators:
                    self._annotators.append(name)
            for obj in event["items"]:
                item = AnnotationItem(
                    item_id=str(obj["item_id"]),
                    system_name=str(obj["system_name"]),
                    source=str(obj["source"]),
                    output=str(obj["output"]),
                )
                self._items[item.item_id] = item
                self._ratings.setdefault(item.item_id, {})
        elif kind == "rating":
            item_id = event["item_id"]
            self._ratings.setdefault(item_id, {})[event["annotator"]] = {
                "scores": {c: int(event["scores"][c]) for c in CRITERIA},
                "note": event.get("note"),
                "offset": len(self._events) + 1,
            }
            self._auto_consensus(item_id)
        elif kind == "consensus":
            self._consensus[event["item_id"]] = {
                "scores": {c: int(event["scores"][c]) for c in CRITERIA},
                "resolved_by": sorted(event["resolved_by"]),
                "auto": False,
            }
        else:
            raise InputError(f"unknown event type {kind!r}")
        self._events.append(event)

    def _auto_consensus(self, item_id: str) -> None:
        # Everyone submitted and every score matches: the shared scores
        # become the consensus without an explicit resolution step.
        if item_id in self._consensus or not self._annotators:
            return
        ratings = self._ratings.get(item_id, {})
        if any(name not in ratings for name in self._annotators):
            return
        score_sets = [ratings[name]["scores"] for name in self._annotators]
        if all(scores == score_sets[0] for scores in score_sets[1:]):
            self._consensus[item_id] = {
                "scores": dict(score_sets[0]),
                "resolved_by": sorted(self._annotators),
                "auto": True,
            }

    # ------------------------------------------------------------- writes

    def assign_items(self, items: list[AnnotationItem], annotators: list[str]) -> int:
        """Assign every annotator to every item; returns the total task count."""
        if not annotators:
            raise InputError("assignment needs at least one annotator")
        if not items:
            raise InputError("assignment needs at least one item")
        cleaned: list[str] = []
        for name in annotators:
            if not isinstance(name, str) or not name.strip():
                raise InputError("annotator ids must be non-empty strings")
            if name in cleaned:
                raise InputError(f"duplicate annotator id {name!r} in assignment")
            cleaned.append(name)
        seen_ids = set()
        for item in items:
            item.validate()
            if item.item_id in seen_ids:
                raise InputError(f"duplicate item id {item.item_id!r} in assignment")
            seen_ids.add(item.item_id)

        with self._lock:
            for item in items:
                if item.item_id in self._items:
                    raise InputError(f"item {item.item_id!r} is already assigned")
            self._append({
                "type": "assign",
                "annotators": cleaned,
                "items": [item.to_dict() for item in items],
                "ts": _now(),
            })
            return len(self._annotators) * len(self._items)

    def record_rating(self, annotator: str, item_id: str, scores: dict,
                      note: str | None = None) -> dict:
        """Upsert one annotator's rating for one item (last write wins)."""
        if not isinstance(annotator, str) or not annotator.strip():
            raise InputError("annotator must be a non-empty string")
        if note is not None and not isinstance(note, str):
            raise InputError("note must be a string when given")
        clean = validate_scores(scores)

        with self._lock:
            if item_id not in self._items:
                raise NotFoundError(f"unknown item {item_id!r}")
            if annotator not in self._annotators:
                raise AuthorizationError(
                    f"annotator {annotator!r} is not assigned to item {item_id!r}"
                )
            existing = self._ratings.get(item_id, {}).get(annotator)
            unchanged = (
                existing is not None
                and existing["scores"] == clean
                and existing["note"] == note
            )
            if item_id in self._consensus and not unchanged:
                raise ConflictError(
                    f"item {item_id!r} already has a consensus; ratings are frozen"
                )
            if not unchanged:
                self._append({
                    "type": "rating",
                    "annotator": annotator,
                    "item_id": item_id,
                    "scores": clean,
                    "note": note,
                    "ts": _now(),
                })
            return {
                "item_id": item_id,
                "annotator": annotator,
                "scores": clean,
                "status": self.item_status(item_id),
            }

    def record_consensus(self, item_id: str, scores: dict, resolved_by: list[str],
                         as_of: int | None = None) -> dict:
        """Store the agreed scores for a disputed item.

        `as_of` is the log offset the caller's disagreement view was
        built from; if any rating for the item landed after it, the
        write is rejected so the caller re-reads before resolving.
        """
        clean = validate_scores(scores)
        if not isinstance(resolved_by, (list, tuple)) or not resolved_by:
            raise InputError("resolved_by must list at least one annotator id")
        if as_of is not None and (isinstance(as_of, bool) or not isinstance(as_of, int)):
            raise InputError("as_of must be an integer log offset")

        with self._lock:
            if item_id not in self._items:
                raise NotFoundError(f"unknown item {item_id!r}")
            unknown = sorted(set(resolved_by) - set(self._annotators))
            if unknown:
                raise InputError(
                    "resolved_by names unassigned annotators: " + ", ".join(unknown)
                )
            ratings = self._ratings.get(item_id, {})
            missing = [name for name in self._annotators if name not in ratings]
            if missing:
                raise InputError(
                    f"item {item_id!r} is not fully rated yet; waiting on: "
                    + ", ".join(missing)
                )
            if as_of is not None:
                latest = max(entry["offset"] for entry in ratings.values())
                if latest > as_of:
                    raise ConflictError(
                        f"ratings for item {item_id!r} changed after offset {as_of} "
                        f"(latest rating at offset {latest}); reload and retry"
                    )
            existing = self._consensus.get(item_id)
            if existing is not None:
                if existing["scores"] == clean:
                    return {"item_id": item_id, "status": "consensus",
                            "record": dict(existing)}
                raise ConflictError(
                    f"item {item_id!r} already has a consensus with different scores"
                )
            self._append({
                "type": "consensus",
                "item_id": item_id,
                "scores": clean,
                "resolved_by": sorted(set(resolved_by)),
                "ts": _now(),
            })
            return {"item_id": item_id, "status": "consensus",
                    "record": dict(self._consensus[item_id])}

    # -------------------------------------------------------------- reads

    def item_status(self, item_id: str) -> str:
        if item_id not in self._items:
            raise NotFoundError(f"unknown item {item_id!r}")
        if item_id in self._consensus:
            return "consensus"
        ratings = self._ratings.get(item_id, {})
        if self._annotators and all(name in ratings for name in self._annotators):
            score_sets = [ratings[name]["scores"] for name in self._annotators]
            if any(scores != score_sets[0] for scores in score_sets[1:]):
                return "disputed"
            return "rated"  # momentary: auto-consensus normally covers this
        return "pending"

    def annotators(self) -> list[str]:
        return list(self._annotators)

    def items(self, annotator: str | None = None, status: str | None = None) -> list[dict]:
        """List items in assignment order, optionally filtered.

        With both an annotator and status=pending, the filter means that
        annotator's personal queue: items they have not rated yet.
        """
        if status is not None and status not in STATUSES:
            raise InputError(f"status must be one of {STATUSES}, got {status!r}")
        rows = []
        for item in list(self._items.values()):
            item_status = self.item_status(item.item_id)
            ratings = self._ratings.get(item.item_id, {})
            if annotator is not None and status == "pending":
                if annotator in ratings:
                    continue
            elif status is not None and item_status != status:
                continue
            row = item.to_dict()
            row["status"] = item_status
            row["rated_by"] = sorted(ratings)
            if annotator is not None:
                mine = ratings.get(annotator)
                row["your_rating"] = dict(mine["scores"]) if mine else None
            rows.append(row)
        return rows

    def agreement(self) -> dict:
        """Exact agreement per criterion over fully rated items.

        Rates measure the raw ratings (resolving a dispute later does not
        change them); the disagreement list only shows items still
        awaiting resolution. `as_of` is the log offset the view was
        built from, for conflict detection on consensus writes.
        """
        annotators = list(self._annotators)
        items = list(self._items.values())
        fully_rated = [
            item for item in items
            if annotators and all(name in self._ratings.get(item.item_id, {})
                                  for name in annotators)
        ]
        pending = len(items) - len(fully_rated)

        result: dict = {
            "annotators": sorted(annotators),
            "n_items": len(items),
            "n_fully_rated": len(fully_rated),
            "pending": pending,
            "as_of": self.offset,
        }
        if len(annotators) == 1:
            result["warning"] = (
                "single annotator: exact agreement is 1.0 by definition"
            )
        if not fully_rated:
            result["rates"] = {code: None for code in CRITERIA}
            result["kappa"] = None
            result["disagreements"] = []
            if "warning" not in result:
                result["warning"] = "no fully rated items yet"
            return result

        rates = {}
        for code in CRITERIA:
            agreed = sum(
                1 for item in fully_rated
                if len({self._ratings[item.item_id][name]["scores"][code]
                        for name in annotators}) == 1
            )
            rates[code] = agreed / len(fully_rated)
        result["rates"] = rates

        disagreements = []
        for item in fully_rated:
            if item.item_id in self._consensus:
                continue
            ratings = self._ratings[item.item_id]
            differing = [
                code for code in CRITERIA
                if len({ratings[name]["scores"][code] for name in annotators}) > 1
            ]
            if differing:
                disagreements.append({
                    "item_id": item.item_id,
                    "criteria": differing,
                    "ratings": {
                        name: dict(ratings[name]["scores"]) for name in annotators
                    },
                })
        result["disagreements"] = disagreements
        result["kappa"] = (
            self._kappa(fully_rated, annotators) if len(annotators) == 2 else None
        )
        return result

    def _kappa(self, fully_rated: list[AnnotationItem], annotators: list[str]) -> dict:
        """Cohen's kappa per criterion for exactly two annotators."""
        first, second = annotators
        n = len(fully_rated)
        kappa = {}
        for code in CRITERIA:
            pairs = [
                (self._ratings[item.item_id][first]["scores"][code],
                 self._ratings[item.item_id][second]["scores"][code])
                for item in fully_rated
            ]
            observed = sum(1 for a, b in pairs if a == b) / n
            chance = 0.0
            for level in range(5):
                p_first = sum(1 for a, _ in pairs if a == level) / n
                p_second = sum(1 for _, b in pairs if b == level) / n
                chance += p_first * p_second
            if abs(1.0 - chance) < 1e-12:
                kappa[code] = 1.0 if observed == 1.0 else 0.0
            else:
                kappa[code] = (observed - chance) / (1.0 - chance)
        return kappa

    def consensus_records(self) -> dict[str, dict]:
        return {item_id: dict(record) for item_id, record in self._consensus.items()}

    def consensus_summary(self) -> list[dict]:
        """Mean consensus scores per system: four criterion means + overall.

        Criterion means are rounded to 2 decimals; the overall is the
        mean of the four unrounded criterion means, rounded last.
        """
        by_system: dict[str, list[dict]] = {}
        for item in list(self._items.values()):
            record = self._consensus.get(item.item_id)
            if record is not None:
                by_system.setdefault(item.system_name, []).append(record["scores"])
        rows = []
        for system_name in sorted(by_system):
            score_sets = by_system[system_name]
            means = {
                code: sum(scores[code] for scores in score_sets) / len(score_sets)
                for code in CRITERIA
            }
            overall = sum(means.values()) / len(CRITERIA)
            rows.append({
                "system_name": system_name,
                "n_items": len(score_sets),
                "means": {code: round(means[code], 2) for code in CRITERIA},
                "overall": round(overall, 2),
            })
        return rows

    def export_events(self) -> dict:
        return {"events": [dict(event) for event in self._events], "offset": self.offset}
