"""Evaluation runs, checkpoint sweeps, and system comparisons.

A run scores one backend over a test set and captures everything needed
to compare runs later: the metric report, per-instance diagnostics, a
fingerprint of the backend config, and a content hash of the test set
(so comparisons can refuse to mix test sets). Runs are reproducible for
deterministic backends: two runs differ only in their created_at stamp.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .. import __version__
from ..errors import InputError
from ..ioutil import atomic_write_text, read_jsonl
from ..metrics import (
    EvalInstance,
    MetricReport,
    bleu_sentence,
    fkgl,
    sari_instance,
    score_instances,
)


@dataclass(frozen=True)
class TestItem:
    __test__ = False  # not a pytest class, despite the name

    id: str
    input: str
    references: tuple[str, ...]

    def validate(self) -> None:
        if not self.references:
            raise InputError(f"test item {self.id!r}: needs at least one reference")
        if not self.input or any(not r for r in self.references):
            raise InputError(f"test item {self.id!r}: all texts must be non-empty")

    def to_dict(self) -> dict:
        return {"id": self.id, "input": self.input, "references": list(self.references)}


def load_test_set(path: str | Path) -> list[TestItem]:
    items = []
    seen = set()
    for lineno, obj in read_jsonl(path):
        for key in ("id", "input", "references"):
            if key not in obj:
                raise InputError(f"{path}:{lineno}: missing field {key!r}")
        item = TestItem(
            id=str(obj["id"]),
            input=str(obj["input"]),
            references=tuple(str(r) for r in obj["references"]),
        )
        item.validate()
        if item.id in seen:
            raise InputError(f"{path}:{lineno}: duplicate test id {item.id!r}")
        seen.add(item.id)
        items.append(item)
    if not items:
        raise InputError(f"test set {path} is empty")
    return items


def compute_test_set_hash(items: list[TestItem]) -> str:
    canonical = json.dumps([i.to_dict() for i in items], ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _config_fingerprint(backend_config: dict, test_hash: str) -> str:
    canonical = json.dumps({"backend": backend_config, "test_set": test_hash},
                           ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class EvalRunResult:
    system_name: str
    report: MetricReport
    per_instance: list[dict]
    config_fingerprint: str
    test_set_hash: str
    language: str = "et"

    def to_dict(self) -> dict:
        return {
            "system_name": self.system_name,
            "report": self.report.to_dict(),
            "per_instance": self.per_instance,
            "config_fingerprint": self.config_fingerprint,
            "test_set_hash": self.test_set_hash,
            "language": self.language,
            "toolkit_version": __version__,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "EvalRunResult":
        return cls(
            system_name=str(obj["system_name"]),
            report=MetricReport.from_dict(obj["report"]),
            per_instance=list(obj["per_instance"]),
            config_fingerprint=str(obj["config_fingerprint"]),
            test_set_hash=str(obj["test_set_hash"]),
            language=str(obj.get("language", "et")),
        )


def run_eval(backend, test_set: list[TestItem], language: str = "et",
             system_name: str | None = None) -> EvalRunResult:
    """Run a backend over the test set and score the outputs.

    The backend must produce exactly one output per test id; any backend
    failure aborts the run (no partial reports).
    """
    if not test_set:
        raise InputError("test set must be non-empty")
    outputs = backend.simplify(test_set)
    missing = [item.id for item in test_set if item.id not in outputs]
    if missing:
        raise InputError("backend produced no output for ids: " + ", ".join(missing))

    instances = [
        EvalInstance(id=item.id, input=item.input, output=outputs[item.id],
                     references=item.references)
        for item in test_set
    ]
    report = score_instances(instances, language=language)

    per_instance = []
    for instance in instances:
        sari, components = sari_instance(instance)
        try:
            grade = fkgl([instance.output], language=language)
        except InputError:
            grade = None  # output had no words; diagnostic only
        per_instance.append({
            "id": instance.id,
            "output": instance.output,
            "sari": sari,
            "sari_components": dict(sorted(components.items())),
            "bleu_smoothed": bleu_sentence(instance.output, list(instance.references)),
            "fkgl": grade,
        })

    test_hash = compute_test_set_hash(test_set)
    return EvalRunResult(
        system_name=system_name or backend.kind,
        report=report,
        per_instance=per_instance,
        config_fingerprint=_config_fingerprint(backend.config_fingerprint(), test_hash),
        test_set_hash=test_hash,
        language=language,
    )


def save_run(result: EvalRunResult, path: str | Path, stamp: bool = True) -> None:
    payload = result.to_dict()
    if stamp:
        payload["created_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    atomic_write_text(path, json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n")


def load_run(path: str | Path) -> EvalRunResult:
    path = Path(path)
    if not path.exists():
        raise InputError(f"run file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid run JSON: {exc.msg}") from exc
    try:
        return EvalRunResult.from_dict(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a valid run file: {exc!r}") from exc


@dataclass
class SweepResult:
    ranking: list[dict]  # name, score, bleu, sari, fkgl per checkpoint
    best: str
    metric: str

    def to_dict(self) -> dict:
        return {"ranking": self.ranking, "best": self.best, "metric": self.metric}


def checkpoint_sweep(checkpoints: list[tuple[str, str | Path]], test_set: list[TestItem],
                     selection_metric: str = "sari", language: str = "et") -> SweepResult:
    """Score every checkpoint's file map and rank by the selection metric.

    Descending sort; ties keep input order, so the earlier checkpoint
    wins. Every file map must cover the test set (as in run_eval).
    """
    from .backends import FileMapBackend

    if not checkpoints:
        raise InputError("sweep needs at least one checkpoint")
    if selection_metric not in ("sari", "bleu"):
        raise InputError(f"selection metric must be sari or bleu, got {selection_metric!r}")

    rows = []
    for name, path in checkpoints:
        result = run_eval(FileMapBackend(path), test_set, language=language, system_name=name)
        rows.append({
            "name": name,
            "score": getattr(result.report, selection_metric),
            "bleu": result.report.bleu,
            "sari": result.report.sari,
            "fkgl": result.report.fkgl,
        })
    ranking = sorted(rows, key=lambda row: -row["score"])  # stable: input order breaks ties
    return SweepResult(ranking=ranking, best=ranking[0]["name"], metric=selection_metric)


_COLUMNS = ("bleu", "sari", "fkgl")


@dataclass
class ComparisonResult:
    rows: list[dict]  # system, bleu, sari, fkgl
    best_by_column: dict[str, list[str]]

    def to_dict(self) -> dict:
        return {"rows": self.rows, "best_by_column": self.best_by_column}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n"

    def to_tsv(self) -> str:
        # numeric cells stay clean; the trailing column lists the metrics
        # this system wins
        lines = ["System\tBLEU\tSARI\tFKGL\tbest_in"]
        for row in self.rows:
            wins = ",".join(c.upper() for c in _COLUMNS if row["system"] in self.best_by_column[c])
            lines.append(
                f"{row['system']}\t{row['bleu']:.2f}\t{row['sari']:.2f}\t{row['fkgl']:.2f}\t{wins}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = ["| System | BLEU | SARI | FKGL |", "| --- | --- | --- | --- |"]
        for row in self.rows:
            cells = [row["system"]]
            for column in _COLUMNS:
                text = f"{row[column]:.2f}"
                if row["system"] in self.best_by_column[column]:
                    text = f"**{text}**"
                cells.append(text)
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def compare_systems(results: list[EvalRunResult]) -> ComparisonResult:
    """Tabulate >= 2 runs over the identical test set, marking per-column bests.

    Best BLEU and SARI are the highest values; best FKGL is the lowest
    (lower grade reads easier). Ties mark every tied system.
    """
    if len(results) < 2:
        raise InputError("comparison needs at least two runs")
    first = results[0]
    for other in results[1:]:
        if other.test_set_hash != first.test_set_hash:
            raise InputError(
                "runs are not over the same test set: "
                f"{first.system_name} has fingerprint {first.config_fingerprint} "
                f"(test set {first.test_set_hash[:12]}), "
                f"{other.system_name} has fingerprint {other.config_fingerprint} "
                f"(test set {other.test_set_hash[:12]})"
            )

    rows = [
        {
            "system": r.system_name,
            "bleu": r.report.bleu,
            "sari": r.report.sari,
            "fkgl": r.report.fkgl,
        }
        for r in results
    ]
    best_by_column: dict[str, list[str]] = {}
    for column in _COLUMNS:
        values = [row[column] for row in rows]
        target = min(values) if column == "fkgl" else max(values)
        best_by_column[column] = [row["system"] for row in rows if row[column] == target]
    return ComparisonResult(rows=rows, best_by_column=best_by_column)
