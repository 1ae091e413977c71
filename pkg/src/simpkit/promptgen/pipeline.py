"""Staged generation pipeline: chain templates over a completion client,
flag suspect outputs, and batch over a corpus with retries, bounded
parallelism, rate limiting, and resume support.
"""

from __future__ import annotations

import threading
import time
import unicodedata
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

from ..corpus import AlignedPair, SentenceRecord
from ..errors import InputError, PipelineError
from ..ioutil import atomic_write_text, json_line, read_jsonl
from .client import CompletionClient, CompletionError, ModelParams, RateLimitedClient, RateLimiter
from .templates import PromptTemplate, render_prompt

QUALITY_FLAGS = ("empty_output", "foreign_script", "identical_output", "length_expanded")


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 0.5

    def __post_init__(self):
        if self.max_attempts < 1:
            raise InputError(f"max_attempts must be >= 1, got {self.max_attempts}")


@dataclass(frozen=True)
class GenerationJob:
    input: SentenceRecord
    stages: tuple[str, ...]  # template versions, in order
    model_params: ModelParams
    retry_policy: RetryPolicy

    def __post_init__(self):
        if not self.stages:
            raise InputError(f"job for {self.input.id!r}: stages must be non-empty")


@dataclass(frozen=True)
class GenerationResult:
    pair: AlignedPair
    intermediate_outputs: tuple[str, ...]
    flags: frozenset[str]
    raw_log_ref: str


def _non_latin_letter_ratio(text: str) -> float:
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return 0.0
    foreign = sum(1 for ch in letters if not unicodedata.name(ch, "").startswith("LATIN"))
    return foreign / len(letters)


def quality_flags(source: str, final: str, intermediates: tuple[str, ...] = ()) -> frozenset[str]:
    """Deterministic triage flags routing a pair to the correction queue.

    empty_output      any stage produced nothing
    identical_output  the final text equals the source
    length_expanded   final/source character ratio above 2.0
    foreign_script    more than 10% of the final text's letters are non-Latin
    """
    flags = set()
    if final == "" or "" in intermediates:
        flags.add("empty_output")
    if final and final == source:
        flags.add("identical_output")
    if final and source and len(final) / len(source) > 2.0:
        flags.add("length_expanded")
    if _non_latin_letter_ratio(final) > 0.10:
        flags.add("foreign_script")
    return frozenset(flags)


def _complete_with_retry(client: CompletionClient, messages, params: ModelParams,
                         retry: RetryPolicy, stage_index: int, sleep=time.sleep) -> str:
    last_error = None
    for attempt in range(1, retry.max_attempts + 1):
        try:
            return client.complete(messages, params)
        except CompletionError as exc:
            if not exc.transient:
                raise PipelineError(f"stage {stage_index}: {exc}", stage_index) from exc
            last_error = exc
            if attempt < retry.max_attempts:
                sleep(retry.backoff_base * (2 ** (attempt - 1)))
    raise PipelineError(
        f"stage {stage_index}: gave up after {retry.max_attempts} attempts: {last_error}",
        stage_index,
    )


def run_pipeline(
    sentence: SentenceRecord,
    stages: list[PromptTemplate],
    client: CompletionClient,
    model_params: ModelParams | None = None,
    retry: RetryPolicy | None = None,
    pipeline_version: str | None = None,
    sleep=time.sleep,
) -> GenerationResult:
    """Chain the stage templates over one sentence.

    Stage k's input is stage k-1's output. An empty completion stops the
    chain: later stages are skipped, their intermediate entries recorded
    as "", and the result is flagged for review rather than failed. The
    returned pair is NOT validated (an empty simple is representable
    here; dataset assembly stays strict).
    """
    if not stages:
        raise InputError(f"job for {sentence.id!r}: stages must be non-empty")
    model_params = model_params or ModelParams(model="default")
    retry = retry or RetryPolicy()

    intermediates: list[str] = []
    text = sentence.text
    dead = False
    for index, template in enumerate(stages):
        if dead:
            intermediates.append("")
            continue
        prompt = render_prompt(template, text)
        raw = _complete_with_retry(client, prompt.messages, model_params, retry, index, sleep)
        cleaned = " ".join(raw.split())
        intermediates.append(cleaned)
        if cleaned:
            text = cleaned
        else:
            dead = True

    final = intermediates[-1]
    staged = len(stages) > 1
    version = pipeline_version or ("agents" if staged else stages[0].version)
    pair = AlignedPair(
        id=sentence.id,
        source=sentence.text,
        simple=final,
        origin="llm_agents" if staged else "llm_v1",
        template_version=version,
        corrected=False,
    )
    return GenerationResult(
        pair=pair,
        intermediate_outputs=tuple(intermediates),
        flags=quality_flags(sentence.text, final, tuple(intermediates)),
        raw_log_ref=f"{sentence.id}/{'+'.join(t.version for t in stages)}",
    )


@dataclass(frozen=True)
class GenerationConfig:
    templates: tuple[PromptTemplate, ...]
    model_params: ModelParams = ModelParams(model="default")
    retry: RetryPolicy = RetryPolicy()
    workers: int = 1
    rps: int | None = None
    pipeline_version: str | None = None

    def __post_init__(self):
        if not self.templates:
            raise InputError("generation config needs at least one template")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")


@dataclass
class RunSummary:
    succeeded: int = 0
    flagged: int = 0
    failed: int = 0
    skipped: int = 0  # already present in the output file

    def to_dict(self) -> dict:
        return {
            "succeeded": self.succeeded,
            "flagged": self.flagged,
            "failed": self.failed,
            "skipped": self.skipped,
        }


def result_line(result: GenerationResult) -> dict:
    line = result.pair.to_dict()
    line["flags"] = sorted(result.flags)
    line["intermediate"] = list(result.intermediate_outputs)
    return line


def failures_path_for(out_path: str | Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.name + ".failures.jsonl")


def summary_path_for(out_path: str | Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.name + ".summary.json")


def batch_generate(
    records: list[SentenceRecord],
    config: GenerationConfig,
    client: CompletionClient,
    out_path: str | Path,
    sleep=time.sleep,
) -> RunSummary:
    """Generate silver pairs for a corpus, resumably.

    Ids already present in the output file are skipped outright (zero new
    requests for them); previously failed ids are retried. Results stream
    to the output file as they complete so an interrupted run loses
    nothing, and at the end the file is rewritten atomically in input
    order. Failures land in a sidecar file next to the output.
    """
    out_path = Path(out_path)
    seen_ids = {r.id for r in records}
    if len(seen_ids) != len(records):
        raise InputError("input corpus contains duplicate sentence ids")

    existing: dict[str, dict] = {}
    if out_path.exists():
        for _, obj in read_jsonl(out_path):
            if "id" in obj:
                existing[str(obj["id"])] = obj

    pending = [r for r in records if r.id not in existing]
    summary = RunSummary(skipped=len(records) - len(pending))

    effective_client = client
    if config.rps is not None:
        effective_client = RateLimitedClient(client, RateLimiter(config.rps, sleep=sleep))

    stages = list(config.templates)
    lock = threading.Lock()
    failures: list[dict] = []

    def work(record: SentenceRecord) -> GenerationResult:
        return run_pipeline(
            record, stages, effective_client,
            model_params=config.model_params,
            retry=config.retry,
            pipeline_version=config.pipeline_version,
            sleep=sleep,
        )

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("a", encoding="utf-8") as journal:
        def record_success(result: GenerationResult) -> None:
            line = result_line(result)
            with lock:
                journal.write(json_line(line) + "\n")
                journal.flush()
                existing[result.pair.id] = line
                if result.flags:
                    summary.flagged += 1
                else:
                    summary.succeeded += 1

        def record_failure(record: SentenceRecord, error: PipelineError) -> None:
            with lock:
                failures.append({
                    "id": record.id,
                    "error": str(error),
                    "stage": error.stage_index,
                })
                summary.failed += 1

        if config.workers == 1:
            for record in pending:
                try:
                    record_success(work(record))
                except PipelineError as exc:
                    record_failure(record, exc)
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = {pool.submit(work, record): record for record in pending}
                for future in as_completed(futures):
                    record = futures[future]
                    try:
                        record_success(future.result())
                    except PipelineError as exc:
                        record_failure(record, exc)

    # finalize: one line per completed input, ordered by the input corpus
    order = {r.id: i for i, r in enumerate(records)}
    ordered = sorted(existing.values(), key=lambda obj: order.get(str(obj["id"]), len(order)))
    atomic_write_text(out_path, "".join(json_line(obj) + "\n" for obj in ordered))

    failures_path = failures_path_for(out_path)
    if failures:
        failures.sort(key=lambda obj: order.get(obj["id"], len(order)))
        atomic_write_text(failures_path, "".join(json_line(f) + "\n" for f in failures))
    elif failures_path.exists():
        failures_path.unlink()

    atomic_write_text(summary_path_for(out_path), json_line(summary.to_dict()) + "\n")
    return summary
