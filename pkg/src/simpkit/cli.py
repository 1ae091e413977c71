"""Command-line entry point wiring all toolkit modules together.

Exit codes: 0 success, 1 validation/config error (bad flags, bad files,
violated preconditions), 2 runtime failure (network, subprocess, I/O).
Errors go to standard error; data goes to standard output or --out.
Secrets are read only from environment variables named in the config.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import ToolConfig, load_config
from .corpus import (
    DEFAULT_RULES,
    ORIGINS,
    PairSource,
    SegmentationRules,
    build_dataset,
    filter_candidates,
    read_pairs,
    read_sentences,
    segment_article,
    split_dataset,
    write_sentences,
)
from .errors import BackendError, InputError
from .evalharness import (
    checkpoint_sweep,
    compare_systems,
    load_run,
    load_test_set,
    parse_backend_spec,
    run_eval,
    save_run,
)
from .ioutil import atomic_write_text
from .metrics import format_report, load_instances, score_instances, write_report
from .promptgen import (
    GenerationConfig,
    HttpCompletionClient,
    ModelParams,
    batch_generate,
    resolve_template,
)


class _CliParser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _read_text_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"input file not found: {path}") from None


def _config_for(args) -> ToolConfig:
    return load_config(args.config)


def _effective(flag_value, config_value):
    return flag_value if flag_value is not None else config_value


# ------------------------------------------------------------------ corpus


def _cmd_corpus_segment(args) -> None:
    document = _read_text_file(args.in_path)
    if args.abbrev is not None:
        if not Path(args.abbrev).exists():
            raise InputError(f"abbreviation file not found: {args.abbrev}")
        rules = SegmentationRules.from_file(args.abbrev)
    else:
        rules = DEFAULT_RULES
    records = segment_article(document, rules=rules, article_id=args.article_id)
    write_sentences(records, args.out)
    print(f"segmented {len(records)} sentences -> {args.out}")


def _cmd_corpus_filter(args) -> None:
    records = read_sentences(args.in_path)
    kept = filter_candidates(records, min_words=args.min_words)
    write_sentences(kept, args.out)
    print(f"kept {len(kept)} of {len(records)} sentences -> {args.out}")


def _parse_source(arg: str) -> PairSource:
    if ":" in arg:
        path, _, tag = arg.rpartition(":")
        if tag == "llm" or tag in ORIGINS:
            return PairSource(path=Path(path), origin_tag=tag)
    return PairSource(path=Path(arg), origin_tag=None)


def _cmd_corpus_build(args) -> None:
    sources = [_parse_source(arg) for arg in args.source]
    manifest = build_dataset(sources, args.out, manifest_path=args.manifest)
    counts = ", ".join(f"{k}={v}" for k, v in sorted(manifest.counts_by_origin.items()))
    print(f"built {manifest.total} pairs ({counts}) -> {args.out}")


def _parse_ratios(text: str) -> dict[str, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise InputError(f"--ratios needs three comma-separated numbers, got {text!r}")
    try:
        values = [float(part) for part in parts]
    except ValueError:
        raise InputError(f"--ratios needs three comma-separated numbers, got {text!r}") from None
    return {"train": values[0], "dev": values[1], "test": values[2]}


def _cmd_corpus_split(args) -> None:
    config = _config_for(args)
    pairs = read_pairs(args.in_path)
    gold_ids = [pair.id for pair in read_pairs(args.gold)] if args.gold else None
    seed = _effective(args.seed, config.seed)
    if seed is None:
        raise InputError("corpus split needs --seed (or seed in the config file)")
    manifest = split_dataset(
        pairs,
        seed=seed,
        ratios=_parse_ratios(args.ratios),
        gold_ids=gold_ids,
        out_dir=args.out_dir,
    )
    sizes = manifest.split_sizes or {}
    shape = ", ".join(f"{k}={v}" for k, v in sizes.items())
    print(f"split {manifest.total} pairs ({shape}) -> {args.out_dir}")


# ---------------------------------------------------------------- generate


def _cmd_generate(args) -> None:
    config = _config_for(args)
    records = read_sentences(args.in_path)
    templates = tuple(resolve_template(name) for name in args.template)
    endpoint = _effective(args.endpoint, config.endpoint_url)
    if endpoint is None:
        raise InputError("generate needs --endpoint (or endpoint_url in the config file)")
    client = HttpCompletionClient(
        endpoint,
        token_env=_effective(args.token_env, config.token_env),
        timeout=config.timeout,
    )
    generation = GenerationConfig(
        templates=templates,
        model_params=ModelParams(model=_effective(args.model, config.endpoint_model)),
        workers=_effective(args.workers, config.workers),
        rps=_effective(args.rps, config.rps),
    )
    summary = batch_generate(records, generation, client, args.out)
    print(
        f"generated -> {args.out}: succeeded={summary.succeeded} "
        f"flagged={summary.flagged} failed={summary.failed} skipped={summary.skipped}"
    )


# ----------------------------------------------------------------- metrics


def _cmd_metrics_score(args) -> None:
    config = _config_for(args)
    language = _effective(args.lang, config.language)
    instances = load_instances(args.instances)
    report = score_instances(instances, language=language)
    write_report(report, args.out, language=language)
    print(format_report(report))


# -------------------------------------------------------------------- eval


def _cmd_eval_run(args) -> None:
    config = _config_for(args)
    backend = parse_backend_spec(
        args.backend,
        model=_effective(args.model, config.endpoint_model),
        token_env=_effective(args.token_env, config.token_env),
        timeout=config.timeout,
        workers=_effective(args.workers, config.workers),
    )
    items = load_test_set(args.test)
    result = run_eval(
        backend,
        items,
        language=_effective(args.lang, config.language),
        system_name=args.name,
    )
    save_run(result, args.out)
    report = result.report
    print(
        f"{result.system_name}: BLEU {report.bleu:.2f} SARI {report.sari:.2f} "
        f"FKGL {report.fkgl:.2f} ({report.n_instances} instances) -> {args.out}"
    )


def _cmd_eval_sweep(args) -> None:
    config = _config_for(args)
    directory = Path(args.checkpoints)
    if not directory.is_dir():
        raise InputError(f"checkpoint directory not found: {directory}")
    paths = sorted(directory.glob("*.jsonl"))
    if not paths:
        raise InputError(f"no checkpoint output files (*.jsonl) in {directory}")
    checkpoints = [(path.stem, path) for path in paths]
    items = load_test_set(args.test)
    sweep = checkpoint_sweep(
        checkpoints,
        items,
        selection_metric=args.metric,
        language=_effective(args.lang, config.language),
    )
    for row in sweep.ranking:
        print(f"{row['name']}\t{sweep.metric}={row['score']:.2f}")
    print(f"best: {sweep.best}")
    if args.out:
        atomic_write_text(
            args.out,
            json.dumps(sweep.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        )


def _cmd_eval_compare(args) -> None:
    results = [load_run(path) for path in args.runs]
    table = compare_systems(results)
    fmt = args.format
    if fmt is None:
        suffix = Path(args.out).suffix.lower() if args.out else ""
        fmt = {".json": "json", ".tsv": "tsv"}.get(suffix, "md")
    rendered = {
        "json": table.to_json,
        "tsv": table.to_tsv,
        "md": table.to_markdown,
    }[fmt]()
    if args.out:
        atomic_write_text(args.out, rendered)
        print(f"comparison ({fmt}) -> {args.out}")
    else:
        print(rendered, end="")


# --------------------------------------------------------------- humaneval


def _cmd_humaneval_summary(args) -> None:
    from .humaneval import EventStore

    store = EventStore(args.data, create=False)
    rows = store.consensus_summary()
    if args.json:
        print(json.dumps({"systems": rows}, ensure_ascii=False, sort_keys=True, indent=2))
        return
    if not rows:
        print("no consensus records yet")
        return
    print(f"{'System':<24} {'N':>4} {'G':>6} {'R':>6} {'M':>6} {'S':>6} {'Overall':>8}")
    for row in rows:
        means = row["means"]
        print(
            f"{row['system_name']:<24} {row['n_items']:>4} "
            f"{means['G']:>6.2f} {means['R']:>6.2f} {means['M']:>6.2f} "
            f"{means['S']:>6.2f} {row['overall']:>8.2f}"
        )


def _cmd_serve(args) -> None:
    import uvicorn

    from .humaneval import EventStore, create_app

    if args.static is not None and not Path(args.static).is_dir():
        raise InputError(f"static directory not found: {args.static}")
    store = EventStore(args.data, create=True)
    app = create_app(store, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(
        prog="simpkit",
        description="Dataset construction and evaluation toolkit for text simplification.",
    )
    parser.add_argument("--version", action="version", version=f"simpkit {__version__}")
    parser.add_argument(
        "--config", default=None,
        help="config file path (default: ./simpkit.cfg when present)",
    )
    parser.set_defaults(handler=None)
    commands = parser.add_subparsers(dest="command", metavar="command")

    corpus = commands.add_parser("corpus", help="segment, filter, build, and split corpora")
    corpus_sub = corpus.add_subparsers(dest="subcommand", metavar="subcommand", required=True)

    segment = corpus_sub.add_parser("segment", help="split article text into sentences")
    segment.add_argument("--in", dest="in_path", required=True, help="plain-text article")
    segment.add_argument("--out", required=True, help="sentence records JSONL")
    segment.add_argument("--abbrev", default=None,
                         help="abbreviation list file (one per line) replacing the default")
    segment.add_argument("--article-id", default=None, help="id prefix for the sentences")
    segment.set_defaults(handler=_cmd_corpus_segment)

    filter_ = corpus_sub.add_parser("filter", help="keep sentences with enough words")
    filter_.add_argument("--in", dest="in_path", required=True, help="sentence records JSONL")
    filter_.add_argument("--out", required=True)
    filter_.add_argument("--min-words", type=int, default=16,
                         help="minimum word count to keep (default 16)")
    filter_.set_defaults(handler=_cmd_corpus_filter)

    build = corpus_sub.add_parser("build", help="merge pair files into one dataset")
    build.add_argument("--source", action="append", required=True, metavar="PATH[:ORIGIN]",
                       help="pair file, optionally tagged with its origin (repeatable)")
    build.add_argument("--out", required=True, help="merged pair file")
    build.add_argument("--manifest", default=None, help="write counts manifest here")
    build.set_defaults(handler=_cmd_corpus_build)

    split = corpus_sub.add_parser("split", help="partition pairs into train/dev/test/gold")
    split.add_argument("--in", dest="in_path", required=True, help="pair file")
    split.add_argument("--seed", type=int, default=None, help="shuffle seed")
    split.add_argument("--ratios", default="0.8,0.1,0.1",
                       help="train,dev,test fractions (default 0.8,0.1,0.1)")
    split.add_argument("--gold", default=None, help="pair file whose ids form the gold holdout")
    split.add_argument("--out-dir", required=True)
    split.set_defaults(handler=_cmd_corpus_split)

    generate = commands.add_parser("generate", help="generate silver pairs via an endpoint")
    generate.add_argument("--in", dest="in_path", required=True, help="sentence records JSONL")
    generate.add_argument("--template", action="append", required=True,
                          help="builtin template version or template file (repeat for stages)")
    generate.add_argument("--out", required=True, help="pair file (journal, resumable)")
    generate.add_argument("--workers", type=int, default=None)
    generate.add_argument("--rps", type=int, default=None, help="request rate limit per second")
    generate.add_argument("--endpoint", default=None, help="completion endpoint URL")
    generate.add_argument("--model", default=None)
    generate.add_argument("--token-env", default=None,
                          help="environment variable holding the endpoint token")
    generate.set_defaults(handler=_cmd_generate)

    metrics = commands.add_parser("metrics", help="score outputs with BLEU, SARI, FKGL")
    metrics_sub = metrics.add_subparsers(dest="subcommand", metavar="subcommand", required=True)
    score = metrics_sub.add_parser("score", help="score an instance file")
    score.add_argument("--instances", required=True, help="instances JSONL")
    score.add_argument("--out", required=True, help="machine report JSON")
    score.add_argument("--lang", default=None, choices=("et", "en"))
    score.set_defaults(handler=_cmd_metrics_score)

    eval_ = commands.add_parser("eval", help="run backends, sweep checkpoints, compare systems")
    eval_sub = eval_.add_subparsers(dest="subcommand", metavar="subcommand", required=True)

    run = eval_sub.add_parser("run", help="run one backend over a test set")
    run.add_argument("--backend", required=True,
                     help='identity | file:<path> | http:<url> | cmd:"<argv>"')
    run.add_argument("--test", required=True, help="test set JSONL")
    run.add_argument("--out", required=True, help="run result JSON")
    run.add_argument("--name", default=None, help="system name for reports")
    run.add_argument("--model", default=None)
    run.add_argument("--token-env", default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--lang", default=None, choices=("et", "en"))
    run.set_defaults(handler=_cmd_eval_run)

    sweep = eval_sub.add_parser("sweep", help="rank checkpoint outputs by a metric")
    sweep.add_argument("--checkpoints", required=True,
                       help="directory of per-checkpoint output files (*.jsonl)")
    sweep.add_argument("--test", required=True, help="test set JSONL")
    sweep.add_argument("--metric", default="sari", choices=("sari", "bleu"))
    sweep.add_argument("--out", default=None, help="write the ranking as JSON here")
    sweep.add_argument("--lang", default=None, choices=("et", "en"))
    sweep.set_defaults(handler=_cmd_eval_sweep)

    compare = eval_sub.add_parser("compare", help="tabulate saved runs side by side")
    compare.add_argument("--runs", nargs="+", required=True, help="two or more run files")
    compare.add_argument("--out", default=None, help="write the table here (suffix picks format)")
    compare.add_argument("--format", default=None, choices=("md", "tsv", "json"))
    compare.set_defaults(handler=_cmd_eval_compare)

    humaneval = commands.add_parser("humaneval", help="manual annotation utilities")
    humaneval_sub = humaneval.add_subparsers(dest="subcommand", metavar="subcommand",
                                             required=True)
    summary = humaneval_sub.add_parser("summary", help="mean consensus scores per system")
    summary.add_argument("--data", required=True, help="annotation event log")
    summary.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    summary.set_defaults(handler=_cmd_humaneval_summary)

    serve = commands.add_parser("serve", help="serve the annotation API (and optional UI)")
    serve.add_argument("--data", required=True, help="annotation event log (created if missing)")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static", default=None, help="static UI directory to mount at /")
    serve.set_defaults(handler=_cmd_serve)

    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help / --version print and leave
        return 0 if exc.code in (0, None) else 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.handler is None:
        parser.print_usage(sys.stderr)
        print("simpkit: a subcommand is required", file=sys.stderr)
        return 1
    try:
        args.handler(args)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
