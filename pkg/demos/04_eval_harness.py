"""Run systems over a fixed test set, pick a checkpoint, compare results.

Three acts: run the identity baseline and a precomputed-output "system"
over the same test set; sweep a directory of checkpoint outputs to pick
the best by SARI; and render a side-by-side comparison table in all
three output shapes (JSON, TSV, markdown).

Run:  python3 demos/04_eval_harness.py
"""

import json
from pathlib import Path

from simpkit.evalharness import (
    FileMapBackend,
    IdentityBackend,
    checkpoint_sweep,
    compare_systems,
    run_eval,
    save_run,
)
from simpkit.evalharness.harness import TestItem

SCRATCH = Path(__file__).parent / "_scratch" / "eval_harness"


def make_test_set() -> list[TestItem]:
    items = []
    for k in range(8):
        items.append(TestItem(
            id=f"t-{k:02d}",
            input=f"pikk keeruline sisendlause number {k} vajab tööd",
            references=(f"lihtne lause {k} on valmis",),
        ))
    return items


def write_outputs(path: Path, items, hits: int) -> None:
    """First `hits` items answer with the reference, the rest echo input."""
    with open(path, "w", encoding="utf-8") as handle:
        for k, item in enumerate(items):
            output = item.references[0] if k < hits else item.input
            handle.write(json.dumps({"id": item.id, "output": output},
                                    ensure_ascii=False) + "\n")


def main() -> None:
    SCRATCH.mkdir(parents=True, exist_ok=True)
    items = make_test_set()

    print("=== 1. two runs over the same test set ===")
    baseline = run_eval(IdentityBackend(), items, system_name="copy-baseline")
    print(f"  copy-baseline: BLEU {baseline.report.bleu:.2f} "
          f"SARI {baseline.report.sari:.2f} FKGL {baseline.report.fkgl:.2f}")

    good_outputs = SCRATCH / "good_system.jsonl"
    write_outputs(good_outputs, items, hits=6)
    system = run_eval(FileMapBackend(good_outputs), items, system_name="tuned-model")
    print(f"  tuned-model:   BLEU {system.report.bleu:.2f} "
          f"SARI {system.report.sari:.2f} FKGL {system.report.fkgl:.2f}")
    save_run(baseline, SCRATCH / "run_baseline.json")
    save_run(system, SCRATCH / "run_tuned.json")
    print(f"  run files carry a config fingerprint + test-set hash -> {SCRATCH}\n")

    print("=== 2. checkpoint sweep: best of five by SARI ===")
    checkpoints = []
    for step, hits in [(100, 2), (200, 4), (300, 8), (400, 5), (500, 3)]:
        path = SCRATCH / f"step-{step:03d}.jsonl"
        write_outputs(path, items, hits)
        checkpoints.append((f"step-{step:03d}", path))
    sweep = checkpoint_sweep(checkpoints, items, selection_metric="sari")
    for row in sweep.ranking:
        print(f"  {row['name']}  sari={row['score']:.2f}")
    print(f"  best: {sweep.best}\n")

    print("=== 3. comparison table (best per column marked) ===")
    table = compare_systems([baseline, system])
    print(table.to_markdown())
    print("TSV shape:")
    print(table.to_tsv())


if __name__ == "__main__":
    main()
