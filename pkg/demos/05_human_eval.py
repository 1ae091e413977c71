"""Run a two-annotator rating session against the annotation event store.

Assigns five items to two annotators, records ratings with one planned
disagreement, inspects exact-agreement rates and Cohen's kappa, resolves
the dispute into a consensus record, and prints the per-system summary
table. Everything lands in an append-only JSONL event log that replays
to the same state -- the same log the `simpkit serve` API works from.

Run:  python3 demos/05_human_eval.py
"""

import json
from pathlib import Path

from simpkit.humaneval import RUBRIC, AnnotationItem, EventStore

SCRATCH = Path(__file__).parent / "_scratch" / "human_eval"


def main() -> None:
    SCRATCH.mkdir(parents=True, exist_ok=True)
    log_path = SCRATCH / "ratings.jsonl"
    log_path.unlink(missing_ok=True)
    store = EventStore(log_path)

    print("=== rubric (four criteria, 0-4 each) ===")
    for criterion in RUBRIC:
        print(f"  {criterion.code}: {criterion.name}")
    print()

    items = [
        AnnotationItem(
            item_id=f"item-{k}",
            system_name="neural-lm",
            source=f"Keeruline lähtelause number {k} koos kõrvallausetega.",
            output=f"Lihtne lause {k}.",
        )
        for k in range(1, 6)
    ]
    tasks = store.assign_items(items, ["anna", "bert"])
    print(f"=== assigned {len(items)} items x 2 annotators = {tasks} rating tasks ===\n")

    agreed = {"G": 4, "R": 3, "M": 3, "S": 2}
    for k in range(1, 6):
        store.record_rating("anna", f"item-{k}", agreed)
    for k in range(1, 6):
        scores = dict(agreed)
        if k == 4:
            scores["S"] = 1  # bert reads item-4's simplification differently
        store.record_rating("bert", f"item-{k}", scores)

    print("=== agreement after both annotators finished ===")
    agreement = store.agreement()
    print(f"  exact-agreement rates: {agreement['rates']}")
    print(f"  cohen's kappa:         {agreement['kappa']}")
    for dispute in agreement["disagreements"]:
        print(f"  disputed: {dispute['item_id']} on {dispute['criteria']} "
              f"ratings={dispute['ratings']}")
    print()

    print("=== resolve the dispute into a consensus record ===")
    store.record_consensus(
        "item-4",
        {"G": 4, "R": 3, "M": 3, "S": 2},
        resolved_by=["anna", "bert"],
        as_of=agreement["as_of"],
    )
    print(f"  disagreements now: {store.agreement()['disagreements']}")
    statuses = {item.item_id: store.item_status(item.item_id) for item in items}
    print(f"  statuses: {statuses}  (identical ratings auto-resolved)\n")

    print("=== per-system consensus summary ===")
    for row in store.consensus_summary():
        print(f"  {row['system_name']}: n={row['n_items']} "
              f"means={row['means']} overall={row['overall']}")

    print(f"\nevent log at {log_path} (one JSON event per line):")
    for line in log_path.read_text(encoding="utf-8").splitlines()[:3]:
        event = json.loads(line)
        print(f"  {event['type']}: {sorted(event)}")
    print("  ...")
    print("serve it with:  python3 -m simpkit.cli serve --data "
          f"{log_path} --port 8000")


if __name__ == "__main__":
    main()
