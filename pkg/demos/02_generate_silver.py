"""Generate silver simplification pairs with the staged prompt pipeline.

Uses an offline stand-in for the completion endpoint (a CallableClient
wrapping a plain function) so the demo runs without credentials or
network access. Shows two-stage chaining (lexical, then syntactic),
quality flagging, and crash-safe resumption. Swap the client for
HttpCompletionClient(url) to talk to a real chat-completion endpoint;
its token comes from the SIMPKIT_TOKEN environment variable.

Run:  python3 demos/02_generate_silver.py
"""

import json
from pathlib import Path

from simpkit.corpus import SentenceRecord
from simpkit.promptgen import (
    CallableClient,
    GenerationConfig,
    batch_generate,
    resolve_template,
)

SCRATCH = Path(__file__).parent / "_scratch" / "generate_silver"

SENTENCES = [
    "Epidemioloogia on teadusharu, mis uurib tervisega seotud seisundite esinemist rahvastikus.",
    "Teadlased koguvad andmeid paljudest erinevatest allikatest ning analüüsivad neid hoolikalt.",
    "Tulemused avaldatakse teadusajakirjades, et teised uurijad saaksid neid kasutada.",
    "Lühendamine tähendab siin pikkade ja keeruliste lausete muutmist selgemaks.",
]


def toy_simplifier(messages, params) -> str:
    """Stands in for the model: drop subordinate clauses, keep the head."""
    content = messages[-1]["content"]
    sentence = content.rsplit("Original: ", 1)[1].rsplit("\nSimplified:", 1)[0]
    head = sentence.split(",")[0].rstrip(".")
    words = head.split()
    return " ".join(words[:8]).rstrip(".,") + "."


def main() -> None:
    SCRATCH.mkdir(parents=True, exist_ok=True)
    out_path = SCRATCH / "silver.jsonl"
    out_path.unlink(missing_ok=True)

    records = [
        SentenceRecord(id=f"sent-{k}", text=text, word_count=len(text.split()))
        for k, text in enumerate(SENTENCES)
    ]

    print("=== 1. two-stage pipeline: lexical agent, then syntactic agent ===")
    config = GenerationConfig(
        templates=(resolve_template("lexical-1"), resolve_template("syntactic-1")),
        rps=50,  # sliding-window rate limit, generous for a local stub
    )
    client = CallableClient(toy_simplifier)
    summary = batch_generate(records, config, client, out_path)
    print(f"summary: {summary.to_dict()}")

    for line in out_path.read_text(encoding="utf-8").splitlines():
        obj = json.loads(line)
        print(f"\n  {obj['id']} [{obj['origin']}] flags={obj['flags']}")
        print(f"    source: {obj['source'][:64]}")
        print(f"    stages: {obj['intermediate']}")
        print(f"    simple: {obj['simple']}")

    print("\n=== 2. resumption: rerunning skips everything already written ===")
    again = batch_generate(records, config, client, out_path)
    print(f"summary: {again.to_dict()}  (skipped == number of inputs, zero requests)")

    print(f"\nsidecars: {out_path.name}.summary.json "
          f"(and .failures.jsonl when something fails) in {SCRATCH}")


if __name__ == "__main__":
    main()
