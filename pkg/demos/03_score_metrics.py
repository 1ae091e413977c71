"""Score system outputs with BLEU, SARI, and FKGL.

Builds a handful of evaluation instances covering the interesting
regimes -- a perfect match, a pure copy, a real simplification, and an
over-deletion -- then prints per-instance SARI next to the corpus-level
report so the conventions are visible in the numbers.

Run:  python3 demos/03_score_metrics.py
"""

from simpkit.metrics import (
    EvalInstance,
    count_syllables,
    fkgl,
    format_report,
    sari_instance,
    score_instances,
)

INSTANCES = [
    EvalInstance(
        id="perfect",
        input="Vanad majad seisavad mäe otsas juba sada aastat.",
        output="Vanad majad on mäe otsas.",
        references=("Vanad majad on mäe otsas.",),
    ),
    EvalInstance(
        id="copy",
        input="Päike tõuseb idast ja loojub läände.",
        output="Päike tõuseb idast ja loojub läände.",
        references=("Päike tõuseb idast ja loojub läände.",),
    ),
    EvalInstance(
        id="simplified",
        input="Epidemioloogia uurib tervisega seotud seisundite esinemist rahvastikus.",
        output="Epidemioloogia uurib haiguste esinemist rahvas.",
        references=(
            "Epidemioloogia uurib haiguste esinemist rahvas.",
            "Epidemioloogia uurib haigusi rahvastikus.",
        ),
    ),
    EvalInstance(
        id="over-deleted",
        input="Teadlased koguvad andmeid paljudest erinevatest allikatest hoolikalt.",
        output="Teadlased koguvad.",
        references=("Teadlased koguvad andmeid paljudest allikatest.",),
    ),
]


def main() -> None:
    print("=== per-instance SARI (copy lands near 33.3 by construction) ===")
    for inst in INSTANCES:
        score, parts = sari_instance(inst)
        detail = ", ".join(f"{k}={v:.2f}" for k, v in sorted(parts.items()))
        print(f"  {inst.id:<12} SARI {score:6.2f}   ({detail})")

    print("\n=== corpus report ===")
    report = score_instances(INSTANCES, language="et")
    print(format_report(report))

    print("=== readability ingredients ===")
    for word in ("hea", "epidemioloogia", "rahvastikus"):
        print(f"  syllables({word!r}) = {count_syllables(word, 'et')}")
    simple = ["Ta on hea."]
    print(f"  fkgl({simple[0]!r}) = {fkgl(simple, 'et'):.2f}  "
          "(short sentences push the grade level below zero)")


if __name__ == "__main__":
    main()
