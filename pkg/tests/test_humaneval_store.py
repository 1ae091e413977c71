"""Event store tests: assignment, ratings, statuses, agreement, summaries."""

import json

import pytest

from simpkit.errors import (
    AuthorizationError,
    ConflictError,
    InputError,
    NotFoundError,
)
from simpkit.humaneval import RUBRIC, AnnotationItem, EventStore, validate_scores

FULL = {"G": 4, "R": 4, "M": 4, "S": 3}


def make_items(n: int, system: str = "sys-a", prefix: str = "i") -> list[AnnotationItem]:
    return [
        AnnotationItem(
            item_id=f"{prefix}{k:03d}",
            system_name=system,
            source=f"Keeruline allikas number {k}.",
            output=f"Lihtne väljund number {k}.",
        )
        for k in range(n)
    ]


def fresh_store(tmp_path, name: str = "log.jsonl") -> EventStore:
    return EventStore(tmp_path / name)


# ----------------------------------------------------------------- rubric


def test_rubric_has_four_criteria_with_five_descriptors_each():
    assert [c.code for c in RUBRIC] == ["G", "R", "M", "S"]
    assert [c.name for c in RUBRIC] == [
        "Grammaticality",
        "Readability",
        "Preservation of Meaning",
        "Simplification",
    ]
    for criterion in RUBRIC:
        assert len(criterion.level_descriptors) == 5
    grammar = RUBRIC[0]
    assert grammar.level_descriptors[4] == "The grammar is perfect, with no mistakes."
    assert grammar.level_descriptors[0] == (
        "The text contains numerous grammatical mistakes, making it unreadable."
    )


def test_validate_scores_names_the_offending_criterion():
    assert validate_scores(FULL) == FULL
    with pytest.raises(InputError, match="criterion G"):
        validate_scores({"G": 5, "R": 4, "M": 4, "S": 3})
    with pytest.raises(InputError, match="missing score for criterion M"):
        validate_scores({"G": 4, "R": 4, "S": 3})
    with pytest.raises(InputError, match="unknown criteria.*X"):
        validate_scores({**FULL, "X": 2})
    with pytest.raises(InputError, match="criterion S"):
        validate_scores({"G": 4, "R": 4, "M": 4, "S": True})
    with pytest.raises(InputError, match="criterion R"):
        validate_scores({"G": 4, "R": 2.5, "M": 4, "S": 3})
    with pytest.raises(InputError, match="scores must be an object"):
        validate_scores(None)


# ------------------------------------------------------------- assignment


def test_assignment_task_counts(tmp_path):
    assert fresh_store(tmp_path, "a.jsonl").assign_items(make_items(50), ["a1", "a2"]) == 100
    assert fresh_store(tmp_path, "b.jsonl").assign_items(make_items(1), ["solo"]) == 1
    assert fresh_store(tmp_path, "c.jsonl").assign_items(make_items(5), ["x", "y", "z"]) == 15


def test_assignment_validation(tmp_path):
    store = fresh_store(tmp_path)
    with pytest.raises(InputError, match="at least one annotator"):
        store.assign_items(make_items(2), [])
    with pytest.raises(InputError, match="at least one item"):
        store.assign_items([], ["a1"])
    with pytest.raises(InputError, match="duplicate annotator"):
        store.assign_items(make_items(2), ["a1", "a1"])
    items = make_items(2)
    with pytest.raises(InputError, match="duplicate item"):
        store.assign_items(items + [items[0]], ["a1"])
    store.assign_items(items, ["a1"])
    with pytest.raises(InputError, match="already assigned"):
        store.assign_items(items[:1], ["a1"])
    with pytest.raises(InputError, match="non-empty string"):
        AnnotationItem("x", "sys", "", "välja").validate()


# ---------------------------------------------------------------- ratings


def test_rating_upsert_keeps_a_single_rating_per_annotator(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(2), ["a1", "a2"])

    first = store.record_rating("a1", "i000", {"G": 3, "R": 3, "M": 4, "S": 2})
    assert first["status"] == "pending"
    changed = store.record_rating("a1", "i000", {"G": 3, "R": 3, "M": 4, "S": 1})
    assert changed["scores"]["S"] == 1

    rows = store.items(annotator="a1")
    assert rows[0]["your_rating"] == {"G": 3, "R": 3, "M": 4, "S": 1}
    assert rows[0]["rated_by"] == ["a1"]


def test_identical_resubmission_appends_no_event(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1", "a2"])
    store.record_rating("a1", "i000", FULL, note="hea")
    before = store.offset
    store.record_rating("a1", "i000", FULL, note="hea")
    assert store.offset == before
    store.record_rating("a1", "i000", FULL, note="teine märkus")
    assert store.offset == before + 1


def test_rating_rejections(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1"])
    with pytest.raises(NotFoundError, match="unknown item"):
        store.record_rating("a1", "missing", FULL)
    with pytest.raises(AuthorizationError, match="not assigned"):
        store.record_rating("outsider", "i000", FULL)
    with pytest.raises(InputError, match="criterion G"):
        store.record_rating("a1", "i000", {"G": 5, "R": 4, "M": 4, "S": 3})
    with pytest.raises(InputError, match="note must be a string"):
        store.record_rating("a1", "i000", FULL, note=7)


# ----------------------------------------------------------- status flow


def test_identical_ratings_auto_create_consensus(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1", "a2"])
    assert store.item_status("i000") == "pending"
    store.record_rating("a1", "i000", FULL)
    assert store.item_status("i000") == "pending"
    store.record_rating("a2", "i000", dict(FULL))
    assert store.item_status("i000") == "consensus"

    record = store.consensus_records()["i000"]
    assert record["scores"] == FULL
    assert record["resolved_by"] == ["a1", "a2"]
    assert record["auto"] is True


def test_differing_ratings_mark_the_item_disputed(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1", "a2"])
    store.record_rating("a1", "i000", {"G": 4, "R": 4, "M": 4, "S": 3})
    store.record_rating("a2", "i000", {"G": 4, "R": 4, "M": 4, "S": 1})
    assert store.item_status("i000") == "disputed"
    assert "i000" not in store.consensus_records()


def test_ratings_freeze_once_consensus_exists(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1", "a2"])
    store.record_rating("a1", "i000", FULL)
    store.record_rating("a2", "i000", dict(FULL))
    assert store.item_status("i000") == "consensus"

    # identical resubmission is a harmless no-op
    result = store.record_rating("a1", "i000", dict(FULL))
    assert result["status"] == "consensus"
    with pytest.raises(ConflictError, match="frozen"):
        store.record_rating("a1", "i000", {"G": 1, "R": 4, "M": 4, "S": 3})


def test_explicit_consensus_resolves_a_dispute(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1", "a2"])
    store.record_rating("a1", "i000", {"G": 4, "R": 4, "M": 4, "S": 3})
    store.record_rating("a2", "i000", {"G": 4, "R": 4, "M": 4, "S": 1})

    result = store.record_consensus(
        "i000", {"G": 4, "R": 4, "M": 4, "S": 2}, resolved_by=["a2", "a1"]
    )
    assert result["status"] == "consensus"
    record = store.consensus_records()["i000"]
    assert record["scores"]["S"] == 2
    assert record["resolved_by"] == ["a1", "a2"]
    assert record["auto"] is False


def test_consensus_preconditions_and_conflicts(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(2), ["a1", "a2"])
    store.record_rating("a1", "i000", {"G": 4, "R": 4, "M": 4, "S": 3})

    with pytest.raises(NotFoundError, match="unknown item"):
        store.record_consensus("nope", FULL, resolved_by=["a1"])
    with pytest.raises(InputError, match="waiting on: a2"):
        store.record_consensus("i000", FULL, resolved_by=["a1", "a2"])
    with pytest.raises(InputError, match="unassigned annotators: ghost"):
        store.record_consensus("i000", FULL, resolved_by=["ghost"])
    with pytest.raises(InputError, match="at least one annotator"):
        store.record_consensus("i000", FULL, resolved_by=[])

    store.record_rating("a2", "i000", {"G": 4, "R": 4, "M": 4, "S": 1})
    view_offset = store.agreement()["as_of"]
    store.record_rating("a2", "i000", {"G": 4, "R": 4, "M": 4, "S": 0})
    with pytest.raises(ConflictError, match="changed after offset"):
        store.record_consensus("i000", FULL, resolved_by=["a1", "a2"], as_of=view_offset)

    fresh_offset = store.agreement()["as_of"]
    store.record_consensus(
        "i000", {"G": 4, "R": 4, "M": 4, "S": 2}, resolved_by=["a1", "a2"],
        as_of=fresh_offset,
    )
    # identical repeat is idempotent, different scores are a conflict
    store.record_consensus("i000", {"G": 4, "R": 4, "M": 4, "S": 2}, resolved_by=["a1"])
    with pytest.raises(ConflictError, match="different scores"):
        store.record_consensus("i000", {"G": 4, "R": 4, "M": 4, "S": 3}, resolved_by=["a1"])


# -------------------------------------------------------------- agreement


def test_agreement_all_identical(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(4), ["a1", "a2"])
    for item in store.items():
        store.record_rating("a1", item["item_id"], FULL)
        store.record_rating("a2", item["item_id"], dict(FULL))
    result = store.agreement()
    assert result["rates"] == {"G": 1.0, "R": 1.0, "M": 1.0, "S": 1.0}
    assert result["disagreements"] == []
    assert result["pending"] == 0
    assert result["kappa"]["G"] == 1.0


def test_agreement_three_of_ten_differ_on_meaning(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(10), ["a1", "a2"])
    differ = {"i002", "i005", "i008"}
    for item in store.items():
        item_id = item["item_id"]
        store.record_rating("a1", item_id, {"G": 3, "R": 3, "M": 3, "S": 2})
        other_m = 1 if item_id in differ else 3
        store.record_rating("a2", item_id, {"G": 3, "R": 3, "M": other_m, "S": 2})

    result = store.agreement()
    assert result["rates"] == {"G": 1.0, "R": 1.0, "M": 0.7, "S": 1.0}
    assert [d["item_id"] for d in result["disagreements"]] == sorted(differ)
    for entry in result["disagreements"]:
        assert entry["criteria"] == ["M"]
        assert entry["ratings"]["a1"]["M"] == 3
        assert entry["ratings"]["a2"]["M"] == 1


def test_agreement_excludes_unrated_items_as_pending(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(3), ["a1", "a2"])
    store.record_rating("a1", "i000", FULL)
    store.record_rating("a2", "i000", dict(FULL))
    store.record_rating("a1", "i001", FULL)  # a2 still missing
    result = store.agreement()
    assert result["n_fully_rated"] == 1
    assert result["pending"] == 2
    assert result["rates"]["G"] == 1.0


def test_agreement_single_annotator_is_degenerate(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(2), ["solo"])
    store.record_rating("solo", "i000", FULL)
    store.record_rating("solo", "i001", {"G": 1, "R": 1, "M": 1, "S": 1})
    result = store.agreement()
    assert result["rates"] == {"G": 1.0, "R": 1.0, "M": 1.0, "S": 1.0}
    assert result["disagreements"] == []
    assert "single annotator" in result["warning"]
    assert result["kappa"] is None


def test_agreement_is_invariant_in_annotator_order(tmp_path):
    scores_first = {"G": 3, "R": 2, "M": 4, "S": 2}
    scores_second = {"G": 3, "R": 1, "M": 4, "S": 2}

    results = []
    for name, order in (("fwd.jsonl", ["a1", "a2"]), ("rev.jsonl", ["a2", "a1"])):
        store = EventStore(tmp_path / name)
        store.assign_items(make_items(2), order)
        for item_id in ("i000", "i001"):
            store.record_rating("a1", item_id, scores_first)
            store.record_rating("a2", item_id, scores_second)
        results.append(store.agreement())
    assert results[0]["rates"] == results[1]["rates"]
    assert results[0]["kappa"] == results[1]["kappa"]
    assert [d["item_id"] for d in results[0]["disagreements"]] == [
        d["item_id"] for d in results[1]["disagreements"]
    ]


def test_agreement_resolved_disputes_leave_the_list_but_not_the_rates(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(2), ["a1", "a2"])
    for item_id in ("i000", "i001"):
        store.record_rating("a1", item_id, {"G": 4, "R": 4, "M": 4, "S": 3})
        store.record_rating("a2", item_id, {"G": 4, "R": 4, "M": 4, "S": 1})
    before = store.agreement()
    assert before["rates"]["S"] == 0.0
    assert len(before["disagreements"]) == 2

    store.record_consensus("i000", {"G": 4, "R": 4, "M": 4, "S": 2},
                           resolved_by=["a1", "a2"], as_of=before["as_of"])
    after = store.agreement()
    assert after["rates"]["S"] == 0.0  # raw annotator agreement is history
    assert [d["item_id"] for d in after["disagreements"]] == ["i001"]


def test_cohen_kappa_hand_case(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(4), ["a1", "a2"])
    # G pairs (4,4), (4,4), (3,3), (4,3): observed 3/4, chance 1/2, kappa 1/2
    g_pairs = [(4, 4), (4, 4), (3, 3), (4, 3)]
    for (g_first, g_second), item in zip(g_pairs, store.items()):
        store.record_rating("a1", item["item_id"], {"G": g_first, "R": 2, "M": 2, "S": 2})
        store.record_rating("a2", item["item_id"], {"G": g_second, "R": 2, "M": 2, "S": 2})
    kappa = store.agreement()["kappa"]
    assert kappa["G"] == pytest.approx(0.5, abs=1e-12)
    assert kappa["R"] == 1.0  # single shared level: observed 1.0, chance 1.0


# ---------------------------------------------------------------- summary


def rate_item_identically(store, item_id, scores):
    for annotator in store.annotators():
        store.record_rating(annotator, item_id, dict(scores))


def test_summary_matches_hand_computed_means(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(50, system="neural-lm"), ["a1", "a2"])
    # engineered so the sums are G 173, R 163, M 162, S 108 over 50 items
    for index, item in enumerate(store.items()):
        scores = {
            "G": 4 if index < 23 else 3,
            "R": 4 if index < 13 else 3,
            "M": 4 if index < 12 else 3,
            "S": 3 if index < 8 else 2,
        }
        rate_item_identically(store, item["item_id"], scores)

    rows = store.consensus_summary()
    assert len(rows) == 1
    row = rows[0]
    assert row["system_name"] == "neural-lm"
    assert row["n_items"] == 50
    assert row["means"] == {"G": 3.46, "R": 3.26, "M": 3.24, "S": 2.16}
    assert row["overall"] == 3.03
    assert abs(row["overall"] - sum(row["means"].values()) / 4) < 0.005


def test_summary_trivial_and_symmetric_cases(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(2, system="only"), ["a1", "a2"])
    rate_item_identically(store, "i000", {"G": 4, "R": 4, "M": 4, "S": 4})
    rate_item_identically(store, "i001", {"G": 2, "R": 2, "M": 2, "S": 2})
    row = store.consensus_summary()[0]
    assert row["means"] == {"G": 3.0, "R": 3.0, "M": 3.0, "S": 3.0}
    assert row["overall"] == 3.0

    perfect = fresh_store(tmp_path, "perfect.jsonl")
    perfect.assign_items(make_items(1, system="only"), ["a1"])
    perfect.record_rating("a1", "i000", {"G": 4, "R": 4, "M": 4, "S": 4})
    row = perfect.consensus_summary()[0]
    assert row["means"] == {"G": 4.0, "R": 4.0, "M": 4.0, "S": 4.0}
    assert row["overall"] == 4.0


def test_summary_groups_by_system_and_skips_unresolved(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(
        make_items(2, system="sys-b", prefix="b") + make_items(2, system="sys-a", prefix="a"),
        ["a1", "a2"],
    )
    rate_item_identically(store, "b000", {"G": 4, "R": 4, "M": 4, "S": 4})
    rate_item_identically(store, "a000", {"G": 2, "R": 2, "M": 2, "S": 2})
    # a001/b001 stay pending: no consensus, so they contribute nothing
    rows = store.consensus_summary()
    assert [row["system_name"] for row in rows] == ["sys-a", "sys-b"]
    assert [row["n_items"] for row in rows] == [1, 1]
    assert rows[0]["overall"] == 2.0
    assert rows[1]["overall"] == 4.0


# ---------------------------------------------------------- event sourcing


def test_projection_survives_a_restart(tmp_path):
    path = tmp_path / "log.jsonl"
    store = EventStore(path)
    store.assign_items(make_items(3), ["a1", "a2"])
    store.record_rating("a1", "i000", FULL)
    store.record_rating("a2", "i000", dict(FULL))
    store.record_rating("a1", "i001", {"G": 4, "R": 4, "M": 4, "S": 3})
    store.record_rating("a2", "i001", {"G": 4, "R": 4, "M": 4, "S": 0})
    store.close()

    reopened = EventStore(path)
    assert reopened.offset == store.offset
    assert reopened.item_status("i000") == "consensus"
    assert reopened.item_status("i001") == "disputed"
    assert reopened.item_status("i002") == "pending"
    assert reopened.agreement() == store.agreement()
    assert reopened.consensus_summary() == store.consensus_summary()
    assert reopened.export_events() == store.export_events()


def test_missing_log_requires_create_flag(tmp_path):
    with pytest.raises(InputError, match="not found"):
        EventStore(tmp_path / "absent.jsonl", create=False)
    store = EventStore(tmp_path / "made.jsonl", create=True)
    assert store.offset == 0


def test_corrupt_log_line_is_reported_with_its_number(tmp_path):
    path = tmp_path / "log.jsonl"
    good = json.dumps({
        "type": "assign", "annotators": ["a1"],
        "items": [{"item_id": "x", "system_name": "s", "source": "a", "output": "b"}],
        "ts": "2026-01-01T00:00:00+00:00",
    })
    path.write_text(good + "\n" + "{broken\n", encoding="utf-8")
    with pytest.raises(InputError, match=r"log\.jsonl:2"):
        EventStore(path)
    path.write_text(good + "\n" + json.dumps({"type": "mystery"}) + "\n", encoding="utf-8")
    with pytest.raises(InputError, match=r"log\.jsonl:2"):
        EventStore(path)


def test_export_returns_the_full_event_log(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(1), ["a1", "a2"])
    store.record_rating("a1", "i000", FULL)
    exported = store.export_events()
    assert exported["offset"] == 2
    assert [event["type"] for event in exported["events"]] == ["assign", "rating"]
    assert exported["events"][1]["scores"] == FULL


# ----------------------------------------------------------- item listing


def test_item_listing_filters(tmp_path):
    store = fresh_store(tmp_path)
    store.assign_items(make_items(3), ["a1", "a2"])
    store.record_rating("a1", "i000", FULL)

    queue = store.items(annotator="a1", status="pending")
    assert [row["item_id"] for row in queue] == ["i001", "i002"]
    everything = store.items(annotator="a1")
    assert len(everything) == 3
    assert everything[0]["your_rating"] == FULL
    assert everything[1]["your_rating"] is None

    store.record_rating("a2", "i000", dict(FULL))
    assert [row["item_id"] for row in store.items(status="consensus")] == ["i000"]
    assert len(store.items(status="pending")) == 2
    with pytest.raises(InputError, match="status must be one of"):
        store.items(status="weird")
