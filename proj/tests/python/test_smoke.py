import pytest

import aa


def test_parse_message():
    parsed = aa.parse_message("shipping #aao0 from twitter")
    assert parsed["kind"] == "shout"
    assert parsed["ubiquitous"] is True
    assert [t["name"] for t in parsed["tags"]] == ["aao0"]
    assert aa.parse_message("stop wrapping up")["kind"] == "stop"
    assert aa.parse_message("test")["deviation"] is not None


def test_errors_surface_as_value_errors():
    with pytest.raises(aa.AAError):
        aa.parse_message("   ")
    with pytest.raises(ValueError):
        aa.normalize_nick("")


def test_slot_assignment():
    assert aa.assign_slot(0, 900) == (1, 0, True)
    assert aa.assign_slot(0, 900 + 360) == (1, 360, False)
    assert aa.assign_slot(0, 1350) == (2, -450, False)


def test_dedup_and_tokens():
    kept, discarded = aa.dedup(["a", "b", "a", "c "], {"c"})
    assert kept == ["a", "b"]
    assert discarded == 2
    assert aa.tokenize("Fixing the slot-grid timer", {"the"}) == ["fixing", "slot-grid", "timer"]
    assert aa.suffix_stem("coding") == aa.suffix_stem("coded") == "cod"


def test_store_round_trip(tmp_path):
    journal = tmp_path / "journal.jsonl"
    store = aa.Store(journal)
    assert store.shout("Bob", "writing docs #aa") == "sh-1"
    session = store.message("bob", "start")["session"]["id"]
    store.shout("bob", "more work")
    store.message("bob", "stop")
    store.shout("ana", "around")
    store.review(session, "ana", 0.75)

    listing = store.shouts()
    assert [s["nick"] for s in listing][:2] == ["bob", "bob"]
    assert "writing docs #aa" in store.shouts("text")
    assert store.violations() == []
    assert "<https://w3id.org/ontologiaa#Shout>" in store.ntriples()
    summary = store.summary()
    assert summary["sessions"] == 1
    assert summary["reviews"] == 1

    replayed = aa.Store(journal)
    assert replayed.shouts() == listing
    assert replayed.report(1)["latest"][0]["message"] == "around"
