import json
import threading

import pytest

from belnap.cache import CacheCorruptError, CacheEntry, ValuationCache, encode_record
from belnap.truth import GTV

g = GTV.from_code


def test_put_fresh_then_collision(tmp_path):
    c = ValuationCache(tmp_path / "c.jsonl")
    first = c.put("p(a)", CacheEntry(g("tf"), "v", "r"))
    assert first.stored and not first.collision
    second = c.put("p(a)", CacheEntry(g("ft")))
    assert second.collision and not second.stored
    assert second.entry.gtv == g("tf")
    assert c.get("p(a)").gtv == g("tf")
    assert len(c) == 1 and "p(a)" in c


def test_reload_reproduces_entries_byte_for_byte(tmp_path):
    path = tmp_path / "c.jsonl"
    c = ValuationCache(path)
    for i, code in enumerate(["tt", "ef", "ft"]):
        c.put(f"p(a{i})", CacheEntry(g(code), f"ver {i}", f"ref {i}", fingerprint="abc",
                                     meta={"elapsed": 1.5, "tokens": 7}))
    again = ValuationCache(path)
    lines = path.read_text().splitlines()
    assert [encode_record(k, e) for k, e in again.items()] == lines
    assert [k for k, _ in again.items()] == ["p(a0)", "p(a1)", "p(a2)"]


def test_dedup_enforced_after_reload(tmp_path):
    path = tmp_path / "c.jsonl"
    ValuationCache(path).put("p(a)", CacheEntry(g("tt")))
    c = ValuationCache(path)
    assert c.put("p(a)", CacheEntry(g("ff"))).collision
    assert len(path.read_text().splitlines()) == 1


def test_replay_keeps_earliest_of_conflicting_lines(tmp_path, caplog):
    path = tmp_path / "c.jsonl"
    a = CacheEntry(g("tf"), created_at="2024-01-01T00:00:00+00:00")
    b = CacheEntry(g("ft"), created_at="2024-01-02T00:00:00+00:00")
    path.write_text(encode_record("q(b)", a) + "\n" + encode_record("q(b)", b) + "\n")
    c = ValuationCache(path)
    assert c.get("q(b)").gtv == g("tf")
    assert "conflicting" in caplog.text


def test_corrupt_line_reports_line_number(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(encode_record("p(a)", CacheEntry(g("tt"))) + "\n{not json\n")
    with pytest.raises(CacheCorruptError, match=":2:"):
        ValuationCache(path)


def test_strict_mode_keys_by_fingerprint(tmp_path):
    c = ValuationCache(tmp_path / "c.jsonl", strict=True)
    k1, k2 = c.key_for("p(a)", "fp1"), c.key_for("p(a)", "fp2")
    assert k1 != k2
    c.put(k1, CacheEntry(g("tf"), fingerprint="fp1"))
    c.put(k2, CacheEntry(g("ft"), fingerprint="fp2"))
    assert c.get(k1).gtv != c.get(k2).gtv
    loose = ValuationCache(None)
    assert loose.key_for("p(a)", "fp1") == loose.key_for("p(a)", "fp2") == "p(a)"


def test_record_fields(tmp_path):
    path = tmp_path / "c.jsonl"
    ValuationCache(path).put("p(a)", CacheEntry(g("te"), "v", "r", fingerprint="ff00"))
    rec = json.loads(path.read_text())
    assert set(rec) >= {"key", "gtv", "verification_transcript", "refutation_transcript",
                        "created_at", "fingerprint"}
    assert rec["gtv"] == "te" and rec["created_at"].endswith("+00:00")


def test_concurrent_puts_store_exactly_one(tmp_path):
    path = tmp_path / "c.jsonl"
    c = ValuationCache(path)
    results = []
    barrier = threading.Barrier(8)

    def worker(i):
        barrier.wait()
        results.append(c.put("p(a)", CacheEntry(GTV.from_index(i))).entry.gtv)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 1
    assert len(path.read_text().splitlines()) == 1
