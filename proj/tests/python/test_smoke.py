import pytest

import cdsh


def test_sizes():
    s = cdsh.account_sizes()
    assert s["upload_phase"] == 2624
    assert s["request_phase"] == 1856
    assert s["transfer_response"] == 800
    assert cdsh.account_sizes("toy")["transfer_response"] == 800


def test_happy_path_and_trace():
    w = cdsh.make_world(seed=5)
    producer = w.domains()[0]["devices"][0]
    out = w.happy_path()
    assert out["recovered"]
    assert out["m"] == b"temperature=21.5C"
    assert w.trace(out["producer_pid"]) == w.did(producer)
    assert w.scan_for_secrets() == 0
    assert w.replicas_consistent()


def test_upload_request_and_revocation():
    w = cdsh.make_world(seed=6)
    producer = w.domains()[0]["devices"][1]
    requester = w.domains()[1]["devices"][0]
    w.grant(requester, "hum")
    up = w.upload(producer, b"\x00\x01payload", "hum")
    assert up["stored"] and up["error"] is None
    got = w.request(requester, "hum")
    assert got["m"] == b"\x00\x01payload"

    assert w.report(requester, up["pid"]) == w.did(producer)
    again = w.upload(producer, b"x", "hum")
    assert not again["stored"]
    assert again["error"] == "device revoked"


def test_replay_and_bitflip_rejected():
    w = cdsh.make_world(seed=7, delta=30)
    dev = w.domains()[0]["devices"][0]
    es = w.domains()[0]["es_ids"][0]
    up = w.upload(dev, b"abc", "t")
    w.advance(60)
    assert w.receive_upload_bytes(es, up["wire"])["error"] == "stale timestamp"

    fresh = w.upload(dev, b"abc", "t")
    flipped = bytearray(fresh["wire"])
    flipped[-5] ^= 0x01
    try:
        res = w.receive_upload_bytes(es, bytes(flipped))
    except cdsh.CdshError:
        return
    assert not res["stored"]


def test_adversary_reports_are_safe():
    w = cdsh.make_world(seed=8)
    for kind in ["replay", "tamper-bitflip", "impersonate-sd", "impersonate-es", "eavesdrop"]:
        rep = w.inject_adversary(kind, trials=10)
        assert rep["safe"], rep


def test_scenario_script_and_metrics():
    w = cdsh.make_world(seed=9)
    res = cdsh.run_script(w, [
        {"op": "grant", "device": "d1-sd0", "m_type": "temp"},
        {"op": "upload", "device": "d0-sd0", "m_type": "temp", "payload": "hi"},
        {"op": "request", "device": "d1-sd0", "m_type": "temp"},
    ])
    assert res["requests"][0]["m"] == b"hi"
    assert res["metrics"]["store.ok"] == 1
    assert w.metrics()["decrypt.ok"] >= 1


def test_ledger_tamper_detected():
    w = cdsh.make_world(seed=10)
    w.happy_path()
    replica = w.replica_ids()[-1]
    assert w.verify_chain(replica)
    w.tamper_ledger(replica, w.ledger_length() - 1, 3, 0x80)
    assert not w.verify_chain(replica)
    assert not w.replicas_consistent()


def test_determinism():
    a = cdsh.make_world(seed=11)
    b = cdsh.make_world(seed=11)
    a.happy_path()
    b.happy_path()
    assert a.state_digest() == b.state_digest()
    assert a.transcript_binary() == b.transcript_binary()


def test_errors_carry_codes():
    with pytest.raises(cdsh.CdshError) as e:
        cdsh.make_world(domains=0)
    assert e.value.code == "config error"
    with pytest.raises(cdsh.CdshError):
        cdsh.make_world().inject_adversary("ghost")


def test_bench_smoke():
    rows = cdsh.bench_ops(reps=20, warmup=2, x_samples=20)
    assert [r["op"] for r in rows] == ["T_a", "xT_a", "T_m", "T_sm", "T_h"]
    sweep = cdsh.bench_batch(ns=[1, 5, 10], trials=1)
    assert [p["n"] for p in sweep["points"]] == [1, 5, 10]
