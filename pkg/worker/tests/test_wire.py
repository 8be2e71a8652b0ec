"""Codec checks: encode/decode are exact inverses and reject malformed lines."""

from __future__ import annotations

import random
import string

import pytest

from cwm_worker.wire import (
    ERROR_CLASSES,
    OPS,
    WireError,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
    trace_excerpt,
)


def _random_scalar(rng: random.Random):
    kind = rng.randrange(5)
    if kind == 0:
        return rng.randint(-(10**9), 10**9)
    if kind == 1:
        # Finite doubles only: JSON has no representation for inf/nan.
        return rng.uniform(-1e6, 1e6)
    if kind == 2:
        return "".join(rng.choices(string.printable, k=rng.randrange(12)))
    if kind == 3:
        return rng.random() < 0.5
    return None


def _random_value(rng: random.Random, depth: int = 0):
    if depth < 3 and rng.random() < 0.35:
        if rng.random() < 0.5:
            return [_random_value(rng, depth + 1) for _ in range(rng.randrange(4))]
        return {
            "".join(rng.choices(string.ascii_lowercase, k=rng.randrange(1, 6))): _random_value(rng, depth + 1)
            for _ in range(rng.randrange(4))
        }
    return _random_scalar(rng)


def _random_args(rng: random.Random) -> dict:
    return {
        "".join(rng.choices(string.ascii_lowercase, k=rng.randrange(1, 8))): _random_value(rng)
        for _ in range(rng.randrange(5))
    }


class TestRoundTrips:
    def test_ten_thousand_randomized_round_trips(self):
        rng = random.Random(9090)
        for i in range(10_000):
            mode = i % 3
            if mode == 0:
                op = rng.choice(OPS)
                args = _random_args(rng)
                decoded = decode_request(encode_request(i, op, args))
                assert decoded == {"id": i, "op": op, "args": args}
            elif mode == 1:
                result = _random_args(rng)
                decoded = decode_response(encode_response(i, result=result))
                assert decoded == {"id": i, "ok": True, "result": result}
            else:
                error = {
                    "class": rng.choice(ERROR_CLASSES),
                    "message": "".join(rng.choices(string.printable, k=rng.randrange(40))),
                    "trace": "".join(rng.choices(string.printable, k=rng.randrange(40))),
                }
                decoded = decode_response(encode_response(i, error=error))
                assert decoded == {"id": i, "ok": False, "error": error}


class TestRejections:
    def test_unknown_op_refused_on_encode(self):
        with pytest.raises(WireError, match="unknown op"):
            encode_request(1, "teleport", {})

    @pytest.mark.parametrize(
        "line,reason",
        [
            ("not json", "not valid JSON"),
            ("42", "must be a JSON object"),
            ('{"id": true, "op": "load", "args": {}}', "'id' must be an integer"),
            ('{"id": 1, "op": "teleport", "args": {}}', "'op' must be one of"),
            ('{"id": 1, "op": "load", "args": []}', "'args' must be an object"),
        ],
    )
    def test_malformed_requests(self, line, reason):
        with pytest.raises(WireError, match=reason):
            decode_request(line)

    @pytest.mark.parametrize(
        "line,reason",
        [
            ("{", "not valid JSON"),
            ('{"id": 1, "ok": "yes", "result": {}}', "'ok' must be a boolean"),
            ('{"id": 1, "ok": true, "result": 5}', "must carry an object 'result'"),
            ('{"id": 1, "ok": false, "error": null}', "must carry an object 'error'"),
            ('{"id": 1, "ok": false, "error": {"class": "weird"}}', "error class must be one of"),
        ],
    )
    def test_malformed_responses(self, line, reason):
        with pytest.raises(WireError, match=reason):
            decode_response(line)

    def test_response_needs_exactly_one_payload(self):
        with pytest.raises(WireError, match="exactly one"):
            encode_response(1)
        with pytest.raises(WireError, match="exactly one"):
            encode_response(1, result={}, error={"class": "runtime", "message": "", "trace": ""})


class TestTraceExcerpt:
    def test_keeps_only_the_tail(self):
        text = "\n".join(f"line {i}" for i in range(50))
        excerpt = trace_excerpt(text)
        assert excerpt.split("\n") == [f"line {i}" for i in range(30, 50)]

    def test_short_traces_untouched(self):
        assert trace_excerpt("one\ntwo") == "one\ntwo"
