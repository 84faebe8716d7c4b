"""Acceptance criteria, each run at its stated size and time limit.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines as
they happen; they are also repeated in the pytest terminal summary.  The file
also runs as a plain script.
"""
from __future__ import annotations

import io
import json
import random
import sys
import time
import tracemalloc
from collections import Counter
from contextlib import redirect_stdout
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import record  # noqa: E402
from corrupt import CASES  # noqa: E402
from datasets import random_chain, random_dataset  # noqa: E402
from randpatch import option_configs, random_population  # noqa: E402
from rdfpatch import (  # noqa: E402
    Add,
    BlankNode,
    Dataset,
    Delete,
    DefaultGraph,
    Iri,
    LiteralSimple,
    PatchDecoder,
    QuotedTriple,
    StreamOptions,
    apply,
    decode_patch,
    diff,
    encode_patch,
    parse_patch_text,
    rolling_diff,
    write_patch_text,
)
from rdfpatch.bench import run_bench  # noqa: E402
from rdfpatch.binary import DecodeError, LookupDecoder, LookupEncoder, iter_frames  # noqa: E402
from rdfpatch.cli import main as cli_main  # noqa: E402
from rdfpatch.workloads import generate_cdc, generate_iot  # noqa: E402

POPULATION_SEED = 20251015
OPS = 100_000


def _population():
    return random_population(POPULATION_SEED, 1000)


def _coverage(population) -> set[str]:
    seen = set()

    def walk(t):
        seen.add(type(t).__name__)
        if isinstance(t, QuotedTriple):
            seen.add("rdf-star")
            for x in (t.subject, t.predicate, t.object):
                walk(x)
        elif isinstance(t, (LiteralSimple,)) and any(ord(c) > 0x7F for c in t.lexical):
            seen.add("unicode")

    for p in population:
        for op in p:
            seen.add(type(op).__name__)
            if isinstance(op, (Add, Delete)):
                st = op.statement
                for t in (st.subject, st.predicate, st.object):
                    walk(t)
                if not isinstance(st.graph, DefaultGraph):
                    seen.add("quad")
                if not isinstance(st.subject, (Iri, BlankNode, QuotedTriple)) or not isinstance(st.predicate, Iri):
                    seen.add("generalized")
    return seen


def _bench_sizes(gen: str) -> dict:
    out = io.StringIO()
    with redirect_stdout(out):
        status = cli_main(["bench", "--gen", gen, "--ops", str(OPS), "--seed", "1", "--reps", "0",
                           "--formats", "text,binary", "--json"])
    assert status == 0
    doc = json.loads(out.getvalue())
    return {r["format"]: r for r in doc["results"]}


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_binary_round_trip():
    population = _population()
    needed = {"Add", "Delete", "TxBegin", "TxCommit", "TxAbort", "Header", "PrefixAdd", "PrefixDelete",
              "quad", "rdf-star", "generalized", "unicode"}
    assert needed <= _coverage(population)
    configs = option_configs(POPULATION_SEED, 20)
    assert len(set(configs)) == 20
    assert any(c.prefix_table_capacity == 0 and c.name_table_capacity == 8 and c.frame_row_limit == 1
               for c in configs)
    t0 = time.perf_counter()
    failures = 0
    for opts in configs:
        for p in population:
            if decode_patch(encode_patch(p, opts)) != p:
                failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    record(1, "binary round trip", ok, f"{len(population)} patches x {len(configs)} configs, "
           f"{failures} mismatches, {elapsed:.1f}s < 60s")
    assert ok


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_text_round_trip():
    population = _population()
    t0 = time.perf_counter()
    failures = sum(parse_patch_text(write_patch_text(p)) != p for p in population)
    first = [write_patch_text(p).encode("utf-8") for p in population]
    second = [write_patch_text(p).encode("utf-8") for p in _population()]
    elapsed = time.perf_counter() - t0
    deterministic = first == second
    ok = failures == 0 and deterministic and elapsed < 30
    record(2, "text round trip", ok, f"{failures} mismatches, deterministic={deterministic}, {elapsed:.1f}s < 30s")
    assert ok


# -- 3 ------------------------------------------------------------------------

class _LruSimulation:
    def __init__(self, capacity):
        self.capacity = capacity
        self.order: list[str] = []
        self.evictions = 0

    def touch(self, value):
        if value in self.order:
            self.order.remove(value)
        else:
            if len(self.order) == self.capacity:
                self.order.pop(0)
                self.evictions += 1
        self.order.append(value)


def _lookup_sequence(rng: random.Random, capacity: int) -> list[str]:
    if capacity == 4000 and rng.random() < 0.001:
        # rare long run that actually wraps the big table
        return [str(rng.randrange(6000)) for _ in range(12_000)]
    pool = rng.choice([capacity + 1, 2 * capacity + 3, 40])
    return [str(rng.randrange(pool)) for _ in range(rng.randint(1, 60))]


def _check_lookup_sequence(capacity: int, values: list[str]) -> bool:
    enc = LookupEncoder(capacity)
    dec = LookupDecoder(capacity)
    reference: dict[int, str] = {}
    last = 0
    sim = _LruSimulation(capacity)
    for v in values:
        got_id, entry = enc.get_or_assign(v)
        sim.touch(v)
        if entry is not None:
            dec.apply(*entry)
            last = last + 1 if entry.id_field == 0 else entry.id_field
            reference[last] = entry.value
            if dec.values[last] != reference[last]:
                return False
        if reference.get(got_id) != v or dec.get(got_id) != v:
            return False
        if dec.entries - dec.evictions != len(reference):
            return False
    return dec.snapshot() == reference and enc.evictions == sim.evictions == dec.evictions


def test_criterion_3_lookup_oracle():
    rng = random.Random(POPULATION_SEED)
    t0 = time.perf_counter()
    bad = 0
    evictions = 0
    for i in range(10_000):
        cap = (1, 2, 8, 4000)[i % 4]
        seq = _lookup_sequence(rng, cap)
        if not _check_lookup_sequence(cap, seq):
            bad += 1
    # one guaranteed long sequence over the large table
    long_seq = [str(rng.randrange(6000)) for _ in range(12_000)]
    if not _check_lookup_sequence(4000, long_seq):
        bad += 1
    enc = LookupEncoder(4000)
    for v in long_seq:
        enc.get_or_assign(v)
    evictions = enc.evictions
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and evictions > 0 and elapsed < 30
    record(3, "lookup table oracle", ok, f"10,000 sequences over capacities 1/2/8/4000, {bad} divergent, "
           f"{elapsed:.1f}s < 30s")
    assert ok


# -- 4 ------------------------------------------------------------------------

def _double_loop(before: Dataset, after: Dataset) -> Counter:
    b, a = list(before), list(after)
    removed = [x for x in b if not any(x == y for y in a)]
    added = [y for y in a if not any(y == x for x in b)]
    return Counter(Delete(x) for x in removed) + Counter(Add(y) for y in added)


def test_criterion_4_diff_apply_laws():
    rng = random.Random(POPULATION_SEED)
    t0 = time.perf_counter()
    bad_pairs = 0
    for _ in range(500):
        a, b = random_dataset(rng, 200), random_dataset(rng, 200)
        patch = diff(a, b)
        body = [op for op in patch if isinstance(op, (Add, Delete))]
        if apply(a, patch) != b or Counter(body) != _double_loop(a, b):
            bad_pairs += 1
    bad_chains = 0
    for _ in range(50):
        chain = random_chain(rng, rng.randint(1, 12))
        d = Dataset()
        for patch, snap in zip(rolling_diff(chain), chain):
            d = apply(d, patch)
            if d != snap:
                bad_chains += 1
                break
    elapsed = time.perf_counter() - t0
    ok = bad_pairs == 0 and bad_chains == 0 and elapsed < 60
    record(4, "diff/apply laws", ok, f"500 pairs ({bad_pairs} bad), 50 chains ({bad_chains} bad), "
           f"{elapsed:.1f}s < 60s")
    assert ok


# -- 5, 6 -----------------------------------------------------------------------

@pytest.mark.parametrize("number, gen, bound", [(5, "iot", 25.0), (6, "cdc", 50.0)])
def test_criteria_5_6_compression(number, gen, bound):
    t0 = time.perf_counter()
    sizes = _bench_sizes(gen)
    elapsed = time.perf_counter() - t0
    pct = sizes["binary"]["size_pct"]
    ok = pct <= bound and elapsed < 120
    record(number, f"compression, {gen} profile", ok,
           f"binary {sizes['binary']['size_bytes']:,} B = {pct:.1f}% of text {sizes['text']['size_bytes']:,} B "
           f"(<= {bound:.0f}%, {100 / pct:.1f}x), {elapsed:.1f}s < 120s")
    assert ok


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_throughput():
    ops = generate_iot(OPS, seed=1)
    report = run_bench(ops, ("text", "binary"), reps=7, warmups=3,
                       config={"gen": "iot", "ops": OPS, "seed": 1})
    text = report.result("text").deserialize
    binary = report.result("binary").deserialize
    speedup = binary.ops_per_sec / text.ops_per_sec
    ok = speedup >= 1.5
    record(7, "deserialization throughput, iot profile", ok,
           f"binary {binary.ops_per_sec:,.0f} ± {binary.ci95:,.0f} ops/s vs text {text.ops_per_sec:,.0f} "
           f"± {text.ci95:,.0f} ops/s, {speedup:.2f}x >= 1.5x, 7 reps after 3 warmups")
    assert ok


# -- 8 ------------------------------------------------------------------------

class _Count:
    def __init__(self):
        self.n = 0

    def __call__(self, op):
        self.n += 1


def _peak_feed(data: bytes) -> tuple[int, int]:
    """Peak traced bytes while feeding ``data`` frame by frame to a counting handler."""
    starts = [off - len(_header(len(body))) for off, body in iter_frames(data)] + [len(data)]
    handler = _Count()
    dec = PatchDecoder()
    tracemalloc.start()
    tracemalloc.reset_peak()
    base = tracemalloc.get_traced_memory()[0]
    dec.feed(data[:starts[0]])
    for start, end in zip(starts, starts[1:]):
        dec.feed(data[start:end], handler)
    peak = tracemalloc.get_traced_memory()[1] - base
    tracemalloc.stop()
    dec.finish()
    return peak, handler.n


def test_criterion_8_streaming():
    t0 = time.perf_counter()
    opts = StreamOptions(name_table_capacity=256, prefix_table_capacity=64, frame_row_limit=128)
    ops = generate_cdc(10_000, seed=2)[:10_000]
    data = encode_patch(ops, opts)
    whole = decode_patch(data)

    # frame by frame, one feed() per frame, checking retained state after each call
    frames = list(iter_frames(data))
    max_frame = max(len(body) for _, body in frames) + 5
    dec = PatchDecoder()
    streamed = dec.feed(data[:4])
    state_ok = True
    for off, body in frames:
        start = off - len(_header(len(body)))
        streamed += dec.feed(data[start:off + len(body)])
        st = dec.retained_state()
        state_ok &= st["buffered_bytes"] <= max_frame
        state_ok &= st["table_slots"] == 256 + 64 + 32 + 3
        state_ok &= st["iri_cache"] <= 4 * 256
        state_ok &= st["table_bytes"] <= sum(len(v.encode()) for v in _all_entry_values(data))
    dec.finish()

    # arbitrary split points, including mid-varint and mid-row
    rng = random.Random(8)
    dec2 = PatchDecoder()
    chunked = []
    pos = 0
    while pos < len(data):
        step = rng.choice([1, 2, 3, 17, 400, 5000])
        chunked += dec2.feed(data[pos:pos + step])
        pos += step
        state_ok &= dec2.retained_state()["buffered_bytes"] <= max_frame + 5000
    dec2.finish()

    # peak memory must not grow with stream length
    longer = encode_patch(generate_cdc(40_000, seed=2)[:40_000], opts)
    peak_short, n_short = _peak_feed(data)
    peak_long, n_long = _peak_feed(longer)
    bounded = peak_long < 1.5 * peak_short + 256 * 1024
    elapsed = time.perf_counter() - t0
    equal = whole == ops and streamed == ops and chunked == ops and n_short == len(ops)
    ok = equal and state_ok and bounded and elapsed < 30
    record(8, "streaming decode", ok,
           f"{len(frames)} frames fed separately, equal={equal}, retained state bounded={state_ok}, "
           f"peak {peak_short / 1024:.0f} KiB for 10k ops vs {peak_long / 1024:.0f} KiB for 40k ops, "
           f"{elapsed:.1f}s < 30s")
    assert ok


def _header(n: int) -> bytes:
    out = bytearray()
    while n >= 0x80:
        out.append(n & 0x7F | 0x80)
        n >>= 7
    out.append(n)
    return bytes(out)


def _all_entry_values(data: bytes) -> list[str]:
    """Distinct lookup entry values in the stream, by replaying with a fresh decoder."""
    seen = {}
    dec = PatchDecoder()
    for off, body in iter_frames(data):
        dec.decode_frame(body, lambda op: None, offset=off)
        for t in (dec.names, dec.prefixes, dec.datatypes):
            for v in t.values:
                if v is not None:
                    seen[v] = None
    return list(seen)


# -- 9 ------------------------------------------------------------------------

def test_criterion_9_malformed_inputs():
    wrong = []
    for name, data, error in CASES:
        for mode in ("whole", "fed"):
            try:
                if mode == "whole":
                    decode_patch(data)
                else:
                    dec = PatchDecoder()
                    for i in range(0, len(data), 3):
                        dec.feed(data[i:i + 3])
                    dec.finish()
            except error as exc:
                if not isinstance(exc, DecodeError):
                    wrong.append(f"{name}/{mode}: not a decode error")
            except Exception as exc:  # anything else is a crash
                wrong.append(f"{name}/{mode}: {type(exc).__name__}: {exc}")
            else:
                wrong.append(f"{name}/{mode}: no error")
    ok = len(CASES) == 20 and not wrong
    record(9, "malformed inputs", ok, f"{len(CASES)} corrupt streams, "
           + ("all raise their designated error" if not wrong else "; ".join(wrong)))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
