"""Size and throughput benchmark over in-memory patch streams.

Serialization writes preloaded ops into a sink that only counts bytes.
Deserialization parses a preloaded byte buffer into a handler that folds
every op into a checksum.  Each repetition is one timed single-shot pass.
"""
from __future__ import annotations

import io
import json
import math
import multiprocessing
import os
import platform
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

from .binary import PatchEncoder, StreamOptions, decode_patch_stream
from .model import PatchOp
from .text import SparqlUpdateWriter, TextPatchWriter, UnsupportedStatementError, iter_patch_text

FORMATS = ("text", "binary", "sparql-update")
MIN_REPS = 7
MIN_WARMUPS = 3


class ByteCounter:
    """Binary blackhole sink."""

    def __init__(self) -> None:
        self.count = 0

    def write(self, data) -> int:
        n = len(data)
        self.count += n
        return n


class TextByteCounter:
    """Text blackhole sink; counts UTF-8 bytes."""

    def __init__(self) -> None:
        self.count = 0

    def write(self, s: str) -> int:
        self.count += len(s.encode("utf-8"))
        return len(s)


class ChecksumHandler:
    """Op consumer whose result depends on every op it sees."""

    def __init__(self) -> None:
        self.count = 0
        self.checksum = 0

    def __call__(self, op: PatchOp) -> None:
        self.count += 1
        self.checksum = (self.checksum * 31 + id(op.__class__)) & 0xFFFFFFFF


def serialize(fmt: str, ops: Sequence[PatchOp], options: Optional[StreamOptions] = None) -> int:
    """Write ``ops`` in ``fmt`` to a blackhole; returns the byte count."""
    if fmt == "binary":
        sink = ByteCounter()
        enc = PatchEncoder(sink, options)
        for op in ops:
            enc.write(op)
        enc.close()
        return sink.count
    if fmt == "text":
        tsink = TextByteCounter()
        w = TextPatchWriter(tsink)
        for op in ops:
            w.write(op)
        return tsink.count
    if fmt == "sparql-update":
        tsink = TextByteCounter()
        sw = SparqlUpdateWriter(tsink)
        for op in ops:
            sw.write(op)
        sw.close()
        return tsink.count
    raise ValueError(f"unknown format {fmt!r}")


def to_bytes(fmt: str, ops: Sequence[PatchOp], options: Optional[StreamOptions] = None) -> bytes:
    if fmt == "binary":
        buf = io.BytesIO()
        enc = PatchEncoder(buf, options)
        for op in ops:
            enc.write(op)
        enc.close()
        return buf.getvalue()
    if fmt == "text":
        out = io.StringIO()
        w = TextPatchWriter(out)
        for op in ops:
            w.write(op)
        return out.getvalue().encode("utf-8")
    raise ValueError(f"format {fmt!r} has no parser")


def deserialize(fmt: str, data: bytes) -> ChecksumHandler:
    h = ChecksumHandler()
    if fmt == "binary":
        decode_patch_stream(data, h)
    elif fmt == "text":
        for op in iter_patch_text(data.decode("utf-8")):
            h(op)
    else:
        raise ValueError(f"format {fmt!r} has no parser")
    return h


@dataclass
class Measurement:
    ops_per_sec: float
    ci95: float  # half-width, ops/s
    seconds: list[float] = field(default_factory=list)


@dataclass
class FormatResult:
    format: str
    size_bytes: Optional[int] = None
    size_pct: Optional[float] = None
    serialize: Optional[Measurement] = None
    deserialize: Optional[Measurement] = None
    error: Optional[str] = None


@dataclass
class BenchReport:
    operations: int
    baseline_bytes: int
    results: list[FormatResult]
    config: dict
    machine: dict

    def result(self, fmt: str) -> FormatResult:
        for r in self.results:
            if r.format == fmt:
                return r
        raise KeyError(fmt)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def render_table(self) -> str:
        head = f"{'format':<14} {'bytes':>14} {'% text':>8} {'ser ops/s':>22} {'des ops/s':>22}"
        lines = [f"operations: {self.operations:,}   text baseline: {self.baseline_bytes:,} bytes", head,
                 "-" * len(head)]

        def cell(m: Optional[Measurement]) -> str:
            return "-" if m is None else f"{m.ops_per_sec:,.0f} ± {m.ci95:,.0f}"

        for r in self.results:
            if r.error:
                lines.append(f"{r.format:<14} error: {r.error}")
                continue
            size = "-" if r.size_bytes is None else f"{r.size_bytes:,}"
            pct = "-" if r.size_pct is None else f"{r.size_pct:.1f}"
            lines.append(f"{r.format:<14} {size:>14} {pct:>8} {cell(r.serialize):>22} {cell(r.deserialize):>22}")
        lines.append("± is the 95% confidence half-width over "
                     f"{self.config.get('reps')} repetitions after {self.config.get('warmups')} warmups")
        return "\n".join(lines) + "\n"


def t_quantile_975(df: int) -> float:
    from scipy.stats import t

    return float(t.ppf(0.975, df))


def summarize(seconds: Sequence[float], ops: int) -> Measurement:
    rates = [ops / s for s in seconds]
    mean = statistics.fmean(rates)
    if len(rates) > 1:
        half = t_quantile_975(len(rates) - 1) * statistics.stdev(rates) / math.sqrt(len(rates))
    else:
        half = math.nan
    return Measurement(mean, half, list(seconds))


def _time_once(fn: Callable[[], object]) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _time_isolated(fn: Callable[[], object]) -> float:
    # fork so the child inherits the preloaded data without pickling it
    ctx = multiprocessing.get_context("fork")
    recv, send = ctx.Pipe(duplex=False)

    def child() -> None:
        send.send(_time_once(fn))
        send.close()

    proc = ctx.Process(target=child)
    proc.start()
    elapsed = recv.recv()
    proc.join()
    return elapsed


def measure(fn: Callable[[], object], reps: int, warmups: int, isolate: bool = False) -> list[float]:
    timer = _time_isolated if isolate else _time_once
    for _ in range(warmups):
        timer(fn)
    return [timer(fn) for _ in range(reps)]


def machine_info() -> dict:
    return {
        "python": sys.version.split()[0],
        "implementation": platform.python_implementation(),
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
        "cpu_count": os.cpu_count(),
    }


def run_bench(ops: Sequence[PatchOp], formats: Sequence[str] = FORMATS, *, reps: int = MIN_REPS,
              warmups: int = MIN_WARMUPS, options: Optional[StreamOptions] = None,
              isolate: bool = False, config: Optional[dict] = None) -> BenchReport:
    """Benchmark ``formats`` over ``ops``.

    ``reps=0`` reports sizes only.  Otherwise at least :data:`MIN_REPS`
    repetitions after :data:`MIN_WARMUPS` warmups are required so that the
    confidence interval means something.
    """
    for fmt in formats:
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")
    if reps and (reps < MIN_REPS or warmups < MIN_WARMUPS):
        raise ValueError(f"need at least {MIN_REPS} repetitions and {MIN_WARMUPS} warmups")
    ops = list(ops)
    n = len(ops)
    baseline = serialize("text", ops)
    results = []
    for fmt in formats:
        r = FormatResult(fmt)
        results.append(r)
        try:
            r.size_bytes = baseline if fmt == "text" else serialize(fmt, ops, options)
        except (UnsupportedStatementError, ValueError) as exc:
            r.error = str(exc)
            continue
        r.size_pct = 100.0 * r.size_bytes / baseline if baseline else 0.0
        if not reps:
            continue
        r.serialize = summarize(measure(lambda: serialize(fmt, ops, options), reps, warmups, isolate), n)
        if fmt != "sparql-update":
            data = to_bytes(fmt, ops, options)
            r.deserialize = summarize(measure(lambda: deserialize(fmt, data), reps, warmups, isolate), n)
    cfg = {"reps": reps, "warmups": warmups, "isolate": isolate, "formats": list(formats),
           "options": asdict(options or StreamOptions())}
    if config:
        cfg.update(config)
    return BenchReport(n, baseline, results, cfg, machine_info())
