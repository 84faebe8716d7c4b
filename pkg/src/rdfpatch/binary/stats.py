"""Per-stream counts in the style of a dataset summary table."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional

from ..model import Add, Delete, Header, PatchOp, PrefixAdd, PrefixDelete, TxAbort, TxBegin, TxCommit
from .decoder import PatchDecoder, Source, decode_patch_stream


@dataclass
class StatsReport:
    patches: int = 0
    operations: int = 0
    adds: int = 0
    deletes: int = 0
    prefix_ops: int = 0
    headers: int = 0
    tx_begins: int = 0
    tx_commits: int = 0
    tx_aborts: int = 0
    bytes: int = 0
    bytes_per_op: float = 0.0
    frames: int = 0
    entry_rows: int = 0
    evictions: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def render_kv(self) -> str:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(f"{f.name}={v:.3f}" if isinstance(v, float) else f"{f.name}={v}")
        return "\n".join(out) + "\n"

    def render_table(self) -> str:
        rows = [(f.name.replace("_", " "), getattr(self, f.name)) for f in fields(self)]
        width = max(len(k) for k, _ in rows)
        lines = []
        for k, v in rows:
            cell = f"{v:,.2f}" if isinstance(v, float) else f"{v:,}"
            lines.append(f"{k:<{width}}  {cell:>14}")
        return "\n".join(lines) + "\n"


class StatsCollector:
    """Op handler that tallies a :class:`StatsReport`."""

    def __init__(self) -> None:
        self.report = StatsReport()

    def __call__(self, op: PatchOp) -> None:
        r = self.report
        r.operations += 1
        cls = op.__class__
        if cls is Add:
            r.adds += 1
        elif cls is Delete:
            r.deletes += 1
        elif cls is TxBegin:
            r.tx_begins += 1
        elif cls is TxCommit:
            r.tx_commits += 1
        elif cls is TxAbort:
            r.tx_aborts += 1
        elif cls is PrefixAdd or cls is PrefixDelete:
            r.prefix_ops += 1
        elif cls is Header:
            r.headers += 1

    def finish(self, nbytes: int, decoder: Optional[PatchDecoder] = None) -> StatsReport:
        r = self.report
        # a stream without transaction markers is one patch
        r.patches = r.tx_begins if r.tx_begins else (1 if r.operations else 0)
        r.bytes = nbytes
        r.bytes_per_op = nbytes / r.operations if r.operations else 0.0
        if decoder is not None:
            tables = [t for t in (decoder.names, decoder.prefixes, decoder.datatypes) if t is not None]
            r.frames = decoder.frames
            r.entry_rows = sum(t.entries for t in tables)
            r.evictions = sum(t.evictions for t in tables)
        return r


def stream_stats(source: Source) -> StatsReport:
    if isinstance(source, (bytes, bytearray, memoryview)):
        nbytes = len(source)
        counted = source
    else:
        counted = _CountingReader(source)
    collector = StatsCollector()
    dec = PatchDecoder()
    decode_patch_stream(counted, collector, dec)
    if not isinstance(source, (bytes, bytearray, memoryview)):
        nbytes = counted.count
    return collector.finish(nbytes, dec)


class _CountingReader:
    def __init__(self, raw) -> None:
        self.raw = raw
        self.count = 0

    def read(self, n: int = -1) -> bytes:
        b = self.raw.read(n)
        self.count += len(b)
        return b
