"""Command-line entry point.

Exit codes: 0 success, 1 format error, 2 I/O error, 3 patch conflict.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import sys
from typing import BinaryIO, Iterator, Optional, TextIO

from . import bench as benchmod
from .binary import (
    MAGIC,
    PatchDecoder,
    PatchEncoder,
    StatsCollector,
    StreamError,
    StreamOptions,
    decode_patch_stream,
    iter_patch_stream,
)
from .diff import PatchConflictError, apply, diff
from .model import Add, Delete, PatchOp, TermError, check_statement
from .text import (
    PatchSyntaxError,
    SparqlUpdateWriter,
    TextPatchWriter,
    UnsupportedStatementError,
    iter_patch_text,
    parse_nquads,
    write_nquads,
)
from .workloads import GENERATORS

EXIT_OK = 0
EXIT_FORMAT = 1
EXIT_IO = 2
EXIT_CONFLICT = 3

FORMAT_ERRORS = (PatchSyntaxError, StreamError, TermError, UnsupportedStatementError, ValueError)


class CliError(Exception):
    def __init__(self, message: str, status: int) -> None:
        super().__init__(message)
        self.status = status


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


@contextlib.contextmanager
def _open_binary_in(path: str) -> Iterator[BinaryIO]:
    if path == "-":
        yield sys.stdin.buffer
        return
    try:
        f = open(path, "rb")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    with f:
        yield f


@contextlib.contextmanager
def _open_binary_out(path: str) -> Iterator[BinaryIO]:
    if path == "-":
        yield sys.stdout.buffer
        sys.stdout.buffer.flush()
        return
    try:
        f = open(path, "wb")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None
    with f:
        yield f


class _BorrowedText(io.TextIOWrapper):
    """Text layer that leaves the underlying byte stream open."""

    def close(self) -> None:
        with contextlib.suppress(ValueError):
            self.flush()
            self.detach()


def _text_in(raw: BinaryIO) -> TextIO:
    return _BorrowedText(raw, encoding="utf-8", newline="\n")


@contextlib.contextmanager
def _text_out(raw: BinaryIO) -> Iterator[TextIO]:
    w = _BorrowedText(raw, encoding="utf-8", newline="\n")
    try:
        yield w
    finally:
        w.close()


def _detect(raw: BinaryIO, declared: Optional[str]) -> str:
    if declared:
        return declared
    head = raw.peek(len(MAGIC))[:len(MAGIC)] if hasattr(raw, "peek") else b""
    return "binary" if head == MAGIC else "text"


def _read_ops(raw: BinaryIO, fmt: str, lenient: bool = False) -> Iterator[PatchOp]:
    if fmt == "binary":
        return iter_patch_stream(raw)
    return iter_patch_text(_text_in(raw), lenient=lenient)


def _options(args: argparse.Namespace) -> StreamOptions:
    d = StreamOptions()
    try:
        return StreamOptions(
            name_table_capacity=args.name_table if args.name_table is not None else d.name_table_capacity,
            prefix_table_capacity=args.prefix_table if args.prefix_table is not None else d.prefix_table_capacity,
            datatype_table_capacity=args.dt_table if args.dt_table is not None else d.datatype_table_capacity,
            frame_row_limit=args.frame if args.frame is not None else d.frame_row_limit,
        )
    except ValueError as exc:
        raise CliError(f"invalid stream options: {exc}", EXIT_FORMAT) from None


def _write_ops(ops, out_path: str, fmt: str, options: StreamOptions, strict: bool = False) -> int:
    count = 0
    with _open_binary_out(out_path) as raw:
        if fmt == "binary":
            writer = PatchEncoder(raw, options)
            for op in ops:
                if strict:
                    _strict_check(op, count)
                writer.write(op)
                count += 1
            writer.close()
            return count
        with _text_out(raw) as text:
            w = SparqlUpdateWriter(text) if fmt == "sparql-update" else TextPatchWriter(text)
            for op in ops:
                if strict:
                    _strict_check(op, count)
                w.write(op)
                count += 1
            w.close()
    return count


def _strict_check(op: PatchOp, index: int) -> None:
    if op.__class__ is Add or op.__class__ is Delete:
        try:
            check_statement(op.statement, strict=True)
        except TermError as exc:
            raise TermError(f"op {index}: {exc}") from None


def _table_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--name-table", type=int, metavar="N", help="name table capacity (default 4000)")
    p.add_argument("--prefix-table", type=int, metavar="N", help="prefix table capacity (default 1024)")
    p.add_argument("--dt-table", type=int, metavar="N", help="datatype table capacity (default 32)")
    p.add_argument("--frame", type=int, metavar="N", help="rows per frame (default 512)")


# -- commands -----------------------------------------------------------------

def cmd_convert(args: argparse.Namespace) -> int:
    options = _options(args)
    with _open_binary_in(args.input) as raw:
        fmt = _detect(raw, args.from_)
        n = _write_ops(_read_ops(raw, fmt, args.lenient), args.output, args.to, options, args.strict)
    _err(f"converted {n} ops ({fmt} -> {args.to})")
    return EXIT_OK


def _load_dataset(path: str):
    with _open_binary_in(path) as raw:
        return parse_nquads(_text_in(raw))


def cmd_diff(args: argparse.Namespace) -> int:
    before = _load_dataset(args.before)
    after = _load_dataset(args.after)
    ops = diff(before, after)
    n = _write_ops(ops, args.output, args.to, _options(args))
    _err(f"wrote {n} ops")
    return EXIT_OK


def cmd_apply(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.dataset)
    with _open_binary_in(args.patch) as raw:
        fmt = _detect(raw, args.format)
        ops = list(_read_ops(raw, fmt))
    try:
        result = apply(dataset, ops, strict=args.strict)
    except PatchConflictError as exc:
        _err("conflicts at op indices: " + " ".join(str(c.index) for c in exc.conflicts))
        raise CliError(str(exc), EXIT_CONFLICT) from None
    with _open_binary_out(args.output) as out, _text_out(out) as text:
        write_nquads(result, text)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    collector = StatsCollector()
    with _open_binary_in(args.patch) as raw:
        fmt = _detect(raw, args.format)
        counter = _CountingReader(raw)
        if fmt == "binary":
            dec = PatchDecoder()
            decode_patch_stream(counter, collector, dec)
            report = collector.finish(counter.count, dec)
        else:
            for op in iter_patch_text(_text_in(io.BufferedReader(counter))):
                collector(op)
            report = collector.finish(counter.count)
    print(report.render_kv() if args.kv else report.render_table(), end="")
    return EXIT_OK


class _CountingReader(io.RawIOBase):
    def __init__(self, raw: BinaryIO) -> None:
        self.raw = raw
        self.count = 0

    def readable(self) -> bool:
        return True

    def readinto(self, b) -> int:
        data = self.raw.read(len(b))
        n = len(data)
        b[:n] = data
        self.count += n
        return n

    def read(self, n: int = -1) -> bytes:
        data = self.raw.read(n)
        self.count += len(data)
        return data


def cmd_bench(args: argparse.Namespace) -> int:
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    for f in formats:
        if f not in benchmod.FORMATS:
            raise CliError(f"unknown format {f!r}; choose from {', '.join(benchmod.FORMATS)}", EXIT_FORMAT)
    if args.input:
        with _open_binary_in(args.input) as raw:
            fmt = _detect(raw, args.format)
            ops = list(_read_ops(raw, fmt))
        source = {"input": args.input}
    else:
        ops = GENERATORS[args.gen](args.ops, seed=args.seed)
        source = {"gen": args.gen, "ops": args.ops, "seed": args.seed}
    report = benchmod.run_bench(ops, formats, reps=args.reps, warmups=args.warmups,
                                options=_options(args), isolate=args.isolate, config=source)
    print(report.to_json() if args.json else report.render_table(), end="" if not args.json else "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdfpatch", description="RDF Patch text/binary tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert between patch formats")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--from", dest="from_", choices=("text", "binary"), help="input format (default: sniff)")
    p.add_argument("--to", required=True, choices=("text", "binary", "sparql-update"))
    p.add_argument("--strict", action="store_true", help="reject generalized RDF statements")
    p.add_argument("--lenient", action="store_true", help="skip malformed text rows")
    _table_args(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("diff", help="patch turning one N-Quads file into another")
    p.add_argument("before")
    p.add_argument("after")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--to", default="text", choices=("text", "binary", "sparql-update"))
    _table_args(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("apply", help="apply a patch to an N-Quads dataset")
    p.add_argument("dataset")
    p.add_argument("patch")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--format", choices=("text", "binary"))
    p.add_argument("--strict", action="store_true", help="fail on redundant adds and deletes")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("stats", help="count patches and operations")
    p.add_argument("patch", nargs="?", default="-")
    p.add_argument("--format", choices=("text", "binary"))
    p.add_argument("--kv", action="store_true", help="key=value output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="size and throughput benchmark")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATCH")
    src.add_argument("--gen", choices=sorted(GENERATORS))
    p.add_argument("--format", choices=("text", "binary"), help="format of --input")
    p.add_argument("--ops", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--formats", default=",".join(benchmod.FORMATS))
    p.add_argument("--reps", type=int, default=benchmod.MIN_REPS, help="0 reports sizes only")
    p.add_argument("--warmups", type=int, default=benchmod.MIN_WARMUPS)
    p.add_argument("--isolate", action="store_true", help="run every repetition in a forked process")
    p.add_argument("--json", action="store_true")
    _table_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _err(f"error: {exc}")
        return exc.status
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO
    except FORMAT_ERRORS as exc:
        _err(f"error: {exc}")
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
