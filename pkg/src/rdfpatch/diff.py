"""Dataset diffs and patch application."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .model import TX_BEGIN, TX_COMMIT, Add, Dataset, Delete, PatchOp, Statement
from .text import statement_sort_key


@dataclass(frozen=True)
class DiffOptions:
    emit_transaction: bool = True
    deletes_first: bool = True
    canonical_order: bool = True


@dataclass(frozen=True)
class Conflict:
    index: int
    reason: str  # "delete-absent" or "add-present"


class PatchConflictError(ValueError):
    def __init__(self, conflicts: Sequence[Conflict]) -> None:
        self.conflicts = list(conflicts)
        shown = ", ".join(f"{c.index} ({c.reason})" for c in self.conflicts[:20])
        more = "" if len(self.conflicts) <= 20 else f" and {len(self.conflicts) - 20} more"
        super().__init__(f"{len(self.conflicts)} conflicting ops: {shown}{more}")


def _ordered(statements: Iterable[Statement], canonical: bool) -> list[Statement]:
    if canonical:
        return sorted(statements, key=statement_sort_key)
    return list(statements)


def diff(before: Dataset, after: Dataset, opts: DiffOptions = DiffOptions()) -> list[PatchOp]:
    """Patch turning ``before`` into ``after``: exactly the removed and added statements."""
    deletes = [Delete(st) for st in _ordered(before - after, opts.canonical_order)]
    adds = [Add(st) for st in _ordered(after - before, opts.canonical_order)]
    body = deletes + adds if opts.deletes_first else adds + deletes
    if opts.emit_transaction:
        return [TX_BEGIN, *body, TX_COMMIT]
    return body


def apply(dataset: Dataset, patch: Iterable[PatchOp], *, strict: bool = False) -> Dataset:
    """Return a new dataset with ``patch`` applied; ``dataset`` is left untouched.

    Adds of present statements and deletes of absent ones are no-ops, unless
    ``strict`` is set, in which case they are collected and raised together
    as a :class:`PatchConflictError`.
    """
    out = dataset.copy()
    conflicts: list[Conflict] = []
    for i, op in enumerate(patch):
        cls = op.__class__
        if cls is Add:
            if not out.add(op.statement) and strict:
                conflicts.append(Conflict(i, "add-present"))
        elif cls is Delete:
            if not out.discard(op.statement) and strict:
                conflicts.append(Conflict(i, "delete-absent"))
    if conflicts:
        raise PatchConflictError(conflicts)
    return out


def rolling_diff(snapshots: Iterable[Dataset], opts: DiffOptions = DiffOptions()) -> Iterator[list[PatchOp]]:
    """One patch per snapshot; the first is all adds from the empty dataset."""
    prev = Dataset()
    seen = False
    for snap in snapshots:
        seen = True
        yield diff(prev, snap, opts)
        prev = snap
    if not seen:
        raise ValueError("rolling_diff needs at least one snapshot")
