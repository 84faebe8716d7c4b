"""Fixed-capacity lookup tables shared by encoder and decoder.

The encoder picks slots (LRU eviction) and tells the decoder about each
assignment with an entry row; the decoder just obeys.  Ids are 1-based and
an entry id field of 0 means "last assigned id + 1".
"""
from __future__ import annotations

from collections import OrderedDict
from typing import NamedTuple, Optional

from .errors import BadLookupIdError, TableOverflowError, UnsetLookupIdError


class LookupEntry(NamedTuple):
    id_field: int
    value: str


class LookupEncoder:
    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("lookup table capacity must be at least 1")
        self.capacity = capacity
        self.last_set_id = 0
        self.evictions = 0
        self._ids: OrderedDict[str, int] = OrderedDict()
        # row serial in which each id was last touched; used to pin ids that
        # the row currently being encoded already references
        self._touched = [0] * (capacity + 1)
        self._serial = 0

    def begin_row(self) -> None:
        self._serial += 1

    def get_or_assign(self, value: str) -> tuple[int, Optional[LookupEntry]]:
        ids = self._ids
        found = ids.get(value)
        if found is not None:
            ids.move_to_end(value)
            self._touched[found] = self._serial
            return found, None
        if len(ids) < self.capacity:
            new_id = len(ids) + 1
        else:
            old_value, new_id = next(iter(ids.items()))
            if self._serial and self._touched[new_id] == self._serial:
                raise TableOverflowError(
                    f"row needs more than {self.capacity} distinct entries in one table")
            del ids[old_value]
            self.evictions += 1
        ids[value] = new_id
        self._touched[new_id] = self._serial
        id_field = 0 if new_id == self.last_set_id + 1 else new_id
        self.last_set_id = new_id
        return new_id, LookupEntry(id_field, value)

    def __contains__(self, value: str) -> bool:
        return value in self._ids

    def __len__(self) -> int:
        return len(self._ids)


def lookup_get_or_assign(table: LookupEncoder, value: str) -> tuple[int, Optional[LookupEntry]]:
    return table.get_or_assign(value)


class LookupDecoder:
    def __init__(self, capacity: int) -> None:
        self.capacity = capacity
        self.last_set_id = 0
        self.evictions = 0
        self.entries = 0
        self.values: list[Optional[str]] = [None] * (capacity + 1)

    def apply(self, id_field: int, value: str) -> int:
        """Apply one entry row; returns the id it set."""
        new_id = self.last_set_id + 1 if id_field == 0 else id_field
        if new_id > self.capacity:
            raise BadLookupIdError(f"entry id {new_id} exceeds table capacity {self.capacity}")
        if self.values[new_id] is not None:
            self.evictions += 1
        self.values[new_id] = value
        self.last_set_id = new_id
        self.entries += 1
        return new_id

    def get(self, id_: int) -> str:
        if 0 < id_ <= self.capacity:
            v = self.values[id_]
            if v is not None:
                return v
            raise UnsetLookupIdError(f"reference to unset lookup id {id_}")
        raise BadLookupIdError(f"lookup id {id_} outside 1..{self.capacity}")

    def snapshot(self) -> dict[int, str]:
        return {i: v for i, v in enumerate(self.values) if v is not None}

    def retained_bytes(self) -> int:
        return sum(len(v.encode("utf-8")) for v in self.values if v is not None)
