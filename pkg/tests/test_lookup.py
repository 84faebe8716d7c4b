import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdfpatch.binary import (
    BadLookupIdError,
    LookupDecoder,
    LookupEncoder,
    TableOverflowError,
    UnsetLookupIdError,
    lookup_get_or_assign,
)


class LruOracle:
    """Brute-force LRU: a list ordered from least to most recently used."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.order = []
        self.slot = {}
        self.evictions = 0

    def touch(self, value):
        if value in self.slot:
            self.order.remove(value)
            self.order.append(value)
            return self.slot[value], False
        if len(self.order) < self.capacity:
            new_id = len(self.order) + 1
        else:
            victim = self.order.pop(0)
            new_id = self.slot.pop(victim)
            self.evictions += 1
        self.order.append(value)
        self.slot[value] = new_id
        return new_id, True


class MapDecoder:
    """Reference decoder: unbounded dict keyed by id, no capacity logic."""

    def __init__(self):
        self.table = {}
        self.last = 0

    def apply(self, id_field, value):
        self.last = self.last + 1 if id_field == 0 else id_field
        self.table[self.last] = value


def test_first_assignment_and_residency():
    t = LookupEncoder(4)
    assert lookup_get_or_assign(t, "http://example.org/") == (1, (0, "http://example.org/"))
    assert lookup_get_or_assign(t, "http://example.org/") == (1, None)


def test_capacity_two_a_b_a_c():
    t = LookupEncoder(2)
    got = [t.get_or_assign(v) for v in "ABAC"]
    assert got == [(1, (0, "A")), (2, (0, "B")), (1, None), (2, (2, "C"))]
    assert t.evictions == 1


def test_sequential_reassignment_uses_zero_id_field():
    t = LookupEncoder(2)
    for v in "AB":
        t.get_or_assign(v)
    # C evicts A (slot 1): explicit id; D evicts B (slot 2 = last+1): id field 0
    assert t.get_or_assign("C") == (1, (1, "C"))
    assert t.get_or_assign("D") == (2, (0, "D"))


def test_row_pinning_raises_instead_of_evicting_live_ids():
    t = LookupEncoder(2)
    t.begin_row()
    t.get_or_assign("A")
    t.get_or_assign("B")
    with pytest.raises(TableOverflowError):
        t.get_or_assign("C")
    t.begin_row()
    assert t.get_or_assign("C")[0] == 1


def test_decoder_errors():
    d = LookupDecoder(3)
    with pytest.raises(UnsetLookupIdError):
        d.get(2)
    with pytest.raises(BadLookupIdError):
        d.get(0)
    with pytest.raises(BadLookupIdError):
        d.apply(4, "x")
    d.apply(0, "a")
    assert d.get(1) == "a"


def replay(capacity, values):
    enc = LookupEncoder(capacity)
    oracle = LruOracle(capacity)
    dec = LookupDecoder(capacity)
    ref = MapDecoder()
    for v in values:
        got_id, entry = enc.get_or_assign(v)
        want_id, fresh = oracle.touch(v)
        assert got_id == want_id
        assert (entry is not None) == fresh
        if entry is not None:
            dec.apply(*entry)
            ref.apply(*entry)
        assert dec.snapshot() == ref.table
        assert dec.get(got_id) == v
    assert enc.evictions == oracle.evictions == dec.evictions
    return enc


@given(st.sampled_from([1, 2, 8, 4000]), st.lists(st.integers(0, 12).map(str), max_size=60))
def test_against_oracles(capacity, values):
    replay(capacity, values)


def test_against_oracles_seeded():
    rng = random.Random(3)
    for _ in range(300):
        cap = rng.choice([1, 2, 8, 4000])
        replay(cap, [str(rng.randrange(cap * 2 + 2)) for _ in range(rng.randint(0, 80))])
