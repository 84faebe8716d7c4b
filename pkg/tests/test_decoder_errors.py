import pytest

from rdfpatch import PatchDecoder, decode_patch
from rdfpatch.binary import DecodeError, UnsetLookupIdError
from corrupt import BNODE_B, CASES, EXTRA_CASES, LIT_X, MAGIC, OPTS, frame


@pytest.mark.parametrize("name, data, error", CASES + EXTRA_CASES, ids=[c[0] for c in CASES + EXTRA_CASES])
def test_whole_stream_raises_designated_error(name, data, error):
    with pytest.raises(error):
        decode_patch(data)


@pytest.mark.parametrize("name, data, error", CASES + EXTRA_CASES, ids=[c[0] for c in CASES + EXTRA_CASES])
def test_byte_by_byte_feed_raises_designated_error(name, data, error):
    dec = PatchDecoder()
    with pytest.raises(error):
        for i in range(len(data)):
            dec.feed(data[i:i + 1])
        dec.finish()


def test_twenty_distinct_streams():
    assert len(CASES) == 20
    assert len({data for _, data, _ in CASES}) == 20


def test_unset_id_names_frame_and_row():
    data = MAGIC + frame(OPTS) + frame(b"\x05" + b"\x08" + BNODE_B + b"\x01\x00\x07" + LIT_X + b"\x07")
    with pytest.raises(UnsetLookupIdError) as info:
        decode_patch(data)
    err = info.value
    assert (err.frame, err.row) == (1, 1)
    assert "frame 1" in str(err) and "row 1" in str(err)
    assert err.offset is not None


def test_truncation_reports_byte_offset():
    good = MAGIC + frame(OPTS + b"\x05")
    with pytest.raises(DecodeError) as info:
        decode_patch(good[:-2])
    assert info.value.offset == 4
    assert "byte offset 4" in str(info.value)
