"""Compact binary patch streams with streaming lookup-table compression."""
from .decoder import PatchDecoder, decode_patch, decode_patch_stream, iter_frames, iter_patch_stream
from .encoder import PatchEncoder, encode_patch, encode_patch_stream
from .errors import (
    BadLookupIdError,
    BadMagicError,
    BadStringError,
    DecodeError,
    EmptyRegisterError,
    EncodeError,
    FeatureError,
    FrameLimitError,
    OptionsError,
    OversizedEntryError,
    StreamError,
    StreamFeatureError,
    TableOverflowError,
    TruncatedError,
    UnknownRowError,
    UnknownTermKindError,
    UnsetLookupIdError,
    VarintError,
)
from .lookup import LookupDecoder, LookupEncoder, LookupEntry, lookup_get_or_assign
from .stats import StatsCollector, StatsReport, stream_stats
from .varint import read_varint, varint_decode, varint_encode
from .wire import MAGIC, StreamOptions, split_iri

