"""Seeded synthetic patch streams for benchmarking.

``cdc`` imitates a change log captured from an e-commerce style triple
store: every patch carries ``id``/``prev`` headers, inserts new offers and
reviews with long review texts, and product IRIs are drawn from a large pool.
``iot`` imitates a weather station: each snapshot holds the latest reading
of every sensor and patches are the rolling difference between snapshots,
so literals are short and the vocabulary repeats constantly.
"""
from __future__ import annotations

import random
import uuid
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterator

from .diff import DiffOptions, rolling_diff
from .model import TX_BEGIN, TX_COMMIT, Add, Dataset, Delete, Header, Iri, LiteralDt, LiteralLang, PatchOp, Statement

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")


@dataclass(frozen=True)
class CdcProfile:
    product_pool: int = 100_000
    vendor_pool: int = 1_000
    reviewer_pool: int = 50_000
    entities_per_insert: tuple[int, int] = (1, 8)
    review_share: float = 0.5
    review_words: tuple[int, int] = (50, 300)
    insert_share: float = 0.4  # of patches; the rest are delete transactions
    delete_hit_rate: float = 0.15  # delete patches that find an offer to remove
    vocabulary: int = 2_000


@dataclass(frozen=True)
class IotProfile:
    stations: int = 2
    sensors_per_station: int = 3
    step_seconds: int = 600
    # probability that a sensor reports the same value as before
    unchanged_rate: float = 0.05


BSBM = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/"
_V = BSBM + "vocabulary/"
_I = BSBM + "instances/"
_DC = "http://purl.org/dc/elements/1.1/"
_REV = "http://purl.org/stuff/rev#"


def _dt(value: str, dtype: str) -> LiteralDt:
    return LiteralDt(value, XSD + dtype)


def _words(rng: random.Random, vocab: list[str], lo: int, hi: int) -> str:
    return " ".join(rng.choices(vocab, k=rng.randint(lo, hi)))


def _cdc_patches(seed: int, prof: CdcProfile) -> Iterator[list[PatchOp]]:
    rng = random.Random(seed)
    letters = "abcdefghijklmnopqrstuvwxyz"
    vocab = ["".join(rng.choices(letters, k=rng.randint(2, 11))) for _ in range(prof.vocabulary)]
    clock = datetime(2008, 6, 1, tzinfo=timezone.utc)
    prev_id = None
    live_offers: list[list[Statement]] = []
    offer_no = review_no = 0
    while True:
        patch_id = Iri("uuid:" + str(uuid.UUID(int=rng.getrandbits(128), version=4)))
        ops: list[PatchOp] = [Header("id", patch_id)]
        if prev_id is not None:
            ops.append(Header("prev", prev_id))
        prev_id = patch_id
        ops.append(TX_BEGIN)
        clock += timedelta(seconds=rng.randint(1, 90))
        stamp = _dt(clock.strftime("%Y-%m-%dT%H:%M:%S"), "dateTime")
        if rng.random() < prof.insert_share:
            for _ in range(rng.randint(*prof.entities_per_insert)):
                product = Iri(f"{_I}dataFromProducer{rng.randrange(prof.product_pool) // 50 + 1}"
                              f"/Product{rng.randrange(prof.product_pool) + 1}")
                if rng.random() < prof.review_share:
                    review_no += 1
                    site = rng.randint(1, 40)
                    r = Iri(f"{_I}dataFromRatingSite{site}/Review{review_no}")
                    st = [
                        (RDF_TYPE, Iri(_V + "Review")),
                        (Iri(_V + "reviewFor"), product),
                        (Iri(_REV + "reviewer"),
                         Iri(f"{_I}dataFromRatingSite{site}/Reviewer{rng.randrange(prof.reviewer_pool) + 1}")),
                        (Iri(_V + "reviewDate"), stamp),
                        (Iri(_DC + "title"), LiteralLang(_words(rng, vocab, 4, 12), "en")),
                        (Iri(_REV + "text"), LiteralLang(_words(rng, vocab, *prof.review_words), "en")),
                    ]
                    for k in range(1, 5):
                        if rng.random() < 0.7:
                            st.append((Iri(f"{_V}rating{k}"), _dt(str(rng.randint(1, 10)), "integer")))
                    st.append((Iri(_DC + "publisher"), Iri(f"{_I}dataFromRatingSite{site}/RatingSite{site}")))
                    st.append((Iri(_DC + "date"), _dt(clock.strftime("%Y-%m-%d"), "date")))
                    ops.extend(Add(Statement(r, p, o)) for p, o in st)
                else:
                    offer_no += 1
                    vendor = rng.randrange(prof.vendor_pool) + 1
                    o_iri = Iri(f"{_I}dataFromVendor{vendor}/Offer{offer_no}")
                    valid_to = clock + timedelta(days=rng.randint(7, 90))
                    st = [
                        (RDF_TYPE, Iri(_V + "Offer")),
                        (Iri(_V + "product"), product),
                        (Iri(_V + "vendor"), Iri(f"{_I}dataFromVendor{vendor}/Vendor{vendor}")),
                        (Iri(_V + "price"), _dt(f"{rng.uniform(5, 10000):.2f}", "double")),
                        (Iri(_V + "validFrom"), stamp),
                        (Iri(_V + "validTo"), _dt(valid_to.strftime("%Y-%m-%dT%H:%M:%S"), "dateTime")),
                        (Iri(_V + "deliveryDays"), _dt(str(rng.randint(1, 21)), "integer")),
                        (Iri(_V + "offerWebpage"), Iri(f"http://www.vendor{vendor}.com/Offer{offer_no}/")),
                        (Iri(_DC + "publisher"), Iri(f"{_I}dataFromVendor{vendor}/Vendor{vendor}")),
                        (Iri(_DC + "date"), _dt(clock.strftime("%Y-%m-%d"), "date")),
                    ]
                    statements = [Statement(o_iri, p, o) for p, o in st]
                    live_offers.append(statements)
                    ops.extend(Add(s) for s in statements)
        elif live_offers and rng.random() < prof.delete_hit_rate:
            victim = live_offers.pop(rng.randrange(len(live_offers)))
            ops.extend(Delete(s) for s in victim)
        ops.append(TX_COMMIT)
        yield ops


def _iot_snapshots(seed: int, prof: IotProfile) -> Iterator[Dataset]:
    rng = random.Random(seed)
    base = "https://example.org/weather/"
    sosa = "http://www.w3.org/ns/sosa/"
    kinds = [("temperature", 15.0, 0.4), ("humidity", 60.0, 2.0), ("pressure", 1013.0, 0.5),
             ("windSpeed", 4.0, 1.0), ("rainfall", 0.0, 0.2), ("solarRadiation", 300.0, 40.0)]
    sensors = []
    for st in range(prof.stations):
        for k in range(prof.sensors_per_station):
            name, start, step = kinds[k % len(kinds)]
            obs = Iri(f"{base}station{st + 1}/{name}/observation")
            sensors.append([obs, start, step, name, st + 1])
    static = []
    for obs, _, _, name, st in sensors:
        static.append(Statement(obs, RDF_TYPE, Iri(sosa + "Observation")))
        static.append(Statement(obs, Iri(sosa + "madeBySensor"), Iri(f"{base}station{st}/{name}/sensor")))
        static.append(Statement(obs, Iri(sosa + "observedProperty"), Iri(f"{base}property/{name}")))
    clock = datetime(2022, 3, 1, tzinfo=timezone.utc)
    has_result = Iri(sosa + "hasSimpleResult")
    result_time = Iri(sosa + "resultTime")
    while True:
        clock += timedelta(seconds=prof.step_seconds)
        stamp = _dt(clock.strftime("%Y-%m-%dT%H:%M:%SZ"), "dateTime")
        snap = Dataset(static)
        for s in sensors:
            if rng.random() >= prof.unchanged_rate:
                s[1] = max(0.0, s[1] + rng.gauss(0.0, s[2]))
            snap.add(Statement(s[0], has_result, _dt(f"{s[1]:.1f}", "float")))
            snap.add(Statement(s[0], result_time, stamp))
        yield snap


def _take(patches: Iterator[list[PatchOp]], ops: int) -> list[PatchOp]:
    out: list[PatchOp] = []
    for p in patches:
        if len(out) >= ops:
            break
        out.extend(p)
    return out


def generate_cdc(ops: int, seed: int = 0, profile: CdcProfile = CdcProfile()) -> list[PatchOp]:
    """Whole patches until at least ``ops`` operations have been produced."""
    return _take(_cdc_patches(seed, profile), ops)


def generate_iot(ops: int, seed: int = 0, profile: IotProfile = IotProfile()) -> list[PatchOp]:
    """Rolling-difference patches; the bootstrap patch of pure adds is included."""
    return _take(rolling_diff(_iot_snapshots(seed, profile), DiffOptions()), ops)


GENERATORS = {"cdc": generate_cdc, "iot": generate_iot}
