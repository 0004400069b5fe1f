import struct

import pytest
from hypothesis import given, settings, strategies as st

from rdnsgeo.candidates import (
    INDEX_MAGIC,
    CandidateIndex,
    PrimaryCategory as C,
    acronym,
    devowel,
    extended_no_vowel_keys,
    first_letter_keys,
    no_vowel_keys,
    normalize,
)
from rdnsgeo.splitter import split


def _hits(index, key):
    return {(index.gazetteer.cities[e.location_id].name, e.category) for e in index.entries(key)}


@pytest.mark.parametrize("key,name,category", [
    ("nyc", "New York City", C.ABBREVIATIONS),
    ("sttl", "Seattle", C.NO_VOWELS_NAME),
    ("losa", "Los Angeles", C.FIRST_LETTERS),
    ("torontoon", "Toronto", C.CITY_ADMIN1),
    ("londonuk", "London", C.CITY_COUNTRY),
    ("londongb", "London", C.CITY_COUNTRY),
    ("osaka", "Osaka", C.CITY_NAME),
    ("warszawa", "Warsaw", C.ALTERNATE_NAMES),
    ("fra", "Frankfurt am Main", C.AIRPORT_CODE),
    ("tukrga", "Tucker", C.CLLI),
    ("chcgil", "Chicago", C.CLLI),
    ("krsel", "Seoul", C.UNLOCODE),
    ("frpar", "Paris", C.UNLOCODE),
    ("gnvl", "Greenville", C.NO_VOWELS_NAME),
    ("rvrs", "Riverside", C.NO_VOWELS_NAME),
    ("oxfr", "Oxford", C.NO_VOWELS_NAME),
    ("ftmy", "Fort Myers", C.NO_VOWELS_NAME),
    ("seattlewa", "Seattle", C.CITY_ADMIN1),
    ("sf", "San Francisco", C.ABBREVIATIONS),
])
def test_reference_keys(mini_index, key, name, category):
    assert (name, category) in _hits(mini_index, key)


def test_key_generators():
    assert normalize("Saint-Étienne") == "saintétienne"
    assert acronym("San Francisco") == "sf" and acronym("Seattle") is None
    assert devowel("Seattle") == "sttl" and devowel("Oxford") == "oxfrd"
    assert no_vowel_keys("Seattle") == ["stt", "sttl"]
    assert "oxfr" in extended_no_vowel_keys("Oxford")
    assert "ftmy" in extended_no_vowel_keys("Fort Myers")
    assert len(extended_no_vowel_keys("Llanfairpwllgwyngyll", cap=64)) <= 64
    assert first_letter_keys("Los Angeles") == ["los", "losa", "losan", "losang", "losange",
                                                 "losangel", "losangele"]


def test_lookup_examples(mini_index, suffixes):
    sp = split("62.80.122.50.fra.de.eunx.net", suffixes)
    assert any(c.location.name.startswith("Frankfurt") and c.is_match(C.AIRPORT_CODE)
               for c in mini_index.lookup(sp.match_terms))
    sp = split("p907072-li-mobac01.osaka.ocn.ne.jp", suffixes)
    assert any(c.location.name == "Osaka" and c.is_match(C.CITY_NAME)
               for c in mini_index.lookup(sp.match_terms))
    assert mini_index.lookup(["zzzz"]) == []
    assert mini_index.lookup([]) == []


def test_roch_candidates(mini_index, suffixes):
    sp = split("ge-1-0.roch.mn.isp.net", suffixes)
    found = {(c.location.name, c.location.country_code, c.location.admin1_code)
             for c in mini_index.lookup(sp.match_terms)}
    assert ("Rochester", "us", "mn") in found
    assert ("Rocha", "uy", "14") in found


def test_candidate_triples(mini_index):
    (cm,) = [c for c in mini_index.lookup(["sttl"]) if c.location.name == "Seattle"]
    assert cm.triple(C.NO_VOWELS_NAME) == (True, cm.location.population, 4)
    assert cm.triple(C.CITY_NAME) == (False, 0, 0)
    assert cm.categories


def test_key_laws(mini_index):
    cities = mini_index.gazetteer.cities
    for key, hits in mini_index.keys.items():
        assert len(key) >= 2
        assert "." not in key and "-" not in key and " " not in key
        for lid, cat in hits:
            assert lid in cities
            if cat in (C.NO_VOWELS_NAME, C.FIRST_LETTERS):
                assert len(key) >= 3
            if cat == C.CITY_NAME:
                loc = cities[lid]
                assert key in (normalize(loc.name), normalize(loc.ascii_name))
    for e in mini_index.entries("seattle"):
        assert e.matched_letters == len("seattle")


def test_build_deterministic(mini_gazetteer, mini_index):
    again = CandidateIndex.build(mini_gazetteer)
    assert again.keys == mini_index.keys


_terms = st.lists(st.sampled_from(["sttl", "roch", "mn", "paris", "fra", "de", "nyc", "lon",
                                   "zzzz", "wa", "seattle", "portland", "or", "losa"]),
                  max_size=6)


@settings(max_examples=100, deadline=None)
@given(_terms)
def test_union_law(mini_index, terms):
    merged = {c.location.id: c.letters for c in mini_index.lookup(terms)}
    union = {}
    for t in terms:
        for c in mini_index.lookup([t]):
            cur = union.setdefault(c.location.id, [0] * len(C))
            union[c.location.id] = [max(a, b) for a, b in zip(cur, c.letters)]
    assert merged == union


def test_save_load_roundtrip(tmp_path, mini_index):
    p = tmp_path / "idx.bin"
    mini_index.save(p)
    first = p.read_bytes()
    loaded = CandidateIndex.load(p)
    assert loaded.keys == mini_index.keys
    loaded.save(p)
    assert p.read_bytes() == first


def test_version_mismatch(tmp_path, mini_index):
    p = tmp_path / "idx.bin"
    mini_index.save(p)
    data = bytearray(p.read_bytes())
    data[len(INDEX_MAGIC):len(INDEX_MAGIC) + 4] = struct.pack("<I", 99)
    p.write_bytes(bytes(data))
    with pytest.raises(ValueError, match="version"):
        CandidateIndex.load(p)
    p.write_bytes(b"garbage")
    with pytest.raises(ValueError):
        CandidateIndex.load(p)
