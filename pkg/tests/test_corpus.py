import gzip
import json
from collections import Counter

import numpy as np
import pytest

from rdnsgeo import classifier, corpus
from rdnsgeo.corpus import CorpusRecord
from rdnsgeo.splitter import split

from conftest import city


def test_csv_with_truth(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("ip,hostname,lat,lon\n1.2.3.4,Core1.SEA.isp.net,47.6,-122.3\n"
                 "5.6.7.8,bad,abc,1\n9.9.9.999,x.isp.net,,\n10.0.0.1,y.isp.net,91,0\n")
    stats = Counter()
    recs = list(corpus.ingest(p, stats=stats))
    assert recs[0] == CorpusRecord("1.2.3.4", "core1.sea.isp.net", 47.6, -122.3)
    assert recs[0].truth == (47.6, -122.3)
    assert [r.hostname for r in recs] == ["core1.sea.isp.net"]
    assert stats["malformed"] == 3 and stats["records"] == 1


def test_missing_header(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("1.2.3.4,a.isp.net\n")
    with pytest.raises(ValueError, match="header"):
        list(corpus.ingest(p))


def test_gzip_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    recs = [CorpusRecord(f"10.0.{i // 250}.{i % 250}", f"h{i}.isp.net",
                         float(rng.uniform(-60, 60)), float(rng.uniform(-170, 170)))
            for i in range(1000)]
    plain = tmp_path / "c.csv"
    corpus.write_corpus(recs, plain)
    gz = tmp_path / "c.csv.gz"
    gz.write_bytes(gzip.compress(plain.read_bytes()))
    assert list(corpus.ingest(gz)) == recs
    assert list(corpus.ingest(plain)) == recs


def test_json_lines(tmp_path):
    p = tmp_path / "r.json"
    lines = [{"timestamp": "1", "name": "1.2.3.4", "type": "ptr", "value": "A.isp.net."},
             {"name": "1.2.3.5"}, "not json"]
    p.write_text("\n".join(json.dumps(x) if isinstance(x, dict) else x for x in lines) + "\n")
    stats = Counter()
    recs = list(corpus.ingest(p, stats=stats))
    assert recs == [CorpusRecord("1.2.3.4", "a.isp.net")]
    assert stats["malformed"] == 2
    with pytest.raises(ValueError):
        list(corpus.ingest(p, fmt="xml"))


def test_analyze(mini_index, suffixes):
    hosts = ["a.seattle.isp.net", "b.seattle.isp.net", "xe-1.rtr.isp.net", "core.isp.net",
             "b.seattle.isp.net", "pool1.isp.com", "p2.isp.com", "gw.isp.org", "q.isp.org",
             "r.isp.org"]
    recs = [CorpusRecord("1.1.1.1", h) for h in hosts]
    st = corpus.analyze(recs, suffixes, mini_index)
    assert st.total == 10 and st.valid == 10 and st.distinct == 9
    assert st.city_match == 2
    assert st.tlds[".net"] == 5
    assert "Valid hostnames\t10\t100.0%" in st.format()

    bad = [CorpusRecord("1.1.1.1", h) for h in ("-x.isp.net", "host.invalidtldzzz", "a..isp.net")]
    st = corpus.analyze(bad, suffixes, mini_index)
    assert st.valid == 0 and st.distinct == 0 and sum(st.invalid_reasons.values()) == 3


def test_clli_code(mini_index):
    chicago = city(mini_index.gazetteer, "Chicago", "us", "il")
    assert corpus._code_for(mini_index, chicago, "clli") == "chcgil"


def test_synthetic_edges(mini_index):
    assert len(corpus.generate_synthetic(mini_index, 3, 0)) == 0
    with pytest.raises(ValueError):
        corpus.generate_synthetic(mini_index, 1, 5, schemes=("morse",))


def test_synthetic_labels(sample_index):
    syn = corpus.generate_synthetic(sample_index, 16, 150, seed=3)
    again = corpus.generate_synthetic(sample_index, 16, 150, seed=3)
    assert syn.records == again.records and syn.manifest == again.manifest
    assert len(syn) == 16 * 150
    decoys = sum(m["decoy"] for m in syn.manifest)
    assert decoys == 16 * round(0.3 * 150)
    assert {m["scheme"] for m in syn.manifest} >= set(corpus.SCHEMES)
    for rec, m in zip(syn.records, syn.manifest):
        if m["decoy"]:
            continue
        sp = split(rec.hostname, sample_index.suffixes)
        pairs = classifier.label_pairs([(sp, rec.truth)], sample_index)
        assert pairs.y.sum() == 1, rec.hostname
        assert pairs.location_ids[pairs.y][0] == m["location_id"], rec.hostname


def test_synthetic_write(tmp_path, mini_index):
    syn = corpus.generate_synthetic(mini_index, 2, 20, schemes=("city-name",), seed=1,
                                    cities_per_domain=5)
    syn.write(tmp_path / "c.csv", tmp_path / "m.jsonl")
    assert list(corpus.ingest(tmp_path / "c.csv")) == syn.records
    assert len((tmp_path / "m.jsonl").read_text().splitlines()) == 40
