import os

import pytest

from rdnsgeo.candidates import CandidateIndex
from rdnsgeo.gazetteer import load_gazetteer, sample_data_dir
from rdnsgeo.suffixes import load_public_suffixes

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
MINI = os.path.join(FIXTURES, "mini")


@pytest.fixture(scope="session")
def mini_gazetteer():
    return load_gazetteer(MINI)


@pytest.fixture(scope="session")
def mini_index(mini_gazetteer):
    return CandidateIndex.build(mini_gazetteer)


@pytest.fixture(scope="session")
def suffixes():
    return load_public_suffixes(os.path.join(MINI, "public_suffix_list.dat"))


@pytest.fixture(scope="session")
def sample_index(tmp_path_factory):
    """Index over the bundled sample gazetteer, built once per session."""
    return CandidateIndex.build(load_gazetteer(sample_data_dir()))


def city(gazetteer, name, cc, admin1=None):
    """Most populous city called ``name`` in ``cc`` (and ``admin1``)."""
    found = [c for c in gazetteer.cities.values()
             if c.name == name and c.country_code == cc and (admin1 is None or c.admin1_code == admin1)]
    assert found, f"{name}, {cc} missing from fixture gazetteer"
    return max(found, key=lambda c: c.population)


@pytest.fixture(scope="session")
def trained_pipeline(sample_index):
    """``(model, rules)`` trained on a small synthetic corpus over the sample gazetteer."""
    from rdnsgeo import classifier, corpus, patterns
    from rdnsgeo.splitter import split

    syn = corpus.generate_synthetic(sample_index, 40, 400, seed=11)
    data = [(split(r.hostname, sample_index.suffixes), r.truth) for r in syn.records]
    rules = patterns.mine(data, sample_index.gazetteer.cities)
    pairs = classifier.label_pairs(data, sample_index, rules)
    model = classifier.train(classifier.sample(pairs, classifier.SamplingParams(seed=11)))
    return model, rules


ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
