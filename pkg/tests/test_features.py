import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rdnsgeo.candidates import CandidateMatch, PrimaryCategory as C
from rdnsgeo.features import (
    FEATURE_NAMES,
    LAYOUT_VERSION,
    N_FEATURES,
    assemble,
    feature_vector,
    population_log,
    secondary_features,
)
from rdnsgeo.gazetteer import Location
from rdnsgeo.splitter import split

from conftest import city

# log10(750001) from 30-digit decimal arithmetic
LOG_750001 = 5.875061842450623


def _cand(index, sp, name, cc, admin1=None):
    found = [c for c in index.lookup(sp.match_terms)
             if c.location.name == name and c.location.country_code == cc
             and (admin1 is None or c.location.admin1_code == admin1)]
    assert found, f"{name} not a candidate for {sp.raw}"
    return found[0]


def _secondary(g, sp, cm):
    return secondary_features(sp, cm.location, g.admin1, g.countries, cm.terms)


def test_layout():
    assert N_FEATURES == 37 and len(set(FEATURE_NAMES)) == 37
    assert FEATURE_NAMES[0] == "CityName.is_match"
    assert FEATURE_NAMES[3 * C.AIRPORT_CODE + 1] == "AirportCode.population_log"
    assert FEATURE_NAMES[33:] == ("admin1_match", "first_letters_admin1_match", "country_match",
                                  "country_tld_match")
    assert LAYOUT_VERSION == 1


@pytest.mark.parametrize("hostname,name,cc,admin1,expected", [
    ("138-207-246-119.jst.pa.atlanticbb.net", "Johnstown", "us", "pa", (True, False, False, False)),
    ("frth-bw-noc.ariz.aisco.ngb.army.mil", "Fort Huachuca", "us", "az", (False, True, False, False)),
    ("ci77.paris12eme.fr.psi.net", "Paris", "fr", None, (False, False, True, False)),
    ("barcelona.fib.upc.es", "Barcelona", "es", None, (False, False, False, True)),
    ("ge-1-0.roch.mn.isp.net", "Rochester", "us", "mn", (True, False, False, False)),
    ("ge-1-0.roch.mn.isp.net", "Rocha", "uy", None, (False, False, False, False)),
])
def test_secondary_examples(mini_index, suffixes, hostname, name, cc, admin1, expected):
    sp = split(hostname, suffixes)
    cm = _cand(mini_index, sp, name, cc, admin1)
    assert _secondary(mini_index.gazetteer, sp, cm) == expected


def test_exclusion_law(mini_gazetteer, suffixes):
    sp = split("jst.pa.atlanticbb.net", suffixes)
    loc = city(mini_gazetteer, "Johnstown", "us", "pa")
    g = mini_gazetteer
    assert secondary_features(sp, loc, g.admin1, g.countries)[0]
    assert not secondary_features(sp, loc, g.admin1, g.countries, {"pa"})[0]


def test_admin1_name_and_country_name(mini_gazetteer, suffixes):
    g = mini_gazetteer
    loc = city(g, "Seattle", "us", "wa")
    sp = split("core1.washington.unitedstates.isp.net", suffixes)
    adm, first, country, tld = secondary_features(sp, loc, g.admin1, g.countries)
    assert adm and first and country and not tld


def test_airport_only_vector():
    loc = Location(1, "Testport", "Testport", [], 0.0, 0.0, 750000, "zz", "us")
    cm = CandidateMatch(loc)
    cm.add(C.AIRPORT_CODE, 3, "tpt")
    fv = assemble(cm, (False, False, False, False))
    a = 3 * C.AIRPORT_CODE
    assert fv[a] == 1.0 and fv[a + 2] == 3.0
    assert fv[a + 1] == pytest.approx(LOG_750001, abs=1e-12)
    rest = np.delete(fv, [a, a + 1, a + 2])
    assert not rest.any()


def test_rochester_vector(mini_index, suffixes):
    sp = split("ge-1-0.roch.mn.isp.net", suffixes)
    cm = _cand(mini_index, sp, "Rochester", "us", "mn")
    fv = feature_vector(sp, cm, mini_index.gazetteer)
    assert fv[3 * C.CITY_NAME] == 0
    assert fv[3 * C.FIRST_LETTERS] == 1 and fv[3 * C.FIRST_LETTERS + 2] == 4
    assert fv[33] == 1


def test_longest_key_kept():
    loc = Location(1, "X", "X", [], 0.0, 0.0, 10, "", "us")
    cm = CandidateMatch(loc)
    cm.add(C.FIRST_LETTERS, 3, "abc")
    cm.add(C.FIRST_LETTERS, 5, "abcde")
    cm.add(C.FIRST_LETTERS, 4, "abcd")
    assert cm.letters[C.FIRST_LETTERS] == 5


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**8), st.lists(st.integers(0, 30), min_size=11, max_size=11),
       st.lists(st.booleans(), min_size=4, max_size=4))
def test_layout_invariants(pop, letters, secondary):
    loc = Location(1, "X", "X", [], 0.0, 0.0, pop, "", "us")
    cm = CandidateMatch(loc, list(letters))
    fv = assemble(cm, secondary)
    assert fv.shape == (37,)
    for c in C:
        is_match, p, n = fv[3 * c:3 * c + 3]
        assert p >= 0
        if is_match == 0:
            assert n == 0 and p == 0
        else:
            assert p == pytest.approx(population_log(pop)) and n == letters[c]
    assert list(fv[33:]) == [float(s) for s in secondary]
    assert np.array_equal(fv, assemble(cm, secondary))
