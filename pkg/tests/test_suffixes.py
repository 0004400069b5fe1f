import os
import re

import pytest

from rdnsgeo.suffixes import SuffixSet, parse_public_suffixes

from conftest import FIXTURES

_CHECK = re.compile(r"^checkPublicSuffix\((null|'[^']*'), (null|'[^']*')\);")


def _vectors():
    out = []
    with open(os.path.join(FIXTURES, "test_psl.txt"), encoding="utf-8") as f:
        for line in f:
            m = _CHECK.match(line.strip())
            if m:
                dom, exp = (None if g == "null" else g.strip("'") for g in m.groups())
                out.append((dom, exp))
    return out


VECTORS = _vectors()


def test_vector_file_parsed():
    assert len(VECTORS) > 70


@pytest.mark.parametrize("domain,expected", VECTORS)
def test_published_vectors(suffixes, domain, expected):
    assert suffixes.registrable_domain(domain) == (expected.lower() if expected else None)


def test_k12_suffix(suffixes):
    assert suffixes.public_suffix("dps8099.denver.k12.co.us") == "k12.co.us"


def test_comments_and_blanks_ignored():
    s = parse_public_suffixes(["// comment", "", "  ", "com", "// ===END==="])
    assert s.exact == {"com"}


def test_wildcard_rule():
    s = SuffixSet(["*.ck", "!www.ck"])
    assert s.public_suffix("a.b.ck") == "b.ck"
    assert s.registrable_domain("a.b.ck") == "a.b.ck"
    assert s.public_suffix("www.ck") == "ck"


def test_unlisted_suffix_flagged():
    s = SuffixSet(["com"])
    assert s.match("host.invalidtldzzz") == ("invalidtldzzz", False)
    assert s.match("a.example.com") == ("com", True)


def test_unicode_rules_match_punycode(suffixes):
    assert suffixes.match("xn--0rsod70av79j.xn--j6w193g")[1]
    assert suffixes.match("夏威夷舞.香港") == ("香港", True)
