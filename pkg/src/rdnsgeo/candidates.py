"""Precomputed term -> location index and candidate lookup.

Every way a city can be spelled inside a hostname (full name, alternate
names, acronyms, devoweled forms, prefixes, name+region, name+country,
airport/CLLI/UN-LOCODE codes) is generated up front and stored as a key.
Looking up a hostname is then one dict probe per term. Host pattern matches
are merged in later by :mod:`rdnsgeo.patterns`.
"""

import gzip
import io
import itertools
import logging
import pickle
import struct
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import kernels

log = logging.getLogger(__name__)

INDEX_MAGIC = b"RDNSIDX\x00"
INDEX_VERSION = 1

VOWELS = frozenset("aeiou")
MIN_KEY_LENGTH = 2
MIN_DERIVED_KEY_LENGTH = 3
FIRST_LETTERS_MAX = 10
EXTENDED_VARIANT_LENGTH = 4
EXTENDED_VARIANT_CAP = 64
CODE_MATCH_RADIUS_KM = 30.0


class PrimaryCategory(IntEnum):
    CITY_NAME = 0
    ALTERNATE_NAMES = 1
    ABBREVIATIONS = 2
    CITY_ADMIN1 = 3
    CITY_COUNTRY = 4
    NO_VOWELS_NAME = 5
    FIRST_LETTERS = 6
    AIRPORT_CODE = 7
    CLLI = 8
    UNLOCODE = 9
    HOST_PATTERNS = 10


CATEGORY_LABELS = {
    PrimaryCategory.CITY_NAME: "CityName",
    PrimaryCategory.ALTERNATE_NAMES: "AlternateNames",
    PrimaryCategory.ABBREVIATIONS: "Abbreviations",
    PrimaryCategory.CITY_ADMIN1: "CityAdmin1",
    PrimaryCategory.CITY_COUNTRY: "CityCountry",
    PrimaryCategory.NO_VOWELS_NAME: "NoVowelsName",
    PrimaryCategory.FIRST_LETTERS: "FirstLetters",
    PrimaryCategory.AIRPORT_CODE: "AirportCode",
    PrimaryCategory.CLLI: "CLLI",
    PrimaryCategory.UNLOCODE: "UNLOCODE",
    PrimaryCategory.HOST_PATTERNS: "HostPatterns",
}
N_CATEGORIES = len(PrimaryCategory)


@dataclass(frozen=True)
class IndexEntry:
    key: str
    location_id: int
    category: PrimaryCategory
    matched_letters: int


@dataclass
class CandidateMatch:
    """One candidate location with the best match length per category."""

    location: object
    letters: list = field(default_factory=lambda: [0] * N_CATEGORIES)
    terms: set = field(default_factory=set)  # hostname terms that nominated it

    def add(self, category, matched_letters, term):
        if matched_letters > self.letters[category]:
            self.letters[category] = matched_letters
        self.terms.add(term)

    def is_match(self, category):
        return self.letters[category] > 0

    def triple(self, category):
        """``(is_match, population, matched_letters)`` for one category."""
        n = self.letters[category]
        return (n > 0, self.location.population if n else 0, n)

    @property
    def categories(self):
        return [PrimaryCategory(i) for i, n in enumerate(self.letters) if n]


# -- key generators ---------------------------------------------------------

def normalize(text):
    """Lowercase and keep letters and digits only (Unicode-aware)."""
    return "".join(ch for ch in text.lower() if ch.isalnum())


def words(text):
    return [w for w in (normalize(p) for p in text.replace("-", " ").split()) if w]


def acronym(name):
    ws = words(name)
    if len(ws) < 2:
        return None
    a = "".join(w[0] for w in ws)
    return a if len(a) >= MIN_KEY_LENGTH else None


def devowel(name):
    """Name without vowels, keeping the first letter: ``seattle`` -> ``sttl``."""
    s = normalize(name)
    if not s:
        return ""
    return s[0] + "".join(ch for ch in s[1:] if ch not in VOWELS)


def no_vowel_keys(name):
    """The devoweled skeleton and its prefixes of length >= 3."""
    sk = devowel(name)
    return [sk[:n] for n in range(MIN_DERIVED_KEY_LENGTH, len(sk) + 1)]


def letter_pool(name):
    """First and last letter of every word plus interior consonants, in order."""
    pool = []
    for w in words(name):
        if len(w) == 1:
            pool.append(w)
            continue
        pool.append(w[0])
        pool.extend(ch for ch in w[1:-1] if ch not in VOWELS)
        pool.append(w[-1])
    return pool


def extended_no_vowel_keys(name, length=EXTENDED_VARIANT_LENGTH, cap=EXTENDED_VARIANT_CAP):
    """Ordered picks from :func:`letter_pool` that start with the first letter.

    ``oxford`` -> ``oxfr``, ``fort myers`` -> ``ftmy``, ``greenville`` -> ``gnvl``.
    """
    pool = letter_pool(name)
    if len(pool) < length:
        return []
    out, seen = [], set()
    for rest in itertools.combinations(range(1, len(pool)), length - 1):
        key = pool[0] + "".join(pool[i] for i in rest)
        if key not in seen:
            seen.add(key)
            out.append(key)
            if len(out) >= cap:
                break
    return out


def first_letter_keys(name):
    s = normalize(name)
    return [s[:n] for n in range(MIN_DERIVED_KEY_LENGTH, min(FIRST_LETTERS_MAX, len(s) - 1) + 1)]


def _usable(key, min_len=MIN_KEY_LENGTH):
    return len(key) >= min_len and not key.isdigit()


class CandidateIndex:
    def __init__(self, gazetteer, keys, min_population_for_derived):
        self.gazetteer = gazetteer
        self.keys = keys  # key -> tuple of (location_id, category)
        self.min_population_for_derived = min_population_for_derived
        self._by_location = None

    @property
    def suffixes(self):
        return self.gazetteer.suffixes

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        return key in self.keys

    @classmethod
    def build(cls, gazetteer, min_population_for_derived=10000):
        builder = _Builder(gazetteer, min_population_for_derived)
        return cls(gazetteer, builder.run(), min_population_for_derived)

    def entries(self, key):
        return [IndexEntry(key, lid, PrimaryCategory(cat), len(key))
                for lid, cat in self.keys.get(key, ())]

    def lookup(self, terms):
        """Merge the entries of every term into per-location candidates."""
        cities = self.gazetteer.cities
        found = {}
        for term in dict.fromkeys(terms):
            hits = self.keys.get(term)
            if not hits:
                continue
            n = len(term)
            for lid, cat in hits:
                cm = found.get(lid)
                if cm is None:
                    cm = found[lid] = CandidateMatch(cities[lid])
                cm.add(cat, n, term)
        return [found[lid] for lid in sorted(found)]

    def keys_for(self, location_id):
        """``{category: [keys]}`` for one location (reverse index, built lazily)."""
        if self._by_location is None:
            rev = {}
            for key, hits in self.keys.items():
                for lid, cat in hits:
                    rev.setdefault(lid, {}).setdefault(PrimaryCategory(cat), []).append(key)
            self._by_location = rev
        return self._by_location.get(location_id, {})

    def category_counts(self):
        c = Counter()
        for hits in self.keys.values():
            for _, cat in hits:
                c[PrimaryCategory(cat)] += 1
        return c

    # -- persistence --------------------------------------------------------

    def save(self, path):
        buf = io.BytesIO()
        state = {
            "gazetteer": self.gazetteer,
            "keys": self.keys,
            "min_population_for_derived": self.min_population_for_derived,
        }
        with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
            pickle.dump(state, gz, protocol=4)
        with open(path, "wb") as f:
            f.write(INDEX_MAGIC + struct.pack("<I", INDEX_VERSION) + buf.getvalue())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as f:
            head = f.read(len(INDEX_MAGIC) + 4)
            if head[: len(INDEX_MAGIC)] != INDEX_MAGIC:
                raise ValueError(f"{path}: not a candidate index file")
            (version,) = struct.unpack("<I", head[len(INDEX_MAGIC):])
            if version != INDEX_VERSION:
                raise ValueError(f"{path}: index version {version}, expected {INDEX_VERSION}")
            with gzip.GzipFile(fileobj=f, mode="rb") as gz:
                state = pickle.load(gz)
        return cls(state["gazetteer"], state["keys"], state["min_population_for_derived"])


class _Builder:
    def __init__(self, gazetteer, min_population_for_derived):
        self.g = gazetteer
        self.min_pop = min_population_for_derived
        self.keys = {}
        self.unresolved = Counter()
        self._country_arrays = None

    def add(self, key, lid, cat):
        self.keys.setdefault(key, set()).add((lid, int(cat)))

    def run(self):
        for lid in sorted(self.g.cities):
            self._add_location(self.g.cities[lid])
        for ap in self.g.airports:
            if ap.location_id in self.g.cities:
                self.add(ap.code, ap.location_id, PrimaryCategory.AIRPORT_CODE)
        for rec in self.g.clli:
            lid = self._resolve_clli(rec)
            if lid is None:
                self.unresolved["clli"] += 1
            else:
                self.add(rec.code, lid, PrimaryCategory.CLLI)
        for rec in self.g.unlocode:
            lid = self._resolve_unlocode(rec)
            if lid is None:
                self.unresolved["unlocode"] += 1
            else:
                self.add(rec.code, lid, PrimaryCategory.UNLOCODE)
        if self.unresolved:
            log.info("codes without a matching city: %s", dict(self.unresolved))
        return {k: tuple(sorted(v)) for k, v in sorted(self.keys.items())}

    def _add_location(self, loc):
        C = PrimaryCategory
        lid = loc.id
        bases = list(dict.fromkeys(k for k in (normalize(loc.name), normalize(loc.ascii_name)) if k))
        for k in bases:
            if _usable(k):
                self.add(k, lid, C.CITY_NAME)
        for alt in loc.alternate_names:
            k = normalize(alt)
            if _usable(k) and k not in bases:
                self.add(k, lid, C.ALTERNATE_NAMES)
        for name in {loc.name, loc.ascii_name}:
            a = acronym(name)
            if a and _usable(a):
                self.add(a, lid, C.ABBREVIATIONS)

        admin = self.g.admin1.get((loc.country_code, loc.admin1_code))
        region_tokens = {loc.admin1_code} if loc.admin1_code.isalnum() else set()
        if admin is not None:
            region_tokens.update(admin.abbreviations)
            region_tokens.update((normalize(admin.name), normalize(admin.ascii_name)))
        country = self.g.countries.get(loc.country_code)
        country_tokens = {loc.country_code}
        if country is not None:
            country_tokens.add(normalize(country.tld))
            country_tokens.add(normalize(country.name))
        for base in bases:
            for tok in region_tokens:
                if tok:
                    self.add(base + normalize(tok), lid, C.CITY_ADMIN1)
            for tok in country_tokens:
                if tok:
                    self.add(base + tok, lid, C.CITY_COUNTRY)

        derived = loc.population >= self.min_pop
        for k in no_vowel_keys(loc.ascii_name):
            self.add(k, lid, C.NO_VOWELS_NAME)
        if derived:
            for k in extended_no_vowel_keys(loc.ascii_name):
                self.add(k, lid, C.NO_VOWELS_NAME)
            for k in first_letter_keys(loc.ascii_name):
                self.add(k, lid, C.FIRST_LETTERS)

    # -- code resolution ----------------------------------------------------

    def _by_country(self):
        if self._country_arrays is None:
            groups = {}
            for loc in self.g.cities.values():
                groups.setdefault(loc.country_code, []).append(loc)
            arrays = {}
            for cc, locs in groups.items():
                locs.sort(key=lambda l: l.id)
                arrays[cc] = (locs, np.array([l.latitude for l in locs]),
                              np.array([l.longitude for l in locs]))
            names = {}
            for loc in self.g.cities.values():
                for k in {normalize(loc.name), normalize(loc.ascii_name)}:
                    names.setdefault((loc.country_code, k), []).append(loc)
            self._country_arrays = (arrays, names)
        return self._country_arrays

    def _nearest(self, cc, lat, lon):
        arrays, _ = self._by_country()
        if cc not in arrays:
            return None
        locs, lats, lons = arrays[cc]
        i, d = kernels.nearest_index(lat, lon, lats, lons)
        return locs[i] if i >= 0 and d <= CODE_MATCH_RADIUS_KM else None

    def _region_matches(self, loc, region):
        if loc.admin1_code == region:
            return True
        admin = self.g.admin1.get((loc.country_code, loc.admin1_code))
        return admin is not None and region in admin.abbreviations

    def _resolve_clli(self, rec):
        _, names = self._by_country()
        named = [l for l in names.get((rec.country, normalize(rec.place_name)), [])
                 if self._region_matches(l, rec.region)]
        if named:
            return max(named, key=lambda l: (l.population, -l.id)).id
        loc = self._nearest(rec.country, rec.latitude, rec.longitude)
        return loc.id if loc else None

    def _resolve_unlocode(self, rec):
        _, names = self._by_country()
        named = names.get((rec.country, normalize(rec.place_name)), [])
        if named:
            if rec.has_coordinates:
                return min(named, key=lambda l: (kernels.haversine(
                    rec.latitude, rec.longitude, l.latitude, l.longitude), l.id)).id
            return max(named, key=lambda l: (l.population, -l.id)).id
        if rec.has_coordinates:
            loc = self._nearest(rec.country, rec.latitude, rec.longitude)
            return loc.id if loc else None
        return None
