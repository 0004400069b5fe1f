"""Loaders for the location datasets: GeoNames dumps, CLLI, UN/LOCODE.

Every loader reads one file and returns plain in-memory tables. Malformed
rows are skipped; pass a ``collections.Counter`` as ``warnings`` to collect
per-reason skip counts. Codes are stored lowercase; display names keep their
original case.
"""

import csv
import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .suffixes import SuffixSet, load_public_suffixes

log = logging.getLogger(__name__)

__all__ = [
    "Location", "Admin1", "AirportCode", "ClliRecord", "UnlocodeRecord", "CountryInfo",
    "Gazetteer", "SuffixSet", "load_cities", "load_alternate_names", "load_admin1",
    "load_country_info", "load_clli", "load_unlocode", "load_public_suffixes",
    "load_gazetteer", "sample_data_dir",
]

AIRPORT_AUTHORITIES = {"iata": "IATA", "icao": "ICAO", "faac": "FAAC"}
# alternateNames pseudo-languages that are not place names
NON_NAME_LANGUAGES = {"link", "post", "wkdt", "unlc", "tcid"}

_AIRPORT_RE = re.compile(r"^[a-z]{3,4}$")
_CLLI_RE = re.compile(r"^[a-z]{6}$")
_LOCODE_RE = re.compile(r"^[a-z0-9]{5}$")
_LOCODE_COORD_RE = re.compile(r"^(\d{2})(\d{2})([NS])\s+(\d{3})(\d{2})([EW])$")


@dataclass
class Location:
    id: int
    name: str
    ascii_name: str
    alternate_names: list
    latitude: float
    longitude: float
    population: int
    admin1_code: str
    country_code: str

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0 or not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"coordinates out of range for {self.id}")
        if not self.ascii_name:
            raise ValueError(f"empty ascii name for {self.id}")


@dataclass
class Admin1:
    country_code: str
    admin1_code: str
    name: str
    ascii_name: str
    geonameid: int = 0
    abbreviations: list = field(default_factory=list)


@dataclass(frozen=True)
class AirportCode:
    code: str
    location_id: int
    authority: str


@dataclass(frozen=True)
class ClliRecord:
    code: str
    latitude: float
    longitude: float
    place_name: str
    region: str
    country: str


@dataclass(frozen=True)
class UnlocodeRecord:
    code: str
    latitude: float | None
    longitude: float | None
    place_name: str
    country: str

    @property
    def has_coordinates(self):
        return self.latitude is not None


@dataclass(frozen=True)
class CountryInfo:
    country_code: str
    tld: str
    name: str


@dataclass
class Gazetteer:
    """All tables needed to build a candidate index."""

    cities: dict
    admin1: dict = field(default_factory=dict)
    countries: dict = field(default_factory=dict)
    airports: list = field(default_factory=list)
    clli: list = field(default_factory=list)
    unlocode: list = field(default_factory=list)
    suffixes: SuffixSet = field(default_factory=SuffixSet)

    def admin1_of(self, loc):
        return self.admin1.get((loc.country_code, loc.admin1_code))

    def country_of(self, loc):
        return self.countries.get(loc.country_code)


def _warn(warnings, reason):
    if warnings is not None:
        warnings[reason] += 1


def _open_text(path):
    return open(path, encoding="utf-8", newline="")


def load_cities(path, warnings=None):
    """Parse a GeoNames ``cities*.txt`` dump into ``{id: Location}``."""
    cities = {}
    skipped = Counter()
    with _open_text(path) as f:
        for line in f:
            line = line.rstrip("\r\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 19:
                skipped["cities: wrong column count"] += 1
                continue
            try:
                gid = int(cols[0])
                alt = [a for a in cols[3].split(",") if a]
                loc = Location(
                    id=gid,
                    name=cols[1],
                    ascii_name=cols[2] or cols[1],
                    alternate_names=alt,
                    latitude=float(cols[4]),
                    longitude=float(cols[5]),
                    population=int(cols[14] or 0),
                    admin1_code=cols[10].lower(),
                    country_code=cols[8].lower(),
                )
            except ValueError:
                skipped["cities: bad field"] += 1
                continue
            if gid in cities:
                skipped["cities: duplicate id"] += 1
                continue
            cities[gid] = loc
    _report(path, skipped, warnings)
    return cities


def load_alternate_names(path, cities, admin1=None, warnings=None):
    """Merge a GeoNames ``alternateNames`` dump into ``cities``.

    Rows tagged iata/icao/faac become airport codes; ``abbr`` rows that point
    at an admin1 region (by geonameid) become that region's abbreviations;
    every other non-empty name is appended to the city's alternate names.
    Returns ``(cities, airports)``.
    """
    admin_by_id = {a.geonameid: a for a in (admin1 or {}).values() if a.geonameid}
    airports = []
    seen_airports = set()
    skipped = Counter()
    with _open_text(path) as f:
        for line in f:
            cols = line.rstrip("\r\n").split("\t")
            if len(cols) < 4:
                skipped["alternate names: wrong column count"] += 1
                continue
            try:
                gid = int(cols[1])
            except ValueError:
                skipped["alternate names: bad id"] += 1
                continue
            lang = cols[2].strip().lower()
            name = cols[3].strip()
            if not name:
                skipped["alternate names: empty name"] += 1
                continue
            if lang in AIRPORT_AUTHORITIES:
                code = name.lower()
                if gid not in cities:
                    skipped["alternate names: unknown id"] += 1
                elif not _AIRPORT_RE.match(code):
                    skipped["alternate names: bad airport code"] += 1
                elif (code, gid, lang) not in seen_airports:
                    seen_airports.add((code, gid, lang))
                    airports.append(AirportCode(code, gid, AIRPORT_AUTHORITIES[lang]))
                continue
            if lang in NON_NAME_LANGUAGES:
                continue
            if gid in admin_by_id:
                if lang == "abbr" and name.lower() not in admin_by_id[gid].abbreviations:
                    admin_by_id[gid].abbreviations.append(name.lower())
                continue
            loc = cities.get(gid)
            if loc is None:
                skipped["alternate names: unknown id"] += 1
                continue
            if name not in loc.alternate_names:
                loc.alternate_names.append(name)
    _report(path, skipped, warnings)
    return cities, airports


def load_admin1(path, warnings=None):
    """``admin1CodesASCII.txt`` -> ``{(country, code): Admin1}``."""
    table = {}
    skipped = Counter()
    with _open_text(path) as f:
        for line in f:
            line = line.rstrip("\r\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) < 3 or "." not in cols[0]:
                skipped["admin1: malformed row"] += 1
                continue
            cc, code = cols[0].split(".", 1)
            key = (cc.lower(), code.lower())
            if key in table:
                skipped["admin1: duplicate code"] += 1
                continue
            gid = int(cols[3]) if len(cols) > 3 and cols[3].isdigit() else 0
            table[key] = Admin1(key[0], key[1], cols[1], cols[2] or cols[1], gid)
    _report(path, skipped, warnings)
    return table


def load_country_info(path, warnings=None):
    """``countryInfo.txt`` -> ``{country: CountryInfo}``; rows without a TLD are dropped."""
    table = {}
    skipped = Counter()
    with _open_text(path) as f:
        for line in f:
            if line.startswith("#") or not line.strip():
                continue
            cols = line.rstrip("\r\n").split("\t")
            if len(cols) < 10:
                skipped["countries: malformed row"] += 1
                continue
            tld = cols[9].strip().lower()
            if not tld:
                skipped["countries: no tld"] += 1
                continue
            if not tld.startswith("."):
                tld = "." + tld
            table[cols[0].lower()] = CountryInfo(cols[0].lower(), tld, cols[4])
    _report(path, skipped, warnings)
    return table


def load_clli(path, warnings=None):
    """Normalized CLLI CSV with header ``code,city,region,country,lat,lon``."""
    records = []
    skipped = Counter()
    with _open_text(path) as f:
        for row in csv.DictReader(f):
            try:
                code = row["code"].strip().lower()
                lat, lon = float(row["lat"]), float(row["lon"])
            except (KeyError, TypeError, ValueError):
                skipped["clli: malformed row"] += 1
                continue
            if not _CLLI_RE.match(code) or not (-90 <= lat <= 90 and -180 <= lon <= 180):
                skipped["clli: bad code or coordinates"] += 1
                continue
            records.append(ClliRecord(code, lat, lon, row["city"].strip(),
                                      row["region"].strip().lower(), row["country"].strip().lower()))
    _report(path, skipped, warnings)
    return records


def parse_locode_coordinates(text):
    """``"4851N 00221E"`` -> ``(48.85, 2.35)``; None when absent or garbled."""
    m = _LOCODE_COORD_RE.match(text.strip())
    if not m:
        return None
    lat = int(m[1]) + int(m[2]) / 60.0
    lon = int(m[4]) + int(m[5]) / 60.0
    if m[3] == "S":
        lat = -lat
    if m[6] == "W":
        lon = -lon
    return lat, lon


def load_unlocode(path, warnings=None):
    """UN/LOCODE release CSV (the three official parts may be concatenated)."""
    records = []
    skipped = Counter()
    try:
        with _open_text(path) as f:
            rows = list(csv.reader(f))
    except UnicodeDecodeError:
        with open(path, encoding="latin-1", newline="") as f:
            rows = list(csv.reader(f))
    for cols in rows:
        if len(cols) < 11:
            skipped["unlocode: malformed row"] += 1
            continue
        if not cols[2].strip() or cols[0].strip() == "X":
            continue  # country header rows and removed entries
        code = (cols[1] + cols[2]).strip().lower()
        if not _LOCODE_RE.match(code):
            skipped["unlocode: bad code"] += 1
            continue
        coords = parse_locode_coordinates(cols[10])
        lat, lon = coords if coords else (None, None)
        records.append(UnlocodeRecord(code, lat, lon, cols[4].strip() or cols[3].strip(),
                                      cols[1].strip().lower()))
    _report(path, skipped, warnings)
    return records


def _report(path, skipped, warnings):
    if warnings is not None:
        warnings.update(skipped)
    if skipped:
        log.warning("%s: skipped %d rows (%s)", path, sum(skipped.values()),
                    ", ".join(f"{k}: {v}" for k, v in sorted(skipped.items())))


def sample_data_dir():
    """Directory of the bundled sample datasets."""
    return str(resources.files("rdnsgeo") / "data" / "sample")


def _find(directory, *names):
    for name in names:
        p = os.path.join(directory, name)
        if os.path.exists(p):
            return p
    return None


def load_gazetteer(geonames_dir, clli=None, unlocode=None, psl=None, warnings=None):
    """Load a full gazetteer from a GeoNames directory plus the other datasets.

    ``clli``, ``unlocode`` and ``psl`` default to ``clli.csv``,
    ``unlocode.csv`` and ``public_suffix_list.dat`` inside ``geonames_dir``.
    """
    cities_path = _find(geonames_dir, "cities1000.txt", "cities500.txt", "cities5000.txt",
                        "cities15000.txt")
    if cities_path is None:
        raise FileNotFoundError(f"no GeoNames cities file in {geonames_dir}")
    cities = load_cities(cities_path, warnings)
    admin1_path = _find(geonames_dir, "admin1CodesASCII.txt")
    admin1 = load_admin1(admin1_path, warnings) if admin1_path else {}
    country_path = _find(geonames_dir, "countryInfo.txt")
    countries = load_country_info(country_path, warnings) if country_path else {}
    airports = []
    alt_path = _find(geonames_dir, "alternateNames.txt", "alternateNamesV2.txt")
    if alt_path:
        cities, airports = load_alternate_names(alt_path, cities, admin1, warnings)
    clli = clli or _find(geonames_dir, "clli.csv")
    unlocode = unlocode or _find(geonames_dir, "unlocode.csv")
    psl = psl or _find(geonames_dir, "public_suffix_list.dat")
    if psl is None:
        raise FileNotFoundError("public suffix list not found")
    return Gazetteer(
        cities=cities,
        admin1=admin1,
        countries=countries,
        airports=airports,
        clli=load_clli(clli, warnings) if clli else [],
        unlocode=load_unlocode(unlocode, warnings) if unlocode else [],
        suffixes=load_public_suffixes(psl),
    )
