"""Corpus ingestion, descriptive statistics and a synthetic labeled corpus."""

import csv
import gzip
import ipaddress
import json
import logging
import socket
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .candidates import PrimaryCategory, acronym, devowel, normalize
from .splitter import DEFAULT_BLACKLIST, InvalidHostname, split

log = logging.getLogger(__name__)

FORMATS = ("rapid7-json-lines", "csv")


@dataclass(frozen=True)
class CorpusRecord:
    ip: str
    hostname: str
    latitude: float | None = None
    longitude: float | None = None

    def __post_init__(self):
        ipaddress.IPv4Address(self.ip)
        if not self.hostname:
            raise ValueError("empty hostname")
        if (self.latitude is None) != (self.longitude is None):
            raise ValueError("latitude and longitude must both be set or both be missing")
        if self.latitude is not None and not (-90 <= self.latitude <= 90
                                              and -180 <= self.longitude <= 180):
            raise ValueError("coordinates out of range")

    @property
    def truth(self):
        return None if self.latitude is None else (self.latitude, self.longitude)


def _open(path):
    with open(path, "rb") as f:
        magic = f.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8", newline="")
    return open(path, encoding="utf-8", newline="")


def guess_format(path):
    name = str(path).lower().removesuffix(".gz")
    return "rapid7-json-lines" if name.endswith((".json", ".jsonl", ".ndjson")) else "csv"


def ingest(path, fmt=None, stats=None):
    """Yield ``CorpusRecord`` objects from a CSV or Rapid7 JSON-lines file.

    Gzip input is detected from its magic bytes. Malformed lines are skipped
    and counted in ``stats["malformed"]`` when a Counter is passed. CSV files
    need an ``ip,hostname[,lat,lon]`` header.
    """
    fmt = fmt or guess_format(path)
    if fmt not in FORMATS:
        raise ValueError(f"unknown corpus format {fmt!r}")
    stats = stats if stats is not None else Counter()
    with _open(path) as f:
        if fmt == "csv":
            yield from _ingest_csv(f, stats)
        else:
            yield from _ingest_json(f, stats)


def _ingest_csv(f, stats):
    reader = csv.reader(f)
    header = next(reader, None)
    if header is None:
        return
    cols = [h.strip().lower() for h in header]
    if "ip" not in cols or "hostname" not in cols:
        raise ValueError("CSV corpus needs an ip,hostname[,lat,lon] header")
    ii, hi = cols.index("ip"), cols.index("hostname")
    lat_i = cols.index("lat") if "lat" in cols else None
    lon_i = cols.index("lon") if "lon" in cols else None
    for row in reader:
        if not row:
            continue
        try:
            lat = lon = None
            if lat_i is not None and lon_i is not None and row[lat_i].strip():
                lat, lon = float(row[lat_i]), float(row[lon_i])
            rec = CorpusRecord(row[ii].strip(), row[hi].strip().lower(), lat, lon)
        except (ValueError, IndexError):
            stats["malformed"] += 1
            continue
        stats["records"] += 1
        yield rec


def _ingest_json(f, stats):
    for line in f:
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
            rec = CorpusRecord(str(doc["name"]).strip(), str(doc["value"]).strip().lower().rstrip("."))
        except (ValueError, KeyError, TypeError):
            stats["malformed"] += 1
            continue
        stats["records"] += 1
        yield rec


def write_corpus(records, path):
    """Write records as an ``ip,hostname,lat,lon`` CSV."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["ip", "hostname", "lat", "lon"])
        for r in records:
            w.writerow([r.ip, r.hostname, "" if r.latitude is None else repr(r.latitude),
                        "" if r.longitude is None else repr(r.longitude)])


# -- analysis -------------------------------------------------------------------

@dataclass
class CorpusStats:
    total: int = 0
    valid: int = 0
    distinct: int = 0
    city_match: int = 0
    airport_match: int = 0
    invalid_reasons: Counter = field(default_factory=Counter)
    tlds: Counter = field(default_factory=Counter)

    def rows(self):
        """``(set name, size, % of records, % of distinct)`` rows."""
        def pct(n, d):
            return f"{100.0 * n / d:.1f}%" if d else ""
        return [
            ("Hostnames", self.total, "", ""),
            ("Valid hostnames", self.valid, pct(self.valid, self.total), ""),
            ("Distinct hostnames", self.distinct, pct(self.distinct, self.total), ""),
            ("Exact city match (naive)", self.city_match, pct(self.city_match, self.total),
             pct(self.city_match, self.distinct)),
            ("Airport code match (naive)", self.airport_match, pct(self.airport_match, self.total),
             pct(self.airport_match, self.distinct)),
        ]

    def format(self, top_tlds=20):
        lines = ["set\tsize\tpct_of_records\tpct_of_distinct"]
        lines += ["\t".join(str(v) for v in row) for row in self.rows()]
        lines.append("")
        lines.append("tld\tcount")
        for tld, n in sorted(self.tlds.items(), key=lambda t: (-t[1], t[0]))[:top_tlds]:
            lines.append(f"{tld}\t{n}")
        return "\n".join(lines) + "\n"


def _has_category(index, terms, category):
    for t in terms:
        for _, cat in index.keys.get(t, ()):
            if cat == category:
                return True
    return False


def analyze(records, suffixes, index=None, blacklist=DEFAULT_BLACKLIST):
    """Validity and naive-match counts over a record stream.

    City and airport matches are counted over distinct valid hostnames, as
    exact term equality with a CityName or AirportCode index key.
    """
    st = CorpusStats()
    seen = set()
    for rec in records:
        st.total += 1
        try:
            sp = split(rec.hostname, suffixes, blacklist)
        except InvalidHostname as e:
            st.invalid_reasons[e.rule] += 1
            continue
        st.valid += 1
        st.tlds[sp.tld] += 1
        key = sp.unicode_form
        if key in seen:
            continue
        seen.add(key)
        if index is not None:
            terms = set(sp.match_terms) | set(sp.level_texts(1))
            if _has_category(index, terms, PrimaryCategory.CITY_NAME):
                st.city_match += 1
            if _has_category(index, terms, PrimaryCategory.AIRPORT_CODE):
                st.airport_match += 1
    st.distinct = len(seen)
    return st


# -- synthetic corpus -------------------------------------------------------------

SCHEMES = ("city-name", "airport", "clli", "unlocode", "no-vowel", "abbreviation",
           "first-letters", "city-admin1")

_INFRA = ("ge", "xe", "ae", "te", "po", "lo", "gw", "rtr", "core", "edge", "agg", "bb", "cr",
          "br", "ar", "pe", "vl", "bdr", "ccr", "peer", "sw", "fw", "mx")
_ACCESS = ("static", "dynamic", "dsl", "pool", "cpe", "cust", "dhcp", "cable", "fiber", "res")
_SYLLABLES = ("ka", "zo", "mi", "tex", "vor", "lun", "qua", "bri", "net", "tel", "com", "sky",
              "wav", "pix", "dyn", "ox", "ul", "gri", "fex", "jo")
_GENERIC_SUFFIXES = ("net", "com")
_TEMPLATES = (
    "{ipd}.{code}.{isp}",
    "{infra}{n}-{infra2}{m}.{code}{k}.{isp}",
    "{code}-{infra}{n}.{isp}",
    "{infra}-{n}.{code}.{region}.{isp}",
    "{access}-{ipd}.{code}.{cc}.{isp}",
    "{access}{n}.{code}.{infra}.{isp}",
)
_DECOY_TEMPLATES = (
    "{infra}{n}.{infra2}.{isp}",
    "{access}-{ipd}.{isp}",
    "{ipd}.{access}.{isp}",
    "{infra}{n}-{m}.{access}{k}.{isp}",
)
_SCHEME_CATEGORY = {
    "city-name": PrimaryCategory.CITY_NAME,
    "airport": PrimaryCategory.AIRPORT_CODE,
    "clli": PrimaryCategory.CLLI,
    "unlocode": PrimaryCategory.UNLOCODE,
    "no-vowel": PrimaryCategory.NO_VOWELS_NAME,
    "abbreviation": PrimaryCategory.ABBREVIATIONS,
    "first-letters": PrimaryCategory.FIRST_LETTERS,
    "city-admin1": PrimaryCategory.CITY_ADMIN1,
}


@dataclass
class SyntheticCorpus:
    records: list
    manifest: list  # one dict per record: domain, scheme, location_id, code, decoy

    def __len__(self):
        return len(self.records)

    def write(self, path, manifest_path=None):
        write_corpus(self.records, path)
        if manifest_path:
            with open(manifest_path, "w", encoding="utf-8") as f:
                for m in self.manifest:
                    f.write(json.dumps(m, sort_keys=True) + "\n")


def _code_for(index, loc, scheme):
    """A site code for ``loc`` under ``scheme`` that the index maps back to it."""
    keys = [k for k in index.keys_for(loc.id).get(_SCHEME_CATEGORY[scheme], ())
            if k.isalpha() and k.isascii()]
    if not keys:
        return None
    if scheme == "city-name":
        keys = [k for k in keys if k == normalize(loc.ascii_name) and len(k) <= 14]
    elif scheme == "no-vowel":
        sk = devowel(loc.ascii_name)
        keys = [k for k in keys if sk.startswith(k) and len(k) >= 4]
    elif scheme == "abbreviation":
        keys = [k for k in keys if k == acronym(loc.ascii_name) and len(k) >= 3]
    elif scheme == "first-letters":
        keys = [k for k in keys if len(k) in (4, 5)]
    elif scheme == "city-admin1":
        base = normalize(loc.ascii_name)
        keys = [k for k in keys if k.startswith(base) and len(k) - len(base) == 2
                and len(k) <= 16]
    elif scheme == "airport":
        keys = [k for k in keys if len(k) == 3]
    if not keys:
        return None
    return min(keys, key=lambda k: (len(k), k))


def _isp_name(rng, used):
    while True:
        name = "".join(rng.choice(_SYLLABLES) for _ in range(3))
        if name not in used:
            used.add(name)
            return name


def _ip(rng):
    while True:
        ip = ipaddress.IPv4Address(int(rng.integers(1 << 24, 224 << 24)))
        if ip.is_global:
            return str(ip)


def _suffix_for(index, country, rng):
    if country is not None and rng.random() < 0.5:
        label = country.tld.lstrip(".")
        _, listed = index.suffixes.match("x." + label)
        if label and listed:
            return label
    return _GENERIC_SUFFIXES[int(rng.integers(len(_GENERIC_SUFFIXES)))]


def _eligible(index, scheme, min_cities):
    """Country code -> list of (location, code) usable under ``scheme``."""
    by_country = {}
    for lid in sorted(index.gazetteer.cities):
        loc = index.gazetteer.cities[lid]
        if loc.population < 1000:
            continue
        code = _code_for(index, loc, scheme)
        if code is not None:
            by_country.setdefault(loc.country_code, []).append((loc, code))
    return {cc: v for cc, v in by_country.items() if len(v) >= min_cities}


def generate_synthetic(index, n_domains, n_hosts, schemes=SCHEMES, seed=0,
                       decoy_fraction=0.3, cities_per_domain=60):
    """Labeled hostnames built from real index keys.

    Each domain gets one naming scheme (cycled through ``schemes``), a home
    country and ``cities_per_domain`` sites. Hostnames are spread over sites
    in proportion to population, so small sites are rare. Site codes are index keys that map back to
    the site, so every non-decoy hostname names its true city. A fraction
    ``decoy_fraction`` of each domain's hostnames carry infrastructure terms
    only. ``n_hosts`` is per domain.
    """
    rng = np.random.default_rng(seed)
    unknown = set(schemes) - set(SCHEMES)
    if unknown:
        raise ValueError(f"unknown naming schemes: {sorted(unknown)}")
    records, manifest = [], []
    if n_hosts <= 0 or n_domains <= 0:
        return SyntheticCorpus(records, manifest)
    g = index.gazetteer
    pools = {}
    used_names = set()
    for d in range(n_domains):
        scheme = schemes[d % len(schemes)]
        if scheme not in pools:
            pools[scheme] = _eligible(index, scheme, min(cities_per_domain, 5))
        eligible = pools[scheme]
        if not eligible:
            raise ValueError(f"gazetteer has no cities usable under scheme {scheme!r}")
        ccs = sorted(eligible)
        cc = ccs[int(rng.integers(len(ccs)))]
        options = eligible[cc]
        k = min(cities_per_domain, len(options))
        weights = np.array([np.sqrt(max(loc.population, 1)) for loc, _ in options])
        picked = rng.choice(len(options), size=k, replace=False, p=weights / weights.sum())
        sites = [options[i] for i in sorted(picked)]
        site_p = np.array([float(loc.population) for loc, _ in sites])
        site_p /= site_p.sum()
        country = g.countries.get(cc)
        isp = _isp_name(rng, used_names) + "." + _suffix_for(index, country, rng)
        template = _TEMPLATES[int(rng.integers(len(_TEMPLATES)))]
        n_decoy = int(round(decoy_fraction * n_hosts))
        decoy_flags = np.zeros(n_hosts, dtype=bool)
        decoy_flags[rng.choice(n_hosts, size=n_decoy, replace=False)] = True
        for h in range(n_hosts):
            loc, code = sites[int(rng.choice(len(sites), p=site_p))]
            decoy = bool(decoy_flags[h])
            fields = {
                "ipd": "-".join(str(int(x)) for x in rng.integers(1, 255, size=4)),
                "infra": _INFRA[int(rng.integers(len(_INFRA)))],
                "infra2": _INFRA[int(rng.integers(len(_INFRA)))],
                "access": _ACCESS[int(rng.integers(len(_ACCESS)))],
                "n": int(rng.integers(0, 100)),
                "m": int(rng.integers(0, 10)),
                "k": int(rng.integers(1, 10)),
                "code": code,
                "region": loc.admin1_code.lower() if loc.admin1_code.isalpha() else cc,
                "cc": cc,
                "isp": isp,
            }
            if decoy:
                t = _DECOY_TEMPLATES[int(rng.integers(len(_DECOY_TEMPLATES)))]
                hostname = t.format(**fields)
            else:
                hostname = template.format(**fields)
            records.append(CorpusRecord(_ip(rng), hostname, loc.latitude, loc.longitude))
            manifest.append({"domain": isp, "scheme": "decoy" if decoy else scheme,
                             "location_id": loc.id, "code": None if decoy else code,
                             "decoy": decoy})
    return SyntheticCorpus(records, manifest)


def resolve_ptr(ips, timeout=2.0):
    """PTR lookups through the system resolver; small fixture batches only."""
    old = socket.getdefaulttimeout()
    socket.setdefaulttimeout(timeout)
    out = []
    try:
        for ip in ips:
            try:
                out.append((ip, socket.gethostbyaddr(ip)[0].lower()))
            except OSError:
                out.append((ip, None))
    finally:
        socket.setdefaulttimeout(old)
    return out
