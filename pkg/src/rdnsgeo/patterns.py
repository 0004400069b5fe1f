"""Per-domain positional term rules mined from labeled hostnames.

A slot is a (term, position) pair where position counts dotted labels from
the right of the subdomain. For each domain, every 1- and 2-slot combination
seen in at least ``min_examples`` training hostnames becomes a rule when a
large enough share of its hostnames sit within ``radius_km`` of one observed
location.
"""

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels

log = logging.getLogger(__name__)

RULES_FORMAT = "rdnsgeo-patterns"
RULES_VERSION = 1

DEFAULT_MIN_SUPPORT_RATIO = 0.40
DEFAULT_RADIUS_KM = 20.0
DEFAULT_MIN_EXAMPLES = 10
EXACT_CENTER_LIMIT = 2000
CENTER_SAMPLE_SIZE = 1000


@dataclass(frozen=True)
class PatternRule:
    domain: str
    slots: tuple  # ((term, position), ...) sorted by position descending
    location: object
    support_count: int
    support_ratio: float
    occurrences: int = 0
    center: tuple = (0.0, 0.0)

    @property
    def matched_letters(self):
        return sum(len(t) for t, _ in self.slots)

    @property
    def terms(self):
        return [t for t, _ in self.slots]


def slot_keys(split):
    """All 1-slot and 2-slot keys (distinct positions) of a split hostname."""
    singles = sorted({(t.text, t.position) for t in split.pruned_terms},
                     key=lambda s: (-s[1], s[0]))
    keys = [(s,) for s in singles]
    for a, b in combinations(singles, 2):
        if a[1] != b[1]:
            keys.append((a, b))
    return keys


class RuleSet:
    """Rules grouped by domain and slot key for constant-time matching."""

    def __init__(self, rules=(), params=None):
        self.rules = list(rules)
        self.params = dict(params or {})
        self._by_domain = defaultdict(dict)
        for r in self.rules:
            self._by_domain[r.domain].setdefault(r.slots, []).append(r)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def for_domain(self, domain):
        return [r for rules in self._by_domain.get(domain, {}).values() for r in rules]

    def matching_rules(self, split):
        table = self._by_domain.get(split.domain)
        if not table:
            return []
        out = []
        for key in slot_keys(split):
            out.extend(table.get(key, ()))
        return out

    def save(self, path):
        doc = {
            "format": RULES_FORMAT,
            "version": RULES_VERSION,
            "params": self.params,
            "rules": [
                {
                    "domain": r.domain,
                    "slots": [[t, p] for t, p in r.slots],
                    "location_id": r.location.id,
                    "support_count": r.support_count,
                    "support_ratio": r.support_ratio,
                    "occurrences": r.occurrences,
                    "center": list(r.center),
                }
                for r in self.rules
            ],
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=1, sort_keys=True, ensure_ascii=False)
            f.write("\n")

    @classmethod
    def load(cls, path, cities):
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        if doc.get("format") != RULES_FORMAT:
            raise ValueError(f"{path}: not a host pattern file")
        if doc.get("version") != RULES_VERSION:
            raise ValueError(f"{path}: pattern file version {doc.get('version')}, "
                             f"expected {RULES_VERSION}")
        rules = []
        for d in doc["rules"]:
            loc = cities.get(d["location_id"])
            if loc is None:
                raise ValueError(f"{path}: rule refers to unknown location {d['location_id']}")
            rules.append(PatternRule(d["domain"], tuple((t, int(p)) for t, p in d["slots"]), loc,
                                     d["support_count"], d["support_ratio"], d["occurrences"],
                                     tuple(d["center"])))
        return cls(rules, doc.get("params"))


def apply(rules, split):
    """Locations nominated by the rules of ``split.domain``.

    Returns ``(location, matched_letters)`` pairs; a 2-slot rule only fires
    when both of its slots are present.
    """
    return [(r.location, r.matched_letters) for r in rules.matching_rules(split)]


class _CityLocator:
    def __init__(self, cities):
        self.locs = [cities[k] for k in sorted(cities)]
        self.lats = np.array([l.latitude for l in self.locs], dtype=np.float64)
        self.lons = np.array([l.longitude for l in self.locs], dtype=np.float64)

    def nearest(self, lat, lon):
        i, _ = kernels.nearest_index(lat, lon, self.lats, self.lons)
        return self.locs[i] if i >= 0 else None


def find_center(points, radius_km, seed=0, exact_limit=EXACT_CENTER_LIMIT,
                sample_size=CENTER_SAMPLE_SIZE):
    """Best cluster center among observed points.

    ``points`` maps ``(lat, lon)`` to a count. The chosen point covers the most
    occurrences within ``radius_km``; ties go to the smaller summed distance
    (the medoid). With more than ``exact_limit`` distinct points only a
    seeded sample of ``sample_size`` is tried as centers.

    Returns ``((lat, lon), covered_count)``.
    """
    coords = sorted(points)
    lats = np.array([c[0] for c in coords], dtype=np.float64)
    lons = np.array([c[1] for c in coords], dtype=np.float64)
    weights = np.array([points[c] for c in coords], dtype=np.float64)
    if len(coords) <= exact_limit:
        cand = np.arange(len(coords), dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        cand = np.sort(rng.choice(len(coords), size=sample_size, replace=False)).astype(np.int64)
    idx, covered, _ = kernels.densest_center(lats, lons, weights, float(radius_km), cand)
    return coords[idx], int(round(covered))


def mine(corpus, cities, min_support_ratio=DEFAULT_MIN_SUPPORT_RATIO,
         radius_km=DEFAULT_RADIUS_KM, min_examples=DEFAULT_MIN_EXAMPLES, seed=0):
    """Mine rules from ``(SplitHostname, (lat, lon))`` pairs.

    ``cities`` is the gazetteer city table; each rule points at the city
    nearest to its cluster center.
    """
    groups = defaultdict(lambda: defaultdict(Counter))
    for split, truth in corpus:
        if truth is None or truth[0] is None:
            raise ValueError(f"hostname {split.raw!r} has no coordinates")
        point = (float(truth[0]), float(truth[1]))
        table = groups[split.domain]
        for key in slot_keys(split):
            table[key][point] += 1

    locator = _CityLocator(cities)
    rules = []
    for domain in sorted(groups):
        rules.extend(_mine_domain(domain, groups[domain], locator, min_support_ratio,
                                  radius_km, min_examples, seed))
    log.info("mined %d host pattern rules over %d domains", len(rules), len(groups))
    params = {"min_support_ratio": min_support_ratio, "radius_km": radius_km,
              "min_examples": min_examples, "seed": seed}
    return RuleSet(rules, params)


def _mine_domain(domain, table, locator, min_support_ratio, radius_km, min_examples, seed):
    rules = []
    for key in sorted(table):
        points = table[key]
        total = sum(points.values())
        if total < min_examples:
            continue
        center, covered = find_center(points, radius_km, seed)
        ratio = covered / total
        if ratio + 1e-12 < min_support_ratio:
            continue
        loc = locator.nearest(*center)
        if loc is None:
            continue
        rules.append(PatternRule(domain, key, loc, covered, ratio, total, center))
    return rules
