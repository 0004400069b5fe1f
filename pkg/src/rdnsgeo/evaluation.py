"""Error-distance metrics for a geolocation pipeline over a labeled corpus."""

import csv
import math
from dataclasses import dataclass, field

EARTH_RADIUS_KM = 6371.0
DEFAULT_THRESHOLDS = (20, 40, 60, 100, 250, 500, 1000)
SCORE_SCALE = 1000.0


def _check(lat, lon):
    if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
        raise ValueError(f"coordinates out of range: ({lat}, {lon})")


def haversine(a, b):
    """Great-circle distance in km between two ``(lat, lon)`` points in degrees."""
    (lat1, lon1), (lat2, lon2) = a, b
    _check(lat1, lon1)
    _check(lat2, lon2)
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def cdf(errors, thresholds=DEFAULT_THRESHOLDS, total=None):
    """Fraction of ``total`` hostnames whose error is below each threshold.

    ``total`` defaults to ``len(errors)``; pass the corpus size to count
    undecided hostnames in the denominator.
    """
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be sorted ascending")
    total = len(errors) if total is None else total
    if total == 0:
        return [(t, 0.0) for t in thresholds]
    ordered = sorted(errors)
    out, j = [], 0
    for t in thresholds:
        while j < len(ordered) and ordered[j] < t:
            j += 1
        out.append((t, j / total))
    return out


def lower_median(values):
    s = sorted(values)
    return s[(len(s) - 1) // 2]


def rmse(values):
    return math.sqrt(sum(v * v for v in values) / len(values))


def combined_score(rmse_km, coverage):
    """``(1000 / rmse) * coverage``; +inf when rmse is zero and coverage positive."""
    if rmse_km == 0:
        return math.inf if coverage > 0 else 0.0
    return SCORE_SCALE / rmse_km * coverage


@dataclass
class DomainStats:
    name: str
    total: int
    decided: int
    median_error_km: float
    rmse_km: float
    coverage: float
    combined_score: float
    cdf: list

    @classmethod
    def from_errors(cls, name, errors, total, thresholds, decided_only=False):
        decided = len(errors)
        coverage = decided / total if total else 0.0
        if errors:
            med, r = lower_median(errors), rmse(errors)
            score = combined_score(r, coverage)
        else:
            med = r = math.nan
            score = 0.0
        curve = cdf(errors, thresholds, decided if decided_only else total)
        return cls(name, total, decided, med, r, coverage, score, curve)


@dataclass
class EvalReport:
    overall: DomainStats
    domains: dict = field(default_factory=dict)
    thresholds: tuple = DEFAULT_THRESHOLDS

    @property
    def cdf(self):
        return self.overall.cdf

    def rows(self):
        yield from (self.domains[d] for d in sorted(self.domains))
        yield self.overall

    def write_csv(self, path):
        header = ["domain", "total", "decided", "coverage", "median_error_km", "rmse_km",
                  "combined_score"] + [f"within_{t}km" for t in self.thresholds]
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            for s in self.rows():
                w.writerow([s.name, s.total, s.decided, _fmt(s.coverage), _fmt(s.median_error_km),
                            _fmt(s.rmse_km), _fmt(s.combined_score)]
                           + [_fmt(frac) for _, frac in s.cdf])

    def write_cdf_tsv(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write("threshold_km\tfraction\n")
            for t, frac in self.overall.cdf:
                f.write(f"{t}\t{_fmt(frac)}\n")


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "inf"
        return f"{v:.6f}"
    return str(v)


def evaluate(locator, corpus, thresholds=DEFAULT_THRESHOLDS, decided_only=False):
    """Score ``locator`` on ``(hostname, domain, (lat, lon))`` records.

    ``locator(hostname)`` returns a ranked list of ``(location, confidence)``
    (possibly empty) or raises ``ValueError`` for a rejected hostname, which
    counts as undecided. The top-ranked location is the decision.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("cannot evaluate an empty corpus")
    totals, errors = {}, {}
    all_errors = []
    for hostname, domain, truth in corpus:
        totals[domain] = totals.get(domain, 0) + 1
        errors.setdefault(domain, [])
        try:
            ranked = locator(hostname)
        except ValueError:
            ranked = []
        if not ranked:
            continue
        loc = ranked[0][0]
        err = haversine((loc.latitude, loc.longitude), truth)
        errors[domain].append(err)
        all_errors.append(err)
    domains = {d: DomainStats.from_errors(d, errors[d], totals[d], thresholds, decided_only)
               for d in totals}
    overall = DomainStats.from_errors("overall", all_errors, len(corpus), thresholds, decided_only)
    return EvalReport(overall, domains, tuple(thresholds))


@dataclass(frozen=True)
class PredictedPoint:
    latitude: float
    longitude: float
    id: int = 0
    population: int = 0


class PredictionTable:
    """Locator backed by a ``hostname,lat,lon`` CSV of another system's answers."""

    def __init__(self, answers):
        self.answers = answers

    @classmethod
    def load(cls, path):
        answers = {}
        with open(path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                if row.get("lat") and row.get("lon"):
                    answers[row["hostname"].lower()] = PredictedPoint(float(row["lat"]),
                                                                      float(row["lon"]))
        return cls(answers)

    def __call__(self, hostname):
        p = self.answers.get(hostname.lower())
        return [(p, 1.0)] if p else []
