"""Fixed-layout feature vectors for (hostname, candidate) pairs.

Layout, version 1: for each primary category in ``PrimaryCategory`` order
the triple ``is_match, log10(population + 1), matched_letters``, followed by
four secondary booleans. 37 values in total.
"""

import math

import numpy as np

from .candidates import CATEGORY_LABELS, PrimaryCategory, normalize

LAYOUT_VERSION = 1
SECONDARY_NAMES = ("admin1_match", "first_letters_admin1_match", "country_match",
                   "country_tld_match")
MIN_ADMIN1_PREFIX = 3

FEATURE_NAMES = tuple(
    f"{CATEGORY_LABELS[c]}.{part}"
    for c in PrimaryCategory
    for part in ("is_match", "population_log", "matched_letters")
) + SECONDARY_NAMES
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 37


def population_log(population):
    return math.log10(max(population, 0) + 1)


def _secondary_terms(split, exclude_terms):
    terms = set(split.match_terms) | {t.text for t in split.pruned_terms}
    return terms - set(exclude_terms)


def secondary_features(split, candidate, admin1s, countries, exclude_terms=()):
    """The four secondary booleans for ``candidate`` (a ``Location``).

    ``admin1s`` maps ``(country_code, admin1_code)`` to ``Admin1``;
    ``countries`` maps a country code to ``CountryInfo``. Terms in
    ``exclude_terms`` (those that nominated the candidate) are ignored.
    """
    terms = _secondary_terms(split, exclude_terms)

    admin = admin1s.get((candidate.country_code, candidate.admin1_code))
    admin_tokens = set()
    admin_names = []
    if candidate.admin1_code.isalpha():
        admin_tokens.add(candidate.admin1_code.lower())
    if admin is not None:
        admin_names = [n for n in {normalize(admin.name), normalize(admin.ascii_name)} if n]
        admin_tokens.update(admin_names)
        admin_tokens.update(a.lower() for a in admin.abbreviations)
    admin1_match = bool(terms & admin_tokens)
    first_letters = any(
        len(t) >= MIN_ADMIN1_PREFIX and name.startswith(t)
        for t in terms for name in admin_names
    )

    country = countries.get(candidate.country_code)
    country_tokens = {candidate.country_code}
    if country is not None:
        country_tokens.add(normalize(country.name))
        country_tokens.add(country.tld.lstrip(".").lower())
    country_match = bool(terms & country_tokens)
    tld_match = country is not None and split.tld.lower() == country.tld.lower()

    return (admin1_match, first_letters, country_match, tld_match)


def assemble(candidate, secondary):
    """Feature vector for a ``CandidateMatch`` and its secondary booleans."""
    fv = np.zeros(N_FEATURES, dtype=np.float64)
    pop = population_log(candidate.location.population)
    for c in PrimaryCategory:
        n = candidate.letters[c]
        if n > 0:
            fv[3 * c] = 1.0
            fv[3 * c + 1] = pop
            fv[3 * c + 2] = n
    fv[3 * len(PrimaryCategory):] = [1.0 if s else 0.0 for s in secondary]
    return fv


def feature_vector(split, candidate, gazetteer):
    """Convenience wrapper: secondary features plus assembly."""
    sec = secondary_features(split, candidate.location, gazetteer.admin1,
                             gazetteer.countries, candidate.terms)
    return assemble(candidate, sec)
