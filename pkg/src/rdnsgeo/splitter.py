"""Hostname validation and decomposition into matchable terms.

A hostname is converted to Unicode, the public suffix and registrable domain
are cut off, and the remaining subdomain is split three ways: on dots
(level 1), on hyphens inside each dotted label (level 2) and on letter/digit
boundaries inside each hyphenated piece (level 3). Every term remembers the
position of its dotted label counted from the right, starting at 1.
"""

import re
from dataclasses import dataclass
from importlib import resources

MAX_HOSTNAME_LENGTH = 253
MAX_LABEL_LENGTH = 63

_LABEL_RE = re.compile(r"^[a-z0-9](?:[a-z0-9-]*[a-z0-9])?$")
_RUN_RE = re.compile(r"[0-9]+|[^0-9]+")


class InvalidHostname(ValueError):
    """Raised by :func:`split` with the name of the rule that failed."""

    def __init__(self, hostname, rule):
        super().__init__(f"{hostname!r}: {rule}")
        self.hostname = hostname
        self.rule = rule


@dataclass(frozen=True)
class Term:
    text: str
    level: int  # 1 = dotted label, 2 = hyphen piece, 3 = letter/digit run
    position: int  # dotted label index from the right, 1-based


@dataclass(frozen=True)
class SplitHostname:
    raw: str
    unicode_form: str
    public_suffix: str
    tld: str
    domain: str
    subdomain: str
    levels: tuple  # three tuples of Term
    pruned_terms: tuple  # surviving leaf terms
    # distinct surviving terms at all levels without hyphens; index lookup keys
    match_terms: tuple = ()

    def level_texts(self, level):
        return [t.text for t in self.levels[level - 1]]

    @property
    def pruned_texts(self):
        return [t.text for t in self.pruned_terms]


def load_blacklist(path=None):
    """Read a one-term-per-line blacklist; ``#`` starts a comment."""
    if path is None:
        text = (resources.files("rdnsgeo") / "data" / "blacklist.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    terms = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            terms.add(line)
    return frozenset(terms)


DEFAULT_BLACKLIST = load_blacklist()


def _syntax_error(raw):
    """Name of the first RFC 1123 rule ``raw`` breaks, or None."""
    if not raw:
        return "empty hostname"
    name = raw[:-1] if raw.endswith(".") else raw
    if len(name) > MAX_HOSTNAME_LENGTH:
        return "hostname longer than 253 characters"
    for label in name.lower().split("."):
        if not label:
            return "empty label"
        if len(label) > MAX_LABEL_LENGTH:
            return "label longer than 63 characters"
        if not _LABEL_RE.match(label):
            if label.startswith("-") or label.endswith("-"):
                return "label starts or ends with a hyphen"
            return "label has characters other than letters, digits and hyphens"
    return None


def to_unicode(raw):
    """Decode Punycode (``xn--``) labels; undecodable labels pass through.

    A decoded label must be non-ASCII and encode back to the same ACE form,
    otherwise the original label is kept.
    """
    out = []
    for label in raw.split("."):
        if label[:4].lower() == "xn--":
            try:
                decoded = label[4:].encode("ascii").decode("punycode")
                if not decoded.isascii() and decoded.encode("punycode") == label[4:].lower().encode():
                    label = decoded
            except (UnicodeError, ValueError):
                pass
        out.append(label)
    return ".".join(out)


def _check(raw, suffixes):
    err = _syntax_error(raw)
    if err:
        return err, None
    uni = to_unicode(raw.rstrip(".")).lower()
    suffix, listed = suffixes.match(uni)
    if not listed:
        return "no known public suffix", None
    if uni.count(".") <= suffix.count("."):
        return "hostname is itself a public suffix", None
    return None, (uni, suffix)


def validate(raw, suffixes):
    """True iff ``raw`` follows host naming rules and ends in a listed suffix."""
    return _check(raw, suffixes)[0] is None


def _is_pruned(text, blacklist):
    return not text or text.isdigit() or text in blacklist


def split(raw, suffixes, blacklist=DEFAULT_BLACKLIST):
    err, parsed = _check(raw, suffixes)
    if err:
        raise InvalidHostname(raw, err)
    uni, suffix = parsed
    labels = uni.split(".")
    n_suffix = suffix.count(".") + 1
    domain = ".".join(labels[-(n_suffix + 1):])
    sub_labels = labels[:-(n_suffix + 1)]

    level1, level2, level3 = [], [], []
    n = len(sub_labels)
    for i, label in enumerate(sub_labels):
        pos = n - i
        level1.append(Term(label, 1, pos))
        for piece in label.split("-"):
            if not piece:
                continue
            level2.append(Term(piece, 2, pos))
            for run in _RUN_RE.findall(piece):
                level3.append(Term(run, 3, pos))

    # a leaf keeps the shallowest level at which its exact text occurs
    shallowest = {}
    for term in level1 + level2:
        shallowest.setdefault((term.text, term.position), term.level)
    pruned, seen = [], set()
    for leaf in level3:
        key = (leaf.text, leaf.position)
        if key in seen or _is_pruned(leaf.text, blacklist):
            continue
        seen.add(key)
        pruned.append(Term(leaf.text, shallowest.get(key, 3), leaf.position))

    match_terms = []
    seen_text = set()
    for term in pruned + level1 + level2:
        t = term.text
        if t in seen_text or "-" in t or _is_pruned(t, blacklist):
            continue
        seen_text.add(t)
        match_terms.append(t)

    return SplitHostname(
        raw=raw,
        unicode_form=uni,
        public_suffix=suffix,
        tld="." + labels[-1],
        domain=domain,
        subdomain=".".join(sub_labels),
        levels=(tuple(level1), tuple(level2), tuple(level3)),
        pruned_terms=tuple(pruned),
        match_terms=tuple(match_terms),
    )
