"""Public suffix list: parsing and longest-match lookup."""

import logging

log = logging.getLogger(__name__)


def _to_ascii_label(label):
    if label.isascii():
        return label
    return "xn--" + label.encode("punycode").decode("ascii")


class SuffixSet:
    """Exact, wildcard (``*.``) and exception (``!``) rules.

    Unicode rules are also stored in their Punycode form so both spellings of
    an IDN hostname resolve to the same suffix.
    """

    def __init__(self, rules=()):
        self.exact = set()
        self.wildcard = set()  # parent of a "*." rule, e.g. "ck" for "*.ck"
        self.exception = set()  # full name of a "!" rule, e.g. "www.ck"
        for rule in rules:
            self.add(rule)

    def add(self, rule):
        rule = rule.strip().lower()
        if not rule:
            return
        forms = {rule}
        try:
            body = rule.lstrip("!")
            ascii_form = ".".join(_to_ascii_label(p) if p != "*" else p for p in body.split("."))
            forms.add(("!" if rule.startswith("!") else "") + ascii_form)
        except UnicodeError:
            log.debug("cannot punycode rule %r", rule)
        for r in forms:
            if r.startswith("!"):
                self.exception.add(r[1:])
            elif r.startswith("*."):
                self.wildcard.add(r[2:])
            else:
                self.exact.add(r)

    def __len__(self):
        return len(self.exact) + len(self.wildcard) + len(self.exception)

    # sorted state keeps pickled indexes byte-stable across processes
    def __getstate__(self):
        return {k: sorted(getattr(self, k)) for k in ("exact", "wildcard", "exception")}

    def __setstate__(self, state):
        for k, v in state.items():
            setattr(self, k, set(v))

    def match(self, hostname):
        """Return ``(public_suffix, listed)`` for a lowercase hostname.

        ``listed`` is False when only the implicit ``*`` rule applied, in
        which case the suffix is the last label.
        """
        labels = hostname.lower().rstrip(".").split(".")
        for i in range(len(labels)):
            cand = ".".join(labels[i:])
            if cand in self.exception:
                return ".".join(labels[i + 1:]), True
            if cand in self.exact:
                return cand, True
            if i + 1 < len(labels) and ".".join(labels[i + 1:]) in self.wildcard:
                return cand, True
        return labels[-1], False

    def public_suffix(self, hostname):
        return self.match(hostname)[0]

    def registrable_domain(self, hostname):
        """Suffix plus one label, or None if the name is itself a suffix."""
        if not hostname or hostname.startswith("."):
            return None
        hostname = hostname.lower().rstrip(".")
        labels = hostname.split(".")
        suffix, _ = self.match(hostname)
        n = suffix.count(".") + 1
        if len(labels) <= n:
            return None
        return ".".join(labels[-(n + 1):])


def parse_public_suffixes(lines):
    rules = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("//"):
            continue
        rules.append(line.split()[0])
    return SuffixSet(rules)


def load_public_suffixes(path):
    with open(path, encoding="utf-8") as f:
        return parse_public_suffixes(f)
