"""Pair labeling, training-set sampling, logistic regression and ranking."""

import hashlib
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .candidates import CandidateMatch, PrimaryCategory
from .features import FEATURE_NAMES, LAYOUT_VERSION, N_FEATURES, assemble, secondary_features
from .splitter import DEFAULT_BLACKLIST, split as split_hostname

log = logging.getLogger(__name__)

MODEL_FORMAT = "rdnsgeo-model"
MODEL_VERSION = 1
DEFAULT_RADIUS_KM = 20.0
DEFAULT_THRESHOLD = 0.5
DEFAULT_EPOCHS = 200
DEFAULT_LEARNING_RATE = 1.0
DEFAULT_L2 = 1e-4

_N_PRIMARY = len(PrimaryCategory)


class LayoutMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SamplingParams:
    x: int = 200
    y: float = 10.0
    z: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.x <= 0 or self.y <= 0 or self.z <= 0:
            raise ValueError(f"sampling parameters must be positive: {self}")


@dataclass
class LabeledPair:
    split: object
    features: np.ndarray
    location_id: int
    label: bool
    domain: str

    @property
    def categories(self):
        return [PrimaryCategory(c) for c in range(_N_PRIMARY) if self.features[3 * c] > 0]


@dataclass
class PairSet:
    """Columnar storage for labeled pairs.

    ``host`` indexes into ``splits``; ``domain`` indexes into ``domains``.
    """

    X: np.ndarray
    y: np.ndarray
    location_ids: np.ndarray
    host: np.ndarray
    domain: np.ndarray
    splits: list = field(default_factory=list)
    domains: list = field(default_factory=list)

    def __len__(self):
        return len(self.y)

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, N_FEATURES)), np.zeros(0, dtype=bool), np.zeros(0, dtype=np.int64),
                   np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls.empty()
        domains = sorted({p.domain for p in pairs})
        dom_idx = {d: i for i, d in enumerate(domains)}
        splits, host_idx = [], {}
        hosts = []
        for p in pairs:
            k = id(p.split)
            if k not in host_idx:
                host_idx[k] = len(splits)
                splits.append(p.split)
            hosts.append(host_idx[k])
        return cls(np.array([p.features for p in pairs], dtype=np.float64),
                   np.array([p.label for p in pairs], dtype=bool),
                   np.array([p.location_id for p in pairs], dtype=np.int64),
                   np.array(hosts, dtype=np.int64),
                   np.array([dom_idx[p.domain] for p in pairs], dtype=np.int64),
                   splits, domains)

    def subset(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return PairSet(self.X[idx], self.y[idx], self.location_ids[idx], self.host[idx],
                       self.domain[idx], self.splits, self.domains)

    def categories(self):
        """Boolean matrix of primary categories present per pair."""
        return self.X[:, 0:3 * _N_PRIMARY:3] > 0

    def pairs(self):
        for i in range(len(self)):
            yield LabeledPair(self.splits[self.host[i]] if self.splits else None, self.X[i],
                              int(self.location_ids[i]), bool(self.y[i]),
                              self.domains[self.domain[i]] if self.domains else "")


# -- candidates and labels ----------------------------------------------------

def generate_candidates(split, index, rules=None):
    """Index lookup merged with host pattern matches, ordered by location id."""
    found = {cm.location.id: cm for cm in index.lookup(split.match_terms)}
    if rules is not None:
        for rule in rules.matching_rules(split):
            cm = found.get(rule.location.id)
            if cm is None:
                cm = found[rule.location.id] = CandidateMatch(rule.location)
            letters = rule.matched_letters
            for term in rule.terms:
                cm.add(PrimaryCategory.HOST_PATTERNS, letters, term)
    return [found[k] for k in sorted(found)]


def candidate_matrix(split, candidates, gazetteer):
    X = np.zeros((len(candidates), N_FEATURES), dtype=np.float64)
    for i, cm in enumerate(candidates):
        sec = secondary_features(split, cm.location, gazetteer.admin1, gazetteer.countries,
                                 cm.terms)
        X[i] = assemble(cm, sec)
    return X


def positive_index(candidates, truth, radius_km=DEFAULT_RADIUS_KM):
    """Index of the candidate nearest to ``truth`` if within ``radius_km``, else -1.

    Exact distance ties go to the earlier candidate.
    """
    if not candidates:
        return -1
    lats = np.array([c.location.latitude for c in candidates], dtype=np.float64)
    lons = np.array([c.location.longitude for c in candidates], dtype=np.float64)
    i, d = kernels.nearest_index(float(truth[0]), float(truth[1]), lats, lons)
    return i if d <= radius_km else -1


def label_pairs(corpus, index, rules=None, positive_radius_km=DEFAULT_RADIUS_KM):
    """Candidate pairs with labels for ``(SplitHostname, (lat, lon))`` records."""
    g = index.gazetteer
    Xs, ys, lids, hosts, doms = [], [], [], [], []
    splits, domains = [], {}
    for split, truth in corpus:
        cands = generate_candidates(split, index, rules)
        if not cands:
            continue
        h = len(splits)
        splits.append(split)
        d = domains.setdefault(split.domain, len(domains))
        pos = positive_index(cands, truth, positive_radius_km)
        Xs.append(candidate_matrix(split, cands, g))
        y = np.zeros(len(cands), dtype=bool)
        if pos >= 0:
            y[pos] = True
        ys.append(y)
        lids.append(np.array([c.location.id for c in cands], dtype=np.int64))
        hosts.append(np.full(len(cands), h, dtype=np.int64))
        doms.append(np.full(len(cands), d, dtype=np.int64))
    if not splits:
        return PairSet.empty()
    return PairSet(np.vstack(Xs), np.concatenate(ys), np.concatenate(lids),
                   np.concatenate(hosts), np.concatenate(doms), splits,
                   sorted(domains, key=domains.get))


# -- sampling -----------------------------------------------------------------

@dataclass
class SamplingStats:
    input_pairs: int = 0
    output_pairs: int = 0
    rounds: int = 0
    y_ratio: float = 0.0
    y_satisfied: bool = True
    positives: int = 0
    negatives: int = 0

    def as_dict(self):
        return dict(self.__dict__)


def category_ratio(cats):
    counts = cats.sum(axis=0)
    present = counts[counts > 0]
    if len(present) == 0:
        return 1.0
    return float(present.max() / present.min())


def _y_pass(cats, keep, y_ratio, rng):
    """One random-order pass dropping pairs whose categories are all over-represented."""
    counts = cats[keep].sum(axis=0).astype(np.int64)
    order = rng.permutation(np.flatnonzero(keep))
    dropped = 0
    for i in order:
        present = counts[counts > 0]
        limit = y_ratio * present.min()
        if present.max() <= limit:
            break
        row = cats[i]
        if row.any() and np.all(counts[row] > limit):
            keep[i] = False
            counts[row] -= 1
            dropped += 1
    return dropped


def _droppable_exists(cats, keep, y_ratio):
    counts = cats[keep].sum(axis=0)
    present = counts[counts > 0]
    if len(present) == 0:
        return False
    limit = y_ratio * present.min()
    over = counts > limit
    rows = cats[keep]
    return bool(np.any(rows.any(axis=1) & ~np.any(rows & ~over, axis=1)))


def sample(pairs, params, return_stats=False):
    """Stratified subsample bounding per-domain count, category skew and class ratio.

    1. At most ``x`` random pairs per domain.
    2. Random pairs whose primary categories are all more frequent than
       ``y`` times the rarest category are dropped until the ratio holds or
       no such pair remains.
    3. Random negatives are dropped down to ``floor(z * positives)``.

    Steps 2 and 3 repeat until neither changes anything.
    """
    stats = SamplingStats(input_pairs=len(pairs))
    if len(pairs) == 0:
        return (pairs, stats) if return_stats else pairs
    rng = np.random.default_rng(params.seed)
    keep = np.zeros(len(pairs), dtype=bool)
    for d in np.unique(pairs.domain):
        members = np.flatnonzero(pairs.domain == d)
        if len(members) > params.x:
            members = rng.choice(members, size=params.x, replace=False)
        keep[members] = True

    cats = pairs.categories()
    y = pairs.y
    while True:
        stats.rounds += 1
        changed = _y_pass(cats, keep, params.y, rng) > 0
        n_pos = int(np.count_nonzero(keep & y))
        neg = np.flatnonzero(keep & ~y)
        limit = int(np.floor(params.z * n_pos))
        if len(neg) > limit:
            keep[rng.choice(neg, size=len(neg) - limit, replace=False)] = False
            changed = True
        if not changed:
            break

    idx = np.flatnonzero(keep)
    out = pairs.subset(idx)
    stats.output_pairs = len(idx)
    stats.y_ratio = category_ratio(cats[keep])
    stats.y_satisfied = stats.y_ratio <= params.y or not _droppable_exists(cats, keep, params.y)
    stats.positives = int(np.count_nonzero(out.y))
    stats.negatives = len(out) - stats.positives
    return (out, stats) if return_stats else out


# -- model ----------------------------------------------------------------------

def _canonical(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


@dataclass
class Model:
    weights: np.ndarray
    bias: float
    layout_version: int = LAYOUT_VERSION
    feature_names: tuple = FEATURE_NAMES
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.bias):
            raise ValueError("model weights must be finite")

    def _body(self):
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "layout_version": self.layout_version,
            "feature_names": list(self.feature_names),
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "metadata": self.metadata,
        }

    def dumps(self):
        body = self._body()
        body["checksum"] = hashlib.sha256(_canonical(body).encode()).hexdigest()
        return json.dumps(body, sort_keys=True, indent=1) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.dumps())

    @classmethod
    def loads(cls, text):
        doc = json.loads(text)
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError("not a model file")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"model file version {doc.get('version')}, expected {MODEL_VERSION}")
        checksum = doc.pop("checksum", None)
        if checksum != hashlib.sha256(_canonical(doc).encode()).hexdigest():
            raise ValueError("model checksum mismatch")
        if doc["layout_version"] != LAYOUT_VERSION or tuple(doc["feature_names"]) != FEATURE_NAMES:
            raise LayoutMismatch(f"model feature layout {doc['layout_version']} does not match "
                                 f"layout {LAYOUT_VERSION}")
        return cls(np.array(doc["weights"], dtype=np.float64), doc["bias"], doc["layout_version"],
                   tuple(doc["feature_names"]), doc["metadata"])

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.loads(f.read())

    def logits(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != len(self.weights):
            raise LayoutMismatch(f"feature vector has {X.shape[-1]} values, model expects "
                                 f"{len(self.weights)}")
        return X @ self.weights + self.bias


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def predict(model, fv, threshold=DEFAULT_THRESHOLD):
    """``(plausible, confidence)`` for one feature vector."""
    p = float(sigmoid(model.logits(np.asarray(fv, dtype=np.float64).reshape(1, -1)))[0])
    return p >= threshold, p


def predict_many(model, X):
    return sigmoid(model.logits(X))


def _standardize(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd, mu, sd


def smoothness(Xs, l2):
    """Lipschitz constant of the logistic loss gradient on standardized data."""
    n = Xs.shape[0]
    A = np.hstack([Xs, np.ones((n, 1))])
    top = float(np.linalg.eigvalsh(A.T @ A / n)[-1])
    return 0.25 * top + l2


def train(samples, epochs=DEFAULT_EPOCHS, learning_rate=DEFAULT_LEARNING_RATE, l2=DEFAULT_L2,
          seed=0, metadata=None):
    """Fit logistic regression by full-batch gradient descent.

    ``samples`` is a ``PairSet`` or an ``(X, y)`` tuple. Features are
    standardized internally and the weights mapped back to raw units. The
    step is ``min(learning_rate, 1 / L)`` with ``L`` the gradient Lipschitz
    constant, so the training loss never increases.
    """
    if isinstance(samples, tuple):
        X, y = samples
    else:
        X, y = samples.X, samples.y
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n_pos = int(np.count_nonzero(y > 0.5))
    if n_pos == 0 or n_pos == len(y):
        raise ValueError("training needs at least one positive and one negative sample")
    Xs, mu, sd = _standardize(X)
    Xs = np.ascontiguousarray(Xs)
    step = min(learning_rate, 1.0 / smoothness(Xs, l2))
    rng = np.random.default_rng(seed)
    w0 = rng.normal(0.0, 0.01, X.shape[1])
    w, b, losses = kernels.gradient_descent(Xs, y, w0, 0.0, step, l2, epochs)
    w = np.asarray(w)
    raw_w = w / sd
    raw_b = float(b) - float(np.dot(raw_w, mu))
    meta = dict(metadata or {})
    meta.update({
        "epochs": epochs,
        "learning_rate": learning_rate,
        "effective_learning_rate": step,
        "l2": l2,
        "seed": seed,
        "n_samples": len(y),
        "n_positive": n_pos,
        "initial_loss": float(losses[0]),
        "final_loss": float(losses[-1]),
        "population_transform": "log10(population+1)",
        "kernel_backend": kernels.BACKEND,
    })
    model = Model(raw_w, raw_b, metadata=meta)
    model.losses = np.asarray(losses)
    return model


# -- ranking --------------------------------------------------------------------

def rank(candidates, confidences, threshold=DEFAULT_THRESHOLD):
    """Plausible candidates sorted by confidence, then population, then id."""
    out = [(cm.location, float(p)) for cm, p in zip(candidates, confidences) if p >= threshold]
    out.sort(key=lambda t: (-t[1], -t[0].population, t[0].id))
    return out


class Geolocator:
    """Read-only hostname to ranked-location pipeline."""

    def __init__(self, model, index, rules=None, threshold=DEFAULT_THRESHOLD,
                 blacklist=DEFAULT_BLACKLIST):
        self.model = model
        self.index = index
        self.rules = rules
        self.threshold = threshold
        self.blacklist = blacklist

    def split(self, hostname):
        return split_hostname(hostname, self.index.suffixes, self.blacklist)

    def candidates(self, split):
        cands = generate_candidates(split, self.index, self.rules)
        if not cands:
            return [], np.zeros(0)
        X = candidate_matrix(split, cands, self.index.gazetteer)
        return cands, predict_many(self.model, X)

    def geolocate_split(self, split):
        cands, conf = self.candidates(split)
        return rank(cands, conf, self.threshold)

    def geolocate(self, hostname):
        return self.geolocate_split(self.split(hostname))

    __call__ = geolocate


def geolocate(model, hostname, index, rules=None, threshold=DEFAULT_THRESHOLD):
    return Geolocator(model, index, rules, threshold).geolocate(hostname)


def pair_metrics(model, pairs, threshold=DEFAULT_THRESHOLD):
    """Pair-level precision and recall of the plausibility decision."""
    pred = predict_many(model, pairs.X) >= threshold
    tp = int(np.count_nonzero(pred & pairs.y))
    fp = int(np.count_nonzero(pred & ~pairs.y))
    fn = int(np.count_nonzero(~pred & pairs.y))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return {"precision": precision, "recall": recall, "tp": tp, "fp": fp, "fn": fn}
