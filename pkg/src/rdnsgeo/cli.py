"""Command-line entry point: ``rdnsgeo <command> ...``.

Exit status is 0 on success, 1 on a usage error and 2 on a data error
(missing or malformed input files, invalid hostnames).
"""

import argparse
import logging
import os
import sys
from collections import Counter

from . import classifier, corpus, evaluation, patterns
from .candidates import CandidateIndex
from .gazetteer import load_gazetteer, sample_data_dir
from .splitter import DEFAULT_BLACKLIST, InvalidHostname, load_blacklist, split
from .suffixes import load_public_suffixes

log = logging.getLogger("rdnsgeo")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DATA_ENV = "RDNS_GEO_DATA"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return parse


def _fraction(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"must be within [0, 1]: {text!r}")
    return v


def _thresholds(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold list: {text!r}")
    if not vals or any(v <= 0 for v in vals) or vals != sorted(vals):
        raise argparse.ArgumentTypeError("thresholds must be positive and ascending")
    return tuple(int(v) if v.is_integer() else v for v in vals)


def _need(*paths):
    for p in paths:
        if p is not None and not os.path.exists(p):
            raise DataError(f"no such file or directory: {p}")


def _blacklist(args):
    if getattr(args, "blacklist", None):
        _need(args.blacklist)
        return load_blacklist(args.blacklist)
    return DEFAULT_BLACKLIST


def _load_index(path):
    _need(path)
    return CandidateIndex.load(path)


def _load_rules(path, index):
    if not path:
        return None
    _need(path)
    return patterns.RuleSet.load(path, index.gazetteer.cities)


def _labeled_corpus(path, index, blacklist):
    """``(SplitHostname, (lat, lon))`` pairs; invalid hostnames are skipped."""
    _need(path)
    stats = Counter()
    out = []
    for rec in corpus.ingest(path, stats=stats):
        if rec.truth is None:
            raise DataError(f"{path}: record for {rec.hostname} has no coordinates")
        try:
            out.append((split(rec.hostname, index.suffixes, blacklist), rec.truth))
        except InvalidHostname:
            stats["invalid"] += 1
    if stats["malformed"] or stats["invalid"]:
        log.warning("%s: skipped %d malformed lines and %d invalid hostnames", path,
                    stats["malformed"], stats["invalid"])
    if not out:
        raise DataError(f"{path}: no usable labeled hostnames")
    return out


# -- commands -----------------------------------------------------------------------

def cmd_build_index(args):
    geonames = args.geonames or os.environ.get(DATA_ENV)
    if args.sample:
        geonames = str(sample_data_dir())
    if not geonames:
        raise UsageError(f"--geonames, --sample or ${DATA_ENV} is required")
    _need(geonames, args.clli, args.unlocode, args.psl)
    warnings = Counter()
    g = load_gazetteer(geonames, clli=args.clli, unlocode=args.unlocode, psl=args.psl,
                       warnings=warnings)
    if not g.cities:
        raise DataError(f"{geonames}: no cities loaded")
    if len(g.suffixes) == 0:
        raise DataError("no public suffix list found; pass --psl")
    index = CandidateIndex.build(g, min_population_for_derived=args.min_population)
    index.save(args.out)
    print(f"cities\t{len(g.cities)}")
    print(f"keys\t{len(index)}")
    for reason, n in sorted(warnings.items()):
        print(f"skipped\t{reason}\t{n}")
    return EXIT_OK


def cmd_mine_patterns(args):
    index = _load_index(args.index)
    data = _labeled_corpus(args.corpus, index, _blacklist(args))
    rules = patterns.mine(data, index.gazetteer.cities, min_support_ratio=args.min_support,
                          radius_km=args.radius, min_examples=args.min_examples, seed=args.seed)
    rules.save(args.out)
    print(f"rules\t{len(rules)}")
    return EXIT_OK


def cmd_train(args):
    index = _load_index(args.index)
    rules = _load_rules(args.patterns, index)
    data = _labeled_corpus(args.corpus, index, _blacklist(args))
    pairs = classifier.label_pairs(data, index, rules, positive_radius_km=args.radius)
    params = classifier.SamplingParams(args.x, args.y, args.z, args.seed)
    meta = {"positive_radius_km": args.radius, "threshold": classifier.DEFAULT_THRESHOLD,
            "sampling": None if args.no_sampling else
            {"x": params.x, "y": params.y, "z": params.z, "seed": params.seed}}
    if not args.no_sampling:
        pairs, stats = classifier.sample(pairs, params, return_stats=True)
        meta["sampling_stats"] = stats.as_dict()
    try:
        model = classifier.train(pairs, epochs=args.epochs, learning_rate=args.learning_rate,
                                 l2=args.l2, seed=args.seed, metadata=meta)
    except ValueError as e:
        raise DataError(str(e))
    model.save(args.out)
    print(f"samples\t{len(pairs)}")
    print(f"final_loss\t{model.metadata['final_loss']:.6f}")
    return EXIT_OK


def cmd_geolocate(args):
    index = _load_index(args.index)
    _need(args.model)
    model = classifier.Model.load(args.model)
    rules = _load_rules(args.patterns, index)
    loc = classifier.Geolocator(model, index, rules, args.threshold, _blacklist(args))
    g = index.gazetteer
    status = EXIT_OK
    print("hostname\trank\tcity\tadmin1\tcountry\tlat\tlon\tconfidence")
    for hostname in args.hostnames:
        try:
            ranked = loc.geolocate(hostname)
        except InvalidHostname as e:
            print(f"error: {e}", file=sys.stderr)
            status = EXIT_DATA
            continue
        for rank, (city, conf) in enumerate(ranked[:args.top], 1):
            admin = g.admin1_of(city)
            admin_name = admin.ascii_name if admin else city.admin1_code
            print(f"{hostname}\t{rank}\t{city.name}\t{admin_name}\t{city.country_code.upper()}\t"
                  f"{city.latitude:.5f}\t{city.longitude:.5f}\t{conf:.6f}")
    return status


def cmd_evaluate(args):
    _need(args.test)
    if args.predictions:
        _need(args.predictions)
        locator = evaluation.PredictionTable.load(args.predictions)
        suffixes = None
    else:
        if not (args.model and args.index):
            raise UsageError("evaluate needs --model and --index, or --predictions")
        index = _load_index(args.index)
        _need(args.model)
        model = classifier.Model.load(args.model)
        rules = _load_rules(args.patterns, index)
        locator = classifier.Geolocator(model, index, rules, args.threshold, _blacklist(args))
        suffixes = index.suffixes
    records = []
    for rec in corpus.ingest(args.test):
        if rec.truth is None:
            raise DataError(f"{args.test}: record for {rec.hostname} has no coordinates")
        if suffixes is not None:
            domain = suffixes.registrable_domain(rec.hostname) or ""
        else:
            domain = ".".join(rec.hostname.split(".")[-2:])
        records.append((rec.hostname, domain, rec.truth))
    if not records:
        raise DataError(f"{args.test}: empty test corpus")
    report = evaluation.evaluate(locator, records, args.thresholds, args.decided_only)
    if args.report_out:
        report.write_csv(args.report_out)
    if args.cdf_out:
        report.write_cdf_tsv(args.cdf_out)
    o = report.overall
    print(f"hostnames\t{o.total}\ndecided\t{o.decided}\ncoverage\t{o.coverage:.4f}\n"
          f"median_error_km\t{o.median_error_km:.2f}\nrmse_km\t{o.rmse_km:.2f}\n"
          f"combined_score\t{o.combined_score:.4f}")
    return EXIT_OK


def cmd_analyze(args):
    _need(args.corpus)
    if args.index:
        index = _load_index(args.index)
        suffixes = index.suffixes
    else:
        index = None
        psl = args.psl or os.path.join(sample_data_dir(), "public_suffix_list.dat")
        _need(psl)
        suffixes = load_public_suffixes(psl)
    stats = Counter()
    result = corpus.analyze(corpus.ingest(args.corpus, args.format, stats), suffixes, index,
                            _blacklist(args))
    sys.stdout.write(result.format(args.top_tlds))
    if stats["malformed"]:
        print(f"malformed\t{stats['malformed']}")
    return EXIT_OK


def cmd_generate_synthetic(args):
    index = _load_index(args.index)
    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    syn = corpus.generate_synthetic(index, args.domains, args.hosts, schemes, args.seed,
                                    args.decoy_fraction)
    syn.write(args.out, args.manifest)
    print(f"hostnames\t{len(syn)}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="rdnsgeo", description="Geolocate IP addresses from reverse DNS hostnames.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build-index", help="build the candidate index from gazetteer files")
    b.add_argument("--geonames", help=f"GeoNames directory (default ${DATA_ENV})")
    b.add_argument("--sample", action="store_true", help="use the bundled sample gazetteer")
    b.add_argument("--clli")
    b.add_argument("--unlocode")
    b.add_argument("--psl")
    b.add_argument("--min-population", type=int, default=10000)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build_index)

    m = sub.add_parser("mine-patterns", help="mine per-domain host pattern rules")
    m.add_argument("--corpus", required=True)
    m.add_argument("--index", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--min-support", type=_fraction, default=patterns.DEFAULT_MIN_SUPPORT_RATIO)
    m.add_argument("--radius", type=_positive(float), default=patterns.DEFAULT_RADIUS_KM)
    m.add_argument("--min-examples", type=_positive(int), default=patterns.DEFAULT_MIN_EXAMPLES)
    m.add_argument("--blacklist")
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_mine_patterns)

    t = sub.add_parser("train", help="train the plausibility classifier")
    t.add_argument("--corpus", required=True)
    t.add_argument("--index", required=True)
    t.add_argument("--patterns")
    t.add_argument("--x", type=_positive(int), default=200)
    t.add_argument("--y", type=_positive(float), default=10.0)
    t.add_argument("--z", type=_positive(float), default=3.0)
    t.add_argument("--no-sampling", action="store_true")
    t.add_argument("--radius", type=_positive(float), default=classifier.DEFAULT_RADIUS_KM)
    t.add_argument("--epochs", type=_positive(int), default=classifier.DEFAULT_EPOCHS)
    t.add_argument("--learning-rate", type=_positive(float),
                   default=classifier.DEFAULT_LEARNING_RATE)
    t.add_argument("--l2", type=float, default=classifier.DEFAULT_L2)
    t.add_argument("--blacklist")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    g = sub.add_parser("geolocate", help="rank candidate locations for hostnames")
    g.add_argument("--model", required=True)
    g.add_argument("--index", required=True)
    g.add_argument("--patterns")
    g.add_argument("--threshold", type=_fraction, default=classifier.DEFAULT_THRESHOLD)
    g.add_argument("--top", type=_positive(int), default=10)
    g.add_argument("--blacklist")
    g.add_argument("hostnames", nargs="+")
    g.set_defaults(func=cmd_geolocate)

    e = sub.add_parser("evaluate", help="error-distance report on a labeled test corpus")
    e.add_argument("--model")
    e.add_argument("--index")
    e.add_argument("--patterns")
    e.add_argument("--predictions", help="hostname,lat,lon CSV from another system")
    e.add_argument("--test", required=True)
    e.add_argument("--report-out")
    e.add_argument("--cdf-out")
    e.add_argument("--thresholds", type=_thresholds, default=evaluation.DEFAULT_THRESHOLDS)
    e.add_argument("--decided-only", action="store_true",
                   help="CDF over decided hostnames only")
    e.add_argument("--threshold", type=_fraction, default=classifier.DEFAULT_THRESHOLD)
    e.add_argument("--blacklist")
    e.set_defaults(func=cmd_evaluate)

    a = sub.add_parser("analyze", help="validity and naive match statistics")
    a.add_argument("--corpus", required=True)
    a.add_argument("--format", choices=corpus.FORMATS)
    a.add_argument("--index")
    a.add_argument("--psl")
    a.add_argument("--top-tlds", type=_positive(int), default=20)
    a.add_argument("--blacklist")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("generate-synthetic", help="write a synthetic labeled corpus")
    s.add_argument("--index", required=True)
    s.add_argument("--domains", type=_positive(int), default=50)
    s.add_argument("--hosts", type=_positive(int), default=2000)
    s.add_argument("--schemes", default=",".join(corpus.SCHEMES))
    s.add_argument("--decoy-fraction", type=_fraction, default=0.3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_generate_synthetic)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help and usage errors
        return e.code
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"rdnsgeo: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError, KeyError) as e:
        print(f"rdnsgeo: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
