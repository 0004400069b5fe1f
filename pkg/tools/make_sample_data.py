"""Regenerate the bundled sample datasets.

Development-only helper. Needs ``geonamescache``, ``airportsdata`` and
``publicsuffixlist`` unpacked somewhere (``--src``); none of them are runtime
dependencies of the package.

Writes two sets of files in the on-disk formats the loaders read:

* ``src/rdnsgeo/data/sample``: ~10k real cities (GeoNames cities1000 rows),
  airport codes mapped onto those cities, admin1/country tables and the real
  public suffix list.
* ``tests/fixtures/mini``: the same formats restricted to a few hundred
  cities, used by the unit and acceptance tests.

CLLI and UN/LOCODE tables are only partly real: the codes listed in
``REAL_CLLI``/``REAL_LOCODE`` are genuine, the rest are synthesized with the
same shape (4 letters of city + state, country + 3 letters) so the sample is
usable end to end. Do not treat the synthesized codes as reference data.
"""

import argparse
import csv
import json
import math
import os
import shutil
import unicodedata

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Hand-added rows missing from cities1000: (id, name, lat, lon, cc, admin1, pop)
EXTRA_CITIES = [
    (9900001, "Fort Huachuca", 31.5273, -110.3607, "US", "AZ", 6500),
]

PAPER_PLACES = {
    "Osaka", "Warsaw", "New York City", "Toronto", "London", "Seattle",
    "Los Angeles", "Frankfurt am Main", "Tucker", "Seoul", "Toulon",
    "Johnstown", "Paris", "Barcelona", "Rochester", "Rocha", "Portland",
    "Salem", "Salmoral", "McMinnville", "Chicago", "Greenville", "Riverside",
    "Oxford", "Fort Myers", "Pool", "Mobile", "Malton", "Pixley", "Boise",
    "Melbourne", "Vicenza", "Hiroshima", "Cuiabá", "Pleasanton", "Denver",
    "Tacoma", "Irvine", "Houston", "Richardson", "Cicero", "Santa Clara",
    "Miami", "St. Louis", "Livonia", "Brecksville", "Fair Oaks", "Nassau",
    "Sierra Vista", "Tucson", "Phoenix", "Minneapolis", "Eugene", "Beaverton",
    "Sacramento", "Atlanta", "San Francisco", "San Jose", "Philadelphia",
    "Columbus", "Cincinnati", "Tokyo", "Yokohama", "Hamburg", "Berlin",
    "Munich", "Madrid", "Valencia", "Lyon", "Marseille", "Nice", "Montevideo",
    "Sydney", "Brisbane", "Vancouver", "Montreal", "Ottawa", "Manchester",
    "Birmingham", "Boston", "Dallas", "Austin", "San Antonio", "San Diego",
    "Washington", "Baltimore", "Detroit", "Cleveland", "Pittsburgh",
    "Kraków", "Busan", "Nagoya", "Sapporo", "Kobe", "Kyoto", "Fukuoka",
}

MINI_COUNTRIES = {"US", "CA", "GB", "FR", "DE", "JP", "ES", "PL", "KR", "UY", "AU"}

ADMIN1 = {
    "CA": [("01", "Alberta", 5883102, "AB"), ("02", "British Columbia", 5909050, "BC"),
           ("03", "Manitoba", 6065171, "MB"), ("04", "New Brunswick", 6087430, "NB"),
           ("05", "Newfoundland and Labrador", 6354959, "NL"), ("07", "Nova Scotia", 6091530, "NS"),
           ("08", "Ontario", 6093943, "ON"), ("09", "Prince Edward Island", 6113358, "PE"),
           ("10", "Quebec", 6115047, "QC"), ("11", "Saskatchewan", 6141242, "SK"),
           ("12", "Yukon", 6185811, "YT"), ("13", "Northwest Territories", 6091069, "NT"),
           ("14", "Nunavut", 6091732, "NU")],
    "GB": [("ENG", "England", 6269131, None), ("SCT", "Scotland", 2638360, None),
           ("WLS", "Wales", 2634895, None), ("NIR", "Northern Ireland", 2641364, None)],
    "FR": [("11", "Ile-de-France", 3012874, "IDF"), ("93", "Provence-Alpes-Cote d'Azur", 2985244, "PACA"),
           ("84", "Auvergne-Rhone-Alpes", 11071625, "ARA"), ("76", "Occitanie", 11071623, None),
           ("75", "Nouvelle-Aquitaine", 11071620, None), ("32", "Hauts-de-France", 11071624, None),
           ("44", "Grand Est", 11071622, None), ("52", "Pays de la Loire", 2988289, None),
           ("53", "Bretagne", 3030293, None), ("28", "Normandie", 11071621, None),
           ("24", "Centre-Val de Loire", 3027939, None), ("27", "Bourgogne-Franche-Comte", 11071619, None),
           ("94", "Corse", 3023518, None)],
    "DE": [("01", "Baden-Wuerttemberg", 2953481, "BW"), ("02", "Bavaria", 2951839, "BY"),
           ("04", "Hamburg", 2911297, "HH"), ("05", "Hesse", 2905330, "HE"),
           ("07", "North Rhine-Westphalia", 2861876, "NRW"), ("16", "Berlin", 2950157, "BE")],
    "JP": [("01", "Aichi", 1865694, None), ("07", "Fukuoka", 1863958, None),
           ("11", "Hiroshima", 1862413, None), ("12", "Hokkaido", 2130037, None),
           ("13", "Hyogo", 1862047, None), ("19", "Kanagawa", 1860291, None),
           ("22", "Kyoto", 1857907, None), ("32", "Osaka", 1853904, None),
           ("34", "Saitama", 1853226, None), ("40", "Tokyo", 1850144, None)],
    "ES": [("29", "Madrid", 3117732, None), ("51", "Andalusia", 2593109, None),
           ("55", "Castille and Leon", 3336900, None), ("56", "Catalonia", 3336901, None),
           ("60", "Valencia", 2593113, None)],
    "PL": [("72", "Lesser Poland", 858787, None), ("78", "Masovia", 858785, None)],
    "KR": [("10", "Busan", 1838519, None), ("11", "Seoul", 1835847, None)],
    "UY": [("10", "Montevideo", 3441572, None), ("14", "Rocha", 3440645, None)],
    "AU": [("01", "Australian Capital Territory", 2177478, "ACT"), ("02", "New South Wales", 2155400, "NSW"),
           ("03", "Northern Territory", 2064513, "NT"), ("04", "Queensland", 2152274, "QLD"),
           ("05", "South Australia", 2061327, "SA"), ("06", "Tasmania", 2147291, "TAS"),
           ("07", "Victoria", 2145234, "VIC"), ("08", "Western Australia", 2058645, "WA")],
    "IT": [("07", "Lazio", 3174976, None), ("09", "Lombardy", 3174618, None), ("20", "Veneto", 3164604, None)],
}

# (code, city, region, country)
REAL_CLLI = [
    ("chcgil", "Chicago", "IL", "US"), ("chchil", "Chicago", "IL", "US"),
    ("chciil", "Chicago", "IL", "US"), ("chcjil", "Chicago", "IL", "US"),
    ("chclil", "Chicago", "IL", "US"), ("tukrga", "Tucker", "GA", "US"),
    ("salmor", "Salem", "OR", "US"), ("ptldor", "Portland", "OR", "US"),
    ("sttlwa", "Seattle", "WA", "US"), ("irvnca", "Irvine", "CA", "US"),
    ("hstntx", "Houston", "TX", "US"), ("rcsntx", "Richardson", "TX", "US"),
    ("cicril", "Cicero", "IL", "US"), ("sntcca", "Santa Clara", "CA", "US"),
    ("miamfl", "Miami", "FL", "US"), ("stlsmo", "St. Louis", "MO", "US"),
    ("livnmi", "Livonia", "MI", "US"), ("frokca", "Fair Oaks", "CA", "US"),
    ("pltnca", "Pleasanton", "CA", "US"), ("sndgca", "San Diego", "CA", "US"),
    ("snantx", "San Antonio", "TX", "US"), ("nycmny", "New York City", "NY", "US"),
    ("lsanca", "Los Angeles", "CA", "US"), ("dnvrco", "Denver", "CO", "US"),
    ("atlnga", "Atlanta", "GA", "US"), ("dllstx", "Dallas", "TX", "US"),
    ("bstnma", "Boston", "MA", "US"), ("phlapa", "Philadelphia", "PA", "US"),
    ("snfcca", "San Francisco", "CA", "US"), ("rochny", "Rochester", "NY", "US"),
    ("rchsmn", "Rochester", "MN", "US"), ("mplsmn", "Minneapolis", "MN", "US"),
]

# (code, name, country)
REAL_LOCODE = [
    ("FRPAR", "Paris", "FR"), ("KRSEL", "Seoul", "KR"), ("DEFRA", "Frankfurt am Main", "DE"),
    ("DEHAM", "Hamburg", "DE"), ("DEBER", "Berlin", "DE"), ("GBLON", "London", "GB"),
    ("USNYC", "New York City", "US"), ("USLAX", "Los Angeles", "US"), ("USSEA", "Seattle", "US"),
    ("USCHI", "Chicago", "US"), ("JPOSA", "Osaka", "JP"), ("JPTYO", "Tokyo", "JP"),
    ("PLWAW", "Warsaw", "PL"), ("ESBCN", "Barcelona", "ES"), ("FRTLN", "Toulon", "FR"),
    ("CATOR", "Toronto", "CA"), ("AUMEL", "Melbourne", "AU"), ("AUSYD", "Sydney", "AU"),
    ("KRPUS", "Busan", "KR"), ("UYMVD", "Montevideo", "UY"),
]

VOWELS = set("aeiou")


def ascii_fold(s):
    return unicodedata.normalize("NFKD", s).encode("ascii", "ignore").decode()


def haversine(a_lat, a_lon, b_lat, b_lon):
    p1, p2 = math.radians(a_lat), math.radians(b_lat)
    dp, dl = p2 - p1, math.radians(b_lon - a_lon)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * 6371.0 * math.asin(min(1.0, math.sqrt(h)))


def select_cities(cities, mini):
    out = []
    for v in cities.values():
        pop = v["population"]
        cc = v["countrycode"]
        named = v["name"] in PAPER_PLACES
        if mini:
            keep = named and cc in MINI_COUNTRIES and (pop >= 5000 or v["name"] in
                                                       ("Salmoral", "Pool", "Pixley", "Malton"))
            keep = keep or (cc in MINI_COUNTRIES and pop >= 400000)
        else:
            keep = (pop >= 100000 or (cc == "US" and pop >= 20000)
                    or (cc in MINI_COUNTRIES and pop >= 40000)
                    or (named and (pop >= 1000 or v["name"] in ("Salmoral", "Pool", "Pixley"))))
        if keep:
            out.append(v)
    out.sort(key=lambda v: v["geonameid"])
    return out


def clean_alt(names, limit):
    seen, res = set(), []
    for n in names:
        n = n.replace(",", " ").replace("\t", " ").strip()
        if n and n not in seen:
            seen.add(n)
            res.append(n)
    return res if limit is None else res[:limit]


def write_cities(path, rows, alt_limit):
    with open(path, "w", encoding="utf-8", newline="") as f:
        for v in rows:
            cols = [str(v["geonameid"]), v["name"], ascii_fold(v["name"]) or v["name"],
                    ",".join(clean_alt(v["alternatenames"], alt_limit)),
                    f"{v['latitude']:.5f}", f"{v['longitude']:.5f}", "P", "PPL",
                    v["countrycode"], "", v["admin1code"], "", "", "",
                    str(v["population"]), "", "0", v.get("timezone", ""), "2024-01-01"]
            f.write("\t".join(cols) + "\n")
        for cid, name, lat, lon, cc, a1, pop in EXTRA_CITIES:
            cols = [str(cid), name, name, "", f"{lat:.5f}", f"{lon:.5f}", "P", "PPL", cc, "",
                    a1, "", "", "", str(pop), "", "0", "", "2024-01-01"]
            f.write("\t".join(cols) + "\n")


def all_rows(rows):
    res = [dict(geonameid=v["geonameid"], name=v["name"], countrycode=v["countrycode"],
                admin1code=v["admin1code"], population=v["population"],
                latitude=v["latitude"], longitude=v["longitude"]) for v in rows]
    for cid, name, lat, lon, cc, a1, pop in EXTRA_CITIES:
        res.append(dict(geonameid=cid, name=name, countrycode=cc, admin1code=a1,
                        population=pop, latitude=lat, longitude=lon))
    return res


def write_admin1(path, src):
    states = json.load(open(os.path.join(src, "geonamescache/data/us_states.json")))
    with open(path, "w", encoding="utf-8") as f:
        for code, st in sorted(states.items()):
            f.write(f"US.{code}\t{st['name']}\t{ascii_fold(st['name'])}\t{st['geonameid']}\n")
        for cc, regions in sorted(ADMIN1.items()):
            for code, name, gid, _ in regions:
                f.write(f"{cc}.{code}\t{name}\t{ascii_fold(name)}\t{gid}\n")


def write_country_info(path, src):
    countries = json.load(open(os.path.join(src, "geonamescache/data/countries.json")))
    with open(path, "w", encoding="utf-8") as f:
        f.write("# GeoNames countryInfo subset\n")
        f.write("#ISO\tISO3\tISO-Numeric\tfips\tCountry\tCapital\tArea(in sq km)\tPopulation\t"
                "Continent\ttld\tCurrencyCode\tCurrencyName\tPhone\tPostal Code Format\t"
                "Postal Code Regex\tLanguages\tgeonameid\tneighbours\tEquivalentFipsCode\n")
        for iso, c in sorted(countries.items()):
            if not c.get("tld"):
                continue
            cols = [iso, c["iso3"], str(c["isonumeric"]), c.get("fips", ""), c["name"],
                    c.get("capital", ""), str(c.get("areakm2", "")), str(c.get("population", "")),
                    c.get("continentcode", ""), c["tld"], c.get("currencycode", ""),
                    c.get("currencyname", ""), str(c.get("phone", "")), "",
                    "", c.get("languages", ""), str(c["geonameid"]), c.get("neighbours", ""), ""]
            f.write("\t".join(cols) + "\n")


def nearest(rows, lat, lon, cc=None, max_km=25.0):
    best, best_d = None, max_km
    for r in rows:
        if cc and r["countrycode"] != cc:
            continue
        d = haversine(lat, lon, r["latitude"], r["longitude"])
        if d <= best_d:
            best, best_d = r, d
    return best


def by_name(rows):
    idx = {}
    for r in rows:
        idx.setdefault((r["countrycode"], ascii_fold(r["name"]).lower()), []).append(r)
    return idx


def write_alternate_names(path, src, rows):
    names = by_name(rows)
    by_cc = {}
    for r in rows:
        by_cc.setdefault(r["countrycode"], []).append(r)
    lines = []
    for cc, regions in sorted(ADMIN1.items()):
        for _, _, gid, abbr in regions:
            if abbr:
                lines.append((gid, "abbr", abbr))
    with open(os.path.join(src, "airportsdata/airports.csv"), encoding="utf-8") as f:
        for ap in csv.DictReader(f):
            if not ap["iata"]:
                continue
            lat, lon, cc = float(ap["lat"]), float(ap["lon"]), ap["country"]
            cands = names.get((cc, ascii_fold(ap["city"]).lower()), [])
            cands = [c for c in cands if haversine(lat, lon, c["latitude"], c["longitude"]) < 60]
            if cands:
                city = min(cands, key=lambda c: haversine(lat, lon, c["latitude"], c["longitude"]))
            else:
                city = nearest(by_cc.get(cc, []), lat, lon)
            if city is None:
                continue
            gid = city["geonameid"]
            lines.append((gid, "iata", ap["iata"]))
            if len(ap["icao"]) == 4 and ap["icao"].isalpha():
                lines.append((gid, "icao", ap["icao"]))
            lid = ap.get("lid") or ""
            if cc == "US" and lid.isalpha() and len(lid) in (3, 4) and lid != ap["iata"]:
                lines.append((gid, "faac", lid))
    with open(path, "w", encoding="utf-8") as f:
        for i, (gid, lang, name) in enumerate(lines, start=1):
            f.write(f"{i}\t{gid}\t{lang}\t{name}\t\t\t\t\t\t\n")


def skeleton(name):
    letters = [ch for ch in ascii_fold(name).lower() if ch.isalpha()]
    if not letters:
        return ""
    out = letters[0] + "".join(ch for ch in letters[1:] if ch not in VOWELS)
    return (out + "".join(letters))[:4] if len(out) < 4 else out[:4]


def write_clli(path, rows, synth_min_pop):
    names = by_name(rows)
    used, out = set(), []
    for code, city, region, cc in REAL_CLLI:
        cands = [r for r in names.get((cc, ascii_fold(city).lower()), []) if r["admin1code"] == region]
        if cands:
            r = cands[0]
            out.append((code, city, region, cc, r["latitude"], r["longitude"]))
            used.add(code)
    for r in sorted(rows, key=lambda r: -r["population"]):
        if r["countrycode"] not in ("US", "CA") or r["population"] < synth_min_pop:
            continue
        region = r["admin1code"]
        if r["countrycode"] == "CA":
            region = next((a for c, _, _, a in ADMIN1["CA"] if c == region), None)
        if not region or not region.isalpha():
            continue
        code = (skeleton(r["name"]) + region).lower()
        if len(code) != 6 or code in used:
            continue
        used.add(code)
        out.append((code, r["name"], region, r["countrycode"], r["latitude"], r["longitude"]))
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["code", "city", "region", "country", "lat", "lon"])
        for code, city, region, cc, lat, lon in out:
            w.writerow([code.upper(), city, region, cc, f"{lat:.5f}", f"{lon:.5f}"])


def locode_coords(lat, lon):
    def part(v, width, pos, neg):
        hemi = pos if v >= 0 else neg
        v = abs(v)
        deg = int(v)
        mins = int(round((v - deg) * 60))
        if mins == 60:
            deg, mins = deg + 1, 0
        return f"{deg:0{width}d}{mins:02d}{hemi}"
    return f"{part(lat, 2, 'N', 'S')} {part(lon, 3, 'E', 'W')}"


def write_unlocode(path, rows, synth_min_pop):
    names = by_name(rows)
    used, out = set(), []
    for code, name, cc in REAL_LOCODE:
        cands = sorted(names.get((cc, ascii_fold(name).lower()), []), key=lambda r: -r["population"])
        if cands:
            out.append((code, cands[0]["name"], cc, cands[0]))
            used.add(code)
    for r in sorted(rows, key=lambda r: -r["population"]):
        if r["population"] < synth_min_pop:
            continue
        letters = "".join(ch for ch in ascii_fold(r["name"]).upper() if ch.isalpha())
        if len(letters) < 3:
            continue
        for tail in (letters[:3], letters[0] + "".join(ch for ch in letters[1:] if ch not in "AEIOU")[:2]):
            code = r["countrycode"] + tail
            if len(code) == 5 and code not in used:
                used.add(code)
                out.append((code, r["name"], r["countrycode"], r))
                break
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        for i, (code, name, cc, r) in enumerate(out):
            coords = "" if i % 17 == 16 else locode_coords(r["latitude"], r["longitude"])
            w.writerow(["", cc, code[2:], name, ascii_fold(name), r["admin1code"], "AI",
                        "1234----", "1801", "", coords, ""])


def build(out_dir, src, cities, mini):
    os.makedirs(out_dir, exist_ok=True)
    rows = select_cities(cities, mini)
    write_cities(os.path.join(out_dir, "cities1000.txt"), rows, alt_limit=None)
    everything = all_rows(rows)
    write_admin1(os.path.join(out_dir, "admin1CodesASCII.txt"), src)
    write_country_info(os.path.join(out_dir, "countryInfo.txt"), src)
    write_alternate_names(os.path.join(out_dir, "alternateNames.txt"), src, everything)
    write_clli(os.path.join(out_dir, "clli.csv"), everything, 20000 if mini else 40000)
    write_unlocode(os.path.join(out_dir, "unlocode.csv"), everything, 100000)
    shutil.copy(os.path.join(src, "publicsuffixlist/public_suffix_list.dat"),
                os.path.join(out_dir, "public_suffix_list.dat"))
    print(out_dir, len(everything), "cities")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--src", required=True, help="directory with unpacked source wheels")
    args = ap.parse_args()
    cities = json.load(open(os.path.join(args.src, "geonamescache/data/cities1000.json")))
    build(os.path.join(ROOT, "src/rdnsgeo/data/sample"), args.src, cities, mini=False)
    build(os.path.join(ROOT, "tests/fixtures/mini"), args.src, cities, mini=True)
    shutil.copy(os.path.join(args.src, "publicsuffixlist/test_psl.txt"),
                os.path.join(ROOT, "tests/fixtures/test_psl.txt"))


if __name__ == "__main__":
    main()
