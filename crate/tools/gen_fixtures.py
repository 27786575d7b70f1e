#!/usr/bin/env python3
"""Writes the synthetic fixture set under fixtures/.

Everything is drawn from a fixed seed, so rerunning reproduces the files
byte for byte. Run from the repository root: python3 tools/gen_fixtures.py
"""

import datetime as dt
import math
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
SEED = 20240601
rng = random.Random(SEED)

START = dt.date(1998, 1, 5)
END = dt.date(2023, 6, 30)

N_VALID = 8858
N_POPULATED = 1106
N_EARLY = 49  # combos seeded before 2009; the 50th arrives in 2009
FIRST_IMPROVEMENT = dt.date(2004, 6, 1)
N_UNMAPPED = 5

ACCURACY = ["Top 1 Accuracy", "Top 5 Accuracy", "Accuracy", "F1", "BLEU", "mIoU", "Score", "Dice", "Exact Match"]
LOSS = ["Perplexity", "Error Rate", "MAE", "FID", "WER", "MPJPE"]

# (date, improvers, example combo, example metric)
ANNOTATIONS = [
    (dt.date(2005, 9, 14), 1, "unsupervised-dependency-parsing-on-penn", "Accuracy"),
    (dt.date(2007, 11, 6), 1, "video-quality-assessment-on-msu-sr-qa-dataset", "Score"),
    (dt.date(2012, 4, 17), 3, "atari-games-on-atari-2600-montezumas-revenge", "Score"),
    (dt.date(2015, 2, 24), 15, "atari-games-on-atari-2600-star-gunner", "Score"),
    (dt.date(2016, 8, 9), 28, "3d-human-pose-estimation-on-human36m", "MPJPE"),
    (dt.date(2017, 5, 30), 10, "atari-games-on-atari-2600-asteroids", "Score"),
    (dt.date(2018, 3, 13), 9, "image-generation-on-lsun-bedroom-256-x-256", "FID"),
    (dt.date(2019, 6, 11), 30, "code-generation-on-wikisql", "Exact Match"),
    (dt.date(2020, 10, 20), 43, "machine-translation-on-wmt2016-english-german", "BLEU"),
    (dt.date(2022, 1, 18), 11, "medical-image-segmentation-on-etis", "Dice"),
]
PLANTED = {a[0] for a in ANNOTATIONS}


def day(d0, d1):
    return d0 + dt.timedelta(days=rng.randint(0, (d1 - d0).days))


def free_day(d0, d1):
    while True:
        d = day(d0, d1)
        if d not in PLANTED:
            return d


def is_loss(metric):
    return metric in LOSS


def fmt(v):
    return f"{v:.4f}"


# ---------------------------------------------------------------- benchmark

def seed_dates():
    """Sorted seed dates: a few early combos, then growth after 2009."""
    early = sorted(free_day(START, dt.date(2003, 12, 31)) for _ in range(10))
    early += sorted(free_day(dt.date(2004, 1, 1), dt.date(2008, 12, 31)) for _ in range(N_EARLY - 10))
    rest = []
    t0, t1 = dt.date(2009, 2, 1).toordinal(), END.toordinal() - 20
    while len(rest) < N_VALID - N_EARLY:
        # density rising exponentially in calendar time
        u = rng.random()
        x = math.log(1 + u * (math.exp(2.2) - 1)) / 2.2
        d = dt.date.fromordinal(int(t0 + x * (t1 - t0)))
        if d not in PLANTED:
            rest.append(d)
    return early + sorted(rest)


def entry_target(populated):
    if populated:
        return 10 + min(int(rng.expovariate(1 / 9.0)), 70)
    u = rng.random()
    if u < 0.45:
        return 1
    if u < 0.84:
        return rng.randint(2, 4)
    return rng.randint(5, 9)


def build_combos():
    seeds = seed_dates()
    examples = {a[2]: a for a in ANNOTATIONS}
    # combos with >= 10 entries: every early combo plus a random draw of later ones
    late_candidates = [i for i in range(N_EARLY, N_VALID) if seeds[i] < dt.date(2021, 6, 1)]
    populated = set(range(N_EARLY)) | set(rng.sample(late_candidates, N_POPULATED - N_EARLY))

    # example combos take populated slots seeded well before their date
    names = [None] * N_VALID
    taken = set()
    for date, _, name, _ in ANNOTATIONS:
        pool = [i for i in sorted(populated) if i not in taken and seeds[i] < date - dt.timedelta(days=400)]
        if date.year < 2009:
            pool = [i for i in pool if seeds[i] < dt.date(2004, 1, 1)] or pool
        idx = pool[-1] if date.year >= 2009 else pool[0]
        taken.add(idx)
        names[idx] = name

    tasks = ["image-classification", "object-detection", "semantic-segmentation", "question-answering",
             "language-modelling", "speech-recognition", "node-classification", "atari-games",
             "text-classification", "pose-estimation", "image-generation", "machine-translation"]
    combos = []
    for i, seed in enumerate(seeds):
        name = names[i] or f"{rng.choice(tasks)}-on-dataset-{i:05d}"
        metric = examples[name][3] if name in examples else rng.choice(ACCURACY * 2 + LOSS)
        combos.append({
            "id": name,
            "metric": metric,
            "seed": seed,
            "target": entry_target(i in populated),
            "populated": i in populated,
            "entries": [],
        })
    return combos


def walk(combo):
    """Random-walk values on random dates after the seed."""
    loss = is_loss(combo["metric"])
    v = rng.uniform(20, 80) if not loss else rng.uniform(5, 60)
    best = v
    seed = combo["seed"]
    entries = [(seed, v)]
    lo = max(seed + dt.timedelta(days=1), FIRST_IMPROVEMENT + dt.timedelta(days=1))
    dates = sorted(free_day(lo, END) for _ in range(combo["target"] - 1))
    for d in dates:
        if rng.random() < 0.45:
            step = rng.uniform(0.002, 0.05)
            v = best / (1 + step) if loss else best * (1 + step)
        else:
            step = rng.uniform(0.0, 0.1)
            v = best * (1 + step) if loss else best * (1 - step)
        v = float(fmt(v))
        if (v < best) if loss else (v > best):
            best = v
        entries.append((d, v))
    combo["entries"] = entries


def best_before(combo, date):
    loss = is_loss(combo["metric"])
    vals = [v for d, v in combo["entries"] if d < date]
    return (min(vals) if loss else max(vals)) if vals else None


def plant(combos):
    by_id = {c["id"]: c for c in combos}
    # the first improvement in the corpus falls on FIRST_IMPROVEMENT
    first = next(c for c in combos if c["populated"] and c["seed"] < dt.date(2003, 1, 1))
    b = best_before(first, FIRST_IMPROVEMENT)
    first["entries"].append((FIRST_IMPROVEMENT, float(fmt(b * 1.02))))

    for date, count, name, _ in ANNOTATIONS:
        ex = by_id[name]
        # make sure the example has history to weight it
        while sum(1 for d, _ in ex["entries"] if d < date) < 6:
            d = free_day(max(ex["seed"] + dt.timedelta(days=1), FIRST_IMPROVEMENT + dt.timedelta(days=1)),
                         date - dt.timedelta(days=1))
            ex["entries"].append((d, ex["entries"][0][1]))
        pool = [c for c in combos
                if c["populated"] and c is not ex and c["seed"] < date - dt.timedelta(days=30)
                and all(d != date for d, _ in c["entries"])]
        chosen = [ex] + rng.sample(pool, count - 1)
        for c in chosen:
            b = best_before(c, date)
            z = 0.3 if c is ex else rng.uniform(0.002, 0.004)
            v = b * (1 - z) if is_loss(c["metric"]) else b * (1 + z)
            c["entries"].append((date, float(fmt(v))))


def write_benchmark():
    combos = build_combos()
    for c in combos:
        walk(c)
    plant(combos)

    rows = []
    eid = 0
    for c in combos:
        for d, v in sorted(c["entries"]):
            eid += 1
            rows.append([c["id"], d.isoformat(), c["metric"], fmt(v), f"e{eid:06d}"])

    # duplicate (combo, date, value) triples under fresh ids, on populated combos
    for c in rng.sample([c for c in combos if c["populated"]], 4):
        d, v = next(e for e in reversed(sorted(c["entries"])) if e[0] not in PLANTED)
        eid += 1
        rows.append([c["id"], d.isoformat(), c["metric"], fmt(v), f"e{eid:06d}"])
    rng.shuffle(rows)

    # exact repeats of an entry id are dropped at ingest
    for r in rng.sample(rows, 6):
        rows.insert(rng.randrange(len(rows)), list(r))
    # combos whose metric has no orientation
    for k in range(N_UNMAPPED):
        for j in range(3):
            eid += 1
            rows.insert(rng.randrange(len(rows)),
                        [f"toy-task-on-foo-{k}", day(dt.date(2015, 1, 1), END).isoformat(), "FooScore",
                         fmt(rng.uniform(1, 50)), f"e{eid:06d}"])
    lines = [",".join(r) for r in rows]
    bad = [
        "broken-row-on-nothing,2016-03-03,Accuracy",
        "image-classification-on-dataset-00100,2016-13-40,Accuracy,55.0,x000001",
        "image-classification-on-dataset-00100,2016-02-02,Accuracy,not-a-number,x000002",
        "image-classification-on-dataset-00100,2016-02-03,Accuracy,inf,x000003",
    ]
    for b in bad:
        lines.insert(rng.randrange(len(lines)), b)

    with open(os.path.join(ROOT, "benchmark_dump.csv"), "w") as f:
        f.write("combo_id,date,metric_name,value,entry_id\n")
        f.write("\n".join(lines) + "\n")

    with open(os.path.join(ROOT, "metric_orientation.csv"), "w") as f:
        f.write("metric_name,kind\n")
        for m in ACCURACY:
            f.write(f"{m},accuracy\n")
        for m in LOSS:
            f.write(f"{m},loss\n")
    return [a[0].isoformat() for a in ANNOTATIONS]


# ---------------------------------------------------------------- economics

YEARS = list(range(1961, 2023))


def price_index(rates, base_value, base_year):
    """Annual level from piecewise inflation rates, anchored at base_year."""
    level = {1961: 1.0}
    for y in YEARS[1:] + [2023]:
        r = next(r for (a, b, r) in rates if a <= y <= b)
        level[y] = level[y - 1] * (1 + r)
    k = base_value / level[base_year]
    return {y: level[y] * k for y in YEARS}


GDP_RATES = [(1962, 1969, 0.026), (1970, 1982, 0.064), (1983, 1999, 0.026), (2000, 2019, 0.019),
             (2020, 2020, 0.013), (2021, 2021, 0.045), (2022, 2022, 0.071), (2023, 2023, 0.03)]
CPI_RATES = [(1962, 1969, 0.027), (1970, 1982, 0.074), (1983, 1999, 0.030), (2000, 2019, 0.021),
             (2020, 2020, 0.012), (2021, 2021, 0.047), (2022, 2022, 0.080), (2023, 2023, 0.03)]

# real USD (2022) per GFLOP/sec
PRICE_ANCHORS = [("1961", 1.6e11), ("1984", 4.6e7), ("1997-06-01", 6.0e4), ("2000", 1.9e3),
                 ("2003", 1.4e2), ("2007", 6.0e1), ("2011-09-01", 2.1), ("2013", 1.4e-1),
                 ("2015", 9.0e-2), ("2017", 3.5e-2), ("2020", 3.0e-2), ("2022", 2.2e-2)]


def frac_year(s):
    if "-" not in s:
        return float(s)
    d = dt.date.fromisoformat(s)
    n = 366 if (d.year % 4 == 0 and (d.year % 100 != 0 or d.year % 400 == 0)) else 365
    return d.year + (d.timetuple().tm_yday - 1) / n


def price_at(t, anchors):
    if t <= anchors[0][0]:
        return anchors[0][1]
    if t >= anchors[-1][0]:
        return anchors[-1][1]
    for (t0, p0), (t1, p1) in zip(anchors, anchors[1:]):
        if t0 <= t <= t1:
            w = (t - t0) / (t1 - t0)
            return math.exp(math.log(p0) + w * (math.log(p1) - math.log(p0)))


def write_series(name, pairs, header="year,value", digits=None):
    with open(os.path.join(ROOT, name), "w") as f:
        f.write(header + "\n")
        for y, v in pairs:
            f.write(f"{y},{v if digits is None else round(v, digits)}\n")


def write_economics():
    gdp = price_index(GDP_RATES, 100.0, 2017)
    cpi = price_index(CPI_RATES, 245.12, 2017)
    write_series("gdp_deflator.csv", [(y, gdp[y]) for y in YEARS], digits=3)
    write_series("cpi.csv", [(y, cpi[y]) for y in YEARS], digits=3)
    gdp = {y: round(gdp[y], 3) for y in YEARS}

    # nominal investment (US$mn) and a net stock built with fluctuating depreciation
    inv, stock = {}, {}
    for y in YEARS:
        real = 900 * math.exp(0.055 * (y - 1961)) * (1 + 0.08 * math.sin(0.7 * (y - 1961)))
        inv[y] = round(real * gdp[y] / 100 * (1 + rng.gauss(0, 0.03)), 1)
    delta0 = 0.3
    stock[1961] = inv[1961] * (1 - 0.5 * delta0) / delta0
    for y in YEARS[1:]:
        d = min(max(0.3 + rng.gauss(0, 0.03) + 0.04 * math.sin(0.3 * (y - 1961)), 0.15), 0.5)
        stock[y] = (1 - d) * stock[y - 1] + (1 - 0.5 * d) * inv[y]
    stock = {y: round(v, 1) for y, v in stock.items()}
    write_series("investment_nominal.csv", [(y, inv[y]) for y in YEARS])
    write_series("net_stock_nominal.csv", [(y, stock[y]) for y in YEARS])

    with open(os.path.join(ROOT, "prices_usd_per_gflops.csv"), "w") as f:
        f.write("date,usd_per_gflops\n")
        for d, p in PRICE_ANCHORS:
            f.write(f"{d},{p}\n")

    # replicate the capital chain to calibrate the output proxies
    rebase = gdp[2017] / gdp[2022]
    anchors = sorted((frac_year(d), p * rebase / 1e9) for d, p in PRICE_ANCHORS)
    price = {y: price_at(float(y), anchors) for y in YEARS}
    inv_flops = {y: inv[y] * 1e6 * gdp[2017] / gdp[y] / price[y] for y in YEARS}
    delta = {}
    for y in YEARS[1:]:
        delta[y] = min(max((stock[y - 1] + inv[y] - stock[y]) / (stock[y - 1] + 0.5 * inv[y]), 0.0), 1.0)
    k = {1962: stock[1962] * 1e6 * gdp[2017] / gdp[1962] / price[1962]}
    for y in YEARS[2:]:
        k[y] = (1 - delta[y]) * k[y - 1] + (1 - 0.5 * delta[y]) * inv_flops[y]

    labor_years = [1970, 1980, 1990] + list(range(2000, 2023))
    l_cs, l_agg = {}, {}
    for y in labor_years:
        t = y - 1970
        l_cs[y] = round(260000 * math.exp(0.092 * t - 0.00105 * t * t) * (1 + rng.gauss(0, 0.01)))
        l_agg[y] = round(78e6 * math.exp(0.0135 * t) * (1 + rng.gauss(0, 0.005)))
    write_series("labor_cs.csv", [(y, l_cs[y]) for y in labor_years])
    write_series("labor_aggregate.csv", [(y, l_agg[y]) for y in labor_years])

    wage_years = list(range(1970, 2023))
    w_cs, w_agg = [], []
    for y in wage_years:
        real_agg = 43000 * math.exp(0.006 * (y - 1970)) * (1 + rng.gauss(0, 0.01))
        prem = 1.72 + 0.03 * math.sin(0.25 * (y - 1970)) + rng.gauss(0, 0.01)
        w_agg.append((y, round(real_agg * cpi[y] / cpi[2017])))
        w_cs.append((y, round(real_agg * prem * cpi[y] / cpi[2017])))
    write_series("wages_cs.csv", w_cs)
    write_series("wages_aggregate.csv", w_agg)

    # 2017 industry accounts (US$mn)
    shares = [("rnd", 160600.0, 200000.0), ("aggregate", 10432500.0, 19500000.0)]
    with open(os.path.join(ROOT, "factor_shares_2017.csv"), "w") as f:
        f.write("industry,compensation,value_added\n")
        for row in shares:
            f.write(",".join(str(x) for x in row) + "\n")
    alpha = 1 - shares[0][1] / shares[0][2]

    model = {y: alpha * math.log(k[y]) + (1 - alpha) * math.log(l_cs[y]) for y in labor_years}
    write_proxies(model)


def noise_scale(dev, e, r2):
    """Noise multiplier giving R-squared `r2` for observed = model + s * e."""
    d = sum(x * x for x in dev)
    x = sum(a * b for a, b in zip(dev, e))
    ee = sum(b * b for b in e)
    a = r2 * ee
    b = -2 * (1 - r2) * x
    c = -(1 - r2) * d
    return (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)


def calibrated(model, years, r2):
    """Log output on `years` with intercept 0 and the requested fit quality."""
    m = [model[y] for y in years]
    mean = sum(m) / len(m)
    dev = [v - mean for v in m]
    e = [rng.gauss(0, 1) for _ in years]
    em = sum(e) / len(e)
    e = [v - em for v in e]
    s = noise_scale(dev, e, r2)
    return {y: d + s * v for y, d, v in zip(years, dev, e)}


def write_proxies(model):
    decades = [1970, 1980, 1990]
    papers = calibrated(model, decades + list(range(2000, 2023)), 0.88)
    write_series("proxy_papers.csv", [(y, round(math.exp(v) * 9000)) for y, v in papers.items()])
    patents = calibrated(model, decades + list(range(2000, 2022)), 0.93)
    write_series("proxy_patents.csv", [(y, round(math.exp(v) * 2500)) for y, v in patents.items()])

    lm = calibrated(model, [2012, 2013, 2014, 2016, 2017, 2018, 2019, 2020, 2022], 0.71)
    top = max(lm.values())
    # stored as perplexity; the manifest maps it to (0, 1] by reciprocal
    write_series("proxy_lm_perplexity.csv", [(y, round(math.exp(-(v - top)) * 20.5, 2)) for y, v in lm.items()])

    ic = calibrated(model, list(range(2011, 2023)), 0.66)
    top = max(ic.values())
    write_series("proxy_ic_top1.csv", [(y, round(math.exp(v - top) * 0.91, 4)) for y, v in ic.items()])

    elo = calibrated(model, list(range(2001, 2023)), 0.79)
    write_series("proxy_elo.csv", [(y, round(2750 + 400 * v)) for y, v in elo.items()])


# ---------------------------------------------------------------- scaling

def write_scaling():
    l_min, b, beta, g, gamma = 1.69, 406.4, 0.34, 410.7, 0.28
    with open(os.path.join(ROOT, "scaling_joint.csv"), "w") as f:
        f.write("D,P,L\n")
        for p_exp in [7.0, 7.5, 8.0, 8.5, 9.0, 9.5, 10.0]:
            for d_exp in [9.0, 9.5, 10.0, 10.5, 11.0, 11.5]:
                p, d = 10 ** p_exp, 10 ** d_exp
                loss = l_min + b / d ** beta + g / p ** gamma
                loss *= 1 + rng.gauss(0, 0.002)
                f.write(f"{d:.6g},{p:.6g},{loss:.6f}\n")
    with open(os.path.join(ROOT, "scaling_power.csv"), "w") as f:
        f.write("C,Y\n")
        for i in range(16):
            c = 10 ** (17 + 0.5 * i)
            y = 3.2e-3 * c ** 0.15 * math.exp(rng.gauss(0, 0.02))
            f.write(f"{c:.6g},{y:.6f}\n")


MANIFEST = """\
# Synthetic fixture run. Paths are relative to this file.
output_dir = "../out"

[benchmark]
dump = "benchmark_dump.csv"
orientation = "metric_orientation.csv"
drop_duplicate_entry_ids = true
annotation_dates = [{dates}]

[capital]
investment = "investment_nominal.csv"
net_stock = "net_stock_nominal.csv"
gdp_deflator = "gdp_deflator.csv"
prices = "prices_usd_per_gflops.csv"
price_base_year = 2022
base_year = 2017
seed = "net-stock"
extrapolation = "hold-flat"

[units]
investment_usd_per_unit = 1e6
net_stock_usd_per_unit = 1e6
flops_per_price_unit = 1e9
capital_report_flops_per_unit = 1e15

[labor]
cs = "labor_cs.csv"
aggregate = "labor_aggregate.csv"

[wages]
cs = "wages_cs.csv"
aggregate = "wages_aggregate.csv"
cpi = "cpi.csv"
base_year = 2017

[shares]
file = "factor_shares_2017.csv"
use = "rnd"

[scenario]
phi_ai = 1.0

[proxies]
papers = "proxy_papers.csv"
patents = "proxy_patents.csv"
lm = "proxy_lm_perplexity.csv"
ic = "proxy_ic_top1.csv"
elo = "proxy_elo.csv"
lm_map = "reciprocal"
ic_map = "identity"
reference = "papers"

[scaling]
joint = "scaling_joint.csv"
power = "scaling_power.csv"
pass_factor = 6.0
allocation_compute = [1e20, 1e21, 1e22, 1e23, 1e24]
"""


def main():
    os.makedirs(ROOT, exist_ok=True)
    dates = write_benchmark()
    write_economics()
    write_scaling()
    with open(os.path.join(ROOT, "manifest.toml"), "w") as f:
        f.write(MANIFEST.format(dates=", ".join(f'"{d}"' for d in dates)))


if __name__ == "__main__":
    main()
