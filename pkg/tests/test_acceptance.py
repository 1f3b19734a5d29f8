"""Acceptance gate: criteria 1 to 8 at their stated tolerances.

Every criterion prints one PASS/FAIL line in the terminal summary. Seeds are
fixed here once; they are not tuned.
"""

import itertools
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import direct_dft, record
from rsclust import simulate
from rsclust.cluster import MEASURES, elbow_trace, full_trace
from rsclust.depth import band_counts, central_region, modified_band_depth
from rsclust.evaluate import (Contamination, _seeded, adjusted_rand_index, moving_window_experiment,
                              run_benchmark)
from rsclust.spectral import dft, log_periodograms, periodogram
from test_depth import brute_force_mbd
from test_evaluate import hand_ari, set_partitions

SEED = 20261016
REPLICATES = 20
THREADS = os.cpu_count() or 1

NULL = Contamination()
SHIFT = Contamination("shift", 0.2)
BLINK = Contamination("eyeblink", 0.3)


@pytest.fixture(scope="module")
def mixture_benchmark():
    start = time.perf_counter()
    report = run_benchmark(simulate.MixtureDesign(), [NULL, SHIFT, BLINK], MEASURES, 5,
                           REPLICATES, SEED, threads=THREADS)
    return report, time.perf_counter() - start


def _means(report, cont):
    return {m: report.get(cont.kind, cont.delta, m).mean_ari for m in MEASURES}


def _fmt(values):
    return " ".join(f"{k}={v:.4f}" for k, v in values.items())


def test_criterion_1_null_recovery(mixture_benchmark):
    report, seconds = mixture_benchmark
    ari = _means(report, NULL)
    ok = ari["FM"] >= 0.98 and ari["MEAN"] >= 0.98 and ari["CR"] >= 0.95 and seconds <= 600
    record(1, ok, f"null, R={REPLICATES}: {_fmt(ari)} (need FM, MEAN >= 0.98, CR >= 0.95); "
                  f"whole benchmark {seconds:.0f}s")
    assert ok


def test_criterion_2_shift_ordering(mixture_benchmark):
    ari = _means(mixture_benchmark[0], SHIFT)
    ok = ari["FM"] >= 0.95 and ari["CR"] >= 0.88 and ari["MEAN"] <= 0.80
    record(2, ok, f"shift delta=0.2: {_fmt(ari)} (need FM >= 0.95, CR >= 0.88, MEAN <= 0.80)")
    assert ok


BATCHES = 10


def test_criterion_3_eyeblink_ordering(mixture_benchmark):
    ari = _means(mixture_benchmark[0], BLINK)
    # further independent batches of R replicates for the ordering frequency
    batch_means = [(ari["FM"], ari["MEAN"])]
    for b in range(1, BATCHES):
        extra = run_benchmark(simulate.MixtureDesign(), [BLINK], ("FM", "MEAN"), 5, REPLICATES,
                              SEED + b, threads=THREADS)
        batch_means.append((extra.rows[0].mean_ari, extra.rows[1].mean_ari))
    ordered = sum(fm > mean for fm, mean in batch_means) / BATCHES
    ok = ari["FM"] >= 0.92 and ari["CR"] >= 0.88 and ari["MEAN"] < ari["FM"] and ordered >= 0.9
    record(3, ok, f"eyeblink delta=0.3: {_fmt(ari)}; FM > MEAN in {ordered:.0%} of {BATCHES} batches "
                  f"(need FM >= 0.92, CR >= 0.88, MEAN < FM, ordering >= 90%)")
    assert ok


def test_criterion_4_bimodal_reversal():
    design = simulate.BimodalDesign()
    conts = [Contamination(), Contamination("eyeblink", 0.25)]
    report = run_benchmark(design, conts, ("FM", "CR"), design.n_clusters, REPLICATES, SEED,
                           n_freqs=design.n_freqs, threads=THREADS)
    parts, ok = [], True
    for c in conts:
        cr = report.get(c.kind, c.delta, "CR").mean_ari
        fm = report.get(c.kind, c.delta, "FM").mean_ari
        ok &= cr >= 0.95 and fm <= 0.60
        parts.append(f"delta={c.delta}: CR={cr:.4f} FM={fm:.4f}")
    record(4, ok, "bimodal " + "; ".join(parts) + " (need CR >= 0.95, FM <= 0.60)")
    assert ok


ELBOW_RUNS = 50


def test_criterion_5_elbow():
    hits = {m: 0 for m in MEASURES}
    for r in range(ELBOW_RUNS):
        data = simulate.simulate_mixture(simulate.MixtureDesign(), _seeded(SEED, 5, r))
        curves = log_periodograms(data.epochs, 50)
        for m in MEASURES:
            hits[m] += elbow_trace(full_trace(curves, m), 2, 10).suggested_k == 5
    rates = {m: hits[m] / ELBOW_RUNS for m in MEASURES}
    ok = all(v >= 0.8 for v in rates.values())
    record(5, ok, "K=5 suggested in " + " ".join(f"{m}={v:.0%}" for m, v in rates.items())
           + f" of {ELBOW_RUNS} runs (need >= 80% for each measure)")
    assert ok


def test_criterion_6_window_stability():
    # 3 minutes of one-second epochs holds 15 windows of 30 s every 10 s
    design = simulate.MixtureDesign(n_epochs=177)
    data = simulate.simulate_mixture(design, _seeded(SEED, 6, 0))
    curves = log_periodograms(data.epochs, 50)
    curves, _ = simulate.contaminate_shift(curves, 0.2, 4.0, _seeded(SEED, 6, 1))
    reports = moving_window_experiment(curves, 30, 10, 7, MEASURES, THREADS)
    cr, fm, mean = reports["CR"], reports["FM"], reports["MEAN"]
    ok = (len(cr.starts) == 15 and cr.median >= fm.median and cr.median >= mean.median
          and cr.iqr < fm.iqr and cr.iqr < mean.iqr)
    record(6, ok, "window ARI median/IQR: " + " ".join(
        f"{m}={r.median:.3f}/{r.iqr:.3f}" for m, r in reports.items())
        + " (need CR median >= others, CR IQR strictly smallest)")
    assert ok


def test_criterion_7_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    failures = []

    # MBD vs brute force over every N <= 8 and T <= 20, tie-heavy and continuous values
    for n, t in itertools.product(range(2, 9), range(1, 21)):
        for y in (rng.integers(-2, 3, size=(n, t)).astype(float), rng.normal(size=(n, t))):
            pairs = n * (n - 1) // 2
            if [Fraction(int(c), pairs * t) for c in band_counts(y)] != brute_force_mbd(y):
                failures.append(f"MBD N={n} T={t}")

    # ARI vs hand contingency on all partitions of up to 6 items
    saw_half = False
    for n in range(2, 7):
        parts = list(set_partitions(n))
        for a, b in itertools.product(parts, parts):
            expected = hand_ari(a, b)
            got = adjusted_rand_index(a, b)
            if (expected is None and got != 1.0) or (expected is not None and got != float(expected)):
                failures.append(f"ARI {a} {b}")
            saw_half |= got == -0.5
    if not saw_half:
        failures.append("ARI -0.5 case missing")

    # DFT and periodogram vs direct sums
    worst = 0.0
    for length in (8, 31, 64, 250, 1000):
        x = rng.normal(size=length)
        ref = direct_dft(x)
        worst = max(worst, np.max(np.abs(dft(x) - ref)) / np.max(np.abs(ref)))
        ref_power = np.abs(ref[: length // 2]) ** 2
        got_power = periodogram(x, length // 2).values
        worst = max(worst, np.max(np.abs(got_power - ref_power) / ref_power))
    if worst > 1e-9:
        failures.append(f"DFT relative error {worst:.2e}")

    # Parseval on 1000 random epochs
    epochs = rng.normal(size=(1000, 200)) * rng.uniform(0.01, 100, size=(1000, 1))
    parseval = max(abs(np.sum(np.abs(dft(e)) ** 2) / np.sum(e ** 2) - 1) for e in epochs)
    if parseval > 1e-9:
        failures.append(f"Parseval relative error {parseval:.2e}")

    ok = not failures
    record(7, ok, f"MBD/ARI exact, DFT rel err {worst:.1e}, Parseval rel err {parseval:.1e}"
           + ("" if ok else f"; failures: {failures[:5]}"))
    assert ok


def test_criterion_8_invariance():
    rng = np.random.default_rng(SEED + 8)
    failures = []
    for _ in range(200):
        n = int(rng.integers(2, 12))
        y = rng.normal(size=(n, 25))
        order = modified_band_depth(y).order
        for name, f in (("exp", np.exp), ("cube", lambda v: v ** 3), ("affine", lambda v: 3 * v - 2),
                        ("arctan", np.arctan)):
            if not np.array_equal(modified_band_depth(f(y)).order, order):
                failures.append(f"MBD order under {name}")
        y = rng.integers(-40, 40, size=(n, 25)) / 8.0
        area = central_region(y).area
        c, s = rng.uniform(-50, 50), rng.uniform(0.05, 20)
        if not np.isclose(central_region(y + c).area, area, rtol=1e-9, atol=1e-9):
            failures.append("area translation")
        if not np.isclose(central_region(s * y).area, s * area, rtol=1e-9, atol=1e-12):
            failures.append("area scaling")
        a, b = rng.integers(0, 4, 30), rng.integers(0, 4, 30)
        perm = rng.permutation(4)
        if adjusted_rand_index(perm[a], b) != adjusted_rand_index(a, b):
            failures.append("ARI relabeling")

    small = simulate.MixtureDesign(m_channels=10, weights=((1.0, 0, 0, 0, 0), (0.2, 0, 0, 0, 0.1)),
                                   n_epochs=10, length=200)
    conts = [NULL, SHIFT, BLINK]
    runs = [run_benchmark(small, conts, MEASURES, 2, 4, SEED, n_freqs=20, threads=t) for t in (1, 2, 4)]
    if any([r.aris for r in run.rows] != [r.aris for r in runs[0].rows] for run in runs[1:]):
        failures.append("benchmark depends on thread count")
    curves = rng.normal(size=(6, 50, 12))
    windows = [moving_window_experiment(curves, 20, 10, 3, MEASURES, t) for t in (1, 3)]
    if any(not np.array_equal(windows[0][m].matrix, windows[1][m].matrix) for m in MEASURES):
        failures.append("windows depend on thread count")

    ok = not failures
    record(8, ok, "MBD transform order, area translation/scaling, ARI relabeling, thread determinism"
           + ("" if ok else f"; failures: {sorted(set(failures))}"))
    assert ok
