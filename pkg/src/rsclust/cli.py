"""Command-line front door: ``rsc {simulate,estimate,cluster,elbow,benchmark,windows}``.

Exit codes: 0 success, 1 I/O, 2 validation, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import pydantic

from . import io, simulate, svg
from .cluster import elbow_trace, full_trace, hierarchical_cluster, mean_curve, partition_from_trace
from .config import load_config
from .depth import central_region, functional_median
from .errors import RSCError
from .evaluate import (EYEBLINK, SHIFT, adjusted_rand_index, moving_window_experiment,
                       run_benchmark)
from .spectral import ChannelEnsemble, build_ensemble

log = logging.getLogger("rsclust")

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _threads(flag, cfg) -> int:
    if flag:
        return flag
    env = os.environ.get("RSC_THREADS")
    if env:
        return max(int(env), 1)
    return cfg.threads or os.cpu_count() or 1


def _echo_config(out: Path, cfg):
    io.write_text(out / "config.json", cfg.model_dump_json(indent=2) + "\n")


def _load_ensemble(cfg) -> ChannelEnsemble:
    path = Path(cfg.input)
    if path.suffix == ".json":
        if not path.exists():
            raise FileNotFoundError(f"input path {path} does not exist")
        return ChannelEnsemble.load(path)
    epochs, labels = io.read_epochs(path)
    return build_ensemble(epochs, cfg.n_freqs, cfg.smoothing.build(), labels, cfg.sample_rate_hz)


def _maybe_shift(ensemble: ChannelEnsemble, cfg) -> ChannelEnsemble:
    cont = cfg.contamination
    if cont.kind == SHIFT and cont.delta > 0:
        ensemble, _ = simulate.contaminate_shift(ensemble, cont.delta, cont.shift_magnitude,
                                                 _rng(cfg.seed, 1))
    elif cont.kind == EYEBLINK:
        raise ValueError("eyeblink contamination acts on raw epochs; set it in the simulate config")
    return ensemble


# --- subcommands ------------------------------------------------------------------

def cmd_simulate(cfg, out: Path, threads: int):
    design = cfg.design.build()
    if isinstance(design, simulate.BimodalDesign):
        dataset = simulate.bimodal_design(_rng(cfg.seed, 0), design)
    else:
        dataset = simulate.simulate_mixture(design, _rng(cfg.seed, 0))
    mask = np.zeros(dataset.epochs.shape[:2], dtype=bool)
    if cfg.contamination.kind == EYEBLINK:
        dataset, mask = simulate.contaminate_eyeblink(dataset, cfg.contamination.delta,
                                                      cfg.contamination.eyeblink.build(), _rng(cfg.seed, 1))
    io.write_epochs(out, dataset.epochs, dataset.labels, cfg.seed)
    io.write_truth(out / "truth.csv", dataset.labels, dataset.truth, cfg.seed)
    io.write_mask(out / "mask.csv", dataset.labels, mask, cfg.seed)
    _echo_config(out, cfg)
    print(f"wrote {len(dataset.labels)} channels x {dataset.epochs.shape[1]} epochs "
          f"x {dataset.epochs.shape[2]} samples to {out}")


def _curve_rows(ensemble: ChannelEnsemble):
    freqs = ensemble.grid.freqs
    for c, label in enumerate(ensemble.labels):
        for e in range(ensemble.n):
            for j, f in enumerate(freqs):
                yield label, e, j, float(f), float(ensemble.values[c, e, j])


def cmd_estimate(cfg, out: Path, threads: int):
    ensemble = _maybe_shift(_load_ensemble(cfg), cfg)
    ensemble.save(out / "ensemble.json")
    io.write_rows(out / "curves.csv", ["channel_label", "epoch", "freq_index", "freq", "value"],
                  _curve_rows(ensemble), cfg.seed)
    _echo_config(out, cfg)
    print(f"estimated {ensemble.m} x {ensemble.n} log-periodograms on {ensemble.grid.n_freqs} frequencies")


def _elbow_outputs(out: Path, result, measure: str, seed: int, plot: bool):
    rows = [(k, d, result.scores.get(k, "")) for k, d in result.series]
    io.write_rows(out / "elbow.csv", ["n_clusters", "min_dissimilarity", "score"], rows, seed)
    if plot:
        ks, ds = zip(*result.series)
        io.write_text(out / "elbow.svg", svg.line_chart(
            [(ks, ds, measure)], title=f"{measure} merge cost (suggested K={result.suggested_k})",
            xlabel="number of clusters", ylabel="minimum dissimilarity", markers=True))


def _cluster_curve_rows(ensemble: ChannelEnsemble, partition):
    freqs = ensemble.grid.freqs
    for cid, members in enumerate(partition.groups()):
        pooled = ensemble.values[members].reshape(-1, ensemble.grid.n_freqs)
        median = pooled[functional_median(pooled)] if pooled.shape[0] > 1 else pooled[0]
        if pooled.shape[0] > 1:
            region = central_region(pooled)
            lower, upper = region.lower, region.upper
        else:
            lower = upper = pooled[0]
        mean = mean_curve(pooled)
        for j, f in enumerate(freqs):
            yield cid, j, float(f), median[j], lower[j], upper[j], mean[j]


def cmd_cluster(cfg, out: Path, threads: int):
    ensemble = _maybe_shift(_load_ensemble(cfg), cfg)
    measure = cfg.measure
    if cfg.k is not None:
        partition, trace = hierarchical_cluster(ensemble, measure, cfg.k)
        k = cfg.k
    else:
        trace = full_trace(ensemble, measure)
        result = elbow_trace(trace, cfg.elbow.k_min, cfg.elbow.k_max)
        k = result.suggested_k
        partition = partition_from_trace(trace, ensemble.m, k)
        _elbow_outputs(out, result, measure, cfg.seed, cfg.plot)
        if not result.distinct_knee:
            print("no distinct knee in the merge trace; using k_min")
    io.write_partition(out / "partition.csv", ensemble.labels, partition.assignment, cfg.seed)
    io.write_trace(out / "trace.csv", trace, ensemble.labels, cfg.seed)
    io.write_rows(out / "cluster_curves.csv",
                  ["cluster_id", "freq_index", "freq", "median", "lower", "upper", "mean"],
                  _cluster_curve_rows(ensemble, partition), cfg.seed)
    summary = {"measure": measure, "k": k, "seed": cfg.seed}
    if cfg.truth:
        truth = io.read_truth(cfg.truth, ensemble.labels)
        summary["ari"] = adjusted_rand_index(truth, partition.assignment)
    io.write_text(out / "summary.json", json.dumps(summary, indent=2) + "\n")
    _echo_config(out, cfg)
    print(json.dumps(summary))


def cmd_elbow(cfg, out: Path, threads: int):
    ensemble = _maybe_shift(_load_ensemble(cfg), cfg)
    trace = full_trace(ensemble, cfg.measure)
    result = elbow_trace(trace, cfg.elbow.k_min, cfg.elbow.k_max)
    _elbow_outputs(out, result, cfg.measure, cfg.seed, cfg.plot)
    _echo_config(out, cfg)
    print(json.dumps({"measure": cfg.measure, "suggested_k": result.suggested_k,
                      "distinct_knee": result.distinct_knee}))


def cmd_benchmark(cfg, out: Path, threads: int):
    design = cfg.design.build()
    n_freqs = cfg.n_freqs
    if isinstance(design, simulate.BimodalDesign) and "n_freqs" not in cfg.model_fields_set:
        n_freqs = design.n_freqs
    report = run_benchmark(design, [c.build() for c in cfg.contaminations], cfg.methods, cfg.k,
                           cfg.replicates, cfg.seed, n_freqs, cfg.smoothing.build(), threads)
    rows = [(r.contamination, r.delta, r.method, r.mean_ari, r.sd_ari, r.seconds) for r in report.rows]
    io.write_rows(out / "benchmark.csv",
                  ["contamination", "delta", "method", "mean_ari", "sd_ari", "seconds"], rows, cfg.seed)
    _echo_config(out, cfg)
    for row in rows:
        print("{:<9} {:<5} {:<5} ARI={:.4f} (sd {:.4f}) {:.3f}s".format(*row))


def _window_curves(cfg):
    if cfg.input:
        epochs, labels = io.read_epochs(cfg.input)
    else:
        design = cfg.design.model_copy(update={"n_epochs": cfg.recording_epochs}).build()
        dataset = simulate.simulate_mixture(design, _rng(cfg.seed, 0))
        epochs, labels = dataset.epochs, dataset.labels
        if cfg.contamination.kind == EYEBLINK:
            epochs, _ = simulate.contaminate_eyeblink(epochs, cfg.contamination.delta,
                                                      cfg.contamination.eyeblink.build(), _rng(cfg.seed, 2))
    ensemble = build_ensemble(epochs, cfg.n_freqs, cfg.smoothing.build(), labels, cfg.sample_rate_hz)
    if cfg.contamination.kind == SHIFT and cfg.contamination.delta > 0:
        ensemble, _ = simulate.contaminate_shift(ensemble, cfg.contamination.delta,
                                                 cfg.contamination.shift_magnitude, _rng(cfg.seed, 1))
    return ensemble


def cmd_windows(cfg, out: Path, threads: int):
    ensemble = _window_curves(cfg)
    reports = moving_window_experiment(ensemble, cfg.window, cfg.step, cfg.k, cfg.methods, threads)
    summary = []
    for method, rep in reports.items():
        names = [f"w{s}" for s in rep.starts]
        io.write_matrix(out / f"windows_{method}.csv", rep.matrix, names, cfg.seed)
        q = np.percentile(rep.off_diagonal, [0, 25, 50, 75, 100])
        summary.append((method, len(rep.starts), *q, rep.iqr))
    io.write_rows(out / "windows_summary.csv",
                  ["method", "n_windows", "min", "q1", "median", "q3", "max", "iqr"], summary, cfg.seed)
    if cfg.plot:
        io.write_text(out / "windows.svg", svg.box_summary(
            {m: r.off_diagonal for m, r in reports.items()},
            title="pairwise window ARI", ylabel="ARI"))
    _echo_config(out, cfg)
    for row in summary:
        print("{:<5} windows={} median={:.4f} IQR={:.4f}".format(row[0], row[1], row[4], row[7]))


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "cluster": cmd_cluster,
    "elbow": cmd_elbow,
    "benchmark": cmd_benchmark,
    "windows": cmd_windows,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsc", description="Robust spectral clustering of multi-epoch time series.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__name__.replace("cmd_", ""))
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--threads", type=int, help="worker threads (default: RSC_THREADS or all cores)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.command, args.config, {"seed": args.seed})
        threads = _threads(args.threads, cfg)
        args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args.out, threads)
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except pydantic.ValidationError as exc:
        log.error("invalid configuration:\n%s", exc)
        return EXIT_VALIDATION
    except RSCError as exc:
        log.error("%s", exc)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        log.error("config is not valid JSON: %s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except (FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
