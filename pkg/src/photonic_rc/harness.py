"""Seeded experiment runs, oracle comparisons, near-field rendering and sweeps."""
import csv
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig, to_dict
from .errors import NonConvergence
from .oracles import exhaustive_oracle, ridge_oracle
from .pipeline import BatchEvaluator, ReservoirComputer
from .readout import normalize, raw_output, threshold_classify
from .tasks import evaluate, generate_test_batch, generate_train_batch
from .trainer import fit_exponential_decay, train

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class ResultsBundle:
    config: ExperimentConfig
    seeds: dict
    weights: np.ndarray
    trace: object
    metrics: list
    summary: dict
    timings: dict = field(default_factory=dict)


def build_computer(config: ExperimentConfig, n_nodes=None) -> ReservoirComputer:
    seeds = config.resolved_seeds()
    params = dataclasses.replace(config.reservoir, seed=seeds["coupling"])
    if n_nodes is not None:
        params = dataclasses.replace(params, n_nodes=n_nodes)
    return ReservoirComputer(config.encoder, params, config.optics,
                             fiber_seed=seeds["fiber"], imaging_seed=seeds["imaging"])


def _evaluator(config: ExperimentConfig, rc: ReservoirComputer, seeds: dict, frozen=None):
    spec = config.task
    tcfg = config.trainer
    batch = generate_train_batch(spec, tcfg.batch_size, seeds["train_batch"])
    return BatchEvaluator(rc, spec, batch, noise_seed=seeds["noise"],
                          frozen_noise=tcfg.frozen_noise if frozen is None else frozen,
                          resample_seed=seeds["train_batch"] if tcfg.resample_batch else None)


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def run_experiment(config: ExperimentConfig, out_dir=None, save_matrices=False) -> ResultsBundle:
    """Train on one task, then test on ``config.test_repeats`` fresh batches.

    Writes ``summary.json``, ``trace.csv`` and ``weights.txt`` to ``out_dir``
    when given; ``save_matrices`` adds ``fiber.bin`` and ``imaging.bin`` so the
    optical realization can be pinned via ``optics.fiber_path`` and
    ``optics.imaging_path``.
    """
    t0 = time.perf_counter()
    seeds = config.resolved_seeds()
    rc = build_computer(config)
    lock_spread = rc.check_locking(seeds["coupling"]) if config.self_check else None
    evaluator = _evaluator(config, rc, seeds)
    t_build = time.perf_counter()

    tcfg = dataclasses.replace(config.trainer, seed=seeds["init_weights"])
    weights, trace = train(evaluator, tcfg, rc.n_nodes)
    out_norm, target_norm = evaluator.normalizers(weights, trace.best_epoch)
    t_train = time.perf_counter()
    log.info("%s: %d epochs, eps=%.4g (%s)", config.task.name, trace.epochs_used,
             trace.final_eps, trace.stop_reason)

    metrics = []
    for r in range(config.test_repeats):
        batch = generate_test_batch(config.task, config.test_size, seeds["test_batch"], r)
        metrics.append(evaluate(weights, config.task, batch, rc, out_norm, target_norm,
                                noise_seed=seeds["noise"], repeat=r))
    t_test = time.perf_counter()

    try:
        rate, r2 = fit_exponential_decay(trace)
    except ValueError:
        rate, r2 = None, None

    summary = {
        "schema_version": SCHEMA_VERSION,
        "task": config.task.name,
        "config": to_dict(config),
        "seeds": seeds,
        "reservoir": {"coupling_spectral_radius": rc.coupling.spectral_radius,
                      "lock_spread": lock_spread},
        "training": {"epochs_used": trace.epochs_used, "final_eps": trace.final_eps,
                     "stop_reason": trace.stop_reason, "best_epoch": trace.best_epoch,
                     "accepted_flips": int(np.sum(trace.accepted)),
                     "decay_rate": rate, "decay_r_squared": r2},
        "normalizer": {"output_mu": out_norm.mu, "output_sigma": out_norm.sigma,
                       "target_mu": target_norm.mu, "target_sigma": target_norm.sigma},
        "metrics": {"per_repeat": [dataclasses.asdict(m) for m in metrics],
                    "mean_ser": _mean([m.ser for m in metrics]),
                    "mean_residual_std": _mean([m.residual_std for m in metrics]),
                    "mean_nmse": _mean([m.nmse for m in metrics]),
                    "n_samples": int(sum(m.n_samples for m in metrics)),
                    "n_repeats": len(metrics)},
    }
    timings = {"build_s": t_build - t0, "train_s": t_train - t_build, "test_s": t_test - t_train}
    bundle = ResultsBundle(config, seeds, weights, trace, metrics, summary, timings)
    if out_dir is not None:
        write_bundle(bundle, out_dir)
        if save_matrices:
            io.save_matrix(Path(out_dir) / "fiber.bin", rc.fiber)
            io.save_matrix(Path(out_dir) / "imaging.bin", rc.imaging)
    return bundle


def write_bundle(bundle: ResultsBundle, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "summary.json", {**bundle.summary, "timings": bundle.timings})
    io.write_trace(out / "trace.csv", bundle.trace)
    io.write_weights(out / "weights.txt", bundle.weights)


def header_ensemble(config: ExperimentConfig) -> dict:
    """Train one header classifier per digit and check one-vs-rest consistency.

    Each digit's noiseless response is passed through all classifiers with
    their frozen normalizers; the ensemble is consistent on a digit when
    exactly its own classifier fires. Reported, not enforced.
    """
    rc = build_computer(config)
    fired = np.zeros((rc.n_digits, rc.n_digits), dtype=int)  # [digit, classifier]
    eps = []
    for c in range(rc.n_digits):
        cfg = config.with_value("task.kind", "header").with_value("task.digit", c)
        seeds = cfg.resolved_seeds()
        evaluator = _evaluator(cfg, rc, seeds)
        w, trace = train(evaluator, dataclasses.replace(cfg.trainer, seed=seeds["init_weights"]), rc.n_nodes)
        out_norm, t_norm = evaluator.normalizers(w, trace.best_epoch)
        levels = normalize(np.array([0.0, 1.0]), t_norm)
        y = normalize(raw_output(w, rc.response_matrix()), out_norm)
        fired[:, c] = threshold_classify(y, levels)
        eps.append(trace.final_eps)
    consistent = [bool(fired[d].sum() == 1 and fired[d, d] == 1) for d in range(rc.n_digits)]
    return {"fired": fired.tolist(), "consistent": consistent,
            "consistency": float(np.mean(consistent)), "train_eps": eps}


def oracle_comparison(config: ExperimentConfig, n_nodes: int = 8) -> dict:
    """Greedy vs. exhaustive vs. ridge on one frozen small instance.

    Greedy runs until stalled (target forced to ~0), so its end point is a
    1-flip local optimum; that is then verified by flipping every bit.
    """
    seeds = config.resolved_seeds()
    rc = build_computer(config, n_nodes=n_nodes)
    evaluator = _evaluator(config, rc, seeds, frozen=True)
    tcfg = dataclasses.replace(config.trainer, seed=seeds["init_weights"], frozen_noise=True,
                               target_eps=1e-300, stop_on_stall=True, resample_batch=False)
    t0 = time.perf_counter()
    weights, trace = train(evaluator, tcfg, n_nodes)
    t_greedy = time.perf_counter() - t0
    P = evaluator.powers(0)
    targets = evaluator.batch.targets
    t0 = time.perf_counter()
    best_w, best_eps = exhaustive_oracle(P, targets)
    t_exhaustive = time.perf_counter() - t0
    flips = []
    for i in range(n_nodes):
        w = weights.copy()
        w[i] ^= 1
        try:
            flips.append(evaluator(w, 0)[1])
        except ValueError:
            flips.append(float("inf"))
    return {"n_nodes": n_nodes, "batch_size": len(targets),
            "ridge_eps": ridge_oracle(P, targets, 0.0),
            "exhaustive_eps": best_eps, "exhaustive_weights": io.format_weights(best_w).strip(),
            "greedy_eps": trace.final_eps, "greedy_weights": io.format_weights(weights).strip(),
            "greedy_epochs": trace.epochs_used, "greedy_stop": trace.stop_reason,
            "flip_eps": flips, "local_optimum": bool(min(flips) >= trace.final_eps),
            "exhaustive_seconds": t_exhaustive, "greedy_seconds": t_greedy}


def near_field_raster(layout, powers, size: int = 256) -> np.ndarray:
    """Nearest-node shading of node powers on a ``size`` x ``size`` grid."""
    extent = 1.0 + 0.5 * layout.ring_spacing
    coords = (np.arange(size) + 0.5) / size * 2 * extent - extent
    gx, gy = np.meshgrid(coords, -coords)
    pos = layout.positions
    d2 = (gx.ravel()[:, None] - pos[None, :, 0]) ** 2 + (gy.ravel()[:, None] - pos[None, :, 1]) ** 2
    nearest = np.argmin(d2, axis=1)
    peak = float(np.max(powers, initial=0.0))
    shade = np.zeros(layout.n_nodes) if peak <= 0 else np.asarray(powers) / peak
    img = np.rint(255 * shade[nearest]).astype(np.uint8)
    img[np.hypot(gx, gy).ravel() > extent] = 0
    return img.reshape(size, size)


def render_near_field(config: ExperimentConfig, digit: int, out_dir=None, rc=None):
    """Write noiseless node powers for ``digit`` as CSV and PGM; returns both paths."""
    rc = build_computer(config) if rc is None else rc
    out = Path(config.out_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    P = rc.clean_powers(digit)
    csv_path = out / f"nearfield_d{digit}.csv"
    pgm_path = out / f"nearfield_d{digit}.pgm"
    io.write_nearfield_csv(csv_path, rc.layout, P)
    io.write_pgm(pgm_path, near_field_raster(rc.layout, P))
    return csv_path, pgm_path


SWEEP_COLUMNS = ("param", "value", "seed", "epochs_used", "final_eps", "stop_reason",
                 "mean_ser", "mean_residual_std", "mean_nmse")


def sweep(config: ExperimentConfig, param: str, values, seeds_per_point: int = 1, out_dir=None):
    """One ``run_experiment`` per (value, seed replicate).

    Replicate ``j`` uses master seed ``config.seed + j`` for every value, so
    all values see the same realizations. Returns one row dict per run and
    writes ``sweep.csv`` (plus per-run directories) when ``out_dir`` is set.
    """
    rows = []
    for i, value in enumerate(values):
        for j in range(seeds_per_point):
            cfg = config.with_value(param, value).with_value("run.seed", config.seed + j)
            run_dir = None if out_dir is None else Path(out_dir) / f"point{i:03d}_seed{j:03d}"
            try:
                bundle = run_experiment(cfg, run_dir)
            except NonConvergence:
                log.error("sweep point %s=%s seed %d did not converge", param, value, cfg.seed)
                raise
            s = bundle.summary
            rows.append({"param": param, "value": value, "seed": cfg.seed,
                         "epochs_used": s["training"]["epochs_used"],
                         "final_eps": s["training"]["final_eps"],
                         "stop_reason": s["training"]["stop_reason"],
                         "mean_ser": s["metrics"]["mean_ser"],
                         "mean_residual_std": s["metrics"]["mean_residual_std"],
                         "mean_nmse": s["metrics"]["mean_nmse"]})
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        write_sweep_csv(Path(out_dir) / "sweep.csv", rows)
    return rows


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        out.writeheader()
        for row in rows:
            out.writerow({k: ("" if row[k] is None else row[k]) for k in SWEEP_COLUMNS})


def read_sweep_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
