"""Monte Carlo orchestration: trials, sweeps, aggregation, CSV output.

Determinism contract: every trial owns a private generator seeded from
``(master_seed, stream, trial_index)``, so records are bitwise
reproducible and independent of worker scheduling. The same trial index
reuses the same channel across all grid points, which makes curves
paired comparisons. The decoding codebook is seeded from
``(master_seed, stream, user_count)`` only, never from the bit count, so
smaller codebooks are exact prefixes of bigger ones.
"""

import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import BoundInvalidError, eigen_spectrum, snr_lower_bound_terms
from .channel import draw_environment, inner_precoder, analytic_covariance, sample_channel
from .codebook import DecodingCodebook, generate_codebook, select_codeword
from .config import ExperimentConfig
from .linklevel import empirical_snr
from .precoding import (
    IllConditionedChannelError,
    effective_channel,
    gram_inverse,
    noncooperative_baseline_snr,
    snr_denominators,
)
from .quantization import (
    CooperationLink,
    QuantizerConfig,
    bits_from_bandwidth,
    quantized_snr,
)

# seed-sequence stream tags keeping trial and codebook draws independent
TRIAL_STREAM = 1
CODEBOOK_STREAM = 2

OVERLOAD_AUDIT_SYMBOLS = 2048

TRIAL_CSV_HEADER = (
    "preset,mode,M,P,D,L,b,snr_db,gamma_db,bw_ratio,trial,"
    "capacity_coop,capacity_zf,capacity_ideal,capacity_bound,cond_fail,overload_rate"
)
AGGREGATE_CSV_HEADER = (
    "preset,mode,M,P,D,L,b,snr_db,gamma_db,bw_ratio,"
    "mean_coop,sem_coop,mean_zf,sem_zf,mean_ideal,norm_capacity"
)


@dataclass(frozen=True)
class GridPoint:
    """One swept parameter combination."""

    users: int
    bits: int
    snr_db: float
    gamma_db: float | None
    bandwidth_ratio: float | None


@dataclass(frozen=True)
class TrialRecord:
    """Capacities of one Monte Carlo trial at one grid point."""

    users: int
    bits: int
    snr_db: float
    gamma_db: float | None
    bandwidth_ratio: float | None
    trial: int
    capacity_coop: float | None
    capacity_zf: float | None
    capacity_ideal: float | None
    capacity_bound: float | None
    cond_fail: int
    overload_rate: float | None


@dataclass(frozen=True)
class PointSummary:
    """Aggregate over the non-failed trials of one grid point."""

    users: int
    bits: int
    snr_db: float
    gamma_db: float | None
    bandwidth_ratio: float | None
    mean_coop: float | None
    sem_coop: float | None
    mean_zf: float | None
    sem_zf: float | None
    mean_ideal: float | None
    norm_capacity: float | None
    num_ok: int
    num_failed: int


def capacity(snrs) -> float:
    """Sum rate of decoupled streams: sum of log2(1 + SNR_p) in bit/s/Hz."""
    values = np.atleast_1d(np.asarray(snrs, dtype=float))
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError("SNRs must be finite and nonnegative")
    return float(np.log2(1.0 + values).sum())


def grid_points(config: ExperimentConfig):
    """The deterministic sweep order used for records and CSV rows."""
    quantized = config.mode == "quantized-rsi"
    gammas = config.gamma_db_grid if quantized else [None]
    ratios = config.bandwidth_ratio_grid if quantized else [None]
    for users in config.user_counts():
        for bits in config.b_grid:
            for snr_db in config.snr_db_grid:
                for gamma_db in gammas:
                    for ratio in ratios:
                        yield GridPoint(users, bits, snr_db, gamma_db, ratio)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, TRIAL_STREAM, trial])


def codebook_for(config: ExperimentConfig, users: int, bits: int) -> DecodingCodebook:
    """The pre-stored codebook shared by all trials of a sweep."""
    rng = np.random.default_rng([config.master_seed, CODEBOOK_STREAM, users])
    return generate_codebook(users, bits, rng)


def run_trial(
    config: ExperimentConfig,
    point: GridPoint,
    trial: int,
    codebook: DecodingCodebook | None = None,
    environment=None,
) -> TrialRecord:
    """Execute one trial: draw a channel, evaluate every strategy on it.

    Produces the cooperative capacity under the configured sharing mode,
    the plain zero-forcing baseline, the perfect-cooperation capacity
    from the eigen-spectrum, and (for two or more users) the analytic
    lower-bound capacity. Ill-conditioned channels yield a flagged record
    with empty capacities.
    """
    if codebook is None:
        codebook = codebook_for(config, point.users, point.bits)
    elif codebook.bits != point.bits or codebook.num_users != point.users:
        raise ValueError("codebook does not match the grid point")

    rng = trial_rng(config.master_seed, trial)
    env = environment
    if env is None:
        env = draw_environment(
            config.M,
            config.L,
            rng,
            sector_center=config.sector_center,
            sector_spread=config.sector_spread,
        )
    h = sample_channel(env, point.users, rng)
    w = inner_precoder(analytic_covariance(env), config.D)
    h_e = effective_channel(w, h)
    noise_power = 10.0 ** (-point.snr_db / 10.0)

    try:
        a_inv = gram_inverse(h_e)
    except IllConditionedChannelError:
        return TrialRecord(
            point.users, point.bits, point.snr_db, point.gamma_db,
            point.bandwidth_ratio, trial, None, None, None, None, 1, None,
        )

    spectrum = eigen_spectrum(h_e)
    capacity_ideal = capacity(spectrum.eigenvalues / noise_power)
    capacity_zf = capacity(noncooperative_baseline_snr(h_e, noise_power, a_inv))

    _, chosen, _ = select_codeword(codebook, h_e, noise_power, a_inv)
    overload: float | None
    if config.mode == "quantized-rsi":
        link = CooperationLink(point.bandwidth_ratio, 10.0 ** (point.gamma_db / 10.0))
        coop_snrs = quantized_snr(h_e, chosen, noise_power, link, config.tau, a_inv)
        link_bits = bits_from_bandwidth(link)
        if link_bits > 0:
            quantizer = QuantizerConfig(link_bits, config.tau)
            _, overload = empirical_snr(
                w, h, chosen, noise_power, rng,
                num_symbols=OVERLOAD_AUDIT_SYMBOLS, quantizer=quantizer,
            )
        else:
            overload = 0.0
    else:
        coop_snrs = 1.0 / (noise_power * snr_denominators(chosen, a_inv))
        overload = 0.0
    capacity_coop = capacity(coop_snrs)

    capacity_bound = None
    if point.users >= 2:
        try:
            capacity_bound = capacity(
                snr_lower_bound_terms(spectrum, point.bits, noise_power)
            )
        except BoundInvalidError:
            capacity_bound = None

    return TrialRecord(
        point.users, point.bits, point.snr_db, point.gamma_db, point.bandwidth_ratio,
        trial, capacity_coop, capacity_zf, capacity_ideal, capacity_bound, 0, overload,
    )


def run_experiment(
    config: ExperimentConfig,
    threads: int | None = None,
    environment=None,
):
    """Run the full Cartesian sweep; returns (records, summaries).

    Records come back sorted by (grid point, trial index) regardless of
    the worker pool's scheduling. Pass ``environment`` to condition the
    whole sweep on one fixed scattering environment instead of redrawing
    per trial.
    """
    config.validate()
    points = list(grid_points(config))
    codebooks = {
        users: codebook_for(config, users, max(config.b_grid))
        for users in config.user_counts()
    }

    def run_point(index_point):
        index, point = index_point
        book = codebooks[point.users].prefix(point.bits)
        return index, [
            run_trial(config, point, trial, book, environment)
            for trial in range(config.num_trials)
        ]

    tasks = list(enumerate(points))
    if threads is not None and threads < 1:
        raise ValueError("threads must be a positive integer")
    if threads == 1 or len(tasks) == 1:
        results = [run_point(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_point, tasks))

    records: list[TrialRecord] = []
    for _, chunk in sorted(results, key=lambda item: item[0]):
        records.extend(chunk)
    summaries = [
        summarize_point(point, records[i * config.num_trials : (i + 1) * config.num_trials])
        for i, point in enumerate(points)
    ]
    return records, summaries


def summarize_point(point: GridPoint, records) -> PointSummary:
    ok = [r for r in records if not r.cond_fail]
    failed = len(records) - len(ok)
    if not ok:
        return PointSummary(
            point.users, point.bits, point.snr_db, point.gamma_db,
            point.bandwidth_ratio, None, None, None, None, None, None, 0, failed,
        )
    coop = np.array([r.capacity_coop for r in ok])
    zf = np.array([r.capacity_zf for r in ok])
    ideal = np.array([r.capacity_ideal for r in ok])
    return PointSummary(
        point.users,
        point.bits,
        point.snr_db,
        point.gamma_db,
        point.bandwidth_ratio,
        float(coop.mean()),
        _sem(coop),
        float(zf.mean()),
        _sem(zf),
        float(ideal.mean()),
        float(coop.mean() / ideal.mean()),
        len(ok),
        failed,
    )


def _sem(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trial_csv_lines(config: ExperimentConfig, records) -> list:
    preset = config.figure_preset or ""
    lines = [TRIAL_CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    preset, config.mode, config.M, r.users, config.D, config.L,
                    r.bits, r.snr_db, r.gamma_db, r.bandwidth_ratio, r.trial,
                    r.capacity_coop, r.capacity_zf, r.capacity_ideal,
                    r.capacity_bound, r.cond_fail, r.overload_rate,
                )
            )
        )
    return lines


def aggregate_csv_lines(config: ExperimentConfig, summaries) -> list:
    preset = config.figure_preset or ""
    lines = [AGGREGATE_CSV_HEADER]
    for s in summaries:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    preset, config.mode, config.M, s.users, config.D, config.L,
                    s.bits, s.snr_db, s.gamma_db, s.bandwidth_ratio,
                    s.mean_coop, s.sem_coop, s.mean_zf, s.sem_zf,
                    s.mean_ideal, s.norm_capacity,
                )
            )
        )
    return lines


def write_csv(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_outputs(out_dir, config: ExperimentConfig, records, summaries, json_mirror=False):
    """Write trials.csv and aggregate.csv (plus JSON mirrors on request)."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    trials_path = os.path.join(out_dir, "trials.csv")
    aggregate_path = os.path.join(out_dir, "aggregate.csv")
    write_csv(trials_path, trial_csv_lines(config, records))
    write_csv(aggregate_path, aggregate_csv_lines(config, summaries))
    written = [trials_path, aggregate_path]
    if json_mirror:
        for name, rows in (("trials.json", records), ("aggregate.json", summaries)):
            path = os.path.join(out_dir, name)
            with open(path, "w", encoding="utf-8") as fh:
                json.dump([dataclasses.asdict(r) for r in rows], fh, indent=1)
                fh.write("\n")
            written.append(path)
    return written
