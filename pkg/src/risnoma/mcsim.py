"""Monte Carlo ground truth for the coverage probabilities.

Each trial samples the BS PPP on ``O(R_L, R_max)``, a RIS uniform in the
ball and Nakagami power gains for every link.  Interference from beyond
``R_max`` is replaced by its mean; for the slowly decaying ``alpha_t``
links that tail carries a sizeable share of the total and cannot simply be
dropped.

The connected user sees the BS process from its own position: it is
associated with a BS at distance ``r_c``, so its interferers are the PPP
points beyond ``r_c``.  No coverage event involves both users at once, so
only this marginal law matters; tying the connected user to the typical
user's serving BS would instead place it next to the BS-free disc around
the RIS and bias its interference low.

Trials are generated in fixed-size batches.  Batch ``j`` of stream ``s``
draws from ``SeedSequence(seed, spawn_key=(s, j))``, so results depend only
on ``(seed, trials)`` and never on how batches are spread over threads.

Power gains are stored with ``P_b``, the intercept ``C``, the RIS length
``L`` and the interference fraction ``rho_t`` factored out; a single sample
therefore serves a whole sweep over transmit SNR, ``L`` or ``rho_t``.
"""

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic
from .channel import RisConfig, c_ris_e, ris_coefficient
from .errors import DomainError
from .geometry import DEFAULT_R_MAX_FACTOR, default_r_max
from .params import NetworkParams

__all__ = [
    "ScenarioMode",
    "SinrSample",
    "CoverageEstimate",
    "GainSamples",
    "BATCH_SIZE",
    "worker_count",
    "simulate_gains",
    "sinr_from_gains",
    "coverage_from_gains",
    "run_trial",
    "realization_gains",
    "estimate_coverage",
    "estimate_expectations",
]

log = logging.getLogger(__name__)

BATCH_SIZE = 128
MAIN_STREAM = 0
WARMUP_STREAM = 1
THREADS_ENV = "RIS_COVERAGE_THREADS"


class ScenarioMode(str, enum.Enum):
    RIS_NOMA = "ris_noma"
    RIS_OMA = "ris_oma"
    TRADITIONAL_NOMA = "traditional_noma"


@dataclass(frozen=True)
class SinrSample:
    """SINR/SNR values of one trial (or arrays of them, one entry per trial)."""

    gamma_sic: np.ndarray
    gamma_t: np.ndarray
    gamma_c: np.ndarray
    gamma_t_oma: np.ndarray
    gamma_c_oma: np.ndarray


@dataclass(frozen=True)
class CoverageEstimate:
    probability: float
    ci_halfwidth: float
    trials: int
    seed: int

    @classmethod
    def from_counts(cls, successes, trials, seed):
        p = successes / trials
        return cls(p, 1.96 * math.sqrt(p * (1.0 - p) / trials), int(trials), int(seed))

    @property
    def stderr(self):
        return self.ci_halfwidth / 1.96


@dataclass(frozen=True)
class GainSamples:
    """Per-trial power gains with ``P_b``, ``C``, ``L`` and ``rho_t`` factored out.

    ``ris_*`` gains are for a unit half-length RIS (multiply by ``L**2``);
    ``direct_*`` and ``connected_*`` gains are for ``C = 1``.
    ``ris_interference`` excludes the ``rho_t`` fraction.
    """

    ris_signal: np.ndarray
    ris_interference: np.ndarray
    direct_signal: np.ndarray
    direct_interference: np.ndarray
    connected_signal: np.ndarray
    connected_interference: np.ndarray
    link_angle: np.ndarray
    r_br: np.ndarray
    r_ru: np.ndarray
    seed: int
    key: tuple

    @property
    def trials(self):
        return len(self.ris_signal)


def gains_key(p, r_max_factor):
    """Parameters a :class:`GainSamples` depends on."""
    return (p.lambda_b, p.R_L, p.r_c, p.alpha_t, p.alpha_c, p.m_t, p.m_c, p.rho_a, float(r_max_factor))


def worker_count(workers=None):
    """Thread count: explicit argument, else ``RIS_COVERAGE_THREADS`` (0 = auto)."""
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _batch_rng(seed, stream, index):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(stream, index)))


def _draw_geometry(n, p, r_max, rng):
    r = p.R_L * np.sqrt(rng.random(n))
    phi = rng.random(n) * (2.0 * np.pi)
    ris = np.column_stack((r * np.cos(phi), r * np.sin(phi)))
    mean = p.lambda_b * np.pi * (r_max**2 - p.R_L**2)
    counts = rng.poisson(mean, n)
    empty = counts == 0
    redraws = 0
    while empty.any():
        redraws += int(empty.sum())
        counts[empty] = rng.poisson(mean, int(empty.sum()))
        empty = counts == 0
    if redraws:
        log.info("redrew %d empty BS sets", redraws)
    total = int(counts.sum())
    rad = np.sqrt(p.R_L**2 + rng.random(total) * (r_max**2 - p.R_L**2))
    ang = rng.random(total) * (2.0 * np.pi)
    bs = np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))
    return {"ris": ris, "bs": bs, "bs_radius": rad, "counts": counts}


def _draw_fading(n, total, p, rng):
    return {
        "serving": rng.gamma(p.m_t, 1.0 / p.m_t, n),
        "connected": rng.gamma(p.m_c, 1.0 / p.m_c, n),
        "interferer": rng.gamma(p.m_t, 1.0 / p.m_t, total),
        "connected_interferer": rng.gamma(p.m_t, 1.0 / p.m_t, total),
    }


def _segment_argmin(values, starts, trial):
    seg_min = np.minimum.reduceat(values, starts)
    hits = np.flatnonzero(values == seg_min[trial])
    _, first = np.unique(trial[hits], return_index=True)
    return hits[first]


def _tails(p, r_max):
    """Mean gains of the PPP beyond ``r_max`` (RIS, direct) and of the
    connected user's unsampled ring ``(r_c, R_L)`` when ``r_c < R_L``."""
    lam = 2.0 * np.pi * p.lambda_b
    if not math.isfinite(r_max):
        ris_tail = direct_tail = 0.0
    else:
        # beyond R_max the BS-RIS distance equals the BS-origin distance to O(R_L / R_max)
        c_mean = c_ris_e(RisConfig(1.0, rho_a=p.rho_a), "numeric", clamped=True)
        ris_tail = c_mean * lam * r_max ** (2.0 - p.alpha_t) / (p.alpha_t - 2.0)
        direct_tail = lam * r_max ** (2.0 - p.alpha_c) / (p.alpha_c - 2.0)
    ring = 0.0
    if p.r_c < p.R_L:
        k = 2.0 - p.alpha_c
        ring = lam * (p.R_L**k - p.r_c**k) / k
    return ris_tail, direct_tail, ring


def _gains(geom, fading, p, r_max):
    ris, bs, counts = geom["ris"], geom["bs"], geom["counts"]
    n = len(counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    trial = np.repeat(np.arange(n), counts)
    ris_tail, direct_tail, ring = _tails(p, r_max)

    # typical user through the RIS
    rel = bs - ris[trial]
    d_br = np.hypot(rel[:, 0], rel[:, 1])
    r_ru = np.hypot(ris[:, 0], ris[:, 1])
    to_user = -ris[trial]
    cross = rel[:, 0] * to_user[:, 1] - rel[:, 1] * to_user[:, 0]
    dot = rel[:, 0] * to_user[:, 0] + rel[:, 1] * to_user[:, 1]
    theta = np.arctan2(np.abs(cross), dot)
    coef = ris_coefficient(p.rho_a * theta, (1.0 - p.rho_a) * theta, 1.0)
    g_ris = coef * coef * (d_br * r_ru[trial]) ** (-p.alpha_t)
    assoc = _segment_argmin(d_br, starts, trial)
    weighted = fading["interferer"] * g_ris
    weighted[assoc] = 0.0
    ris_signal = fading["serving"] * g_ris[assoc]
    ris_interference = np.add.reduceat(weighted, starts) + ris_tail * r_ru ** (-p.alpha_t)

    # typical user with a direct link to its nearest BS
    d_bu = geom["bs_radius"]
    g_dir = d_bu ** (-p.alpha_c)
    assoc_dir = _segment_argmin(d_bu, starts, trial)
    weighted = fading["interferer"] * g_dir
    weighted[assoc_dir] = 0.0
    direct_signal = fading["serving"] * g_dir[assoc_dir]
    direct_interference = np.add.reduceat(weighted, starts) + direct_tail

    # connected user, in its own frame: interferers are the points beyond r_c
    weighted = np.where(d_bu > p.r_c, fading["connected_interferer"] * g_dir, 0.0)
    connected_signal = fading["connected"] * p.r_c ** (-p.alpha_c)
    connected_interference = np.add.reduceat(weighted, starts) + direct_tail + ring

    return {
        "ris_signal": ris_signal,
        "ris_interference": ris_interference,
        "direct_signal": direct_signal,
        "direct_interference": direct_interference,
        "connected_signal": connected_signal,
        "connected_interference": connected_interference,
        "link_angle": theta[assoc],
        "r_br": d_br[assoc],
        "r_ru": r_ru,
    }


def _simulate_batch(p, n, r_max, seed, stream, index):
    rng = _batch_rng(seed, stream, index)
    geom = _draw_geometry(n, p, r_max, rng)
    fading = _draw_fading(n, len(geom["bs"]), p, rng)
    return _gains(geom, fading, p, r_max)


def simulate_gains(p, trials, seed, r_max_factor=DEFAULT_R_MAX_FACTOR, workers=None, stream=MAIN_STREAM):
    """Sample ``trials`` network realizations and return their power gains."""
    if trials < 1:
        raise DomainError("trials must be positive")
    r_max = default_r_max(p.lambda_b, r_max_factor)
    if r_max <= p.R_L:
        raise DomainError("R_max must exceed the RIS ball radius")
    sizes = [BATCH_SIZE] * (trials // BATCH_SIZE)
    if trials % BATCH_SIZE:
        sizes.append(trials % BATCH_SIZE)
    jobs = [(p, n, r_max, seed, stream, j) for j, n in enumerate(sizes)]
    nworkers = min(worker_count(workers), len(jobs))
    if nworkers > 1:
        with ThreadPoolExecutor(nworkers) as pool:
            parts = list(pool.map(lambda job: _simulate_batch(*job), jobs))
    else:
        parts = [_simulate_batch(*job) for job in jobs]
    merged = {k: np.concatenate([part[k] for part in parts]) for k in parts[0]}
    return GainSamples(**merged, seed=int(seed), key=gains_key(p, r_max_factor))


def sinr_from_gains(gains, p, mode):
    """Evaluate the five SINR/SNR arrays for parameters ``p`` (P_b, C, L, rho_t applied here)."""
    mode = ScenarioMode(mode)
    noise = p.sigma2 / p.P_b
    if mode is ScenarioMode.TRADITIONAL_NOMA:
        s_t = p.C * gains.direct_signal
        i_t = p.C * gains.direct_interference
    else:
        s_t = p.L**2 * gains.ris_signal
        i_t = p.rho_t * p.L**2 * gains.ris_interference
    s_c = p.C * gains.connected_signal
    i_c = p.C * gains.connected_interference
    return SinrSample(
        gamma_sic=p.a_c * s_t / (p.a_t * s_t + i_t + noise),
        gamma_t=p.a_t * s_t / (i_t + noise),
        gamma_c=p.a_c * s_c / (p.a_t * s_c + i_c + noise),
        gamma_t_oma=s_t / (i_t + noise),
        gamma_c_oma=s_c / (i_c + noise),
    )


def oma_threshold(threshold):
    """Threshold for the same rate on half of the resource: ``(1 + g)**2 - 1``."""
    return (1.0 + threshold) ** 2 - 1.0


def coverage_from_gains(gains, p, mode, expect_c=None, expect_t=None):
    """Per-trial success indicators ``(typical, connected)``.

    ``expect_c`` / ``expect_t`` stand for the mean OMA SNRs in the SIC-order
    conditions and default to the closed-form approximations.
    """
    mode = ScenarioMode(mode)
    s = sinr_from_gains(gains, p, mode)
    if mode is ScenarioMode.RIS_OMA:
        return s.gamma_t_oma > oma_threshold(p.gamma_t_th), s.gamma_c_oma > oma_threshold(p.gamma_c_th)
    if expect_c is None:
        expect_c = analytic.gamma_c_e(p)
    if expect_t is None:
        expect_t = analytic.gamma_t_e(p)
    typical = (s.gamma_sic > p.gamma_sic_th) & (s.gamma_t > p.gamma_t_th) & (s.gamma_t_oma > expect_c)
    connected = (s.gamma_c > p.gamma_c_th) & (expect_t > s.gamma_c_oma)
    return typical, connected


def run_trial(p, mode, rng, r_max_factor=DEFAULT_R_MAX_FACTOR):
    """One realization's SINR values as plain floats."""
    r_max = default_r_max(p.lambda_b, r_max_factor)
    geom = _draw_geometry(1, p, r_max, rng)
    fading = _draw_fading(1, len(geom["bs"]), p, rng)
    return _evaluate_single(_gains(geom, fading, p, r_max), p, mode, r_max_factor)


def realization_gains(realization, p, fading=None, r_max_factor=DEFAULT_R_MAX_FACTOR, tails=True):
    """Power gains for a fixed :class:`~risnoma.geometry.Realization`.

    ``fading`` maps ``serving``, ``connected``, ``interferer`` and
    ``connected_interferer`` to power gains; omitted entries default to 1.
    With ``tails=False`` no beyond-``R_max`` mean is added.
    """
    bs = np.asarray(realization.bs_points, dtype=float)
    geom = {
        "ris": np.asarray([realization.ris], dtype=float),
        "bs": bs,
        "bs_radius": np.hypot(bs[:, 0], bs[:, 1]),
        "counts": np.array([len(bs)]),
    }
    base = {"serving": np.ones(1), "connected": np.ones(1),
            "interferer": np.ones(len(bs)), "connected_interferer": np.ones(len(bs))}
    if fading:
        base.update({k: np.broadcast_to(np.asarray(v, float), base[k].shape).copy() for k, v in fading.items()})
    r_max = default_r_max(p.lambda_b, r_max_factor) if tails else math.inf
    raw = _gains(geom, base, p, r_max)
    return GainSamples(**raw, seed=realization.rng_seed, key=gains_key(p, r_max_factor))


def _evaluate_single(raw, p, mode, r_max_factor):
    gains = raw if isinstance(raw, GainSamples) else GainSamples(**raw, seed=0, key=gains_key(p, r_max_factor))
    s = sinr_from_gains(gains, p, mode)
    return SinrSample(*(float(getattr(s, f)[0]) for f in SinrSample.__dataclass_fields__))


def empirical_expectations(p, trials, seed, r_max_factor=DEFAULT_R_MAX_FACTOR, workers=None, mode=ScenarioMode.RIS_NOMA):
    """Warm-up means of the OMA SNRs, drawn from an independent stream."""
    warm = simulate_gains(p, max(trials // 10, 1), seed, r_max_factor, workers, stream=WARMUP_STREAM)
    s = sinr_from_gains(warm, p, mode)
    return float(np.mean(s.gamma_c_oma)), float(np.mean(s.gamma_t_oma))


def estimate_coverage(
    p, mode=ScenarioMode.RIS_NOMA, trials=100_000, seed=42, expectation="analytic",
    r_max_factor=DEFAULT_R_MAX_FACTOR, workers=None, gains=None,
):
    """Monte Carlo coverage of the typical and connected users.

    Parameters
    ----------
    expectation : {"analytic", "empirical"}
        Source of the mean OMA SNRs in the SIC-order conditions: the closed
        forms, or a warm-up pass of ``trials // 10`` independent samples.
    gains : GainSamples, optional
        Pre-sampled gains to reuse (must match ``p`` and ``r_max_factor``).

    Returns
    -------
    (CoverageEstimate, CoverageEstimate)
        Typical user, connected user.
    """
    if int(trials) != trials or trials < 1000:
        raise DomainError(f"trials must be an integer >= 1000, got {trials}")
    if gains is None:
        gains = simulate_gains(p, trials, seed, r_max_factor, workers)
    elif gains.key != gains_key(p, r_max_factor) or gains.trials != trials:
        raise DomainError("supplied gains were sampled for different parameters")
    if expectation == "analytic":
        expect_c = expect_t = None
    elif expectation == "empirical":
        expect_c, expect_t = empirical_expectations(p, trials, seed, r_max_factor, workers, mode)
    else:
        raise ValueError(f"unknown expectation mode {expectation!r}")
    typical, connected = coverage_from_gains(gains, p, mode, expect_c, expect_t)
    return (
        CoverageEstimate.from_counts(int(typical.sum()), trials, seed),
        CoverageEstimate.from_counts(int(connected.sum()), trials, seed),
    )


@dataclass(frozen=True)
class ExpectationEstimate:
    gamma_c_e_hat: float
    gamma_c_e_ci: float
    gamma_t_e_hat: float
    gamma_t_e_ci: float
    mean_ic_hat: float
    mean_ic_ci: float
    trials: int

    @property
    def mean_ic_stderr(self):
        return self.mean_ic_ci / 1.96


def _mean_ci(x):
    x = np.asarray(x, dtype=float)
    return float(np.mean(x)), 1.96 * float(np.std(x, ddof=1)) / math.sqrt(len(x))


def estimate_expectations(p, trials=100_000, seed=42, r_max_factor=DEFAULT_R_MAX_FACTOR, workers=None, gains=None):
    """Empirical means of the OMA SNRs and of the connected user's interference power."""
    if trials < 1000:
        raise DomainError("trials must be >= 1000")
    if gains is None:
        gains = simulate_gains(p, trials, seed, r_max_factor, workers)
    s = sinr_from_gains(gains, p, ScenarioMode.RIS_NOMA)
    gc, gc_ci = _mean_ci(s.gamma_c_oma)
    gt, gt_ci = _mean_ci(s.gamma_t_oma)
    ic, ic_ci = _mean_ci(p.P_b * p.C * gains.connected_interference)
    return ExpectationEstimate(gc, gc_ci, gt, gt_ci, ic, ic_ci, int(trials))
