"""
Copyright 2024 The sectoral-nk Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

   https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..env import SectoralEnv
from ..exceptions import SamplerException
from ..timer import Timer
from ..utils import get_logger, log_message

log = get_logger(__name__)

TARGET_ACCEPTANCE = (0.2, 0.4)
ADAPT_WINDOWS = 10
RHAT_THRESHOLD = 1.1


@dataclass(frozen=True)
class PosteriorDraws:
    # pylint: disable=too-many-instance-attributes
    """
    Draws of every chain after adaptation, ``draws[chain, i, param]``, with the log-posterior trace, per-chain
    acceptance rates and the frozen proposal covariance.
    """

    names: Tuple[str, ...]
    draws: np.ndarray
    log_posterior: np.ndarray
    acceptance: np.ndarray
    proposal_cov: np.ndarray
    burn_in: int = 0
    seed: int = 0

    @property
    def chains(self) -> int:
        return self.draws.shape[0]

    @property
    def kept(self) -> np.ndarray:
        """Draws after burn-in, shape ``(chains, n, params)``."""
        return self.draws[:, self.burn_in:, :]

    def pooled(self) -> np.ndarray:
        """Kept draws of all chains stacked."""
        kept = self.kept
        return kept.reshape(-1, kept.shape[-1])

    def to_frame(self) -> pd.DataFrame:
        """Long table: chain, draw, log posterior and one column per parameter."""
        chains, n, _ = self.draws.shape
        frame = pd.DataFrame(self.draws.reshape(chains * n, -1), columns=list(self.names))
        frame.insert(0, "log_posterior", self.log_posterior.reshape(-1))
        frame.insert(0, "draw", np.tile(np.arange(n), chains))
        frame.insert(0, "chain", np.repeat(np.arange(chains), n))
        return frame


def split_rhat(chains: np.ndarray) -> np.ndarray:
    """
    Split-chain potential scale reduction per parameter for draws shaped ``(chains, n, params)``.
    """
    chains = np.asarray(chains, dtype=float)
    half = chains.shape[1] // 2
    if half < 2:
        return np.full(chains.shape[-1], np.nan)
    split = np.concatenate([chains[:, :half], chains[:, half:2 * half]], axis=0)
    within = split.var(axis=1, ddof=1).mean(axis=0)
    between = half * split.mean(axis=1).var(axis=0, ddof=1)
    pooled = (half - 1) / half * within + between / half
    with np.errstate(divide="ignore", invalid="ignore"):
        rhat = np.sqrt(pooled / within)
    return np.where(within > 0, rhat, np.nan)


def _walk(log_post: Callable[[np.ndarray], float], x0: np.ndarray, lp0: float, chol: np.ndarray, steps: int,
          rng: np.random.Generator):
    k = x0.size
    out = np.empty((steps, k))
    trace = np.empty(steps)
    x, lp, accepted = x0.copy(), lp0, 0
    for i in range(steps):
        proposal = x + chol @ rng.standard_normal(k)
        lp_new = log_post(proposal)
        if math.log(rng.uniform()) < lp_new - lp:
            x, lp = proposal, lp_new
            accepted += 1
        out[i], trace[i] = x, lp
    return out, trace, accepted


def _cholesky(cov: np.ndarray) -> np.ndarray:
    cov = 0.5 * (cov + cov.T)
    jitter = 1e-12 * max(1.0, float(np.max(np.abs(np.diag(cov)))))
    for _ in range(8):
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError:
            jitter *= 100.0
    raise SamplerException("Proposal covariance is not positive definite")


def adapt_proposal(log_post: Callable[[np.ndarray], float], x0: np.ndarray, cov0: np.ndarray, steps: int,
                   rng: np.random.Generator, windows: int = ADAPT_WINDOWS):
    """
    Tunes a random-walk proposal: the scale moves toward an acceptance rate of 0.2 to 0.4 after every window and
    the final covariance is the scaled sample covariance of the adaptation draws.

    :return: ``(proposal covariance, last point, its log posterior)``
    :raises SamplerException: when the start has zero posterior density or a whole window is rejected
    """
    k = x0.size
    x, lp = np.asarray(x0, dtype=float).copy(), log_post(x0)
    if not math.isfinite(lp):
        raise SamplerException("The starting point has zero posterior density")
    scale = 2.38 / math.sqrt(k)
    base = np.asarray(cov0, dtype=float)
    per_window = max(1, steps // windows)
    history = []
    for window in range(windows):
        chunk, trace, accepted = _walk(log_post, x, lp, _cholesky(scale ** 2 * base), per_window, rng)
        history.append(chunk)
        rate = accepted / per_window
        if accepted == 0:
            raise SamplerException(f"All {per_window} proposals rejected in adaptation window {window + 1}")
        x, lp = chunk[-1], trace[-1]
        if rate < TARGET_ACCEPTANCE[0] or rate > TARGET_ACCEPTANCE[1]:
            scale *= math.exp(rate - 0.3) if rate > TARGET_ACCEPTANCE[1] else max(0.2, rate / 0.3)
        if window >= windows // 2:
            sample = np.concatenate(history[windows // 2:], axis=0)
            if sample.shape[0] > k:
                empirical = np.atleast_2d(np.cov(sample, rowvar=False))
                base = 0.5 * base + 0.5 * empirical if np.all(np.isfinite(empirical)) else base
    return scale ** 2 * base, x, lp


def rwmh_sample(log_post: Callable[[np.ndarray], float], x0: Sequence[float], names: Sequence[str] = None,
                chains: int = 2, draws: int = 20000, seed: int = 0, adapt: int = 2000,
                burn_in_fraction: float = 0.25, proposal_cov: np.ndarray = None,
                threads: Optional[int] = None) -> PosteriorDraws:
    """
    Random-walk Metropolis-Hastings with an adaptation phase and independent chains.

    The proposal is tuned on one adaptation run from ``x0`` and then frozen; every chain starts from the end
    of the adaptation run and uses its own stream spawned from ``seed``, so the draws do not depend on how the
    chains are scheduled.

    :param proposal_cov: starting proposal covariance, ``diag((0.01 max(|x0|, 0.01))**2)`` by default
    :raises SamplerException: when adaptation stalls
    """
    x0 = np.asarray(x0, dtype=float)
    k = x0.size
    names = tuple(names or (f"theta{i}" for i in range(k)))
    if not 0.0 <= burn_in_fraction < 1.0:
        raise SamplerException("burn_in_fraction must lie in [0, 1)")
    cov0 = proposal_cov if proposal_cov is not None else np.diag((0.01 * np.maximum(np.abs(x0), 0.01)) ** 2)
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(chains + 1)]
    with Timer() as timer:
        cov, start, lp_start = (adapt_proposal(log_post, x0, cov0, adapt, streams[0]) if adapt > 0
                                else (np.asarray(cov0, dtype=float), x0, log_post(x0)))
        if not math.isfinite(lp_start):
            raise SamplerException("The starting point has zero posterior density")
        chol = _cholesky(cov)
        with ThreadPoolExecutor(max_workers=threads or SectoralEnv.get_threads()) as pool:
            runs = list(pool.map(lambda rng: _walk(log_post, start, lp_start, chol, draws, rng), streams[1:]))
    samples = np.stack([r[0] for r in runs])
    trace = np.stack([r[1] for r in runs])
    acceptance = np.array([r[2] / max(draws, 1) for r in runs])
    log_message("%d chains x %d draws in %.1fs, acceptance %s", log, chains, draws, timer.interval,
                np.round(acceptance, 3).tolist())
    return PosteriorDraws(names, samples, trace, acceptance, cov, int(burn_in_fraction * draws), seed)


def posterior_summary(posterior: PosteriorDraws, probability: float = 0.90) -> pd.DataFrame:
    """
    Mean, standard deviation, equal-tailed probability interval and split R-hat per parameter.

    Parameters whose R-hat exceeds 1.1 are flagged, not rejected.
    """
    pooled = posterior.pooled()
    tail = (1.0 - probability) / 2.0
    rhat = split_rhat(posterior.kept)
    frame = pd.DataFrame({
        "mean": pooled.mean(axis=0),
        "std": pooled.std(axis=0, ddof=1) if pooled.shape[0] > 1 else np.zeros(pooled.shape[1]),
        f"q{100 * tail:g}": np.quantile(pooled, tail, axis=0),
        f"q{100 * (1 - tail):g}": np.quantile(pooled, 1.0 - tail, axis=0),
        "rhat": rhat,
    }, index=pd.Index(posterior.names, name="parameter"))
    frame["converged"] = ~(frame["rhat"] > RHAT_THRESHOLD)
    flagged = frame.index[~frame["converged"]].tolist()
    if flagged:
        log_message("R-hat above %.1f for %s", log, RHAT_THRESHOLD, ", ".join(flagged), level=logging.WARNING)
    return frame
