"""
Monte Carlo runner.

Runs are cut into fixed-size chunks that depend only on the run count
and chunk size. Each chunk is simulated by a joblib worker, every run
draws from its own stream run_stream(seed, phase, run_index), and the
chunks are reassembled in run order. The worker count therefore never
changes a single bit of the output.
"""

import logging
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn

from core.eigen_engine import batch_eigenvalues, batch_sample_covariance
from core.signal_model import ScenarioConfig, generate
from core.streams import run_stream

logger = logging.getLogger(__name__)

_stderr = Console(stderr=True)


def chunk_bounds(n_runs: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + chunk_size, n_runs))
            for start in range(0, n_runs, chunk_size)]


def simulate_chunk(cfg: ScenarioConfig, phase: int, start: int, stop: int) -> np.ndarray:
    """Descending sample eigenvalues for runs start..stop-1, one row per run."""
    covariances = np.empty((stop - start, cfg.K, cfg.K), dtype=cfg.dtype)
    for row, run_index in enumerate(range(start, stop)):
        X = generate(cfg, run_stream(cfg.seed, phase, run_index)).data
        # formed run by run; the m x K x N stack is never held in memory
        covariances[row] = batch_sample_covariance(X[np.newaxis])[0]
    return batch_eigenvalues(covariances)


@contextmanager
def _progress(label: str, total: int, enabled: bool) -> Iterator[Optional[Callable[[int], None]]]:
    if not enabled:
        yield None
        return
    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total} runs"),
        TimeElapsedColumn(),
        console=_stderr,
        transient=True,
    ) as progress:
        task = progress.add_task(label, total=total)
        yield lambda n: progress.advance(task, n)


def simulate_eigenvalues(cfg: ScenarioConfig, phase: int, n_runs: int,
                         workers: int = 1, chunk_size: int = 250,
                         label: str = "Simulating",
                         show_progress: bool = False) -> np.ndarray:
    """n_runs x K array of descending sample eigenvalues, in run order."""
    bounds = chunk_bounds(n_runs, chunk_size)
    logger.debug(
        f"{label}: {n_runs} runs in {len(bounds)} chunks on {workers} worker(s) "
        f"(K={cfg.K}, N={cfg.N}, {cfg.case.value}, {cfg.scenario.value})"
    )

    parts = []
    with _progress(label, n_runs, show_progress) as advance:
        results = Parallel(n_jobs=workers, return_as="generator")(
            delayed(simulate_chunk)(cfg, phase, start, stop) for start, stop in bounds
        )
        for (start, stop), values in zip(bounds, results):
            parts.append(values)
            if advance is not None:
                advance(stop - start)

    return np.concatenate(parts, axis=0)
