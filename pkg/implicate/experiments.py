"""Reproducible experiments: the fracture trajectory, the density sweep and the census table."""

import csv
import logging
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, model_validator
from typing_extensions import Self

from implicate.constants import (
    FRACTURE_ALPHA,
    FRACTURE_BETA,
    FRACTURE_N,
    FRACTURE_P,
    PROBABILITY_MAX,
    PROBABILITY_MIN,
    SWEEP_P_GRID,
    SWEEP_REPLICATES,
    SWEEP_STEPS,
)
from implicate.dynamics import replicate_seeds, run
from implicate.edgelist import load_edge_list, save_edge_list
from implicate.enums import DedupPolicy, DynamicsMode, ExperimentKind
from implicate.exceptions import InfeasibleError
from implicate.generators import er_endorsement
from implicate.integrity import metadata_lines
from implicate.motifs import census_report
from implicate.types import CensusRow, DynamicsConfig, TrajectoryPoint

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ("step", "resolutions", "endorsements", "accusations", "implicated_nodes")
SWEEP_HEADER = ("p", "replicates", "median", "q25", "q75")
REPLICATE_HEADER = ("p", "replicate", "accusation_fraction")


class ExperimentConfig(BaseModel):
    """This object describes one experiment run and where its artifacts go.

    Artifacts are written next to `output`: the fracture experiment adds
    `.initial.csv` and `.final.csv` edge lists, the sweep a `.replicates.csv`.
    """

    experiment: ExperimentKind
    """Which experiment to run."""
    output: Path
    """Primary CSV artifact."""
    n: int = FRACTURE_N
    """Nodes per generated graph."""
    p: float = FRACTURE_P
    """Endorsement probability of the fracture experiment."""
    p_grid: tuple[float, ...] = SWEEP_P_GRID
    """Endorsement probabilities of the sweep."""
    accusations: int = 1
    """Endorsements turned into accusations before the run."""
    alpha: float = FRACTURE_ALPHA
    beta: float = FRACTURE_BETA
    mode: DynamicsMode = DynamicsMode.LOCAL
    steps: int = SWEEP_STEPS
    """Node-selection steps per run."""
    replicates: int = SWEEP_REPLICATES
    """Runs per grid point of the sweep."""
    thinning: int = 1
    """Record the trajectory every this many steps."""
    seed: int = 0
    input: Optional[Path] = None
    """Edge list of the census table."""
    dedup: DedupPolicy = DedupPolicy.KEEP_LATEST
    workers: int = 1
    """Worker processes for sweep replicates and census ranges."""

    @model_validator(mode="after")
    def _validator(self) -> Self:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.steps < 1 or self.replicates < 1 or self.thinning < 1 or self.workers < 1:
            raise ValueError("steps, replicates, thinning and workers must be positive")
        if self.accusations < 0:
            raise ValueError("accusations must be non-negative")
        if not PROBABILITY_MIN <= self.p <= PROBABILITY_MAX:
            raise ValueError(f"p must be within [0, 1], got {self.p}")
        if not self.p_grid or any(not PROBABILITY_MIN <= p <= PROBABILITY_MAX for p in self.p_grid):
            raise ValueError("p_grid must be a nonempty list of probabilities")
        if not (PROBABILITY_MIN <= self.alpha <= PROBABILITY_MAX) or not (
            PROBABILITY_MIN <= self.beta <= PROBABILITY_MAX
        ):
            raise ValueError("alpha and beta must be within [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.experiment is ExperimentKind.CENSUS_TABLE and self.input is None:
            raise ValueError("the census table needs an input edge list")

        return self

    def dynamics(self, seed: int) -> DynamicsConfig:
        return DynamicsConfig(
            alpha=self.alpha,
            beta=self.beta,
            mode=self.mode,
            max_steps=self.steps,
            seed=seed,
            record_every=self.thinning,
        )

    def sibling(self, suffix: str) -> Path:
        return self.output.with_name(f"{self.output.stem}{suffix}")


def _write_csv(
    path: Path, metadata: Sequence[str], header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        for line in metadata:
            handle.write(f"# {line}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _trajectory_row(point: TrajectoryPoint) -> tuple[int, ...]:
    return (
        point.step,
        point.resolutions,
        point.endorsements,
        point.accusations,
        point.implicated_nodes,
    )


def run_fracture(cfg: ExperimentConfig) -> list[Path]:
    metadata = metadata_lines(cfg.experiment.value, cfg.seed, cfg)
    initial = er_endorsement(cfg.n, cfg.p, cfg.accusations, cfg.seed)
    final, stats = run(initial, cfg.dynamics(cfg.seed))

    _write_csv(cfg.output, metadata, TRAJECTORY_HEADER, map(_trajectory_row, stats.points))
    save_edge_list(initial, cfg.sibling(".initial.csv"), metadata)
    save_edge_list(final, cfg.sibling(".final.csv"), metadata)

    logger.info(
        "fracture seed=%d: %d endorsements, %d accusations after %d steps",
        cfg.seed,
        stats.final.endorsements,
        stats.final.accusations,
        stats.steps_used,
    )
    return [cfg.output, cfg.sibling(".initial.csv"), cfg.sibling(".final.csv")]


def _sweep_replicate(
    task: tuple[int, int, float, int, int, np.random.SeedSequence, DynamicsConfig],
) -> tuple[int, int, float]:
    p_index, replicate, p, n, accusations, seeds, dynamics = task
    graph_seed, run_seed = (int(s) for s in seeds.generate_state(2, dtype=np.uint64))
    try:
        initial = er_endorsement(n, p, accusations, seed=graph_seed)
    except InfeasibleError:
        # too few endorsements drawn; the same seed redraws the same graph
        initial = er_endorsement(n, p, accusations=0, seed=graph_seed)
    final, _ = run(initial, dynamics.model_copy(update={"seed": run_seed}))
    total = final.edge_count
    return p_index, replicate, final.accusation_count / total if total else 0.0


def run_phase_sweep(cfg: ExperimentConfig) -> list[Path]:
    """Final accusation fraction per grid point: median and quartiles over replicates."""
    streams = replicate_seeds(cfg.seed, len(cfg.p_grid) * cfg.replicates)
    dynamics = cfg.dynamics(cfg.seed).model_copy(update={"record_every": cfg.steps})
    tasks = [
        (i, r, p, cfg.n, cfg.accusations, streams[i * cfg.replicates + r], dynamics)
        for i, p in enumerate(cfg.p_grid)
        for r in range(cfg.replicates)
    ]

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_replicate, tasks, chunksize=max(1, cfg.replicates // 4)))
    else:
        results = [_sweep_replicate(task) for task in tasks]
    results.sort(key=lambda item: (item[0], item[1]))

    summary = []
    for i, p in enumerate(cfg.p_grid):
        fractions = np.array([f for index, _, f in results if index == i])
        q25, median, q75 = np.percentile(fractions, [25, 50, 75])
        summary.append((p, len(fractions), float(median), float(q25), float(q75)))
        logger.info("sweep p=%s: median accusation fraction %.3f", p, median)

    metadata = metadata_lines(cfg.experiment.value, cfg.seed, cfg)
    _write_csv(cfg.output, metadata, SWEEP_HEADER, summary)
    _write_csv(
        cfg.sibling(".replicates.csv"),
        metadata,
        REPLICATE_HEADER,
        ((cfg.p_grid[i], r, f) for i, r, f in results),
    )
    return [cfg.output, cfg.sibling(".replicates.csv")]


def run_census_table(cfg: ExperimentConfig) -> list[Path]:
    assert cfg.input is not None
    g = load_edge_list(cfg.input, cfg.dedup)
    rows = census_report(g, workers=cfg.workers)
    _write_csv(
        cfg.output,
        metadata_lines(cfg.experiment.value, cfg.seed, cfg),
        tuple(CensusRow.model_fields),
        (tuple(row.model_dump().values()) for row in rows),
    )
    return [cfg.output]


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Run an experiment and return the artifacts it wrote.

    Raises:
        InfeasibleError: If the generated graphs cannot carry the requested accusations.
    """
    if cfg.experiment is not ExperimentKind.CENSUS_TABLE and cfg.accusations > cfg.n * (cfg.n - 1):
        raise InfeasibleError(f"{cfg.accusations} accusations do not fit on {cfg.n} nodes")

    logger.info("starting %s with seed %d", cfg.experiment.value, cfg.seed)
    if cfg.experiment is ExperimentKind.FRACTURE:
        return run_fracture(cfg)
    if cfg.experiment is ExperimentKind.PHASE_SWEEP:
        return run_phase_sweep(cfg)
    return run_census_table(cfg)
