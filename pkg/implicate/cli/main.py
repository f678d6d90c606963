import csv
import logging
import os
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from implicate.__about__ import __version__
from implicate.constants import (
    DEFAULT_MAX_NODES_EXACT,
    FRACTURE_ALPHA,
    FRACTURE_BETA,
    FRACTURE_N,
    FRACTURE_P,
    OUTPUT_DIR_ENV,
    SWEEP_P_GRID,
    SWEEP_REPLICATES,
    SWEEP_STEPS,
)
from implicate.edgelist import load_edge_list, save_edge_list
from implicate.enums import (
    CheaterStrategy,
    DedupPolicy,
    Depth,
    DynamicsMode,
    ExperimentKind,
    GeneratorKind,
    HonestStrategy,
    IdentifyStrategy,
    Verdict,
)
from implicate.exceptions import ImplicateError, StructuralInputError, format_error_line
from implicate.experiments import ExperimentConfig, run_experiment
from implicate.generators import er_endorsement, planted_scenario
from implicate.graph import SignedDigraph
from implicate.observer import (
    identify_by_largest_scc,
    implication_screen,
    largest_self_consistent_insular_set,
    largest_self_consistent_set,
    verdicts_to_rows,
)
from implicate.types import ScenarioSpec, SearchBudget, VerdictLabels

cli = typer.Typer(pretty_exceptions_short=True, no_args_is_help=True)


def version_callback(version: bool) -> None:
    """Callback function for displaying version information."""
    if version:
        import platform

        typer.echo(
            f"Running implicate {__version__} with {platform.python_implementation()} "
            f"{platform.python_version()} on {platform.system()}",
        )

        raise typer.Exit()


@cli.callback()
def main(
    version: Optional[bool] = typer.Option(
        False,
        "-v",
        "--version",
        callback=version_callback,
        is_eager=True,
        help="Show current platform, python and implicate version.",
    ),
    log_level: str = typer.Option(
        "WARNING",
        "--log-level",
        help="Logging threshold for messages written to stderr (DEBUG, INFO, WARNING, ERROR).",
    ),
) -> None:
    logging.basicConfig(
        level=log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


@contextmanager
def reported_errors() -> Iterator[None]:
    """Turn library failures into a single `error: CODE: message` line and exit status 1."""
    try:
        yield
    except ValidationError as error:
        reason = "; ".join(item["msg"] for item in error.errors())
        typer.echo(format_error_line(StructuralInputError(reason)), err=True)
        raise typer.Exit(1) from None
    except ImplicateError as error:
        typer.echo(format_error_line(error), err=True)
        raise typer.Exit(1) from None


def resolve_output(path: Path) -> Path:
    """Place relative output paths under $IMPLICATE_OUTPUT_DIR when it is set."""
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


@cli.command(name="census")
def census_command(
    input: Path = typer.Option(help="Edge list with SOURCE,TARGET,RATING[,TIME] lines."),
    output: Path = typer.Option(help="Where to write the observed against expected table."),
    dedup: DedupPolicy = typer.Option(
        DedupPolicy.KEEP_LATEST, help="What to do with repeated ordered pairs."
    ),
    seed: int = typer.Option(0, help="Recorded for provenance; the census draws nothing."),
) -> None:
    with reported_errors():
        run_experiment(
            ExperimentConfig(
                experiment=ExperimentKind.CENSUS_TABLE,
                input=input,
                output=resolve_output(output),
                dedup=dedup,
                seed=seed,
            )
        )


@cli.command(name="simulate")
def simulate_command(
    output: Path = typer.Option(help="Where to write the trajectory; edge lists go next to it."),
    n: int = typer.Option(FRACTURE_N, help="Number of nodes."),
    p: float = typer.Option(FRACTURE_P, help="Per ordered pair endorsement probability."),
    alpha: float = typer.Option(FRACTURE_ALPHA, help="Propensity to turn an accusation into an endorsement."),
    beta: float = typer.Option(FRACTURE_BETA, help="Propensity to side with the accuser."),
    mode: DynamicsMode = typer.Option(DynamicsMode.LOCAL, help="Resolve triangles only, or any depth."),
    steps: int = typer.Option(SWEEP_STEPS, help="Node-selection steps."),
    seed: int = typer.Option(0, help="Seed of the graph and of the run."),
) -> None:
    with reported_errors():
        run_experiment(
            ExperimentConfig(
                experiment=ExperimentKind.FRACTURE,
                output=resolve_output(output),
                n=n,
                p=p,
                alpha=alpha,
                beta=beta,
                mode=mode,
                steps=steps,
                seed=seed,
            )
        )


@cli.command(name="sweep")
def sweep_command(
    output: Path = typer.Option(help="Where to write the per-p summary; replicates go next to it."),
    n: int = typer.Option(FRACTURE_N, help="Number of nodes."),
    p: Optional[list[float]] = typer.Option(
        None, help="Grid point; repeat the flag for several. Defaults to 0.05 ... 0.50."
    ),
    alpha: float = typer.Option(FRACTURE_ALPHA, help="Propensity to turn an accusation into an endorsement."),
    beta: float = typer.Option(FRACTURE_BETA, help="Propensity to side with the accuser."),
    mode: DynamicsMode = typer.Option(DynamicsMode.LOCAL, help="Resolve triangles only, or any depth."),
    steps: int = typer.Option(SWEEP_STEPS, help="Node-selection steps per replicate."),
    replicates: int = typer.Option(SWEEP_REPLICATES, help="Replicates per grid point."),
    workers: int = typer.Option(1, help="Worker processes."),
    seed: int = typer.Option(0, help="Root seed; each replicate gets its own child stream."),
) -> None:
    with reported_errors():
        run_experiment(
            ExperimentConfig(
                experiment=ExperimentKind.PHASE_SWEEP,
                output=resolve_output(output),
                n=n,
                p_grid=tuple(p) if p else SWEEP_P_GRID,
                alpha=alpha,
                beta=beta,
                mode=mode,
                steps=steps,
                replicates=replicates,
                workers=workers,
                seed=seed,
            )
        )


def _set_verdicts(g: SignedDigraph, credible: frozenset[int]) -> VerdictLabels:
    return VerdictLabels(
        labels=tuple(
            Verdict.CREDIBLE_H if u in credible else Verdict.IMPLICATED_C for u in range(g.n)
        )
    )


@cli.command(name="identify")
def identify_command(
    input: Path = typer.Option(help="Edge list with SOURCE,TARGET,RATING[,TIME] lines."),
    output: Path = typer.Option(help="Where to write node,label rows."),
    strategy: IdentifyStrategy = typer.Option(IdentifyStrategy.SCREEN, help="Identification rule."),
    depth: Depth = typer.Option(Depth.LOCAL, help="Motif depth of the screen."),
    budget: int = typer.Option(
        DEFAULT_MAX_NODES_EXACT, help="Largest graph the exact set searches accept."
    ),
    dedup: DedupPolicy = typer.Option(
        DedupPolicy.KEEP_LATEST, help="What to do with repeated ordered pairs."
    ),
) -> None:
    with reported_errors():
        g = load_edge_list(input, dedup)
        limits = SearchBudget(max_nodes_exact=budget)
        if strategy is IdentifyStrategy.SCREEN:
            verdicts = implication_screen(g, depth)
        elif strategy is IdentifyStrategy.LARGEST_SCC:
            verdicts = identify_by_largest_scc(g)
        elif strategy is IdentifyStrategy.SELF_CONSISTENT:
            verdicts = _set_verdicts(g, largest_self_consistent_set(g, budget=limits))
        else:
            verdicts = _set_verdicts(g, largest_self_consistent_insular_set(g, limits))

        with open(resolve_output(output), "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(("node", "label"))
            writer.writerows(verdicts_to_rows(g, verdicts))


@cli.command(name="generate")
def generate_command(
    output: Path = typer.Option(help="Where to write the edge list."),
    kind: GeneratorKind = typer.Option(GeneratorKind.ER, help="Instance family."),
    n: int = typer.Option(FRACTURE_N, help="Number of nodes (honest nodes for planted)."),
    p: float = typer.Option(FRACTURE_P, help="Per ordered pair endorsement probability (er)."),
    accusations: int = typer.Option(1, help="Endorsements turned into accusations (er)."),
    cheaters: int = typer.Option(2, help="Number of cheaters (planted)."),
    degree: float = typer.Option(2.0, help="Expected honest endorsement out-degree (planted)."),
    honest_strategy: HonestStrategy = typer.Option(
        HonestStrategy.HAMILTONIAN_ACCUSE_PATH, help="How honest nodes accuse (planted)."
    ),
    cheater_strategy: CheaterStrategy = typer.Option(
        CheaterStrategy.SILENT, help="How cheaters place their edges (planted)."
    ),
    cheater_p_pos: float = typer.Option(0.2, help="Cheater endorsement probability per ordered pair (random_mixed)."),
    cheater_p_neg: float = typer.Option(0.1, help="Cheater accusation probability per ordered pair (random_mixed)."),
    cheater_accuse_rate: float = typer.Option(0.3, help="Cheater accusation probability per honest node (accuse_honest)."),
    seed: int = typer.Option(0, help="Seed of the generator."),
) -> None:
    with reported_errors():
        path = resolve_output(output)
        if kind is GeneratorKind.ER:
            save_edge_list(er_endorsement(n, p, accusations, seed), path)
            return

        g, part = planted_scenario(
            ScenarioSpec(
                n_honest=n,
                n_cheaters=cheaters,
                honest_strategy=honest_strategy,
                expected_degree=degree,
                cheater_strategy=cheater_strategy,
                cheater_p_pos=cheater_p_pos,
                cheater_p_neg=cheater_p_neg,
                cheater_accuse_rate=cheater_accuse_rate,
                seed=seed,
            )
        )
        save_edge_list(g, path)
        with open(path.with_name(f"{path.stem}.partition.csv"), "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(("node", "side"))
            writer.writerows((g.label(u), side.value) for u, side in enumerate(part.labels))


if __name__ == "__main__":
    cli()
