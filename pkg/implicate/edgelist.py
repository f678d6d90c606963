"""Reading and writing SOURCE,TARGET,RATING[,TIME] edge lists."""

import csv
import logging
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from implicate.enums import DedupPolicy, Sign
from implicate.exceptions import DuplicateEdgeError, EdgeListParseError, StructuralInputError
from implicate.graph import SignedDigraph
from implicate.types import EdgeListRecord

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

HEADER = ("source", "target", "rating")


def _is_header(row: list[str]) -> bool:
    if len(row) < 3:
        return False
    try:
        int(row[2])
    except ValueError:
        return True
    return False


def read_records(path: PathLike) -> Iterator[tuple[int, EdgeListRecord]]:
    """Yield (line number, record) pairs; blank and `#` lines are skipped.

    A first data line whose rating field is not an integer is taken as a header.

    Raises:
        EdgeListParseError: If a line is malformed or carries a zero rating.
    """
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as error:
        raise StructuralInputError(f"cannot read {path}: {error.strerror}") from error

    with handle:
        first = True
        for line_number, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if first:
                first = False
                if _is_header(row):
                    continue
            if len(row) not in (3, 4):
                raise EdgeListParseError(line_number, f"expected 3 or 4 fields, got {len(row)}", ",".join(row))

            fields = [field.strip() for field in row]
            try:
                record = EdgeListRecord(
                    source=fields[0],
                    target=fields[1],
                    rating=fields[2],  # type: ignore[arg-type]
                    time=fields[3] if len(fields) == 4 and fields[3] else None,  # type: ignore[arg-type]
                )
            except ValidationError as error:
                reason = "; ".join(item["msg"] for item in error.errors())
                raise EdgeListParseError(line_number, reason, ",".join(row)) from None
            yield line_number, record


def load_edge_list(path: PathLike, dedup: DedupPolicy = DedupPolicy.KEEP_LATEST) -> SignedDigraph:
    """Build a graph from an edge list file.

    Nodes are numbered in order of first appearance. Self-loops are dropped.
    Repeated ordered pairs follow `dedup`; `KEEP_LATEST` compares timestamps
    and falls back to file order when a record has none.

    Args:
        path (PathLike): The file to read.
        dedup (DedupPolicy): Optional. What to do with repeated ordered pairs.

    Returns:
        SignedDigraph: The graph, labelled with the file's node names.

    Raises:
        EdgeListParseError: If a line cannot be parsed.
        DuplicateEdgeError: If `dedup` is `ERROR` and an ordered pair repeats.
    """
    kept: dict[tuple[str, str], tuple[int, EdgeListRecord]] = {}
    order: list[str] = []
    seen_labels: set[str] = set()
    self_loops = duplicates = 0
    untimed = False

    for line_number, record in read_records(path):
        if record.source == record.target:
            self_loops += 1
            continue
        for label in (record.source, record.target):
            if label not in seen_labels:
                seen_labels.add(label)
                order.append(label)

        pair = (record.source, record.target)
        previous = kept.get(pair)
        if previous is None:
            kept[pair] = (line_number, record)
            continue

        duplicates += 1
        if dedup is DedupPolicy.ERROR:
            raise DuplicateEdgeError(line_number, record.source, record.target)
        if dedup is DedupPolicy.KEEP_FIRST:
            continue

        earlier = previous[1]
        if earlier.time is None or record.time is None:
            untimed = True
            kept[pair] = (line_number, record)
        elif record.time >= earlier.time:
            kept[pair] = (line_number, record)

    if self_loops:
        logger.warning("dropped %d self-loops from %s", self_loops, path)
    if untimed and dedup is DedupPolicy.KEEP_LATEST:
        logger.warning("duplicates without timestamps in %s resolved by file order", path)

    g = SignedDigraph(len(order), order)
    for (source, target), (_, record) in kept.items():
        g.add_edge(g.node_id(source), g.node_id(target), record.sign, record.weight)

    logger.info(
        "loaded %s: %d nodes, %d edges, %d duplicates resolved",
        path,
        g.n,
        g.edge_count,
        duplicates,
    )
    return g


def _label_key(label: str) -> tuple[int, int, str]:
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def edge_rows(g: SignedDigraph) -> list[tuple[str, str, int]]:
    """Canonical rows: sorted by (source, target) label, integer-valued labels numerically."""
    rows = []
    for u, v, sign, weight in g.edges():
        magnitude = max(1, round(weight))
        rows.append((g.label(u), g.label(v), magnitude if sign is Sign.ENDORSE else -magnitude))
    rows.sort(key=lambda row: (_label_key(row[0]), _label_key(row[1])))
    return rows


def save_edge_list(g: SignedDigraph, path: PathLike, metadata: Iterable[str] = ()) -> None:
    """Write the canonical edge list, preceded by `#` metadata lines.

    Weights are rounded to the nearest positive integer. Isolated nodes are not written.

    Raises:
        StructuralInputError: If the file cannot be written.
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            for line in metadata:
                handle.write(f"# {line}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(HEADER)
            writer.writerows(edge_rows(g))
    except OSError as error:
        raise StructuralInputError(f"cannot write {path}: {error.strerror}") from error
