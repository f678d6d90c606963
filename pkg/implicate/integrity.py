import hashlib
import json
from pathlib import Path
from typing import Any, Union

from pydantic import BaseModel

from implicate.__about__ import __version__
from implicate.exceptions import ArtifactIntegrityError


class MetadataMissingError(ArtifactIntegrityError):
    pass


class DigestMismatchError(ArtifactIntegrityError):
    pass


METADATA_KEYS = ("software", "version", "experiment", "seed", "digest", "config")


def canonical_config(config: Union[BaseModel, dict[str, Any]]) -> str:
    data = config.model_dump(mode="json") if isinstance(config, BaseModel) else config
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_digest(config: Union[BaseModel, dict[str, Any]]) -> str:
    """SHA-256 of the canonical JSON of a config."""
    return hashlib.sha256(canonical_config(config).encode("utf-8")).hexdigest()


def metadata_lines(experiment: str, seed: int, config: BaseModel) -> list[str]:
    """`name=value` provenance lines, written behind `#` at the top of every artifact."""
    return [
        "software=implicate",
        f"version={__version__}",
        f"experiment={experiment}",
        f"seed={seed}",
        f"digest={config_digest(config)}",
        f"config={canonical_config(config)}",
    ]


def read_metadata(path: Union[str, Path]) -> dict[str, str]:
    found: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            name, _, value = line[1:].strip().partition("=")
            found[name] = value
    return found


def validate_artifact_integrity(path: Union[str, Path]) -> None:
    """Recompute the digest of the config embedded in an artifact.

    Raises:
        MetadataMissingError: If a provenance line is absent.
        DigestMismatchError: If the embedded config does not hash to the embedded digest.
    """
    metadata = read_metadata(path)
    missing = [name for name in METADATA_KEYS if name not in metadata]
    if missing:
        raise MetadataMissingError(f"{path} lacks {', '.join(missing)}")

    try:
        config = json.loads(metadata["config"])
    except json.JSONDecodeError as error:
        raise DigestMismatchError(f"{path} holds an unreadable config: {error.msg}") from None

    if metadata["digest"] != config_digest(config):
        raise DigestMismatchError(f"{path} was altered after it was written")
