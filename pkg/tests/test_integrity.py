import hashlib
from pathlib import Path

import pytest

from implicate.enums import ExperimentKind
from implicate.experiments import ExperimentConfig
from implicate.integrity import (
    DigestMismatchError,
    MetadataMissingError,
    canonical_config,
    config_digest,
    metadata_lines,
    read_metadata,
    validate_artifact_integrity,
)


@pytest.fixture
def cfg(tmp_path: Path) -> ExperimentConfig:
    return ExperimentConfig(experiment=ExperimentKind.FRACTURE, output=tmp_path / "run.csv", seed=7)


def write_artifact(path: Path, lines: list[str]) -> Path:
    path.write_text("".join(f"# {line}\n" for line in lines) + "step\n0\n", encoding="utf-8")
    return path


def test_digest_depends_on_the_config(cfg: ExperimentConfig) -> None:
    other = cfg.model_copy(update={"seed": 8})
    assert config_digest(cfg) != config_digest(other)
    assert config_digest(cfg) == config_digest(cfg.model_dump(mode="json"))


def test_digest_is_sha256_of_the_canonical_config(cfg: ExperimentConfig) -> None:
    digest = config_digest(cfg)
    assert len(digest) == 64
    assert digest == hashlib.sha256(canonical_config(cfg).encode("utf-8")).hexdigest()


def test_metadata_round_trip(cfg: ExperimentConfig, tmp_path: Path) -> None:
    path = write_artifact(tmp_path / "a.csv", metadata_lines("fracture", 7, cfg))
    metadata = read_metadata(path)
    assert metadata["software"] == "implicate"
    assert metadata["seed"] == "7"
    validate_artifact_integrity(path)


def test_edited_digest_is_detected(cfg: ExperimentConfig, tmp_path: Path) -> None:
    lines = metadata_lines("fracture", 7, cfg)
    lines[4] = "digest=" + "0" * 64
    with pytest.raises(DigestMismatchError):
        validate_artifact_integrity(write_artifact(tmp_path / "a.csv", lines))


def test_tampered_config_is_detected(cfg: ExperimentConfig, tmp_path: Path) -> None:
    lines = metadata_lines("fracture", 7, cfg)
    lines[-1] = lines[-1].replace('"seed":7', '"seed":9')
    with pytest.raises(DigestMismatchError):
        validate_artifact_integrity(write_artifact(tmp_path / "a.csv", lines))


def test_missing_metadata_is_detected(cfg: ExperimentConfig, tmp_path: Path) -> None:
    lines = metadata_lines("fracture", 7, cfg)[:-2]
    with pytest.raises(MetadataMissingError):
        validate_artifact_integrity(write_artifact(tmp_path / "a.csv", lines))
