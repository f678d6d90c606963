from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "implicate",
    deadline=None,
    max_examples=120,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", parent=settings.get_profile("implicate"), max_examples=1000)
settings.load_profile("implicate")


@pytest.fixture
def edge_file(tmp_path: Path):
    def write(text: str, name: str = "edges.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
