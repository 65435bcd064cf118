from __future__ import annotations

import pathlib

import pytest


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return pathlib.Path(__file__).resolve().parent.parent / "fixtures"
