from __future__ import annotations

import pytest

from fixture_archive import FixtureArchive


@pytest.fixture
def archive():
    server = FixtureArchive().start()
    yield server
    server.stop()


@pytest.fixture
def cache_root(tmp_path):
    return tmp_path / "cache"
