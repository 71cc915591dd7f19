import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # Keep Eulerian cache files out of the working tree during tests.
    cache_dir = tmp_path_factory.getbasetemp() / "eulerian-cache"
    monkeypatch.setenv("RIFFLE_CACHE_DIR", str(cache_dir))
