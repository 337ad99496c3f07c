import pytest

from linkey import SimConfig
from linkey.engine import available_backends, make_engine


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def engine_factory(backend):
    """Engine builder with small-table defaults for direct table poking."""

    def make(**kw):
        kw.setdefault("pool_slots", 8)
        kw.setdefault("prefetcher", "linkey")
        kw.setdefault("at_entries", 8)
        kw.setdefault("cat_entries", 8)
        return make_engine(SimConfig(**kw), backend=backend)

    return make
