import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gbs.core import parse
from gbs.fuzz import random_graph

DATA = Path(__file__).parent / "data"

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

rngs = st.integers(min_value=0, max_value=2**32 - 1).map(random.Random)
graphs = rngs.map(lambda rng: random_graph(rng, max_vertices=4, max_edges=6, bound=360))
one_vertex_graphs = rngs.map(lambda rng: random_graph(rng, max_vertices=1, max_edges=4, bound=360))


@pytest.fixture
def two_vertex():
    return parse((DATA / "two_vertex.gbs").read_text())
