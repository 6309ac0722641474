import random
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from rcdesign import grid as G
from rcdesign.canon import apply_isotopism
from rcdesign.search import enumerate_designs

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("repo")

DATA = Path(__file__).parent / "data"


def figure_arrays():
    """{name: grid} for every printed array, in file order."""
    text = (DATA / "figures.arrays").read_text()
    names = [ln[2:].strip() for ln in text.splitlines() if ln.startswith("# ")]
    return dict(zip(names, G.read_grids(text)))


@lru_cache(maxsize=None)
def designs(r, c, v, profile_name="nta"):
    """Canonical designs of a small parameter set, cached across tests."""
    rep = enumerate_designs(r, c, v, G.parse_profile(profile_name), emit=True)
    return tuple(rep.grids or ())


SMALL_SETS = [(3, 3, 3), (3, 3, 7), (3, 4, 7), (3, 5, 7), (3, 5, 9), (4, 4, 4), (4, 4, 8),
              (4, 5, 9), (3, 6, 9), (4, 4, 6)]


def random_isotope(g, rng):
    pr = list(range(g.r))
    pc = list(range(g.c))
    pv = list(range(g.v))
    rng.shuffle(pr)
    rng.shuffle(pc)
    rng.shuffle(pv)
    return apply_isotopism(g, pr, pc, pv)


@pytest.fixture
def rng():
    return random.Random(12345)
