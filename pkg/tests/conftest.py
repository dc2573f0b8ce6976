import random
from fractions import Fraction

import pytest
from hypothesis import settings

from centerkit.config import Config
from centerkit.polyalg import CANONICAL, MultiPoly

settings.register_profile("default", derandomize=True, deadline=None)
settings.load_profile("default")

SEED = Config().random_seed


def random_poly(rng, vars=("x", "y", "a0"), terms=4, max_exp=3, coeff=5):
    n = len(CANONICAL)
    out = {}
    for _ in range(rng.randint(0, terms)):
        exps = [0] * n
        for v in vars:
            exps[CANONICAL.var_index(v)] = rng.randint(0, max_exp)
        c = Fraction(rng.randint(-coeff, coeff), rng.randint(1, 3))
        out[tuple(exps)] = out.get(tuple(exps), 0) + c
    return MultiPoly.from_terms(out)


@pytest.fixture
def rng():
    return random.Random(SEED)
