"""
Shared fixtures for the newton-osc test suite
"""
import os
import random
import sys
import tempfile

os.environ.setdefault("NEWTON_OSC_LOG_FILE", os.path.join(tempfile.gettempdir(), "newton_osc_tests.log"))
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import pytest

import config
from power_data import FlatMarker, PowerData


def poly(n, terms, denom=None, markers=()):
    """PowerData from {exponent: coefficient}"""
    return PowerData.from_terms(n, terms, denom, markers)


def random_polynomial(rng, n, max_terms=6, max_exp=8, allow_constant=False):
    terms = {}
    while not terms:
        for _ in range(rng.randint(1, max_terms)):
            exp = tuple(rng.randint(0, max_exp) for _ in range(n))
            if not allow_constant and not any(exp):
                continue
            terms[exp] = rng.choice([-3, -2, -1, 1, 2, 3])
    return PowerData.from_terms(n, terms)


@pytest.fixture
def rng():
    return random.Random(config.RANDOM_SEED)


@pytest.fixture
def first_example_weight():
    def build(p, q, c=1):
        terms = {(2 * p, 2 * p): c} if c else {}
        return PowerData.from_terms(2, terms, None, [FlatMarker((2 * q, 2 * q), 1)])
    return build
