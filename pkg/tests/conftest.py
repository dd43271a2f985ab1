import random

import numpy as np
import pytest

from sparselift.arith import PrimeField
from sparselift.blockhankel import BlockHankelRep
from sparselift.densemodp import DenseModMatrix, is_nonsingular_mod


@pytest.fixture
def f7():
    return PrimeField(7)


@pytest.fixture
def f10007():
    return PrimeField(10007)


@pytest.fixture
def f_big():
    # 60-bit prime: forces the exact object-dtype kernels
    return PrimeField((1 << 59) + 131)


def dense_mul_mod(a, b, p):
    """Independent dense product oracle (object arithmetic)."""
    return (np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)) % p


def dense_matvec(a, w):
    return np.asarray(a, dtype=object) @ np.asarray(w, dtype=object)


def random_hankel(m, s, field, rng, require_nonsingular=True):
    """Random block-Hankel representation, nonsingular unless asked not."""
    from sparselift.blockhankel import materialize_H

    while True:
        alphas = np.array(
            [[[rng.randrange(field.p) for _ in range(s)] for _ in range(s)]
             for _ in range(2 * m - 1)],
            dtype=object,
        )
        h = BlockHankelRep(m, s, field, alphas)
        if not require_nonsingular:
            return h
        if is_nonsingular_mod(DenseModMatrix(materialize_H(h), field)):
            return h


def seeded(name, k=0):
    return random.Random(f"{name}:{k}")
