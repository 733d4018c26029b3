import functools

import pytest

from lkm3.paperdata import load_dataset
from lkm3.reflective import build_basis


@functools.lru_cache(maxsize=None)
def _dataset():
    return load_dataset()


@functools.lru_cache(maxsize=None)
def _basis(t, q_order=None):
    return build_basis(t, _dataset(), q_order)


@pytest.fixture(scope="session")
def ds():
    return _dataset()


@pytest.fixture(scope="session")
def basis():
    """``basis(t)`` returns the cached default-precision basis of index ``t``."""
    return _basis
