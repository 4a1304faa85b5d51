from functools import lru_cache

import pytest

from twistcox import TwistedBruhat, TwistedSystem, resolve_preset


@lru_cache(maxsize=None)
def twisted(spec):
    return TwistedSystem(*resolve_preset(spec))


@lru_cache(maxsize=None)
def bruhat(spec, max_rank=None):
    return TwistedBruhat(twisted(spec), max_rank)


@pytest.fixture
def tw():
    return twisted


@pytest.fixture
def br():
    return bruhat
