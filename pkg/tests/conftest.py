import sys

import pytest

sys.setrecursionlimit(100_000)

from pts_kernel.corpus import BUNDLE_IDS, get_bundle


@pytest.fixture(scope="session")
def simple():
    return get_bundle("simple")


@pytest.fixture(scope="session")
def refined():
    return get_bundle("refined-axiomatic")


@pytest.fixture(scope="session")
def reynolds():
    return get_bundle("reynolds-A")


@pytest.fixture(scope="session")
def hurkens1():
    return get_bundle("hurkens-B-match1")


@pytest.fixture(scope="session")
def hurkens2():
    return get_bundle("hurkens-B-match2")


@pytest.fixture(scope="session")
def all_bundles():
    return [get_bundle(bid) for bid in BUNDLE_IDS]
