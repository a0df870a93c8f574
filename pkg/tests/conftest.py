"""Shared fixtures.

Two ladders are computed once per session:

  * ``medium_ladder``: 448 bits, superstable anchor of index 11, trusted
    depth 9 — cheap enough for the per-module tests (about a second).
  * ``deep_ladder``: 1024 bits, anchor index 13, trusted depth 11 — the
    object the acceptance checks run against.
"""

import time

import pytest

from asymren import Family, build_ladder, map_for_depth


@pytest.fixture(scope="session")
def build_times():
    """Wall-clock durations of the expensive session builds, by name."""
    return {}


@pytest.fixture(scope="session")
def medium_family():
    return Family(beta=2, scale_left=1, scale_right=1, precision_bits=448)


@pytest.fixture(scope="session")
def medium_anchor(medium_family):
    m, trusted, chain = map_for_depth(medium_family, 8)
    return m, trusted, chain


@pytest.fixture(scope="session")
def medium_ladder(medium_anchor):
    m, trusted, _ = medium_anchor
    return build_ladder(m, trusted + 1, trusted=trusted,
                        parameter_source="superstable:11")


@pytest.fixture(scope="session")
def deep_family():
    return Family(beta=2, scale_left=1, scale_right=1, precision_bits=1024)


@pytest.fixture(scope="session")
def deep_anchor(deep_family, build_times):
    start = time.perf_counter()
    m, trusted, chain = map_for_depth(deep_family, 11)
    build_times["deep_anchor"] = time.perf_counter() - start
    return m, trusted, chain


@pytest.fixture(scope="session")
def deep_ladder(deep_anchor, build_times):
    m, trusted, _ = deep_anchor
    start = time.perf_counter()
    lad = build_ladder(m, trusted + 1, trusted=trusted,
                       parameter_source="superstable:13")
    build_times["deep_ladder"] = time.perf_counter() - start
    return lad
