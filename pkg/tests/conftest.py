"""Shared instance generators for the test suite."""

from __future__ import annotations

import sys

import numpy as np
import pytest

from twmsketch.events import InteractionEvent


def random_instance(seed, n_lo=12, n_hi=40, e_lo=80, e_hi=220, t_span=300.0,
                    distinct=True, stamp_levels=None):
    """Random undirected temporal stream without self-loops.

    With distinct=True timestamps are sorted uniforms (almost surely
    unique); otherwise they are drawn from `stamp_levels` integer levels so
    that repeated stamps are common.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_lo, n_hi + 1))
    n_events = int(rng.integers(e_lo, e_hi + 1))
    us = rng.integers(0, n, n_events)
    vs = rng.integers(0, n - 1, n_events)
    vs = np.where(vs >= us, vs + 1, vs)
    if distinct:
        ts = np.sort(rng.uniform(0.0, t_span, n_events))
    else:
        levels = stamp_levels or max(2, n_events // 3)
        ts = np.sort(rng.integers(0, levels, n_events)).astype(float)
    events = [InteractionEvent(int(u), int(v), float(t))
              for u, v, t in zip(us, vs, ts)]
    return events, n


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)


@pytest.fixture
def toy_events():
    """The 2-event chain: 0-1 at t=1, 1-2 at t=2."""
    return [InteractionEvent(0, 1, 1.0), InteractionEvent(1, 2, 2.0)]
