"""Shared fixtures: RNG-stable hypothesis profile, radar presets, and a
terminal-summary channel that prints one PASS/FAIL line per acceptance check."""

from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from agilerv import RadarParams

settings.register_profile(
    "agilerv",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("agilerv")


@pytest.fixture(scope="session")
def full_scale() -> RadarParams:
    """Full-size desk parameter set used by the experiment pipeline."""
    return RadarParams()


@pytest.fixture(scope="session")
def small() -> RadarParams:
    """Miniature burst for fast unit tests: 4 carriers x 20 bins, 64 pulses.

    delta_f / grid_df = 20 exactly, so the four 2 MHz bands tile an
    8 MHz synthetic spectrum with no gaps.
    """
    return RadarParams(
        f0=1.0e9,
        n_carriers=4,
        delta_f=2.0e6,
        tp=10.0e-6,
        fs=10.0e6,
        b=2.0e6,
        tr=100.0e-6,
        n_pulses=64,
        scr_db=float("inf"),
    )


@pytest.fixture(scope="session")
def shared_cache() -> str:
    """Content-addressed map cache shared across test sessions.

    Heavy dataset tests write here so reruns are incremental; a cold
    cache regenerates everything and must produce identical rows.
    """
    path = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".cache", "maps"))
    os.makedirs(path, exist_ok=True)
    return path


# -- acceptance-criteria reporting ----------------------------------------

_acceptance_lines: list[str] = []


def record_acceptance(number: int, name: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    _acceptance_lines.append(f"[criterion {number:02d}] {name}: {status} ({detail})")


def pytest_terminal_summary(terminalreporter) -> None:
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)
