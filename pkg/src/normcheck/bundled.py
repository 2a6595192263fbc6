"""Loaders for the bundled privacy-act scenario used by ``demo paradox``."""

from __future__ import annotations

from importlib import resources

from .norms import NormSet, parse_norms
from .traces import TransitionSystem, parse_ts

__all__ = [
    "privacy_ts_text",
    "privacy_norms_text",
    "privacy_ts",
    "privacy_norms",
    "PRIVACY_RUN",
]

# The run the scenario describes: three steps, then the quiet tail forever.
PRIVACY_RUN = (("t0", "t1", "t2"), ("tl",))


def _read(name: str) -> str:
    return resources.files("normcheck").joinpath("examples", name).read_text("utf-8")


def privacy_ts_text() -> str:
    return _read("privacy.ts")


def privacy_norms_text() -> str:
    return _read("privacy.norms")


def privacy_ts() -> TransitionSystem:
    return parse_ts(privacy_ts_text())


def privacy_norms() -> NormSet:
    return parse_norms(privacy_norms_text())
