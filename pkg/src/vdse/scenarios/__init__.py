"""Bundled example scenarios.

Two worked scenarios ship with the package so the analysis pipeline can be
exercised without writing any input by hand: a ride-hail trip recorded by a
dashcam, and a speeding incident flowing through cameras, an insurer, and
government bodies.
"""
from __future__ import annotations

from importlib import resources

from vdse.dsl import parse
from vdse.graph import InstanceGraph

__all__ = ["BUNDLED", "scenario_text", "load_scenario"]

BUNDLED = ("uber", "speeding")


def scenario_text(name: str) -> str:
    """Return the source text of a bundled scenario."""
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled scenario {name!r}; expected one of {BUNDLED}")
    return (
        resources.files(__package__).joinpath(f"{name}.vdse").read_text(encoding="utf-8")
    )


def load_scenario(name: str) -> InstanceGraph:
    """Parse a bundled scenario into a fresh instance graph."""
    return parse(scenario_text(name))
