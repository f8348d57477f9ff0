"""Bundled example networks and run configurations."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .network import ReactionNetwork, load_network, parse_network

__all__ = ["BUNDLED", "bundled_network", "resolve_network", "simulation_config", "combined_example_log_factors"]

BUNDLED = ("exampleA", "exampleB", "exampleC", "exampleD", "birth_death", "combined")


def _data(name: str) -> str:
    return resources.files("autocrn").joinpath("data", name).read_text(encoding="utf-8")


def bundled_network(name: str) -> ReactionNetwork:
    """Load one of :data:`BUNDLED` by name (a trailing ``.json`` is accepted)."""
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise KeyError(f"no bundled network named {name!r}; choose from {', '.join(BUNDLED)}")
    return parse_network(_data(stem + ".json"))


def resolve_network(ref: str) -> ReactionNetwork:
    """A network from a file path, falling back to a bundled name."""
    path = Path(ref)
    if path.is_file():
        return load_network(path)
    return bundled_network(path.name)


def simulation_config() -> dict:
    """Parameters of the reference long-run simulation of ``exampleC``."""
    return json.loads(_data("simulation_config.json"))


def combined_example_log_factors(N: int, alpha12: float = 1.0, alpha21: float = 1.0, alpha2_12: float = 1.0, c3p: float = 1.0) -> np.ndarray:
    """``log`` factors of the stated law of the ``combined`` network.

    ``pi(x) ~ alpha21^x1 / x1! * prod_{j<=x2} (alpha12 + (j-1) alpha2_12) / x2! * c3p^x3 / x3!``.
    """
    m = np.arange(N + 1, dtype=float)
    logfact = np.array([math.lgamma(k + 1) for k in range(N + 1)])
    f1 = m * math.log(alpha21) - logfact
    growth = np.log(alpha12 + (m[1:] - 1) * alpha2_12)
    f2 = np.concatenate([[0.0], np.cumsum(growth)]) - logfact
    f3 = m * math.log(c3p) - logfact
    return np.vstack([f1, f2, f3])
