"""Probabilistic uplink video scheduling lab.

Thin python surface over the C++ core: PMF algebra on uniform grids,
synthetic network/video traces, regime-aware predictors, the joint
quality/FEC scheduler, and the deterministic packet-level simulator.
"""

from baroc._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
