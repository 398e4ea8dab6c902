"""Cross-domain secure data sharing: protocol simulator and benchmarks."""

import json

from ._cdsh import CdshError, World, account_sizes, bench_batch, bench_ops

__all__ = ["CdshError", "World", "account_sizes", "bench_batch", "bench_ops", "make_world", "run_script"]


def make_world(config=None, **overrides):
    """Build a World from a config dict (or None) plus keyword overrides."""
    cfg = dict(config or {})
    cfg.update(overrides)
    return World(json.dumps(cfg))


def run_script(world, steps):
    """Run a list of step dicts on a world."""
    return world.run_scenario(json.dumps({"steps": list(steps)}))
