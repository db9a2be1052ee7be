"""Exact group-algebra norms, retraction checks and tree geometry."""

import json

from ._core import (
    BudgetExceeded,
    Error,
    Group,
    HypothesisViolation,
    ParseError,
    ball_size,
    run_json,
)

__all__ = [
    "BudgetExceeded",
    "Error",
    "Group",
    "HypothesisViolation",
    "ParseError",
    "ball_size",
    "run",
    "certify_norm",
]


def run(command, action="", group="", **options):
    """Run a CLI command in-process and return the report as a dict.

    Keyword arguments named like config fields (budget, m_max, precision,
    threads, cache_dir) configure the run; the rest become command arguments,
    with underscores mapped to dashes.
    """
    config_keys = {"budget", "m_max", "precision", "threads", "cache_dir"}
    config = {k: v for k, v in options.items() if k in config_keys}
    args = {k.replace("_", "-"): str(v) for k, v in options.items() if k not in config_keys}
    return json.loads(run_json(command, action, args, group, **config))


def certify_norm(group, element, m_max=4, **config):
    """Certified operator-norm interval for an element given as text."""
    report = run("norm", group=group, element=element, m_max=m_max, **config)
    return report["outputs"]["certificate"]
