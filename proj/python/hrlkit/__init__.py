"""Python bindings for the curriculum hierarchical RL core.

Configs, reports and checkpoints are plain dicts with the same layout as
the JSON files the ``hrl`` command writes.
"""

import json
from pathlib import Path

from . import _core
from ._core import ContractViolation, DomainError, MiniBuild, NumericError, ValidationError

__all__ = [
    "ContractViolation",
    "DomainError",
    "MiniBuild",
    "NumericError",
    "ValidationError",
    "compare",
    "default_config",
    "evaluate",
    "gridnav_qstar",
    "load_config",
    "train",
    "validate_config",
]


def default_config(task="BM", mode="curriculum", seed=0):
    """Complete config for a task ("CMAG", "BM", "GridNav") and mode."""
    return json.loads(_core.default_config_json(task, mode, seed))


def validate_config(config):
    """Return config with every default filled in; raise ValidationError if invalid."""
    return json.loads(_core.validate_config_json(json.dumps(config)))


def load_config(path):
    return validate_config(json.loads(Path(path).read_text()))


def train(config, out_dir=None):
    """Run training; returns (report, checkpoint). Writes a run directory if out_dir is given."""
    result = json.loads(_core.train_json(json.dumps(config), str(out_dir) if out_dir else ""))
    return result["report"], result["checkpoint"]


def evaluate(checkpoint, episodes=30, seed=0):
    """Greedy evaluation of a checkpoint dict on its recorded task."""
    return json.loads(_core.evaluate_json(json.dumps(checkpoint), episodes, seed))


def compare(curriculum_reports, flat_reports, grid=20):
    return json.loads(
        _core.compare_json(
            [json.dumps(r) for r in curriculum_reports],
            [json.dumps(r) for r in flat_reports],
            grid,
        )
    )


def gridnav_qstar(size, gamma=0.99):
    """Value-iteration Q* on a size x size grid from (0,0) to the far corner.

    Returns (states, q, v) as lists.
    """
    return _core.gridnav_qstar(size, gamma)
