"""Importance-weighted GAN training with exact enumeration oracles.

The heavy lifting happens in the compiled ``bgan._core`` module. This
wrapper accepts configuration overrides as keyword arguments and turns them
into the ``key = value`` strings the core understands::

    import bgan
    run = bgan.train_discrete(seed=1, iterations=500)
    print(run["final_tv"])
"""

from . import _core
from ._core import (
    BudgetError,
    ConfigError,
    Divergence,
    DomainError,
    Error,
    FDivergence,
    FormatError,
    NonFiniteError,
    ShapeError,
    compute_weights,
    exact_fdivergence,
    experiment_names,
    kl_divergence,
    parse_divergence,
    read_idx,
    reconstruct_from_statistic,
    synth_categorical_grid,
    synth_gaussian_ring,
    tabular_dual_ascent,
    total_variation,
    variational_lower_bound,
)

__all__ = [
    "BudgetError",
    "ConfigError",
    "Divergence",
    "DomainError",
    "Error",
    "FDivergence",
    "FormatError",
    "NonFiniteError",
    "ShapeError",
    "compute_weights",
    "default_config",
    "exact_fdivergence",
    "experiment_names",
    "kl_divergence",
    "parse_divergence",
    "read_idx",
    "reconstruct_from_statistic",
    "run_oracle",
    "synth_categorical_grid",
    "synth_gaussian_ring",
    "tabular_dual_ascent",
    "total_variation",
    "train_continuous",
    "train_discrete",
    "variational_lower_bound",
]


def _to_text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_to_text(v) for v in value)
    return str(value)


def _overrides(kwargs):
    return {key: _to_text(value) for key, value in kwargs.items()}


def default_config(experiment):
    """Built-in defaults of an experiment as a {key: string} dict."""
    return dict(_core.default_config(experiment))


def train_discrete(**config):
    return _core.train_discrete(_overrides(config))


def train_continuous(**config):
    return _core.train_continuous(_overrides(config))


def run_oracle(**config):
    return _core.run_oracle(_overrides(config))
