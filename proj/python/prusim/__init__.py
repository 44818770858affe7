"""Numerical checks for the path-recording PRU construction."""

from ._core import (
    __version__,
    attack,
    augment,
    census,
    dec,
    enc,
    is_good,
    partial_isometry_deviation,
    run_cli,
    s_equivalence,
    sample_haar,
    stated_bound,
    tilde_gap,
)

__all__ = [
    "attack",
    "augment",
    "census",
    "dec",
    "enc",
    "is_good",
    "partial_isometry_deviation",
    "run_cli",
    "s_equivalence",
    "sample_haar",
    "stated_bound",
    "tilde_gap",
]
