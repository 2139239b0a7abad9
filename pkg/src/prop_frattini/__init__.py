"""Frattini quotients of pro-p Sylow subgroups of quasi-split reductive groups.

Modules:

* :mod:`.root_system` - root systems, including the non-reduced BC_n
* :mod:`.local_field` - truncated Laurent series over finite fields and the
  arithmetic lemmas used in rank one
* :mod:`.valued_datum` - sets of values, quotient dimensions, f and f'
* :mod:`.apartment` - affine roots, walls and the fundamental alcove
* :mod:`.frattini` - level recursions, Frattini levels and generator counts
* :mod:`.matrix_verify` - randomized matrix checks of rank-one identities
* :mod:`.cli` - the ``prop-frattini`` command
"""

from .apartment import AffineRoot, AlcoveProfile, fundamental_alcove, walls_in_box
from .frattini import (
    GeneratorReport,
    HypothesisError,
    LevelAssignment,
    frattini_dimension,
    frattini_levels,
    generator_count,
    negative_bounds,
    positive_bounds,
    rank1_levels,
)
from .local_field import ExtensionDesc, LocalField, Series
from .root_system import Root, RootSystem, RootSystemKind, build
from .valued_datum import SplittingData, ValueSet, gamma_sets, panel_residue_card, quotient_dim

__version__ = "0.1.0"

__all__ = [
    "AffineRoot",
    "AlcoveProfile",
    "ExtensionDesc",
    "GeneratorReport",
    "HypothesisError",
    "LevelAssignment",
    "LocalField",
    "Root",
    "RootSystem",
    "RootSystemKind",
    "Series",
    "SplittingData",
    "ValueSet",
    "build",
    "frattini_dimension",
    "frattini_levels",
    "fundamental_alcove",
    "gamma_sets",
    "generator_count",
    "negative_bounds",
    "panel_residue_card",
    "positive_bounds",
    "quotient_dim",
    "rank1_levels",
    "walls_in_box",
]
