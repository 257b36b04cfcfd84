"""Substitution tilings of the line over an infinite alphabet.

The letters are ``[0], [1], [2], ...`` and the substitution is driven by a
coefficient sequence ``a``::

    [0] -> [0]^a_0 [1],        [i] -> [0]^a_i [i-1] [i+1]

The package computes certified inflation factors and natural tile lengths,
generates and decomposes supertiles, designs sequences with a prescribed
inflation factor and produces algebraicity certificates.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .algebra import (
    IntegerPolynomial,
    constant_term_obstruction,
    functional_equation_residual,
    periodic_certificate,
    thue_morse_consistency,
)
from .designer import (
    DesignParameters,
    choose_parameters,
    design_sequence,
    greedy_digits,
    mu_from_lambda,
    parse_lambda,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    InflationData,
    Patch,
    delone_bounds,
    empirical_frequencies,
    fixed_point_delone,
    frequency_vector,
    realize,
    solve_mu,
    tile_length,
    tile_lengths,
    verify_inflation,
)
from .numerics import CReal, bisect_root, eval_series, working_precision
from .recognize import Decomposition, decompose_level1, decompose_levelk
from .sequence import (
    DesignedSequence,
    EventuallyPeriodicSequence,
    ExplicitSequence,
    ThueMorseSequence,
    sequence_from_json,
    validate,
)
from .substitution import (
    Limit,
    TruncatedOperator,
    apply,
    apply_word,
    power_iteration,
    supertile,
    supertile_size,
    truncated_matrix,
)
