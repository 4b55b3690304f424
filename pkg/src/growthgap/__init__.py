"""Certified growth rates of regular languages and free-group subgroups."""

from .automaton import (
    Alphabet,
    Automaton,
    CensusTable,
    accepts,
    census,
    prune,
    reduced_word_product,
    validate,
)
from .covers import (
    PermCover,
    find_girth_cover,
    girth,
    ktree_leaf_bound,
    nonuniform_experiment,
    puncture,
)
from .estimators import GrowthRateEstimator, SubgroupGrowthEstimator
from .extension import GrowthVerdict, gamma_m, monoid_injectivity_check, strict_growth_verdict
from .freegroup import ball_census, reduce, shortlex_automaton
from .spectral import (
    SpectralEnclosure,
    TransitionMatrix,
    dominates,
    growth_rate,
    matrix_power_count,
    period,
    pf_enclosure,
    polyexp_fit,
    scc_condense,
    spectral_radius,
    transition_matrix,
)
from .stallings import (
    CoreGraph,
    SubgroupRecord,
    build_core,
    contains,
    find_free_factor_element,
    free_product_certificate,
    subgroup_automaton,
)

__version__ = "0.1.0"
