"""Random symmetric integral relation algebras: sampling, associativity,
flexible atoms, small-n catalogues and quasirandomness diagnostics."""

from .analysis import (
    AssociativityReport,
    FlexibilityReport,
    critical_p,
    expected_flexible_count,
    failure_bound,
    flexible_atoms,
    is_associative,
    witness_condition,
)
from .core import (
    CompositionTable,
    CycleFormatError,
    CycleIndexer,
    CycleStructure,
    build_composition_table,
    compose_sets,
    cycle_at,
    cycle_count,
    cycle_index,
    cycle_type_census,
    parse_structure,
    serialize_structure,
)
from .enumeration import CanonicalForm, Census, all_structures, canonicalize, census, find_nonassociative_examples
from .quasirandom import AtomGraph, GraphStats, QuasirandomVerdict, algebra_quasirandomness, atom_graph, graph_stats
from .sampler import SamplerConfig, empirical_cycle_frequency, sample, trial_seed

__version__ = "0.1.0"
