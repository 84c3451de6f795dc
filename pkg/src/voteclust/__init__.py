"""Signed agreement networks from roll-call votes, clustered by
correlation-clustering objectives, with political-structure reports."""

__version__ = "0.1.0"

from .analysis import (
    CoalitionMap,
    LeaderMap,
    MediationVerdict,
    cluster_composition,
    coalition_loyalty,
    detect_mediation,
    leadership_strength,
    polarization_summary,
)
from .core import (
    BlockTotals,
    DataError,
    Deputy,
    InvalidPartitionError,
    Partition,
    SignedGraph,
    Vote,
    VoteClustError,
    VoteRecord,
    validate_partition,
)
from .extract import (
    AgreementScheme,
    ExtractionConfig,
    average_agreement,
    build_network,
    pairwise_score,
    parse_vote_records,
)
from .imbalance import (
    ImbalanceBreakdown,
    ProblemKind,
    block_totals,
    cc_imbalance,
    cc_move_delta,
    relative_imbalance,
    srcc_imbalance,
    srcc_move_delta,
)
from .metrics import adjusted_rand_index
from .solver import (
    SolveResult,
    SolverParams,
    brute_force,
    greedy_randomized_construction,
    ils_solve,
    local_search,
    perturb,
)
from .synth import BlocSpec, SynthConfig, generate
