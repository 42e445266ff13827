"""coinfactory: exact sampling from functions of unknown coin biases.

Given sample access to coins of unknown bias p, the library builds programs
whose single output bit is 1 with probability exactly f(p), including targets
defined only on a compact domain K = [0,1]^n ∩ affine subspace (with almost-
sure termination on the boundary), fixed-size subset sampling with prescribed
inclusion probabilities, and polytope vertex sampling with E[vertex] = p.
"""
from .backend import BACKEND, BitStream, derive_seed, mix64
from .bounds import chernoff_bound, exp_upper, hoeffding_bound, iroot_ceil, pow_upper
from .coins import BudgetedCoins, CoinBank, FlipBudget
from .combinators import (
    IndexSampler,
    WeightedMixture,
    bernoulli_race,
    complement,
    const_program,
    convex_mix,
    geometric_level,
    geometric_mix,
    product,
    ratio_retry,
    uniform_index,
)
from .domains import (
    AffineCubeDomain,
    DominationReport,
    domination_precondition,
    full_cube_domain,
    resample_domination_check,
    sample_Z,
)
from .errors import (
    BudgetExhausted,
    CertificateViolationError,
    LevelCapExceeded,
    ResourceLimitError,
    UsageError,
)
from .faces import (
    BoundCertificate,
    FacePartition,
    check_1d,
    check_poly_bounded,
    enum_faces,
    face_closure,
    face_of,
    face_poly,
    grid_points,
)
from .harness import TrialReport, chi_square, run_trials, within_3sigma
from .lattice import (
    FactoryRecursion,
    LevelSchedule,
    TargetFunction,
    general_factory,
    margin_certificate,
    subdomain_factory,
    threshold_prob,
)
from .polytopes import (
    CombinatorialFactory,
    PolytopeP,
    enum_vertices,
    facet_separation_check,
    free_triangle,
    polytope_separation_check,
)
from .programs import (
    BernsteinMonomial,
    BiasNode,
    CoinNode,
    FactoryProgram,
    Leaf,
    Procedural,
    RunResult,
    exact_eval,
    face_certificate,
    leaf_monomials,
    run,
    tree_from_json,
    tree_to_json,
    truncated_bounds,
)
from .sampford import (
    BoundarySampford,
    SubsetOutcome,
    all_subsets,
    bound_certificate,
    classic_sampford,
    k_subset_domain,
    naive_prob,
    naive_sampford,
    round_prob,
    subset_prob,
    subset_prob_closed,
)

__version__ = "0.1.0"
