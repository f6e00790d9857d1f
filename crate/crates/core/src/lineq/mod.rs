//! Linear-system layer: ground sets, exact rank machinery, the density
//! parameter, the partite solution hypergraph, container collections for
//! solution-free sets, exact counting oracles, and the sparse-random
//! demonstration.

mod count;
mod ground;
mod matrix;
mod parse;
mod sparse;
mod system;

pub use count::{
    constraint_supports, container_count_bound, count_sets_avoiding, count_solution_free,
    enumerate_solution_free, max_set_avoiding, max_solution_free, solution_free_containers,
    CountComparison, SystemContainers,
};
pub use ground::{is_prime, next_prime, GroundSet};
pub use matrix::{
    rank_and_fullrank, rank_mod_p, rank_rational, remove_columns, smith_invariant_factors,
    surjective_brute, Mat, RankReport,
};
pub use parse::parse_system;
pub use sparse::{sparse_random_experiment, SparseSummary, SparseTrial};
pub use system::{
    ap_system, pair_sum_system, sum_system, LinearSystem, MRank, MWitness, SolutionEnumeration,
    ZRule,
};
