//! Exact discrete-time Markov chain of the simplified algorithm on small
//! lattice problems, and numerical checks of its convergence properties.

mod chain;
mod checks;
mod ga_bound;
mod lattice;
mod matrix;
mod simulate;
mod verify;

pub use chain::{
    axis_cell_weights, decode_group_state, encode_group_state, enumerate_pollen_states,
    group_state_count, group_transition_matrix, pollen_transition_matrix, stage_one_distribution,
    MoveDirection, PollenChain, PollenStateIndex, DEFAULT_STATE_CAP,
};
pub use checks::{
    check_closed, check_no_disjoint_closed_set, limiting_distribution, uniform_distribution,
    ClosedReport, LimitingReport, ReachabilityReport,
};
pub use ga_bound::ga_iteration_bound;
pub use lattice::{builtin_lattice, builtin_lattices, LatticeProblem};
pub use matrix::{TransitionMatrix, ROW_SUM_TOLERANCE};
pub use simulate::{
    check_homogeneity, family_z_threshold, monte_carlo_mass_on_optimal, simulate_pollen_step,
    ChainModel, HomogeneityReport, SimplifiedLatticeChain, TimeVaryingChain,
    MIN_HOMOGENEITY_SAMPLES,
};
pub use verify::{
    lattice_group_matrix, verify, write_mass_curve_csv, ChainSource, CheckResult, MatrixFixture,
    VerifyOptions, VerifyOutcome, VerifyReport, CONVERGENCE_MASS,
};
