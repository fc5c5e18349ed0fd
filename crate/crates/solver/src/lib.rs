//! Equilibrium search on top of the game engine.
//!
//! The crate is layered bottom-up:
//!
//! - [`math`] and [`seeds`]: numeric helpers and seed-stream derivation;
//! - [`anchor`]: fixed per-unit reference policies (uniform, heuristic,
//!   file-backed) that search is regularized toward;
//! - [`utility`]: Monte-Carlo rollouts from a joint move profile to
//!   sum-of-squares scores;
//! - [`candidates`]: per-power candidate joint actions drawn from the
//!   anchor;
//! - [`search`]: the iterative anchor-regularized Hedge loop over
//!   candidates (piKL-Hedge) and its result types;
//! - [`factor`]: decomposing joint action values into per-unit conditional
//!   values, with the cheap single-sample lower bound;
//! - [`lab`]: small zero-sum matrix games where the search dynamics and
//!   their exploitability guarantee are verified exactly.

pub mod anchor;
pub mod candidates;
pub mod error;
pub mod factor;
pub mod lab;
pub mod math;
pub mod search;
pub mod seeds;
pub mod utility;

pub use anchor::{table_line, AnchorPolicy, HeuristicWeights, TableAnchor, ANCHOR_FLOOR};
pub use candidates::{generate_candidates, unit_menus};
pub use error::SolverError;
pub use factor::{factor_policy, JointQTable, QMode, UnitQ};
pub use lab::{
    delta_bound, exploitability, random_game, run_factored_pikl, LabResult, MatrixGame,
    TracePoint, UpdateMode,
};
pub use search::{policy_from_q, run_pikl, PowerSearch, SearchConfig, SearchResult, TraceEntry};
pub use utility::{estimate_utility, settle_to_move, sos_score, UtilityEstimate};
