//! Three-group index coding with power-domain superposition.
//!
//! Users are split by channel gain into near, intermediate and far groups.
//! Each group gets its own linear index code over GF(2), designed in order
//! far, intermediate, near so that later groups can use earlier codes as
//! coded side information. The codes are then superposed in the power
//! domain and decoded with SIC. The crate covers code design, scheduling,
//! delivery verification, and rate and power analysis.
//!
//! Numeric parts are generic over `num_traits::Float`; the aliases below fix
//! the scalar to `f64` (and `f32` where useful).

pub mod analysis;
pub mod checks;
pub mod error;
pub mod gf2;
pub mod grouping;
pub mod icp;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod scheduler;
pub mod solver;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector, XorBasis};
pub use grouping::{assign_groups, group_min_gains, Group, GroupAssignment};
pub use icp::{is_valid_code, reduce_by_coded_rows, IndexCode, IndexCodingProblem, User};
pub use pipeline::{design_codes, run_pipeline, Lengths, ThreeGroupCode, TwoGroupCode};
pub use scenario::{RandomInstanceSpec, Scenario};
pub use scheduler::{build_plan, classify_case, verify_delivery, CaseId, Counts, Pair, TransmissionKind};
pub use solver::{solve_exact, solve_greedy, SolverConfig, SolverKind};

pub type ChannelState = grouping::ChannelState<f64>;
pub type GroupGains = grouping::GroupGains<f64>;
pub type PowerProfile = scheduler::PowerProfile<f64>;
pub type TransmissionPlan = scheduler::TransmissionPlan<f64>;
pub type RateParams = analysis::RateParams<f64>;
pub type RateReport = analysis::RateReport<f64>;
pub type PowerReport = analysis::PowerReport<f64>;

pub type ChannelState32 = grouping::ChannelState<f32>;
pub type GroupGains32 = grouping::GroupGains<f32>;
pub type PowerProfile32 = scheduler::PowerProfile<f32>;
pub type RateParams32 = analysis::RateParams<f32>;
