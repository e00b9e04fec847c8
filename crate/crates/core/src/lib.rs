//! Core engine for a stochastic delay differential equation of asset-price
//! bubble formation and collapse: drift evaluation, balance-equation roots
//! and stability scales, Euler-Maruyama integration with a unit delay,
//! regime classification, and Monte Carlo verification of the analytic
//! probability bounds.

pub mod analysis;
pub mod integrator;
pub mod mc;
pub mod model;
pub mod regime;
pub mod rng;
pub mod stats;

pub use analysis::{
    analyze, derive_scales, find_delta_m, heuristic_transition_rates, solve_roots, verify_assumption_i,
    Analysis, AnalysisError, AssumptionIiStatus, AssumptionReport, RootSet, Scales,
};
pub use integrator::{
    brownian_path, simulate, simulate_paired_ou, InitialHistory, NoiseFamily, NoiseSpec,
    SimConfig, SimError, Trajectory, DEFAULT_DT,
};
pub use mc::{
    collapse_lower_bound, corridor_bound_report, empirical_corridor_probability,
    estimate_collapse_probability, estimate_ignition_probability, estimate_random_jump_ignition,
    estimate_regime_stability, girsanov_lower_bound, ignition_lower_bound, BoundFormula,
    BoundReport, HistoryConditioning, JumpMode, McConfig, McError, McEstimate,
};
pub use model::{
    fundamental_term, total_drift, DriftValue, FundamentalSchedule, ModelError, ModelParams,
    ResponseSpec,
};
pub use regime::{
    asymptotic_slope, classify_segments, detect_ignition, verify_deterministic_jump,
    JumpDirection, JumpOutcome, RegimeError, RegimeLabel, Segment, SegmentationReport,
};
