//! Exact single-photon engine for nested chained-Zeno interferometers.
//!
//! The crate simulates a photon routed through M outer interferometer cycles,
//! each containing an N-step inner chain whose far arm is a transmission
//! channel that may be blocked. On top of the forward evolution it computes:
//!
//! - detector and absorption statistics with closed-form cross-checks,
//! - backward (post-selected) states, weak values of the path projectors,
//!   and ABL probabilities along every slice of the run,
//! - exact Gaussian-pointer weak measurements of the channel projector,
//! - Monte Carlo trajectories with projective channel monitoring, and the
//!   analytic "never found" conditional distribution they converge to,
//! - eavesdropper discrimination metrics (mutual information, total
//!   variation) from unconditional pointer densities,
//! - deterministic parameter sweeps.
//!
//! Everything is pure and immutable; batches and sweeps run data-parallel
//! under the `parallel` feature (enabled by default) and fall back to
//! sequential loops without it, with identical outputs.

pub mod error;
pub mod eve;
pub mod monitor;
pub mod pointer;
pub mod quantum;
pub mod schedule;
pub mod sweep;
pub mod tol;
pub mod tsvf;

pub use error::{Result, ZenoError};
pub use eve::{eve_analysis, eve_information, EveAnalysis, EveMetrics};
pub use monitor::{
    monitored_batch, monitored_run, never_found_equivalence_oracle, MonitorOutcome,
    MonitorPlacement, MonitorSummary,
};
pub use pointer::{couple_pointer, pointer_mean, PointerDistribution, PointerModel};
pub use quantum::{LeakRecord, PathMode, PhotonState, SinkId};
pub use schedule::{
    build_schedule, Event, EventKind, LogicBit, ProtocolParams, Schedule, SliceLocator,
};
pub use sweep::{detector_sweep, eve_sweep, DetectorPoint, EvePoint};
pub use tsvf::{
    abl_probability, backward_evolve, blocked_recursion_oracle, closed_form_p_d1_unblocked,
    forward_evolve, BlockedOutcome, ForwardRun, RunReport, SliceRecord, TraceRow, TraceSlice,
    TwoStateTrace,
};
