//! Projective (nondemolition) monitoring of the channel: Monte Carlo
//! trajectories and the analytic never-found conditional distribution.
//!
//! A monitored trajectory keeps a normalized state. At each monitored slice
//! the channel projector is measured: "found" collapses the photon into the
//! channel and lets it keep evolving (the photon survives, the interference
//! does not); "absent" zeroes the channel amplitude and renormalizes. Sink
//! events are sampled as terminal outcomes.
//!
//! Trajectories are reproducible: trajectory `i` of a batch draws from a
//! ChaCha8 generator seeded with the batch seed on stream `i`, so batches can
//! be split across threads without changing any outcome.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Result, ZenoError};
use crate::quantum::{PathMode, PhotonState, SinkId};
use crate::schedule::{build_schedule, EventKind, LogicBit, ProtocolParams, Schedule, SliceLocator};
use crate::tol;

/// Where the channel monitor sits relative to the blockade.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorPlacement {
    /// Immediately after each inner beam splitter, before any absorber: the
    /// monitor sees whatever amplitude the splitter moved into the channel.
    BeforeAbsorb,
    /// After the absorber (control experiments): in blocked runs the monitor
    /// then never finds anything.
    AfterAbsorb,
}

/// Result of one monitored trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorOutcome {
    pub detector: SinkId,
    pub found_events: Vec<SliceLocator>,
}

/// Run a single monitored trajectory, deterministic in `seed`.
pub fn monitored_run(
    schedule: &Schedule,
    monitor: &BTreeSet<SliceLocator>,
    placement: MonitorPlacement,
    seed: u64,
) -> MonitorOutcome {
    let checkpoints = resolve_placement(schedule, monitor, placement);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    trajectory(schedule, &checkpoints, &mut rng)
}

/// Map validated after-inner-splitter slices onto the event indices where the
/// monitor actually fires under the given placement.
fn resolve_placement(
    schedule: &Schedule,
    monitor: &BTreeSet<SliceLocator>,
    placement: MonitorPlacement,
) -> BTreeSet<usize> {
    let valid = schedule.validate_monitor_slices(monitor);
    valid
        .iter()
        .map(|loc| {
            let i = loc.after_event_index;
            if placement == MonitorPlacement::AfterAbsorb {
                if let Some(next) = schedule.events.get(i + 1) {
                    if matches!(next.kind, EventKind::BobAbsorb { .. }) {
                        return i + 1;
                    }
                }
            }
            i
        })
        .collect()
}

fn trajectory(
    schedule: &Schedule,
    checkpoints: &BTreeSet<usize>,
    rng: &mut impl Rng,
) -> MonitorOutcome {
    let mut amp = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO];
    let mut found_events = Vec::new();

    let rotate = |amp: &mut [Complex64; 3], i: usize, j: usize, theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let (u, v) = (amp[i], amp[j]);
        amp[i] = cos * u - sin * v;
        amp[j] = sin * u + cos * v;
    };
    // Born probability of the channel mode; the state is kept normalized.
    let channel_prob = |amp: &[Complex64; 3]| amp[2].norm_sqr().clamp(0.0, 1.0);
    let drop_channel = |amp: &mut [Complex64; 3]| {
        amp[2] = Complex64::ZERO;
        let norm = (amp[0].norm_sqr() + amp[1].norm_sqr()).sqrt();
        amp[0] /= norm;
        amp[1] /= norm;
    };

    for event in &schedule.events {
        match event.kind {
            EventKind::OuterBs { .. } => rotate(&mut amp, 0, 1, schedule.theta_outer),
            EventKind::InnerBs { .. } => rotate(&mut amp, 1, 2, schedule.theta_inner),
            EventKind::BobAbsorb { cycle, step } => {
                if rng.random::<f64>() < channel_prob(&amp) {
                    return MonitorOutcome {
                        detector: SinkId::BobAbsorb { cycle, step },
                        found_events,
                    };
                }
                drop_channel(&mut amp);
            }
            EventKind::D3Detect { cycle } => {
                if rng.random::<f64>() < channel_prob(&amp) {
                    return MonitorOutcome { detector: SinkId::D3 { cycle }, found_events };
                }
                drop_channel(&mut amp);
            }
            EventKind::FinalDetect => {
                let detector = if rng.random::<f64>() < amp[0].norm_sqr().clamp(0.0, 1.0) {
                    SinkId::D1
                } else {
                    SinkId::D2
                };
                return MonitorOutcome { detector, found_events };
            }
        }
        if checkpoints.contains(&event.index) {
            if rng.random::<f64>() < channel_prob(&amp) {
                // Found: the photon survives, collapsed into the channel.
                amp = [Complex64::ZERO, Complex64::ZERO, Complex64::ONE];
                found_events.push(SliceLocator::after(event.index));
            } else {
                drop_channel(&mut amp);
            }
        }
    }
    unreachable!("schedules always end in FinalDetect");
}

/// Aggregated counts over a batch of monitored trajectories.
#[derive(Clone, Debug, Serialize)]
pub struct MonitorSummary {
    pub n_runs: u64,
    pub seed: u64,
    pub placement: MonitorPlacement,
    pub detector_counts: BTreeMap<String, u64>,
    /// Counts restricted to trajectories with no "found" event.
    pub detector_counts_never_found: BTreeMap<String, u64>,
    /// Trajectories keyed by how many "found" events they recorded.
    pub found_histogram: BTreeMap<usize, u64>,
}

impl MonitorSummary {
    fn empty(seed: u64, placement: MonitorPlacement) -> Self {
        MonitorSummary {
            n_runs: 0,
            seed,
            placement,
            detector_counts: BTreeMap::new(),
            detector_counts_never_found: BTreeMap::new(),
            found_histogram: BTreeMap::new(),
        }
    }

    fn record(mut self, outcome: &MonitorOutcome) -> Self {
        self.n_runs += 1;
        let label = outcome.detector.label();
        *self.detector_counts.entry(label.clone()).or_insert(0) += 1;
        if outcome.found_events.is_empty() {
            *self.detector_counts_never_found.entry(label).or_insert(0) += 1;
        }
        *self.found_histogram.entry(outcome.found_events.len()).or_insert(0) += 1;
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.n_runs += other.n_runs;
        for (k, v) in other.detector_counts {
            *self.detector_counts.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.detector_counts_never_found {
            *self.detector_counts_never_found.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.found_histogram {
            *self.found_histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    pub fn never_found_total(&self) -> u64 {
        self.detector_counts_never_found.values().sum()
    }
}

/// Sequential batch of monitored trajectories; trajectory `i` uses stream `i`
/// of the seeded generator.
pub fn monitored_batch_seq(
    schedule: &Schedule,
    monitor: &BTreeSet<SliceLocator>,
    placement: MonitorPlacement,
    seed: u64,
    n_runs: u64,
) -> MonitorSummary {
    let checkpoints = resolve_placement(schedule, monitor, placement);
    (0..n_runs)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            trajectory(schedule, &checkpoints, &mut rng)
        })
        .fold(MonitorSummary::empty(seed, placement), |acc, outcome| acc.record(&outcome))
}

/// Parallel batch; identical outcomes to [`monitored_batch_seq`] because each
/// trajectory owns its stream.
#[cfg(feature = "parallel")]
pub fn monitored_batch_par(
    schedule: &Schedule,
    monitor: &BTreeSet<SliceLocator>,
    placement: MonitorPlacement,
    seed: u64,
    n_runs: u64,
) -> MonitorSummary {
    let checkpoints = resolve_placement(schedule, monitor, placement);
    (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            trajectory(schedule, &checkpoints, &mut rng)
        })
        .fold(
            || MonitorSummary::empty(seed, placement),
            |acc, outcome| acc.record(&outcome),
        )
        .reduce(|| MonitorSummary::empty(seed, placement), MonitorSummary::merge)
}

/// Batch entry point; uses the parallel path when the `parallel` feature is
/// enabled and the sequential one otherwise.
pub fn monitored_batch(
    schedule: &Schedule,
    monitor: &BTreeSet<SliceLocator>,
    placement: MonitorPlacement,
    seed: u64,
    n_runs: u64,
) -> MonitorSummary {
    #[cfg(feature = "parallel")]
    {
        monitored_batch_par(schedule, monitor, placement, seed, n_runs)
    }
    #[cfg(not(feature = "parallel"))]
    {
        monitored_batch_seq(schedule, monitor, placement, seed, n_runs)
    }
}

/// Analytic detector distribution of the unblocked-but-fully-monitored run
/// conditioned on never finding the photon: zero the channel amplitude after
/// every inner beam splitter (unnormalized), then renormalize the sink
/// probabilities. This coincides with the blocked run's kept-branch
/// conditional distribution, which is the point of the equivalence.
pub fn never_found_equivalence_oracle(
    outer_cycles: u32,
    inner_cycles: u32,
) -> Result<BTreeMap<String, f64>> {
    let schedule =
        build_schedule(&ProtocolParams::new(outer_cycles, inner_cycles, LogicBit::Zero))?;
    let mut state = PhotonState::new_in(PathMode::A);
    for event in &schedule.events {
        state = schedule.apply_event(&state, event);
        if matches!(event.kind, EventKind::InnerBs { .. }) {
            state = state.zero_mode(PathMode::C);
        }
    }
    let kept: f64 = state.leak_prob();
    if kept < tol::CONDITIONING_PROB {
        return Err(ZenoError::ImpossibleConditioning);
    }
    Ok(state
        .leaks()
        .iter()
        .map(|r| (r.sink.label(), r.amplitude.norm_sqr() / kept))
        .collect())
}
