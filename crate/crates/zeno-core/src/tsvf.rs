//! Forward evolution with slice recording, detector statistics, backward
//! (post-selected) evolution, weak values, and ABL probabilities.
//!
//! The forward pass starts from unit amplitude in mode A and applies the
//! schedule event by event, recording the state after each event. The
//! backward pass anchors a unit vector on the post-selected sink's feeding
//! mode just before the sink event and propagates it to earlier slices with
//! adjoint rotations; crossing an absorbing event zeroes the backward
//! component of the absorbed mode. Backward states are deliberately left
//! unnormalized, so the slice overlap `<backward|forward>` is constant along
//! the run and equal to the post-selected sink amplitude. Weak values are
//! ratios and do not care about the normalization.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ZenoError};
use crate::quantum::{PathMode, PhotonState, SinkId};
use crate::schedule::{EventKind, Schedule};
use crate::tol;

/// Forward state immediately after `slice_index` events. `event` is the one
/// just applied (`None` for the initial record).
#[derive(Clone, Debug)]
pub struct SliceRecord {
    pub slice_index: usize,
    pub event: Option<EventKind>,
    pub forward: PhotonState,
}

/// Detector and absorption probabilities of one forward run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub params: crate::schedule::ProtocolParams,
    #[serde(rename = "p_D1")]
    pub p_d1: f64,
    #[serde(rename = "p_D2")]
    pub p_d2: f64,
    #[serde(rename = "p_D3")]
    pub p_d3: BTreeMap<u32, f64>,
    pub p_bob_absorb: BTreeMap<u32, BTreeMap<u32, f64>>,
    pub total: f64,
}

impl RunReport {
    pub fn p_d3_sum(&self) -> f64 {
        self.p_d3.values().sum()
    }

    pub fn p_bob_absorb_sum(&self) -> f64 {
        self.p_bob_absorb.values().flat_map(|m| m.values()).sum()
    }

    /// Probability of each sink, keyed by its label.
    pub fn sink_probabilities(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        out.insert("d1".to_string(), self.p_d1);
        out.insert("d2".to_string(), self.p_d2);
        for (cycle, p) in &self.p_d3 {
            out.insert(format!("d3:{cycle}"), *p);
        }
        for (cycle, steps) in &self.p_bob_absorb {
            for (step, p) in steps {
                out.insert(format!("bob:{cycle}:{step}"), *p);
            }
        }
        out
    }
}

/// A completed forward run: per-slice records plus the report.
#[derive(Clone, Debug)]
pub struct ForwardRun {
    pub slices: Vec<SliceRecord>,
    pub report: RunReport,
}

impl ForwardRun {
    pub fn final_state(&self) -> &PhotonState {
        &self.slices.last().expect("at least the initial slice").forward
    }
}

/// Evolve the photon through the whole schedule, recording every slice.
pub fn forward_evolve(schedule: &Schedule) -> ForwardRun {
    let mut state = PhotonState::new_in(PathMode::A);
    let mut slices = Vec::with_capacity(schedule.event_count() + 1);
    slices.push(SliceRecord { slice_index: 0, event: None, forward: state.clone() });
    for event in &schedule.events {
        state = schedule.apply_event(&state, event);
        slices.push(SliceRecord {
            slice_index: event.index + 1,
            event: Some(event.kind),
            forward: state.clone(),
        });
    }

    let mut p_d3 = BTreeMap::new();
    let mut p_bob: BTreeMap<u32, BTreeMap<u32, f64>> = BTreeMap::new();
    let (mut p_d1, mut p_d2) = (0.0, 0.0);
    for record in state.leaks() {
        let p = record.amplitude.norm_sqr();
        match record.sink {
            SinkId::D1 => p_d1 = p,
            SinkId::D2 => p_d2 = p,
            SinkId::D3 { cycle } => {
                p_d3.insert(cycle, p);
            }
            SinkId::BobAbsorb { cycle, step } => {
                p_bob.entry(cycle).or_default().insert(step, p);
            }
        }
    }
    let total = state.total_probability();
    let report = RunReport { params: schedule.params, p_d1, p_d2, p_d3, p_bob_absorb: p_bob, total };
    ForwardRun { slices, report }
}

/// `cos(pi/(2M))^(2M)`: the probability of a D1 click in an unblocked run.
/// Exact for every N, since each inner chain transfers mode B completely and
/// the per-cycle detector removes it.
pub fn closed_form_p_d1_unblocked(outer_cycles: u32) -> f64 {
    let theta = std::f64::consts::FRAC_PI_2 / f64::from(outer_cycles);
    theta.cos().powi(2 * outer_cycles as i32)
}

/// Outcome of the blocked-run scalar recursion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockedOutcome {
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_absorbed: f64,
}

/// Two-real-amplitude recursion for the blocked run, independent of the
/// event-driven engine: per cycle
/// `(a, b) <- (a cos tM - b sin tM, (a sin tM + b cos tM) cos^N tN)`,
/// accumulating the absorbed complement.
pub fn blocked_recursion_oracle(outer_cycles: u32, inner_cycles: u32) -> BlockedOutcome {
    let theta_m = std::f64::consts::FRAC_PI_2 / f64::from(outer_cycles);
    let theta_n = std::f64::consts::FRAC_PI_2 / f64::from(inner_cycles);
    let damping = theta_n.cos().powi(inner_cycles as i32);
    let (sin_m, cos_m) = theta_m.sin_cos();

    let (mut a, mut b) = (1.0f64, 0.0f64);
    let mut absorbed = 0.0f64;
    for _ in 0..outer_cycles {
        let a_next = a * cos_m - b * sin_m;
        let b_entering = a * sin_m + b * cos_m;
        let b_next = b_entering * damping;
        absorbed += b_entering * b_entering * (1.0 - damping * damping);
        a = a_next;
        b = b_next;
    }
    BlockedOutcome { p_d1: a * a, p_d2: b * b, p_absorbed: absorbed }
}

/// One slice of a two-state trace.
#[derive(Clone, Debug)]
pub struct TraceSlice {
    pub slice_index: usize,
    pub event: Option<EventKind>,
    pub forward: PhotonState,
    /// Unnormalized conditional backward state over the live modes. Zero at
    /// slices after the post-selection event, where the photon sits in the
    /// detector.
    pub backward: PhotonState,
    /// `<bwd|P_X|fwd> / <bwd|fwd>` per mode; zero past the sink event.
    pub weak_values: [Complex64; 3],
    /// `<bwd|fwd>`; carried by the sink record after the sink event, so it is
    /// constant along the whole trace.
    pub overlap: Complex64,
}

/// Forward/backward pair for one post-selection, one entry per slice.
#[derive(Clone, Debug)]
pub struct TwoStateTrace {
    pub post: SinkId,
    /// Index of the schedule event that feeds the post-selected sink. Slices
    /// up to and including this index form the two-state region; later slices
    /// have the photon in the detector.
    pub sink_event_index: usize,
    pub slices: Vec<TraceSlice>,
}

impl TwoStateTrace {
    /// Whether a slice index lies in the region where both states are live.
    pub fn in_two_state_region(&self, slice_index: usize) -> bool {
        slice_index <= self.sink_event_index
    }
}

/// Run the backward pass for one post-selection over a completed forward run.
pub fn backward_evolve(
    schedule: &Schedule,
    run: &ForwardRun,
    post: SinkId,
) -> Result<TwoStateTrace> {
    let sink_event_index = schedule.sink_event_index(post).ok_or_else(|| {
        ZenoError::InvalidParameter(format!(
            "post-selection target {} does not exist in this schedule",
            post.label()
        ))
    })?;
    let sink_amp = run
        .final_state()
        .leak_amplitude(post)
        .expect("sink event exists, so the ledger has a record for it");
    if sink_amp.norm() < tol::POST_SELECTION_AMP {
        return Err(ZenoError::ImpossiblePostSelection(post.label()));
    }

    let slice_count = run.slices.len();
    let mut backward = vec![PhotonState::zero(); slice_count];
    backward[sink_event_index] = PhotonState::new_in(Schedule::pre_sink_mode(post));
    for s in (0..sink_event_index).rev() {
        backward[s] = schedule.reverse_apply_event(&backward[s + 1], &schedule.events[s]);
    }

    let slices = run
        .slices
        .iter()
        .zip(backward)
        .map(|(record, bwd)| {
            let in_region = record.slice_index <= sink_event_index;
            let overlap = if in_region { bwd.inner_product(&record.forward) } else { sink_amp };
            let weak_values = if in_region {
                PathMode::ALL.map(|mode| {
                    bwd.amplitude(mode).conj() * record.forward.amplitude(mode) / overlap
                })
            } else {
                [Complex64::ZERO; 3]
            };
            TraceSlice {
                slice_index: record.slice_index,
                event: record.event,
                forward: record.forward.clone(),
                backward: bwd,
                weak_values,
                overlap,
            }
        })
        .collect();

    Ok(TwoStateTrace { post, sink_event_index, slices })
}

/// ABL rule: probability that an ideal intermediate projective measurement of
/// the `mode` projector fires, given the pre- and post-selected pair.
pub fn abl_probability(
    forward: &PhotonState,
    backward: &PhotonState,
    mode: PathMode,
) -> Result<f64> {
    let found: Complex64 = backward.amplitude(mode).conj() * forward.amplitude(mode);
    let missed: Complex64 = PathMode::ALL
        .iter()
        .filter(|m| **m != mode)
        .map(|m| backward.amplitude(*m).conj() * forward.amplitude(*m))
        .sum();
    let denom = found.norm_sqr() + missed.norm_sqr();
    if denom == 0.0 {
        return Err(ZenoError::UndefinedAbl);
    }
    Ok(found.norm_sqr() / denom)
}

/// One exported row of a presence trace.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub slice_index: usize,
    pub event_kind: &'static str,
    pub cycle: Option<u32>,
    pub step: Option<u32>,
    pub forward: [Complex64; 3],
    pub backward: [Complex64; 3],
    pub weak_values: [Complex64; 3],
    /// ABL probability for the channel mode. Past the sink event the photon
    /// is in the detector, so the channel cannot fire: reported as 0.
    pub abl_c: f64,
}

impl TwoStateTrace {
    /// Flatten the trace into rows, one per slice (event count + 1 rows).
    pub fn export_rows(&self) -> Vec<TraceRow> {
        self.slices
            .iter()
            .map(|slice| {
                let abl_c = if self.in_two_state_region(slice.slice_index) {
                    abl_probability(&slice.forward, &slice.backward, PathMode::C)
                        .expect("overlap is nonzero inside the two-state region")
                } else {
                    0.0
                };
                TraceRow {
                    slice_index: slice.slice_index,
                    event_kind: slice.event.as_ref().map_or("initial", |e| e.label()),
                    cycle: slice.event.as_ref().and_then(|e| e.cycle()),
                    step: slice.event.as_ref().and_then(|e| e.step()),
                    forward: slice.forward.amplitudes(),
                    backward: slice.backward.amplitudes(),
                    weak_values: slice.weak_values,
                    abl_c,
                }
            })
            .collect()
    }
}
