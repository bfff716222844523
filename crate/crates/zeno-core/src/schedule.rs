//! Event schedule of the nested chained-Zeno interferometer.
//!
//! A schedule is the circuit IR the rest of the engine runs on: an ordered
//! list of beam-splitter rotations and absorbing detections, generated from
//! the protocol parameters (outer cycles M, inner cycles N, logical bit).
//!
//! Per outer cycle `m`: `OuterBs(m)`, then for `n = 1..N` an `InnerBs(m,n)`
//! followed by `BobAbsorb(m,n)` iff the bit is one, then `D3Detect(m)`;
//! a single `FinalDetect` closes the run. `D3Detect` events are kept even in
//! blocked schedules (they receive zero amplitude) so slice positions line up
//! between blocked and unblocked runs of the same size. Angles are equal
//! along each chain: `pi/(2M)` outer, `pi/(2N)` inner, so an unobstructed
//! chain transfers its mode completely.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Result, ZenoError};
use crate::quantum::{PathMode, PhotonState, SinkId};

/// The transmitted logical bit: `Zero` leaves the channel open, `One` puts
/// the blockade after every inner beam splitter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LogicBit {
    Zero,
    One,
}

impl LogicBit {
    pub fn blocks_channel(self) -> bool {
        matches!(self, LogicBit::One)
    }

    pub fn as_u8(self) -> u8 {
        match self {
            LogicBit::Zero => 0,
            LogicBit::One => 1,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(LogicBit::Zero),
            1 => Ok(LogicBit::One),
            other => Err(ZenoError::InvalidParameter(format!(
                "bit must be 0 or 1, got {other}"
            ))),
        }
    }
}

impl Serialize for LogicBit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

/// Protocol parameters: M outer cycles, N inner cycles, logical bit.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolParams {
    #[serde(rename = "M")]
    pub outer_cycles: u32,
    #[serde(rename = "N")]
    pub inner_cycles: u32,
    pub bit: LogicBit,
}

impl ProtocolParams {
    pub fn new(outer_cycles: u32, inner_cycles: u32, bit: LogicBit) -> Self {
        ProtocolParams { outer_cycles, inner_cycles, bit }
    }
}

/// What happens at one point of the schedule.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    OuterBs { cycle: u32 },
    InnerBs { cycle: u32, step: u32 },
    BobAbsorb { cycle: u32, step: u32 },
    D3Detect { cycle: u32 },
    FinalDetect,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::OuterBs { .. } => "outer_bs",
            EventKind::InnerBs { .. } => "inner_bs",
            EventKind::BobAbsorb { .. } => "bob_absorb",
            EventKind::D3Detect { .. } => "d3_detect",
            EventKind::FinalDetect => "final_detect",
        }
    }

    pub fn cycle(&self) -> Option<u32> {
        match self {
            EventKind::OuterBs { cycle }
            | EventKind::InnerBs { cycle, .. }
            | EventKind::BobAbsorb { cycle, .. }
            | EventKind::D3Detect { cycle } => Some(*cycle),
            EventKind::FinalDetect => None,
        }
    }

    pub fn step(&self) -> Option<u32> {
        match self {
            EventKind::InnerBs { step, .. } | EventKind::BobAbsorb { step, .. } => Some(*step),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub index: usize,
    pub kind: EventKind,
}

/// A slice of the run, addressed as "immediately after event k".
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SliceLocator {
    pub after_event_index: usize,
}

impl SliceLocator {
    pub fn after(event_index: usize) -> Self {
        SliceLocator { after_event_index: event_index }
    }
}

/// The full event list plus the derived beam-splitter angles.
#[derive(Clone, Debug, Serialize)]
pub struct Schedule {
    pub params: ProtocolParams,
    pub theta_outer: f64,
    pub theta_inner: f64,
    pub events: Vec<Event>,
}

/// Build the event list for the given parameters.
pub fn build_schedule(params: &ProtocolParams) -> Result<Schedule> {
    if params.outer_cycles < 1 || params.inner_cycles < 1 {
        return Err(ZenoError::InvalidParameter(format!(
            "M and N must be >= 1, got M={}, N={}",
            params.outer_cycles, params.inner_cycles
        )));
    }
    let (m_cycles, n_steps) = (params.outer_cycles, params.inner_cycles);
    let blocked = params.bit.blocks_channel();

    let per_cycle = 1 + n_steps as usize * if blocked { 2 } else { 1 } + 1;
    let mut events = Vec::with_capacity(m_cycles as usize * per_cycle + 1);
    let mut push = |kind| {
        let index = events.len();
        events.push(Event { index, kind });
    };
    for cycle in 1..=m_cycles {
        push(EventKind::OuterBs { cycle });
        for step in 1..=n_steps {
            push(EventKind::InnerBs { cycle, step });
            if blocked {
                push(EventKind::BobAbsorb { cycle, step });
            }
        }
        push(EventKind::D3Detect { cycle });
    }
    push(EventKind::FinalDetect);

    Ok(Schedule {
        params: *params,
        theta_outer: FRAC_PI_2 / m_cycles as f64,
        theta_inner: FRAC_PI_2 / n_steps as f64,
        events,
    })
}

impl Schedule {
    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    /// Apply one schedule event to a photon state.
    ///
    /// `FinalDetect` routes mode A to D1 and mode B to D2; its two ledger
    /// records are logged at consecutive ticks (the event's own index and the
    /// one past it) to keep ledger indices strictly increasing.
    pub fn apply_event(&self, state: &PhotonState, event: &Event) -> PhotonState {
        match event.kind {
            EventKind::OuterBs { .. } => {
                state.rotate_unchecked((PathMode::A, PathMode::B), self.theta_outer)
            }
            EventKind::InnerBs { .. } => {
                state.rotate_unchecked((PathMode::B, PathMode::C), self.theta_inner)
            }
            EventKind::BobAbsorb { cycle, step } => {
                state.absorb(PathMode::C, SinkId::BobAbsorb { cycle, step }, event.index)
            }
            EventKind::D3Detect { cycle } => {
                state.absorb(PathMode::C, SinkId::D3 { cycle }, event.index)
            }
            EventKind::FinalDetect => state
                .absorb(PathMode::A, SinkId::D1, event.index)
                .absorb(PathMode::B, SinkId::D2, event.index + 1),
        }
    }

    /// Propagate a backward state across one event, earlier in time. Unitary
    /// segments apply the adjoint rotation; absorbing events zero the
    /// backward component of the absorbed mode (the kept-branch rule).
    pub fn reverse_apply_event(&self, backward: &PhotonState, event: &Event) -> PhotonState {
        match event.kind {
            EventKind::OuterBs { .. } => {
                backward.rotate_unchecked((PathMode::A, PathMode::B), -self.theta_outer)
            }
            EventKind::InnerBs { .. } => {
                backward.rotate_unchecked((PathMode::B, PathMode::C), -self.theta_inner)
            }
            EventKind::BobAbsorb { .. } | EventKind::D3Detect { .. } => {
                backward.zero_mode(PathMode::C)
            }
            EventKind::FinalDetect => backward.zero_mode(PathMode::A).zero_mode(PathMode::B),
        }
    }

    /// All slices sitting immediately after an inner beam splitter, in order.
    pub fn inner_slices(&self) -> Vec<SliceLocator> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::InnerBs { .. }))
            .map(|e| SliceLocator::after(e.index))
            .collect()
    }

    /// The slice just after `InnerBs(cycle, step)`, if it exists.
    pub fn slice_after_inner_bs(&self, cycle: u32, step: u32) -> Option<SliceLocator> {
        self.events
            .iter()
            .find(|e| e.kind == EventKind::InnerBs { cycle, step })
            .map(|e| SliceLocator::after(e.index))
    }

    /// Keep only the requested slices that sit immediately after an inner
    /// beam splitter, where channel amplitude is meaningful. Everything else
    /// is dropped; an empty result for a nonempty request is the caller's cue
    /// to warn, not an error.
    pub fn validate_monitor_slices(
        &self,
        requested: &BTreeSet<SliceLocator>,
    ) -> BTreeSet<SliceLocator> {
        requested
            .iter()
            .filter(|loc| {
                self.events
                    .get(loc.after_event_index)
                    .is_some_and(|e| matches!(e.kind, EventKind::InnerBs { .. }))
            })
            .copied()
            .collect()
    }

    /// Index of the event that feeds the given sink, if present in this
    /// schedule.
    pub fn sink_event_index(&self, sink: SinkId) -> Option<usize> {
        let kind = match sink {
            SinkId::D1 | SinkId::D2 => EventKind::FinalDetect,
            SinkId::D3 { cycle } => EventKind::D3Detect { cycle },
            SinkId::BobAbsorb { cycle, step } => EventKind::BobAbsorb { cycle, step },
        };
        self.events.iter().find(|e| e.kind == kind).map(|e| e.index)
    }

    /// The live mode a sink drains: D1 takes A, D2 takes B, the rest take C.
    pub fn pre_sink_mode(sink: SinkId) -> PathMode {
        match sink {
            SinkId::D1 => PathMode::A,
            SinkId::D2 => PathMode::B,
            SinkId::D3 { .. } | SinkId::BobAbsorb { .. } => PathMode::C,
        }
    }
}
