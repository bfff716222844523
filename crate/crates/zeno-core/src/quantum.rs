//! Exact complex amplitude algebra for a single photon over three path modes.
//!
//! States are immutable; every operation returns a new value, so they are
//! safe to share across threads. Absorption and detection move amplitude out
//! of the live modes into a leak ledger instead of discarding it: total
//! probability stays accounted for, and conditional (post-selected) analyses
//! can read the recorded amplitudes back.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ZenoError};

/// The three live path modes of the interferometer.
///
/// `A` is the arm that never leaves the sender's station, `B` the arm feeding
/// the inner chain, and `C` the transmission channel where the blockade may
/// sit.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathMode {
    A,
    B,
    C,
}

impl PathMode {
    pub const ALL: [PathMode; 3] = [PathMode::A, PathMode::B, PathMode::C];

    pub(crate) fn index(self) -> usize {
        match self {
            PathMode::A => 0,
            PathMode::B => 1,
            PathMode::C => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PathMode::A => "a",
            PathMode::B => "b",
            PathMode::C => "c",
        }
    }
}

/// Where leaked amplitude can end up: the two terminal detectors, the
/// per-cycle detector at the end of each inner chain, or the blockade.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SinkId {
    D1,
    D2,
    D3 { cycle: u32 },
    BobAbsorb { cycle: u32, step: u32 },
}

impl SinkId {
    /// Stable text label, used as a key in JSON summaries.
    pub fn label(&self) -> String {
        match self {
            SinkId::D1 => "d1".to_string(),
            SinkId::D2 => "d2".to_string(),
            SinkId::D3 { cycle } => format!("d3:{cycle}"),
            SinkId::BobAbsorb { cycle, step } => format!("bob:{cycle}:{step}"),
        }
    }
}

/// One absorbed or detected branch: which sink took it, at which schedule
/// event, and the complex amplitude that left the live modes.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LeakRecord {
    pub sink: SinkId,
    pub event_index: usize,
    pub amplitude: Complex64,
}

/// Single-photon state: three live complex amplitudes plus the leak ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    amp: [Complex64; 3],
    leaks: Vec<LeakRecord>,
}

impl PhotonState {
    /// Unit amplitude in one mode, empty ledger.
    pub fn new_in(mode: PathMode) -> Self {
        let mut amp = [Complex64::ZERO; 3];
        amp[mode.index()] = Complex64::ONE;
        PhotonState { amp, leaks: Vec::new() }
    }

    /// State with the given live amplitudes and an empty ledger.
    pub fn from_amplitudes(amp: [Complex64; 3]) -> Self {
        PhotonState { amp, leaks: Vec::new() }
    }

    /// The all-zero state (used for backward states past the post-selection).
    pub fn zero() -> Self {
        PhotonState { amp: [Complex64::ZERO; 3], leaks: Vec::new() }
    }

    pub fn amplitude(&self, mode: PathMode) -> Complex64 {
        self.amp[mode.index()]
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        self.amp
    }

    pub fn leaks(&self) -> &[LeakRecord] {
        &self.leaks
    }

    /// Amplitude recorded for `sink`, if that sink has been hit.
    pub fn leak_amplitude(&self, sink: SinkId) -> Option<Complex64> {
        self.leaks.iter().find(|r| r.sink == sink).map(|r| r.amplitude)
    }

    pub fn live_norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn leak_prob(&self) -> f64 {
        self.leaks.iter().map(|r| r.amplitude.norm_sqr()).sum()
    }

    /// Live probability plus ledger probability; stays at 1 for any event
    /// sequence applied to a normalized state.
    pub fn total_probability(&self) -> f64 {
        self.live_norm_sqr() + self.leak_prob()
    }

    pub fn is_finite(&self) -> bool {
        self.amp.iter().all(|a| a.re.is_finite() && a.im.is_finite())
            && self
                .leaks
                .iter()
                .all(|r| r.amplitude.re.is_finite() && r.amplitude.im.is_finite())
    }

    /// Two-mode rotation `(u, v) <- (u cos t - v sin t, u sin t + v cos t)`
    /// on the ordered pair; the third mode and the ledger are untouched.
    pub fn rotate(&self, pair: (PathMode, PathMode), theta: f64) -> Result<Self> {
        if pair.0 == pair.1 {
            return Err(ZenoError::InvalidParameter(format!(
                "rotation pair must be distinct, got ({}, {})",
                pair.0.label(),
                pair.1.label()
            )));
        }
        if !theta.is_finite() {
            return Err(ZenoError::InvalidParameter(format!(
                "rotation angle must be finite, got {theta}"
            )));
        }
        Ok(self.rotate_unchecked(pair, theta))
    }

    pub(crate) fn rotate_unchecked(&self, pair: (PathMode, PathMode), theta: f64) -> Self {
        debug_assert!(pair.0 != pair.1 && theta.is_finite());
        let (i, j) = (pair.0.index(), pair.1.index());
        let (sin, cos) = theta.sin_cos();
        let u = self.amp[i];
        let v = self.amp[j];
        let mut amp = self.amp;
        amp[i] = cos * u - sin * v;
        amp[j] = sin * u + cos * v;
        PhotonState { amp, leaks: self.leaks.clone() }
    }

    /// Move the amplitude in `mode` into a new ledger record for `sink`.
    ///
    /// A record is appended even when the moved amplitude is zero, so ledgers
    /// of states evolved through the same schedule stay aligned. Panics if
    /// `event_index` does not strictly increase along the ledger; that is a
    /// caller bug, not a runtime condition.
    pub fn absorb(&self, mode: PathMode, sink: SinkId, event_index: usize) -> Self {
        if let Some(last) = self.leaks.last() {
            assert!(
                event_index > last.event_index,
                "leak event indices must strictly increase ({} after {})",
                event_index,
                last.event_index
            );
        }
        let mut amp = self.amp;
        let amplitude = amp[mode.index()];
        amp[mode.index()] = Complex64::ZERO;
        let mut leaks = self.leaks.clone();
        leaks.push(LeakRecord { sink, event_index, amplitude });
        PhotonState { amp, leaks }
    }

    /// Keep only the amplitude in `mode`; other live modes and the ledger are
    /// dropped. Idempotent.
    pub fn project(&self, mode: PathMode) -> Self {
        let mut amp = [Complex64::ZERO; 3];
        amp[mode.index()] = self.amp[mode.index()];
        PhotonState { amp, leaks: Vec::new() }
    }

    /// Split into the `mode` projection and its complement.
    ///
    /// The projection carries no ledger; the complement keeps the full
    /// ledger, since already-absorbed branches are by definition not in any
    /// live path.
    pub fn split_on(&self, mode: PathMode) -> (Self, Self) {
        let projected = self.project(mode);
        let mut rest = self.clone();
        rest.amp[mode.index()] = Complex64::ZERO;
        (projected, rest)
    }

    pub(crate) fn zero_mode(&self, mode: PathMode) -> Self {
        let mut out = self.clone();
        out.amp[mode.index()] = Complex64::ZERO;
        out
    }

    /// `<self|ket>` over the three live modes only (conjugate-linear in
    /// `self`); the ledgers do not contribute.
    pub fn inner_product(&self, ket: &Self) -> Complex64 {
        self.amp
            .iter()
            .zip(ket.amp.iter())
            .map(|(b, k)| b.conj() * k)
            .sum()
    }

    /// `<self|ket>` over live modes and ledger records, the latter joined by
    /// event index. Records present on only one side contribute zero. States
    /// evolved through the same schedule have one record per absorbing event,
    /// so the join is exact.
    pub fn extended_inner_product(&self, ket: &Self) -> Complex64 {
        let mut acc = self.inner_product(ket);
        let (mut i, mut j) = (0, 0);
        while i < self.leaks.len() && j < ket.leaks.len() {
            let (a, b) = (&self.leaks[i], &ket.leaks[j]);
            match a.event_index.cmp(&b.event_index) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    debug_assert_eq!(a.sink, b.sink);
                    acc += a.amplitude.conj() * b.amplitude;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Componentwise sum of live amplitudes and ledgers (joined by event
    /// index). Used to aggregate pointer branches that share a shift.
    pub(crate) fn add(&self, other: &Self) -> Self {
        let mut amp = self.amp;
        for (a, b) in amp.iter_mut().zip(other.amp.iter()) {
            *a += b;
        }
        let mut leaks = Vec::with_capacity(self.leaks.len().max(other.leaks.len()));
        let (mut i, mut j) = (0, 0);
        while i < self.leaks.len() || j < other.leaks.len() {
            match (self.leaks.get(i), other.leaks.get(j)) {
                (Some(a), Some(b)) if a.event_index == b.event_index => {
                    debug_assert_eq!(a.sink, b.sink);
                    leaks.push(LeakRecord {
                        sink: a.sink,
                        event_index: a.event_index,
                        amplitude: a.amplitude + b.amplitude,
                    });
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.event_index < b.event_index => {
                    leaks.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    leaks.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    leaks.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    leaks.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        PhotonState { amp, leaks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn re_state(a: f64, b: f64, c: f64) -> PhotonState {
        PhotonState::from_amplitudes([
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(c, 0.0),
        ])
    }

    #[test]
    fn rotate_identity_angle() {
        let s = PhotonState::new_in(PathMode::A);
        let r = s.rotate((PathMode::A, PathMode::B), 0.0).unwrap();
        assert_abs_diff_eq!(r.amplitude(PathMode::A).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.amplitude(PathMode::B).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rotate_full_swap() {
        let s = PhotonState::new_in(PathMode::A);
        let r = s.rotate((PathMode::A, PathMode::B), FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(r.amplitude(PathMode::A).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.amplitude(PathMode::B).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rotate_half_transfer() {
        // (1/sqrt2, 1/sqrt2, 0) rotated by pi/4 on (B, C): by the 2x2 matrix,
        // b -> b cos - c sin = 0.5, c -> b sin + c cos = 0.5.
        let s = re_state(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0);
        let r = s.rotate((PathMode::B, PathMode::C), FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(r.amplitude(PathMode::A).re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.amplitude(PathMode::B).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.amplitude(PathMode::C).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.live_norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rotate_rejects_bad_input() {
        let s = PhotonState::new_in(PathMode::A);
        assert!(s.rotate((PathMode::A, PathMode::A), 0.1).is_err());
        assert!(s.rotate((PathMode::A, PathMode::B), f64::NAN).is_err());
    }

    #[test]
    fn absorb_moves_amplitude() {
        let s = re_state(0.0, 0.0, 1.0);
        let sink = SinkId::BobAbsorb { cycle: 1, step: 1 };
        let r = s.absorb(PathMode::C, sink, 5);
        assert_abs_diff_eq!(r.live_norm_sqr(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.leak_prob(), 1.0, epsilon = 1e-15);
        assert_eq!(r.leak_amplitude(sink).unwrap(), Complex64::ONE);
    }

    #[test]
    fn absorb_of_empty_mode_records_zero() {
        let s = PhotonState::new_in(PathMode::A);
        let r = s.absorb(PathMode::C, SinkId::BobAbsorb { cycle: 1, step: 1 }, 5);
        assert_abs_diff_eq!(r.amplitude(PathMode::A).re, 1.0, epsilon = 1e-15);
        assert_eq!(r.leaks().len(), 1);
        assert_abs_diff_eq!(r.leak_prob(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn absorb_quarter_probability() {
        let s = re_state(FRAC_1_SQRT_2, 0.5, 0.5);
        let r = s.absorb(PathMode::C, SinkId::D3 { cycle: 1 }, 9);
        assert_abs_diff_eq!(r.leak_prob(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r.total_probability(), 1.0, epsilon = 1e-15);
    }

    #[test]
    #[should_panic(expected = "strictly increase")]
    fn absorb_rejects_duplicate_event_index() {
        let s = PhotonState::new_in(PathMode::A);
        let _ = s
            .absorb(PathMode::B, SinkId::D1, 3)
            .absorb(PathMode::C, SinkId::D2, 3);
    }

    #[test]
    fn inner_product_cases() {
        let a = PhotonState::new_in(PathMode::A);
        let b = PhotonState::new_in(PathMode::B);
        assert_eq!(a.inner_product(&a), Complex64::ONE);
        assert_eq!(a.inner_product(&b), Complex64::ZERO);
        // Destructive overlap of (1,-1,0)/sqrt2 against (1,1,0)/sqrt2.
        let p = re_state(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0);
        let q = re_state(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0);
        assert_abs_diff_eq!(p.inner_product(&q).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn project_keeps_one_mode_and_is_idempotent() {
        let s = re_state(FRAC_1_SQRT_2, 0.5, 0.5);
        let p = s.project(PathMode::C);
        assert_eq!(p.amplitude(PathMode::A), Complex64::ZERO);
        assert_eq!(p.amplitude(PathMode::B), Complex64::ZERO);
        assert_abs_diff_eq!(p.amplitude(PathMode::C).re, 0.5, epsilon = 1e-15);
        assert_eq!(p.project(PathMode::C), p);
        assert!(p.leaks().is_empty());

        let nothing = PhotonState::new_in(PathMode::A).project(PathMode::C);
        assert_abs_diff_eq!(nothing.live_norm_sqr(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn split_preserves_everything() {
        let s = re_state(0.6, 0.0, 0.8).absorb(PathMode::B, SinkId::D3 { cycle: 1 }, 2);
        let (proj, rest) = s.split_on(PathMode::C);
        let back = proj.add(&rest);
        assert_eq!(back.amplitudes(), s.amplitudes());
        assert_eq!(back.leaks().len(), s.leaks().len());
        assert!(proj.leaks().is_empty());
        assert_eq!(rest.leaks().len(), 1);
    }

    #[test]
    fn extended_inner_product_joins_ledgers() {
        let s = re_state(0.6, 0.0, 0.8);
        let t = s.absorb(PathMode::C, SinkId::D3 { cycle: 1 }, 4);
        // Absorption is an isometry on live + ledger.
        assert_abs_diff_eq!(
            t.extended_inner_product(&t).re,
            s.extended_inner_product(&s).re,
            epsilon = 1e-15
        );
        // Live-only inner product loses the absorbed part.
        assert_abs_diff_eq!(t.inner_product(&t).re, 0.36, epsilon = 1e-15);
    }
}
