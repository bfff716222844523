//! Gaussian-pointer measurements of the channel projector.
//!
//! At each coupling slice the photon state splits into its channel part and
//! the rest; the channel part drags the pointer by the coupling strength `g`.
//! Branches are aggregated by accumulated shift (all maps here are linear, so
//! branches sharing a shift can be summed), which keeps the bookkeeping at
//! `couplings + 1` photon states instead of `2^couplings` branches. The final
//! pointer density is a Gaussian mixture whose cross components carry the
//! exact interference between shift sectors via Gaussian-overlap factors; no
//! small-`g` approximation enters the engine.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::quantum::{PathMode, PhotonState, SinkId};
use crate::schedule::{Schedule, SliceLocator};
use crate::tol;

/// Hard cap on the number of pointer couplings in one run.
pub const MAX_COUPLINGS: usize = 20;

/// Number of points in the default evaluation grid.
pub const DEFAULT_GRID_POINTS: usize = 4001;

/// Von Neumann pointer: displacement `coupling` per unit of channel
/// occupation, Gaussian width `sigma`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PointerModel {
    pub coupling: f64,
    pub sigma: f64,
}

impl PointerModel {
    pub fn new(coupling: f64, sigma: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(ZenoError::InvalidParameter(format!(
                "pointer coupling must be finite, got {coupling}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(ZenoError::InvalidParameter(format!(
                "pointer width must be positive and finite, got {sigma}"
            )));
        }
        Ok(PointerModel { coupling, sigma })
    }
}

/// Photon branches aggregated by accumulated pointer shift.
#[derive(Clone, Debug)]
pub struct BranchedState {
    branches: Vec<(u32, PhotonState)>,
}

impl BranchedState {
    fn initial() -> Self {
        BranchedState { branches: vec![(0, PhotonState::new_in(PathMode::A))] }
    }

    fn apply_event(&mut self, schedule: &Schedule, event: &crate::schedule::Event) {
        for (_, photon) in &mut self.branches {
            *photon = schedule.apply_event(photon, event);
        }
    }

    fn couple(&mut self) {
        let mut next: Vec<(u32, PhotonState)> = Vec::with_capacity(self.branches.len() + 1);
        for (shift, photon) in &self.branches {
            let (in_channel, rest) = photon.split_on(PathMode::C);
            merge_into(&mut next, *shift, rest);
            merge_into(&mut next, *shift + 1, in_channel);
        }
        self.branches = next;
    }

    pub fn branches(&self) -> &[(u32, PhotonState)] {
        &self.branches
    }
}

fn merge_into(branches: &mut Vec<(u32, PhotonState)>, shift: u32, photon: PhotonState) {
    match branches.binary_search_by_key(&shift, |(s, _)| *s) {
        Ok(i) => branches[i].1 = branches[i].1.add(&photon),
        Err(i) => branches.insert(i, (shift, photon)),
    }
}

/// One Gaussian component of a pointer density: a normal pdf at `mean` with
/// the mixture's common width, scaled by a (possibly negative) real weight.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MixtureComponent {
    pub mean: f64,
    pub weight: f64,
}

/// Pointer probability density: a Gaussian mixture with interference
/// cross-terms folded into signed component weights (weights sum to 1).
#[derive(Clone, Debug)]
pub struct PointerDistribution {
    sigma: f64,
    components: Vec<MixtureComponent>,
    /// Total weight before normalization: 1 for unconditional densities, the
    /// post-selection probability for conditional ones.
    raw_weight: f64,
}

impl PointerDistribution {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn raw_weight(&self) -> f64 {
        self.raw_weight
    }

    /// Probability density at `x`. Cancelling cross-terms can round a hair
    /// below zero deep in the tails; those are clamped to 0.
    pub fn density(&self, x: f64) -> f64 {
        let inv = 1.0 / (self.sigma * (2.0 * std::f64::consts::PI).sqrt());
        let sum: f64 = self
            .components
            .iter()
            .map(|c| {
                let z = (x - c.mean) / self.sigma;
                c.weight * inv * (-0.5 * z * z).exp()
            })
            .sum();
        sum.max(0.0)
    }

    /// Evaluation grid: component means padded by eight widths either side,
    /// `DEFAULT_GRID_POINTS` points.
    pub fn default_grid(&self) -> Vec<f64> {
        let lo = self
            .components
            .iter()
            .map(|c| c.mean)
            .fold(f64::INFINITY, f64::min)
            - 8.0 * self.sigma;
        let hi = self
            .components
            .iter()
            .map(|c| c.mean)
            .fold(f64::NEG_INFINITY, f64::max)
            + 8.0 * self.sigma;
        grid_between(lo, hi, DEFAULT_GRID_POINTS)
    }

    /// Mean by closed form: weights are mixture weights, so the mean is the
    /// weight-average of component means. Serves as the exact cross-check for
    /// the grid-integrated [`pointer_mean`].
    pub fn exact_mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    /// Trapezoid integral of the density over the default grid; should be 1.
    pub fn normalization_on_default_grid(&self) -> f64 {
        let grid = self.default_grid();
        trapezoid(&grid, |x| self.density(x))
    }
}

pub fn grid_between(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

pub fn trapezoid(grid: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut prev = f(grid[0]);
    for pair in grid.windows(2) {
        let next = f(pair[1]);
        acc += 0.5 * (prev + next) * (pair[1] - pair[0]);
        prev = next;
    }
    acc
}

/// Mean pointer position by trapezoid integration on the default grid.
pub fn pointer_mean(dist: &PointerDistribution) -> f64 {
    let grid = dist.default_grid();
    trapezoid(&grid, |x| x * dist.density(x))
}

/// Evolve the photon-plus-pointer pair through the schedule, coupling at the
/// given slices, and return the pointer density: conditional on `post` if
/// given, otherwise the unconditional density an observer with no detector
/// access sees.
pub fn couple_pointer(
    schedule: &Schedule,
    couple_at: &BTreeSet<SliceLocator>,
    model: &PointerModel,
    post: Option<SinkId>,
) -> Result<PointerDistribution> {
    let valid = schedule.validate_monitor_slices(couple_at);
    if valid.len() != couple_at.len() {
        return Err(ZenoError::InvalidParameter(
            "coupling slices must sit immediately after an inner beam splitter".to_string(),
        ));
    }
    if couple_at.len() > MAX_COUPLINGS {
        return Err(ZenoError::CapacityExceeded {
            requested: couple_at.len(),
            cap: MAX_COUPLINGS,
        });
    }

    let mut branched = BranchedState::initial();
    for event in &schedule.events {
        branched.apply_event(schedule, event);
        if couple_at.contains(&SliceLocator::after(event.index)) {
            branched.couple();
        }
    }

    distribution_from_branches(&branched, model, post)
}

/// Fold branch amplitudes into the Gaussian-mixture density.
///
/// With branch vectors `G_s` (shift `s`·g) and pointer wave packets `psi_s`,
/// the density is `sum_st W_st k_st N((s+t)g/2, sigma)` where `W_st` is
/// either `a_s conj(a_t)` for the post-selected sink amplitudes or the Gram
/// matrix `<G_t|G_s>` over live modes and ledgers, and
/// `k_st = exp(-((s-t) g)^2 / (8 sigma^2))` is the Gaussian overlap.
fn distribution_from_branches(
    branched: &BranchedState,
    model: &PointerModel,
    post: Option<SinkId>,
) -> Result<PointerDistribution> {
    let branches = branched.branches();
    let g = model.coupling;
    let sigma = model.sigma;

    let weight = |s: usize, t: usize| -> Complex64 {
        match post {
            Some(sink) => {
                let a_s = branches[s].1.leak_amplitude(sink).unwrap_or(Complex64::ZERO);
                let a_t = branches[t].1.leak_amplitude(sink).unwrap_or(Complex64::ZERO);
                a_s * a_t.conj()
            }
            None => branches[t].1.extended_inner_product(&branches[s].1),
        }
    };

    let mut components = Vec::new();
    let mut raw_weight = 0.0;
    for s in 0..branches.len() {
        for t in s..branches.len() {
            let shift_s = f64::from(branches[s].0) * g;
            let shift_t = f64::from(branches[t].0) * g;
            let overlap = (-(shift_s - shift_t).powi(2) / (8.0 * sigma * sigma)).exp();
            let w = if s == t {
                weight(s, t).re * overlap
            } else {
                2.0 * weight(s, t).re * overlap
            };
            raw_weight += w;
            components.push(MixtureComponent { mean: 0.5 * (shift_s + shift_t), weight: w });
        }
    }

    if post.is_some() && raw_weight < tol::CONDITIONING_PROB {
        return Err(ZenoError::ImpossiblePostSelection(
            post.expect("checked above").label(),
        ));
    }
    for c in &mut components {
        c.weight /= raw_weight;
    }
    Ok(PointerDistribution { sigma, components, raw_weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, LogicBit, ProtocolParams};
    use crate::tsvf::{backward_evolve, forward_evolve};
    use approx::assert_abs_diff_eq;

    fn schedule(m: u32, n: u32, bit: LogicBit) -> Schedule {
        build_schedule(&ProtocolParams::new(m, n, bit)).unwrap()
    }

    fn single_slice(s: &Schedule, cycle: u32, step: u32) -> BTreeSet<SliceLocator> {
        [s.slice_after_inner_bs(cycle, step).unwrap()].into_iter().collect()
    }

    #[test]
    fn zero_coupling_gives_unshifted_gaussian() {
        let s = schedule(2, 2, LogicBit::Zero);
        let model = PointerModel::new(0.0, 1.0).unwrap();
        let dist = couple_pointer(&s, &single_slice(&s, 1, 1), &model, Some(SinkId::D1)).unwrap();
        assert_abs_diff_eq!(pointer_mean(&dist), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dist.normalization_on_default_grid(), 1.0, epsilon = 1e-6);
        // Density equals the unit Gaussian at a few probe points.
        for x in [-1.5f64, 0.0, 0.7] {
            let expected = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert_abs_diff_eq!(dist.density(x), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn pointer_mean_reference_cases() {
        let sigma = 1.0;
        let single = PointerDistribution {
            sigma,
            components: vec![MixtureComponent { mean: 0.3, weight: 1.0 }],
            raw_weight: 1.0,
        };
        assert_abs_diff_eq!(pointer_mean(&single), 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(single.exact_mean(), 0.3, epsilon = 1e-15);

        let two = PointerDistribution {
            sigma,
            components: vec![
                MixtureComponent { mean: 0.0, weight: 0.5 },
                MixtureComponent { mean: 0.4, weight: 0.5 },
            ],
            raw_weight: 1.0,
        };
        assert_abs_diff_eq!(pointer_mean(&two), 0.2, epsilon = 1e-9);
    }

    #[test]
    fn weak_coupling_shift_tracks_the_weak_value() {
        // At the slice after InnerBs(1,1) of the unblocked 2x2 run, W_C = 0.5
        // for post-selection on D1.
        let s = schedule(2, 2, LogicBit::Zero);
        let run = forward_evolve(&s);
        let trace = backward_evolve(&s, &run, SinkId::D1).unwrap();
        let w_c = trace.slices[2].weak_values[2].re;
        assert_abs_diff_eq!(w_c, 0.5, epsilon = 1e-10);

        let sigma = 1.0;
        let g = 0.01 * sigma;
        let model = PointerModel::new(g, sigma).unwrap();
        let dist = couple_pointer(&s, &single_slice(&s, 1, 1), &model, Some(SinkId::D1)).unwrap();
        let mean = pointer_mean(&dist);
        assert!((mean - g * w_c).abs() <= 0.0005 * sigma);
        assert_abs_diff_eq!(mean, dist.exact_mean(), epsilon = 1e-9);
    }

    #[test]
    fn blocked_post_d2_mean_is_exactly_zero() {
        let s = schedule(2, 2, LogicBit::One);
        for g in [0.01, 1.0, 10.0] {
            let model = PointerModel::new(g, 1.0).unwrap();
            let dist =
                couple_pointer(&s, &single_slice(&s, 2, 1), &model, Some(SinkId::D2)).unwrap();
            assert_abs_diff_eq!(dist.exact_mean(), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(pointer_mean(&dist), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn unconditional_density_is_normalized_without_rescaling() {
        let s = schedule(2, 2, LogicBit::One);
        let model = PointerModel::new(1.3, 0.7).unwrap();
        let locs: BTreeSet<_> =
            [s.slice_after_inner_bs(1, 1).unwrap(), s.slice_after_inner_bs(2, 1).unwrap()]
                .into_iter()
                .collect();
        let dist = couple_pointer(&s, &locs, &model, None).unwrap();
        assert_abs_diff_eq!(dist.raw_weight(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(dist.normalization_on_default_grid(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_coupling_requests() {
        let s = schedule(2, 2, LogicBit::Zero);
        let not_inner: BTreeSet<_> = [SliceLocator::after(0)].into_iter().collect();
        let model = PointerModel::new(0.1, 1.0).unwrap();
        assert!(matches!(
            couple_pointer(&s, &not_inner, &model, None),
            Err(ZenoError::InvalidParameter(_))
        ));

        let big = schedule(25, 1, LogicBit::Zero);
        let too_many: BTreeSet<_> = big.inner_slices().into_iter().collect();
        assert_eq!(too_many.len(), 25);
        assert!(matches!(
            couple_pointer(&big, &too_many, &model, None),
            Err(ZenoError::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn impossible_post_selection_through_pointer() {
        let s = schedule(2, 2, LogicBit::Zero);
        let model = PointerModel::new(0.1, 1.0).unwrap();
        assert!(matches!(
            couple_pointer(&s, &single_slice(&s, 1, 1), &model, Some(SinkId::D2)),
            Err(ZenoError::ImpossiblePostSelection(_))
        ));
    }

    #[test]
    fn pointer_model_validation() {
        assert!(PointerModel::new(f64::INFINITY, 1.0).is_err());
        assert!(PointerModel::new(0.1, 0.0).is_err());
        assert!(PointerModel::new(0.1, -1.0).is_err());
    }
}
