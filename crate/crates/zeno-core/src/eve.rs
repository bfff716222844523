//! Eavesdropper analysis: how much an unconditional pointer reading of the
//! channel tells about the logical bit.
//!
//! Eve has no access to the terminal detectors, so her statistic is the
//! unconditional pointer density for each bit. The module reports the mutual
//! information between the bit and the pointer position and the total
//! variation distance between the two densities, both by trapezoid
//! integration on a shared grid.

use serde::Serialize;

use crate::error::{Result, ZenoError};
use crate::pointer::{
    couple_pointer, grid_between, PointerDistribution, PointerModel, DEFAULT_GRID_POINTS,
};
use crate::schedule::{LogicBit, Schedule};

/// Discrimination metrics for one coupling point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EveMetrics {
    pub mutual_information_bits: f64,
    pub tv_distance: f64,
}

/// Metrics plus the densities they were integrated from.
#[derive(Clone, Debug)]
pub struct EveAnalysis {
    pub metrics: EveMetrics,
    pub xs: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

/// Couple a pointer at the slice after `InnerBs(cycle, step)` in both runs
/// and compare the unconditional densities. The coupling point is addressed
/// by protocol coordinates because raw event indices differ between the
/// blocked and unblocked schedules.
pub fn eve_analysis(
    unblocked: &Schedule,
    blocked: &Schedule,
    coupling_point: (u32, u32),
    model: &PointerModel,
    prior: f64,
) -> Result<EveAnalysis> {
    if unblocked.params.bit != LogicBit::Zero || blocked.params.bit != LogicBit::One {
        return Err(ZenoError::InvalidParameter(
            "schedule pair must be (bit 0, bit 1)".to_string(),
        ));
    }
    if unblocked.params.outer_cycles != blocked.params.outer_cycles
        || unblocked.params.inner_cycles != blocked.params.inner_cycles
    {
        return Err(ZenoError::InvalidParameter(
            "schedule pair must share M and N".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&prior) {
        return Err(ZenoError::InvalidParameter(format!(
            "prior must lie in [0, 1], got {prior}"
        )));
    }
    let (cycle, step) = coupling_point;
    let locate = |s: &Schedule| {
        s.slice_after_inner_bs(cycle, step).ok_or_else(|| {
            ZenoError::InvalidParameter(format!(
                "no inner beam splitter at cycle {cycle}, step {step}"
            ))
        })
    };
    let loc0 = [locate(unblocked)?].into_iter().collect();
    let loc1 = [locate(blocked)?].into_iter().collect();

    let d0 = couple_pointer(unblocked, &loc0, model, None)?;
    let d1 = couple_pointer(blocked, &loc1, model, None)?;

    let xs = shared_grid(&d0, &d1);
    let p0: Vec<f64> = xs.iter().map(|&x| d0.density(x)).collect();
    let p1: Vec<f64> = xs.iter().map(|&x| d1.density(x)).collect();

    for p in [&p0, &p1] {
        let norm = trapezoid_samples(&xs, p);
        let defect = (norm - 1.0).abs();
        if defect > 1e-4 {
            return Err(ZenoError::PrecisionError { defect });
        }
    }

    let tv_distance = 0.5
        * trapezoid_samples(&xs, &xs.iter().enumerate().map(|(i, _)| (p0[i] - p1[i]).abs()).collect::<Vec<_>>());

    // I(bit; X) = sum_b pi_b  INT p_b log2(p_b / pbar).
    let priors = [1.0 - prior, prior];
    let integrand: Vec<f64> = (0..xs.len())
        .map(|i| {
            let mixture = priors[0] * p0[i] + priors[1] * p1[i];
            let mut acc = 0.0;
            for (pb, pi) in [(p0[i], priors[0]), (p1[i], priors[1])] {
                if pb > 1e-300 && mixture > 1e-300 {
                    acc += pi * pb * (pb / mixture).log2();
                }
            }
            acc
        })
        .collect();
    let mutual_information_bits = trapezoid_samples(&xs, &integrand);

    Ok(EveAnalysis { metrics: EveMetrics { mutual_information_bits, tv_distance }, xs, p0, p1 })
}

/// Metrics only.
pub fn eve_information(
    unblocked: &Schedule,
    blocked: &Schedule,
    coupling_point: (u32, u32),
    model: &PointerModel,
    prior: f64,
) -> Result<EveMetrics> {
    eve_analysis(unblocked, blocked, coupling_point, model, prior).map(|a| a.metrics)
}

fn shared_grid(d0: &PointerDistribution, d1: &PointerDistribution) -> Vec<f64> {
    let means = d0.components().iter().chain(d1.components()).map(|c| c.mean);
    let lo = means.clone().fold(f64::INFINITY, f64::min) - 8.0 * d0.sigma().max(d1.sigma());
    let hi = d0
        .components()
        .iter()
        .chain(d1.components())
        .map(|c| c.mean)
        .fold(f64::NEG_INFINITY, f64::max)
        + 8.0 * d0.sigma().max(d1.sigma());
    grid_between(lo, hi, DEFAULT_GRID_POINTS)
}

fn trapezoid_samples(xs: &[f64], ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i - 1] + ys[i]) * (xs[i] - xs[i - 1]);
    }
    acc
}
