//! Parameter sweeps over the protocol grid.
//!
//! Points are laid out in nested order (M outer, then N, then g) before any
//! work starts, and results are collected back in that order, so output is
//! deterministic regardless of how many threads execute the sweep.

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::eve::eve_information;
use crate::pointer::PointerModel;
use crate::schedule::{build_schedule, LogicBit, ProtocolParams};
use crate::tsvf::forward_evolve;

/// Detector statistics at one (M, N) point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DetectorPoint {
    pub m: u32,
    pub n: u32,
    pub bit: LogicBit,
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_d3_sum: f64,
    pub p_absorb_sum: f64,
}

fn detector_point(m: u32, n: u32, bit: LogicBit) -> Result<DetectorPoint> {
    let schedule = build_schedule(&ProtocolParams::new(m, n, bit))?;
    let report = forward_evolve(&schedule).report;
    Ok(DetectorPoint {
        m,
        n,
        bit,
        p_d1: report.p_d1,
        p_d2: report.p_d2,
        p_d3_sum: report.p_d3_sum(),
        p_absorb_sum: report.p_bob_absorb_sum(),
    })
}

/// Eavesdropper metrics at one (M, N, g) point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvePoint {
    pub m: u32,
    pub n: u32,
    pub g: f64,
    pub mutual_information_bits: f64,
    pub tv_distance: f64,
}

fn eve_point(m: u32, n: u32, g: f64, sigma: f64, at: (u32, u32), prior: f64) -> Result<EvePoint> {
    let unblocked = build_schedule(&ProtocolParams::new(m, n, LogicBit::Zero))?;
    let blocked = build_schedule(&ProtocolParams::new(m, n, LogicBit::One))?;
    let model = PointerModel::new(g, sigma)?;
    let metrics = eve_information(&unblocked, &blocked, at, &model, prior)?;
    Ok(EvePoint {
        m,
        n,
        g,
        mutual_information_bits: metrics.mutual_information_bits,
        tv_distance: metrics.tv_distance,
    })
}

fn grid2(ms: &[u32], ns: &[u32]) -> Vec<(u32, u32)> {
    ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect()
}

fn grid3(ms: &[u32], ns: &[u32], gs: &[f64]) -> Vec<(u32, u32, f64)> {
    ms.iter()
        .flat_map(|&m| ns.iter().flat_map(move |&n| gs.iter().map(move |&g| (m, n, g))))
        .collect()
}

pub fn detector_sweep_seq(ms: &[u32], ns: &[u32], bit: LogicBit) -> Result<Vec<DetectorPoint>> {
    grid2(ms, ns).into_iter().map(|(m, n)| detector_point(m, n, bit)).collect()
}

#[cfg(feature = "parallel")]
pub fn detector_sweep_par(ms: &[u32], ns: &[u32], bit: LogicBit) -> Result<Vec<DetectorPoint>> {
    grid2(ms, ns)
        .into_par_iter()
        .map(|(m, n)| detector_point(m, n, bit))
        .collect()
}

/// Detector sweep over the (M, N) grid in row order.
pub fn detector_sweep(ms: &[u32], ns: &[u32], bit: LogicBit) -> Result<Vec<DetectorPoint>> {
    #[cfg(feature = "parallel")]
    {
        detector_sweep_par(ms, ns, bit)
    }
    #[cfg(not(feature = "parallel"))]
    {
        detector_sweep_seq(ms, ns, bit)
    }
}

pub fn eve_sweep_seq(
    ms: &[u32],
    ns: &[u32],
    gs: &[f64],
    sigma: f64,
    at: (u32, u32),
    prior: f64,
) -> Result<Vec<EvePoint>> {
    grid3(ms, ns, gs)
        .into_iter()
        .map(|(m, n, g)| eve_point(m, n, g, sigma, at, prior))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn eve_sweep_par(
    ms: &[u32],
    ns: &[u32],
    gs: &[f64],
    sigma: f64,
    at: (u32, u32),
    prior: f64,
) -> Result<Vec<EvePoint>> {
    grid3(ms, ns, gs)
        .into_par_iter()
        .map(|(m, n, g)| eve_point(m, n, g, sigma, at, prior))
        .collect()
}

/// Eavesdropper sweep over the (M, N, g) grid in row order.
pub fn eve_sweep(
    ms: &[u32],
    ns: &[u32],
    gs: &[f64],
    sigma: f64,
    at: (u32, u32),
    prior: f64,
) -> Result<Vec<EvePoint>> {
    #[cfg(feature = "parallel")]
    {
        eve_sweep_par(ms, ns, gs, sigma, at, prior)
    }
    #[cfg(not(feature = "parallel"))]
    {
        eve_sweep_seq(ms, ns, gs, sigma, at, prior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsvf::closed_form_p_d1_unblocked;
    use approx::assert_abs_diff_eq;

    #[test]
    fn detector_sweep_matches_closed_form() {
        let ms: Vec<u32> = (1..=10).collect();
        let rows = detector_sweep_seq(&ms, &[3], LogicBit::Zero).unwrap();
        assert_eq!(rows.len(), 10);
        for row in &rows {
            assert_abs_diff_eq!(row.p_d1, closed_form_p_d1_unblocked(row.m), epsilon = 1e-12);
            assert_abs_diff_eq!(
                row.p_d1 + row.p_d2 + row.p_d3_sum + row.p_absorb_sum,
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn row_order_is_nested() {
        let rows = detector_sweep_seq(&[1, 2], &[1, 3], LogicBit::One).unwrap();
        let coords: Vec<(u32, u32)> = rows.iter().map(|r| (r.m, r.n)).collect();
        assert_eq!(coords, vec![(1, 1), (1, 3), (2, 1), (2, 3)]);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let ms: Vec<u32> = (1..=6).collect();
        let ns: Vec<u32> = (1..=5).collect();
        let seq = detector_sweep_seq(&ms, &ns, LogicBit::One).unwrap();
        let par = detector_sweep_par(&ms, &ns, LogicBit::One).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(par.iter()) {
            assert_eq!((a.m, a.n), (b.m, b.n));
            assert_eq!(a.p_d1.to_bits(), b.p_d1.to_bits());
            assert_eq!(a.p_d2.to_bits(), b.p_d2.to_bits());
        }
    }

    #[test]
    fn eve_sweep_produces_grid_rows() {
        let rows = eve_sweep_seq(&[2], &[2], &[0.0, 1.0], 1.0, (2, 1), 0.5).unwrap();
        assert_eq!(rows.len(), 2);
        assert_abs_diff_eq!(rows[0].mutual_information_bits, 0.0, epsilon = 1e-9);
        assert!(rows[1].mutual_information_bits > rows[0].mutual_information_bits);
    }
}
