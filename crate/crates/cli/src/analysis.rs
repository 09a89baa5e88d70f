//! Curve-level checks shared by the validation report and the tests.

use lm05_core::channels::{CorrelationMode, NoiseKind};
use lm05_core::collective::{collective_key_rate, protocol_comparison};
use lm05_core::curve::{resample_common, Curve};
use lm05_core::individual::individual_key_rate;
use lm05_core::qudit::QuditDim;
use lm05_core::Result;
use rayon::prelude::*;

/// Points used when curves are resampled onto a shared abscissa grid.
pub const RESAMPLE_POINTS: usize = 400;

/// `r_reg` against `P_det^min` along a θ grid.
pub fn individual_curve(d: QuditDim, thetas: &[f64]) -> Result<Curve> {
    let pts = thetas
        .iter()
        .map(|&t| individual_key_rate(d, t))
        .collect::<Result<Vec<_>>>()?;
    Curve::new(
        format!("d={d}"),
        pts.iter().map(|p| p.pdet_min).collect(),
        pts.iter().map(|p| p.r_reg).collect(),
    )
}

/// `r_reg` against the basis-averaged message error rate along a p grid.
pub fn collective_curve(kind: NoiseKind, mode: CorrelationMode, d: QuditDim, ps: &[f64]) -> Result<Curve> {
    let pts = ps
        .par_iter()
        .map(|&p| collective_key_rate(kind, mode, d, p))
        .collect::<Result<Vec<_>>>()?;
    Curve::new(
        format!("d={d}"),
        pts.iter().map(|p| p.qder_abscissa).collect(),
        pts.iter().map(|p| p.r_reg).collect(),
    )
}

/// Largest amount by which a curve falls below its predecessor on the
/// shared abscissa range, over points where both ordinates are positive.
/// Curves are expected in increasing dimension order.
pub fn ordering_violation(curves: &[Curve]) -> Result<f64> {
    let (_, ys) = resample_common(curves, RESAMPLE_POINTS)?;
    let mut worst: f64 = 0.0;
    for pair in ys.windows(2) {
        for (&lo, &hi) in pair[0].iter().zip(&pair[1]) {
            if lo > 0.0 && hi > 0.0 {
                worst = worst.max(lo - hi);
            }
        }
    }
    Ok(worst)
}

/// Largest amount by which the d²-dimensional rate falls below twice the
/// d-dimensional rate at equal message error rate, where both are positive.
pub fn hierarchy_violation(kind: NoiseKind, mode: CorrelationMode, d: QuditDim, ps: &[f64]) -> Result<f64> {
    let cmp = protocol_comparison(kind, mode, d, ps)?;
    let (_, ys) = resample_common(&[cmp.two_copies, cmp.squared], RESAMPLE_POINTS)?;
    let mut worst: f64 = 0.0;
    for (&two, &sq) in ys[0].iter().zip(&ys[1]) {
        if two > 0.0 && sq > 0.0 {
            worst = worst.max(two - sq);
        }
    }
    Ok(worst)
}
