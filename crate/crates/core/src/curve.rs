//! Sampled curves and piecewise-linear interpolation onto shared grids.

use crate::error::{argument, Result};

/// `n` evenly spaced values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return argument("a grid needs at least two points");
    }
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return argument(format!("invalid grid bounds [{lo}, {hi}]"));
    }
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect())
}

/// A curve `y(x)` sampled at points listed in generation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Curve {
    pub fn new(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return argument("curve abscissa and ordinate lengths differ");
        }
        if xs.is_empty() {
            return argument("curve has no points");
        }
        Ok(Self {
            label: label.into(),
            xs,
            ys,
        })
    }

    /// The leading run of points along which `x` strictly increases. Points
    /// that repeat the previous abscissa are skipped; the run stops at the
    /// first decrease.
    pub fn monotone_prefix(&self) -> Curve {
        let mut xs = vec![self.xs[0]];
        let mut ys = vec![self.ys[0]];
        for (&x, &y) in self.xs.iter().zip(&self.ys).skip(1) {
            let last = *xs.last().expect("non-empty");
            if x > last {
                xs.push(x);
                ys.push(y);
            } else if x < last {
                break;
            }
        }
        Curve {
            label: self.label.clone(),
            xs,
            ys,
        }
    }

    /// Upper end of the abscissa range of the monotone prefix.
    pub fn x_max(&self) -> f64 {
        *self.monotone_prefix().xs.last().expect("non-empty")
    }

    /// Linear interpolation on the monotone prefix; `None` outside its range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let m = self.monotone_prefix();
        interpolate_sorted(&m.xs, &m.ys, x)
    }
}

/// Linear interpolation on strictly increasing `xs`.
pub fn interpolate_sorted(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let first = *xs.first()?;
    let last = *xs.last()?;
    if x < first || x > last || !x.is_finite() {
        return None;
    }
    if xs.len() == 1 {
        return Some(ys[0]);
    }
    let hi = xs.partition_point(|&v| v < x).clamp(1, xs.len() - 1);
    let lo = hi - 1;
    let span = xs[hi] - xs[lo];
    let t = if span > 0.0 { (x - xs[lo]) / span } else { 0.0 };
    Some(ys[lo] + t * (ys[hi] - ys[lo]))
}

/// Every curve interpolated onto `n` shared abscissae spanning the range
/// all curves cover. Returns the grid and one ordinate vector per curve.
pub fn resample_common(curves: &[Curve], n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if curves.is_empty() {
        return argument("no curves to resample");
    }
    let prefixes: Vec<Curve> = curves.iter().map(Curve::monotone_prefix).collect();
    let lo = prefixes
        .iter()
        .map(|c| c.xs[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = prefixes
        .iter()
        .map(|c| *c.xs.last().expect("non-empty"))
        .fold(f64::INFINITY, f64::min);
    if hi <= lo {
        return argument("curves share no abscissa range");
    }
    let grid = linspace(lo, hi, n)?;
    let values = prefixes
        .iter()
        .map(|c| {
            grid.iter()
                .map(|&x| interpolate_sorted(&c.xs, &c.ys, x).expect("inside shared range"))
                .collect()
        })
        .collect();
    Ok((grid, values))
}
