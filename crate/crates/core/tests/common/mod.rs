#![allow(dead_code)]

use lm05_core::qudit::{DensityMatrix, QuditDim};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

pub fn dim(d: usize) -> QuditDim {
    QuditDim::new(d).unwrap()
}

/// `G G† / Tr(G G†)` for a complex matrix built from `entries`.
pub fn density_from(d: usize, entries: &[(f64, f64)]) -> DensityMatrix {
    let g = DMatrix::from_fn(d, d, |r, c| {
        let (re, im) = entries[r * d + c];
        Complex64::new(re, im)
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m / Complex64::new(tr, 0.0), vec![d]).unwrap()
}

/// A dimension in `lo..=hi` together with a random full-rank state.
pub fn random_state(lo: usize, hi: usize) -> impl Strategy<Value = (usize, DensityMatrix)> {
    (lo..=hi).prop_flat_map(|d| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
            .prop_filter("non-degenerate", |v| v.iter().any(|&(a, b)| a.abs() + b.abs() > 1e-3))
            .prop_map(move |v| (d, density_from(d, &v)))
    })
}
