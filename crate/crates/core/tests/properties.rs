mod common;

use common::{dim, random_state};
use lm05_core::channels::{make_channel, two_way_action, CorrelationMode, NoiseKind};
use lm05_core::collective::{direct_encode, purified_encode};
use lm05_core::qudit::{
    bell_state, partial_trace, prepare_state, skewed_entropy, tensor, von_neumann_entropy, weyl_u,
    Basis, DensityMatrix,
};
use proptest::prelude::*;

#[test]
fn weyl_group_law() {
    for n in 2..=7 {
        let d = dim(n);
        for x in 0..n {
            for y in 0..n {
                let u = weyl_u(d, x, y).unwrap();
                assert!(u.is_unitary(1e-12));
                for x2 in 0..n {
                    for y2 in 0..n {
                        let lhs = u.compose(&weyl_u(d, x2, y2).unwrap()).unwrap();
                        let rhs = weyl_u(d, d.add(x, x2), d.add(y, y2))
                            .unwrap()
                            .matrix()
                            * d.omega_pow((x2 * y) as i64);
                        let diff = (lhs.matrix() - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
                        assert!(diff < 1e-12, "d={n} ({x},{y}) ({x2},{y2})");
                    }
                }
            }
        }
    }
}

#[test]
fn bell_basis_is_orthonormal() {
    for n in 2..=7 {
        let d = dim(n);
        let states: Vec<_> = (0..n * n)
            .map(|k| bell_state(d, k / n, k % n).unwrap())
            .collect();
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                let ip = sa.inner(sb);
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip.re - expected).abs() < 1e-12 && ip.im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn skewed_entropy_concave_with_peak_at_uniform() {
    for n in 2..=10 {
        let d = dim(n);
        let grid: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
        let h: Vec<f64> = grid.iter().map(|&p| skewed_entropy(d, p).unwrap()).collect();
        for k in 1..grid.len() - 1 {
            assert!(h[k] >= 0.5 * (h[k - 1] + h[k + 1]) - 1e-12);
            assert!(h[k] <= d.log2() + 1e-12);
        }
        let peak = skewed_entropy(d, 1.0 / n as f64).unwrap();
        assert!((peak - d.log2()).abs() < 1e-12);
    }
}

#[test]
fn teleportation_average_is_maximally_mixed() {
    for n in 2..=5 {
        let rho = prepare_state(dim(n), Basis::Fourier, 1).unwrap().density();
        let parts: Vec<_> = (0..n * n)
            .map(|k| (1.0 / (n * n) as f64, purified_encode(&rho, k / n, k % n).unwrap()))
            .collect();
        let avg = DensityMatrix::mixture(&parts).unwrap();
        assert!(avg.max_abs_diff(&DensityMatrix::maximally_mixed(vec![n])) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pure_states_have_zero_entropy(n in 2usize..=7, basis in 0usize..2, k in 0usize..7) {
        let d = dim(n);
        let rho = prepare_state(d, Basis::from_index(basis), k % n).unwrap().density();
        prop_assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-10);
    }

    #[test]
    fn unitaries_preserve_spectrum((n, rho) in random_state(2, 5), x in 0usize..5, y in 0usize..5) {
        let out = direct_encode(&rho, x % n, y % n).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&out).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn purified_encoding_is_weyl_conjugation((n, rho) in random_state(2, 5), x in 0usize..5, y in 0usize..5) {
        let a = purified_encode(&rho, x % n, y % n).unwrap();
        let b = direct_encode(&rho, x % n, y % n).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn depolarizing_is_white_noise((n, rho) in random_state(2, 5), p in 0.0f64..=1.0) {
        let out = make_channel(NoiseKind::Depolarizing, dim(n), p).unwrap().apply(&rho).unwrap();
        let white = DensityMatrix::mixture(&[
            (1.0 - p, rho.clone()),
            (p, DensityMatrix::maximally_mixed(vec![n])),
        ]).unwrap();
        prop_assert!(out.max_abs_diff(&white) < 1e-12);
    }

    #[test]
    fn two_way_action_is_a_channel(
        (n, rho) in random_state(2, 4),
        p in 0.0f64..=1.0,
        kind in 0usize..3,
        correlated in any::<bool>(),
        x in 0usize..4,
        y in 0usize..4,
    ) {
        let kind = NoiseKind::ALL[kind];
        let mode = if correlated && kind.is_pauli() {
            CorrelationMode::Correlated
        } else {
            CorrelationMode::Independent
        };
        let out = two_way_action(kind, mode, dim(n), p, (x % n, y % n), &rho).unwrap();
        prop_assert!(out.validate(1e-10).is_ok());
    }

    #[test]
    fn partial_trace_of_products((n, a) in random_state(2, 4), (m, b) in random_state(2, 3)) {
        let ab = tensor(&a, &b);
        prop_assert!(partial_trace(&ab, &[1]).unwrap().max_abs_diff(&a) < 1e-12);
        prop_assert!(partial_trace(&ab, &[0]).unwrap().max_abs_diff(&b) < 1e-12);
        prop_assert_eq!(ab.dims(), &[n, m]);
    }
}
