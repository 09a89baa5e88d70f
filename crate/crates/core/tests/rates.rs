use std::f64::consts::FRAC_PI_2;

use lm05_core::channels::{CorrelationMode, NoiseKind};
use lm05_core::collective::{collective_key_rate, error_rates, PreparationBasis};
use lm05_core::curve::linspace;
use lm05_core::individual::{individual_key_rate, min_detection_probability, mutual_informations};
use lm05_core::qudit::QuditDim;
use proptest::prelude::*;

fn dim(d: usize) -> QuditDim {
    QuditDim::new(d).unwrap()
}

fn combination() -> impl Strategy<Value = (NoiseKind, CorrelationMode)> {
    prop_oneof![
        Just((NoiseKind::Depolarizing, CorrelationMode::Independent)),
        Just((NoiseKind::Depolarizing, CorrelationMode::Correlated)),
        Just((NoiseKind::DitPhaseFlip, CorrelationMode::Independent)),
        Just((NoiseKind::DitPhaseFlip, CorrelationMode::Correlated)),
        Just((NoiseKind::AmplitudeDamping, CorrelationMode::Independent)),
    ]
}

#[test]
fn pauli_channels_treat_both_bases_alike() {
    for kind in [NoiseKind::Depolarizing, NoiseKind::DitPhaseFlip] {
        for d in 2..=8 {
            for p in [0.05, 0.3, 0.8] {
                let k = collective_key_rate(kind, CorrelationMode::Independent, dim(d), p).unwrap();
                assert!((k.bases[0].r - k.bases[1].r).abs() < 1e-12, "{kind} d={d} p={p}");
            }
        }
    }
}

#[test]
fn amplitude_damping_distinguishes_bases() {
    for d in 3..=6 {
        let k = collective_key_rate(NoiseKind::AmplitudeDamping, CorrelationMode::Independent, dim(d), 0.3).unwrap();
        assert!((k.bases[0].r - k.bases[1].r).abs() > 1e-3, "d={d}");
    }
}

#[test]
fn rate_non_increasing_while_positive() {
    let ps = linspace(0.0, 1.0, 401).unwrap();
    for kind in NoiseKind::ALL {
        for d in [2, 3, 5, 8] {
            let r: Vec<f64> = ps
                .iter()
                .map(|&p| collective_key_rate(kind, CorrelationMode::Independent, dim(d), p).unwrap().r)
                .collect();
            let positive = r.iter().take_while(|&&v| v > 0.0).count();
            for w in r[..positive].windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{kind} d={d}");
            }
        }
    }
}

#[test]
fn individual_information_ordering() {
    for d in 2..=10 {
        let mut prev_ae = -1.0;
        let mut prev_pdet = -1.0;
        for k in 0..=100 {
            let t = FRAC_PI_2 * k as f64 / 100.0;
            let m = mutual_informations(dim(d), t).unwrap();
            assert!(m.i_be <= m.i_ab + 1e-12 && m.i_be <= m.i_ae + 1e-12);
            assert!(m.i_ae >= prev_ae - 1e-12);
            prev_ae = m.i_ae;
            let pdet = min_detection_probability(dim(d), t).unwrap();
            assert!(pdet >= prev_pdet);
            prev_pdet = pdet;
        }
    }
}

proptest! {
    #[test]
    fn error_rates_are_probabilities((kind, mode) in combination(), d in 2usize..=12, p in 0.0f64..=1.0) {
        let r = error_rates(kind, mode, dim(d), p).unwrap();
        for basis in PreparationBasis::ALL {
            prop_assert!((0.0..=1.0).contains(&r.qk(basis)));
            prop_assert!((0.0..=1.0).contains(&r.qt(basis)));
        }
    }

    #[test]
    fn noiseless_rate_is_log_d((kind, mode) in combination(), d in 2usize..=12) {
        let k = collective_key_rate(kind, mode, dim(d), 0.0).unwrap();
        prop_assert!((k.r - (d as f64).log2()).abs() < 1e-12);
        prop_assert!((k.r_reg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regularized_individual_rate_bounded(d in 2usize..=16, t in 0.0f64..=FRAC_PI_2) {
        let k = individual_key_rate(dim(d), t).unwrap();
        prop_assert!(k.r_reg <= 1.0 + 1e-12);
        prop_assert!(k.r >= -1e-12);
    }
}
