//! Table builders behind each subcommand.

use lm05_core::channels::{CorrelationMode, NoiseKind};
use lm05_core::collective::{collective_key_rate, protocol_comparison, ComparedProtocol};
use lm05_core::curve::linspace;
use lm05_core::individual::{detection_threshold, individual_key_rate, theta_grid};
use lm05_core::montecarlo::{
    cloning_targets, noise_targets, run_lm05_cloning, run_lm05_noise, Adversary, NoiseSpec, SimConfig,
    SimStats,
};
use lm05_core::qudit::{Basis, QuditDim};
use rayon::prelude::*;

use crate::csv::{format_number, CsvTable};
use crate::CliError;

pub const MAX_CURVE_DIM: usize = 16;
pub const MAX_COMPARE_DIM: usize = 6;
/// Standard errors allowed between a simulated frequency and its target.
pub const AGREEMENT_SIGMAS: f64 = 4.0;

fn arg<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Argument(msg.into()))
}

/// Sorted, de-duplicated dimensions within `[2, max]`.
fn checked_dims(dims: &[usize], max: usize) -> Result<Vec<QuditDim>, CliError> {
    if dims.is_empty() {
        return arg("no dimensions given");
    }
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .into_iter()
        .map(|d| {
            if !(2..=max).contains(&d) {
                return arg(format!("dimension {d} outside [2, {max}]"));
            }
            Ok(QuditDim::new(d)?)
        })
        .collect()
}

/// `n` noise strengths evenly covering `[lo, hi] ⊆ [0, 1]`.
pub fn p_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || hi <= lo {
        return arg(format!("noise range [{lo}, {hi}] must be an increasing interval in [0, 1]"));
    }
    if n < 2 {
        return arg("grid needs at least two points");
    }
    Ok(linspace(lo, hi, n)?)
}

/// Key-rate table (`d, theta, pdet_min, I_AB, I_AE, I_BE, r, r_reg`) and
/// detection-threshold table (`d, pdet_min_threshold`).
pub fn cmd_individual(
    dims: &[usize],
    points: usize,
    threshold_dims: &[usize],
) -> Result<(CsvTable, CsvTable), CliError> {
    let dims = checked_dims(dims, MAX_CURVE_DIM)?;
    let tdims = checked_dims(threshold_dims, MAX_CURVE_DIM)?;
    if points < 2 {
        return arg("grid needs at least two points");
    }
    let thetas = theta_grid(points)?;
    let mut rates = CsvTable::new(&["d", "theta", "pdet_min", "I_AB", "I_AE", "I_BE", "r", "r_reg"]);
    for &d in &dims {
        let rows = thetas
            .par_iter()
            .map(|&t| individual_key_rate(d, t))
            .collect::<lm05_core::Result<Vec<_>>>()?;
        for k in rows {
            rates.push(vec![
                d.get().into(),
                k.theta.into(),
                k.pdet_min.into(),
                k.triple.i_ab.into(),
                k.triple.i_ae.into(),
                k.triple.i_be.into(),
                k.r.into(),
                k.r_reg.into(),
            ])?;
        }
    }
    let mut thresholds = CsvTable::new(&["d", "pdet_min_threshold"]);
    for &d in &tdims {
        let t = detection_threshold(d)?;
        thresholds.push(vec![d.get().into(), t.pdet.into()])?;
    }
    Ok((rates, thresholds))
}

pub fn cmd_collective(
    kind: NoiseKind,
    mode: CorrelationMode,
    dims: &[usize],
    ps: &[f64],
) -> Result<CsvTable, CliError> {
    lm05_core::channels::check_supported(kind, mode)?;
    let dims = checked_dims(dims, MAX_CURVE_DIM)?;
    let mut table = CsvTable::new(&[
        "kind",
        "mode",
        "d",
        "p",
        "Qk_theta0",
        "Qt_theta0",
        "Qk_theta1",
        "Qt_theta1",
        "qder_abscissa",
        "r",
        "r_reg",
    ]);
    for &d in &dims {
        let rows = ps
            .par_iter()
            .map(|&p| collective_key_rate(kind, mode, d, p))
            .collect::<lm05_core::Result<Vec<_>>>()?;
        for k in rows {
            let [b0, b1] = k.bases;
            table.push(vec![
                kind.label().into(),
                mode.label().into(),
                d.get().into(),
                k.p.into(),
                b0.q_k.into(),
                b0.q_t.into(),
                b1.q_k.into(),
                b1.q_t.into(),
                k.qder_abscissa.into(),
                k.r.into(),
                k.r_reg.into(),
            ])?;
        }
    }
    Ok(table)
}

/// Both comparison curves on the same p grid: `protocol, d_base, p, Qk,
/// rate_bits`, where `Qk` is each protocol's own message error rate.
pub fn cmd_compare(kind: NoiseKind, mode: CorrelationMode, d: usize, ps: &[f64]) -> Result<CsvTable, CliError> {
    lm05_core::channels::check_supported(kind, mode)?;
    let d = checked_dims(&[d], MAX_COMPARE_DIM)?[0];
    let cmp = protocol_comparison(kind, mode, d, ps)?;
    let mut table = CsvTable::new(&["protocol", "d_base", "p", "Qk", "rate_bits"]);
    for (proto, curve) in [
        (ComparedProtocol::TwoCopies, &cmp.two_copies),
        (ComparedProtocol::Squared, &cmp.squared),
    ] {
        for ((&p, &q), &r) in cmp.p_grid.iter().zip(&curve.xs).zip(&curve.ys) {
            table.push(vec![
                proto.label().into(),
                d.get().into(),
                p.into(),
                q.into(),
                r.into(),
            ])?;
        }
    }
    Ok(table)
}

pub fn sim_config(
    d: usize,
    rounds: u64,
    check_prob: f64,
    seed: u64,
    noise: Option<NoiseSpec>,
    cloning: Option<f64>,
) -> Result<SimConfig, CliError> {
    let adversary = match (noise, cloning) {
        (Some(n), None) => Adversary::Noise(n),
        (None, Some(t)) => Adversary::Cloning(t),
        _ => return arg("give exactly one of --noise and --cloning"),
    };
    Ok(SimConfig::new(QuditDim::new(d)?, rounds, check_prob, seed, adversary)?)
}

fn basis_label(b: Basis) -> &'static str {
    match b {
        Basis::Computational => "computational",
        Basis::Fourier => "fourier",
    }
}

fn adversary_label(a: &Adversary) -> String {
    match a {
        Adversary::Noise(n) => format!("{}:{}:{}", n.kind.label(), n.mode.label(), format_number(n.p)),
        Adversary::Cloning(t) => format!("cloning:{}", format_number(*t)),
    }
}

/// A simulated frequency next to the closed-form value it estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: &'static str,
    pub basis: &'static str,
    pub estimate: f64,
    pub std_err: f64,
    pub target: f64,
    pub trials: u64,
    pub within: bool,
}

/// Every frequency of `stats` that has a closed-form target under `config`.
pub fn mc_comparisons(config: &SimConfig, stats: &SimStats) -> Result<Vec<Comparison>, CliError> {
    let mut out = Vec::new();
    match config.adversary {
        Adversary::Noise(spec) => {
            let t = noise_targets(config.d, spec)?;
            for b in Basis::ALL {
                let i = b.index();
                let qk = stats.q_k_hat(b);
                out.push(Comparison {
                    quantity: "Qk",
                    basis: basis_label(b),
                    estimate: qk.value(),
                    std_err: qk.std_err(),
                    target: t.q_k[i],
                    trials: qk.trials,
                    within: qk.agrees_with(t.q_k[i], AGREEMENT_SIGMAS),
                });
                let qt = stats.q_t_hat(b);
                out.push(Comparison {
                    quantity: "Qt",
                    basis: basis_label(b),
                    estimate: qt.value(),
                    std_err: qt.std_err(),
                    target: t.q_t[i],
                    trials: qt.trials(),
                    within: qt.agrees_with(t.q_t[i], AGREEMENT_SIGMAS),
                });
                let fwd = stats.forward_error_hat(b);
                out.push(Comparison {
                    quantity: "forward_error",
                    basis: basis_label(b),
                    estimate: fwd.value(),
                    std_err: fwd.std_err(),
                    target: t.q_t[i],
                    trials: fwd.trials,
                    within: fwd.agrees_with(t.q_t[i], AGREEMENT_SIGMAS),
                });
            }
        }
        Adversary::Cloning(theta) => {
            let t = cloning_targets(config.d, theta)?;
            let det = stats.p_det_hat();
            out.push(Comparison {
                quantity: "P_det",
                basis: "both",
                estimate: det.value(),
                std_err: det.std_err(),
                target: t.p_det,
                trials: det.trials,
                within: det.agrees_with(t.p_det, AGREEMENT_SIGMAS),
            });
            for b in Basis::ALL {
                let ab = stats.p_ab_hat(b);
                out.push(Comparison {
                    quantity: "P_AB",
                    basis: basis_label(b),
                    estimate: ab.value(),
                    std_err: ab.std_err(),
                    target: t.p_ab[b.index()],
                    trials: ab.trials,
                    within: ab.agrees_with(t.p_ab[b.index()], AGREEMENT_SIGMAS),
                });
                let ae = p_ae_hat(stats, b);
                out.push(Comparison {
                    quantity: "P_AE",
                    basis: basis_label(b),
                    estimate: ae.value(),
                    std_err: ae.std_err(),
                    target: t.p_ae,
                    trials: ae.trials,
                    within: ae.agrees_with(t.p_ae, AGREEMENT_SIGMAS),
                });
            }
        }
    }
    Ok(out)
}

/// Frequency with which Eve's guess equals Alice's encoding.
fn p_ae_hat(stats: &SimStats, b: Basis) -> lm05_core::montecarlo::Estimate {
    let c = &stats.per_basis[b.index()];
    let d = stats.d;
    lm05_core::montecarlo::Estimate {
        hits: (0..d).map(|x| c.table_ae[x * d + x]).sum(),
        trials: c.table_ae.iter().sum(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub summary: CsvTable,
    pub per_basis: CsvTable,
    pub comparison_table: CsvTable,
    pub comparisons: Vec<Comparison>,
}

impl MonteCarloReport {
    /// The three tables separated by blank lines.
    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{}\n{}",
            self.summary.to_csv(),
            self.per_basis.to_csv(),
            self.comparison_table.to_csv()
        )
    }

    pub fn all_within(&self) -> bool {
        self.comparisons.iter().all(|c| c.within)
    }

    pub fn summary_line(&self) -> String {
        let ok = self.comparisons.iter().filter(|c| c.within).count();
        format!(
            "{ok}/{} frequencies within {} standard errors of their targets",
            self.comparisons.len(),
            AGREEMENT_SIGMAS
        )
    }
}

pub fn cmd_montecarlo(config: &SimConfig) -> Result<MonteCarloReport, CliError> {
    let stats = match config.adversary {
        Adversary::Noise(_) => run_lm05_noise(config)?,
        Adversary::Cloning(_) => run_lm05_cloning(config)?,
    };
    let comparisons = mc_comparisons(config, &stats)?;

    let mut summary = CsvTable::new(&[
        "d",
        "rounds",
        "seed",
        "check_prob",
        "adversary",
        "message_rounds",
        "check_rounds",
        "check_discarded",
        "P_det_hat",
        "within_4sigma",
        "compared",
    ]);
    let det = stats.p_det_hat();
    summary.push(vec![
        stats.d.into(),
        stats.rounds.into(),
        config.seed.into(),
        config.check_prob.into(),
        adversary_label(&config.adversary).into(),
        stats.per_basis.iter().map(|c| c.message_rounds).sum::<u64>().into(),
        det.trials.into(),
        stats.per_basis.iter().map(|c| c.check_discarded).sum::<u64>().into(),
        det.value().into(),
        comparisons.iter().filter(|c| c.within).count().into(),
        comparisons.len().into(),
    ])?;

    let mut per_basis = CsvTable::new(&[
        "basis",
        "message_rounds",
        "message_errors",
        "Qk_hat",
        "check_rounds",
        "forward_errors",
        "backward_errors",
        "Qt_hat",
        "Qt_raw_hat",
        "forward_error_hat",
        "P_AB_hat",
        "eve_guesses",
        "P_AE_hat",
        "I_AB_hat",
        "I_AE_hat",
        "I_BE_hat",
    ]);
    for b in Basis::ALL {
        let c = &stats.per_basis[b.index()];
        let ae = p_ae_hat(&stats, b);
        let (i_ab, i_ae, i_be) = stats.mutual_information_hat(b);
        per_basis.push(vec![
            basis_label(b).into(),
            c.message_rounds.into(),
            c.message_errors.into(),
            stats.q_k_hat(b).value().into(),
            c.check_rounds.into(),
            c.forward_errors.into(),
            c.backward_errors.into(),
            stats.q_t_hat(b).value().into(),
            stats.backward_error_hat(b).value().into(),
            stats.forward_error_hat(b).value().into(),
            stats.p_ab_hat(b).value().into(),
            ae.trials.into(),
            ae.value().into(),
            i_ab.into(),
            i_ae.into(),
            i_be.into(),
        ])?;
    }

    let mut comparison_table = CsvTable::new(&[
        "quantity",
        "basis",
        "trials",
        "estimate",
        "std_err",
        "target",
        "within_4sigma",
    ]);
    for c in &comparisons {
        comparison_table.push(vec![
            c.quantity.into(),
            c.basis.into(),
            c.trials.into(),
            c.estimate.into(),
            c.std_err.into(),
            c.target.into(),
            (if c.within { "yes" } else { "no" }).into(),
        ])?;
    }

    Ok(MonteCarloReport {
        summary,
        per_basis,
        comparison_table,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn individual_row_at_origin() {
        let (rates, thresholds) = cmd_individual(&[2], 3, &[2, 3]).unwrap();
        let csv = rates.to_csv();
        assert!(csv.starts_with("d,theta,pdet_min,I_AB,I_AE,I_BE,r,r_reg\n2,0,0,1,0,0,1,1\n"));
        assert_eq!(thresholds.rows().len(), 2);
    }

    #[test]
    fn rows_are_sorted_by_dimension() {
        let t = cmd_collective(NoiseKind::Depolarizing, CorrelationMode::Independent, &[5, 3, 3], &[0.0, 0.5])
            .unwrap();
        let ds: Vec<_> = t.rows().iter().map(|r| r[2].clone()).collect();
        assert_eq!(ds, vec![3usize.into(), 3usize.into(), 5usize.into(), 5usize.into()]);
    }

    #[test]
    fn collective_rejects_unsupported_combination() {
        let e = cmd_collective(NoiseKind::AmplitudeDamping, CorrelationMode::Correlated, &[3], &[0.0, 1.0])
            .unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn compare_at_zero_noise() {
        let t = cmd_compare(NoiseKind::DitPhaseFlip, CorrelationMode::Independent, 3, &[0.0, 0.1]).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "protocol,d_base,p,Qk,rate_bits");
        assert!(lines[1].starts_with("2xLM05,3,0,0,3.16992500144"));
        assert!(lines[3].starts_with("d2LM05,3,0,0,3.16992500144"));
        assert!(cmd_compare(NoiseKind::DitPhaseFlip, CorrelationMode::Independent, 7, &[0.0, 0.1]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(p_grid(0.0, 1.0, 1).is_err());
        assert!(p_grid(0.5, 0.2, 5).is_err());
        assert!(p_grid(0.0, 1.5, 5).is_err());
        assert_eq!(p_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
    }
}
