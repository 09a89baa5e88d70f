//! Round-by-round simulation of the protocol under channel noise or under
//! the equiangular cloning attack.
//!
//! Every round draws its randomness from its own ChaCha stream derived from
//! `(seed, round index)`, so results do not depend on how rounds are split
//! across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{check_supported, make_channel, CorrelationMode, KrausChannel, NoiseKind};
use crate::collective::error_rates;
use crate::error::{argument, check_unit_interval, Result};
use crate::individual::{equiangular_ancillas, min_detection_probability, mutual_informations};
use crate::qudit::{prepare_state, weyl_u, Basis, QuditDim};

/// Largest dimension the simulator accepts.
pub const SIM_MAX_DIM: usize = 8;

/// Default probability of a check round (`1 - c`).
pub const DEFAULT_CHECK_PROB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub mode: CorrelationMode,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adversary {
    Noise(NoiseSpec),
    /// Perfect cloner on both legs with this overlap angle.
    Cloning(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub d: QuditDim,
    pub rounds: u64,
    pub check_prob: f64,
    pub seed: u64,
    pub adversary: Adversary,
}

impl SimConfig {
    pub fn new(d: QuditDim, rounds: u64, check_prob: f64, seed: u64, adversary: Adversary) -> Result<Self> {
        if rounds == 0 {
            return argument("number of rounds must be positive");
        }
        check_unit_interval("check probability", check_prob)?;
        let cap = match adversary {
            Adversary::Noise(n) => {
                check_supported(n.kind, n.mode)?;
                check_unit_interval("p", n.p)?;
                SIM_MAX_DIM
            }
            Adversary::Cloning(theta) => {
                // Validates the angle.
                min_detection_probability(d, theta)?;
                SIM_MAX_DIM - 1
            }
        };
        if d.get() > cap {
            return argument(format!("simulation supports d <= {cap}, got {d}"));
        }
        Ok(Self {
            d,
            rounds,
            check_prob,
            seed,
            adversary,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundMode {
    Message,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    /// Bob's preparation (and measurement) basis.
    pub basis: Basis,
    /// Bob's prepared dit `i`.
    pub prep: usize,
    pub mode: RoundMode,
    /// Message rounds: the encoding `x`. Check rounds: Alice's outcome.
    pub value: usize,
    /// Alice's measurement basis in check rounds.
    pub alice_basis: Option<Basis>,
    /// Bob's final outcome `o`.
    pub outcome: usize,
    /// Eve's guess of `x` in message rounds of the cloning attack.
    pub eve_guess: Option<usize>,
    d: usize,
}

impl RoundRecord {
    /// `o ⊕ i^c` for message rounds, Bob's estimate of `x`.
    pub fn key(&self) -> Option<usize> {
        match self.mode {
            RoundMode::Message => Some((self.outcome + self.d - self.prep) % self.d),
            RoundMode::Check => None,
        }
    }

    /// Check round whose two bases agree.
    pub fn is_matched_check(&self) -> bool {
        self.mode == RoundMode::Check && self.alice_basis == Some(self.basis)
    }
}

/// A binomial frequency with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub hits: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }

    /// `sqrt(f(1-f)/n)` at the observed frequency.
    pub fn std_err(&self) -> f64 {
        binomial_sigma(self.value(), self.trials)
    }

    /// Whether the frequency lies within `k` standard errors of `target`,
    /// with the standard error evaluated at the target. Targets of exactly
    /// 0 or 1 must be hit exactly.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        let sigma = binomial_sigma(target, self.trials);
        if sigma == 0.0 {
            return self.value() == target;
        }
        (self.value() - target).abs() <= k * sigma
    }
}

/// Equal-weight average of several binomial frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedEstimate {
    pub strata: Vec<Estimate>,
}

impl StratifiedEstimate {
    pub fn trials(&self) -> u64 {
        self.strata.iter().map(|e| e.trials).sum()
    }

    pub fn value(&self) -> f64 {
        let k = self.strata.len() as f64;
        self.strata.iter().map(Estimate::value).sum::<f64>() / k
    }

    pub fn std_err(&self) -> f64 {
        let k = self.strata.len() as f64;
        let var: f64 = self
            .strata
            .iter()
            .map(|e| {
                let s = e.std_err();
                s * s
            })
            .sum();
        var.sqrt() / k
    }

    /// Within `k` standard errors of `target`; an exact target of 0 or 1
    /// must be hit exactly. Every stratum must have been observed.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        if self.strata.iter().any(|e| e.trials == 0) {
            return false;
        }
        if target == 0.0 || target == 1.0 {
            return self.value() == target;
        }
        (self.value() - target).abs() <= k * self.std_err()
    }
}

pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Tallies for one preparation basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisCounts {
    pub message_rounds: u64,
    pub message_errors: u64,
    /// Check rounds where Alice measured in Bob's basis.
    pub check_rounds: u64,
    /// Check rounds discarded for mismatched bases.
    pub check_discarded: u64,
    /// Alice's outcome differs from Bob's prepared dit.
    pub forward_errors: u64,
    /// Bob's outcome differs from the dit Alice resent.
    pub backward_errors: u64,
    /// Either leg mismatched.
    pub detections: u64,
    /// Matched check rounds and backward errors, split by the dit Alice
    /// resent.
    pub resent: Vec<u64>,
    pub resent_errors: Vec<u64>,
    /// `d × d` tables, row-major: (x, key), (x, eve), (key, eve).
    pub table_ab: Vec<u64>,
    pub table_ae: Vec<u64>,
    pub table_be: Vec<u64>,
}

impl BasisCounts {
    fn new(d: usize) -> Self {
        Self {
            message_rounds: 0,
            message_errors: 0,
            check_rounds: 0,
            check_discarded: 0,
            forward_errors: 0,
            backward_errors: 0,
            detections: 0,
            resent: vec![0; d],
            resent_errors: vec![0; d],
            table_ab: vec![0; d * d],
            table_ae: vec![0; d * d],
            table_be: vec![0; d * d],
        }
    }

    fn merge(mut self, other: &BasisCounts) -> Self {
        self.message_rounds += other.message_rounds;
        self.message_errors += other.message_errors;
        self.check_rounds += other.check_rounds;
        self.check_discarded += other.check_discarded;
        self.forward_errors += other.forward_errors;
        self.backward_errors += other.backward_errors;
        self.detections += other.detections;
        for (a, b) in self.resent.iter_mut().zip(&other.resent) {
            *a += b;
        }
        for (a, b) in self.resent_errors.iter_mut().zip(&other.resent_errors) {
            *a += b;
        }
        for (a, b) in self.table_ab.iter_mut().zip(&other.table_ab) {
            *a += b;
        }
        for (a, b) in self.table_ae.iter_mut().zip(&other.table_ae) {
            *a += b;
        }
        for (a, b) in self.table_be.iter_mut().zip(&other.table_be) {
            *a += b;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimStats {
    pub d: usize,
    pub rounds: u64,
    /// Indexed by [`Basis::index`].
    pub per_basis: [BasisCounts; 2],
}

impl SimStats {
    fn new(d: usize) -> Self {
        Self {
            d,
            rounds: 0,
            per_basis: [BasisCounts::new(d), BasisCounts::new(d)],
        }
    }

    fn record(&mut self, r: &RoundRecord) {
        self.rounds += 1;
        let d = self.d;
        let c = &mut self.per_basis[r.basis.index()];
        match r.mode {
            RoundMode::Message => {
                let key = r.key().expect("message round");
                c.message_rounds += 1;
                if key != r.value {
                    c.message_errors += 1;
                }
                c.table_ab[r.value * d + key] += 1;
                if let Some(e) = r.eve_guess {
                    c.table_ae[r.value * d + e] += 1;
                    c.table_be[key * d + e] += 1;
                }
            }
            RoundMode::Check => {
                if !r.is_matched_check() {
                    c.check_discarded += 1;
                    return;
                }
                c.check_rounds += 1;
                let fwd = r.value != r.prep;
                let bwd = r.outcome != r.value;
                c.forward_errors += fwd as u64;
                c.backward_errors += bwd as u64;
                c.detections += (fwd || bwd) as u64;
                c.resent[r.value] += 1;
                c.resent_errors[r.value] += bwd as u64;
            }
        }
    }

    fn merge(self, other: &SimStats) -> Self {
        let [a0, a1] = self.per_basis;
        SimStats {
            d: self.d,
            rounds: self.rounds + other.rounds,
            per_basis: [a0.merge(&other.per_basis[0]), a1.merge(&other.per_basis[1])],
        }
    }

    /// Message-round dit error rate.
    pub fn q_k_hat(&self, basis: Basis) -> Estimate {
        let c = &self.per_basis[basis.index()];
        Estimate {
            hits: c.message_errors,
            trials: c.message_rounds,
        }
    }

    /// Backward-leg error rate in matched check rounds, averaged with equal
    /// weight over the dit Alice resent.
    ///
    /// Alice resends what she measured, so under non-unital noise the resent
    /// dits are not uniform; the check error rate refers to a uniformly
    /// distributed input, which the per-dit average restores.
    pub fn q_t_hat(&self, basis: Basis) -> StratifiedEstimate {
        let c = &self.per_basis[basis.index()];
        let strata = c
            .resent
            .iter()
            .zip(&c.resent_errors)
            .map(|(&n, &e)| Estimate { hits: e, trials: n })
            .collect();
        StratifiedEstimate { strata }
    }

    /// Raw backward-leg error frequency in matched check rounds.
    pub fn backward_error_hat(&self, basis: Basis) -> Estimate {
        let c = &self.per_basis[basis.index()];
        Estimate {
            hits: c.backward_errors,
            trials: c.check_rounds,
        }
    }

    /// Forward-leg error rate in matched check rounds.
    pub fn forward_error_hat(&self, basis: Basis) -> Estimate {
        let c = &self.per_basis[basis.index()];
        Estimate {
            hits: c.forward_errors,
            trials: c.check_rounds,
        }
    }

    /// Detection frequency over matched check rounds of both bases.
    pub fn p_det_hat(&self) -> Estimate {
        Estimate {
            hits: self.per_basis.iter().map(|c| c.detections).sum(),
            trials: self.per_basis.iter().map(|c| c.check_rounds).sum(),
        }
    }

    /// Probability Bob's key dit equals Alice's encoding.
    pub fn p_ab_hat(&self, basis: Basis) -> Estimate {
        let e = self.q_k_hat(basis);
        Estimate {
            hits: e.trials - e.hits,
            trials: e.trials,
        }
    }

    /// Plug-in mutual informations `(I_AB, I_AE, I_BE)` in bits from the
    /// contingency tables of one basis.
    pub fn mutual_information_hat(&self, basis: Basis) -> (f64, f64, f64) {
        let c = &self.per_basis[basis.index()];
        (
            plug_in_mutual_information(&c.table_ab, self.d),
            plug_in_mutual_information(&c.table_ae, self.d),
            plug_in_mutual_information(&c.table_be, self.d),
        )
    }
}

/// Mutual information of the empirical joint distribution of a `d × d`
/// contingency table.
pub fn plug_in_mutual_information(table: &[u64], d: usize) -> f64 {
    let total: u64 = table.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let rows: Vec<f64> = (0..d).map(|a| (0..d).map(|b| table[a * d + b]).sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..d).map(|b| (0..d).map(|a| table[a * d + b]).sum::<u64>() as f64).collect();
    let mut mi = 0.0;
    for a in 0..d {
        for b in 0..d {
            let k = table[a * d + b] as f64;
            if k > 0.0 {
                mi += k / n * (k * n / (rows[a] * cols[b])).log2();
            }
        }
    }
    mi.max(0.0)
}

fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

fn random_basis(rng: &mut ChaCha8Rng) -> Basis {
    if rng.random::<bool>() {
        Basis::Fourier
    } else {
        Basis::Computational
    }
}

/// Samples an index with probability proportional to `weights`.
fn sample_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            return k;
        }
        u -= w;
    }
    // Rounding left u marginally above the last weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

type Vector = Vec<Complex64>;

fn mat_vec(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vector {
    let n = v.len();
    (0..n)
        .map(|r| (0..n).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Outcome probabilities of a single-qudit measurement in `basis`.
fn measurement_probs(d: QuditDim, basis: Basis, psi: &[Complex64]) -> Vec<f64> {
    let n = d.get();
    (0..n)
        .map(|k| {
            let b = prepare_state(d, basis, k).expect("in range");
            let amp: Complex64 = b.amplitudes().iter().zip(psi).map(|(x, y)| x.conj() * y).sum();
            amp.norm_sqr()
        })
        .collect()
}

fn ket(d: QuditDim, basis: Basis, k: usize) -> Vector {
    prepare_state(d, basis, k).expect("in range").amplitudes().to_vec()
}

/// Applies a randomly sampled Kraus branch and renormalises. Returns the
/// branch index so correlated noise can repeat it.
fn kraus_step(rng: &mut ChaCha8Rng, ch: &KrausChannel, psi: &[Complex64]) -> (usize, Vector) {
    let outs: Vec<Vector> = ch.kraus().iter().map(|k| mat_vec(k.matrix(), psi)).collect();
    let probs: Vec<f64> = outs.iter().map(|v| norm_sqr(v)).collect();
    let idx = sample_index(rng, &probs);
    (idx, normalized(outs[idx].clone()))
}

fn normalized(mut v: Vector) -> Vector {
    let n = norm_sqr(&v).sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

fn fixed_step(ch: &KrausChannel, idx: usize, psi: &[Complex64]) -> Vector {
    normalized(mat_vec(ch.kraus()[idx].matrix(), psi))
}

struct NoiseModel {
    d: QuditDim,
    channel: KrausChannel,
    mode: CorrelationMode,
    encodings: Vec<DMatrix<Complex64>>,
}

impl NoiseModel {
    fn new(d: QuditDim, spec: NoiseSpec) -> Result<Self> {
        let encodings = (0..d.get())
            .map(|x| weyl_u(d, x, x).map(|u| u.matrix().clone()))
            .collect::<Result<_>>()?;
        Ok(Self {
            d,
            channel: make_channel(spec.kind, d, spec.p)?,
            mode: spec.mode,
            encodings,
        })
    }

    fn backward(&self, rng: &mut ChaCha8Rng, forward_branch: usize, psi: &[Complex64]) -> Vector {
        match self.mode {
            CorrelationMode::Independent => kraus_step(rng, &self.channel, psi).1,
            CorrelationMode::Correlated => fixed_step(&self.channel, forward_branch, psi),
        }
    }

    fn round(&self, config: &SimConfig, index: u64) -> RoundRecord {
        let d = self.d;
        let n = d.get();
        let mut rng = round_rng(config.seed, index);
        let basis = random_basis(&mut rng);
        let prep = rng.random_range(0..n);
        let psi = ket(d, basis, prep);
        let (branch, psi) = kraus_step(&mut rng, &self.channel, &psi);
        if rng.random::<f64>() < config.check_prob {
            let alice_basis = random_basis(&mut rng);
            let m = sample_index(&mut rng, &measurement_probs(d, alice_basis, &psi));
            let resent = ket(d, alice_basis, m);
            let back = self.backward(&mut rng, branch, &resent);
            let outcome = sample_index(&mut rng, &measurement_probs(d, basis, &back));
            RoundRecord {
                basis,
                prep,
                mode: RoundMode::Check,
                value: m,
                alice_basis: Some(alice_basis),
                outcome,
                eve_guess: None,
                d: n,
            }
        } else {
            let x = rng.random_range(0..n);
            let encoded = mat_vec(&self.encodings[x], &psi);
            let back = self.backward(&mut rng, branch, &encoded);
            let outcome = sample_index(&mut rng, &measurement_probs(d, basis, &back));
            RoundRecord {
                basis,
                prep,
                mode: RoundMode::Message,
                value: x,
                alice_basis: None,
                outcome,
                eve_guess: None,
                d: n,
            }
        }
    }
}

struct CloningModel {
    d: QuditDim,
    /// Column `q` is the ancilla attached to `|q⟩`.
    ancillas: DMatrix<Complex64>,
    p_ae: f64,
}

impl CloningModel {
    fn new(d: QuditDim, theta: f64) -> Result<Self> {
        Ok(Self {
            d,
            ancillas: equiangular_ancillas(d, theta)?,
            p_ae: mutual_informations(d, theta)?.p_ae,
        })
    }

    /// Probabilities of Bob's outcomes after the attacked two-way trip of
    /// `psi` with encoding `Û_xx` (`x = None` means the qudit was resent
    /// fresh by Alice, so only the backward clone acts).
    fn bob_probs(&self, basis: Basis, psi: &[Complex64], x: Option<usize>) -> Vec<f64> {
        let d = self.d;
        let n = d.get();
        let anc = &self.ancillas;
        // Amplitudes indexed [q][e]: qudit and forward ancilla.
        let mut state = vec![Complex64::new(0.0, 0.0); n * n];
        match x {
            Some(x) => {
                for q in 0..n {
                    // Û_xx |q⟩ = ω^{qx} |q ⊕ x⟩ after the forward clone.
                    let phase = d.omega_pow((q * x) as i64);
                    for e in 0..n {
                        state[d.add(q, x) * n + e] += psi[q] * anc[(e, q)] * phase;
                    }
                }
            }
            None => {
                for q in 0..n {
                    state[q * n] = psi[q];
                }
            }
        }
        let bras: Vec<Vector> = (0..n).map(|k| ket(d, basis, k)).collect();
        bras.iter()
            .map(|b| {
                // Backward clone attaches ancilla h to qudit value q.
                let mut prob = 0.0;
                for e in 0..n {
                    for h in 0..n {
                        let amp: Complex64 = (0..n)
                            .map(|q| b[q].conj() * state[q * n + e] * anc[(h, q)])
                            .sum();
                        prob += amp.norm_sqr();
                    }
                }
                prob
            })
            .collect()
    }

    /// Alice's outcome probabilities after the forward clone.
    fn alice_probs(&self, basis: Basis, psi: &[Complex64]) -> Vec<f64> {
        let n = self.d.get();
        (0..n)
            .map(|k| {
                let b = ket(self.d, basis, k);
                let mut prob = 0.0;
                for e in 0..n {
                    let amp: Complex64 = (0..n)
                        .map(|q| b[q].conj() * psi[q] * self.ancillas[(e, q)])
                        .sum();
                    prob += amp.norm_sqr();
                }
                prob
            })
            .collect()
    }

    fn round(&self, config: &SimConfig, index: u64) -> RoundRecord {
        let d = self.d;
        let n = d.get();
        let mut rng = round_rng(config.seed, index);
        let basis = random_basis(&mut rng);
        let prep = rng.random_range(0..n);
        let psi = ket(d, basis, prep);
        if rng.random::<f64>() < config.check_prob {
            let alice_basis = random_basis(&mut rng);
            let m = sample_index(&mut rng, &self.alice_probs(alice_basis, &psi));
            let resent = ket(d, alice_basis, m);
            let outcome = sample_index(&mut rng, &self.bob_probs(basis, &resent, None));
            RoundRecord {
                basis,
                prep,
                mode: RoundMode::Check,
                value: m,
                alice_basis: Some(alice_basis),
                outcome,
                eve_guess: None,
                d: n,
            }
        } else {
            let x = rng.random_range(0..n);
            let outcome = sample_index(&mut rng, &self.bob_probs(basis, &psi, Some(x)));
            let guess = if rng.random::<f64>() < self.p_ae {
                x
            } else {
                // Uniform over the d - 1 wrong values.
                d.add(x, 1 + rng.random_range(0..n - 1))
            };
            RoundRecord {
                basis,
                prep,
                mode: RoundMode::Message,
                value: x,
                alice_basis: None,
                outcome,
                eve_guess: Some(guess),
                d: n,
            }
        }
    }
}

enum Model {
    Noise(NoiseModel),
    Cloning(CloningModel),
}

impl Model {
    fn new(config: &SimConfig) -> Result<Self> {
        Ok(match config.adversary {
            Adversary::Noise(spec) => Model::Noise(NoiseModel::new(config.d, spec)?),
            Adversary::Cloning(theta) => Model::Cloning(CloningModel::new(config.d, theta)?),
        })
    }

    fn round(&self, config: &SimConfig, index: u64) -> RoundRecord {
        match self {
            Model::Noise(m) => m.round(config, index),
            Model::Cloning(m) => m.round(config, index),
        }
    }
}

/// The record of a single round, reproducible from `(config, index)`.
pub fn simulate_round(config: &SimConfig, index: u64) -> Result<RoundRecord> {
    Ok(Model::new(config)?.round(config, index))
}

const CHUNK: u64 = 4096;

fn run(config: &SimConfig) -> Result<SimStats> {
    let model = Model::new(config)?;
    let d = config.d.get();
    let chunks = config.rounds.div_ceil(CHUNK);
    let stats = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = SimStats::new(d);
            let end = ((c + 1) * CHUNK).min(config.rounds);
            for i in c * CHUNK..end {
                s.record(&model.round(config, i));
            }
            s
        })
        .reduce(|| SimStats::new(d), |a, b| a.merge(&b));
    Ok(stats)
}

/// Simulates the protocol under Kraus noise.
pub fn run_lm05_noise(config: &SimConfig) -> Result<SimStats> {
    if !matches!(config.adversary, Adversary::Noise(_)) {
        return argument("noise simulation needs a noise configuration");
    }
    run(config)
}

/// Simulates the protocol under the equiangular cloning attack.
pub fn run_lm05_cloning(config: &SimConfig) -> Result<SimStats> {
    if !matches!(config.adversary, Adversary::Cloning(_)) {
        return argument("cloning simulation needs a cloning angle");
    }
    run(config)
}

/// Closed-form values the noise simulation estimates, per Bob basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTargets {
    pub q_k: [f64; 2],
    /// Error rate of one channel use on states of each basis; this is the
    /// target of both the forward and backward check-leg frequencies.
    pub q_t: [f64; 2],
}

/// Targets for [`run_lm05_noise`].
///
/// A check round resends a basis state through one channel use. In the
/// purified description that statistic belongs to the opposite preparation
/// flag: computational resends match `Q_t(θ = 1)` and Fourier resends match
/// `Q_t(θ = 0)`. Only amplitude damping distinguishes the two.
pub fn noise_targets(d: QuditDim, spec: NoiseSpec) -> Result<NoiseTargets> {
    let r = error_rates(spec.kind, spec.mode, d, spec.p)?;
    Ok(NoiseTargets {
        q_k: r.q_k,
        q_t: [r.q_t[1], r.q_t[0]],
    })
}

/// Closed-form values the cloning simulation estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloningTargets {
    pub p_det: f64,
    /// Per Bob basis.
    pub p_ab: [f64; 2],
    pub p_ae: f64,
}

pub fn cloning_targets(d: QuditDim, theta: f64) -> Result<CloningTargets> {
    let m = mutual_informations(d, theta)?;
    Ok(CloningTargets {
        p_det: min_detection_probability(d, theta)?,
        p_ab: [1.0, m.p_ab_fourier],
        p_ae: m.p_ae,
    })
}
