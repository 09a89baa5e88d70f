//! Collective attacks: the purified protocol, its measurement statistics,
//! closed-form error rates and the entropic-uncertainty key rate.
//!
//! The purified state lives on four registers in the order `A, A″, B, B′`.
//! Bob's traveling half starts maximally entangled with `B′` and reaches
//! Alice as `A`; Alice's returning qudit starts maximally entangled with `A″`
//! and reaches Bob as `B`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::{check_supported, make_channel, pauli_weights, CorrelationMode, NoiseKind};
use crate::curve::Curve;
use crate::error::{argument, check_unit_interval, Error, Result};
use crate::qudit::{
    apply_operator, bell_state, prepare_state, skewed_entropy_unchecked, weyl_u, weyl_w,
    DensityMatrix, Operator, PureState, QuditDim, DEFAULT_TOL,
};

pub use crate::qudit::Basis as PreparationBasis;

/// Probability of each preparation basis.
pub const BASIS_PROBABILITY: f64 = 0.5;

/// Largest qudit dimension the four-register oracle accepts.
pub const ORACLE_MAX_DIM: usize = 6;

/// Effective number of distinct outcomes in correlated message runs:
/// `d/2` for even `d`, `d` for odd `d`.
pub fn f_multiplicity(d: QuditDim) -> usize {
    let n = d.get();
    if n.is_multiple_of(2) {
        n / 2
    } else {
        n
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn basis_ket(d: QuditDim, i: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); d.get()];
    v[i] = c(1.0);
    v
}

fn fourier_ket(d: QuditDim, i: usize) -> Vec<Complex64> {
    prepare_state(d, PreparationBasis::Fourier, i)
        .expect("index reduced mod d")
        .amplitudes()
        .to_vec()
}

fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Columns of a `d² × d²` unitary, grouped in blocks of `d` sharing one
/// outcome label: column `label * d + sub`.
fn refined_basis(d: QuditDim, column: impl Fn(usize, usize) -> Vec<Complex64>) -> DMatrix<Complex64> {
    let n = d.get();
    let mut m = DMatrix::<Complex64>::zeros(n * n, n * n);
    for label in 0..n {
        for sub in 0..n {
            let v = column(label, sub);
            for (row, z) in v.into_iter().enumerate() {
                m[(row, label * n + sub)] = z;
            }
        }
    }
    m
}

/// Refinement of Alice's encoding measurement on `A ⊗ A″` into Bell states.
fn encoder_basis(d: QuditDim, basis: PreparationBasis) -> DMatrix<Complex64> {
    refined_basis(d, |label, sub| {
        let (x, y) = match basis {
            PreparationBasis::Computational => (label, sub),
            PreparationBasis::Fourier => (sub, label),
        };
        bell_state(d, x, y).expect("in range").amplitudes().to_vec()
    })
}

/// Refinement of Bob's decoding measurement on `B ⊗ B′`.
fn decoder_basis(d: QuditDim, basis: PreparationBasis) -> DMatrix<Complex64> {
    refined_basis(d, |label, k| match basis {
        PreparationBasis::Computational => kron_vec(&basis_ket(d, d.add(k, label)), &basis_ket(d, k)),
        PreparationBasis::Fourier => kron_vec(
            &fourier_ket(d, d.add(k, label)),
            &fourier_ket(d, d.complement(k)),
        ),
    })
}

/// Refinement of Alice's check measurement on `A ⊗ A″` (acts on `A″` only).
fn alice_check_basis(d: QuditDim, basis: PreparationBasis) -> DMatrix<Complex64> {
    refined_basis(d, |label, a| {
        kron_vec(&basis_ket(d, a), &check_ket_alice(d, basis, label))
    })
}

/// Refinement of Bob's check measurement on `B ⊗ B′` (acts on `B` only).
fn bob_check_basis(d: QuditDim, basis: PreparationBasis) -> DMatrix<Complex64> {
    refined_basis(d, |label, b| {
        kron_vec(&check_ket_bob(d, basis, label), &basis_ket(d, b))
    })
}

fn check_ket_alice(d: QuditDim, basis: PreparationBasis, x: usize) -> Vec<Complex64> {
    match basis {
        PreparationBasis::Computational => fourier_ket(d, d.complement(x)),
        PreparationBasis::Fourier => basis_ket(d, x),
    }
}

fn check_ket_bob(d: QuditDim, basis: PreparationBasis, x: usize) -> Vec<Complex64> {
    match basis {
        PreparationBasis::Computational => fourier_ket(d, x),
        PreparationBasis::Fourier => basis_ket(d, x),
    }
}

fn projector_family(d: QuditDim, refined: &DMatrix<Complex64>) -> Vec<Operator> {
    let n = d.get();
    (0..n)
        .map(|label| {
            let cols = refined.columns(label * n, n);
            let p = cols * cols.adjoint();
            Operator::from_matrix(p, vec![n, n]).expect("finite projector")
        })
        .collect()
}

/// Rank-`d` projective measurements of one preparation basis.
#[derive(Debug, Clone)]
pub struct CoarseMeasurementSet {
    pub d: QuditDim,
    pub basis: PreparationBasis,
    /// Alice's encoding projectors on `A ⊗ A″`, indexed by her key dit.
    pub encoders: Vec<Operator>,
    /// Bob's decoding projectors on `B ⊗ B′`.
    pub decoders: Vec<Operator>,
    /// Alice's check projectors on `A ⊗ A″`.
    pub checkers_alice: Vec<Operator>,
    /// Bob's check projectors on `B ⊗ B′`.
    pub checkers_bob: Vec<Operator>,
}

impl CoarseMeasurementSet {
    pub fn families(&self) -> [&[Operator]; 4] {
        [
            &self.encoders,
            &self.decoders,
            &self.checkers_alice,
            &self.checkers_bob,
        ]
    }

    /// Largest violation of completeness, idempotence or mutual
    /// orthogonality across all four families.
    pub fn projective_error(&self) -> f64 {
        let n = self.d.get();
        let id = Operator::identity(vec![n, n]);
        let zero = Operator::zeros(vec![n, n]);
        let mut worst: f64 = 0.0;
        for family in self.families() {
            let mut sum = Operator::zeros(vec![n, n]);
            for (a, pa) in family.iter().enumerate() {
                sum = sum.add(pa).expect("same layout");
                for (b, pb) in family.iter().enumerate() {
                    let prod = pa.compose(pb).expect("same dimension");
                    let target = if a == b { pa } else { &zero };
                    worst = worst.max(prod.max_abs_diff(target));
                }
            }
            worst = worst.max(sum.max_abs_diff(&id));
        }
        worst
    }
}

pub fn coarse_measurements(d: QuditDim, basis: PreparationBasis) -> CoarseMeasurementSet {
    CoarseMeasurementSet {
        d,
        basis,
        encoders: projector_family(d, &encoder_basis(d, basis)),
        decoders: projector_family(d, &decoder_basis(d, basis)),
        checkers_alice: projector_family(d, &alice_check_basis(d, basis)),
        checkers_bob: projector_family(d, &bob_check_basis(d, basis)),
    }
}

/// Encodes `Û_xy` by a Bell measurement on `ρ ⊗ |φ⁺⟩⟨φ⁺|` that returns
/// outcome `(x, y)`, renormalised by the outcome probability `1/d²`.
pub fn purified_encode(rho: &DensityMatrix, x: usize, y: usize) -> Result<DensityMatrix> {
    let n = rho.dim();
    let d = QuditDim::new(n)?;
    let bell = bell_state(d, x, y)?;
    // ⟨B(xy)|_{12} (ρ_1 ⊗ |φ⁺⟩⟨φ⁺|_{23}) |B(xy)⟩_{12}: write |φ⁺⟩ = Σ_m |m, m⟩/√d
    // and contract. The map |ψ⟩_1 ↦ ⟨B(xy)|_{12} |ψ⟩_1 |φ⁺⟩_{23} is the
    // d × d matrix T[k, a] = conj(B[a, k]) / √d.
    let s = 1.0 / (n as f64).sqrt();
    let t = DMatrix::from_fn(n, n, |k, a| bell.amplitude(a * n + k).conj() * s);
    let out = &t * rho.matrix() * t.adjoint() * c((n * n) as f64);
    DensityMatrix::from_matrix_unchecked(out, vec![n])
}

/// `max_{x,x′} ‖𝕄_θ(x) ℕ_θ(x′)‖²`, the overlap constant of Bob's decoding and
/// check measurements; must equal `1/d`.
pub fn gamma_overlap(d: QuditDim, basis: PreparationBasis) -> Result<f64> {
    let set = coarse_measurements(d, basis);
    let mut gamma: f64 = 0.0;
    for m in &set.decoders {
        for nn in &set.checkers_bob {
            // For projectors ‖MN‖² is the top eigenvalue of MNM.
            let mnm = m.compose(nn)?.compose(m)?;
            let top = mnm
                .hermitian_eigenvalues(DEFAULT_TOL)?
                .last()
                .copied()
                .unwrap_or(0.0);
            gamma = gamma.max(top);
        }
    }
    let expected = 1.0 / d.get() as f64;
    if (gamma - expected).abs() > 1e-9 {
        return Err(Error::Consistency(format!(
            "measurement overlap {gamma} differs from 1/d = {expected}"
        )));
    }
    Ok(gamma)
}

/// Per-basis message (`Q_k`) and check (`Q_t`) error rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub kind: NoiseKind,
    pub mode: CorrelationMode,
    pub d: QuditDim,
    pub p: f64,
    /// Indexed by [`PreparationBasis::index`].
    pub q_k: [f64; 2],
    pub q_t: [f64; 2],
    /// Number of outcomes message-run errors spread over.
    pub d_eff: usize,
}

impl ErrorRates {
    pub fn qk(&self, basis: PreparationBasis) -> f64 {
        self.q_k[basis.index()]
    }

    pub fn qt(&self, basis: PreparationBasis) -> f64 {
        self.q_t[basis.index()]
    }

    /// Basis-averaged message error rate used as a single abscissa.
    pub fn qder_abscissa(&self) -> f64 {
        0.5 * (self.q_k[0] + self.q_k[1])
    }
}

/// Closed-form error rates of the purified protocol.
pub fn error_rates(kind: NoiseKind, mode: CorrelationMode, d: QuditDim, p: f64) -> Result<ErrorRates> {
    check_supported(kind, mode)?;
    check_unit_interval("p", p)?;
    let nf = d.get() as f64;
    let frac = (nf - 1.0) / nf;
    let (q_k, q_t, d_eff) = match (mode, kind) {
        (CorrelationMode::Independent, NoiseKind::Depolarizing) => {
            let qk = frac * p * (2.0 - p);
            ([qk; 2], [frac * p; 2], d.get())
        }
        (CorrelationMode::Independent, NoiseKind::DitPhaseFlip) => {
            let qk = p * (2.0 * (nf - 1.0) - nf * p) / (nf - 1.0);
            ([qk; 2], [p; 2], d.get())
        }
        (CorrelationMode::Independent, NoiseKind::AmplitudeDamping) => {
            let s = (1.0 - p).sqrt();
            let qk0 = frac * p * (2.0 - p);
            let qk1 = (nf - 1.0) / nf.powi(3)
                * (4.0 * (nf - 2.0) * (1.0 - s)
                    + p * ((2.0 * nf * (nf - 2.0) + 4.0)
                        - (nf - 2.0).powi(2) * p
                        - 4.0 * (nf - 2.0) * (1.0 - s)));
            let qt0 = (nf - 1.0) / (nf * nf) * (2.0 - 2.0 * s + (nf - 2.0) * p);
            let qt1 = frac * p;
            ([qk0, qk1], [qt0, qt1], d.get())
        }
        (CorrelationMode::Correlated, _) => {
            let f = f_multiplicity(d);
            let ff = f as f64;
            let ffrac = (ff - 1.0) / ff;
            let (qk, qt) = match kind {
                NoiseKind::Depolarizing => (ffrac * p, frac * p),
                NoiseKind::DitPhaseFlip => (ffrac / frac * p, p),
                NoiseKind::AmplitudeDamping => unreachable!("rejected above"),
            };
            ([qk; 2], [qt; 2], f)
        }
    };
    Ok(ErrorRates {
        kind,
        mode,
        d,
        p,
        q_k,
        q_t,
        d_eff,
    })
}

/// Conditional entropies `(S_κ, S_σ)` in bits of Bob's outcome given
/// Alice's, for message and check runs in one basis.
///
/// Amplitude damping check runs in the Fourier basis have non-uniform error
/// statistics; their entropy is taken from [`check_statistics`].
pub fn conditional_entropies(rates: &ErrorRates, basis: PreparationBasis) -> Result<(f64, f64)> {
    let s_kappa = if rates.d_eff <= 1 {
        0.0
    } else {
        skewed_entropy_unchecked(rates.d_eff as f64, (1.0 - rates.qk(basis)).clamp(0.0, 1.0))
    };
    let s_sigma = if rates.kind == NoiseKind::AmplitudeDamping && basis == PreparationBasis::Fourier {
        check_statistics(rates.kind, rates.mode, rates.d, rates.p, basis)?.conditional_entropy()
    } else {
        skewed_entropy_unchecked(rates.d.get() as f64, (1.0 - rates.qt(basis)).clamp(0.0, 1.0))
    };
    Ok((s_kappa, s_sigma))
}

/// The closed form printed for the amplitude-damping Fourier-basis check
/// entropy, evaluated as written:
/// `-(Q_t log Q_t - (c - Q_t) log(c - Q_t)) + c log c` with `c = (d-1)/d`.
pub fn printed_adc_check_entropy(d: QuditDim, p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    let nf = d.get() as f64;
    let cc = (nf - 1.0) / nf;
    let qt = cc * p;
    let xlog = |v: f64| if v > 0.0 { v * v.log2() } else { 0.0 };
    Ok(-(xlog(qt) - xlog(cc - qt)) + xlog(cc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisKeyRate {
    pub basis: PreparationBasis,
    pub q_k: f64,
    pub q_t: f64,
    pub s_kappa: f64,
    pub s_sigma: f64,
    /// `log2 d - S_σ - S_κ`.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveKeyPoint {
    pub kind: NoiseKind,
    pub mode: CorrelationMode,
    pub d: QuditDim,
    pub p: f64,
    pub bases: [BasisKeyRate; 2],
    /// Basis-averaged key rate in bits.
    pub r: f64,
    pub r_reg: f64,
    pub qder_abscissa: f64,
}

pub fn collective_key_rate(
    kind: NoiseKind,
    mode: CorrelationMode,
    d: QuditDim,
    p: f64,
) -> Result<CollectiveKeyPoint> {
    let rates = error_rates(kind, mode, d, p)?;
    let per_basis = |basis: PreparationBasis| -> Result<BasisKeyRate> {
        let (s_kappa, s_sigma) = conditional_entropies(&rates, basis)?;
        Ok(BasisKeyRate {
            basis,
            q_k: rates.qk(basis),
            q_t: rates.qt(basis),
            s_kappa,
            s_sigma,
            r: d.log2() - s_sigma - s_kappa,
        })
    };
    let bases = [
        per_basis(PreparationBasis::Computational)?,
        per_basis(PreparationBasis::Fourier)?,
    ];
    let r = BASIS_PROBABILITY * bases[0].r + BASIS_PROBABILITY * bases[1].r;
    Ok(CollectiveKeyPoint {
        kind,
        mode,
        d,
        p,
        bases,
        r,
        r_reg: r / d.log2(),
        qder_abscissa: rates.qder_abscissa(),
    })
}

/// A joint distribution over Alice's and Bob's dits, row-major in `(x, x′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    d: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    fn new(d: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), d * d);
        Self { d, probs }
    }

    pub fn get(&self, x: usize, x_prime: usize) -> f64 {
        self.probs[x * self.d + x_prime]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability that the two dits differ.
    pub fn error_rate(&self) -> f64 {
        let diag: f64 = (0..self.d).map(|x| self.get(x, x)).sum();
        self.total() - diag
    }

    /// Distribution of Alice's dit.
    pub fn first_marginal(&self) -> Vec<f64> {
        (0..self.d)
            .map(|x| (0..self.d).map(|y| self.get(x, y)).sum())
            .collect()
    }

    /// `H(X′ | X)` in bits.
    pub fn conditional_entropy(&self) -> f64 {
        let h = |v: &[f64]| -> f64 {
            v.iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| -p * p.log2())
                .sum()
        };
        (h(&self.probs) - h(&self.first_marginal())).max(0.0)
    }
}

/// Message and check statistics of one preparation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedStatistics {
    pub basis: PreparationBasis,
    /// `q_{xx′}`: Alice's encoding outcome against Bob's decoding outcome.
    pub message: JointDistribution,
    /// `q̃_{xx′}`: Alice's check outcome against Bob's check outcome.
    pub check: JointDistribution,
}

/// One pure component of the purified state: local operators on `A` and
/// `B` applied to the initial pair of maximally entangled states.
struct Branch {
    weight: f64,
    on_a: DMatrix<Complex64>,
    on_b: DMatrix<Complex64>,
}

fn branches(kind: NoiseKind, mode: CorrelationMode, d: QuditDim, p: f64) -> Result<Vec<Branch>> {
    check_supported(kind, mode)?;
    match mode {
        CorrelationMode::Independent => {
            let ch = make_channel(kind, d, p)?;
            let mut out = Vec::with_capacity(ch.kraus().len().pow(2));
            for ka in ch.kraus() {
                for kb in ch.kraus() {
                    out.push(Branch {
                        weight: 1.0,
                        on_a: ka.matrix().clone(),
                        on_b: kb.matrix().clone(),
                    });
                }
            }
            Ok(out)
        }
        CorrelationMode::Correlated => pauli_weights(kind, d, p)?
            .into_iter()
            .map(|w| {
                let e = weyl_w(d, w.i, w.j)?.matrix().clone();
                Ok(Branch {
                    weight: w.weight,
                    on_a: e.clone(),
                    on_b: e,
                })
            })
            .collect(),
    }
}

fn check_oracle_dim(d: QuditDim) -> Result<()> {
    if d.get() > ORACLE_MAX_DIM {
        return argument(format!(
            "purified-state oracle supports d <= {ORACLE_MAX_DIM}, got {d}"
        ));
    }
    Ok(())
}

/// Amplitudes of one branch as a `d² × d²` matrix with rows `(A, A″)` and
/// columns `(B, B′)`.
fn branch_matrix(d: QuditDim, branch: &Branch) -> DMatrix<Complex64> {
    let n = d.get();
    let id = DMatrix::<Complex64>::identity(n, n);
    // |φ⁺⟩_{AB′} ⊗ |φ⁺⟩_{A″B}: amplitude 1/d when a = b′ and a″ = b.
    let v0 = DMatrix::from_fn(n * n, n * n, |row, col| {
        let (a, a2) = (row / n, row % n);
        let (b, b2) = (col / n, col % n);
        if a == b2 && a2 == b {
            c(1.0 / n as f64)
        } else {
            c(0.0)
        }
    });
    let left = branch.on_a.kronecker(&id);
    let right = branch.on_b.kronecker(&id).transpose();
    (left * v0 * right) * c(branch.weight.sqrt())
}

/// The purified state `ρ^ψ` on registers `A, A″, B, B′`.
pub fn purified_state(
    kind: NoiseKind,
    mode: CorrelationMode,
    d: QuditDim,
    p: f64,
) -> Result<DensityMatrix> {
    check_oracle_dim(d)?;
    check_unit_interval("p", p)?;
    let n = d.get();
    let mut rho = DensityMatrix::zeros(vec![n; 4]);
    for b in branches(kind, mode, d, p)? {
        let v = branch_matrix(d, &b);
        // Row-major flattening puts (A, A″) before (B, B′).
        let amps: Vec<Complex64> = (0..n * n)
            .flat_map(|r| (0..n * n).map(move |col| (r, col)))
            .map(|(r, col)| v[(r, col)])
            .collect();
        let state = PureState::unnormalized(amps, vec![n; 4])?;
        rho.add_scaled_projector(1.0, &state);
    }
    Ok(rho)
}

/// Joint outcome distribution of two refined measurements over all branches.
fn joint_from_branches(
    d: QuditDim,
    branch_mats: &[DMatrix<Complex64>],
    alice: &DMatrix<Complex64>,
    bob: &DMatrix<Complex64>,
) -> JointDistribution {
    let n = d.get();
    let la = alice.adjoint();
    let rb = bob.map(|z| z.conj());
    let mut probs = vec![0.0; n * n];
    for v in branch_mats {
        let w = &la * v * &rb;
        for row in 0..n * n {
            for col in 0..n * n {
                probs[(row / n) * n + col / n] += w[(row, col)].norm_sqr();
            }
        }
    }
    JointDistribution::new(n, probs)
}

/// Exact statistics of the purified protocol in one basis.
pub fn purified_statistics(
    kind: NoiseKind,
    mode: CorrelationMode,
    d: QuditDim,
    p: f64,
    basis: PreparationBasis,
) -> Result<PurifiedStatistics> {
    check_oracle_dim(d)?;
    check_unit_interval("p", p)?;
    let mats: Vec<DMatrix<Complex64>> = branches(kind, mode, d, p)?
        .iter()
        .map(|b| branch_matrix(d, b))
        .collect();
    let message = joint_from_branches(d, &mats, &encoder_basis(d, basis), &decoder_basis(d, basis));
    let check = joint_from_branches(
        d,
        &mats,
        &alice_check_basis(d, basis),
        &bob_check_basis(d, basis),
    );
    Ok(PurifiedStatistics {
        basis,
        message,
        check,
    })
}

/// Check-run statistics computed from the `(A″, B)` marginal alone.
///
/// Both check measurements act only on `A″` and `B`, whose joint state is the
/// Choi state of the backward channel, so this needs `d²`-dimensional
/// vectors and has no dimension cap.
pub fn check_statistics(
    kind: NoiseKind,
    mode: CorrelationMode,
    d: QuditDim,
    p: f64,
    basis: PreparationBasis,
) -> Result<JointDistribution> {
    check_supported(kind, mode)?;
    let n = d.get();
    let s = 1.0 / (n as f64).sqrt();
    // Correlated mode leaves the same marginal with Pauli weights.
    let ops: Vec<(f64, DMatrix<Complex64>)> = match mode {
        CorrelationMode::Independent => make_channel(kind, d, p)?
            .kraus()
            .iter()
            .map(|k| (1.0, k.matrix().clone()))
            .collect(),
        CorrelationMode::Correlated => pauli_weights(kind, d, p)?
            .into_iter()
            .map(|w| Ok((w.weight, weyl_w(d, w.i, w.j)?.matrix().clone())))
            .collect::<Result<_>>()?,
    };
    let alice: Vec<Vec<Complex64>> = (0..n).map(|x| check_ket_alice(d, basis, x)).collect();
    let bob: Vec<Vec<Complex64>> = (0..n).map(|x| check_ket_bob(d, basis, x)).collect();
    let mut probs = vec![0.0; n * n];
    for (w, k) in ops {
        // (I ⊗ K)|φ⁺⟩ as a matrix M[a″, b] = K[b, a″]/√d.
        let m = k.transpose() * c(s);
        for (x, alpha) in alice.iter().enumerate() {
            for (x2, beta) in bob.iter().enumerate() {
                let mut amp = c(0.0);
                for a in 0..n {
                    if alpha[a].norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..n {
                        amp += alpha[a].conj() * beta[b].conj() * m[(a, b)];
                    }
                }
                probs[x * n + x2] += w * amp.norm_sqr();
            }
        }
    }
    Ok(JointDistribution::new(n, probs))
}

/// Largest deviation between the oracle error rates and the closed forms
/// over both bases.
pub fn oracle_deviation(kind: NoiseKind, mode: CorrelationMode, d: QuditDim, p: f64) -> Result<f64> {
    let rates = error_rates(kind, mode, d, p)?;
    let mut worst: f64 = 0.0;
    for basis in PreparationBasis::ALL {
        let stats = purified_statistics(kind, mode, d, p, basis)?;
        worst = worst
            .max((stats.message.error_rate() - rates.qk(basis)).abs())
            .max((stats.check.error_rate() - rates.qt(basis)).abs());
    }
    Ok(worst)
}

/// The two ways of spending two qudit transmissions on a `d²`-outcome key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparedProtocol {
    /// Two independent rounds of the `d`-dimensional protocol.
    TwoCopies,
    /// One round of the `d²`-dimensional protocol.
    Squared,
}

impl ComparedProtocol {
    pub fn label(self) -> &'static str {
        match self {
            ComparedProtocol::TwoCopies => "2xLM05",
            ComparedProtocol::Squared => "d2LM05",
        }
    }
}

/// Both comparison curves on a shared noise grid. Each curve's abscissa is
/// its own message error rate and its ordinate the absolute key rate in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolComparison {
    pub d: QuditDim,
    pub p_grid: Vec<f64>,
    pub two_copies: Curve,
    pub squared: Curve,
}

pub fn protocol_comparison(
    kind: NoiseKind,
    mode: CorrelationMode,
    d: QuditDim,
    p_grid: &[f64],
) -> Result<ProtocolComparison> {
    if p_grid.len() < 2 {
        return argument("comparison grid needs at least two points");
    }
    let big = QuditDim::new(d.get() * d.get())?;
    let mut q_small = Vec::with_capacity(p_grid.len());
    let mut r_small = Vec::with_capacity(p_grid.len());
    let mut q_big = Vec::with_capacity(p_grid.len());
    let mut r_big = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let a = collective_key_rate(kind, mode, d, p)?;
        let b = collective_key_rate(kind, mode, big, p)?;
        q_small.push(a.qder_abscissa);
        r_small.push(2.0 * a.r);
        q_big.push(b.qder_abscissa);
        r_big.push(b.r);
    }
    Ok(ProtocolComparison {
        d,
        p_grid: p_grid.to_vec(),
        two_copies: Curve::new(ComparedProtocol::TwoCopies.label(), q_small, r_small)?,
        squared: Curve::new(ComparedProtocol::Squared.label(), q_big, r_big)?,
    })
}

/// `Û_xy ρ Û_xy†`, the direct encoding used to cross-check
/// [`purified_encode`].
pub fn direct_encode(rho: &DensityMatrix, x: usize, y: usize) -> Result<DensityMatrix> {
    let d = QuditDim::new(rho.dim())?;
    apply_operator(rho, &weyl_u(d, x, y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{partial_trace, skewed_entropy, Basis};

    fn dim(d: usize) -> QuditDim {
        QuditDim::new(d).unwrap()
    }

    const SUPPORTED: [(NoiseKind, CorrelationMode); 5] = [
        (NoiseKind::Depolarizing, CorrelationMode::Independent),
        (NoiseKind::DitPhaseFlip, CorrelationMode::Independent),
        (NoiseKind::AmplitudeDamping, CorrelationMode::Independent),
        (NoiseKind::Depolarizing, CorrelationMode::Correlated),
        (NoiseKind::DitPhaseFlip, CorrelationMode::Correlated),
    ];

    #[test]
    fn multiplicity() {
        assert_eq!(f_multiplicity(dim(2)), 1);
        assert_eq!(f_multiplicity(dim(3)), 3);
        assert_eq!(f_multiplicity(dim(4)), 2);
        assert_eq!(f_multiplicity(dim(9)), 9);
    }

    #[test]
    fn measurement_sets_are_projective() {
        for n in 2..=6 {
            for basis in Basis::ALL {
                let set = coarse_measurements(dim(n), basis);
                assert!(set.projective_error() < 1e-12, "d={n} {basis:?}");
                for op in &set.encoders {
                    assert!((op.trace().re - n as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_decoder() {
        let set = coarse_measurements(dim(2), Basis::Computational);
        let m = &set.decoders[0];
        let mut expected = Operator::zeros(vec![2, 2]).matrix().clone();
        expected[(0, 0)] = c(1.0);
        expected[(3, 3)] = c(1.0);
        let expected = Operator::from_matrix(expected, vec![2, 2]).unwrap();
        assert!(m.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn encode_identity() {
        let d = dim(3);
        let rho = prepare_state(d, Basis::Computational, 0).unwrap().density();
        let out = purified_encode(&rho, 0, 0).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn encode_matches_weyl() {
        for n in 2..=4 {
            let d = dim(n);
            let rho = DensityMatrix::mixture(&[
                (0.7, prepare_state(d, Basis::Fourier, 1).unwrap().density()),
                (0.3, prepare_state(d, Basis::Computational, n - 1).unwrap().density()),
            ])
            .unwrap();
            for x in 0..n {
                for y in 0..n {
                    let a = purified_encode(&rho, x, y).unwrap();
                    let b = direct_encode(&rho, x, y).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_overlap(dim(2), Basis::Computational).unwrap() - 0.5).abs() < 1e-12);
        assert!((gamma_overlap(dim(5), Basis::Fourier).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let r = error_rates(NoiseKind::Depolarizing, CorrelationMode::Independent, dim(2), 0.2).unwrap();
        assert!((r.q_k[0] - 0.18).abs() < 1e-15 && (r.q_t[0] - 0.1).abs() < 1e-15);
        let r = error_rates(NoiseKind::Depolarizing, CorrelationMode::Correlated, dim(2), 0.6).unwrap();
        assert_eq!(r.q_k, [0.0, 0.0]);
        let r = error_rates(NoiseKind::AmplitudeDamping, CorrelationMode::Independent, dim(2), 0.19).unwrap();
        assert!((r.q_k[0] - 0.5 * 0.19 * 1.81).abs() < 1e-15);
        assert!((r.q_t[0] - 0.25 * (2.0 - 1.8)).abs() < 1e-15);
        assert!(matches!(
            error_rates(NoiseKind::AmplitudeDamping, CorrelationMode::Correlated, dim(2), 0.1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        let d = dim(2);
        let rates = error_rates(NoiseKind::Depolarizing, CorrelationMode::Independent, d, 0.1).unwrap();
        let (sk, ss) = conditional_entropies(&rates, Basis::Computational).unwrap();
        assert!((sk - skewed_entropy(d, 0.905).unwrap()).abs() < 1e-15);
        assert!((ss - skewed_entropy(d, 0.95).unwrap()).abs() < 1e-15);
        // Binary entropies evaluated independently: h(0.095), h(0.05).
        assert!((sk - 0.452_942_548_187_283).abs() < 1e-12);
        assert!((ss - 0.286_396_957_115_956).abs() < 1e-12);
        let k = collective_key_rate(NoiseKind::Depolarizing, CorrelationMode::Independent, d, 0.1).unwrap();
        assert!((k.r - (1.0 - ss - sk)).abs() < 1e-15);
        assert!((k.r - 0.260_660_494_696_761).abs() < 1e-12);
    }

    #[test]
    fn noiseless_rate_is_log_d() {
        for n in 2..=7 {
            for (kind, mode) in SUPPORTED {
                let k = collective_key_rate(kind, mode, dim(n), 0.0).unwrap();
                assert!((k.r - dim(n).log2()).abs() < 1e-12);
                assert_eq!(k.qder_abscissa, 0.0);
            }
        }
    }

    #[test]
    fn correlated_qubit_phase_flip_rate() {
        for p in [0.05, 0.3, 0.8] {
            let k = collective_key_rate(NoiseKind::DitPhaseFlip, CorrelationMode::Correlated, dim(2), p).unwrap();
            let expected = 1.0 - skewed_entropy(dim(2), 1.0 - p).unwrap();
            assert!((k.r - expected).abs() < 1e-12);
            assert_eq!(k.bases[0].s_kappa, 0.0);
        }
    }

    #[test]
    fn oracle_matches_closed_forms_small() {
        for n in 2..=3 {
            for (kind, mode) in SUPPORTED {
                for p in [0.0, 0.3, 1.0] {
                    let dev = oracle_deviation(kind, mode, dim(n), p).unwrap();
                    assert!(dev < 1e-9, "{kind} {mode} d={n} p={p}: {dev}");
                }
            }
        }
    }

    #[test]
    fn oracle_example_value() {
        let s = purified_statistics(
            NoiseKind::Depolarizing,
            CorrelationMode::Independent,
            dim(3),
            0.3,
            Basis::Computational,
        )
        .unwrap();
        assert!((s.message.error_rate() - 0.34).abs() < 1e-9);
        assert!((s.message.total() - 1.0).abs() < 1e-12);
        for m in s.message.first_marginal() {
            assert!((m - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn purified_state_is_valid_and_matches_statistics() {
        let d = dim(2);
        let kind = NoiseKind::AmplitudeDamping;
        let mode = CorrelationMode::Independent;
        let rho = purified_state(kind, mode, d, 0.4).unwrap();
        rho.validate(1e-10).unwrap();
        let set = coarse_measurements(d, Basis::Fourier);
        let stats = purified_statistics(kind, mode, d, 0.4, Basis::Fourier).unwrap();
        for x in 0..2 {
            for x2 in 0..2 {
                let e = set.encoders[x].tensor(&set.decoders[x2]);
                let q = rho.expectation(&e).unwrap();
                assert!((q - stats.message.get(x, x2)).abs() < 1e-12);
                let e = set.checkers_alice[x].tensor(&set.checkers_bob[x2]);
                let q = rho.expectation(&e).unwrap();
                assert!((q - stats.check.get(x, x2)).abs() < 1e-12);
            }
        }
        // Tracing A and B′ leaves the Choi state of the backward channel.
        let choi = partial_trace(&rho, &[0, 3]).unwrap();
        let ch = make_channel(kind, d, 0.4).unwrap();
        let phi = crate::qudit::max_entangled(d).density();
        let mut expected = DensityMatrix::zeros(vec![2, 2]);
        for k in ch.kraus() {
            let op = Operator::identity(vec![2]).tensor(k);
            let part = apply_operator(&phi, &op).unwrap();
            expected = DensityMatrix::mixture(&[(1.0, expected), (1.0, part)]).unwrap();
        }
        assert!(choi.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn reduced_check_oracle_matches_full() {
        for n in 2..=3 {
            for (kind, mode) in SUPPORTED {
                for basis in Basis::ALL {
                    let full = purified_statistics(kind, mode, dim(n), 0.35, basis).unwrap();
                    let reduced = check_statistics(kind, mode, dim(n), 0.35, basis).unwrap();
                    for x in 0..n {
                        for x2 in 0..n {
                            assert!((full.check.get(x, x2) - reduced.get(x, x2)).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pauli_entropies_match_oracle() {
        for n in 2..=3 {
            for (kind, mode) in SUPPORTED {
                for basis in Basis::ALL {
                    let p = 0.3;
                    let rates = error_rates(kind, mode, dim(n), p).unwrap();
                    let (sk, ss) = conditional_entropies(&rates, basis).unwrap();
                    let stats = purified_statistics(kind, mode, dim(n), p, basis).unwrap();
                    assert!((ss - stats.check.conditional_entropy()).abs() < 1e-9);
                    if mode == CorrelationMode::Independent {
                        assert!((sk - stats.message.conditional_entropy()).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn printed_adc_form_differs_from_oracle() {
        let d = dim(2);
        let oracle = check_statistics(NoiseKind::AmplitudeDamping, CorrelationMode::Independent, d, 0.1, Basis::Fourier)
            .unwrap()
            .conditional_entropy();
        // Half the binary entropy of 0.1.
        assert!((oracle - 0.5 * skewed_entropy(d, 0.1).unwrap()).abs() < 1e-12);
        let printed = printed_adc_check_entropy(d, 0.1).unwrap();
        assert!((printed - oracle).abs() > 1e-3);
    }

    #[test]
    fn comparison_starts_equal() {
        for (kind, mode) in SUPPORTED {
            let cmp = protocol_comparison(kind, mode, dim(2), &[0.0, 0.1, 0.2]).unwrap();
            assert!((cmp.two_copies.ys[0] - 2.0).abs() < 1e-12);
            assert!((cmp.squared.ys[0] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_dimension_cap() {
        assert!(purified_statistics(
            NoiseKind::Depolarizing,
            CorrelationMode::Independent,
            dim(7),
            0.1,
            Basis::Computational
        )
        .is_err());
    }
}
