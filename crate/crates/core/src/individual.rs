//! Individual (cloning) attack: detection probabilities, mutual
//! informations and the resulting one-way key rate.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{argument, check_unit_interval, Error, Result};
use crate::qudit::{skewed_entropy_unchecked, PureState, QuditDim, DEFAULT_TOL};

/// Overlap angles between Eve's ancilla states, either one angle shared by
/// every pair or a symmetric `d × d` matrix (diagonal ignored).
#[derive(Debug, Clone, PartialEq)]
pub enum Angles {
    Equiangular(f64),
    Matrix(Vec<Vec<f64>>),
}

impl Angles {
    fn get(&self, j: usize, k: usize) -> f64 {
        match self {
            Angles::Equiangular(t) => *t,
            Angles::Matrix(m) => m[j][k],
        }
    }

    fn validate(&self, name: &str, d: usize) -> Result<()> {
        match self {
            Angles::Equiangular(t) => check_angle(name, *t),
            Angles::Matrix(m) => {
                if m.len() != d || m.iter().any(|row| row.len() != d) {
                    return argument(format!("{name} must be a {d}x{d} matrix"));
                }
                for (j, row) in m.iter().enumerate() {
                    for (k, &v) in row.iter().enumerate() {
                        if j == k {
                            continue;
                        }
                        check_angle(name, v)?;
                        if (v - m[k][j]).abs() > DEFAULT_TOL {
                            return argument(format!("{name} must be symmetric"));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn check_angle(name: &str, theta: f64) -> Result<()> {
    if theta.is_finite() && (0.0..=FRAC_PI_2 + 1e-15).contains(&theta) {
        Ok(())
    } else {
        argument(format!("{name} must lie in [0, π/2], got {theta}"))
    }
}

/// Parameters of Eve's cloning machine on both channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CloningParams {
    d: QuditDim,
    fidelity: f64,
    fidelity_back: f64,
    theta: Angles,
    phi: Angles,
    theta_back: Angles,
    phi_back: Angles,
}

/// Which transmission a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    /// Bob to Alice.
    Forward,
    /// Alice to Bob.
    Backward,
}

impl CloningParams {
    pub fn new(
        d: QuditDim,
        fidelity: f64,
        fidelity_back: f64,
        theta: Angles,
        phi: Angles,
        theta_back: Angles,
        phi_back: Angles,
    ) -> Result<Self> {
        check_unit_interval("F", fidelity)?;
        check_unit_interval("F'", fidelity_back)?;
        let n = d.get();
        theta.validate("theta", n)?;
        phi.validate("phi", n)?;
        theta_back.validate("theta'", n)?;
        phi_back.validate("phi'", n)?;
        Ok(Self {
            d,
            fidelity,
            fidelity_back,
            theta,
            phi,
            theta_back,
            phi_back,
        })
    }

    /// Perfect cloning (`F = F' = 1`) on both legs with one shared angle.
    pub fn equiangular(d: QuditDim, theta: f64) -> Result<Self> {
        Self::new(
            d,
            1.0,
            1.0,
            Angles::Equiangular(theta),
            Angles::Equiangular(0.0),
            Angles::Equiangular(theta),
            Angles::Equiangular(0.0),
        )
    }

    pub fn d(&self) -> QuditDim {
        self.d
    }

    pub fn fidelity(&self, leg: Leg) -> f64 {
        match leg {
            Leg::Forward => self.fidelity,
            Leg::Backward => self.fidelity_back,
        }
    }

    fn angles(&self, leg: Leg) -> (&Angles, &Angles) {
        match leg {
            Leg::Forward => (&self.theta, &self.phi),
            Leg::Backward => (&self.theta_back, &self.phi_back),
        }
    }
}

/// `⟨ε̃_ii|ε̃_ii⟩`: the probability that the Fourier state `|ĩ⟩` passes one
/// leg of the attack undisturbed.
///
/// The fidelity term sums `cos θ_jk` over ordered pairs `j ≠ k`, which makes
/// a perfect cloner with `θ = 0` transparent.
pub fn fourier_clone_norm(params: &CloningParams, leg: Leg, i: usize) -> Result<f64> {
    let d = params.d;
    d.check_index("i", i)?;
    let n = d.get();
    let nf = n as f64;
    let f = params.fidelity(leg);
    let (theta, phi) = params.angles(leg);
    let mut clone = 0.0;
    let mut noise = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            clone += theta.get(j, k).cos();
            let phase = 2 * i as i64 * (k as i64 - j as i64);
            noise += d.omega_pow(phase) * phi.get(j, k).cos();
        }
    }
    let value = (nf + f * clone + (1.0 - f) / (nf - 1.0) * noise.re) / (nf * nf);
    Ok(value)
}

/// Average probability that the check mode flags the attack.
pub fn detection_probability(params: &CloningParams) -> Result<f64> {
    let n = params.d.get();
    let mut survive = 0.0;
    // Computational states survive each leg with the cloning fidelity.
    survive += n as f64 * params.fidelity * params.fidelity_back;
    for i in 0..n {
        survive += fourier_clone_norm(params, Leg::Forward, i)?
            * fourier_clone_norm(params, Leg::Backward, i)?;
    }
    Ok(1.0 - survive / (2.0 * n as f64))
}

/// Detection probability of the equiangular perfect cloner with angle `θ`.
pub fn min_detection_probability(d: QuditDim, theta: f64) -> Result<f64> {
    check_angle("theta", theta)?;
    let nf = d.get() as f64;
    let s = (theta / 2.0).sin();
    Ok((nf - 1.0) / (nf * nf) * ((nf + 1.0) + (nf - 1.0) * theta.cos()) * s * s)
}

/// Largest value of [`min_detection_probability`], reached at `θ = π/2`.
pub fn max_detection_probability(d: QuditDim) -> f64 {
    let nf = d.get() as f64;
    (nf * nf - 1.0) / (2.0 * nf * nf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInfoTriple {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    /// Probability Bob decodes Alice's dit correctly in Fourier runs.
    pub p_ab_fourier: f64,
    /// Probability Eve guesses Alice's encoding.
    pub p_ae: f64,
    pub chi: f64,
}

/// Mutual informations under the optimal (`F = F' = 1`) equiangular attack.
pub fn mutual_informations(d: QuditDim, theta: f64) -> Result<MutualInfoTriple> {
    check_angle("theta", theta)?;
    let nf = d.get() as f64;
    let log_d = d.log2();
    let h = |p: f64| skewed_entropy_unchecked(nf, p.clamp(0.0, 1.0));

    let c = theta.cos();
    let p_ab_fourier = (1.0 + (nf - 1.0) * c * c) / nf;
    let i_ab = log_d - 0.5 * h(p_ab_fourier);

    let chi = ((1.0 - 2.0 * theta / PI) / nf.sqrt()).acos();
    let p_eps = (1.0 + (2.0 * chi).cos()) / 2.0;
    let p_ae = p_eps * p_eps + (1.0 - p_eps) * (1.0 - p_eps) / (nf - 1.0);
    let i_ae = log_d - h(p_ae);

    let p_be = |p_ab: f64| p_ab * p_ae + (1.0 - p_ab) * (1.0 - p_ae) / (nf - 1.0);
    let i_be = log_d - 0.5 * (h(p_be(1.0)) + h(p_be(p_ab_fourier)));

    Ok(MutualInfoTriple {
        i_ab,
        i_ae,
        i_be,
        p_ab_fourier,
        p_ae,
        chi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndividualKeyPoint {
    pub d: QuditDim,
    pub theta: f64,
    pub pdet_min: f64,
    pub triple: MutualInfoTriple,
    /// Key rate in bits per round.
    pub r: f64,
    /// `r / log2 d`.
    pub r_reg: f64,
}

pub fn individual_key_rate(d: QuditDim, theta: f64) -> Result<IndividualKeyPoint> {
    let triple = mutual_informations(d, theta)?;
    let r = triple.i_ab - triple.i_ae.min(triple.i_be);
    Ok(IndividualKeyPoint {
        d,
        theta,
        pdet_min: min_detection_probability(d, theta)?,
        triple,
        r,
        r_reg: r / d.log2(),
    })
}

/// `n` evenly spaced angles covering `[0, π/2]`.
pub fn theta_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return argument("a grid needs at least two points");
    }
    Ok((0..n)
        .map(|k| FRAC_PI_2 * k as f64 / (n - 1) as f64)
        .collect())
}

/// Where `I_AB` meets `I_AE` along the equiangular family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionThreshold {
    pub d: QuditDim,
    pub theta: f64,
    pub pdet: f64,
    /// `false` when `I_AB > I_AE` on the whole interval and the endpoint
    /// `θ = π/2` is reported instead of a root.
    pub crossing: bool,
}

const BISECTION_TOL: f64 = 1e-10;
const BISECTION_MAX_ITER: usize = 200;

pub fn detection_threshold(d: QuditDim) -> Result<DetectionThreshold> {
    let gap = |t: f64| -> Result<f64> {
        let m = mutual_informations(d, t)?;
        Ok(m.i_ab - m.i_ae)
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    let g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    if g_lo <= 0.0 {
        return Err(Error::Consistency(format!(
            "I_AB - I_AE = {g_lo} at θ = 0, expected log2 d"
        )));
    }
    if g_hi > 0.0 {
        return Ok(DetectionThreshold {
            d,
            theta: hi,
            pdet: max_detection_probability(d),
            crossing: false,
        });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    Ok(DetectionThreshold {
        d,
        theta,
        pdet: min_detection_probability(d, theta)?,
        crossing: true,
    })
}

/// Label of a pair of ancilla states `(ε_aa, η_bb)` Eve holds after one
/// round: `a` indexes the forward clone and `b` the backward clone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AncillaPair {
    pub forward: usize,
    pub backward: usize,
}

/// For every encoding `x`, the `d` ancilla pairs Eve may end up holding.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTable {
    pub d: QuditDim,
    pub ensembles: Vec<Vec<AncillaPair>>,
}

impl EnsembleTable {
    /// Encoding whose ensemble contains `pair`, if any.
    pub fn encoding_of(&self, pair: AncillaPair) -> Option<usize> {
        self.ensembles.iter().position(|e| e.contains(&pair))
    }
}

pub fn eve_ensembles(d: QuditDim) -> EnsembleTable {
    let n = d.get();
    let ensembles = (0..n)
        .map(|x| {
            (0..n)
                .map(|k| AncillaPair {
                    forward: k,
                    backward: d.add(k, x),
                })
                .collect()
        })
        .collect();
    EnsembleTable { d, ensembles }
}

/// Unit vectors `|ε_0⟩ … |ε_{d-1}⟩` (columns) with pairwise overlap `cos θ`,
/// from the symmetric square root of their Gram matrix.
pub fn equiangular_ancillas(d: QuditDim, theta: f64) -> Result<DMatrix<Complex64>> {
    check_angle("theta", theta)?;
    let n = d.get();
    let c = theta.cos();
    let gram = DMatrix::<f64>::from_fn(n, n, |j, k| if j == k { 1.0 } else { c });
    let eig = gram.symmetric_eigen();
    let mut sqrt_vals = Vec::with_capacity(n);
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -DEFAULT_TOL {
            return Err(Error::Numerical(format!(
                "ancilla Gram matrix has negative eigenvalue {lambda}"
            )));
        }
        sqrt_vals.push(lambda.max(0.0).sqrt());
    }
    let v = &eig.eigenvectors;
    let root = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sqrt_vals)) * v.transpose();
    Ok(root.map(|x| Complex64::new(x, 0.0)))
}

/// The isometry `V|i⟩ = |i⟩ ⊗ |ε_ii⟩` of the perfect equiangular cloner,
/// stored as a `d² × d` matrix acting from the qudit into qudit ⊗ ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    d: QuditDim,
    mat: DMatrix<Complex64>,
}

impl Isometry {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Maps a single-qudit state to the two-register state (qudit, ancilla).
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let n = self.d.get();
        if state.len() != n {
            return argument("isometry acts on a single qudit");
        }
        let input = nalgebra::DVector::from_column_slice(state.amplitudes());
        let out = &self.mat * input;
        PureState::unnormalized(out.iter().copied().collect(), vec![n, n])
    }

    /// Entrywise deviation of `V†V` from the identity.
    pub fn isometry_error(&self) -> f64 {
        let n = self.d.get();
        let g = self.mat.adjoint() * &self.mat;
        let id = DMatrix::<Complex64>::identity(n, n);
        g.iter()
            .zip(id.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Ancilla attached to `|i⟩`.
    pub fn ancilla(&self, i: usize) -> Vec<Complex64> {
        let n = self.d.get();
        (0..n).map(|a| self.mat[(i * n + a, i)]).collect()
    }
}

pub fn cloning_isometry(d: QuditDim, theta: f64) -> Result<Isometry> {
    let anc = equiangular_ancillas(d, theta)?;
    let n = d.get();
    let mut mat = DMatrix::<Complex64>::zeros(n * n, n);
    for i in 0..n {
        for a in 0..n {
            mat[(i * n + a, i)] = anc[(a, i)];
        }
    }
    Ok(Isometry { d, mat })
}
