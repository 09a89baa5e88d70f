//! Dense complex operator algebra over small multi-qudit registers.
//!
//! Every multi-register value carries its register layout as an ordered list
//! of subsystem dimensions. The first register is the most significant digit
//! of the flattened index, so `|a, b⟩` on dims `[d1, d2]` sits at `a * d2 + b`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{argument, check_unit_interval, Error, Result};

/// Absolute tolerance used by every invariant predicate.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues in `[-EIGEN_CLAMP, 0]` are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Dimension of a single qudit, `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuditDim(usize);

impl QuditDim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return argument(format!("qudit dimension must be >= 2, got {d}"));
        }
        Ok(Self(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `log2 d`, the information content of one dit.
    pub fn log2(self) -> f64 {
        (self.0 as f64).log2()
    }

    /// The primitive root of unity `ω = e^{2πι/d}` raised to `k`.
    pub fn omega_pow(self, k: i64) -> Complex64 {
        let d = self.0 as i64;
        let r = k.rem_euclid(d) as f64;
        Complex64::from_polar(1.0, 2.0 * PI * r / self.0 as f64)
    }

    /// `a ⊕ b`, addition modulo `d`.
    #[inline]
    pub fn add(self, a: usize, b: usize) -> usize {
        (a + b) % self.0
    }

    /// `a ⊖ b`, subtraction modulo `d`.
    #[inline]
    pub fn sub(self, a: usize, b: usize) -> usize {
        (a + self.0 - b % self.0) % self.0
    }

    /// Complement `i^c = d - i` (mod `d`).
    #[inline]
    pub fn complement(self, i: usize) -> usize {
        (self.0 - i % self.0) % self.0
    }

    pub(crate) fn check_index(self, name: &str, value: usize) -> Result<()> {
        if value < self.0 {
            Ok(())
        } else {
            argument(format!("{name} = {value} out of range [0, {}]", self.0 - 1))
        }
    }
}

impl fmt::Display for QuditDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Single-qudit measurement/preparation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Computational,
    Fourier,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Computational, Basis::Fourier];

    pub fn index(self) -> usize {
        match self {
            Basis::Computational => 0,
            Basis::Fourier => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Basis::Computational
        } else {
            Basis::Fourier
        }
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return argument("register layout must be a non-empty list of positive dimensions");
    }
    let total: usize = dims.iter().product();
    if total != len {
        return argument(format!(
            "register layout {dims:?} spans {total} dimensions, value has {len}"
        ));
    }
    Ok(())
}

/// Splits a flat index into per-register digits.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// A square linear operator on a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
    dims: Vec<usize>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return argument("operator must be square");
        }
        check_dims(&dims, mat.nrows())?;
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("operator has non-finite entries".into()));
        }
        Ok(Self { mat, dims })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            mat: DMatrix::identity(n, n),
            dims,
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            mat: DMatrix::zeros(n, n),
            dims,
        }
    }

    /// `|ψ⟩⟨ψ|` (no normalisation is applied).
    pub fn projector(state: &PureState) -> Self {
        let v = &state.amps;
        Self {
            mat: v * v.adjoint(),
            dims: state.dims.clone(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            dims: self.dims.clone(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(factor, 0.0),
            dims: self.dims.clone(),
        }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return argument(format!(
                "cannot compose operators of dimension {} and {}",
                self.dim(),
                rhs.dim()
            ));
        }
        Ok(Self {
            mat: &self.mat * &rhs.mat,
            dims: self.dims.clone(),
        })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        if self.dims != rhs.dims {
            return argument("cannot add operators with different layouts");
        }
        Ok(Self {
            mat: &self.mat + &rhs.mat,
            dims: self.dims.clone(),
        })
    }

    /// Kronecker product; the layout is the concatenation of both layouts.
    pub fn tensor(&self, rhs: &Operator) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self {
            mat: self.mat.kronecker(&rhs.mat),
            dims,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if self.dim() != state.len() {
            return argument("operator and state dimensions differ");
        }
        Ok(PureState {
            amps: &self.mat * &state.amps,
            dims: state.dims.clone(),
        })
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        let id = DMatrix::<Complex64>::identity(n, n);
        prod.iter()
            .zip(id.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let sq = &self.mat * &self.mat;
        sq.iter()
            .zip(self.mat.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        if !self.is_hermitian(tol) {
            return Err(Error::Numerical("operator is not Hermitian".into()));
        }
        let mut vals: Vec<f64> = self.mat.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        Ok(vals)
    }

    /// `Tr(self · rhs)`, computed without forming the product.
    pub fn trace_product(&self, rhs: &Operator) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.mat[(i, k)] * rhs.mat[(k, i)];
            }
        }
        acc
    }
}

/// A state vector on a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Builds a normalised state; the norm must already be 1 within
    /// [`DEFAULT_TOL`].
    pub fn new(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let state = Self::unnormalized(amps, dims)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Numerical(format!("state norm is {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Builds a vector without the unit-norm check (ancilla bookkeeping).
    pub fn unnormalized(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        Ok(Self {
            amps: DVector::from_vec(amps),
            dims,
        })
    }

    pub fn basis_vector(index: usize, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if index >= n {
            return argument(format!("basis index {index} out of range for dimension {n}"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::unnormalized(amps, dims)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn tensor(&self, rhs: &PureState) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self {
            amps: self.amps.kronecker(&rhs.amps),
            dims,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Applies `op` to the listed registers (in the given order) and the
    /// identity elsewhere, without forming the full embedded operator.
    pub fn apply_local(&self, op: &DMatrix<Complex64>, registers: &[usize]) -> Result<PureState> {
        let local = local_dim(&self.dims, registers)?;
        if op.nrows() != local || op.ncols() != local {
            return argument(format!(
                "local operator is {}x{}, registers span {local}",
                op.nrows(),
                op.ncols()
            ));
        }
        let n = self.len();
        let k = self.dims.len();
        let local_dims: Vec<usize> = registers.iter().map(|&r| self.dims[r]).collect();
        let mut out = DVector::<Complex64>::zeros(n);
        let mut dig = vec![0usize; k];
        let mut ldig = vec![0usize; registers.len()];
        for idx in 0..n {
            let a = self.amps[idx];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            digits(idx, &self.dims, &mut dig);
            for (slot, &r) in ldig.iter_mut().zip(registers) {
                *slot = dig[r];
            }
            let col = compose(&ldig, &local_dims);
            for row in 0..local {
                let coeff = op[(row, col)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                digits(row, &local_dims, &mut ldig);
                let mut target = dig.clone();
                for (&r, &v) in registers.iter().zip(ldig.iter()) {
                    target[r] = v;
                }
                out[compose(&target, &self.dims)] += coeff * a;
            }
        }
        Ok(PureState {
            amps: out,
            dims: self.dims.clone(),
        })
    }
}

fn local_dim(dims: &[usize], registers: &[usize]) -> Result<usize> {
    let mut seen = vec![false; dims.len()];
    for &r in registers {
        if r >= dims.len() || seen[r] {
            return argument(format!("invalid register list {registers:?} for layout {dims:?}"));
        }
        seen[r] = true;
    }
    Ok(registers.iter().map(|&r| dims[r]).product())
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant at [`DEFAULT_TOL`].
    pub fn new(mat: DMatrix<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(mat, dims)?;
        rho.validate(DEFAULT_TOL)?;
        Ok(rho)
    }

    /// Wraps a matrix after checking only shape and layout.
    pub fn from_matrix_unchecked(mat: DMatrix<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return argument("density matrix must be square");
        }
        check_dims(&dims, mat.nrows())?;
        Ok(Self { mat, dims })
    }

    /// `I/n` on the given layout.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            mat: DMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0),
            dims,
        }
    }

    /// Checks hermiticity, unit trace and positivity.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let op = self.as_operator();
        if !op.is_hermitian(tol) {
            return Err(Error::Numerical("density matrix is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Numerical(format!("density matrix trace is {tr}")));
        }
        let min = op
            .hermitian_eigenvalues(tol)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -tol {
            return Err(Error::Numerical(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn as_operator(&self) -> Operator {
        Operator {
            mat: self.mat.clone(),
            dims: self.dims.clone(),
        }
    }

    pub fn tensor(&self, rhs: &DensityMatrix) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self {
            mat: self.mat.kronecker(&rhs.mat),
            dims,
        }
    }

    /// Probability `Tr(E ρ)` of a positive operator, real part.
    pub fn expectation(&self, effect: &Operator) -> Result<f64> {
        if effect.dim() != self.dim() {
            return argument("effect and state dimensions differ");
        }
        Ok(effect.trace_product(&self.as_operator()).re)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Weighted sum `Σ w_k ρ_k` of states with identical layout.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Argument("empty mixture".into()))?;
        let mut mat = DMatrix::<Complex64>::zeros(first.1.dim(), first.1.dim());
        for (w, rho) in parts {
            if rho.dims != first.1.dims {
                return argument("mixture components have different layouts");
            }
            mat += &rho.mat * Complex64::new(*w, 0.0);
        }
        Ok(Self {
            mat,
            dims: first.1.dims.clone(),
        })
    }

    pub(crate) fn add_scaled_projector(&mut self, weight: f64, state: &PureState) {
        let v = &state.amps;
        self.mat.ger(Complex64::new(weight, 0.0), v, &v.conjugate(), Complex64::new(1.0, 0.0));
    }

    pub(crate) fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            mat: DMatrix::zeros(n, n),
            dims,
        }
    }
}

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution(Vec<f64>);

impl ProbabilityDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return argument("distribution must have at least one outcome");
        }
        for &w in &weights {
            if !w.is_finite() || !(-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&w) {
                return argument(format!("weight {w} outside [0, 1]"));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return argument(format!("weights sum to {total}, expected 1"));
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.0
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| -w * w.log2())
            .sum()
    }
}

/// `|index⟩` or `|ĩndex⟩ = d^{-1/2} Σ_k ω^{index·k} |k⟩`.
pub fn prepare_state(d: QuditDim, basis: Basis, index: usize) -> Result<PureState> {
    d.check_index("index", index)?;
    let n = d.get();
    let amps = match basis {
        Basis::Computational => {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[index] = Complex64::new(1.0, 0.0);
            v
        }
        Basis::Fourier => {
            let s = 1.0 / (n as f64).sqrt();
            (0..n)
                .map(|k| d.omega_pow((index * k) as i64) * s)
                .collect()
        }
    };
    PureState::unnormalized(amps, vec![n])
}

/// Heisenberg-Weyl operator `Û_xy = Σ_l ω^{l·y} |l⊕x⟩⟨l|`.
pub fn weyl_u(d: QuditDim, x: usize, y: usize) -> Result<Operator> {
    d.check_index("x", x)?;
    d.check_index("y", y)?;
    let n = d.get();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for l in 0..n {
        mat[(d.add(l, x), l)] = d.omega_pow((l * y) as i64);
    }
    Ok(Operator {
        mat,
        dims: vec![n],
    })
}

/// Noise Weyl operator `Ŵ_ij = Σ_k ω^{k·i} |k⟩⟨k⊕j|`.
pub fn weyl_w(d: QuditDim, i: usize, j: usize) -> Result<Operator> {
    d.check_index("i", i)?;
    d.check_index("j", j)?;
    let n = d.get();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        mat[(k, d.add(k, j))] = d.omega_pow((k * i) as i64);
    }
    Ok(Operator {
        mat,
        dims: vec![n],
    })
}

/// Two-qudit Bell state `|B(xy)⟩ = d^{-1/2} Σ_l ω^{-l·y} |l, l⊕x⟩`.
pub fn bell_state(d: QuditDim, x: usize, y: usize) -> Result<PureState> {
    d.check_index("x", x)?;
    d.check_index("y", y)?;
    let n = d.get();
    let s = 1.0 / (n as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
    for l in 0..n {
        amps[l * n + d.add(l, x)] = d.omega_pow(-((l * y) as i64)) * s;
    }
    PureState::unnormalized(amps, vec![n, n])
}

/// `|φ⁺⟩ = |B(00)⟩`.
pub fn max_entangled(d: QuditDim) -> PureState {
    bell_state(d, 0, 0).expect("indices in range")
}

/// Entropy of `{p, (1-p)/(d-1), …}` in bits, with `0 log 0 = 0`.
pub fn skewed_entropy(d: QuditDim, p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok(skewed_entropy_unchecked(d.get() as f64, p))
}

/// [`skewed_entropy`] for a real multiplicity `m >= 1`; `m = 1` gives 0.
pub(crate) fn skewed_entropy_unchecked(m: f64, p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    let rest = 1.0 - p;
    if rest > 0.0 && m > 1.0 {
        h -= rest * (rest / (m - 1.0)).log2();
    }
    h
}

/// `-Tr ρ log2 ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = rho.as_operator().hermitian_eigenvalues(DEFAULT_TOL)?;
    let mut s = 0.0;
    for lambda in eig {
        if lambda < -EIGEN_CLAMP.max(DEFAULT_TOL) {
            return Err(Error::Numerical(format!("negative eigenvalue {lambda}")));
        }
        if lambda > EIGEN_CLAMP {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s)
}

/// Tensor product of two density matrices.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    a.tensor(b)
}

/// `O ρ O†`.
pub fn apply_operator(rho: &DensityMatrix, op: &Operator) -> Result<DensityMatrix> {
    if op.dim() != rho.dim() {
        return argument(format!(
            "operator dimension {} does not match state dimension {}",
            op.dim(),
            rho.dim()
        ));
    }
    Ok(DensityMatrix {
        mat: &op.mat * &rho.mat * op.mat.adjoint(),
        dims: rho.dims.clone(),
    })
}

/// Traces out the listed registers; remaining registers keep their order.
pub fn partial_trace(rho: &DensityMatrix, traced: &[usize]) -> Result<DensityMatrix> {
    local_dim(&rho.dims, traced)?;
    let k = rho.dims.len();
    let kept: Vec<usize> = (0..k).filter(|r| !traced.contains(r)).collect();
    if kept.is_empty() {
        return argument("cannot trace out every register");
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&r| rho.dims[r]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&r| rho.dims[r]).collect();
    let nk: usize = kept_dims.iter().product();
    let nt: usize = traced_dims.iter().product();
    let mut out = DMatrix::<Complex64>::zeros(nk, nk);
    let mut full = vec![0usize; k];
    let mut kd = vec![0usize; kept.len()];
    let mut td = vec![0usize; traced.len()];
    let index_of = |kd: &[usize], td: &[usize], full: &mut [usize]| {
        for (&r, &v) in kept.iter().zip(kd) {
            full[r] = v;
        }
        for (&r, &v) in traced.iter().zip(td) {
            full[r] = v;
        }
        compose(full, &rho.dims)
    };
    for row in 0..nk {
        for col in 0..nk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..nt {
                digits(t, &traced_dims, &mut td);
                digits(row, &kept_dims, &mut kd);
                let i = index_of(&kd, &td, &mut full);
                digits(col, &kept_dims, &mut kd);
                let j = index_of(&kd, &td, &mut full);
                acc += rho.mat[(i, j)];
            }
            out[(row, col)] = acc;
        }
    }
    Ok(DensityMatrix {
        mat: out,
        dims: kept_dims,
    })
}

/// Reorders registers: output register `k` is input register `order[k]`.
pub fn permute_registers(rho: &DensityMatrix, order: &[usize]) -> Result<DensityMatrix> {
    let k = rho.dims.len();
    if order.len() != k {
        return argument(format!("permutation {order:?} does not match {k} registers"));
    }
    local_dim(&rho.dims, order)?;
    let new_dims: Vec<usize> = order.iter().map(|&r| rho.dims[r]).collect();
    let n = rho.dim();
    // map[new_index] = old_index
    let mut map = vec![0usize; n];
    let mut nd = vec![0usize; k];
    let mut od = vec![0usize; k];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        digits(new_idx, &new_dims, &mut nd);
        for (pos, &r) in order.iter().enumerate() {
            od[r] = nd[pos];
        }
        *slot = compose(&od, &rho.dims);
    }
    let mat = DMatrix::from_fn(n, n, |i, j| rho.mat[(map[i], map[j])]);
    Ok(DensityMatrix {
        mat,
        dims: new_dims,
    })
}
