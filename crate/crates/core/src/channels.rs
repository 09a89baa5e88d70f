//! Noise channels and their two-way (forward, encode, backward) action.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{argument, check_unit_interval, Error, Result};
use crate::qudit::{apply_operator, weyl_u, weyl_w, DensityMatrix, Operator, QuditDim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Depolarizing,
    DitPhaseFlip,
    AmplitudeDamping,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::Depolarizing,
        NoiseKind::DitPhaseFlip,
        NoiseKind::AmplitudeDamping,
    ];

    /// Short label used on the command line and in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::Depolarizing => "dep",
            NoiseKind::DitPhaseFlip => "dpf",
            NoiseKind::AmplitudeDamping => "adc",
        }
    }

    /// Depolarizing and dit-phase-flip are Weyl-diagonal (Pauli) channels.
    pub fn is_pauli(self) -> bool {
        !matches!(self, NoiseKind::AmplitudeDamping)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dep" | "depolarizing" => Ok(NoiseKind::Depolarizing),
            "dpf" | "ditphaseflip" | "dit-phase-flip" => Ok(NoiseKind::DitPhaseFlip),
            "adc" | "amplitudedamping" | "amplitude-damping" => Ok(NoiseKind::AmplitudeDamping),
            other => argument(format!("unknown noise kind '{other}' (expected dep, dpf or adc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationMode {
    Independent,
    Correlated,
}

impl CorrelationMode {
    pub fn label(self) -> &'static str {
        match self {
            CorrelationMode::Independent => "ind",
            CorrelationMode::Correlated => "cor",
        }
    }
}

impl fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CorrelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ind" | "independent" => Ok(CorrelationMode::Independent),
            "cor" | "corr" | "correlated" => Ok(CorrelationMode::Correlated),
            other => argument(format!("unknown correlation mode '{other}' (expected ind or cor)")),
        }
    }
}

/// Rejects correlated amplitude damping, which has no defined two-use form.
pub fn check_supported(kind: NoiseKind, mode: CorrelationMode) -> Result<()> {
    if mode == CorrelationMode::Correlated && !kind.is_pauli() {
        return Err(Error::Unsupported(format!(
            "correlated mode is only defined for Pauli channels, not {kind}"
        )));
    }
    Ok(())
}

/// One Weyl error `Ŵ_ij` with its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliWeight {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Probabilities of the Weyl errors making up a Pauli channel. Entries with
/// zero weight are omitted.
pub fn pauli_weights(kind: NoiseKind, d: QuditDim, p: f64) -> Result<Vec<PauliWeight>> {
    check_unit_interval("p", p)?;
    let n = d.get();
    let nf = n as f64;
    let mut out = Vec::new();
    match kind {
        NoiseKind::Depolarizing => {
            for i in 0..n {
                for j in 0..n {
                    let weight = if i == 0 && j == 0 {
                        1.0 - p * (nf * nf - 1.0) / (nf * nf)
                    } else {
                        p / (nf * nf)
                    };
                    out.push(PauliWeight { i, j, weight });
                }
            }
        }
        NoiseKind::DitPhaseFlip => {
            out.push(PauliWeight { i: 0, j: 0, weight: 1.0 - p });
            let w = p / ((nf - 1.0) * (nf - 1.0));
            for i in 1..n {
                for j in 1..n {
                    out.push(PauliWeight { i, j, weight: w });
                }
            }
        }
        NoiseKind::AmplitudeDamping => {
            return Err(Error::Unsupported(
                "amplitude damping is not a Pauli channel".into(),
            ))
        }
    }
    out.retain(|w| w.weight > 0.0);
    Ok(out)
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kind: NoiseKind,
    d: QuditDim,
    p: f64,
    kraus: Vec<Operator>,
    /// Weyl labels of the Kraus operators, for Pauli kinds.
    labels: Option<Vec<(usize, usize)>>,
}

impl KrausChannel {
    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn d(&self) -> QuditDim {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    /// Weyl indices `(i, j)` of each Kraus operator for Pauli kinds.
    pub fn weyl_labels(&self) -> Option<&[(usize, usize)]> {
        self.labels.as_deref()
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d.get() {
            return argument("channel acts on a single qudit");
        }
        let parts = self
            .kraus
            .iter()
            .map(|k| apply_operator(rho, k).map(|r| (1.0, r)))
            .collect::<Result<Vec<_>>>()?;
        DensityMatrix::mixture(&parts)
    }

    /// Largest entrywise deviation of `Σ K†K` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let n = self.d.get();
        let mut acc = Operator::zeros(vec![n]);
        for k in &self.kraus {
            acc = acc
                .add(&k.adjoint().compose(k).expect("same dimension"))
                .expect("same layout");
        }
        acc.max_abs_diff(&Operator::identity(vec![n]))
    }

    /// Largest entrywise deviation of `E(I/d)` from `I/d`.
    pub fn unitality_error(&self) -> f64 {
        let mixed = DensityMatrix::maximally_mixed(vec![self.d.get()]);
        self.apply(&mixed)
            .map(|out| out.max_abs_diff(&mixed))
            .unwrap_or(f64::INFINITY)
    }
}

/// Builds the Kraus representation of a noise channel of strength `p`.
pub fn make_channel(kind: NoiseKind, d: QuditDim, p: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    let n = d.get();
    let (kraus, labels) = match kind {
        NoiseKind::Depolarizing | NoiseKind::DitPhaseFlip => {
            let weights = pauli_weights(kind, d, p)?;
            let mut ops = Vec::with_capacity(weights.len());
            let mut labels = Vec::with_capacity(weights.len());
            for w in weights {
                ops.push(weyl_w(d, w.i, w.j)?.scale(w.weight.sqrt()));
                labels.push((w.i, w.j));
            }
            (ops, Some(labels))
        }
        NoiseKind::AmplitudeDamping => {
            let mut ops = Vec::with_capacity(n);
            let mut k0 = nalgebra::DMatrix::<Complex64>::zeros(n, n);
            k0[(0, 0)] = Complex64::new(1.0, 0.0);
            let s = (1.0 - p).sqrt();
            for i in 1..n {
                k0[(i, i)] = Complex64::new(s, 0.0);
            }
            ops.push(Operator::from_matrix(k0, vec![n])?);
            for i in 1..n {
                let mut k = nalgebra::DMatrix::<Complex64>::zeros(n, n);
                k[(0, i)] = Complex64::new(p.sqrt(), 0.0);
                ops.push(Operator::from_matrix(k, vec![n])?);
            }
            (ops, None)
        }
    };
    Ok(KrausChannel {
        kind,
        d,
        p,
        kraus,
        labels,
    })
}

/// Sends `rho` through the forward channel, the encoding `Û_xy` and the
/// backward channel, both channels having strength `p`.
///
/// In correlated mode the same Weyl error hits both passes:
/// `Σ w_ij Ŵ_ij Û_xy Ŵ_ij ρ Ŵ_ij† Û_xy† Ŵ_ij†`.
pub fn two_way_action(
    kind: NoiseKind,
    mode: CorrelationMode,
    d: QuditDim,
    p: f64,
    enc: (usize, usize),
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    check_supported(kind, mode)?;
    check_unit_interval("p", p)?;
    if rho.dim() != d.get() {
        return argument("two-way action expects a single-qudit state");
    }
    let u = weyl_u(d, enc.0, enc.1)?;
    match mode {
        CorrelationMode::Independent => {
            let channel = make_channel(kind, d, p)?;
            let forward = channel.apply(rho)?;
            let encoded = apply_operator(&forward, &u)?;
            channel.apply(&encoded)
        }
        CorrelationMode::Correlated => {
            let mut parts = Vec::new();
            for w in pauli_weights(kind, d, p)? {
                let e = weyl_w(d, w.i, w.j)?;
                let op = e.compose(&u)?.compose(&e)?;
                parts.push((w.weight, apply_operator(rho, &op)?));
            }
            DensityMatrix::mixture(&parts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{prepare_state, Basis};

    fn dim(d: usize) -> QuditDim {
        QuditDim::new(d).unwrap()
    }

    fn sample_state(d: QuditDim) -> DensityMatrix {
        DensityMatrix::mixture(&[
            (0.5, prepare_state(d, Basis::Fourier, 1).unwrap().density()),
            (0.3, prepare_state(d, Basis::Computational, d.get() - 1).unwrap().density()),
            (0.2, prepare_state(d, Basis::Computational, 0).unwrap().density()),
        ])
        .unwrap()
    }

    #[test]
    fn parse_labels() {
        assert_eq!("dep".parse::<NoiseKind>().unwrap(), NoiseKind::Depolarizing);
        assert_eq!("ADC".parse::<NoiseKind>().unwrap(), NoiseKind::AmplitudeDamping);
        assert!("xyz".parse::<NoiseKind>().is_err());
        assert_eq!("cor".parse::<CorrelationMode>().unwrap(), CorrelationMode::Correlated);
        for k in NoiseKind::ALL {
            assert_eq!(k.label().parse::<NoiseKind>().unwrap(), k);
        }
    }

    #[test]
    fn full_depolarization() {
        let d = dim(2);
        let ch = make_channel(NoiseKind::Depolarizing, d, 1.0).unwrap();
        let out = ch.apply(&sample_state(d)).unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(vec![2])) < 1e-14);
    }

    #[test]
    fn zero_phase_flip_is_identity() {
        for n in 2..6 {
            let d = dim(n);
            let rho = sample_state(d);
            let ch = make_channel(NoiseKind::DitPhaseFlip, d, 0.0).unwrap();
            assert!(ch.apply(&rho).unwrap().max_abs_diff(&rho) < 1e-15);
        }
    }

    #[test]
    fn full_damping_decays_to_ground() {
        let d = dim(3);
        let ch = make_channel(NoiseKind::AmplitudeDamping, d, 1.0).unwrap();
        let out = ch.apply(&sample_state(d)).unwrap();
        let ground = prepare_state(d, Basis::Computational, 0).unwrap().density();
        assert!(out.max_abs_diff(&ground) < 1e-15);
    }

    #[test]
    fn completeness_and_unitality() {
        for n in 2..=7 {
            let d = dim(n);
            for p in [0.0, 0.1, 0.5, 1.0] {
                for kind in NoiseKind::ALL {
                    let ch = make_channel(kind, d, p).unwrap();
                    assert!(ch.completeness_error() < 1e-10, "{kind} d={n} p={p}");
                    if kind.is_pauli() {
                        assert!(ch.unitality_error() < 1e-12);
                    } else if p > 0.0 {
                        assert!(ch.unitality_error() > 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn depolarizing_twirl_matches_white_noise() {
        for n in 2..=5 {
            let d = dim(n);
            let rho = sample_state(d);
            for p in [0.1, 0.4, 0.9] {
                let twirl = make_channel(NoiseKind::Depolarizing, d, p)
                    .unwrap()
                    .apply(&rho)
                    .unwrap();
                let white = DensityMatrix::mixture(&[
                    (1.0 - p, rho.clone()),
                    (p, DensityMatrix::maximally_mixed(vec![n])),
                ])
                .unwrap();
                assert!(twirl.max_abs_diff(&white) < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_two_way_is_encoding() {
        let d = dim(3);
        let rho = sample_state(d);
        let u = weyl_u(d, 1, 2).unwrap();
        let expected = apply_operator(&rho, &u).unwrap();
        for kind in NoiseKind::ALL {
            let out =
                two_way_action(kind, CorrelationMode::Independent, d, 0.0, (1, 2), &rho).unwrap();
            assert!(out.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn correlated_qubit_phase_flip_cancels() {
        let d = dim(2);
        for p in [0.1, 0.5, 1.0] {
            for x in 0..2 {
                for i in 0..2 {
                    let rho = prepare_state(d, Basis::Fourier, i).unwrap().density();
                    let out = two_way_action(
                        NoiseKind::DitPhaseFlip,
                        CorrelationMode::Correlated,
                        d,
                        p,
                        (x, x),
                        &rho,
                    )
                    .unwrap();
                    let expected = apply_operator(&rho, &weyl_u(d, x, x).unwrap()).unwrap();
                    assert!(out.max_abs_diff(&expected) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn full_depolarization_two_way() {
        let d = dim(2);
        let out = two_way_action(
            NoiseKind::Depolarizing,
            CorrelationMode::Independent,
            d,
            1.0,
            (1, 0),
            &sample_state(d),
        )
        .unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(vec![2])) < 1e-14);
    }

    #[test]
    fn correlated_damping_unsupported() {
        let d = dim(3);
        let err = two_way_action(
            NoiseKind::AmplitudeDamping,
            CorrelationMode::Correlated,
            d,
            0.2,
            (0, 0),
            &sample_state(d),
        );
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn two_way_outputs_are_states() {
        for n in 2..=4 {
            let d = dim(n);
            let rho = sample_state(d);
            for kind in NoiseKind::ALL {
                for mode in [CorrelationMode::Independent, CorrelationMode::Correlated] {
                    if check_supported(kind, mode).is_err() {
                        continue;
                    }
                    for p in [0.0, 0.3, 1.0] {
                        let out = two_way_action(kind, mode, d, p, (1, n - 1), &rho).unwrap();
                        out.validate(1e-10).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_strength() {
        assert!(make_channel(NoiseKind::Depolarizing, dim(2), 1.2).is_err());
        assert!(make_channel(NoiseKind::AmplitudeDamping, dim(2), f64::NAN).is_err());
    }
}
