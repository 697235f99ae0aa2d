//! Density operators, classical-quantum ensembles and the channels applied to them.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::{String, ToString};
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermitianMatrix, Tolerances, C64};

/// A quantum state: Hermitian, PSD, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(HermitianMatrix);

impl DensityOperator {
    /// Validates with default tolerances.
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    /// Validates PSD-ness and trace.
    pub fn with_tolerances(m: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let tr = m.trace();
        if !((tr - 1.0).abs() <= tol.trace) {
            return Err(Error::BadTrace(tr));
        }
        let e = m.eig()?;
        if e.min() < -tol.psd {
            return Err(Error::NotPsd(e.min()));
        }
        Ok(Self(m))
    }

    /// Validates a raw complex matrix end to end.
    pub fn from_matrix(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::with_tolerances(HermitianMatrix::with_tolerance(m, tol.hermitian)?, tol)
    }

    pub(crate) fn from_hermitian_unchecked(m: HermitianMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a ket, normalized first.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::OutOfRange {
                name: "ket norm",
                value: norm,
            });
        }
        let v: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self(HermitianMatrix::projector(&v)))
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Dimension of the underlying Hilbert space.
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Hermitian matrix view.
    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    /// Trace distance to another state.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        linalg::trace_distance(&self.0, &other.0)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self(self.0.conjugate_by(u))
    }

    /// Global depolarizing channel `p I/d + (1 − p) ρ`.
    pub fn depolarize(&self, p: DepolarizingParam) -> Self {
        let d = self.dim();
        let mixed = HermitianMatrix::identity(d).scale(p.value() / d as f64);
        Self(mixed.add(&self.0.scale(1.0 - p.value())))
    }
}

/// Depolarizing strength `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DepolarizingParam(f64);

impl DepolarizingParam {
    /// Validates `0 ≤ p ≤ 1`.
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::OutOfRange {
                name: "p",
                value: p,
            })
        }
    }

    /// The value of `p`.
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Ensemble `{p_X(x), ρˣ}` encoding a classical random variable into states.
///
/// Labels are opaque strings and are never interpreted.
#[derive(Debug, Clone, PartialEq)]
pub struct CqEnsemble {
    labels: Vec<String>,
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqEnsemble {
    /// Validates with default tolerances.
    pub fn new(labels: Vec<String>, probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        Self::with_tolerances(labels, probs, states, &Tolerances::default())
    }

    /// Validates alignment, strictly positive probabilities summing to one and
    /// a shared dimension. Zero-probability items are rejected, not trimmed.
    pub fn with_tolerances(
        labels: Vec<String>,
        probs: Vec<f64>,
        states: Vec<DensityOperator>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty("ensemble"));
        }
        for (what, len) in [("labels", labels.len()), ("probs", probs.len())] {
            if len != states.len() {
                return Err(Error::LengthMismatch {
                    what,
                    expected: states.len(),
                    found: len,
                });
            }
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::BadProbability { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if !((total - 1.0).abs() <= tol.probability_sum) {
            return Err(Error::ProbabilitySum(total));
        }
        let d = states[0].dim();
        for (i, s) in states.iter().enumerate() {
            if s.dim() != d {
                return Err(Error::item(
                    "state",
                    i,
                    Error::DimensionMismatch {
                        expected: d,
                        found: s.dim(),
                    },
                ));
            }
        }
        Ok(Self {
            labels,
            probs,
            states,
        })
    }

    /// Uniform prior over the given states.
    pub fn uniform(labels: Vec<String>, states: Vec<DensityOperator>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(labels, alloc::vec![1.0 / n as f64; states.len()], states)
    }

    /// Number of classical symbols `|𝕏|`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false for a validated ensemble.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Symbol labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Prior probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Encoding states.
    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// Index of a label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `ρ̄ = Σₓ p_X(x) ρˣ`.
    pub fn average_state(&self) -> DensityOperator {
        let mut acc = HermitianMatrix::from_real_diagonal(&alloc::vec![0.0; self.dim()]);
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc = acc.add(&s.matrix().scale(*p));
        }
        DensityOperator(acc)
    }

    fn map_states(&self, f: impl Fn(&DensityOperator) -> DensityOperator) -> Self {
        Self {
            labels: self.labels.clone(),
            probs: self.probs.clone(),
            states: self.states.iter().map(f).collect(),
        }
    }

    /// `ρˣ ↦ U ρˣ U†`, probabilities unchanged.
    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        self.check_unitary(u)?;
        Ok(self.map_states(|s| s.conjugate_by(u)))
    }

    /// Global depolarizing channel applied to every state.
    pub fn depolarize(&self, p: DepolarizingParam) -> Self {
        self.map_states(|s| s.depolarize(p))
    }

    /// `β(U) = max_x ‖UρˣU† − ρˣ‖_tr`, the weak data-processing slack.
    pub fn dpi_beta(&self, u: &ComplexMatrix) -> Result<f64> {
        self.check_unitary(u)?;
        let mut beta: f64 = 0.0;
        for s in &self.states {
            beta = beta.max(s.conjugate_by(u).trace_distance(s)?);
        }
        Ok(beta)
    }

    fn check_unitary(&self, u: &ComplexMatrix) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        u.check_unitary(Tolerances::default().unitary)
    }

    /// Largest pairwise trace distance between encoding states.
    pub fn max_pairwise_distance(&self) -> Result<f64> {
        let mut best: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.max(self.states[i].trace_distance(&self.states[j])?);
            }
        }
        Ok(best)
    }

    /// Largest pairwise commutator Frobenius norm `‖[ρˣ, ρˣ′]‖_F`.
    pub fn max_commutator_norm(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let c = linalg::commutator(
                    self.states[i].matrix().as_matrix(),
                    self.states[j].matrix().as_matrix(),
                )
                .expect("ensemble states share a dimension");
                best = best.max(c.frobenius());
            }
        }
        best
    }
}

/// Computational-basis ket `|i⟩` in dimension `d`.
pub fn basis_ket(d: usize, i: usize) -> Vec<C64> {
    (0..d)
        .map(|k| C64::new(if k == i { 1.0 } else { 0.0 }, 0.0))
        .collect()
}

/// `|0⟩, |1⟩, |+⟩, |−⟩`.
pub fn bb84_kets() -> [[C64; 2]; 4] {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(s, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(-s, 0.0)],
    ]
}

/// Labels `(x₁,x₂)` of the BB84 encoding, in ensemble order.
pub const BB84_LABELS: [&str; 4] = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"];

/// The BB84 encoding: `(0,0)→|0⟩`, `(0,1)→|1⟩`, `(1,0)→|+⟩`, `(1,1)→|−⟩`, uniform.
pub fn bb84_ensemble() -> CqEnsemble {
    let states = bb84_kets()
        .iter()
        .map(|k| DensityOperator::pure(k).expect("unit ket"))
        .collect();
    CqEnsemble::uniform(BB84_LABELS.iter().map(|s| s.to_string()).collect(), states)
        .expect("BB84 ensemble is valid")
}

/// Hadamard gate.
pub fn hadamard() -> ComplexMatrix {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn diag(d: &[f64]) -> DensityOperator {
        DensityOperator::new(HermitianMatrix::from_real_diagonal(d)).unwrap()
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("{i}")).collect()
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(matches!(
            DensityOperator::new(HermitianMatrix::from_real_diagonal(&[0.5, 0.4])),
            Err(Error::BadTrace(_))
        ));
        assert!(matches!(
            DensityOperator::new(HermitianMatrix::from_real_diagonal(&[1.5, -0.5])),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn rejects_invalid_ensembles() {
        let s = || diag(&[1.0, 0.0]);
        assert!(matches!(
            CqEnsemble::new(labels(2), vec![1.0, 0.0], vec![s(), s()]),
            Err(Error::BadProbability { index: 1, .. })
        ));
        assert!(matches!(
            CqEnsemble::new(labels(2), vec![0.5, 0.6], vec![s(), s()]),
            Err(Error::ProbabilitySum(_))
        ));
        assert!(matches!(
            CqEnsemble::new(labels(2), vec![0.5, 0.5], vec![s(), diag(&[1.0, 0.0, 0.0])]),
            Err(Error::Item { index: 1, .. })
        ));
        assert!(matches!(
            CqEnsemble::new(labels(1), vec![0.5, 0.5], vec![s(), s()]),
            Err(Error::LengthMismatch { what: "labels", .. })
        ));
        assert!(matches!(
            CqEnsemble::new(vec![], vec![], vec![]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn average_state_examples() {
        let rho = diag(&[0.3, 0.7]);
        let single = CqEnsemble::new(labels(1), vec![1.0], vec![rho.clone()]).unwrap();
        assert_eq!(single.average_state(), rho);

        let bb = bb84_ensemble().average_state();
        assert!(bb.matrix().as_matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        let zo = CqEnsemble::new(labels(2), vec![0.5, 0.5], vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])])
            .unwrap()
            .average_state();
        assert_eq!(zo.matrix(), &HermitianMatrix::from_real_diagonal(&[0.5, 0.5]));
    }

    #[test]
    fn hadamard_permutes_bb84() {
        let e = bb84_ensemble();
        let h = e.apply_unitary(&hadamard()).unwrap();
        // H|0⟩=|+⟩, H|1⟩=|−⟩, H|+⟩=|0⟩, H|−⟩=|1⟩
        for (from, to) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            let diff = h.states()[from]
                .matrix()
                .as_matrix()
                .max_abs_diff(e.states()[to].matrix().as_matrix());
            assert!(diff < 1e-15, "{from}->{to}: {diff}");
        }
        assert_eq!(h.probs(), e.probs());
        let same = e.apply_unitary(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(same, e);
    }

    #[test]
    fn apply_unitary_rejects_non_unitary() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            bb84_ensemble().apply_unitary(&m),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn depolarize_examples() {
        let e = CqEnsemble::new(labels(1), vec![1.0], vec![diag(&[1.0, 0.0])]).unwrap();
        let p0 = e.depolarize(DepolarizingParam::new(0.0).unwrap());
        assert_eq!(p0, e);
        let p1 = e.depolarize(DepolarizingParam::new(1.0).unwrap());
        assert_eq!(p1.states()[0].matrix(), &HermitianMatrix::from_real_diagonal(&[0.5, 0.5]));
        let half = e.depolarize(DepolarizingParam::new(0.5).unwrap());
        assert_eq!(half.states()[0].matrix(), &HermitianMatrix::from_real_diagonal(&[0.75, 0.25]));
        assert!(DepolarizingParam::new(1.5).is_err());
        assert!(DepolarizingParam::new(-0.1).is_err());
    }

    #[test]
    fn dpi_beta_examples() {
        let e = bb84_ensemble();
        assert_eq!(e.dpi_beta(&ComplexMatrix::identity(2)).unwrap(), 0.0);
        let phase = ComplexMatrix::identity(2).scale(C64::from_polar(1.0, 0.7));
        assert!(e.dpi_beta(&phase).unwrap() < 1e-15);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let zero = CqEnsemble::new(labels(1), vec![1.0], vec![diag(&[1.0, 0.0])]).unwrap();
        assert!((zero.dpi_beta(&x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bb84_table() {
        let e = bb84_ensemble();
        assert_eq!(e.len(), 4);
        assert_eq!(e.dim(), 2);
        assert_eq!(e.probs(), &[0.25; 4]);
        let zero = e.states()[e.index_of("(0,0)").unwrap()].matrix();
        assert_eq!(zero, &HermitianMatrix::from_real_diagonal(&[1.0, 0.0]));
        let plus = e.states()[e.index_of("(1,0)").unwrap()].matrix().as_matrix();
        for z in plus.as_slice() {
            assert!((z.re - 0.5).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn commuting_detection() {
        let e = CqEnsemble::new(labels(2), vec![0.5, 0.5], vec![diag(&[1.0, 0.0]), diag(&[0.25, 0.75])]).unwrap();
        assert_eq!(e.max_commutator_norm(), 0.0);
        assert!(bb84_ensemble().max_commutator_norm() > 0.5);
    }
}
