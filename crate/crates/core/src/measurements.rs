//! POVMs, their implementations, post-measurement states and gentleness.
//!
//! A measurement is only "gentle" relative to a fixed implementation
//! `{B_y}`: the post-measurement state `B_y ρ B_y† / tr(ρ F_y)` depends on
//! it, not just on the POVM `{F_y = B_y†B_y}`. Certification here therefore
//! always takes a [`PovmImplementation`].

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermitianMatrix, Tolerances};
use crate::states::{CqEnsemble, DensityOperator};

/// Upper limit on `ε` for the three-outcome gentle construction.
pub const GENTLE_EPSILON_MAX: f64 = 0.1;
/// Bisection iterations used by [`epsilon_prime`].
pub const EPSILON_BISECTION_STEPS: usize = 31;

/// Positive operator-valued measure `{F_y}` with `Σ F_y = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    labels: Vec<String>,
    elements: Vec<HermitianMatrix>,
}

impl Povm {
    /// Validates with default tolerances.
    pub fn new(labels: Vec<String>, elements: Vec<HermitianMatrix>) -> Result<Self> {
        Self::with_tolerances(labels, elements, &Tolerances::default())
    }

    /// Checks every element is PSD and that the elements sum to the identity.
    pub fn with_tolerances(
        labels: Vec<String>,
        elements: Vec<HermitianMatrix>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("POVM"));
        }
        if labels.len() != elements.len() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: elements.len(),
                found: labels.len(),
            });
        }
        let d = elements[0].dim();
        for (i, f) in elements.iter().enumerate() {
            if f.dim() != d {
                return Err(Error::item(
                    "element",
                    i,
                    Error::DimensionMismatch {
                        expected: d,
                        found: f.dim(),
                    },
                ));
            }
            let min = f.eig().map_err(|e| Error::item("element", i, e))?.min();
            if min < -tol.psd {
                return Err(Error::item("element", i, Error::NotPsd(min)));
            }
        }
        let povm = Self { labels, elements };
        let r = povm.completeness_residual();
        if !(r <= tol.povm) {
            return Err(Error::Incomplete(r));
        }
        Ok(povm)
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false for a validated POVM.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Outcome labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Elements `F_y`.
    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// `‖Σ F_y − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim());
        for f in &self.elements {
            acc = &acc + f.as_matrix();
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// The implementation `B_y = √F_y`.
    pub fn canonical_implementation(&self) -> Result<PovmImplementation> {
        let ops = self
            .elements
            .iter()
            .map(|f| linalg::psd_sqrt(f).map(HermitianMatrix::into_matrix))
            .collect::<Result<Vec<_>>>()?;
        PovmImplementation::new(self.clone(), ops)
    }
}

/// Measurement operators `{B_y}` with `B_y†B_y = F_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmImplementation {
    povm: Povm,
    operators: Vec<ComplexMatrix>,
}

impl PovmImplementation {
    /// Pairs operators with a POVM, checking `B_y†B_y = F_y` within tolerance.
    pub fn new(povm: Povm, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let tol = Tolerances::default().povm;
        if operators.len() != povm.len() {
            return Err(Error::LengthMismatch {
                what: "implementation",
                expected: povm.len(),
                found: operators.len(),
            });
        }
        for (index, (b, f)) in operators.iter().zip(povm.elements()).enumerate() {
            if b.dim() != povm.dim() {
                return Err(Error::item(
                    "operator",
                    index,
                    Error::DimensionMismatch {
                        expected: povm.dim(),
                        found: b.dim(),
                    },
                ));
            }
            let residual = (&b.adjoint() * b).max_abs_diff(f.as_matrix());
            if !(residual <= tol) {
                return Err(Error::ImplementationMismatch { index, residual });
            }
        }
        Ok(Self { povm, operators })
    }

    /// Builds the POVM `F_y = B_y†B_y` from the operators and validates it.
    pub fn from_operators(labels: Vec<String>, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let elements = operators
            .iter()
            .map(|b| HermitianMatrix::symmetrized(&b.adjoint() * b))
            .collect();
        let povm = Povm::new(labels, elements)?;
        Self::new(povm, operators)
    }

    /// The implemented POVM.
    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// Operators `B_y`.
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    /// Always false for a validated implementation.
    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.povm.dim()
    }
}

/// Conditional distribution `P[y|x]`, outcomes as rows and inputs as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMatrix {
    outcomes: usize,
    inputs: usize,
    data: Vec<f64>,
}

impl ConditionalMatrix {
    /// Validates entries in `[0, 1]` and column sums of one (within `1e-9`).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let outcomes = rows.len();
        if outcomes == 0 {
            return Err(Error::MalformedChannel("no outcomes".to_string()));
        }
        let inputs = rows[0].len();
        if inputs == 0 {
            return Err(Error::MalformedChannel("no inputs".to_string()));
        }
        let mut data = Vec::with_capacity(outcomes * inputs);
        for (y, row) in rows.iter().enumerate() {
            if row.len() != inputs {
                return Err(Error::MalformedChannel(format!(
                    "row {y} has {} entries, expected {inputs}",
                    row.len()
                )));
            }
            for (x, &p) in row.iter().enumerate() {
                if !(-1e-10..=1.0 + 1e-10).contains(&p) {
                    return Err(Error::MalformedChannel(format!(
                        "entry P[{y}|{x}] = {p} outside [0, 1]"
                    )));
                }
                data.push(p.clamp(0.0, 1.0));
            }
        }
        let m = Self {
            outcomes,
            inputs,
            data,
        };
        for x in 0..inputs {
            let s: f64 = (0..outcomes).map(|y| m.get(y, x)).sum();
            if !((s - 1.0).abs() <= 1e-9) {
                return Err(Error::MalformedChannel(format!(
                    "column {x} sums to {s}"
                )));
            }
        }
        Ok(m)
    }

    /// `P[y|x]`.
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.inputs + x]
    }

    /// Number of outcomes `|𝕐|`.
    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// Number of inputs `|𝕏|`.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Row for outcome `y`.
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.inputs..(y + 1) * self.inputs]
    }
}

/// Born's rule `P[y|x] = tr(ρˣ F_y)`.
pub fn born_probabilities(e: &CqEnsemble, f: &Povm) -> Result<ConditionalMatrix> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: f.dim(),
        });
    }
    let rows = f
        .elements()
        .iter()
        .map(|fy| {
            e.states()
                .iter()
                .map(|s| s.matrix().trace_product(fy))
                .collect()
        })
        .collect();
    ConditionalMatrix::new(rows)
}

/// `B_y ρ B_y† / tr(ρ F_y)`.
pub fn post_measurement_state(
    rho: &DensityOperator,
    imp: &PovmImplementation,
    y: usize,
) -> Result<DensityOperator> {
    if rho.dim() != imp.dim() {
        return Err(Error::DimensionMismatch {
            expected: imp.dim(),
            found: rho.dim(),
        });
    }
    if y >= imp.len() {
        return Err(Error::OutOfRange {
            name: "outcome",
            value: y as f64,
        });
    }
    let prob = rho.matrix().trace_product(&imp.povm().elements()[y]);
    if !(prob > Tolerances::default().zero_probability) {
        return Err(Error::ZeroProbabilityOutcome { index: y, prob });
    }
    Ok(unnormalized_post_state(rho, &imp.operators()[y], prob))
}

fn unnormalized_post_state(rho: &DensityOperator, b: &ComplexMatrix, prob: f64) -> DensityOperator {
    let m = &(b * rho.matrix().as_matrix()) * &b.adjoint();
    DensityOperator::from_hermitian_unchecked(HermitianMatrix::symmetrized(m.scale_real(1.0 / prob)))
}

/// Disturbance parameters `(α, δ) ∈ [0, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GentlenessSpec {
    alpha: f64,
    delta: f64,
}

impl GentlenessSpec {
    /// Validates both parameters lie in `[0, 1]`.
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        for (name, value) in [("alpha", alpha), ("delta", delta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        Ok(Self { alpha, delta })
    }

    /// Allowed trace-distance disturbance.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Allowed failure probability.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Which state drives the outcome distribution when judging gentleness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CertifyMode {
    /// Outcomes drawn from each `σ ∈ S`; the worst case counts.
    #[default]
    PerState,
    /// Outcomes drawn from the ensemble average `ρ̄`.
    AverageState,
}

/// Per-outcome part of a [`CertificationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDisturbance {
    /// Outcome label.
    pub label: String,
    /// `max_ρ ‖ρ_{B|y} − ρ‖_tr` over states that can produce `y`; `None` if none can.
    pub disturbance: Option<f64>,
    /// Whether the outcome keeps every state within `α`.
    pub good: bool,
}

/// Result of [`certify_gentle`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    /// Whether the implementation is `(α, δ)`-gentle on the ensemble states.
    pub certified: bool,
    /// Probability of a good outcome (minimum over states in per-state mode).
    pub worst_prob: f64,
    /// Largest disturbance over outcomes that can occur.
    pub worst_disturbance: f64,
    /// Mode used.
    pub mode: CertifyMode,
    /// Parameters checked.
    pub spec: GentlenessSpec,
    /// Per-outcome detail.
    pub outcomes: Vec<OutcomeDisturbance>,
}

/// Checks whether `imp` keeps every ensemble state within trace distance `α`
/// with probability at least `1 − δ`.
///
/// Outcomes with probability at most `1e-12` for a given state are excluded
/// from that state's disturbance maximum.
pub fn certify_gentle(
    e: &CqEnsemble,
    imp: &PovmImplementation,
    spec: GentlenessSpec,
    mode: CertifyMode,
) -> Result<CertificationReport> {
    if e.dim() != imp.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: imp.dim(),
        });
    }
    let tol = Tolerances::default();
    let elements = imp.povm().elements();
    let mut outcomes = Vec::with_capacity(imp.len());
    let mut worst_disturbance: f64 = 0.0;
    for (y, b) in imp.operators().iter().enumerate() {
        let mut dist: Option<f64> = None;
        for s in e.states() {
            let prob = s.matrix().trace_product(&elements[y]);
            if prob > tol.zero_probability {
                let post = unnormalized_post_state(s, b, prob);
                let d = post.trace_distance(s)?;
                dist = Some(dist.map_or(d, |m| m.max(d)));
            }
        }
        if let Some(d) = dist {
            worst_disturbance = worst_disturbance.max(d);
        }
        outcomes.push(OutcomeDisturbance {
            label: imp.povm().labels()[y].clone(),
            disturbance: dist,
            good: dist.is_none_or(|d| d <= spec.alpha + tol.gentleness),
        });
    }

    let good_prob = |rho: &DensityOperator| -> f64 {
        outcomes
            .iter()
            .zip(elements)
            .filter(|(o, _)| o.good)
            .map(|(_, f)| rho.matrix().trace_product(f))
            .fold(0.0, |a, b| a + b)
    };
    let worst_prob = match mode {
        CertifyMode::PerState => e
            .states()
            .iter()
            .map(good_prob)
            .fold(f64::INFINITY, f64::min),
        CertifyMode::AverageState => good_prob(&e.average_state()),
    };
    Ok(CertificationReport {
        certified: worst_prob >= 1.0 - spec.delta - tol.gentleness,
        worst_prob,
        worst_disturbance,
        mode,
        spec,
        outcomes,
    })
}

/// Three-outcome measurement `{B₊, B₋, B₀}` built from `0 ⪯ M ⪯ I` and `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct GentleConstruction {
    /// The operator `M`.
    pub m: HermitianMatrix,
    /// Strength `ε ∈ [0, 1/10]`.
    pub epsilon: f64,
    /// Outcomes labelled `+`, `-`, `0`.
    pub implementation: PovmImplementation,
}

fn check_contraction(m: &HermitianMatrix) -> Result<()> {
    let tol = Tolerances::default().psd;
    let e = m.eig()?;
    if e.min() < -tol {
        return Err(Error::NotPsd(e.min()));
    }
    if e.max() > 1.0 + tol {
        return Err(Error::AboveIdentity(e.max()));
    }
    Ok(())
}

/// `B± = √((1 − 2ε²)/2) I ± εM`, `B₀ = √2 ε (I − M²)^{1/2}`, with `F_y = B_y B_y†`.
///
/// All three operators are Hermitian, so `B_y B_y† = B_y†B_y`.
pub fn gentle_povm(m: &HermitianMatrix, epsilon: f64) -> Result<GentleConstruction> {
    if !(0.0..=GENTLE_EPSILON_MAX).contains(&epsilon) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
        });
    }
    check_contraction(m)?;
    let d = m.dim();
    let id = HermitianMatrix::identity(d);
    let a = ((1.0 - 2.0 * epsilon * epsilon) / 2.0).sqrt();
    let em = m.scale(epsilon);
    let b_plus = id.scale(a).add(&em);
    let b_minus = id.scale(a).sub(&em);
    let m_sq = HermitianMatrix::symmetrized(m.as_matrix() * m.as_matrix());
    let b_zero = linalg::psd_sqrt(&id.sub(&m_sq))?.scale(2.0f64.sqrt() * epsilon);

    let ops: Vec<HermitianMatrix> = alloc::vec![b_plus, b_minus, b_zero];
    let elements = ops
        .iter()
        .map(|b| HermitianMatrix::symmetrized(b.as_matrix() * b.as_matrix()))
        .collect();
    let labels = ["+", "-", "0"].iter().map(|s| s.to_string()).collect();
    let povm = Povm::new(labels, elements)?;
    let implementation =
        PovmImplementation::new(povm, ops.into_iter().map(HermitianMatrix::into_matrix).collect())?;
    Ok(GentleConstruction {
        m: m.clone(),
        epsilon,
        implementation,
    })
}

/// First-order disturbance predictions for outcome `+` of [`gentle_povm`].
///
/// `normalized` uses `Mρ + ρM − 2tr(ρM)ρ`, the traceless term obtained by
/// expanding the normalized quotient; `printed_sign` uses `+2tr(ρM)ρ`.
/// Both are scaled by `ε √(2/(1 − 2ε²))` and use `‖X‖_tr = ½ tr|X|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderDisturbance {
    /// Expansion with the traceless correction term.
    pub normalized: f64,
    /// Expansion with the opposite sign on the `tr(ρM)ρ` term.
    pub printed_sign: f64,
}

/// Evaluates both first-order disturbance expressions for `(M, ε, ρ)`.
pub fn first_order_disturbance(
    m: &HermitianMatrix,
    epsilon: f64,
    rho: &DensityOperator,
) -> Result<FirstOrderDisturbance> {
    let r = rho.matrix();
    let mr = m.as_matrix() * r.as_matrix();
    let rm = r.as_matrix() * m.as_matrix();
    let anti = HermitianMatrix::symmetrized(&mr + &rm);
    let t = r.trace_product(m);
    let scale = epsilon * (2.0 / (1.0 - 2.0 * epsilon * epsilon)).sqrt();
    let normalized = 0.5 * linalg::trace_norm(&anti.sub(&r.scale(2.0 * t)))?;
    let printed_sign = 0.5 * linalg::trace_norm(&anti.add(&r.scale(2.0 * t)))?;
    Ok(FirstOrderDisturbance {
        normalized: scale * normalized,
        printed_sign: scale * printed_sign,
    })
}

/// Output of [`epsilon_prime`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonPrime {
    /// Largest `ε ≤ 1/10` found by bisection such that the construction certifies.
    pub bisection: f64,
    /// `√(δ / (2(1 − tr(M²ρ̄))))`; infinite when `tr(M²ρ̄) ≥ 1`.
    pub analytic_cap: f64,
    /// `min(bisection, analytic_cap, 1/10)`.
    pub combined: f64,
}

/// Finds a gentleness-preserving `ε` for [`gentle_povm`] by bisection on
/// `[0, 1/10]`, using [`certify_gentle`] as the oracle.
///
/// The bisection result is re-checked on 16 evenly spaced values below it and
/// lowered to the last passing one if any check fails.
pub fn epsilon_prime(
    m: &HermitianMatrix,
    spec: GentlenessSpec,
    e: &CqEnsemble,
    mode: CertifyMode,
) -> Result<EpsilonPrime> {
    if m.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: m.dim(),
        });
    }
    check_contraction(m)?;
    let passes = |eps: f64| -> Result<bool> {
        let g = gentle_povm(m, eps)?;
        Ok(certify_gentle(e, &g.implementation, spec, mode)?.certified)
    };

    let mut lo = 0.0;
    if passes(GENTLE_EPSILON_MAX)? {
        lo = GENTLE_EPSILON_MAX;
    } else {
        let mut hi = GENTLE_EPSILON_MAX;
        for _ in 0..EPSILON_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if passes(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let top = lo;
    for k in 1..=16 {
        let eps = top * k as f64 / 16.0;
        if !passes(eps)? {
            lo = top * (k - 1) as f64 / 16.0;
            break;
        }
    }

    let m_sq = HermitianMatrix::symmetrized(m.as_matrix() * m.as_matrix());
    let gap = 1.0 - e.average_state().matrix().trace_product(&m_sq);
    let analytic_cap = if gap > 0.0 {
        (spec.delta() / (2.0 * gap)).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(EpsilonPrime {
        bisection: lo,
        analytic_cap,
        combined: lo.min(analytic_cap).min(GENTLE_EPSILON_MAX),
    })
}

/// Rank-one projective measurement onto the columns of a unitary; `B_y = F_y`.
pub fn projective_povm(basis: &ComplexMatrix) -> Result<PovmImplementation> {
    basis.check_unitary(Tolerances::default().unitary)?;
    let d = basis.dim();
    let projectors: Vec<HermitianMatrix> = (0..d)
        .map(|j| HermitianMatrix::projector(&basis.column(j)))
        .collect();
    let labels = (0..d).map(|j| format!("{j}")).collect();
    let povm = Povm::new(labels, projectors.clone())?;
    PovmImplementation::new(povm, projectors.into_iter().map(HermitianMatrix::into_matrix).collect())
}

/// Coin-flip mixture of projective measurements: basis `k` is chosen with
/// probability `1/n` and outcome `j` is labelled `"k:j"`; `B_{k,j} = P_{k,j}/√n`.
pub fn basis_mixture(bases: &[ComplexMatrix]) -> Result<PovmImplementation> {
    if bases.is_empty() {
        return Err(Error::Empty("basis list"));
    }
    let w = 1.0 / (bases.len() as f64).sqrt();
    let mut labels = Vec::new();
    let mut ops = Vec::new();
    for (k, basis) in bases.iter().enumerate() {
        basis.check_unitary(Tolerances::default().unitary)?;
        for j in 0..basis.dim() {
            labels.push(format!("{k}:{j}"));
            ops.push(ComplexMatrix::outer(&basis.column(j)).scale_real(w));
        }
    }
    PovmImplementation::from_operators(labels, ops)
}

/// The trivial one-outcome measurement `{I}`.
pub fn identity_measurement(dim: usize) -> PovmImplementation {
    PovmImplementation::from_operators(alloc::vec!["id".to_string()], alloc::vec![ComplexMatrix::identity(dim)])
        .expect("identity is a valid implementation")
}

/// Positive part `L₊` of `ρᵃ − ρᵇ`; lies between `0` and `I`.
pub fn difference_positive_part(a: &DensityOperator, b: &DensityOperator) -> Result<HermitianMatrix> {
    linalg::positive_part(&a.matrix().sub(b.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bb84_ensemble, hadamard};
    use alloc::vec;

    fn z_meas() -> PovmImplementation {
        projective_povm(&ComplexMatrix::identity(2)).unwrap()
    }

    fn x_meas() -> PovmImplementation {
        projective_povm(&hadamard()).unwrap()
    }

    fn single(rho: DensityOperator) -> CqEnsemble {
        CqEnsemble::new(vec!["s".into()], vec![1.0], vec![rho]).unwrap()
    }

    #[test]
    fn born_examples() {
        let e = bb84_ensemble();
        let id = identity_measurement(2);
        let p = born_probabilities(&e, id.povm()).unwrap();
        assert!(p.row(0).iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let z = born_probabilities(&e, z_meas().povm()).unwrap();
        let expect = [1.0, 0.0, 0.5, 0.5];
        for (a, b) in z.row(0).iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let x = born_probabilities(&e, x_meas().povm()).unwrap();
        for (a, b) in x.row(0).iter().zip([0.5, 0.5, 1.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in x.row(1).iter().zip([0.5, 0.5, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn born_dimension_mismatch() {
        let e = bb84_ensemble();
        let p = identity_measurement(3);
        assert!(matches!(
            born_probabilities(&e, p.povm()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn malformed_channel() {
        assert!(ConditionalMatrix::new(vec![vec![0.5, 1.0], vec![0.4, 0.0]]).is_err());
        assert!(ConditionalMatrix::new(vec![vec![1.2], vec![-0.2]]).is_err());
        assert!(ConditionalMatrix::new(vec![vec![0.5, 1.0], vec![0.5]]).is_err());
    }

    #[test]
    fn post_measurement_examples() {
        let e = bb84_ensemble();
        let z = z_meas();
        let zero = &e.states()[0];
        let plus = &e.states()[2];
        let after = post_measurement_state(zero, &z, 0).unwrap();
        assert!(after.trace_distance(zero).unwrap() < 1e-15);
        let collapsed = post_measurement_state(plus, &z, 0).unwrap();
        assert!(collapsed.trace_distance(zero).unwrap() < 1e-15);
        assert!(matches!(
            post_measurement_state(zero, &z, 1),
            Err(Error::ZeroProbabilityOutcome { index: 1, .. })
        ));
        let g = gentle_povm(&HermitianMatrix::identity(2), 0.07).unwrap();
        for y in 0..2 {
            let s = post_measurement_state(plus, &g.implementation, y).unwrap();
            assert!(s.trace_distance(plus).unwrap() < 1e-14);
        }
    }

    #[test]
    fn certify_identity_always() {
        let e = bb84_ensemble();
        for (a, d) in [(0.0, 0.0), (0.3, 0.1), (1.0, 1.0)] {
            let spec = GentlenessSpec::new(a, d).unwrap();
            let r = certify_gentle(&e, &identity_measurement(2), spec, CertifyMode::PerState).unwrap();
            assert!(r.certified);
            assert!((r.worst_prob - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn certify_z_on_plus_fails() {
        let e = single(bb84_ensemble().states()[2].clone());
        for delta in [0.0, 0.5, 0.999] {
            let spec = GentlenessSpec::new(0.5, delta).unwrap();
            let r = certify_gentle(&e, &z_meas(), spec, CertifyMode::PerState).unwrap();
            assert!(!r.certified);
            assert_eq!(r.worst_prob, 0.0);
            assert!((r.worst_disturbance - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        let spec = GentlenessSpec::new(0.5, 1.0).unwrap();
        assert!(certify_gentle(&e, &z_meas(), spec, CertifyMode::PerState).unwrap().certified);
    }

    #[test]
    fn average_mode_differs_from_per_state() {
        // Z measurement: outcomes never disturb |0>,|1> but always disturb |±>.
        let e = bb84_ensemble();
        let spec = GentlenessSpec::new(0.5, 0.0).unwrap();
        let per = certify_gentle(&e, &z_meas(), spec, CertifyMode::PerState).unwrap();
        let avg = certify_gentle(&e, &z_meas(), spec, CertifyMode::AverageState).unwrap();
        // every outcome disturbs some state, so neither is good
        assert_eq!(per.worst_prob, 0.0);
        assert_eq!(avg.worst_prob, 0.0);
        let two = CqEnsemble::uniform(vec!["0".into(), "1".into()], e.states()[..2].to_vec()).unwrap();
        let r = certify_gentle(&two, &z_meas(), spec, CertifyMode::AverageState).unwrap();
        assert!(r.certified);
    }

    #[test]
    fn gentle_povm_at_zero_epsilon() {
        let m = HermitianMatrix::from_real_diagonal(&[0.3, 0.9]);
        let g = gentle_povm(&m, 0.0).unwrap();
        let f = g.implementation.povm().elements();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(f[0].as_matrix().max_abs_diff(&half) < 1e-15);
        assert!(f[1].as_matrix().max_abs_diff(&half) < 1e-15);
        assert!(f[2].as_matrix().max_abs() < 1e-15);
    }

    #[test]
    fn gentle_povm_with_identity_m() {
        let g = gentle_povm(&HermitianMatrix::identity(3), 0.1).unwrap();
        assert!(g.implementation.operators()[2].max_abs() < 1e-7);
        let b = &g.implementation.operators()[0];
        assert!((b[(0, 1)]).norm() < 1e-15);
        assert!((b[(0, 0)] - b[(1, 1)]).norm() < 1e-15);
    }

    #[test]
    fn gentle_povm_rejects_bad_input() {
        let m = HermitianMatrix::from_real_diagonal(&[0.2, 0.4]);
        assert!(matches!(
            gentle_povm(&m, 0.11),
            Err(Error::OutOfRange { name: "epsilon", .. })
        ));
        assert!(matches!(
            gentle_povm(&HermitianMatrix::from_real_diagonal(&[1.2, 0.0]), 0.05),
            Err(Error::AboveIdentity(_))
        ));
        assert!(matches!(
            gentle_povm(&HermitianMatrix::from_real_diagonal(&[-0.2, 0.0]), 0.05),
            Err(Error::NotPsd(_))
        ));
    }

    fn bb84_l_plus() -> HermitianMatrix {
        let e = bb84_ensemble();
        difference_positive_part(&e.states()[0], &e.states()[2]).unwrap()
    }

    #[test]
    fn bb84_l_plus_construction_first_order() {
        let e = bb84_ensemble();
        let m = bb84_l_plus();
        // L₊ of |0><0| − |+><+| has the single eigenvalue 1/√2
        let eig = m.eig().unwrap();
        assert!((eig.max() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(eig.min().abs() < 1e-12);

        let eps = 0.05;
        let g = gentle_povm(&m, eps).unwrap();
        let spec = GentlenessSpec::new(0.2, 0.05).unwrap();
        assert!(certify_gentle(&e, &g.implementation, spec, CertifyMode::PerState).unwrap().certified);

        for rho in e.states() {
            let exact = post_measurement_state(rho, &g.implementation, 0)
                .unwrap()
                .trace_distance(rho)
                .unwrap();
            let fo = first_order_disturbance(&m, eps, rho).unwrap();
            assert!((exact - fo.normalized).abs() < 4.0 * eps * eps, "{exact} vs {}", fo.normalized);
        }
    }

    #[test]
    fn first_order_sign_discrepancy() {
        // As ε → 0 the exact disturbance/ε tends to the traceless expansion,
        // while the opposite-sign expression does not.
        let e = bb84_ensemble();
        let m = bb84_l_plus();
        let rho = &e.states()[2];
        let eps = 1e-5;
        let g = gentle_povm(&m, eps).unwrap();
        let exact = post_measurement_state(rho, &g.implementation, 0)
            .unwrap()
            .trace_distance(rho)
            .unwrap();
        let fo = first_order_disturbance(&m, eps, rho).unwrap();
        assert!((exact / fo.normalized - 1.0).abs() < 1e-3);
        assert!((exact / fo.printed_sign - 1.0).abs() > 1e-2);
    }

    #[test]
    fn epsilon_prime_identity() {
        let e = bb84_ensemble();
        let spec = GentlenessSpec::new(0.1, 0.05).unwrap();
        let r = epsilon_prime(&HermitianMatrix::identity(2), spec, &e, CertifyMode::PerState).unwrap();
        assert_eq!(r.bisection, GENTLE_EPSILON_MAX);
        assert_eq!(r.combined, GENTLE_EPSILON_MAX);
        assert!(r.analytic_cap.is_infinite());
    }

    #[test]
    fn epsilon_prime_zero_delta_cap() {
        let e = bb84_ensemble();
        let spec = GentlenessSpec::new(0.1, 0.0).unwrap();
        let r = epsilon_prime(&bb84_l_plus(), spec, &e, CertifyMode::PerState).unwrap();
        assert_eq!(r.analytic_cap, 0.0);
        assert_eq!(r.combined, 0.0);
    }

    #[test]
    fn epsilon_prime_bb84_anchor() {
        let e = bb84_ensemble();
        let m = bb84_l_plus();
        let spec = GentlenessSpec::new(0.1, 0.05).unwrap();
        let r = epsilon_prime(&m, spec, &e, CertifyMode::PerState).unwrap();
        assert!(r.bisection > 0.0);
        // the largest allowed ε already certifies here
        assert!((r.bisection - EPS_PRIME_BB84_ANCHOR).abs() < 1e-8, "{}", r.bisection);
        let g = gentle_povm(&m, r.bisection).unwrap();
        assert!(certify_gentle(&e, &g.implementation, spec, CertifyMode::PerState).unwrap().certified);
    }

    const EPS_PRIME_BB84_ANCHOR: f64 = 0.1;

    #[test]
    fn projective_examples() {
        let z = z_meas();
        assert_eq!(z.povm().elements()[0], HermitianMatrix::from_real_diagonal(&[1.0, 0.0]));
        assert!(z.povm().completeness_residual() < 1e-15);
        let x = x_meas();
        let plus = bb84_ensemble().states()[2].matrix().clone();
        assert!(x.povm().elements()[0].as_matrix().max_abs_diff(plus.as_matrix()) < 1e-15);
        assert!(x.povm().completeness_residual() < 1e-15);
        assert!(matches!(
            projective_povm(&ComplexMatrix::from_real_diagonal(&[1.0, 0.5])),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn implementation_mismatch_detected() {
        let povm = z_meas().povm().clone();
        let ops = vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2)];
        assert!(matches!(
            PovmImplementation::new(povm, ops),
            Err(Error::ImplementationMismatch { index: 0, .. })
        ));
    }

    #[test]
    fn incomplete_povm_rejected() {
        let el = vec![HermitianMatrix::from_real_diagonal(&[1.0, 0.0])];
        assert!(matches!(Povm::new(vec!["a".into()], el), Err(Error::Incomplete(_))));
    }

    #[test]
    fn basis_mixture_is_w1() {
        let w1 = basis_mixture(&[ComplexMatrix::identity(2), hadamard()]).unwrap();
        assert_eq!(w1.len(), 4);
        assert!(w1.povm().completeness_residual() < 1e-15);
        let p = born_probabilities(&bb84_ensemble(), w1.povm()).unwrap();
        assert!((p.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((p.get(2, 0) - 0.25).abs() < 1e-15);
    }
}
