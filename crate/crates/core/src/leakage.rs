//! Maximal and gentle quantum leakage.
//!
//! Leakage of a measured ensemble is the Sibson mutual information of order
//! infinity of the induced channel `P[y|x] = tr(ρˣ F_y)`:
//! `log₂ Σ_y max_x P[y|x]`. Maximal quantum leakage is its supremum over all
//! POVMs; gentle leakage restricts the supremum to measurements that barely
//! disturb the encoding states, and is reported as an interval.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::{String, ToString};
use alloc::vec::Vec;


use crate::cloning::{self, CloningBoundResult};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::measurements::{
    self, born_probabilities, certify_gentle, difference_positive_part, epsilon_prime, gentle_povm,
    projective_povm, CertifyMode, ConditionalMatrix, GentlenessSpec, Povm,
};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::random::{gaussian_vector, stream_rng};
use crate::states::{CqEnsemble, DepolarizingParam};

/// Pairwise commutator norm below which an ensemble is treated as commuting.
pub const COMMUTING_TOL: f64 = 1e-9;
/// Ridge added to the frame operator before inverting its square root.
pub const FRAME_RIDGE: f64 = 1e-12;

/// How a [`LeakageEstimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    /// Closed form in the joint eigenbasis of a commuting ensemble.
    ExactCommuting,
    /// Best value found by the POVM optimizer; a lower bound on the supremum.
    OptimizerLower,
    /// Brute-force scan over qubit projective measurements.
    GridOracle,
    /// Closed-form expression.
    Analytic,
    /// Upper bound.
    UpperBound,
}

impl EstimateKind {
    /// Kebab-case name used in serialized output.
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateKind::ExactCommuting => "exact-commuting",
            EstimateKind::OptimizerLower => "optimizer-lower",
            EstimateKind::GridOracle => "grid-oracle",
            EstimateKind::Analytic => "analytic",
            EstimateKind::UpperBound => "upper-bound",
        }
    }
}

/// Budget of the multi-start simplex search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Independent starts.
    pub starts: usize,
    /// Objective evaluations per start.
    pub evals_per_start: usize,
    /// Base seed; start `k` uses ChaCha stream `k`.
    pub seed: u64,
    /// Simplex spread at which a start is declared converged.
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            evals_per_start: 2000,
            seed: 42,
            tol: 1e-9,
        }
    }
}

/// Bookkeeping attached to an estimate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimateMeta {
    /// Optimizer budget, when the optimizer ran.
    pub optimizer: Option<OptimizerConfig>,
    /// Total objective evaluations.
    pub evaluations: usize,
    /// Starts that met the convergence tolerance.
    pub converged_starts: usize,
    /// Every start exhausted its budget before converging.
    pub stagnated: bool,
    /// Grid resolution for oracle scans.
    pub grid_resolution: Option<usize>,
    /// Source of the winning measurement (`"candidate-basis"`, `"simplex start 3"`, ...).
    pub source: String,
}

/// A leakage value in bits with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageEstimate {
    /// Leakage in bits.
    pub bits: f64,
    /// Provenance.
    pub kind: EstimateKind,
    /// Measurement attaining `bits`, when one exists.
    pub achieving_povm: Option<Povm>,
    /// Run details.
    pub meta: EstimateMeta,
}

/// `log₂ Σ_y max_x P[y|x]`, clamped at zero against roundoff.
pub fn sibson_infinity(p: &ConditionalMatrix) -> f64 {
    let total: f64 = (0..p.outcomes())
        .map(|y| p.row(y).iter().copied().fold(0.0, f64::max))
        .sum();
    total.log2().max(0.0)
}

/// `Σ_y max_x tr(ρˣ F_y)` for a POVM.
pub fn guessing_sum(e: &CqEnsemble, f: &Povm) -> Result<f64> {
    let p = born_probabilities(e, f)?;
    Ok((0..p.outcomes())
        .map(|y| p.row(y).iter().copied().fold(0.0, f64::max))
        .sum())
}

/// Leakage `I_∞(X;Y)` of the ensemble measured with `f`.
pub fn povm_leakage(e: &CqEnsemble, f: &Povm) -> Result<f64> {
    Ok(sibson_infinity(&born_probabilities(e, f)?))
}

/// `min(log₂|𝕏|, 2 log₂ d)`.
pub fn leakage_upper_bound(e: &CqEnsemble) -> f64 {
    (e.len() as f64).log2().min(2.0 * (e.dim() as f64).log2())
}

/// Leakage after global depolarizing: `log₂(p + (1 − p) 2^{bits})`.
pub fn depolarized_leakage(base_bits: f64, p: DepolarizingParam) -> f64 {
    let p = p.value();
    (p + (1.0 - p) * base_bits.exp2()).log2().max(0.0)
}

fn clamp_bits(bits: f64, e: &CqEnsemble) -> f64 {
    bits.max(0.0).min(leakage_upper_bound(e))
}

fn all_identical(e: &CqEnsemble) -> bool {
    let first = e.states()[0].matrix().as_matrix();
    e.states()
        .iter()
        .all(|s| s.matrix().as_matrix().max_abs_diff(first) <= 1e-12)
}

/// Maximal quantum leakage `sup_F log₂ Σ_y max_x tr(ρˣF_y)`.
///
/// Identical-state ensembles give exactly zero. Commuting ensembles are solved
/// exactly in their joint eigenbasis. Otherwise projective candidates (the
/// computational basis and eigenbases of every state and pairwise difference)
/// are compared with a multi-start simplex search over rank-one POVMs
/// `F_y = G^{-1/2} v_y v_y† G^{-1/2}`, `G = Σ v_y v_y†`, with `d²` outcomes.
pub fn maximal_quantum_leakage(e: &CqEnsemble, cfg: &OptimizerConfig) -> Result<LeakageEstimate> {
    let d = e.dim();
    if all_identical(e) {
        return Ok(LeakageEstimate {
            bits: 0.0,
            kind: EstimateKind::ExactCommuting,
            achieving_povm: Some(measurements::identity_measurement(d).povm().clone()),
            meta: EstimateMeta {
                source: "identical-states".to_string(),
                ..Default::default()
            },
        });
    }
    if e.max_commutator_norm() <= COMMUTING_TOL {
        if let Some(est) = commuting_leakage(e)? {
            return Ok(est);
        }
    }

    let mut best_sum = f64::NEG_INFINITY;
    let mut best_povm: Option<Povm> = None;
    let mut source = String::new();
    for basis in candidate_bases(e)? {
        let povm = projective_povm(&basis)?.povm().clone();
        let s = guessing_sum(e, &povm)?;
        if s > best_sum {
            best_sum = s;
            best_povm = Some(povm);
            source = "candidate-basis".to_string();
        }
    }

    let outcomes = d * d;
    let n_params = 2 * d * outcomes;
    let opts = SimplexOptions {
        max_evals: cfg.evals_per_start,
        tol: cfg.tol,
        initial_step: 0.5,
    };
    let mut evaluations = 0;
    let mut converged_starts = 0;
    for start in 0..cfg.starts {
        let mut rng = stream_rng(cfg.seed, start as u64);
        let x0: Vec<f64> = gaussian_vector(n_params / 2, &mut rng)
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect();
        let mut objective = |x: &[f64]| -> f64 {
            match frame_vectors(x, d, outcomes) {
                Some(w) => -vector_guessing_sum(e, &w),
                None => f64::INFINITY,
            }
        };
        let r = nelder_mead(&mut objective, &x0, opts);
        evaluations += r.evals;
        converged_starts += usize::from(r.converged);
        if -r.f > best_sum + 1e-15 {
            if let Some(povm) = frame_povm(&r.x, d, outcomes) {
                let s = guessing_sum(e, &povm)?;
                if s > best_sum {
                    best_sum = s;
                    best_povm = Some(povm);
                    source = alloc::format!("simplex start {start}");
                }
            }
        }
    }

    Ok(LeakageEstimate {
        bits: clamp_bits(best_sum.log2(), e),
        kind: EstimateKind::OptimizerLower,
        achieving_povm: best_povm,
        meta: EstimateMeta {
            optimizer: Some(*cfg),
            evaluations,
            converged_starts,
            stagnated: cfg.starts > 0 && converged_starts == 0,
            grid_resolution: None,
            source,
        },
    })
}

fn commuting_leakage(e: &CqEnsemble) -> Result<Option<LeakageEstimate>> {
    let d = e.dim();
    // generic combination; its eigenbasis diagonalizes every state unless
    // two joint eigenvalues collide, which is checked below
    let mut mix = HermitianMatrix::from_real_diagonal(&alloc::vec![0.0; d]);
    for (i, s) in e.states().iter().enumerate() {
        let w = 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract();
        mix = mix.add(&s.matrix().scale(w));
    }
    let v = mix.eig()?.vectors;
    let vdag = v.adjoint();
    let mut sum = 0.0;
    let mut diagonals = Vec::with_capacity(e.len());
    for s in e.states() {
        let rotated = &(&vdag * s.matrix().as_matrix()) * &v;
        let diag = ComplexMatrix::from_fn(d, |r, c| if r == c { rotated[(r, c)] } else { C64::new(0.0, 0.0) });
        if rotated.max_abs_diff(&diag) > 1e-8 {
            return Ok(None);
        }
        diagonals.push((0..d).map(|i| rotated[(i, i)].re).collect::<Vec<f64>>());
    }
    for i in 0..d {
        sum += diagonals.iter().map(|dg| dg[i]).fold(0.0, f64::max);
    }
    let povm = projective_povm(&v)?.povm().clone();
    Ok(Some(LeakageEstimate {
        bits: clamp_bits(sum.log2(), e),
        kind: EstimateKind::ExactCommuting,
        achieving_povm: Some(povm),
        meta: EstimateMeta {
            source: "joint-eigenbasis".to_string(),
            ..Default::default()
        },
    }))
}

fn candidate_bases(e: &CqEnsemble) -> Result<Vec<ComplexMatrix>> {
    let mut out = alloc::vec![ComplexMatrix::identity(e.dim())];
    for s in e.states() {
        out.push(s.matrix().eig()?.vectors);
    }
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let diff = e.states()[i].matrix().sub(e.states()[j].matrix());
            out.push(diff.eig()?.vectors);
        }
    }
    Ok(out)
}

/// Maps `2·d·m` reals to `m` vectors `w_y = G^{-1/2} v_y` with `Σ w_y w_y† ≈ I`.
fn frame_vectors(x: &[f64], d: usize, m: usize) -> Option<Vec<Vec<C64>>> {
    let vs: Vec<Vec<C64>> = x
        .chunks(2 * d)
        .take(m)
        .map(|c| c.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
        .collect();
    let mut g = ComplexMatrix::identity(d).scale_real(FRAME_RIDGE);
    for v in &vs {
        g = &g + &ComplexMatrix::outer(v);
    }
    let g = HermitianMatrix::new(g).ok()?;
    let inv_sqrt = g.map_spectrum(|l| 1.0 / l.max(FRAME_RIDGE).sqrt()).ok()?;
    Some(vs.iter().map(|v| inv_sqrt.as_matrix().mul_vec(v)).collect())
}

fn vector_guessing_sum(e: &CqEnsemble, w: &[Vec<C64>]) -> f64 {
    w.iter()
        .map(|wy| {
            e.states()
                .iter()
                .map(|s| s.matrix().expectation(wy))
                .fold(0.0, f64::max)
        })
        .sum()
}

/// The POVM for a parameter vector; a completion element `I − Σ F_y` is
/// appended when the ridge leaves the frame visibly incomplete.
fn frame_povm(x: &[f64], d: usize, m: usize) -> Option<Povm> {
    let w = frame_vectors(x, d, m)?;
    let mut elements: Vec<HermitianMatrix> = w.iter().map(|v| HermitianMatrix::projector(v)).collect();
    let mut labels: Vec<String> = (0..m).map(|y| alloc::format!("{y}")).collect();
    if let Ok(p) = Povm::new(labels.clone(), elements.clone()) {
        return Some(p);
    }
    let mut acc = HermitianMatrix::from_real_diagonal(&alloc::vec![0.0; d]);
    for f in &elements {
        acc = acc.add(f);
    }
    elements.push(HermitianMatrix::identity(d).sub(&acc));
    labels.push("rest".to_string());
    Povm::new(labels, elements).ok()
}

/// Qubit projective measurement along Bloch direction `(θ, φ)`.
pub fn qubit_projective(theta: f64, phi: f64) -> Result<Povm> {
    let (s, c) = (0.5 * theta).sin_cos();
    let up = [C64::new(c, 0.0), C64::from_polar(s, phi)];
    let down = [C64::from_polar(s, 0.0) * -1.0, C64::from_polar(c, phi)];
    let u = ComplexMatrix::from_fn(2, |r, col| if col == 0 { up[r] } else { down[r] });
    Ok(projective_povm(&u)?.povm().clone())
}

fn bloch_vector(m: &HermitianMatrix) -> [f64; 3] {
    let a = m.as_matrix();
    [2.0 * a[(0, 1)].re, -2.0 * a[(0, 1)].im, a[(0, 0)].re - a[(1, 1)].re]
}

/// Brute-force maximal leakage over qubit projective measurements.
///
/// Scans Bloch directions on a `resolution × 2·resolution` grid in `(θ, φ)`,
/// plus the Z, X and Y axes exactly, then zooms in around the best grid
/// directions with successively finer local grids. Works on Bloch vectors
/// (`tr(ρ Π_n) = (1 + r·n)/2`), independently of the matrix code the
/// optimizer uses. Projective measurements need not be optimal for arbitrary
/// qubit ensembles, so this is a lower reference, not a certificate.
pub fn mql_grid_oracle_d2(e: &CqEnsemble, resolution: usize) -> Result<LeakageEstimate> {
    if e.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            required: 2,
            found: e.dim(),
        });
    }
    if resolution < 2 {
        return Err(Error::OutOfRange {
            name: "resolution",
            value: resolution as f64,
        });
    }
    let bloch: Vec<[f64; 3]> = e.states().iter().map(|s| bloch_vector(s.matrix())).collect();
    let value = |theta: f64, phi: f64| -> f64 {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for r in &bloch {
            let dot = r[0] * n[0] + r[1] * n[1] + r[2] * n[2];
            hi = hi.max(dot);
            lo = lo.min(dot);
        }
        // max_x (1 + r·n)/2 + max_x (1 − r·n)/2
        1.0 + 0.5 * (hi - lo)
    };

    let half_pi = core::f64::consts::FRAC_PI_2;
    let pi = core::f64::consts::PI;
    let mut points: Vec<(f64, f64, f64)> = [(0.0, 0.0), (half_pi, 0.0), (half_pi, half_pi)]
        .iter()
        .map(|&(t, p)| (value(t, p), t, p))
        .collect();
    let d_theta = pi / (resolution - 1) as f64;
    let d_phi = 2.0 * pi / (2 * resolution) as f64;
    let keep = 8;
    let mut top: Vec<(f64, f64, f64)> = Vec::with_capacity(keep + 1);
    for i in 0..resolution {
        let theta = d_theta * i as f64;
        for j in 0..2 * resolution {
            let phi = d_phi * j as f64;
            let v = value(theta, phi);
            if top.len() < keep || v > top[top.len() - 1].0 {
                let pos = top.iter().position(|t| v > t.0).unwrap_or(top.len());
                top.insert(pos, (v, theta, phi));
                top.truncate(keep);
            }
        }
    }
    for &(_, t0, p0) in &top {
        let (mut t, mut p) = (t0, p0);
        let (mut ht, mut hp) = (d_theta, d_phi);
        let mut best = value(t, p);
        for _ in 0..40 {
            let (mut bt, mut bp) = (t, p);
            for a in -4i32..=4 {
                for b in -4i32..=4 {
                    let tt = t + ht * a as f64 / 4.0;
                    let pp = p + hp * b as f64 / 4.0;
                    let v = value(tt, pp);
                    if v > best {
                        best = v;
                        bt = tt;
                        bp = pp;
                    }
                }
            }
            t = bt;
            p = bp;
            ht *= 0.5;
            hp *= 0.5;
        }
        points.push((best, t, p));
    }
    points.extend(top);
    let (best, theta, phi) = points
        .into_iter()
        .fold((f64::NEG_INFINITY, 0.0, 0.0), |acc, pt| if pt.0 > acc.0 { pt } else { acc });

    let bits = if all_identical(e) { 0.0 } else { clamp_bits(best.log2(), e) };
    Ok(LeakageEstimate {
        bits,
        kind: EstimateKind::GridOracle,
        achieving_povm: Some(qubit_projective(theta, phi)?),
        meta: EstimateMeta {
            grid_resolution: Some(resolution),
            source: alloc::format!("theta={theta}, phi={phi}"),
            ..Default::default()
        },
    })
}

/// Which lower bound won in a [`GentleLeakageInterval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerWitness {
    /// Asymmetric-cloning bound.
    CloningBound,
    /// Best certified gentle measurement found by search.
    GentlePovmSearch,
}

impl LowerWitness {
    /// Kebab-case name used in serialized output.
    pub fn as_str(self) -> &'static str {
        match self {
            LowerWitness::CloningBound => "cloning-bound",
            LowerWitness::GentlePovmSearch => "gentle-povm-search",
        }
    }
}

/// Interval `[lower, upper]` containing the weakly gentle leakage at `(α, δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GentleLeakageInterval {
    /// Lower bound in bits.
    pub lower_bits: f64,
    /// Upper bound in bits (maximal leakage estimate).
    pub upper_bits: f64,
    /// Which lower bound attained `lower_bits`.
    pub lower_witness: LowerWitness,
    /// Parameters.
    pub spec: GentlenessSpec,
    /// Cloning bound details.
    pub cloning: CloningBoundResult,
    /// Best leakage of a certified gentle measurement.
    pub search_bits: f64,
    /// That measurement.
    pub search_povm: Option<Povm>,
    /// Maximal leakage estimate used as the upper end.
    pub maximal: LeakageEstimate,
}

/// Brackets the `(α, δ)`-weakly gentle leakage.
///
/// The upper end is the maximal leakage estimate. The lower end is the larger
/// of the cloning bound and the best certified gentle measurement among: the
/// maximal-leakage POVM with its square-root implementation, and the
/// three-outcome construction on every pairwise positive part `L₊` at the
/// largest certified `ε`.
pub fn gentle_leakage_interval(
    e: &CqEnsemble,
    spec: GentlenessSpec,
    cfg: &OptimizerConfig,
    mode: CertifyMode,
) -> Result<GentleLeakageInterval> {
    let maximal = maximal_quantum_leakage(e, cfg)?;
    let cloning = cloning::lower_bound_solve(e, spec.alpha(), maximal.bits)?;

    let mut search_bits = 0.0;
    let mut search_povm = None;
    if let Some(povm) = &maximal.achieving_povm {
        let imp = povm.canonical_implementation()?;
        if certify_gentle(e, &imp, spec, mode)?.certified {
            search_bits = povm_leakage(e, povm)?;
            search_povm = Some(povm.clone());
        }
    }
    for i in 0..e.len() {
        for j in 0..e.len() {
            if i == j {
                continue;
            }
            let m = difference_positive_part(&e.states()[i], &e.states()[j])?;
            if m.as_matrix().max_abs() <= 1e-12 {
                continue;
            }
            let eps = epsilon_prime(&m, spec, e, mode)?.bisection;
            if eps <= 0.0 {
                continue;
            }
            let g = gentle_povm(&m, eps)?;
            if !certify_gentle(e, &g.implementation, spec, mode)?.certified {
                continue;
            }
            let bits = povm_leakage(e, g.implementation.povm())?;
            if bits > search_bits {
                search_bits = bits;
                search_povm = Some(g.implementation.povm().clone());
            }
        }
    }

    let cloning_bits = if cloning.feasible { cloning.lower_bits } else { 0.0 };
    let (lower_bits, lower_witness) = if search_bits > cloning_bits {
        (search_bits, LowerWitness::GentlePovmSearch)
    } else {
        (cloning_bits, LowerWitness::CloningBound)
    };
    // the search POVM is itself a witness for Q
    let upper_bits = maximal.bits.max(search_bits);
    Ok(GentleLeakageInterval {
        lower_bits,
        upper_bits,
        lower_witness,
        spec,
        cloning,
        search_bits,
        search_povm,
        maximal,
    })
}
