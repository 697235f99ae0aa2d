//! Asymmetric approximate cloning and the gentle-leakage lower bound built on it.
//!
//! A `1 → 2` cloner whose marginals are global depolarizing channels with
//! strengths `(p₁, p₂)` lets an eavesdropper forward copy 1 (disturbance
//! `p₁ ‖I/d − ρˣ‖_tr`) and measure copy 2 (leakage
//! `log₂(p₂ + (1 − p₂) 2^Q)`). Minimizing `p₂` subject to the disturbance
//! budget and the feasibility region gives a lower bound on gentle leakage.
//!
//! Two printed forms of the region exist: a square-root form and a quadratic
//! form. The quadratic form is the one the solver uses; the square-root form
//! is evaluated where it is real and compared against it diagnostically.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{CqEnsemble, DensityOperator};

/// Points on the coarse `p₁` grid of [`lower_bound_solve`].
pub const P1_GRID_POINTS: usize = 256;
/// Golden-section iterations after the coarse grid.
pub const GOLDEN_ITERATIONS: usize = 100;
/// A state closer than this to `I/d` imposes no disturbance cap.
pub const MIXED_STATE_TOL: f64 = 1e-12;
/// Feasibility slack for the quadratic form.
pub const QUADRATIC_TOL: f64 = 1e-12;

/// Depolarizing strengths `(p₁, p₂)` of the two clones, in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloningPoint {
    p1: f64,
    p2: f64,
    d: usize,
}

impl CloningPoint {
    /// Validates `p₁, p₂ ∈ [0, 1]` and `d ≥ 2`.
    pub fn new(p1: f64, p2: f64, d: usize) -> Result<Self> {
        for (name, value) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        if d < 2 {
            return Err(Error::OutOfRange {
                name: "d",
                value: d as f64,
            });
        }
        Ok(Self { p1, p2, d })
    }

    /// Strength on the forwarded copy.
    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Strength on the eavesdropper's copy.
    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Dimension.
    pub fn d(&self) -> usize {
        self.d
    }
}

/// Evaluation of the square-root form of the region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtFormEval {
    /// Discriminant `d²(p₁−p₂)² − 4(1−p₁)(1−p₂)` is non-negative (within `1e-12`).
    pub defined: bool,
    /// Inequality holds (only meaningful when `defined`).
    pub satisfied: bool,
    /// `LHS − (d² − 1)`; NaN when undefined.
    pub lhs_minus_rhs: f64,
    /// The discriminant itself.
    pub discriminant: f64,
}

/// `(d/2)(d(2−p₁−p₂) + √(d²(p₁−p₂)² − 4(1−p₁)(1−p₂))) − (2−p₁−p₂) ≤ d² − 1`.
pub fn region_sqrt_form(pt: CloningPoint) -> SqrtFormEval {
    let d = pt.d as f64;
    let (p1, p2) = (pt.p1, pt.p2);
    let disc = d * d * (p1 - p2) * (p1 - p2) - 4.0 * (1.0 - p1) * (1.0 - p2);
    if disc < -1e-12 {
        return SqrtFormEval {
            defined: false,
            satisfied: false,
            lhs_minus_rhs: f64::NAN,
            discriminant: disc,
        };
    }
    let s = 2.0 - p1 - p2;
    let lhs = 0.5 * d * (d * s + disc.max(0.0).sqrt()) - s;
    let diff = lhs - (d * d - 1.0);
    SqrtFormEval {
        defined: true,
        satisfied: diff <= 1e-12,
        lhs_minus_rhs: diff,
        discriminant: disc,
    }
}

/// Coefficients of `q(p₁,p₂) = a(p₁² + p₂²) + 2b p₁p₂ + c(p₁ + p₂) + 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm {
    /// `2d² − 1 − d⁴/4`.
    pub a: f64,
    /// `1 − d⁴/4`.
    pub b: f64,
    /// `−2 − d²`.
    pub c: f64,
}

impl QuadraticForm {
    /// Coefficients for dimension `d`.
    pub fn for_dim(d: usize) -> Self {
        let d2 = (d * d) as f64;
        let d4 = d2 * d2;
        Self {
            a: 2.0 * d2 - 1.0 - d4 / 4.0,
            b: 1.0 - d4 / 4.0,
            c: -2.0 - d2,
        }
    }

    /// `q(p₁, p₂)`.
    pub fn eval(&self, p1: f64, p2: f64) -> f64 {
        self.a * (p1 * p1 + p2 * p2) + 2.0 * self.b * p1 * p2 + self.c * (p1 + p2) + 3.0
    }

    /// Smallest `p₂ ∈ [0, 1]` with `q(p₁, p₂) ≤ 0`, if any.
    pub fn min_feasible_p2(&self, p1: f64) -> Option<f64> {
        if self.eval(p1, 0.0) <= QUADRATIC_TOL {
            return Some(0.0);
        }
        // q as a polynomial in p₂: A p₂² + B p₂ + C with C = q(p₁, 0) > 0,
        // so the first feasible p₂ is the smallest root in (0, 1]
        let qa = self.a;
        let qb = 2.0 * self.b * p1 + self.c;
        let qc = self.a * p1 * p1 + self.c * p1 + 3.0;
        let mut roots: Vec<f64> = Vec::with_capacity(2);
        if qa.abs() < 1e-300 {
            if qb != 0.0 {
                roots.push(-qc / qb);
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            // numerically stable pair
            let t = -0.5 * (qb + qb.signum() * sq);
            if t != 0.0 {
                roots.push(t / qa);
                roots.push(qc / t);
            } else {
                roots.push(0.0);
            }
        }
        roots
            .into_iter()
            .filter(|r| (-1e-12..=1.0 + 1e-12).contains(r))
            .map(|r| r.clamp(0.0, 1.0))
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
    }
}

/// Evaluation of the quadratic form of the region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFormEval {
    /// `q(p₁, p₂) ≤ 1e-12`.
    pub satisfied: bool,
    /// `q(p₁, p₂)`; feasible when non-positive.
    pub slack: f64,
}

/// Evaluates the quadratic feasibility constraint at a point.
pub fn region_quadratic_form(pt: CloningPoint) -> QuadraticFormEval {
    let q = QuadraticForm::for_dim(pt.d).eval(pt.p1, pt.p2);
    QuadraticFormEval {
        satisfied: q <= QUADRATIC_TOL,
        slack: q,
    }
}

/// Constraint slacks of a [`CloningBoundResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct CloningDiagnostics {
    /// `q(p₁*, p₂*)`; non-positive up to roundoff when feasible.
    pub quadratic_slack: f64,
    /// `min_x α/‖I/d − ρˣ‖_tr` before clipping to `[0, 1]`; infinite if all states are maximally mixed.
    pub p1_cap_raw: f64,
    /// Cap actually used.
    pub p1_cap: f64,
    /// Per-state caps `α/‖I/d − ρˣ‖_tr`.
    pub per_state_caps: Vec<f64>,
    /// Square-root form at the optimum.
    pub sqrt_form: Option<SqrtFormEval>,
    /// `d = 2`, where the program is convex and the grid search is exact.
    pub convex: bool,
}

/// Solution of the cloning lower-bound program.
#[derive(Debug, Clone, PartialEq)]
pub struct CloningBoundResult {
    /// Optimal forwarded-copy strength.
    pub p1_star: f64,
    /// Optimal eavesdropper-copy strength (minimized).
    pub p2_star: f64,
    /// `log₂(p₂* + (1 − p₂*) 2^Q)`, or 0 when infeasible.
    pub lower_bits: f64,
    /// Whether any point satisfied every constraint.
    pub feasible: bool,
    /// Slacks and caps.
    pub diagnostics: CloningDiagnostics,
}

/// Minimizes `p₂` over `p₁ ∈ [0, cap]` subject to the quadratic region, then
/// converts `p₂*` to bits using the maximal leakage `q_bits`.
///
/// `p₁` is searched on a 256-point grid followed by golden-section refinement
/// of the bracketing cells. Ties prefer the smaller `p₁`.
pub fn lower_bound_solve(e: &CqEnsemble, alpha: f64, q_bits: f64) -> Result<CloningBoundResult> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
        });
    }
    if !(q_bits >= 0.0) || !q_bits.is_finite() {
        return Err(Error::OutOfRange {
            name: "q_bits",
            value: q_bits,
        });
    }
    let d = e.dim().max(2);
    let mixed = DensityOperator::maximally_mixed(e.dim());
    let mut per_state_caps = Vec::with_capacity(e.len());
    for s in e.states() {
        let dist = linalg::trace_distance(mixed.matrix(), s.matrix())?;
        per_state_caps.push(if dist <= MIXED_STATE_TOL {
            f64::INFINITY
        } else {
            alpha / dist
        });
    }
    let p1_cap_raw = per_state_caps.iter().copied().fold(f64::INFINITY, f64::min);
    let p1_cap = p1_cap_raw.clamp(0.0, 1.0);

    let form = QuadraticForm::for_dim(d);
    let g = |p1: f64| form.min_feasible_p2(p1).unwrap_or(f64::INFINITY);
    let better = |a: (f64, f64), b: (f64, f64)| b.1 < a.1 || (b.1 == a.1 && b.0 < a.0);

    let n = if p1_cap > 0.0 { P1_GRID_POINTS } else { 1 };
    let grid: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let p1 = if n == 1 { 0.0 } else { p1_cap * i as f64 / (n - 1) as f64 };
            (p1, g(p1))
        })
        .collect();
    let (best_i, mut best) = grid
        .iter()
        .copied()
        .enumerate()
        .fold((0, (0.0, f64::INFINITY)), |acc, (i, pt)| if better(acc.1, pt) { (i, pt) } else { acc });

    if n > 1 && best.1.is_finite() {
        let lo_i = best_i.saturating_sub(1);
        let hi_i = (best_i + 1).min(n - 1);
        let (mut a, mut b) = (grid[lo_i].0, grid[hi_i].0);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let (mut f1, mut f2) = (g(x1), g(x2));
        for _ in 0..GOLDEN_ITERATIONS {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = g(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = g(x2);
            }
        }
        for cand in [(x1, f1), (x2, f2)] {
            if better(best, cand) {
                best = cand;
            }
        }
    }

    let (p1_star, p2_star) = best;
    let feasible = p2_star.is_finite();
    let lower_bits = if !feasible {
        0.0
    } else if p2_star == 0.0 {
        q_bits
    } else {
        (p2_star + (1.0 - p2_star) * q_bits.exp2()).log2().clamp(0.0, q_bits)
    };
    let diagnostics = CloningDiagnostics {
        quadratic_slack: if feasible { form.eval(p1_star, p2_star) } else { f64::NAN },
        p1_cap_raw,
        p1_cap,
        per_state_caps,
        sqrt_form: if feasible {
            CloningPoint::new(p1_star, p2_star, d).ok().map(region_sqrt_form)
        } else {
            None
        },
        convex: d == 2,
    };
    Ok(CloningBoundResult {
        p1_star: if feasible { p1_star } else { f64::NAN },
        p2_star: if feasible { p2_star } else { f64::NAN },
        lower_bits,
        feasible,
        diagnostics,
    })
}

/// One row of [`bound_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Disturbance budget.
    pub alpha: f64,
    /// Optimal `p₁`.
    pub p1: f64,
    /// Optimal `p₂`.
    pub p2: f64,
    /// Lower bound in bits.
    pub lower_bits: f64,
}

/// [`lower_bound_solve`] over a list of `α` values.
pub fn bound_sweep(e: &CqEnsemble, alphas: &[f64], q_bits: f64) -> Result<Vec<SweepRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            let r = lower_bound_solve(e, alpha, q_bits)?;
            Ok(SweepRow {
                alpha,
                p1: r.p1_star,
                p2: r.p2_star,
                lower_bits: r.lower_bits,
            })
        })
        .collect()
}

/// `n` evenly spaced values from 0 to 1 inclusive.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Counts of how the two region forms classify a grid of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionComparison {
    /// Points examined.
    pub points: usize,
    /// Square-root form undefined (negative discriminant).
    pub sqrt_undefined: usize,
    /// Both forms feasible.
    pub both_feasible: usize,
    /// Both forms infeasible.
    pub both_infeasible: usize,
    /// Only the square-root form feasible.
    pub sqrt_only: usize,
    /// Only the quadratic form feasible.
    pub quadratic_only: usize,
}

impl RegionComparison {
    /// Points where the forms disagree (among those where both are defined).
    pub fn disagreements(&self) -> usize {
        self.sqrt_only + self.quadratic_only
    }
}

/// Classifies an `n × n` grid over `[0, 1]²` with both region forms.
pub fn compare_region_forms(d: usize, n: usize) -> Result<RegionComparison> {
    let mut out = RegionComparison::default();
    let grid = unit_grid(n);
    for &p1 in &grid {
        for &p2 in &grid {
            let pt = CloningPoint::new(p1, p2, d)?;
            out.points += 1;
            let s = region_sqrt_form(pt);
            let q = region_quadratic_form(pt);
            if !s.defined {
                out.sqrt_undefined += 1;
                continue;
            }
            match (s.satisfied, q.satisfied) {
                (true, true) => out.both_feasible += 1,
                (false, false) => out.both_infeasible += 1,
                (true, false) => out.sqrt_only += 1,
                (false, true) => out.quadratic_only += 1,
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::bb84_ensemble;
    use alloc::vec;

    fn pt(p1: f64, p2: f64) -> CloningPoint {
        CloningPoint::new(p1, p2, 2).unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(CloningPoint::new(1.1, 0.0, 2).is_err());
        assert!(CloningPoint::new(0.0, -0.1, 2).is_err());
        assert!(CloningPoint::new(0.0, 0.0, 1).is_err());
    }

    #[test]
    fn sqrt_form_examples() {
        let s = region_sqrt_form(pt(1.0, 1.0));
        assert!(s.defined && s.satisfied);
        assert_eq!(s.discriminant, 0.0);
        assert_eq!(s.lhs_minus_rhs, -3.0);
        let s = region_sqrt_form(pt(1.0, 0.0));
        assert_eq!(s.discriminant, 4.0);
        assert!(s.defined && s.satisfied);
        assert_eq!(s.lhs_minus_rhs, 0.0);
        for p in [0.0, 0.3, 0.9] {
            let s = region_sqrt_form(pt(p, p));
            assert!(!s.defined);
            assert!((s.discriminant + 4.0 * (1.0 - p) * (1.0 - p)).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let f = QuadraticForm::for_dim(2);
        assert_eq!((f.a, f.b, f.c), (3.0, -3.0, -6.0));
        let q = region_quadratic_form(pt(1.0, 1.0));
        assert_eq!(q.slack, -9.0);
        assert!(q.satisfied);
        // symmetric line reduces to 3 − 12p
        for p in [0.0, 0.1, 0.25, 0.5, 1.0] {
            assert!((f.eval(p, p) - (3.0 - 12.0 * p)).abs() < 1e-14);
        }
        assert!(!region_quadratic_form(pt(0.2499, 0.2499)).satisfied);
        assert!(region_quadratic_form(pt(0.25, 0.25)).satisfied);
        let root = (2.4 - 3.2f64.sqrt()) / 2.0;
        assert!((root - 0.305573).abs() < 1e-6);
        assert!(f.eval(0.2, root).abs() < 1e-14);
        assert!((f.min_feasible_p2(0.2).unwrap() - root).abs() < 1e-14);
    }

    #[test]
    fn bb84_alpha_point_one() {
        let r = lower_bound_solve(&bb84_ensemble(), 0.1, 1.0).unwrap();
        assert!(r.feasible);
        assert!((r.diagnostics.p1_cap - 0.2).abs() < 1e-15);
        assert!((r.p1_star - 0.2).abs() < 1e-12);
        let p2 = (2.4 - 3.2f64.sqrt()) / 2.0;
        assert!((r.p2_star - p2).abs() < 1e-12);
        assert!((r.lower_bits - (2.0 - p2).log2()).abs() < 1e-12);
        assert!((r.lower_bits - 0.7608).abs() < 5e-5);
        assert!(r.diagnostics.quadratic_slack.abs() < 1e-9);
        // the optimum sits where the square-root form is undefined
        assert!(!r.diagnostics.sqrt_form.unwrap().defined);
    }

    #[test]
    fn bb84_alpha_extremes() {
        let e = bb84_ensemble();
        let r0 = lower_bound_solve(&e, 0.0, 1.0).unwrap();
        assert_eq!(r0.p1_star, 0.0);
        assert!((r0.p2_star - 1.0).abs() < 1e-12);
        assert!(r0.lower_bits.abs() < 1e-12);
        for alpha in [0.5, 0.75, 1.0] {
            let r = lower_bound_solve(&e, alpha, 1.0).unwrap();
            assert_eq!(r.p2_star, 0.0);
            assert_eq!(r.lower_bits, 1.0);
        }
    }

    #[test]
    fn maximally_mixed_state_has_no_cap() {
        let e = CqEnsemble::new(vec!["m".into()], vec![1.0], vec![DensityOperator::maximally_mixed(2)]).unwrap();
        let r = lower_bound_solve(&e, 0.0, 0.0).unwrap();
        assert!(r.diagnostics.p1_cap_raw.is_infinite());
        assert_eq!(r.diagnostics.p1_cap, 1.0);
        assert_eq!(r.lower_bits, 0.0);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(lower_bound_solve(&bb84_ensemble(), 1.5, 1.0).is_err());
        assert!(lower_bound_solve(&bb84_ensemble(), 0.5, f64::NAN).is_err());
    }

    #[test]
    fn sweep_rows() {
        let rows = bound_sweep(&bb84_ensemble(), &[0.0, 0.1, 0.5, 1.0], 1.0).unwrap();
        let expect = [(0.0, 1.0, 0.0), (0.1, 0.3056, 0.7608), (0.5, 0.0, 1.0), (1.0, 0.0, 1.0)];
        for (r, (a, p2, bits)) in rows.iter().zip(expect) {
            assert_eq!(r.alpha, a);
            assert!((r.p2 - p2).abs() < 1e-4, "{r:?}");
            assert!((r.lower_bits - bits).abs() < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn higher_dimension_runs() {
        let f = QuadraticForm::for_dim(3);
        assert!(f.a < 0.0);
        // concave in p₂: still returns the first feasible p₂
        let p2 = f.min_feasible_p2(0.0).unwrap();
        assert!(f.eval(0.0, p2).abs() < 1e-9);
        assert!(f.eval(0.0, p2 * 0.99) > 0.0);
    }

    #[test]
    fn region_comparison_counts() {
        let c = compare_region_forms(2, 200).unwrap();
        assert_eq!(c.points, 40_000);
        assert_eq!(
            c.sqrt_undefined + c.both_feasible + c.both_infeasible + c.sqrt_only + c.quadratic_only,
            c.points
        );
        assert!(c.sqrt_undefined > 0);
    }
}
