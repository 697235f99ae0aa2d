//! Random matrices and ensembles for property checks and optimizer starts.
//!
//! Unitaries come from Gram–Schmidt orthonormalization of a matrix of standard
//! complex Gaussians, which yields Haar-distributed samples.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::states::{CqEnsemble, DensityOperator};

/// Deterministic RNG for stream `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (real and imaginary parts each `N(0, 1)`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Gaussian vector of length `n`.
pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-random `d×d` unitary.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let cols: Vec<Vec<C64>> = (0..d).map(|_| gaussian_vector(d, rng)).collect();
        if let Some(q) = orthonormalize(&cols) {
            return ComplexMatrix::from_fn(d, |r, c| q[c][r]);
        }
    }
}

/// Modified Gram–Schmidt; `None` when the columns are numerically dependent.
fn orthonormalize(cols: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(cols.len());
    for col in cols {
        let mut v = col.clone();
        for q in &out {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        out.push(v);
    }
    Some(out)
}

/// Random Hermitian matrix `(G + G†)/2` with Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| complex_gaussian(rng));
    HermitianMatrix::symmetrized((&g + &g.adjoint()).scale_real(0.5))
}

/// Random density operator `G G† / tr(G G†)` with `G` of shape `d×rank`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let mut acc = ComplexMatrix::zeros(d);
    for _ in 0..rank.max(1) {
        acc = &acc + &ComplexMatrix::outer(&gaussian_vector(d, rng));
    }
    let tr = acc.trace().re;
    DensityOperator::from_hermitian_unchecked(HermitianMatrix::symmetrized(acc.scale_real(1.0 / tr)))
}

/// Random operator with `0 ⪯ M ⪯ I`: Haar eigenbasis, eigenvalues uniform in `[0, 1]`.
pub fn random_contraction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    let u = random_unitary(d, rng);
    let diag: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    HermitianMatrix::from_real_diagonal(&diag).conjugate_by(&u)
}

/// Random ensemble of `n` states in dimension `d` with Dirichlet-like weights.
pub fn random_ensemble<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> CqEnsemble {
    let weights: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let states: Vec<DensityOperator> = (0..n)
        .map(|_| {
            let rank = rng.random_range(1..=d);
            random_density(d, rank, rng)
        })
        .collect();
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    CqEnsemble::new(labels, probs, states).expect("random ensemble is valid")
}
