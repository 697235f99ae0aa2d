//! Information leakage from classical-quantum encodings to eavesdroppers that
//! must stay undetected.
//!
//! The crate is `no_std` (with `alloc`) and covers:
//!
//! - [`linalg`]: small dense complex matrices, Hermitian eigendecomposition
//!   by complex Jacobi rotations, trace distance, PSD square roots.
//! - [`states`]: density operators, classical-quantum ensembles, unitary and
//!   global depolarizing channels.
//! - [`measurements`]: POVMs and their implementations, post-measurement
//!   states, `(α, δ)`-gentleness certification and the three-outcome gentle
//!   POVM built from an operator `0 ⪯ M ⪯ I`.
//! - [`leakage`]: Sibson mutual information of order infinity, maximal
//!   quantum leakage (exact for commuting ensembles, optimized otherwise,
//!   brute-force grid for qubits), and gentle-leakage interval estimates.
//! - [`cloning`]: the asymmetric approximate-cloning feasibility region and
//!   the lower bound on gentle leakage derived from it.
//! - [`sim`]: a Monte Carlo BB84 intercept simulator with an exact
//!   enumeration counterpart.
//!
//! All reported leakage values are in bits.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(all(test, not(feature = "std")))]
extern crate std;

pub mod cloning;
pub mod error;
pub mod leakage;
pub mod linalg;
pub mod measurements;
pub mod optim;
pub mod random;
pub mod sim;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{C64, ComplexMatrix, EigenDecomposition, HermitianMatrix, Tolerances};
pub use states::{CqEnsemble, DensityOperator, DepolarizingParam};
