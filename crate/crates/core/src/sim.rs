//! BB84 intercept-and-forward simulation.
//!
//! Each round Alice draws one of the four BB84 labels uniformly and sends the
//! matching state. Eve measures it with her implementation and forwards the
//! post-measurement state. Bob measures in the basis named by the first label
//! bit and decodes the second. Bob always learns the correct basis, so every
//! round is sifted.
//!
//! Per-`(x, y)` quantities are computed once from exact Born probabilities;
//! the Monte Carlo loop only samples from those tables.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::error::Result;
use crate::leakage::sibson_infinity;
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::measurements::{self, ConditionalMatrix, PovmImplementation};
use crate::random::stream_rng;
use crate::states::{bb84_ensemble, bb84_kets, hadamard, CqEnsemble, DensityOperator};

/// Rounds drawn from one RNG stream.
pub const BATCH_ROUNDS: u64 = 4096;

/// Bob's error probabilities below this are treated as exactly zero.
const ERROR_FLOOR: f64 = 1e-15;

/// Eve's measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum EveStrategy {
    /// No measurement at all.
    None,
    /// Projective measurement in the Z basis.
    InterceptZ,
    /// Fair coin between the Z and X bases (W₁).
    InterceptRandomBasis,
    /// Projective measurement in the X basis (W₂).
    InterceptX,
    /// Three-outcome gentle construction from `M` and `ε`.
    Gentle {
        /// `0 ⪯ M ⪯ I`.
        m: HermitianMatrix,
        /// `ε ∈ [0, 1/10]`.
        epsilon: f64,
    },
}

impl EveStrategy {
    /// Gentle strategy with the default `M`, the positive part of `|0⟩⟨0| − |+⟩⟨+|`.
    pub fn gentle_default(epsilon: f64) -> Result<Self> {
        Ok(Self::Gentle {
            m: default_gentle_operator()?,
            epsilon,
        })
    }

    /// Short name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::InterceptZ => "intercept-z",
            Self::InterceptRandomBasis => "intercept-random-basis",
            Self::InterceptX => "intercept-x",
            Self::Gentle { .. } => "gentle",
        }
    }

    /// Eve's measurement implementation.
    pub fn implementation(&self) -> Result<PovmImplementation> {
        match self {
            Self::None => Ok(measurements::identity_measurement(2)),
            Self::InterceptZ => measurements::projective_povm(&ComplexMatrix::identity(2)),
            Self::InterceptRandomBasis => {
                measurements::basis_mixture(&[ComplexMatrix::identity(2), hadamard()])
            }
            Self::InterceptX => measurements::projective_povm(&hadamard()),
            Self::Gentle { m, epsilon } => Ok(measurements::gentle_povm(m, *epsilon)?.implementation),
        }
    }
}

/// Positive part of `|0⟩⟨0| − |+⟩⟨+|`.
pub fn default_gentle_operator() -> Result<HermitianMatrix> {
    let kets = bb84_kets();
    let zero = DensityOperator::pure(&kets[0])?;
    let plus = DensityOperator::pure(&kets[2])?;
    measurements::difference_positive_part(&zero, &plus)
}

/// Exact per-`(x, y)` round data.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTable {
    /// `P(y | x)` of Eve's outcomes.
    pub channel: ConditionalMatrix,
    /// Trace distance of the forwarded state from `ρˣ`, indexed `[x][y]`; 0 for impossible outcomes.
    pub disturbance: Vec<Vec<f64>>,
    /// Probability that Bob decodes the wrong bit, indexed `[x][y]`.
    pub bob_error: Vec<Vec<f64>>,
}

impl RoundTable {
    /// Builds the table for a strategy against the BB84 ensemble.
    pub fn build(strategy: &EveStrategy) -> Result<Self> {
        let e = bb84_ensemble();
        let imp = strategy.implementation()?;
        let channel = measurements::born_probabilities(&e, imp.povm())?;
        let zero_prob = crate::linalg::Tolerances::default().zero_probability;
        let z = ComplexMatrix::identity(2);
        let x_basis = hadamard();
        let mut disturbance = Vec::with_capacity(e.len());
        let mut bob_error = Vec::with_capacity(e.len());
        for (x, rho) in e.states().iter().enumerate() {
            let basis = if x < 2 { &z } else { &x_basis };
            let wrong = HermitianMatrix::projector(&basis.column(1 - (x & 1)));
            let mut dist_row = Vec::with_capacity(imp.len());
            let mut err_row = Vec::with_capacity(imp.len());
            for y in 0..imp.len() {
                if channel.get(y, x) <= zero_prob {
                    dist_row.push(0.0);
                    err_row.push(0.0);
                    continue;
                }
                let post = measurements::post_measurement_state(rho, &imp, y)?;
                dist_row.push(rho.trace_distance(&post)?);
                let err = post.matrix().trace_product(&wrong).clamp(0.0, 1.0);
                err_row.push(if err < ERROR_FLOOR { 0.0 } else { err });
            }
            disturbance.push(dist_row);
            bob_error.push(err_row);
        }
        Ok(Self {
            channel,
            disturbance,
            bob_error,
        })
    }

    fn inputs(&self) -> usize {
        self.disturbance.len()
    }

    fn outcomes(&self) -> usize {
        self.channel.outcomes()
    }
}

/// Closed-form round statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactStats {
    /// Probability that a round is in error.
    pub qber: f64,
    /// Sibson-∞ leakage of Eve's outcome channel, in bits.
    pub eve_leakage_bits: f64,
    /// Expected trace distance of the forwarded state.
    pub mean_disturbance: f64,
    /// Variance of the per-round disturbance.
    pub disturbance_variance: f64,
}

/// Exhaustive enumeration over `x`, Eve's outcome and Bob's outcome.
pub fn exact_round_statistics(strategy: &EveStrategy) -> Result<ExactStats> {
    let t = RoundTable::build(strategy)?;
    Ok(exact_from_table(&t))
}

fn exact_from_table(t: &RoundTable) -> ExactStats {
    let px = 1.0 / t.inputs() as f64;
    let (mut qber, mut mean, mut second) = (0.0, 0.0, 0.0);
    for x in 0..t.inputs() {
        for y in 0..t.outcomes() {
            let p = px * t.channel.get(y, x);
            let d = t.disturbance[x][y];
            qber += p * t.bob_error[x][y];
            mean += p * d;
            second += p * d * d;
        }
    }
    ExactStats {
        qber,
        eve_leakage_bits: sibson_infinity(&t.channel),
        mean_disturbance: mean,
        disturbance_variance: (second - mean * mean).max(0.0),
    }
}

/// Aggregate Monte Carlo output.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// Strategy name.
    pub strategy: String,
    /// Seed of the run.
    pub seed: u64,
    /// Rounds played.
    pub rounds: u64,
    /// Rounds kept after sifting.
    pub sifted: u64,
    /// Sifted rounds where Bob's bit was wrong.
    pub errors: u64,
    /// `errors / sifted`.
    pub qber: f64,
    /// Half-width of the normal-approximation 95% interval on `qber`.
    pub ci95: f64,
    /// Exact Sibson-∞ leakage of Eve's outcome channel, in bits.
    pub eve_leakage_bits: f64,
    /// Average trace distance of the forwarded state from the sent state.
    pub mean_disturbance: f64,
}

fn sample_index<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64>, n: usize) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        last = i;
        acc += w;
        if u < acc {
            return i;
        }
    }
    last.min(n.saturating_sub(1))
}

/// Plays `rounds` rounds. Batches of [`BATCH_ROUNDS`] use independent streams
/// of `seed`, so results depend only on `(strategy, rounds, seed)`.
pub fn run_simulation(strategy: &EveStrategy, rounds: u64, seed: u64) -> Result<SimReport> {
    if rounds == 0 {
        return Err(crate::error::Error::OutOfRange {
            name: "rounds",
            value: 0.0,
        });
    }
    let t = RoundTable::build(strategy)?;
    let n_in = t.inputs();
    let n_out = t.outcomes();
    let (mut errors, mut dist_sum) = (0u64, 0.0f64);
    let batches = rounds.div_ceil(BATCH_ROUNDS);
    for b in 0..batches {
        let mut rng = stream_rng(seed, b);
        let in_batch = BATCH_ROUNDS.min(rounds - b * BATCH_ROUNDS);
        let mut batch_dist = 0.0;
        for _ in 0..in_batch {
            let x = rng.random_range(0..n_in);
            let y = sample_index(&mut rng, t.channel_column(x), n_out);
            batch_dist += t.disturbance[x][y];
            let e = t.bob_error[x][y];
            let u: f64 = rng.random();
            if e > 0.0 && u < e {
                errors += 1;
            }
        }
        dist_sum += batch_dist;
    }
    let sifted = rounds;
    let qber = errors as f64 / sifted as f64;
    Ok(SimReport {
        strategy: strategy.name().to_string(),
        seed,
        rounds,
        sifted,
        errors,
        qber,
        ci95: 1.96 * (qber * (1.0 - qber) / sifted as f64).sqrt(),
        eve_leakage_bits: sibson_infinity(&t.channel),
        mean_disturbance: dist_sum / rounds as f64,
    })
}

impl RoundTable {
    fn channel_column(&self, x: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.outcomes()).map(move |y| self.channel.get(y, x))
    }
}

/// One row of [`tradeoff_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    /// Gentle strength.
    pub epsilon: f64,
    /// Simulated QBER.
    pub qber: f64,
    /// Exact leakage of Eve's outcome channel.
    pub leakage_bits: f64,
    /// Simulated mean disturbance.
    pub mean_disturbance: f64,
    /// Enumerated statistics at the same `ε`.
    pub exact: ExactStats,
}

/// Simulates the default gentle strategy at each `ε`, rows sorted by `ε`.
pub fn tradeoff_sweep(epsilons: &[f64], rounds: u64, seed: u64) -> Result<Vec<TradeoffRow>> {
    let mut eps = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    let m = default_gentle_operator()?;
    eps.into_iter()
        .map(|epsilon| {
            let s = EveStrategy::Gentle { m: m.clone(), epsilon };
            let exact = exact_round_statistics(&s)?;
            let r = run_simulation(&s, rounds, seed)?;
            Ok(TradeoffRow {
                epsilon,
                qber: r.qber,
                leakage_bits: r.eve_leakage_bits,
                mean_disturbance: r.mean_disturbance,
                exact,
            })
        })
        .collect()
}

/// The BB84 ensemble the simulator plays.
pub fn ensemble() -> CqEnsemble {
    bb84_ensemble()
}
