//! Closed-form probabilities, Peierls-style bounds, and the Monte Carlo
//! estimators that cross-check them.
//!
//! Everything here is either an exact identity (ordering probabilities,
//! truncated nonpositive-slope probability, gap decompositions) or an
//! explicit bound (per-point shadow bounds, path/circuit counting sums),
//! paired with a seeded estimator so each claim can be verified numerically.

use alloc::vec::Vec;

use crate::dist::DistributionSpec;
use crate::field::HeightField;
use crate::rng::{substream, substream_seed};

#[derive(Clone, Debug, PartialEq)]
pub enum AnalysisError {
    /// The circuit-counting series diverges for this weight.
    Divergent { ratio: f64 },
}

impl core::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AnalysisError::Divergent { ratio } => {
                write!(f, "circuit series diverges: 8*epsilon = {ratio} >= 1")
            }
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Plain repeated multiplication; keeps scaling-by-powers-of-two exact.
fn pow_u32(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// Per-point probability bound that a standard-Gaussian site stays shadowed
/// at ray slope `level`: `q (2 - q) / (1 - q)` with `q = exp(-level^2 / 4)`.
/// Meaningful as a bound only where it is below one. Panics unless
/// `level > 0`.
pub fn gaussian_point_bound(level: f64) -> f64 {
    assert!(level > 0.0, "level must be positive, got {level}");
    let q = libm::exp(-level * level / 4.0);
    q * (2.0 - q) / (1.0 - q)
}

/// `epsilon^n`: joint bound for `n` sites each carrying a per-point shadow
/// bound of `epsilon`. Panics unless `0 < epsilon < 1`.
pub fn shadow_set_bound(epsilon: f64, n: u32) -> f64 {
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
    pow_u32(epsilon, n)
}

/// `(4 epsilon)^n`: union bound over the at most `4^n` non-self-intersecting
/// orthogonal lattice paths of length `n` from a fixed origin.
pub fn peierls_path_bound(epsilon: f64, n: u32) -> f64 {
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
    pow_u32(4.0 * epsilon, n)
}

/// Closed form of the circuit-counting series `sum_{n>=1} n 8^n epsilon^n =
/// 8 epsilon / (1 - 8 epsilon)^2`, whose summands dominate the number of
/// star-connected circuits of length `n` separating the origin from
/// infinity. Fails for `epsilon >= 1/8`, outside the radius of convergence.
pub fn peierls_circuit_sum(epsilon: f64) -> Result<f64, AnalysisError> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let ratio = 8.0 * epsilon;
    if ratio >= 1.0 {
        return Err(AnalysisError::Divergent { ratio });
    }
    Ok(ratio / ((1.0 - ratio) * (1.0 - ratio)))
}

/// Partial sum `sum_{n=1}^{terms} n (8 epsilon)^n`, accumulated smallest
/// term first. Test oracle for [`peierls_circuit_sum`].
pub fn peierls_circuit_partial_sum(epsilon: f64, terms: u32) -> f64 {
    let ratio = 8.0 * epsilon;
    let mut sum = 0.0;
    for n in (1..=terms).rev() {
        sum += n as f64 * pow_u32(ratio, n);
    }
    sum
}

/// An exact rational where it fits, a float beyond.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Probability {
    Exact { num: u64, den: u64 },
    Approx(f64),
}

impl Probability {
    pub fn value(&self) -> f64 {
        match *self {
            Probability::Exact { num, den } => num as f64 / den as f64,
            Probability::Approx(p) => p,
        }
    }
}

/// Probability that `n` i.i.d. draws from a law with a density land in one
/// specific strict order: exactly `1 / n!`. Exact rational up to `n = 20`
/// (the last factorial that fits in a `u64`), a float product beyond.
/// Panics for `n = 0`.
pub fn ordering_probability(n: u32) -> Probability {
    assert!(n >= 1, "need at least one variable");
    if n <= 20 {
        let mut fact = 1u64;
        for k in 2..=n as u64 {
            fact *= k;
        }
        Probability::Exact { num: 1, den: fact }
    } else {
        let mut p = 1.0f64;
        for k in 2..=n as u64 {
            p /= k as f64;
        }
        Probability::Approx(p)
    }
}

/// Probability that the slope over a horizon of `r0` sites is nonpositive:
/// the anchor must be the maximum of `r0 + 1` exchangeable draws, so exactly
/// `1 / (r0 + 1)`.
pub fn truncated_nonpositive_prob(r0: u32) -> Probability {
    assert!(r0 >= 1, "horizon must be at least 1");
    Probability::Exact {
        num: 1,
        den: r0 as u64 + 1,
    }
}

/// A seeded Monte Carlo tally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McEstimate {
    pub samples: u64,
    pub successes: u64,
}

impl McEstimate {
    pub fn p_hat(&self) -> f64 {
        self.successes as f64 / self.samples as f64
    }

    /// Binomial standard error `sqrt(p_hat (1 - p_hat) / N)`.
    pub fn stderr(&self) -> f64 {
        let p = self.p_hat();
        libm::sqrt(p * (1.0 - p) / self.samples as f64)
    }
}

/// Estimates the probability that `n` fresh draws form a descending chain
/// with slack: `Y_1 + slack > Y_2`, `Y_2 + slack > Y_3`, ... At zero slack
/// the target is `1 / n!`; the event is monotone in the slack, and with a
/// shared seed the estimate is too. Panics unless `n >= 2`, `slack >= 0`.
pub fn mc_ordering_with_slack(
    n: u32,
    slack: f64,
    spec: DistributionSpec,
    samples: u64,
    seed: u64,
) -> McEstimate {
    assert!(n >= 2, "need a chain of at least two");
    assert!(slack >= 0.0, "slack must be nonnegative");
    let mut rng = substream(seed, 0);
    let mut successes = 0u64;
    for _ in 0..samples {
        let mut prev = spec.sample(&mut rng);
        let mut ok = true;
        for _ in 1..n {
            let next = spec.sample(&mut rng);
            // Draw the whole block regardless of early failure so that runs
            // with different slacks consume identical streams.
            ok &= prev + slack > next;
            prev = next;
        }
        successes += ok as u64;
    }
    McEstimate { samples, successes }
}

/// Estimates the probability that the truncated shadow slope over a horizon
/// of `r0` sites is nonpositive; target `1 / (r0 + 1)`.
pub fn mc_truncated_nonpositive(
    spec: DistributionSpec,
    r0: u32,
    samples: u64,
    seed: u64,
) -> McEstimate {
    assert!(r0 >= 1);
    let mut rng = substream(seed, 0);
    let mut row = alloc::vec![0.0f64; r0 as usize + 1];
    let mut successes = 0u64;
    for _ in 0..samples {
        for slot in row.iter_mut() {
            *slot = spec.sample(&mut rng);
        }
        let (slope, _) = crate::alpha::alpha_at(&row, 0, r0 as usize);
        successes += (slope <= 0.0) as u64;
    }
    McEstimate { samples, successes }
}

/// Estimates `P(every cell of the set stays shadowed at `level`)` with a
/// truncated horizon of `lookahead` sites.
///
/// The truncated slope never exceeds the full one, so the truncated shadow
/// event is contained in the true shadow event and this estimate is a lower
/// bound on the untruncated probability; pick the horizon via
/// [`crate::alpha::truncation_stability`] when the gap matters.
pub fn mc_shadow_set_probability(
    spec: DistributionSpec,
    cells: &[(u32, u32)],
    level: f64,
    lookahead: u32,
    samples: u64,
    seed: u64,
) -> McEstimate {
    if cells.is_empty() {
        return McEstimate {
            samples,
            successes: samples,
        };
    }
    let width = cells.iter().map(|&(i, _)| i).max().unwrap() + 1;
    let rows = cells.iter().map(|&(_, j)| j).max().unwrap() + 1;
    let mut successes = 0u64;
    for s in 0..samples {
        let field = HeightField::generate(width, rows, lookahead, spec, substream_seed(seed, s))
            .expect("shadow-set window exceeds the cell budget");
        let mut all = true;
        for &(i, j) in cells {
            let (slope, _) = crate::alpha::alpha_at(field.row(j), i as usize, lookahead as usize);
            if slope < level {
                all = false;
                break;
            }
        }
        successes += all as u64;
    }
    McEstimate { samples, successes }
}

/// A finite integer set split into maximal runs with consecutive gaps at
/// most `gap`, consecutive blocks separated by more than `gap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R0Decomposition {
    pub gap: u32,
    pub blocks: Vec<Vec<i64>>,
}

impl R0Decomposition {
    /// Structural check of the three defining properties against the input.
    pub fn check_properties(&self, set: &[i64]) -> bool {
        // Blocks concatenate back to the set (partition, order preserved).
        let flat: Vec<i64> = self.blocks.iter().flatten().copied().collect();
        if flat != set {
            return false;
        }
        let gap = self.gap as i64;
        // Within a block, consecutive gaps stay within `gap`.
        for block in &self.blocks {
            if block.is_empty() {
                return false;
            }
            if block.windows(2).any(|w| w[1] - w[0] > gap) {
                return false;
            }
        }
        // Between blocks, strictly more than `gap`.
        for pair in self.blocks.windows(2) {
            let last = *pair[0].last().unwrap();
            let first = pair[1][0];
            if last + gap >= first {
                return false;
            }
        }
        true
    }
}

/// Splits a sorted set of distinct integers at every gap exceeding `gap`.
/// One left-to-right pass; the empty set yields zero blocks.
pub fn r0_decompose(set: &[i64], gap: u32) -> R0Decomposition {
    assert!(gap >= 1, "gap must be at least 1");
    assert!(
        set.windows(2).all(|w| w[0] < w[1]),
        "set must be sorted and distinct"
    );
    let mut blocks: Vec<Vec<i64>> = Vec::new();
    for &a in set {
        match blocks.last_mut() {
            Some(block) if a - *block.last().unwrap() <= gap as i64 => block.push(a),
            _ => blocks.push(alloc::vec![a]),
        }
    }
    R0Decomposition { gap, blocks }
}

/// Constants `(c', x0)` such that two independent draws differ by at least
/// `x` with probability at most `e^{-c' x}` for every `x >= x0`.
///
/// Derived from the law's tail constants `(c, C)` by a union bound:
/// `P(|X - X'| >= x) <= 2 C e^{-c x / 2}`, and `c' = c / 4` absorbs the
/// prefactor once `x >= (4 / c) ln(2 C)`.
pub fn difference_tail_constants(spec: DistributionSpec) -> (f64, f64) {
    let (c, big_c) = spec.tail_bound_constants();
    let c_prime = c / 4.0;
    let x0 = (4.0 / c) * libm::log(2.0 * big_c);
    (c_prime, x0.max(0.0))
}
