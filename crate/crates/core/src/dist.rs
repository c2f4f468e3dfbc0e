//! Sampling laws for the height field.
//!
//! Only laws that (a) admit a density, (b) have exponentially decaying tails
//! and (c) have a finite first moment are built in; every downstream result
//! consumed by this crate needs all three, so the capability flags are
//! truthful by construction. Arbitrary user laws are deliberately excluded.

use alloc::string::String;

use crate::rng::Xoshiro256PlusPlus;

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Parameter error raised by the `DistributionSpec` constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistError(pub String);

impl core::fmt::Display for DistError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "invalid distribution parameter: {}", self.0)
    }
}

impl core::error::Error for DistError {}

/// The sampling law, with validated parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "lowercase")
)]
pub enum Law {
    Gaussian { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Laplace { loc: f64, scale: f64 },
}

/// A validated sampling law plus the analytic facts the simulations rely on.
///
/// Construct through [`DistributionSpec::gaussian`], [`uniform`] or
/// [`laplace`]; invalid parameters are rejected there, so a value of this
/// type is always usable.
///
/// [`uniform`]: DistributionSpec::uniform
/// [`laplace`]: DistributionSpec::laplace
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Law", into = "Law")
)]
pub struct DistributionSpec {
    law: Law,
}

impl TryFrom<Law> for DistributionSpec {
    type Error = DistError;

    fn try_from(law: Law) -> Result<Self, DistError> {
        match law {
            Law::Gaussian { mean, sd } => Self::gaussian(mean, sd),
            Law::Uniform { lo, hi } => Self::uniform(lo, hi),
            Law::Laplace { loc, scale } => Self::laplace(loc, scale),
        }
    }
}

impl From<DistributionSpec> for Law {
    fn from(spec: DistributionSpec) -> Law {
        spec.law
    }
}

impl DistributionSpec {
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self, DistError> {
        if !mean.is_finite() || !sd.is_finite() || sd <= 0.0 {
            return Err(DistError(alloc::format!(
                "gaussian requires finite mean and sd > 0, got mean={mean}, sd={sd}"
            )));
        }
        Ok(Self {
            law: Law::Gaussian { mean, sd },
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistError> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(DistError(alloc::format!(
                "uniform requires finite lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        Ok(Self {
            law: Law::Uniform { lo, hi },
        })
    }

    pub fn laplace(loc: f64, scale: f64) -> Result<Self, DistError> {
        if !loc.is_finite() || !scale.is_finite() || scale <= 0.0 {
            return Err(DistError(alloc::format!(
                "laplace requires finite loc and scale > 0, got loc={loc}, scale={scale}"
            )));
        }
        Ok(Self {
            law: Law::Laplace { loc, scale },
        })
    }

    pub fn law(&self) -> Law {
        self.law
    }

    /// All built-in laws admit a density.
    pub fn has_density(&self) -> bool {
        true
    }

    /// All built-in laws have `P(|X| > x) <= C e^{-c x}`; see
    /// [`tail_bound_constants`](Self::tail_bound_constants).
    pub fn exponential_tail(&self) -> bool {
        true
    }

    /// All built-in laws have a finite first moment.
    pub fn finite_first_moment(&self) -> bool {
        true
    }

    /// One draw. Consumes a fixed number of uniforms per call (two for
    /// gaussian and laplace, one for uniform), so streams are predictable.
    pub fn sample(&self, rng: &mut Xoshiro256PlusPlus) -> f64 {
        let x = match self.law {
            Law::Gaussian { mean, sd } => {
                // Box-Muller, cosine branch. 1 - u keeps the log argument in
                // (0, 1], so the draw is always finite.
                let u = 1.0 - rng.next_f64();
                let v = rng.next_f64();
                let r = libm::sqrt(-2.0 * libm::log(u));
                mean + sd * r * libm::cos(core::f64::consts::TAU * v)
            }
            Law::Uniform { lo, hi } => lo + (hi - lo) * rng.next_f64(),
            Law::Laplace { loc, scale } => {
                // Sign bit and an exponential magnitude; exact inverse-CDF
                // transform of the two-sided exponential.
                let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
                let e = -libm::log(1.0 - rng.next_f64());
                loc + scale * sign * e
            }
        };
        assert!(x.is_finite(), "draw from {:?} was not finite", self.law);
        x
    }

    /// First moment, in closed form.
    pub fn mean(&self) -> f64 {
        match self.law {
            Law::Gaussian { mean, .. } => mean,
            Law::Uniform { lo, hi } => 0.5 * (lo + hi),
            Law::Laplace { loc, .. } => loc,
        }
    }

    /// Standard deviation, in closed form. Used to size CLT tolerances.
    pub fn sd(&self) -> f64 {
        match self.law {
            Law::Gaussian { sd, .. } => sd,
            Law::Uniform { lo, hi } => (hi - lo) / libm::sqrt(12.0),
            Law::Laplace { scale, .. } => scale * SQRT_2,
        }
    }

    /// Exact mass outside `[-x, x]`, i.e. `P(|X| > x)` for these laws.
    ///
    /// Panics if `x` is negative or NaN.
    pub fn tail_mass(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "tail_mass needs x >= 0, got {x}");
        match self.law {
            Law::Gaussian { mean, sd } => {
                // P(X > x) + P(X < -x) via erfc for accuracy deep in the tail.
                let upper = 0.5 * libm::erfc((x - mean) / (sd * SQRT_2));
                let lower = 0.5 * libm::erfc((x + mean) / (sd * SQRT_2));
                upper + lower
            }
            Law::Uniform { lo, hi } => {
                let overlap = (hi.min(x) - lo.max(-x)).max(0.0);
                1.0 - overlap / (hi - lo)
            }
            Law::Laplace { loc, scale } => {
                let cdf = |t: f64| {
                    if t < loc {
                        0.5 * libm::exp((t - loc) / scale)
                    } else {
                        1.0 - 0.5 * libm::exp(-(t - loc) / scale)
                    }
                };
                cdf(-x) + (1.0 - cdf(x))
            }
        }
    }

    /// Constants `(c, C)` with `tail_mass(x) <= C e^{-c x}` for all `x >= 0`.
    ///
    /// Per law:
    /// - gaussian(m, sd): `c = 1/sd`, `C = 2 exp(1/2 + |m|/sd)` (from
    ///   `x^2/2 >= x - 1/2` applied to the standardized tail);
    /// - laplace(m, b): `c = 1/b`, `C = exp(|m|/b)` (exact tail shifted by
    ///   the location);
    /// - uniform(lo, hi): `c = 1`, `C = exp(max(|lo|, |hi|))` (the tail is
    ///   zero beyond the support and the bound stays above one inside it).
    pub fn tail_bound_constants(&self) -> (f64, f64) {
        match self.law {
            Law::Gaussian { mean, sd } => (1.0 / sd, 2.0 * libm::exp(0.5 + mean.abs() / sd)),
            Law::Laplace { loc, scale } => (1.0 / scale, libm::exp(loc.abs() / scale)),
            Law::Uniform { lo, hi } => (1.0, libm::exp(lo.abs().max(hi.abs()))),
        }
    }
}
