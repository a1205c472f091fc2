//! Binomial confidence intervals and sample-count formulas.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{check_open, Error, Result};

/// A closed interval `[lo, hi] ⊆ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ConfidenceInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= 1.0 {
            Ok(Self { lo, hi })
        } else {
            Err(Error::Domain {
                name: "interval",
                value: hi - lo,
                expected: "0 <= lo <= hi <= 1",
            })
        }
    }

    pub const UNIT: ConfidenceInterval = ConfidenceInterval { lo: 0.0, hi: 1.0 };

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        self.lo + 0.5 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Intersection, collapsing to a point if the intervals are disjoint.
    pub fn intersect(&self, other: &ConfidenceInterval) -> ConfidenceInterval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            ConfidenceInterval { lo, hi }
        } else {
            let p = if other.hi < self.lo { self.lo } else { self.hi };
            ConfidenceInterval { lo: p, hi: p }
        }
    }
}

/// `Pr[X ≥ heads]` for `X ~ Binomial(flips, p)`.
pub fn upper_tail(heads: u64, flips: u64, p: f64) -> f64 {
    if heads == 0 {
        return 1.0;
    }
    if heads > flips {
        return 0.0;
    }
    beta_reg(heads as f64, (flips - heads + 1) as f64, p.clamp(0.0, 1.0))
}

/// `Pr[X ≤ heads]` for `X ~ Binomial(flips, p)`.
pub fn lower_tail(heads: u64, flips: u64, p: f64) -> f64 {
    if heads >= flips {
        return 1.0;
    }
    1.0 - beta_reg((heads + 1) as f64, (flips - heads) as f64, p.clamp(0.0, 1.0))
}

/// Solves `f(p) = target` for increasing `f` on `[0, 1]` by bisection.
fn bisect_increasing<F: Fn(f64) -> f64>(f: F, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact two-sided Clopper–Pearson interval at level `1 - alpha`.
pub fn clopper_pearson(heads: u64, flips: u64, alpha: f64) -> Result<ConfidenceInterval> {
    if flips == 0 || heads > flips {
        return Err(Error::Domain {
            name: "heads",
            value: heads as f64,
            expected: "0 <= heads <= flips, flips >= 1",
        });
    }
    check_open("alpha", alpha, 0.0, 1.0)?;
    let half = 0.5 * alpha;
    let lo = if heads == 0 {
        0.0
    } else {
        bisect_increasing(|p| upper_tail(heads, flips, p), half)
    };
    let hi = if heads == flips {
        1.0
    } else {
        bisect_increasing(|p| -lower_tail(heads, flips, p), -half)
    };
    Ok(ConfidenceInterval { lo, hi })
}

/// `⌈½ γ⁻² ln(1/δ)⌉` tosses, enough to tell `x ≥ ½ + γ` from `x ≤ ½ - γ`
/// with a coin of bias `x²`.
pub fn hoeffding_shots(gamma: f64, delta: f64) -> Result<u64> {
    check_open("gamma", gamma, 0.0, 0.5)?;
    check_open("delta", delta, 0.0, 1.0)?;
    Ok((0.5 / (gamma * gamma) * (1.0 / delta).ln()).ceil() as u64)
}

/// The largest Clopper–Pearson half-width over all possible head counts.
pub fn cp_max_halfwidth(flips: u64, alpha: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for heads in 0..=flips {
        worst = worst.max(0.5 * clopper_pearson(heads, flips, alpha)?.width());
    }
    Ok(worst)
}
