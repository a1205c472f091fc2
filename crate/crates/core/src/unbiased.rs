//! Nearly unbiased amplitude estimation.
//!
//! Shrinks `[a_min, a_max]` by a tenth per round using a line polynomial,
//! then takes one last toss whose bias is `(a - a_min)/Δ` and returns
//! `a_max` on heads and `a_min` on tails, so `E[â] ≈ a`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open, Result};
use crate::grover::Amplitude;
use crate::poly::{build_line_poly_with_width, PolyMode};
use crate::record::RunRecord;
use crate::sampler::{sample_semi_pellian, sample_semi_pellian_batch, QueryLedger, StateAfter};
use crate::stats::ConfidenceInterval;

/// Accuracy of the per-round line polynomials.
pub const ROUND_ETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnbiasedConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub poly_mode: PolyMode,
}

impl UnbiasedConfig {
    pub fn new(epsilon: f64, delta: f64, eta: f64) -> Self {
        Self {
            epsilon,
            delta,
            eta,
            poly_mode: PolyMode::Ideal,
        }
    }

    pub fn with_mode(mut self, mode: PolyMode) -> Self {
        self.poly_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_open("epsilon", self.epsilon, 0.0, 1.0)?;
        check_open("delta", self.delta, 0.0, 1.0)?;
        check_open("eta", self.eta, 0.0, 1.0)
    }

    /// `T = ⌈log_0.9 ε⌉`.
    pub fn rounds(&self) -> u64 {
        shrink_rounds(self.epsilon)
    }

    /// `m_t = ⌈6 ln(1/δ_t)⌉` with `δ_t = (εδ/10)·0.9^{-t}`, at least 1.
    pub fn samples(&self, t: u64) -> u64 {
        let delta_t = self.epsilon * self.delta / 10.0 * 0.9f64.powi(-(t as i32));
        if delta_t >= 1.0 {
            1
        } else {
            ((6.0 * (1.0 / delta_t).ln()).ceil() as u64).max(1)
        }
    }
}

/// `⌈log_0.9 ε⌉`, at least 1.
pub fn shrink_rounds(epsilon: f64) -> u64 {
    (epsilon.ln() / 0.9f64.ln()).ceil().max(1.0) as u64
}

pub fn unbiased_estimate<R: Rng + ?Sized>(
    a: Amplitude,
    cfg: &UnbiasedConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    cfg.validate()?;
    let rounds = cfg.rounds();
    let mut a_min = 0.0f64;
    let mut width = 1.0f64;
    let mut ledger = QueryLedger::default();

    for t in 0..rounds {
        let m = cfg.samples(t);
        let p = build_line_poly_with_width(a_min, width, ROUND_ETA, cfg.poly_mode)?;
        let heads = sample_semi_pellian_batch(&p, a, m, &mut ledger, rng)?;
        if 2 * heads > m {
            a_min += 0.1 * width;
        }
        width *= 0.9;
    }

    let last = build_line_poly_with_width(a_min, width, cfg.eta, cfg.poly_mode)?;
    let a_max = (a_min + width).min(1.0);
    let bit = sample_semi_pellian(&last, a, &mut ledger, rng)?.bit;
    Ok(RunRecord {
        a_hat: if bit { a_max } else { a_min },
        interval: Some(ConfidenceInterval { lo: a_min, hi: a_max }),
        ledger,
        final_state: StateAfter::Reprepared,
        iterations: rounds,
        flagged: false,
    })
}
