//! Depth-limited estimation with erf-based threshold polynomials.
//!
//! Each round decides whether `a` sits in the upper or lower part of the
//! current interval using a polynomial of slope about `k` around `a_mid`.
//! The exponent `β` trades circuit depth `ε^{-(1-β)}` against total queries
//! `ε^{-(1+β)}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open, Error, Result};
use crate::grover::Amplitude;
use crate::poly::{build_hybrid_poly_unchecked, hybrid_ideal, kappa_of_tau, PolyMode};
use crate::record::RunRecord;
use crate::sampler::{sample_semi_pellian_batch, QueryLedger, StateAfter};
use crate::stats::{hoeffding_shots, ConfidenceInterval};
use crate::unbiased::shrink_rounds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub poly_mode: PolyMode,
}

impl HybridConfig {
    pub fn new(epsilon: f64, delta: f64, beta: f64) -> Self {
        Self {
            epsilon,
            delta,
            beta,
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
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::Domain {
                name: "beta",
                value: self.beta,
                expected: "0 <= beta < 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Slope `∝ Δ^{-(1-β)}`, used once `a_mid` is far enough from 0.
    Shallow,
    /// Full-slope fallback `∝ Δ^{-1}`.
    Steep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundParams {
    pub eta: f64,
    pub tau: f64,
    pub k: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub branch: Branch,
}

/// Per-round parameters for the interval `ci`.
pub fn round_params(ci: &ConfidenceInterval, beta: f64) -> RoundParams {
    let delta = ci.width();
    let shallow = ci.mid() >= 0.5 * delta.powf(1.0 - beta);
    let (scale, slope_width, branch) = if shallow {
        (0.01 * delta.powf(beta), delta.powf(1.0 - beta), Branch::Shallow)
    } else {
        (0.01, delta, Branch::Steep)
    };
    let kappa = kappa_of_tau(scale).expect("tau = 0.01·Δ^β lies in (0, 0.01]");
    let k = (kappa / (2.0 * slope_width)).clamp(1.0, (2.0 / delta).max(1.0));
    RoundParams {
        eta: scale,
        tau: scale,
        k,
        gamma: scale,
        kappa,
        branch,
    }
}

/// One round, reported to [`hybrid_estimate_traced`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridRound {
    pub t: u64,
    pub interval: ConfidenceInterval,
    pub params: RoundParams,
    pub samples: u64,
    pub heads: u64,
    pub degree: u64,
    /// Whether `a_mid ≥ κ(τ)/k`, the condition under which the threshold
    /// bounds of the polynomial are guaranteed.
    pub precondition_met: bool,
}

pub fn hybrid_estimate<R: Rng + ?Sized>(
    a: Amplitude,
    cfg: &HybridConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    hybrid_estimate_traced(a, cfg, rng, |_| {})
}

pub fn hybrid_estimate_traced<R: Rng + ?Sized, F: FnMut(&HybridRound)>(
    a: Amplitude,
    cfg: &HybridConfig,
    rng: &mut R,
    mut on_round: F,
) -> Result<RunRecord> {
    cfg.validate()?;
    let rounds = shrink_rounds(cfg.epsilon);
    let delta_t = cfg.delta / rounds as f64;
    let mut a_min = 0.0f64;
    let mut width = 1.0f64;
    let mut ledger = QueryLedger::default();

    for t in 0..rounds {
        let ci = ConfidenceInterval {
            lo: a_min,
            hi: (a_min + width).min(1.0),
        };
        let params = round_params(&ci, cfg.beta);
        let a_mid = ci.mid();
        let poly = match cfg.poly_mode {
            PolyMode::Ideal => hybrid_ideal(params.tau, params.eta, params.k, a_mid)?,
            PolyMode::Polynomial => {
                build_hybrid_poly_unchecked(params.tau, params.eta, params.k, a_mid)?
            }
        };
        let m = hoeffding_shots(params.gamma, delta_t)?;
        let heads = sample_semi_pellian_batch(&poly, a, m, &mut ledger, rng)?;
        on_round(&HybridRound {
            t,
            interval: ci,
            params,
            samples: m,
            heads,
            degree: poly.degree(),
            precondition_met: a_mid >= params.kappa / params.k,
        });
        if heads as f64 > m as f64 * (0.25 + params.gamma * params.gamma) {
            a_min += 0.1 * width;
        }
        width *= 0.9;
    }

    let ci = ConfidenceInterval {
        lo: a_min,
        hi: (a_min + width).min(1.0),
    };
    Ok(RunRecord {
        a_hat: ci.mid(),
        interval: Some(ci),
        ledger,
        final_state: StateAfter::Reprepared,
        iterations: rounds,
        flagged: false,
    })
}
