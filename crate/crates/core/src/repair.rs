//! Returning a tracked chain to `|ψ⟩` after an estimation run.
//!
//! The run leaves the chain in one of the four Grover labels. From `|Π⟩` a
//! sample of `K` lands on `|ψ⟩` unless `a` is below the threshold `κ`; from
//! `|Π⊥⟩` a sample of `J` lands on `|ψ⟩` unless `a` is above `sqrt(1-κ²)`.
//! `|ψ⊥⟩` is first measured in the `Π` basis. The threshold comes from the
//! run's total degree `D`: outside `[κ, sqrt(1-κ²)]` the run itself is very
//! unlikely to have left `|ψ⟩`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chebae::{chebae_estimate, ChainMode, ChebAEConfig};
use crate::error::{check_open, Error, Result};
use crate::grover::{Amplitude, GroverLabel};
use crate::poly::{build_repair_pair, PolySpec};
use crate::record::RunRecord;
use crate::sampler::{measure_basis_swap_charged, sample_pellian, QueryLedger, StateAfter};

/// Iteration cap for the Las Vegas loop.
pub const LAS_VEGAS_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepairConfig {
    pub mu: f64,
    /// Keep measuring in alternating bases until `|ψ⟩` appears.
    pub las_vegas: bool,
    /// Use this threshold instead of the one derived from `D`, for callers
    /// that already know `κ ≤ a ≤ sqrt(1-κ²)`.
    pub known_kappa: Option<f64>,
}

impl RepairConfig {
    pub fn new(mu: f64) -> Self {
        Self {
            mu,
            las_vegas: false,
            known_kappa: None,
        }
    }

    pub fn with_las_vegas(mut self, on: bool) -> Self {
        self.las_vegas = on;
        self
    }

    pub fn with_known_kappa(mut self, kappa: f64) -> Self {
        self.known_kappa = Some(kappa);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_open("mu", self.mu, 0.0, 1.0)?;
        if let Some(k) = self.known_kappa {
            check_open("known_kappa", k, 0.0, 1.0)?;
        }
        Ok(())
    }

    /// Failure budget of the threshold, `4μ/5`.
    pub fn delta_prime(&self) -> f64 {
        0.8 * self.mu
    }

    /// Leakage of the fixed-point pair, `μ/5`.
    pub fn eta_prime(&self) -> f64 {
        0.2 * self.mu
    }

    /// `κ = (4/5)·sqrt(δ')/D`, or the configured one.
    pub fn kappa(&self, d_total: u64) -> f64 {
        self.known_kappa
            .unwrap_or_else(|| 0.8 * self.delta_prime().sqrt() / d_total as f64)
    }
}

/// `⌈(5/4)(D/sqrt(δ')) ln(2/sqrt(η'))⌉`.
pub fn repair_degree_bound(mu: f64, d_total: u64) -> u64 {
    let cfg = RepairConfig::new(mu);
    let raw = 1.25 * d_total as f64 / cfg.delta_prime().sqrt() * (2.0 / cfg.eta_prime().sqrt()).ln();
    raw.ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub final_state: GroverLabel,
    /// The chain did not reach `|ψ⟩`.
    pub gave_up: bool,
    /// The Las Vegas loop stopped at [`LAS_VEGAS_CAP`].
    pub cap_hit: bool,
    /// Degree of the fixed-point pair that was (or would have been) used.
    pub pair_degree: u64,
    pub ledger: QueryLedger,
}

fn tracked(state: StateAfter) -> GroverLabel {
    match state {
        StateAfter::Tracked(s) => s,
        StateAfter::Reprepared => unreachable!("Pellian samples are tracked"),
    }
}

fn sample_pair<R: Rng + ?Sized>(
    state: GroverLabel,
    pair: &(PolySpec, PolySpec),
    a: Amplitude,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<GroverLabel> {
    let poly = match state {
        GroverLabel::PiPerp => &pair.0,
        GroverLabel::Pi => &pair.1,
        _ => return Ok(state),
    };
    Ok(tracked(sample_pellian(poly, state, a, ledger, rng)?.state_after))
}

pub fn repair_state<R: Rng + ?Sized>(
    state: GroverLabel,
    d_total: u64,
    cfg: &RepairConfig,
    a: Amplitude,
    rng: &mut R,
) -> Result<RepairOutcome> {
    cfg.validate()?;
    if d_total == 0 {
        return Err(Error::Domain {
            name: "d_total",
            value: 0.0,
            expected: "D >= 1",
        });
    }
    let kappa = cfg.kappa(d_total);
    let mut ledger = QueryLedger::default();
    let mut pair_degree = 0;

    let mut current = state;
    if current != GroverLabel::Psi {
        let pair = build_repair_pair(kappa, cfg.eta_prime())?;
        pair_degree = pair.0.degree();
        if cfg.known_kappa.is_none() {
            debug_assert!(pair_degree <= repair_degree_bound(cfg.mu, d_total) + 1);
        }
        if current == GroverLabel::PsiPerp {
            current = measure_basis_swap_charged(current, a, &mut ledger, rng);
        }
        current = sample_pair(current, &pair, a, &mut ledger, rng)?;
    }

    let mut cap_hit = false;
    if cfg.las_vegas {
        let mut steps = 0u64;
        while current != GroverLabel::Psi {
            if steps == LAS_VEGAS_CAP {
                cap_hit = true;
                break;
            }
            current = measure_basis_swap_charged(current, a, &mut ledger, rng);
            steps += 1;
        }
    }

    Ok(RepairOutcome {
        final_state: current,
        gave_up: current != GroverLabel::Psi,
        cap_hit,
        pair_degree,
        ledger,
    })
}

/// Tracked ChebAE followed by [`repair_state`] with the run's total degree.
pub fn nondestructive_chebae<R: Rng + ?Sized>(
    a: Amplitude,
    cheb_cfg: &ChebAEConfig,
    repair_cfg: &RepairConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    if cheb_cfg.mode != ChainMode::Tracked {
        return Err(Error::Config(
            "non-destructive estimation needs a tracked chain".into(),
        ));
    }
    let mut rec = chebae_estimate(a, cheb_cfg, rng)?;
    let state = rec.final_label().expect("tracked runs report a label");
    let d = rec.ledger.d_total.max(1);
    let out = repair_state(state, d, repair_cfg, a, rng)?;
    rec.ledger.absorb(&out.ledger);
    rec.final_state = StateAfter::Tracked(out.final_state);
    rec.flagged |= out.cap_hit;
    Ok(rec)
}
