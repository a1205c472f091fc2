//! Chebyshev amplitude estimation.
//!
//! Keeps an interval `[a_min, a_max]` around `a`, samples the highest
//! Chebyshev polynomial `T_d` whose square is invertible on it, and pulls a
//! Clopper–Pearson interval on `|T_d(a)|²` back through `cos²(d·arccos a)`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open, Error, Result};
use crate::grover::{Amplitude, GroverLabel};
use crate::poly::{cheb_t, cheb_t_sq, Parity};
use crate::record::RunRecord;
use crate::sampler::{sample_pellian_p2, QueryLedger, StateAfter};
use crate::stats::{clopper_pearson, cp_max_halfwidth, ConfidenceInterval};

/// Safety cap on the number of tosses in one run.
pub const TOSS_CAP: u64 = 1_000_000;

/// Whether tosses thread a single tracked state or restart from `|ψ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    Tracked,
    #[default]
    Destructive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebAEConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub r: f64,
    pub n_shots: u64,
    pub nu: f64,
    pub mode: ChainMode,
}

impl ChebAEConfig {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            r: 2.0,
            n_shots: 100,
            nu: 8.0,
            mode: ChainMode::Destructive,
        }
    }

    pub fn with_mode(mut self, mode: ChainMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_open("epsilon", self.epsilon, 0.0, 1.0)?;
        check_open("delta", self.delta, 0.0, 1.0)?;
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(Error::Config(format!("r must exceed 1, got {}", self.r)));
        }
        if self.n_shots == 0 {
            return Err(Error::Config("n_shots must be positive".into()));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Config(format!("nu must be positive, got {}", self.nu)));
        }
        Ok(())
    }

    /// `T = ⌈log_r(1/(2ε))⌉`, at least 1.
    pub fn interval_budget(&self) -> u64 {
        ((1.0 / (2.0 * self.epsilon)).ln() / self.r.ln()).ceil().max(1.0) as u64
    }
}

/// Highest `d` for which `cos²(d·arccos a)` is monotone on `ci`.
pub fn find_next_cheb(ci: &ConfidenceInterval) -> u64 {
    let theta_min = ci.hi.clamp(-1.0, 1.0).acos();
    let theta_max = ci.lo.clamp(-1.0, 1.0).acos();
    let spread = theta_max - theta_min;
    if spread <= 0.0 {
        return 1;
    }
    let mut d = (FRAC_PI_2 / spread).floor().min(1e15) as u64;
    let cell = |d: u64, theta: f64| (2.0 / PI * d as f64 * theta).floor();
    while d > 1 && cell(d, theta_min) != cell(d, theta_max) {
        d -= 1;
    }
    d.max(1)
}

/// Index `n` of the quarter-period `[nπ/2, (n+1)π/2]` holding `d·θ` for
/// every `θ` in `ci`, with both boundaries counted as inside.
fn monotone_branch(d: u64, ci: &ConfidenceInterval) -> Option<u64> {
    let s_lo = 2.0 / PI * d as f64 * ci.hi.acos();
    let s_hi = 2.0 / PI * d as f64 * ci.lo.acos();
    let tol = 1e-9;
    let n = (s_lo + tol).floor().max(0.0);
    (s_hi <= n + 1.0 + tol).then_some(n as u64)
}

/// Pulls `p_ci` back through `cos²(d·arccos a)` restricted to `a_ci`.
pub fn invert_cheb_ci(
    d: u64,
    p_ci: &ConfidenceInterval,
    a_ci: &ConfidenceInterval,
) -> Result<ConfidenceInterval> {
    let branch = monotone_branch(d, a_ci).ok_or(Error::MonotonicityViolated {
        degree: d,
        lo: a_ci.lo,
        hi: a_ci.hi,
    })?;
    let f_lo = cheb_t_sq(d, a_ci.lo);
    let f_hi = cheb_t_sq(d, a_ci.hi);
    let (range_lo, range_hi) = (f_lo.min(f_hi), f_lo.max(f_hi));
    // On branch n, x = dθ lies in [nπ/2, (n+1)π/2] where cos²x is monotone.
    let preimage = |p: f64| -> f64 {
        let p = p.clamp(range_lo, range_hi);
        let m = (branch / 2) as f64;
        let base = p.sqrt().min(1.0).acos();
        let x = if branch % 2 == 0 {
            m * PI + base
        } else {
            (m + 1.0) * PI - base
        };
        (x / d as f64).cos().clamp(a_ci.lo, a_ci.hi)
    };
    let (x1, x2) = (preimage(p_ci.lo), preimage(p_ci.hi));
    Ok(ConfidenceInterval {
        lo: x1.min(x2),
        hi: x1.max(x2),
    })
}

fn eps_p_max(n_shots: u64, alpha: f64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (n_shots, alpha.to_bits());
    if let Some(&v) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(v);
    }
    let v = cp_max_halfwidth(n_shots, alpha)?;
    cache.lock().expect("cache poisoned").insert(key, v);
    Ok(v)
}

/// One pass through the main loop, reported to [`chebae_estimate_traced`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebAEStep {
    pub degree: u64,
    pub late: bool,
    pub before: ConfidenceInterval,
    pub after: ConfidenceInterval,
    pub heads: u64,
    pub flips: u64,
}

/// Runs ChebAE on amplitude `a`.
pub fn chebae_estimate<R: Rng + ?Sized>(
    a: Amplitude,
    cfg: &ChebAEConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    chebae_estimate_traced(a, cfg, rng, |_| {})
}

/// [`chebae_estimate`] with a callback after every iteration.
pub fn chebae_estimate_traced<R: Rng + ?Sized, F: FnMut(&ChebAEStep)>(
    a: Amplitude,
    cfg: &ChebAEConfig,
    rng: &mut R,
    mut on_step: F,
) -> Result<RunRecord> {
    cfg.validate()?;
    let initial_state = match cfg.mode {
        ChainMode::Tracked => StateAfter::Tracked(GroverLabel::Psi),
        ChainMode::Destructive => StateAfter::Reprepared,
    };
    let mut ci = ConfidenceInterval::UNIT;
    let mut ledger = QueryLedger::default();
    if ci.width() < 2.0 * cfg.epsilon {
        return Ok(RunRecord {
            a_hat: ci.mid(),
            interval: Some(ci),
            ledger,
            final_state: initial_state,
            iterations: 0,
            flagged: true,
        });
    }

    let alpha = cfg.delta / cfg.interval_budget() as f64;
    let eps_p = eps_p_max(cfg.n_shots, alpha)?;
    let mut state = GroverLabel::Psi;
    let mut d = 1u64;
    let (mut heads, mut flips) = (0u64, 0u64);
    let mut iterations = 0u64;

    while ci.width() >= 2.0 * cfg.epsilon {
        iterations += 1;
        let d_new = find_next_cheb(&ci);
        if d_new as f64 >= cfg.r * d as f64 {
            heads = 0;
            flips = 0;
            d = d_new;
        }

        let slope = (cheb_t(d, ci.hi) - cheb_t(d, ci.lo)).abs();
        let late = slope < 1e-300 || eps_p * ci.width() / slope <= cfg.epsilon * cfg.nu;
        let shots = if late { 1 } else { cfg.n_shots };
        if ledger.tosses + shots > TOSS_CAP {
            return Err(Error::IterationCap(TOSS_CAP));
        }

        let p2 = cheb_t_sq(d, a.value());
        let parity = Parity::of_degree(d);
        for _ in 0..shots {
            let from = match cfg.mode {
                ChainMode::Tracked => state,
                ChainMode::Destructive => GroverLabel::Psi,
            };
            let outcome = sample_pellian_p2(p2, d, parity, from, &mut ledger, rng);
            if let StateAfter::Tracked(s) = outcome.state_after {
                state = s;
            }
            heads += outcome.bit as u64;
        }
        flips += shots;

        let p_ci = clopper_pearson(heads, flips, alpha)?;
        let before = ci;
        ci = ci.intersect(&invert_cheb_ci(d, &p_ci, &ci)?);
        on_step(&ChebAEStep {
            degree: d,
            late,
            before,
            after: ci,
            heads,
            flips,
        });
    }

    Ok(RunRecord {
        a_hat: ci.mid(),
        interval: Some(ci),
        ledger,
        final_state: match cfg.mode {
            ChainMode::Tracked => StateAfter::Tracked(state),
            ChainMode::Destructive => StateAfter::Reprepared,
        },
        iterations,
        flagged: false,
    })
}
