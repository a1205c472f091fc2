//! Reference estimators: the phase-estimation query formula, maximum
//! likelihood amplitude estimation and plain Monte Carlo.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{check_open, Error, Result};
use crate::grover::{Amplitude, GroverLabel};
use crate::record::RunRecord;
use crate::sampler::{binomial, pellian_queries, QueryLedger, StateAfter};
use crate::stats::{clopper_pearson, ConfidenceInterval};

/// `Q_Π = ⌈π/arcsin ε⌉ · ⌈½(8/π² − ½)⁻² ln(1/δ)⌉`.
pub fn bhmt_queries(epsilon: f64, delta: f64) -> Result<u64> {
    check_open("epsilon", epsilon, 0.0, 1.0)?;
    check_open("delta", delta, 0.0, 1.0)?;
    let per_run = (std::f64::consts::PI / epsilon.asin()).ceil() as u64;
    let gap = 8.0 / (std::f64::consts::PI * std::f64::consts::PI) - 0.5;
    let repeats = (0.5 / (gap * gap) * (1.0 / delta).ln()).ceil() as u64;
    Ok(per_run * repeats)
}

/// Rounds `k = 0, 1, 2, 4, …, 2^K`, each sampling `T_{2k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlaeSchedule {
    pub shots_per_round: u64,
    pub max_power: u32,
    /// Likelihood-ratio threshold. Defaults to the χ²(1) quantile at `1 − δ`.
    pub threshold: Option<f64>,
}

impl Default for MlaeSchedule {
    fn default() -> Self {
        Self {
            shots_per_round: 100,
            max_power: 6,
            threshold: None,
        }
    }
}

impl MlaeSchedule {
    pub fn new(max_power: u32) -> Self {
        Self {
            max_power,
            ..Self::default()
        }
    }

    pub fn k_values(&self) -> Vec<u64> {
        std::iter::once(0)
            .chain((0..=self.max_power).map(|j| 1u64 << j))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots_per_round == 0 {
            return Err(Error::Config("MLAE needs at least one shot per round".into()));
        }
        if self.max_power > 40 {
            return Err(Error::Config(format!(
                "MLAE max power {} is out of range",
                self.max_power
            )));
        }
        Ok(())
    }
}

const GRID_POINTS: usize = 10_000;
const REFINE_TOL: f64 = 1e-10;
/// Grid local maxima refined by golden-section search.
const REFINE_CANDIDATES: usize = 32;

struct Likelihood<'a> {
    rounds: &'a [(u64, u64)],
    shots: u64,
}

impl Likelihood<'_> {
    fn ln(&self, x: f64) -> f64 {
        let theta = x.clamp(0.0, 1.0).asin();
        self.rounds
            .iter()
            .map(|&(k, heads)| {
                let p = ((2 * k + 1) as f64 * theta).sin().powi(2);
                let tails = self.shots - heads;
                let mut v = 0.0;
                if heads > 0 {
                    v += heads as f64 * p.ln();
                }
                if tails > 0 {
                    v += tails as f64 * (1.0 - p).ln();
                }
                v
            })
            .sum()
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > REFINE_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2), (x, fx)]
        .into_iter()
        .fold((x, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Maximum of the log-likelihood over `[0, 1]`.
fn maximize(lik: &Likelihood<'_>) -> (f64, f64) {
    let xs: Vec<f64> = (0..=GRID_POINTS).map(|i| i as f64 / GRID_POINTS as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| lik.ln(x)).collect();
    let mut peaks: Vec<usize> = (0..xs.len())
        .filter(|&i| {
            let left = i == 0 || ys[i] >= ys[i - 1];
            let right = i + 1 == xs.len() || ys[i] >= ys[i + 1];
            left && right && ys[i].is_finite()
        })
        .collect();
    peaks.sort_by(|&i, &j| ys[j].total_cmp(&ys[i]));
    peaks.truncate(REFINE_CANDIDATES);

    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in peaks {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(GRID_POINTS)];
        for cand in [golden_max(|x| lik.ln(x), lo, hi), (xs[i], ys[i])] {
            if cand.1 > best.1 {
                best = cand;
            }
        }
    }
    best
}

/// Walks outward from `start` in steps of `step` until the deviance
/// exceeds `q`, then bisects the crossing.
fn ci_edge(lik: &Likelihood<'_>, start: f64, ln_max: f64, q: f64, step: f64) -> f64 {
    let inside = |x: f64| 2.0 * (ln_max - lik.ln(x)) <= q;
    let bound = if step > 0.0 { 1.0 } else { 0.0 };
    let mut prev = start;
    loop {
        let next = prev + step;
        let next = if (next - bound) * step.signum() >= 0.0 { bound } else { next };
        if !inside(next) {
            let (mut a, mut b) = (prev, next);
            while (b - a).abs() > REFINE_TOL {
                let m = 0.5 * (a + b);
                if inside(m) {
                    a = m;
                } else {
                    b = m;
                }
            }
            return a;
        }
        if next == bound {
            return bound;
        }
        prev = next;
    }
}

pub fn mlae_estimate<R: Rng + ?Sized>(
    a: Amplitude,
    schedule: &MlaeSchedule,
    delta: f64,
    rng: &mut R,
) -> Result<RunRecord> {
    schedule.validate()?;
    check_open("delta", delta, 0.0, 1.0)?;
    let m = schedule.shots_per_round;
    let theta = a.angle();
    let mut ledger = QueryLedger::default();
    let rounds: Vec<(u64, u64)> = schedule
        .k_values()
        .into_iter()
        .map(|k| {
            let d = 2 * k + 1;
            let p = (d as f64 * theta).sin().powi(2);
            let (qs, qp) = pellian_queries(GroverLabel::Psi, d);
            ledger.charge(qs, qp, d, m, true);
            (k, binomial(m, p, rng))
        })
        .collect();

    if rounds.iter().all(|&(_, h)| h == m) || rounds.iter().all(|&(_, h)| h == 0) {
        return Err(Error::DegenerateLikelihood);
    }

    let q = match schedule.threshold {
        Some(q) => q,
        None => ChiSquared::new(1.0)
            .map_err(|e| Error::Config(e.to_string()))?
            .inverse_cdf(1.0 - delta),
    };
    let lik = Likelihood { rounds: &rounds, shots: m };
    let (mle, ln_max) = maximize(&lik);
    let step = 1.0 / GRID_POINTS as f64;
    let lo = ci_edge(&lik, mle, ln_max, q, -step);
    let hi = ci_edge(&lik, mle, ln_max, q, step);
    Ok(RunRecord {
        a_hat: mle,
        interval: Some(ConfidenceInterval::new(lo, hi)?),
        ledger,
        final_state: StateAfter::Reprepared,
        iterations: rounds.len() as u64,
        flagged: false,
    })
}

/// Tosses per Clopper–Pearson update in [`classical_mc`].
pub const MC_BATCH: u64 = 1000;

/// Estimates `a` from direct measurements of `|ψ⟩`, which come up `1` with
/// probability `a²`.
pub fn classical_mc<R: Rng + ?Sized>(
    a: Amplitude,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<RunRecord> {
    check_open("epsilon", epsilon, 0.0, 1.0)?;
    check_open("delta", delta, 0.0, 1.0)?;
    let p = a.value() * a.value();
    let (qs, qp) = pellian_queries(GroverLabel::Psi, 1);
    let mut ledger = QueryLedger::default();
    let (mut heads, mut flips) = (0u64, 0u64);
    let mut batches = 0;
    loop {
        heads += binomial(MC_BATCH, p, rng);
        flips += MC_BATCH;
        batches += 1;
        ledger.charge(qs, qp, 1, MC_BATCH, true);
        let ci = clopper_pearson(heads, flips, delta)?;
        let ci = ConfidenceInterval::new(ci.lo.sqrt(), ci.hi.sqrt())?;
        if ci.width() < 2.0 * epsilon {
            return Ok(RunRecord {
                a_hat: ci.mid(),
                interval: Some(ci),
                ledger,
                final_state: StateAfter::Reprepared,
                iterations: batches,
                flagged: false,
            });
        }
    }
}
