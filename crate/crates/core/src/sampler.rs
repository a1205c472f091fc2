//! Sampling a bit with bias `|P(a)|²`, tracking the Grover-subspace state
//! and charging oracle queries to a ledger.
//!
//! Query counts include the final basis measurement, which is one use of
//! the oracle whose basis is measured. For Pellian polynomials this makes
//! `Q_ψ + Q_Π` equal the degree exactly.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grover::{Amplitude, GroverLabel};
use crate::poly::{monomial, Kind, Parity, PolySpec};

/// Running oracle-query and degree totals for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub q_psi: u64,
    pub q_pi: u64,
    pub d_max: u64,
    pub d_total: u64,
    pub tosses: u64,
    /// Samples whose final measurement was in the `Π` basis, each of which
    /// is included in `q_pi`.
    #[serde(default)]
    pub pi_measurements: u64,
}

impl QueryLedger {
    /// Records `count` samples of a degree-`degree` polynomial, each
    /// costing `(q_psi, q_pi)` queries and ending with a measurement in the
    /// `Π` basis when `pi_measurement` is set.
    pub fn charge(&mut self, q_psi: u64, q_pi: u64, degree: u64, count: u64, pi_measurement: bool) {
        if count == 0 {
            return;
        }
        self.q_psi += q_psi * count;
        self.q_pi += q_pi * count;
        self.d_max = self.d_max.max(degree);
        self.d_total += degree * count;
        self.tosses += count;
        if pi_measurement {
            self.pi_measurements += count;
        }
    }

    pub fn absorb(&mut self, other: &QueryLedger) {
        self.q_psi += other.q_psi;
        self.q_pi += other.q_pi;
        self.d_max = self.d_max.max(other.d_max);
        self.d_total += other.d_total;
        self.tosses += other.tosses;
        self.pi_measurements += other.pi_measurements;
    }

    pub fn total_queries(&self) -> u64 {
        self.q_psi + self.q_pi
    }
}

/// Where the chain sits after a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateAfter {
    Tracked(GroverLabel),
    /// The output was discarded and a fresh `|ψ⟩` will be prepared.
    Reprepared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOutcome {
    pub bit: bool,
    pub state_after: StateAfter,
}

/// The state reached on a `1` outcome.
pub fn target_of(state: GroverLabel, parity: Parity) -> GroverLabel {
    use GroverLabel::*;
    match parity {
        Parity::Even => state,
        Parity::Odd => match state {
            Psi => Pi,
            Pi => Psi,
            PsiPerp => PiPerp,
            PiPerp => PsiPerp,
        },
    }
}

/// `(Q_ψ, Q_Π)` for one Pellian sample of degree `d` from `state`.
pub fn pellian_queries(state: GroverLabel, d: u64) -> (u64, u64) {
    let k = d / 2;
    if d % 2 == 1 {
        if state.in_psi_basis() {
            (k, k + 1)
        } else {
            (k + 1, k)
        }
    } else {
        (k, k)
    }
}

/// `(Q_ψ, Q_Π)` for one semi-Pellian sample of degree `d` from `state`,
/// counting uses of the controlled `e^{iφZ} ⊕ e^{-iφZ}` oracles.
pub fn semi_pellian_queries(state: GroverLabel, d: u64) -> (u64, u64) {
    let k = d / 2;
    match (d % 2 == 1, state.in_psi_basis()) {
        (true, true) => (k + 1, k + 2),
        (true, false) => (k + 2, k + 1),
        (false, true) => (k + 3, k),
        (false, false) => (k, k + 3),
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Pellian => "Pellian",
        Kind::SemiPellian => "semi-Pellian",
    }
}

fn require_kind(p: &PolySpec, kind: Kind) -> Result<()> {
    if p.kind() == kind {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            expected: kind_name(kind),
            found: kind_name(p.kind()),
        })
    }
}

/// One Bernoulli draw with success probability `p`.
#[inline]
pub fn toss<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

/// Samples a Pellian polynomial from a tracked state.
pub fn sample_pellian<R: Rng + ?Sized>(
    p: &PolySpec,
    state: GroverLabel,
    a: Amplitude,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<SampleOutcome> {
    require_kind(p, Kind::Pellian)?;
    Ok(sample_pellian_p2(p.p2(a.value()), p.degree(), p.parity(), state, ledger, rng))
}

/// [`sample_pellian`] with `|P(a)|²` already evaluated.
pub fn sample_pellian_p2<R: Rng + ?Sized>(
    p2: f64,
    degree: u64,
    parity: Parity,
    state: GroverLabel,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> SampleOutcome {
    let bit = toss(p2, rng);
    let target = target_of(state, parity);
    let (qs, qp) = pellian_queries(state, degree);
    ledger.charge(qs, qp, degree, 1, !target.in_psi_basis());
    SampleOutcome {
        bit,
        state_after: StateAfter::Tracked(if bit { target } else { target.partner() }),
    }
}

/// Samples a semi-Pellian polynomial from a freshly prepared `|ψ⟩`.
pub fn sample_semi_pellian<R: Rng + ?Sized>(
    p: &PolySpec,
    a: Amplitude,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<SampleOutcome> {
    require_kind(p, Kind::SemiPellian)?;
    let bit = toss(p.p2(a.value()), rng);
    let (qs, qp) = semi_pellian_queries(GroverLabel::Psi, p.degree());
    ledger.charge(qs, qp, p.degree(), 1, p.parity() == Parity::Odd);
    Ok(SampleOutcome {
        bit,
        state_after: StateAfter::Reprepared,
    })
}

/// Takes `m` semi-Pellian samples from fresh copies of `|ψ⟩` and returns
/// the number of ones, drawn as a single binomial variate.
pub fn sample_semi_pellian_batch<R: Rng + ?Sized>(
    p: &PolySpec,
    a: Amplitude,
    m: u64,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<u64> {
    require_kind(p, Kind::SemiPellian)?;
    let heads = binomial(m, p.p2(a.value()), rng);
    let (qs, qp) = semi_pellian_queries(GroverLabel::Psi, p.degree());
    ledger.charge(qs, qp, p.degree(), m, p.parity() == Parity::Odd);
    Ok(heads)
}

/// A `Binomial(m, p)` variate.
pub fn binomial<R: Rng + ?Sized>(m: u64, p: f64, rng: &mut R) -> u64 {
    if m == 0 {
        return 0;
    }
    Binomial::new(m, p.clamp(0.0, 1.0))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

/// Measures in the other basis, i.e. samples `P(a) = a` without charging.
pub fn measure_basis_swap<R: Rng + ?Sized>(
    state: GroverLabel,
    a: Amplitude,
    rng: &mut R,
) -> GroverLabel {
    let mut scratch = QueryLedger::default();
    measure_basis_swap_charged(state, a, &mut scratch, rng)
}

/// [`measure_basis_swap`], charging the single query to `ledger`.
pub fn measure_basis_swap_charged<R: Rng + ?Sized>(
    state: GroverLabel,
    a: Amplitude,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> GroverLabel {
    let m = monomial();
    match sample_pellian(&m, state, a, ledger, rng)
        .expect("the monomial is Pellian")
        .state_after
    {
        StateAfter::Tracked(s) => s,
        StateAfter::Reprepared => unreachable!("Pellian samples are tracked"),
    }
}
