//! The outcome of one estimation run.

use serde::{Deserialize, Serialize};

use crate::grover::GroverLabel;
use crate::sampler::{QueryLedger, StateAfter};
use crate::stats::ConfidenceInterval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub a_hat: f64,
    /// Final interval, when the method produces one.
    pub interval: Option<ConfidenceInterval>,
    pub ledger: QueryLedger,
    pub final_state: StateAfter,
    /// Main-loop iterations (ChebAE) or rounds (interval-shrinking methods).
    pub iterations: u64,
    /// Set when the run ended through an edge case worth surfacing, such as
    /// a target accuracy that needs no sampling at all.
    pub flagged: bool,
}

impl RunRecord {
    /// `|â - a| ≤ ε`.
    pub fn success(&self, a: f64, epsilon: f64) -> bool {
        (self.a_hat - a).abs() <= epsilon
    }

    pub fn final_label(&self) -> Option<GroverLabel> {
        match self.final_state {
            StateAfter::Tracked(s) => Some(s),
            StateAfter::Reprepared => None,
        }
    }

    /// Label used in CSV output.
    pub fn final_state_name(&self) -> &'static str {
        match self.final_state {
            StateAfter::Tracked(s) => s.as_str(),
            StateAfter::Reprepared => "reprepared",
        }
    }
}
