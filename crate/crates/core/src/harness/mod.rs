//! Sweep configuration, per-run dispatch and the CSV row format.

mod dump;
mod fit;
mod sweep;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{classical_mc, mlae_estimate, MlaeSchedule};
use crate::chebae::{chebae_estimate, ChainMode, ChebAEConfig};
use crate::error::{Error, Result};
use crate::grover::Amplitude;
use crate::hybrid::{hybrid_estimate, HybridConfig};
use crate::poly::PolyMode;
use crate::record::RunRecord;
use crate::repair::{nondestructive_chebae, RepairConfig};
use crate::rng::{rng_from_seed, substream_seed};
use crate::unbiased::{unbiased_estimate, UnbiasedConfig};

pub use dump::{dump_poly, PolyRequest, POLY_HEADER};
pub use fit::{fit_models, fit_rows, read_rows, FitPoint, FitReport};
pub use sweep::{resolve_workers, run_sweep, run_sweep_to, SweepSummary};

/// First line of every sweep CSV.
pub const CSV_HEADER: &str = "# qae-csv v1";

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "QAE_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Chebae,
    RepairChebae,
    Unbiased,
    Hybrid,
    Mlae,
    Classical,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Chebae,
        Algorithm::RepairChebae,
        Algorithm::Unbiased,
        Algorithm::Hybrid,
        Algorithm::Mlae,
        Algorithm::Classical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Chebae => "chebae",
            Algorithm::RepairChebae => "repair-chebae",
            Algorithm::Unbiased => "unbiased",
            Algorithm::Hybrid => "hybrid",
            Algorithm::Mlae => "mlae",
            Algorithm::Classical => "classical",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// Values swept over. Every combination is one cell; parameters an
/// algorithm does not use still multiply the cell count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamGrid {
    pub a: Vec<f64>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub beta: Vec<f64>,
    pub eta: Vec<f64>,
    pub mu: Vec<f64>,
    /// MLAE schedule exponent `K`.
    pub mlae_k: Vec<u32>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            a: vec![0.5],
            eps: vec![1e-3],
            delta: vec![0.05],
            beta: vec![0.0],
            eta: vec![0.1],
            mu: vec![0.05],
            mlae_k: vec![6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub grid: ParamGrid,
    #[serde(default)]
    pub mode: PolyMode,
    pub runs: u64,
    #[serde(default)]
    pub seed: u64,
    /// Destination CSV; `None` writes to standard output.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Simulate the amplitude `(1 + a)/2` in place of `a`.
    #[serde(default)]
    pub shift_amplitude: bool,
}

impl SweepConfig {
    pub fn new(algorithm: Algorithm, runs: u64) -> Self {
        Self {
            algorithm,
            grid: ParamGrid::default(),
            mode: PolyMode::default(),
            runs,
            seed: 0,
            out: None,
            workers: None,
            shift_amplitude: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let lists: [(&str, usize); 7] = [
            ("a", g.a.len()),
            ("eps", g.eps.len()),
            ("delta", g.delta.len()),
            ("beta", g.beta.len()),
            ("eta", g.eta.len()),
            ("mu", g.mu.len()),
            ("mlae_k", g.mlae_k.len()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, n)| *n == 0) {
            return Err(Error::Config(format!("grid list `{name}` is empty")));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        for cell in self.cells() {
            cell.validate(self.algorithm)?;
        }
        Ok(())
    }

    /// Cells in row order: `a` varies slowest, `mlae_k` fastest.
    pub fn cells(&self) -> Vec<Cell> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &a in &g.a {
            for &eps in &g.eps {
                for &delta in &g.delta {
                    for &beta in &g.beta {
                        for &eta in &g.eta {
                            for &mu in &g.mu {
                                for &mlae_k in &g.mlae_k {
                                    let a = if self.shift_amplitude { 0.5 * (1.0 + a) } else { a };
                                    out.push(Cell {
                                        a,
                                        eps,
                                        delta,
                                        beta,
                                        eta,
                                        mu,
                                        mlae_k,
                                        mode: self.mode,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub a: f64,
    pub eps: f64,
    pub delta: f64,
    pub beta: f64,
    pub eta: f64,
    pub mu: f64,
    pub mlae_k: u32,
    pub mode: PolyMode,
}

impl Cell {
    fn validate(&self, algo: Algorithm) -> Result<()> {
        Amplitude::new(self.a)?;
        match algo {
            Algorithm::Chebae => ChebAEConfig::new(self.eps, self.delta).validate(),
            Algorithm::RepairChebae => {
                ChebAEConfig::new(self.eps, self.delta).validate()?;
                RepairConfig::new(self.mu).validate()
            }
            Algorithm::Unbiased => UnbiasedConfig::new(self.eps, self.delta, self.eta).validate(),
            Algorithm::Hybrid => HybridConfig::new(self.eps, self.delta, self.beta).validate(),
            Algorithm::Mlae => MlaeSchedule::new(self.mlae_k).validate().and_then(|_| {
                crate::error::check_open("delta", self.delta, 0.0, 1.0)
            }),
            Algorithm::Classical => {
                crate::error::check_open("epsilon", self.eps, 0.0, 1.0)?;
                crate::error::check_open("delta", self.delta, 0.0, 1.0)
            }
        }
    }

    /// Runs `algo` once on this cell with the given seed.
    pub fn run(&self, algo: Algorithm, seed: u64) -> Result<RunRecord> {
        let a = Amplitude::new(self.a)?;
        let mut rng = rng_from_seed(seed);
        match algo {
            Algorithm::Chebae => chebae_estimate(a, &ChebAEConfig::new(self.eps, self.delta), &mut rng),
            Algorithm::RepairChebae => nondestructive_chebae(
                a,
                &ChebAEConfig::new(self.eps, self.delta).with_mode(ChainMode::Tracked),
                &RepairConfig::new(self.mu),
                &mut rng,
            ),
            Algorithm::Unbiased => unbiased_estimate(
                a,
                &UnbiasedConfig::new(self.eps, self.delta, self.eta).with_mode(self.mode),
                &mut rng,
            ),
            Algorithm::Hybrid => hybrid_estimate(
                a,
                &HybridConfig::new(self.eps, self.delta, self.beta).with_mode(self.mode),
                &mut rng,
            ),
            Algorithm::Mlae => mlae_estimate(a, &MlaeSchedule::new(self.mlae_k), self.delta, &mut rng),
            Algorithm::Classical => classical_mc(a, self.eps, self.delta, &mut rng),
        }
    }
}

/// One CSV row. For MLAE, `eps` holds the half-width of the reported
/// likelihood-ratio interval, since the method has no target accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub run_id: u64,
    pub algorithm: String,
    pub a: f64,
    pub eps: f64,
    pub delta: f64,
    pub beta: f64,
    pub eta: f64,
    pub mu: f64,
    pub seed: u64,
    pub a_hat: f64,
    pub abs_err: f64,
    pub success: bool,
    pub q_psi: u64,
    pub q_pi: u64,
    pub d_max: u64,
    pub d_total: u64,
    pub tosses: u64,
    pub final_state: String,
    pub wall_us: u64,
}

impl Row {
    pub fn new(run_id: u64, algo: Algorithm, cell: &Cell, seed: u64, rec: &RunRecord, wall_us: u64) -> Self {
        let eps = match (algo, rec.interval) {
            (Algorithm::Mlae, Some(ci)) => 0.5 * ci.width(),
            _ => cell.eps,
        };
        let abs_err = (rec.a_hat - cell.a).abs();
        Row {
            run_id,
            algorithm: algo.as_str().to_string(),
            a: cell.a,
            eps,
            delta: cell.delta,
            beta: cell.beta,
            eta: cell.eta,
            mu: cell.mu,
            seed,
            a_hat: rec.a_hat,
            abs_err,
            success: abs_err <= eps,
            q_psi: rec.ledger.q_psi,
            q_pi: rec.ledger.q_pi,
            d_max: rec.ledger.d_max,
            d_total: rec.ledger.d_total,
            tosses: rec.ledger.tosses,
            final_state: rec.final_state_name().to_string(),
            wall_us,
        }
    }
}

/// Seed of run `run` in cell `cell`.
pub fn run_seed(base: u64, cell: usize, run: u64) -> u64 {
    substream_seed(base, cell as u64, run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{}\"", a.as_str()));
        }
        assert!("iqae".parse::<Algorithm>().is_err());
    }

    #[test]
    fn cell_order_and_count() {
        let mut cfg = SweepConfig::new(Algorithm::Chebae, 3);
        cfg.grid.a = vec![0.2, 0.4];
        cfg.grid.eps = vec![1e-2, 1e-3, 1e-4];
        let cells = cfg.cells();
        assert_eq!(cells.len(), 6);
        assert_eq!((cells[0].a, cells[0].eps), (0.2, 1e-2));
        assert_eq!((cells[1].a, cells[1].eps), (0.2, 1e-3));
        assert_eq!((cells[3].a, cells[3].eps), (0.4, 1e-2));
    }

    #[test]
    fn config_json() {
        let cfg = SweepConfig::from_json(
            r#"{"algorithm": "hybrid", "runs": 5, "seed": 3,
                "grid": {"beta": [0.0, 0.5]}, "mode": "polynomial"}"#,
        )
        .unwrap();
        assert_eq!(cfg.algorithm, Algorithm::Hybrid);
        assert_eq!(cfg.mode, PolyMode::Polynomial);
        assert_eq!(cfg.cells().len(), 2);
        assert!(SweepConfig::from_json(r#"{"algorithm": "chebae", "runs": 0}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"algorithm": "chebae", "runs": 1, "grid": {"a": [1.5]}}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"algorithm": "chebae", "runs": 1, "bogus": 1}"#).is_err());
    }

    #[test]
    fn shifted_amplitude() {
        let mut cfg = SweepConfig::new(Algorithm::Chebae, 1);
        cfg.grid.a = vec![0.2];
        cfg.shift_amplitude = true;
        assert!((cfg.cells()[0].a - 0.6).abs() < 1e-15);
    }

    #[test]
    fn every_algorithm_runs() {
        for algo in Algorithm::ALL {
            let cell = Cell {
                a: 0.4,
                eps: 2e-2,
                delta: 0.05,
                beta: 0.3,
                eta: 0.1,
                mu: 0.1,
                mlae_k: 3,
                mode: PolyMode::Ideal,
            };
            cell.validate(algo).unwrap();
            let rec = cell.run(algo, 11).unwrap();
            let row = Row::new(0, algo, &cell, 11, &rec, 0);
            assert_eq!(row.success, row.abs_err <= row.eps);
            assert!(row.q_psi + row.q_pi > 0, "{algo}");
        }
    }
}
