use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::Row;
use crate::error::{Error, Result};

/// Minimum runs per `ε` for a fit.
pub const MIN_RUNS_PER_EPS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub eps: f64,
    pub runs: usize,
    pub mean_q_pi: f64,
    pub min_q_pi: u64,
    pub max_q_pi: u64,
    pub failure_rate: f64,
}

/// Fits of `A ε⁻¹ ln(B ln ε⁻¹)` and `C/ε` to the per-`ε` mean of `Q_Π`.
/// Errors are maximum relative deviations `|f − Q|/Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub algorithm: String,
    pub a: f64,
    pub delta: f64,
    pub points: Vec<FitPoint>,
    pub a_param: f64,
    pub b_param: f64,
    pub ab_max_rel_err_mean: f64,
    pub ab_max_rel_err_all: f64,
    pub c_param: f64,
    pub c_max_rel_err_mean: f64,
    pub c_max_rel_err_all: f64,
}

/// Reads the rows of a sweep CSV, skipping `#` lines.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    reader
        .deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::InsufficientData(format!("malformed row: {e}"))))
        .collect()
}

fn f_ab(a: f64, b: f64, eps: f64) -> f64 {
    a / eps * (b * (1.0 / eps).ln()).ln()
}

fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(move |i| lo + step * i as f64)
}

fn max_rel_err<F: Fn(f64) -> f64>(f: F, pts: &[(f64, f64)]) -> f64 {
    pts.iter()
        .map(|&(eps, q)| (f(eps) - q).abs() / q)
        .fold(0.0, f64::max)
}

/// Fits both models to rows of a single-algorithm `ε` sweep at fixed `(a, δ)`.
pub fn fit_rows(rows: &[Row]) -> Result<FitReport> {
    let first = rows
        .first()
        .ok_or_else(|| Error::InsufficientData("no rows".into()))?;
    if rows
        .iter()
        .any(|r| r.algorithm != first.algorithm || r.a != first.a || r.delta != first.delta)
    {
        return Err(Error::InsufficientData(
            "rows mix algorithms or (a, delta) values".into(),
        ));
    }

    let mut by_eps: BTreeMap<u64, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        by_eps.entry(r.eps.to_bits()).or_default().push(r);
    }
    if by_eps.len() < 2 {
        return Err(Error::InsufficientData("need at least two eps values".into()));
    }
    let mut points = Vec::new();
    for (bits, group) in &by_eps {
        let eps = f64::from_bits(*bits);
        if group.len() < MIN_RUNS_PER_EPS {
            return Err(Error::InsufficientData(format!(
                "eps = {eps} has {} runs, need {MIN_RUNS_PER_EPS}",
                group.len()
            )));
        }
        let n = group.len();
        points.push(FitPoint {
            eps,
            runs: n,
            mean_q_pi: group.iter().map(|r| r.q_pi as f64).sum::<f64>() / n as f64,
            min_q_pi: group.iter().map(|r| r.q_pi).min().unwrap_or(0),
            max_q_pi: group.iter().map(|r| r.q_pi).max().unwrap_or(0),
            failure_rate: group.iter().filter(|r| !r.success).count() as f64 / n as f64,
        });
    }
    points.sort_by(|p, q| q.eps.total_cmp(&p.eps));

    let means: Vec<(f64, f64)> = points.iter().map(|p| (p.eps, p.mean_q_pi)).collect();
    let all: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.q_pi as f64)).collect();

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for a in grid(0.5, 6.0, 0.01) {
        for b in grid(1.0, 12.0, 0.01) {
            let err = max_rel_err(|e| f_ab(a, b, e), &means);
            if err < best.0 {
                best = (err, a, b);
            }
        }
    }
    let (ab_err, a_param, b_param) = best;

    // Minimax for `|C/r − 1|` over `r = ε·⟨Q⟩` balances the extreme ratios.
    let ratios: Vec<f64> = means.iter().map(|&(e, q)| e * q).collect();
    let r_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = ratios.iter().copied().fold(0.0, f64::max);
    let c_param = 2.0 / (1.0 / r_min + 1.0 / r_max);

    Ok(FitReport {
        algorithm: first.algorithm.clone(),
        a: first.a,
        delta: first.delta,
        ab_max_rel_err_mean: ab_err,
        ab_max_rel_err_all: max_rel_err(|e| f_ab(a_param, b_param, e), &all),
        c_max_rel_err_mean: max_rel_err(|e| c_param / e, &means),
        c_max_rel_err_all: max_rel_err(|e| c_param / e, &all),
        points,
        a_param,
        b_param,
        c_param,
    })
}

/// Reads a sweep CSV and fits it.
pub fn fit_models<R: Read>(input: R) -> Result<FitReport> {
    fit_rows(&read_rows(input)?)
}
