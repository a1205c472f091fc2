use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    build_chebyshev, build_erf_poly, build_hybrid_poly, build_line_poly, build_repair_pair, hybrid_ideal,
    PolyMode, PolySpec,
};

/// First line of every polynomial dump.
pub const POLY_HEADER: &str = "# qae-poly v1";

/// A polynomial to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PolyRequest {
    Chebyshev { d: u64 },
    Line { a_min: f64, a_max: f64, eta: f64, mode: PolyMode },
    Erf { k: f64, eta: f64 },
    Hybrid { tau: f64, eta: f64, k: f64, a_mid: f64, mode: PolyMode },
    FixedPointJ { kappa: f64, eta: f64 },
    FixedPointK { kappa: f64, eta: f64 },
}

impl PolyRequest {
    pub fn family_name(&self) -> &'static str {
        match self {
            PolyRequest::Chebyshev { .. } => "chebyshev",
            PolyRequest::Line { .. } => "line",
            PolyRequest::Erf { .. } => "erf",
            PolyRequest::Hybrid { .. } => "hybrid",
            PolyRequest::FixedPointJ { .. } => "fixed-point-j",
            PolyRequest::FixedPointK { .. } => "fixed-point-k",
        }
    }

    pub fn build(&self) -> Result<PolySpec> {
        match *self {
            PolyRequest::Chebyshev { d } => build_chebyshev(d),
            PolyRequest::Line { a_min, a_max, eta, mode } => build_line_poly(a_min, a_max, eta, mode),
            PolyRequest::Erf { k, eta } => build_erf_poly(k, eta),
            PolyRequest::Hybrid { tau, eta, k, a_mid, mode } => match mode {
                PolyMode::Ideal => hybrid_ideal(tau, eta, k, a_mid),
                PolyMode::Polynomial => build_hybrid_poly(tau, eta, k, a_mid),
            },
            PolyRequest::FixedPointJ { kappa, eta } => Ok(build_repair_pair(kappa, eta)?.0),
            PolyRequest::FixedPointK { kappa, eta } => Ok(build_repair_pair(kappa, eta)?.1),
        }
    }
}

/// Writes `x, value, p2` on `points` equally spaced `x` in `[-1, 1]`.
/// The second line is a JSON comment describing the polynomial. `value` is
/// empty for families defined only through `|P|²`.
pub fn dump_poly<W: Write>(req: &PolyRequest, points: usize, sink: W) -> Result<PolySpec> {
    if points < 2 {
        return Err(Error::Config("a dump needs at least two points".into()));
    }
    let p = req.build()?;
    let meta = serde_json::json!({
        "family": req.family_name(),
        "request": req,
        "degree": p.degree(),
        "parity": format!("{:?}", p.parity()).to_lowercase(),
        "kind": format!("{:?}", p.kind()).to_lowercase(),
        "params": p.params(),
        "certificate": p.certificate(),
    });
    let mut sink = sink;
    writeln!(sink, "{POLY_HEADER}")?;
    writeln!(sink, "# {meta}")?;
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["x", "value", "p2"])?;
    for i in 0..points {
        let x = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
        w.serialize((x, p.value(x), p.p2(x)))?;
    }
    w.flush()?;
    Ok(p)
}
