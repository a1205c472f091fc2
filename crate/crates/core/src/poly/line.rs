//! Even polynomials whose squared magnitude follows the line
//! `(x - a_min) / Δ` across `[a_min, a_max]`.

use std::sync::Arc;

use super::chebyshev::{ChebSeries, CoeffParity};
use super::{
    certificate_grid, Family, Kind, Parity, PolyMode, PolyParams, PolySpec, Shape,
    SupNormCertificate,
};
use crate::error::{check_open, Error, Result};

const ESCALATION: f64 = 1.25;
const DEGREE_CAP_FACTOR: u64 = 8;

fn even_ceil(x: f64) -> u64 {
    let d = x.ceil().max(2.0) as u64;
    d + d % 2
}

/// `⌈1/(ηΔ)⌉` rounded up to even, the degree charged for a line polynomial.
pub fn line_nominal_degree(delta: f64, eta: f64) -> u64 {
    even_ceil(1.0 / (eta * delta))
}

/// Scale applied to the target line so the interpolant stays below 1.
pub(crate) fn headroom(eta: f64) -> f64 {
    1.0 - 0.5 * eta
}

fn validate(a_min: f64, a_max: f64, eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a_min) || !(a_max > a_min && a_max <= 1.0) {
        return Err(Error::Domain {
            name: "interval",
            value: a_max - a_min,
            expected: "0 <= a_min < a_max <= 1",
        });
    }
    check_open("eta", eta, 0.0, 1.0)
}

/// Interpolates the even target at `degree` and certifies it.
pub fn line_attempt(a_min: f64, delta: f64, eta: f64, degree: u64) -> (ChebSeries, SupNormCertificate) {
    let c = headroom(eta);
    let target = |x: f64| (c * ((x.abs() - a_min) / delta).clamp(0.0, 1.0)).sqrt();
    let mut series = ChebSeries::interpolate(target, degree as usize + 1, 1.0);
    series.enforce_parity(CoeffParity::Even);

    let grid = certificate_grid(degree);
    let line_err = (0..grid)
        .map(|i| {
            let x = a_min + delta * i as f64 / (grid - 1) as f64;
            let v = series.eval(x);
            (v * v - (x - a_min) / delta).abs()
        })
        .fold(0.0f64, f64::max);
    let (_, values) = series.eval_cheb_grid(grid.max(degree as usize + 1));
    let peak = values
        .iter()
        .chain([series.eval(1.0)].iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut cert = SupNormCertificate::new(grid, line_err, eta);
    cert.pass &= peak <= 1.0;
    (series, cert)
}

/// Builds the line polynomial for `[a_min, a_max]` with accuracy `η`.
pub fn build_line_poly(a_min: f64, a_max: f64, eta: f64, mode: PolyMode) -> Result<PolySpec> {
    build_line_poly_with_width(a_min, a_max - a_min, eta, mode)
}

/// [`build_line_poly`] for `[a_min, a_min + delta]`, taking the width as
/// given so callers that track it exactly get reproducible degrees.
pub fn build_line_poly_with_width(
    a_min: f64,
    delta: f64,
    eta: f64,
    mode: PolyMode,
) -> Result<PolySpec> {
    // Tracked widths can overshoot 1 by a few ulps.
    let a_max = a_min + delta;
    let a_max = if a_max <= 1.0 + 1e-12 { a_max.min(1.0) } else { a_max };
    validate(a_min, a_max, eta)?;
    let nominal = line_nominal_degree(delta, eta);
    let params = PolyParams {
        eta: Some(eta),
        a_min: Some(a_min),
        a_max: Some(a_max),
        nominal_degree: Some(nominal),
        ..PolyParams::default()
    };
    let mut spec = PolySpec {
        family: Family::Line,
        parity: Parity::Even,
        degree: nominal,
        kind: Kind::SemiPellian,
        params,
        shape: Shape::LineIdeal { a_min, delta },
        certificate: None,
    };
    if mode == PolyMode::Ideal {
        return Ok(spec);
    }

    let cap = nominal * DEGREE_CAP_FACTOR;
    let mut degree = nominal;
    loop {
        let (series, cert) = line_attempt(a_min, delta, eta, degree);
        if cert.pass {
            spec.degree = degree;
            spec.shape = Shape::Series(Arc::new(series));
            spec.certificate = Some(cert);
            return Ok(spec);
        }
        if degree >= cap {
            return Err(Error::ConstructionFailed(format!(
                "line polynomial on [{a_min}, {a_max}] with eta={eta} fails at degree {degree} (error {})",
                cert.max_error
            )));
        }
        degree = even_ceil(degree as f64 * ESCALATION).min(cap);
    }
}
