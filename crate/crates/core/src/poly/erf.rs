//! Odd polynomial approximations of `erf(kx)` on `[-2, 2]`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use libm::erf;

use super::chebyshev::{ChebSeries, CoeffParity};
use super::{Family, Kind, Parity, PolyParams, PolySpec, Shape, SupNormCertificate};
use crate::error::{check_open, Error, Result};

const DOMAIN: f64 = 2.0;
const ESCALATION: f64 = 1.25;
const DEGREE_CAP_FACTOR: u64 = 16;

/// `κ(τ) = ½·sqrt(2 ln(2/(πτ²)))`: beyond `|x| ≥ κ`, `erf(x)` is within
/// `τ` of `±1`.
pub fn kappa_of_tau(tau: f64) -> Result<f64> {
    let upper = (2.0 / PI).sqrt();
    if !(tau > 0.0 && tau < upper) {
        return Err(Error::Domain {
            name: "tau",
            value: tau,
            expected: "0 < tau < sqrt(2/pi)",
        });
    }
    Ok(0.5 * (2.0 * (2.0 / (PI * tau * tau)).ln()).sqrt())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `erf(x)` by composite Gauss–Legendre quadrature of `2/√π·e^{-t²}`.
///
/// Independent of any special-function library; accurate to about 1e-15.
pub fn erf_quadrature(x: f64) -> f64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (nodes, weights) = RULE.get_or_init(|| gauss_legendre(20));
    let z = x.abs().min(7.0);
    let panels = (z / 0.25).ceil().max(1.0) as usize;
    let h = z / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let panel: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(t, w)| {
                let s = mid + 0.5 * h * t;
                w * (-s * s).exp()
            })
            .sum();
        total += 0.5 * h * panel;
    }
    (2.0 / PI.sqrt() * total).copysign(x)
}

/// Initial odd degree from `sqrt((k² + L)·L)` with `L = ln(1/η)`.
pub fn erf_initial_degree(k: f64, eta: f64) -> u64 {
    let l = (1.0 / eta).ln();
    next_odd(((k * k + l) * l).sqrt().ceil() as u64)
}

fn next_odd(d: u64) -> u64 {
    if d % 2 == 1 {
        d
    } else {
        d + 1
    }
}

/// Interpolates `erf(kx)` on `[-2, 2]` at odd degree `degree` and measures
/// the sup error on a Chebyshev grid of `10·degree` points.
pub fn erf_attempt(k: f64, degree: u64) -> (ChebSeries, SupNormCertificate) {
    let d = degree as usize;
    let mut series = ChebSeries::interpolate(|x| erf(k * x), d + 1, DOMAIN);
    series.enforce_parity(CoeffParity::Odd);
    series.truncate(d);
    let grid = (10 * d).max(64);
    let (xs, ys) = series.eval_cheb_grid(grid);
    let mut worst = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - erf(k * x)).abs())
        .fold(0.0f64, f64::max);
    for x in [-DOMAIN, DOMAIN] {
        worst = worst.max((series.eval(x) - erf(k * x)).abs());
    }
    let cert = SupNormCertificate {
        grid_size: grid + 2,
        max_error: worst,
        bound: f64::NAN,
        pass: false,
    };
    (series, cert)
}

/// Builds the certified odd approximation of `erf(kx)` on `[-2, 2]`.
pub fn build_erf_poly(k: f64, eta: f64) -> Result<PolySpec> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Domain {
            name: "k",
            value: k,
            expected: "k >= 1",
        });
    }
    check_open("eta", eta, 0.0, 1.0)?;
    let start = erf_initial_degree(k, eta);
    let cap = start * DEGREE_CAP_FACTOR;
    let mut degree = start;
    loop {
        let (series, mut cert) = erf_attempt(k, degree);
        cert.bound = eta;
        cert.pass = cert.max_error <= eta;
        if cert.pass {
            return Ok(PolySpec {
                family: Family::Erf,
                parity: Parity::Odd,
                degree,
                kind: Kind::SemiPellian,
                params: PolyParams {
                    k: Some(k),
                    eta: Some(eta),
                    ..PolyParams::default()
                },
                shape: Shape::Series(Arc::new(series)),
                certificate: Some(cert),
            });
        }
        if degree >= cap {
            return Err(Error::ConstructionFailed(format!(
                "erf polynomial for k={k}, eta={eta} still has error {} at degree {degree}",
                cert.max_error
            )));
        }
        degree = next_odd(((degree as f64) * ESCALATION).ceil() as u64).min(next_odd(cap));
    }
}

type ErfKey = (u64, u64);

/// Shared cache of erf polynomials keyed by the exact `(k, η)` bit patterns.
pub fn erf_poly_cached(k: f64, eta: f64) -> Result<Arc<PolySpec>> {
    static CACHE: OnceLock<Mutex<HashMap<ErfKey, Arc<PolySpec>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (k.to_bits(), eta.to_bits());
    if let Some(hit) = cache.lock().expect("erf cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let built = Arc::new(build_erf_poly(k, eta)?);
    let mut guard = cache.lock().expect("erf cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_agrees_with_library_erf() {
        for i in -600..=600 {
            let x = i as f64 * 0.01;
            assert!((erf_quadrature(x) - erf(x)).abs() < 1e-14, "x={x}");
        }
        assert_eq!(erf_quadrature(0.0), 0.0);
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (n, w) = gauss_legendre(8);
        let integral: f64 = n.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn kappa_examples() {
        assert!((kappa_of_tau(0.1).unwrap() - 1.44).abs() < 0.005);
        assert!((kappa_of_tau(0.025).unwrap() - 1.87).abs() < 0.01);
        assert!((kappa_of_tau(0.001).unwrap() - 2.585).abs() < 0.001);
        assert!(kappa_of_tau(0.0).is_err());
        assert!(kappa_of_tau(0.8).is_err());
    }

    #[test]
    fn kappa_tail_bound_holds() {
        for &tau in &[0.3, 0.1, 0.025, 0.001] {
            let kappa = kappa_of_tau(tau).unwrap();
            for i in 0..200 {
                let x = kappa + i as f64 * 0.02;
                assert!(erf_quadrature(x) >= 1.0 - tau);
            }
        }
    }

    #[test]
    fn erf_line_fact() {
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            assert!(erf_quadrature(x) >= 0.8 * x);
            assert!(erf_quadrature(-x) <= -0.8 * x);
        }
    }

    #[test]
    fn erf_poly_reference_case() {
        let p = build_erf_poly(4.0, 0.025).unwrap();
        let cert = p.certificate().unwrap();
        assert!(cert.pass && cert.max_error <= 0.025);
        assert!(p.degree() % 2 == 1 && p.degree() <= 31, "degree {}", p.degree());
        assert_eq!(p.value(0.0), Some(0.0));
    }

    #[test]
    fn erf_poly_accuracy_against_quadrature() {
        let p = build_erf_poly(10.0, 0.01).unwrap();
        let v = p.value(0.5).unwrap();
        assert!((v - erf_quadrature(5.0)).abs() <= 0.01);
        for i in -100..=100 {
            let x = i as f64 * 0.02;
            assert!((p.value(x).unwrap() - erf_quadrature(10.0 * x)).abs() <= 0.01);
        }
    }

    #[test]
    fn erf_poly_rejects_bad_parameters() {
        assert!(build_erf_poly(0.5, 0.1).is_err());
        assert!(build_erf_poly(2.0, 0.0).is_err());
        assert!(build_erf_poly(2.0, 1.0).is_err());
    }

    #[test]
    fn cache_returns_shared_instance() {
        let a = erf_poly_cached(3.0, 0.05).unwrap();
        let b = erf_poly_cached(3.0, 0.05).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
