//! Even threshold polynomials that cross ½ near `a_mid` with slope about
//! `0.11·k`, assembled from an odd erf approximation.

use std::sync::Arc;

use super::erf::{erf_initial_degree, erf_poly_cached, kappa_of_tau};
use super::{Family, Kind, Parity, PolyParams, PolySpec, Shape, SupNormCertificate};
use crate::error::{check_open, check_range, Error, Result};

/// `λ = (2η + τ)/(4η + τ + 2)`.
pub fn hybrid_lambda(eta: f64, tau: f64) -> f64 {
    (2.0 * eta + tau) / (4.0 * eta + tau + 2.0)
}

fn validate(tau: f64, eta: f64, k: f64, a_mid: f64) -> Result<f64> {
    check_open("eta", eta, 0.0, 1.0)?;
    let kappa = kappa_of_tau(tau)?;
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Domain {
            name: "k",
            value: k,
            expected: "k >= 1",
        });
    }
    check_range("a_mid", a_mid, 0.0, 1.0, "0 <= a_mid <= 1")?;
    Ok(kappa)
}

/// Builds `P(a) = f₀(a - a_mid) + f₀(-a - a_mid)` with
/// `f₀(x) = (1 + P_erf(x) + η)/(4η + τ + 2)`, requiring `a_mid ≥ κ(τ)/k`.
pub fn build_hybrid_poly(tau: f64, eta: f64, k: f64, a_mid: f64) -> Result<PolySpec> {
    let kappa = validate(tau, eta, k, a_mid)?;
    if a_mid < kappa / k {
        return Err(Error::PreconditionViolated(format!(
            "a_mid = {a_mid} is below kappa/k = {}",
            kappa / k
        )));
    }
    assemble(tau, eta, k, a_mid, kappa)
}

/// Same construction without the `a_mid ≥ κ(τ)/k` requirement.
///
/// The result still satisfies `0 ≤ P ≤ 1`; only the threshold bounds near
/// `a_mid` may loosen when the mirrored erf term has not yet saturated.
pub fn build_hybrid_poly_unchecked(tau: f64, eta: f64, k: f64, a_mid: f64) -> Result<PolySpec> {
    let kappa = validate(tau, eta, k, a_mid)?;
    assemble(tau, eta, k, a_mid, kappa)
}

fn assemble(tau: f64, eta: f64, k: f64, a_mid: f64, kappa: f64) -> Result<PolySpec> {
    let erf = erf_poly_cached(k, eta)?;
    let series = match &erf.shape {
        Shape::Series(s) => Arc::clone(s),
        _ => unreachable!("erf polynomials are stored as series"),
    };
    let denom = 4.0 * eta + tau + 2.0;
    let erf_cert = erf.certificate().expect("erf polynomials are certified");
    // Each f₀ term deviates from its exact-erf counterpart by at most
    // err/denom, and the exact-erf combination lies in [0, 1].
    let certificate = SupNormCertificate {
        grid_size: erf_cert.grid_size,
        max_error: 2.0 * erf_cert.max_error / denom,
        bound: 2.0 * eta / denom,
        pass: erf_cert.pass,
    };
    Ok(PolySpec {
        family: Family::Hybrid,
        parity: Parity::Even,
        degree: erf.degree(),
        kind: Kind::SemiPellian,
        params: PolyParams {
            k: Some(k),
            eta: Some(eta),
            tau: Some(tau),
            a_mid: Some(a_mid),
            kappa: Some(kappa),
            ..PolyParams::default()
        },
        shape: Shape::Hybrid {
            erf: series,
            eta,
            denom,
            a_mid,
        },
        certificate: Some(certificate),
    })
}

/// The exact target `clip(½ + 0.11k(|a| - a_mid), 0, 1)`, charged at the
/// nominal erf degree for `(k, η)`.
pub fn hybrid_ideal(tau: f64, eta: f64, k: f64, a_mid: f64) -> Result<PolySpec> {
    let kappa = validate(tau, eta, k, a_mid)?;
    let degree = erf_initial_degree(k, eta);
    Ok(PolySpec {
        family: Family::Hybrid,
        parity: Parity::Even,
        degree: degree + 1,
        kind: Kind::SemiPellian,
        params: PolyParams {
            k: Some(k),
            eta: Some(eta),
            tau: Some(tau),
            a_mid: Some(a_mid),
            kappa: Some(kappa),
            nominal_degree: Some(degree),
            ..PolyParams::default()
        },
        shape: Shape::HybridIdeal { k, a_mid },
        certificate: None,
    })
}
