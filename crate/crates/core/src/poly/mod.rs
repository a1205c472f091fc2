//! Polynomial families used for sampling, with construction certificates.

pub mod chebyshev;
pub mod erf;
pub mod fixed_point;
pub mod hybrid;
pub mod line;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use chebyshev::{cheb_t, cheb_t_sq, ChebSeries};
pub use erf::{build_erf_poly, erf_poly_cached, kappa_of_tau};
pub use fixed_point::{build_repair_pair, fixed_point_degree};
pub use hybrid::{build_hybrid_poly, build_hybrid_poly_unchecked, hybrid_ideal, hybrid_lambda};
pub use line::{build_line_poly, build_line_poly_with_width, line_nominal_degree};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Chebyshev,
    Line,
    Erf,
    Hybrid,
    FixedPointJ,
    FixedPointK,
    Monomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: u64) -> Self {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Whether a polynomial can be sampled directly (Pellian) or needs the
/// flag-qubit construction (semi-Pellian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Pellian,
    SemiPellian,
}

/// `Ideal` replaces a constructed polynomial by the exact target function it
/// approximates, charged at the nominal degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyMode {
    #[default]
    Ideal,
    Polynomial,
}

impl fmt::Display for PolyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolyMode::Ideal => "ideal",
            PolyMode::Polynomial => "polynomial",
        })
    }
}

/// Family-specific construction parameters, kept for reporting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolyParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_mid: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nominal_degree: Option<u64>,
}

/// Result of checking a constructed polynomial against its error bound on
/// a dense grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNormCertificate {
    pub grid_size: usize,
    pub max_error: f64,
    pub bound: f64,
    pub pass: bool,
}

impl SupNormCertificate {
    pub fn new(grid_size: usize, max_error: f64, bound: f64) -> Self {
        Self {
            grid_size,
            max_error,
            bound,
            pass: max_error <= bound,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Shape {
    Chebyshev,
    Monomial,
    Series(Arc<ChebSeries>),
    LineIdeal {
        a_min: f64,
        delta: f64,
    },
    Hybrid {
        erf: Arc<ChebSeries>,
        eta: f64,
        denom: f64,
        a_mid: f64,
    },
    HybridIdeal {
        k: f64,
        a_mid: f64,
    },
    FixedPointJ(fixed_point::JShape),
    FixedPointK(fixed_point::JShape),
}

/// A fixed-parity polynomial together with the bias `|P(x)|²` it induces.
#[derive(Debug, Clone)]
pub struct PolySpec {
    pub(crate) family: Family,
    pub(crate) parity: Parity,
    pub(crate) degree: u64,
    pub(crate) kind: Kind,
    pub(crate) params: PolyParams,
    pub(crate) shape: Shape,
    pub(crate) certificate: Option<SupNormCertificate>,
}

impl PolySpec {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn params(&self) -> &PolyParams {
        &self.params
    }

    pub fn certificate(&self) -> Option<&SupNormCertificate> {
        self.certificate.as_ref()
    }

    /// Wraps an arbitrary Chebyshev series; the caller vouches for parity.
    pub fn from_series(family: Family, parity: Parity, kind: Kind, series: ChebSeries) -> Self {
        Self {
            family,
            parity,
            degree: series.degree() as u64,
            kind,
            params: PolyParams::default(),
            shape: Shape::Series(Arc::new(series)),
            certificate: None,
        }
    }

    pub fn has_value(&self) -> bool {
        !matches!(self.shape, Shape::FixedPointK(_))
    }

    /// `P(x)`, or `None` for families defined only through `|P|²`.
    pub fn value(&self, x: f64) -> Option<f64> {
        Some(match &self.shape {
            Shape::Chebyshev => cheb_t(self.degree, x),
            Shape::Monomial => x,
            Shape::Series(s) => s.eval(x),
            Shape::LineIdeal { a_min, delta } => ((x.abs() - a_min) / delta).clamp(0.0, 1.0).sqrt(),
            Shape::Hybrid {
                erf,
                eta,
                denom,
                a_mid,
            } => {
                let f0 = |y: f64| (1.0 + erf.eval(y) + eta) / denom;
                f0(x - a_mid) + f0(-x - a_mid)
            }
            Shape::HybridIdeal { k, a_mid } => {
                (0.5 + 0.11 * k * (x.abs() - a_mid)).clamp(0.0, 1.0)
            }
            Shape::FixedPointJ(j) => j.value(x),
            Shape::FixedPointK(_) => return None,
        })
    }

    /// `|P(x)|²`, clamped to `[0, 1]`.
    pub fn p2(&self, x: f64) -> f64 {
        let raw = match &self.shape {
            Shape::Chebyshev => cheb_t_sq(self.degree, x),
            Shape::LineIdeal { a_min, delta } => ((x.abs() - a_min) / delta).clamp(0.0, 1.0),
            Shape::FixedPointK(j) => {
                let y = (1.0 - x * x).max(0.0).sqrt();
                let v = j.value(y);
                1.0 - v * v
            }
            _ => {
                let v = self.value(x).expect("value family");
                v * v
            }
        };
        raw.clamp(0.0, 1.0)
    }
}

/// `T_d` as a Pellian sampling target.
pub fn build_chebyshev(d: u64) -> Result<PolySpec> {
    if d == 0 {
        return Err(Error::Domain {
            name: "d",
            value: 0.0,
            expected: "d >= 1",
        });
    }
    Ok(PolySpec {
        family: Family::Chebyshev,
        parity: Parity::of_degree(d),
        degree: d,
        kind: Kind::Pellian,
        params: PolyParams::default(),
        shape: Shape::Chebyshev,
        certificate: None,
    })
}

/// `P(a) = a`, which samples a measurement in the other basis.
pub fn monomial() -> PolySpec {
    PolySpec {
        family: Family::Monomial,
        parity: Parity::Odd,
        degree: 1,
        kind: Kind::Pellian,
        params: PolyParams::default(),
        shape: Shape::Monomial,
        certificate: None,
    }
}

/// Checks `|P(x)| ≤ 1` and the parity symmetry on a uniform grid of `[-1, 1]`.
pub fn verify_semi_pellian(p: &PolySpec, grid_points: usize) -> Result<SupNormCertificate> {
    if !p.has_value() {
        return Err(Error::PreconditionViolated(
            "verify_semi_pellian needs a polynomial with a value evaluator".into(),
        ));
    }
    let n = grid_points.max(2);
    let sign = p.parity.sign();
    let mut max_abs = 0.0f64;
    let mut parity_ok = true;
    for i in 0..n {
        let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
        let v = p.value(x).expect("checked above");
        let mirrored = p.value(-x).expect("checked above");
        max_abs = max_abs.max(v.abs());
        if (v - sign * mirrored).abs() > 1e-9 {
            parity_ok = false;
        }
    }
    let mut cert = SupNormCertificate::new(n, max_abs, 1.0 + 1e-9);
    cert.pass &= parity_ok;
    Ok(cert)
}

/// Grid size used by construction certificates.
pub(crate) fn certificate_grid(degree: u64) -> usize {
    (10 * degree as usize).max(100)
}
