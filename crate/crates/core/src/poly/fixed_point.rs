//! The fixed-point pair `(J, K)` used to steer a damaged state back to `|ψ⟩`.
//!
//! `J(x) = T_l(x/γ) / T_l(1/γ)` with `γ = sqrt(1 - κ²)` is tiny on
//! `|x| ≤ γ` and reaches 1 at `x = 1`. `K` is defined through its squared
//! magnitude `|K(x)|² = 1 - |J(sqrt(1 - x²))|²`.

use super::chebyshev::ln_cheb_t_outside;
use super::{Family, Kind, Parity, PolyParams, PolySpec, Shape};
use crate::error::{check_open, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct JShape {
    l: u64,
    inv_gamma: f64,
    ln_denom: f64,
}

impl JShape {
    pub(crate) fn value(&self, x: f64) -> f64 {
        let y = x * self.inv_gamma;
        if y.abs() <= 1.0 {
            (self.l as f64 * y.acos()).cos() * (-self.ln_denom).exp()
        } else {
            let sign = if y < 0.0 { -1.0 } else { 1.0 };
            sign * (ln_cheb_t_outside(self.l, y) - self.ln_denom).exp().min(1.0)
        }
    }
}

/// Smallest odd `l ≥ ln(2/√η) / κ`.
pub fn fixed_point_degree(kappa: f64, eta: f64) -> u64 {
    let raw = ((2.0 / eta.sqrt()).ln() / kappa).ceil().max(1.0) as u64;
    if raw % 2 == 1 {
        raw
    } else {
        raw + 1
    }
}

/// Builds `(J, K)` for threshold `κ` and leakage `η`.
pub fn build_repair_pair(kappa: f64, eta: f64) -> Result<(PolySpec, PolySpec)> {
    check_open("kappa", kappa, 0.0, 1.0)?;
    check_open("eta", eta, 0.0, 1.0)?;
    let l = fixed_point_degree(kappa, eta);
    let gamma = (1.0 - kappa * kappa).sqrt();
    let inv_gamma = 1.0 / gamma;
    let shape = JShape {
        l,
        inv_gamma,
        ln_denom: ln_cheb_t_outside(l, inv_gamma),
    };
    let params = PolyParams {
        kappa: Some(kappa),
        eta: Some(eta),
        gamma_scale: Some(gamma),
        l: Some(l),
        ..PolyParams::default()
    };
    let make = |family, shape| PolySpec {
        family,
        parity: Parity::Odd,
        degree: l,
        kind: Kind::Pellian,
        params: params.clone(),
        shape,
        certificate: None,
    };
    Ok((
        make(Family::FixedPointJ, Shape::FixedPointJ(shape)),
        make(Family::FixedPointK, Shape::FixedPointK(shape)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{cheb_t, verify_semi_pellian};

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    #[test]
    fn reference_degree() {
        let (j, k) = build_repair_pair(0.25, 0.1).unwrap();
        assert_eq!(j.degree(), 9);
        assert_eq!(k.degree(), 9);
        assert_eq!(j.params().l, Some(9));
    }

    #[test]
    fn j_and_k_bounds() {
        for &(kappa, eta) in &[(0.25, 0.1), (0.05, 0.01), (0.6, 0.3), (1e-3, 0.02)] {
            let (j, k) = build_repair_pair(kappa, eta).unwrap();
            let gamma = (1.0 - kappa * kappa).sqrt();
            for x in grid(-gamma, gamma, 501) {
                assert!(j.p2(x) <= eta, "J at {x} for kappa={kappa}");
            }
            for x in grid(kappa, 1.0, 501) {
                assert!(k.p2(x) >= 1.0 - eta, "K at {x} for kappa={kappa}");
            }
            assert!((j.value(1.0).unwrap() - 1.0).abs() < 1e-12);
            assert!(k.value(0.3).is_none());
        }
    }

    #[test]
    fn j_is_bounded_and_odd() {
        let (j, _) = build_repair_pair(0.25, 0.1).unwrap();
        assert!(verify_semi_pellian(&j, 1000).unwrap().pass);
    }

    #[test]
    fn j_matches_closed_form_for_small_degree() {
        let (j, _) = build_repair_pair(0.25, 0.1).unwrap();
        let g = (1.0f64 - 0.0625).sqrt();
        for x in grid(-1.0, 1.0, 101) {
            let expect = cheb_t(9, x / g) / cheb_t(9, 1.0 / g);
            assert!((j.value(x).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_extremality() {
        for &(kappa, eta) in &[(0.25, 0.1), (0.1, 0.05), (0.4, 0.2)] {
            let (j, _) = build_repair_pair(kappa, eta).unwrap();
            let l = j.degree();
            let lo_edge = (std::f64::consts::PI / (2.0 * l as f64)).sin();
            let hi_edge = (std::f64::consts::PI / (2.0 * l as f64)).cos();
            for a in grid(0.0, lo_edge, 50) {
                assert!(j.value(a).unwrap().abs() <= cheb_t(l, a).abs() + 1e-12);
            }
            for a in grid(hi_edge, 1.0, 50) {
                assert!(j.value(a).unwrap().abs() + 1e-12 >= cheb_t(l, a).abs());
            }
        }
    }

    #[test]
    fn large_degree_is_finite() {
        let (j, k) = build_repair_pair(1e-5, 0.01).unwrap();
        assert!(j.degree() > 100_000);
        for x in grid(0.0, 1.0, 101) {
            assert!(j.p2(x).is_finite() && k.p2(x).is_finite());
        }
        assert!((j.p2(1.0) - 1.0).abs() < 1e-9);
    }
}
