//! Chebyshev polynomials and Chebyshev-basis series.
//!
//! Series are stored as coefficients `c_j` of `T_j(x / half_width)`, so a
//! series built on `[-2, 2]` can be evaluated anywhere in that interval.
//! Interpolation at Gauss–Chebyshev nodes and dense evaluation on
//! Chebyshev grids both go through FFT-backed DCTs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// `T_d(x)`, using the hyperbolic continuation outside `[-1, 1]`.
pub fn cheb_t(d: u64, x: f64) -> f64 {
    let df = d as f64;
    if x.abs() <= 1.0 {
        (df * x.acos()).cos()
    } else {
        let sign = if x < 0.0 && d % 2 == 1 { -1.0 } else { 1.0 };
        sign * (df * x.abs().acosh()).cosh()
    }
}

/// `ln |T_d(x)|` for `|x| > 1`, finite even where `T_d(x)` overflows.
pub fn ln_cheb_t_outside(d: u64, x: f64) -> f64 {
    debug_assert!(x.abs() > 1.0);
    let y = d as f64 * x.abs().acosh();
    // ln cosh y = y + ln(1 + e^{-2y}) - ln 2
    y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2
}

/// `|T_d(a)|² = cos²(d·arccos a)` for `a ∈ [-1, 1]`.
#[inline]
pub fn cheb_t_sq(d: u64, a: f64) -> f64 {
    let c = (d as f64 * a.clamp(-1.0, 1.0).acos()).cos();
    c * c
}

/// Which coefficient class a series keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffParity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
    half_width: f64,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>, half_width: f64) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        assert!(half_width > 0.0);
        Self { coeffs, half_width }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Interpolates `f` at the `n` Gauss–Chebyshev nodes of
    /// `[-half_width, half_width]`, giving a series of degree `n - 1`.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, n: usize, half_width: f64) -> Self {
        assert!(n >= 1);
        let samples: Vec<f64> = (0..n)
            .map(|k| f(half_width * (PI * (k as f64 + 0.5) / n as f64).cos()))
            .collect();
        let mut coeffs = dct2(&samples);
        let scale = 2.0 / n as f64;
        for c in coeffs.iter_mut() {
            *c *= scale;
        }
        coeffs[0] *= 0.5;
        Self::new(coeffs, half_width)
    }

    /// Zeroes the coefficients of the opposite parity class.
    pub fn enforce_parity(&mut self, parity: CoeffParity) {
        let drop = match parity {
            CoeffParity::Even => 1,
            CoeffParity::Odd => 0,
        };
        for c in self.coeffs.iter_mut().skip(drop).step_by(2) {
            *c = 0.0;
        }
    }

    /// Keeps coefficients `0..=degree`.
    pub fn truncate(&mut self, degree: usize) {
        self.coeffs.truncate(degree + 1);
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x / self.half_width;
        let two_t = 2.0 * t;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + two_t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + t * b1 - b2
    }

    /// Evaluates at the `m` Chebyshev points `half_width·cos(π(k+½)/m)`,
    /// `m > degree`, returning `(points, values)` ordered from right to left.
    pub fn eval_cheb_grid(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        assert!(m > self.degree(), "grid must exceed the degree");
        let mut x = vec![0.0; m];
        for (dst, &c) in x.iter_mut().zip(&self.coeffs) {
            *dst = c;
        }
        x[0] *= 2.0;
        let mut values = dct3(&x);
        for v in values.iter_mut() {
            *v *= 0.5;
        }
        let points = (0..m)
            .map(|k| self.half_width * (PI * (k as f64 + 0.5) / m as f64).cos())
            .collect();
        (points, values)
    }
}

/// Unnormalized DCT-II: `X_j = Σ_k x_k cos(πj(2k+1)/(2N))`.
pub fn dct2(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut v: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.div_ceil(2) {
        v[k] = Complex64::new(x[2 * k], 0.0);
    }
    for k in 0..n / 2 {
        v[n - 1 - k] = Complex64::new(x[2 * k + 1], 0.0);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut v);
    (0..n)
        .map(|j| (Complex64::from_polar(1.0, -PI * j as f64 / (2.0 * n as f64)) * v[j]).re)
        .collect()
}

/// Unnormalized DCT-III: `y_k = X_0 + 2 Σ_{j≥1} X_j cos(πj(2k+1)/(2N))`,
/// the inverse of [`dct2`] up to the factor `N`.
pub fn dct3(coef: &[f64]) -> Vec<f64> {
    let n = coef.len();
    let mut w: Vec<Complex64> = (0..n)
        .map(|j| {
            let tail = if j == 0 { 0.0 } else { coef[n - j] };
            Complex64::from_polar(1.0, PI * j as f64 / (2.0 * n as f64))
                * Complex64::new(coef[j], -tail)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut w);
    let mut y = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        y[2 * k] = w[k].re;
    }
    for k in 0..n / 2 {
        y[2 * k + 1] = w[n - 1 - k].re;
    }
    y
}
