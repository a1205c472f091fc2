//! The two-dimensional Grover subspace.
//!
//! All dynamics of a run live in the span of `|ψ⟩` and `Π|ψ⟩`, which carries
//! two orthonormal bases: `{|ψ⟩, |ψ⊥⟩}` and `{|Π⟩, |Π⊥⟩}`. With
//! `|ψ⟩ = a|Π⟩ + ā|Π⊥⟩` every oracle call reduces to 2×2 complex algebra.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

/// The amplitude `a = |Π|ψ⟩|` being estimated.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Amplitude(f64);

impl Amplitude {
    pub fn new(a: f64) -> Result<Self> {
        check_range("a", a, 0.0, 1.0, "0 <= a <= 1")?;
        Ok(Self(a))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `ā = sqrt(1 - a²)`.
    #[inline]
    pub fn complement(self) -> f64 {
        (1.0 - self.0 * self.0).max(0.0).sqrt()
    }

    /// Grover angle `θ = arcsin(a)`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.0.asin()
    }

    /// The shifted amplitude `(1 + a)/2` seen through a controlled-oracle
    /// construction; keeps every downstream amplitude above one half.
    pub fn shifted(self) -> Self {
        Self((1.0 + self.0) / 2.0)
    }
}

impl TryFrom<f64> for Amplitude {
    type Error = crate::Error;
    fn try_from(a: f64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<Amplitude> for f64 {
    fn from(a: Amplitude) -> f64 {
        a.0
    }
}

/// The four tracked states of the Grover subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroverLabel {
    Psi,
    PsiPerp,
    Pi,
    PiPerp,
}

impl GroverLabel {
    pub const ALL: [GroverLabel; 4] = [Self::Psi, Self::PsiPerp, Self::Pi, Self::PiPerp];

    /// True for `|ψ⟩` and `|ψ⊥⟩`.
    pub fn in_psi_basis(self) -> bool {
        matches!(self, Self::Psi | Self::PsiPerp)
    }

    /// The other member of this label's basis.
    pub fn partner(self) -> Self {
        match self {
            Self::Psi => Self::PsiPerp,
            Self::PsiPerp => Self::Psi,
            Self::Pi => Self::PiPerp,
            Self::PiPerp => Self::Pi,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Psi => "psi",
            Self::PsiPerp => "psi_perp",
            Self::Pi => "pi",
            Self::PiPerp => "pi_perp",
        }
    }
}

impl fmt::Display for GroverLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Returns the coefficients of `|ψ⟩` on `|Π⟩` and `|Π⊥⟩`.
///
/// At `a = 0` the convention `|Π⊥⟩ := |ψ⟩` gives `(0, 1)`; at `a = 1`,
/// `|Π⟩ = |ψ⟩` gives `(1, 0)`.
pub fn decompose_psi(a: Amplitude) -> (f64, f64) {
    (a.value(), a.complement())
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C(pub [[Complex64; 2]; 2]);

impl Mat2C {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest entrywise deviation of `M·M†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = *self * self.dagger();
        let id = Self::identity();
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.0[r][c] - id.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, rhs: Mat2C) -> Mat2C {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2C(out)
    }
}

/// The reflection `R = [[a, ā], [ā, -a]]`.
pub fn reflection(a: Amplitude) -> Mat2C {
    let (x, xb) = (a.value(), a.complement());
    Mat2C::from_real([[x, xb], [xb, -x]])
}

/// `e^{iφZ} = diag(e^{iφ}, e^{-iφ})`.
pub fn phase_rotation(phi: f64) -> Mat2C {
    let zero = Complex64::new(0.0, 0.0);
    Mat2C([
        [Complex64::from_polar(1.0, phi), zero],
        [zero, Complex64::from_polar(1.0, -phi)],
    ])
}

/// The literal product `∏_j (R e^{iφ_j Z}) · R` for `d - 1` phases.
///
/// The top-left entry has magnitude `|P(a)|` for the degree-`d` polynomial
/// the phases realize. Global phases are left in place.
pub fn qsp_unitary(a: Amplitude, phases: &[f64]) -> Mat2C {
    let r = reflection(a);
    let mut acc = Mat2C::identity();
    for &phi in phases {
        acc = acc * r * phase_rotation(phi);
    }
    acc * r
}
