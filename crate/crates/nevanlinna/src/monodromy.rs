//! Monodromy matrix of a Hamburger Hamiltonian as an exact finite product of
//! closed-form interval factors.
//!
//! On an interval where H ≡ ξξᵀ is constant rank one, (ξξᵀJ)² = 0, so the
//! fundamental solution of dW/dt·J = z·W·H across the interval truncates to
//! W · (I − z·l·ξξᵀJ): there is no ODE stepper anywhere, only 2×2 products.
//! The running product is kept normalized with exact power-of-two scales so
//! that values like exp(r^ρ) with r up to 1e12 never overflow, while short
//! products stay bit-identical to the unscaled ones — see `ScaledMatrix2`.

use num_complex::Complex64;
use std::f64::consts::LN_2;

use crate::hamiltonian::{HamburgerHamiltonian, Interval};
use crate::jacobi::{jacobi_to_hamiltonian, JacobiParameters};
use crate::Result;

// Magnitude band (squared) within which no rescaling happens. Scales are
// exact powers of two, so rescaling never rounds; deferring it until entries
// leave [2^-256, 2^256] keeps small products exactly equal to the naive ones.
const BAND_SQR_HI: f64 = 1.3407807929942597e154; // 2^512
const BAND_SQR_LO: f64 = 7.458340731200207e-155; // 2^-512

/// Complex 2×2 matrix with an extracted power-of-two magnitude, row major.
///
/// The represented matrix is `entries · 2^pow2`; `log_scale()` reports the
/// extracted factor in natural log as used by the growth formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMatrix2 {
    m: [Complex64; 4],
    pow2: i64,
}

impl ScaledMatrix2 {
    pub fn identity() -> Self {
        Self {
            m: [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            pow2: 0,
        }
    }

    pub fn from_entries(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        let mut w = Self {
            m: [m11, m12, m21, m22],
            pow2: 0,
        };
        w.renormalize_if_needed();
        w
    }

    /// Normalized entry (i, j), zero-indexed.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[2 * i + j]
    }

    /// Natural log of the factored-out magnitude.
    pub fn log_scale(&self) -> f64 {
        self.pow2 as f64 * LN_2
    }

    pub fn pow2(&self) -> i64 {
        self.pow2
    }

    /// log |entry(i,j) · 2^pow2|.
    pub fn log_abs_entry(&self, i: usize, j: usize) -> f64 {
        let e = self.entry(i, j);
        let mag = if e.im == 0.0 {
            e.re.abs()
        } else if e.re == 0.0 {
            e.im.abs()
        } else {
            e.re.hypot(e.im)
        };
        self.log_scale() + mag.ln()
    }

    /// Determinant of the normalized entries (the represented determinant is
    /// this times 2^(2·pow2)).
    pub fn det_normalized(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// ln|det W| of the represented matrix; 0 for a unit-determinant product.
    pub fn unit_det_log_residual(&self) -> f64 {
        self.det_normalized().norm().ln() + 2.0 * self.log_scale()
    }

    fn max_norm_sqr(&self) -> f64 {
        self.m
            .iter()
            .map(|e| e.norm_sqr())
            .fold(0.0f64, f64::max)
    }

    /// Rescale by an exact power of two so the largest entry magnitude lands
    /// in [1/2, 1]. A no-op on the exact identity.
    pub fn renormalize(&mut self) {
        let m2 = self.max_norm_sqr();
        if m2 == 0.0 || !m2.is_finite() {
            return;
        }
        let mag = m2.sqrt();
        let mut k = mag.log2().ceil() as i32;
        while mag * f64::exp2(-f64::from(k)) > 1.0 {
            k += 1;
        }
        while mag * f64::exp2(-f64::from(k)) <= 0.5 {
            k -= 1;
        }
        if k != 0 {
            let scale = f64::exp2(-f64::from(k));
            for e in &mut self.m {
                *e *= scale;
            }
            self.pow2 += i64::from(k);
        }
    }

    #[inline]
    fn renormalize_if_needed(&mut self) {
        let m2 = self.max_norm_sqr();
        if !(BAND_SQR_LO..=BAND_SQR_HI).contains(&m2) {
            self.renormalize();
        }
    }

    /// Right-multiply by `rhs` (general 2×2 product).
    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        let mut w = Self {
            m: [
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            ],
            pow2: self.pow2 + rhs.pow2,
        };
        w.renormalize_if_needed();
        w
    }

    /// Right-multiply by the interval factor I − z·l·ξξᵀJ as a rank-one
    /// update: W − z·l·(Wξ)(sin φ, −cos φ).
    #[inline]
    pub fn apply_interval(&mut self, iv: Interval, z: Complex64) {
        let zl = z * iv.length;
        let c = iv.cos_phi;
        let s = iv.sin_phi;
        let a1 = zl * (self.m[0] * c + self.m[1] * s);
        let a2 = zl * (self.m[2] * c + self.m[3] * s);
        self.m[0] -= a1 * s;
        self.m[1] += a1 * c;
        self.m[2] -= a2 * s;
        self.m[3] += a2 * c;
        self.renormalize_if_needed();
    }
}

/// The exact factor I − z·l·ξ_φ ξ_φᵀ J of one constant interval.
pub fn interval_factor(l: f64, phi: f64, z: Complex64) -> ScaledMatrix2 {
    let (s, c) = phi.sin_cos();
    let zl = z * l;
    ScaledMatrix2::from_entries(
        Complex64::new(1.0, 0.0) - zl * (c * s),
        zl * (c * c),
        -zl * (s * s),
        Complex64::new(1.0, 0.0) + zl * (c * s),
    )
}

/// Monodromy of a finite interval stream: Π_j (I − z·l_j·ξ_j ξ_jᵀ J),
/// factors applied oldest first on the right.
pub fn monodromy_product<I>(intervals: I, z: Complex64) -> ScaledMatrix2
where
    I: IntoIterator<Item = Interval>,
{
    let mut w = ScaledMatrix2::identity();
    for iv in intervals {
        w.apply_interval(iv, z);
    }
    w
}

/// W_H(x_N; z) of the truncated Hamiltonian.
pub fn monodromy(h: &HamburgerHamiltonian, z: Complex64) -> ScaledMatrix2 {
    monodromy_product(h.intervals(), z)
}

/// log |w_{H,22}(ir)|; along the imaginary axis this entry dominates the
/// whole circle |z| = r.
pub fn log_abs_w22(h: &HamburgerHamiltonian, r: f64) -> f64 {
    monodromy(h, Complex64::new(0.0, r)).log_abs_entry(1, 1)
}

/// log |B(ir)| of the Nevanlinna matrix via w_{H,22} = −B of the associated
/// Hamiltonian.
pub fn nevanlinna_log_b(j: &JacobiParameters, r: f64) -> Result<f64> {
    let h = jacobi_to_hamiltonian(j)?;
    Ok(log_abs_w22(&h, r))
}
