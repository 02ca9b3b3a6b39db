//! Two-mode Gaussian state algebra in reduced `(a, b, c)` form.
//!
//! Every covariance matrix in the analysis has the block structure
//!
//! ```text
//! ⎡ a·𝕀₂   c·σ_z ⎤
//! ⎣ c·σ_z  b·𝕀₂  ⎦      σ_z = diag(1, -1)
//! ```
//!
//! so only the three scalars are stored. Units are shot-noise units (vacuum
//! variance 1). Note `det(c·σ_z) = -c²`, hence `Δ = a² + b² - 2c²`.

use crate::error::{domain, Error, Result};

/// Tolerance separating floating-point noise from genuine non-physicality.
pub const PHYSICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCm {
    /// Mode A diagonal variance.
    pub a: f64,
    /// Mode B diagonal variance.
    pub b: f64,
    /// Cross-correlation entering as `c·σ_z`.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SymplecticSpectrum {
    pub fn is_physical(&self) -> bool {
        self.lambda2 >= 1.0 - PHYSICAL_TOL
    }
}

impl TwoModeCm {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Two-mode squeezed vacuum of variance `v`.
    pub fn tmsv(v: f64) -> Self {
        Self::new(v, v, (v * v - 1.0).max(0.0).sqrt())
    }

    fn check_finite(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(Error::NonFiniteInput("covariance matrix entry"));
        }
        Ok(())
    }

    /// `Δ = det σ_a + det σ_b + 2 det σ_c`.
    pub fn delta(&self) -> f64 {
        self.a * self.a + self.b * self.b - 2.0 * self.c * self.c
    }

    /// Full 4×4 determinant.
    pub fn det(&self) -> f64 {
        let x = self.a * self.b - self.c * self.c;
        x * x
    }

    pub fn symplectic_eigenvalues(&self) -> Result<SymplecticSpectrum> {
        symplectic_eigenvalues(self)
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_of_cm(self)
    }
}

pub fn symplectic_eigenvalues(cm: &TwoModeCm) -> Result<SymplecticSpectrum> {
    cm.check_finite()?;
    if !(cm.a > 0.0 && cm.b > 0.0) {
        return Err(domain(format!(
            "diagonal variances must be positive (a={}, b={})",
            cm.a, cm.b
        )));
    }
    let delta = cm.delta();
    let det = cm.det();
    // Δ² - 4det factorizes as (a-b)²((a+b)² - 4c²); the factored form avoids
    // cancellation between two large squares.
    let diff = cm.a - cm.b;
    let sum = cm.a + cm.b;
    let factor = sum * sum - 4.0 * cm.c * cm.c;
    if factor < -PHYSICAL_TOL * sum * sum {
        return Err(Error::NegativeDiscriminant(diff * diff * factor));
    }
    let disc = diff * diff * factor.max(0.0);
    let root = disc.sqrt();
    let l1 = (0.5 * (delta + root)).max(0.0).sqrt();
    // Δ - √disc loses precision for nearly pure states; use λ₁λ₂ = √det instead.
    let l2 = if l1 > 0.0 { det.sqrt() / l1 } else { 0.0 };
    Ok(SymplecticSpectrum {
        lambda1: l1,
        lambda2: l2,
    })
}

/// `g(x) = ((x+1)/2) log₂((x+1)/2) - ((x-1)/2) log₂((x-1)/2)`, in bits.
pub fn bosonic_entropy(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFiniteInput("symplectic eigenvalue"));
    }
    if x < 1.0 - PHYSICAL_TOL {
        return Err(domain(format!("symplectic eigenvalue {x} below vacuum")));
    }
    if x <= 1.0 + PHYSICAL_TOL {
        return Ok(0.0);
    }
    let p = 0.5 * (x + 1.0);
    let m = 0.5 * (x - 1.0);
    Ok(p * p.log2() - m * m.log2())
}

/// Derivative of [`bosonic_entropy`]: `½ log₂((x+1)/(x-1))`.
pub fn bosonic_entropy_derivative(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).log2()
}

pub fn entropy_of_cm(cm: &TwoModeCm) -> Result<f64> {
    let s = symplectic_eigenvalues(cm)?;
    Ok(bosonic_entropy(s.lambda1)? + bosonic_entropy(s.lambda2)?)
}

/// Mode A conditioned on heterodyne detection of mode B.
///
/// `σ_{A|b} = σ_a - σ_c σ_cᵀ/(b+1) = (a - c²/(b+1))·𝕀₂`, so the single
/// symplectic eigenvalue equals the returned diagonal.
pub fn conditional_after_heterodyne(cm: &TwoModeCm) -> Result<f64> {
    cm.check_finite()?;
    if cm.b <= -1.0 {
        return Err(domain(format!("b = {} must exceed -1", cm.b)));
    }
    let v = cm.a - cm.c * cm.c / (cm.b + 1.0);
    if v < 1.0 - PHYSICAL_TOL {
        return Err(domain(format!("conditional variance {v} below vacuum")));
    }
    Ok(v)
}
