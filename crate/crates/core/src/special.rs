//! Scalar special functions used across the pipeline.
//!
//! `erfc` is backed by `libm` and `erfc_inv` by `statrs`; the regularized
//! incomplete beta is evaluated by a log-space Lentz continued fraction so
//! that tail probabilities down to ~1e-300 keep full relative precision.

use crate::error::{domain, Result};

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse complementary error function on (0, 2).
pub fn erfc_inv(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0) {
        return Err(domain(format!("erfc_inv argument {q} outside (0, 2)")));
    }
    Ok(statrs::function::erf::erfc_inv(q))
}

/// Standard normal quantile Φ⁻¹(p).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("normal quantile probability {p} outside (0, 1)")));
    }
    Ok(-std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)?)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Regularized incomplete beta I_x(a, b).
pub fn beta_reg(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!("beta_reg shape parameters a={a}, b={b} must be positive")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("beta_reg x={x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // Continued fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(beta_front(a, b, x).exp() * beta_cf(a, b, x) / a)
    } else {
        Ok(1.0 - beta_front(b, a, 1.0 - x).exp() * beta_cf(b, a, 1.0 - x) / b)
    }
}

/// ln of x^a (1-x)^b / B(a, b).
fn beta_front(a: f64, b: f64, x: f64) -> f64 {
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p()
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let max_iter = 10_000 + (a.max(b).sqrt() * 20.0) as usize;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Inverse of the regularized incomplete beta in x, by bisection.
///
/// Bisection is slow but unconditionally monotone, which matters for the
/// 1e-24-scale tail quantiles used in parameter estimation.
pub fn beta_reg_inv(a: f64, b: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("beta quantile probability {p} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
