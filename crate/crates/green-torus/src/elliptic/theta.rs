//! The Jacobi theta function theta1 and its first three derivatives.
//!
//! With nome q = exp(i*pi*tau) and the argument convention
//!
//!   theta1(v|tau) = 2 * sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1)*pi*v),
//!
//! all Weierstrass functions for the lattice Z + Z*tau reduce to
//! logarithmic derivatives of theta1:
//!
//!   sigma(z) = exp(eta1 z^2 / 2) theta1(z) / theta1'(0)
//!   zeta(z)  = eta1 z + theta1'(z)/theta1(z)
//!   wp(z)    = -eta1 - d^2/dz^2 log theta1(z)
//!   wp'(z)   = -d^3/dz^3 log theta1(z)
//!   eta1     = -theta1'''(0) / (3 theta1'(0))
//!
//! Derivatives here are always with respect to v. Each term is evaluated
//! as a pair of exponentials exp(i pi tau (n+1/2)^2 +- i (2n+1) pi v) so
//! that extreme moduli cannot underflow the nome power against an
//! overflowing sine. The series converges geometrically for
//! |Im v| <= Im tau / 2, which argument reduction guarantees; callers
//! must reduce tau to the standard fundamental domain first.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Truncation: terms fall below this times the running magnitude.
const TERM_EPS: f64 = 1e-19;
/// Hard cap on series length; generous for Im tau >= 0.5.
const MAX_TERMS: usize = 64;

/// theta1 and its first three v-derivatives at v, jointly rescaled:
/// the true values are t_k * exp(log_scale). Logarithmic derivatives
/// can ignore the scale; absolute evaluations must reapply it.
#[derive(Debug, Clone, Copy)]
pub struct Theta1 {
    pub t0: Complex64,
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
    pub log_scale: f64,
}

/// Safe exponent window for forming q-power and sine factors separately.
const EXP_SAFE: f64 = 680.0;

/// Evaluate theta1(v|tau) together with theta1', theta1'', theta1'''.
pub fn theta1(v: Complex64, tau: Complex64) -> Theta1 {
    let i = Complex64::i();
    let mut t0 = Complex64::new(0.0, 0.0);
    let mut t1 = Complex64::new(0.0, 0.0);
    let mut t2 = Complex64::new(0.0, 0.0);
    let mut t3 = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    // The n = 0 term can leave f64 range in either direction for
    // strongly reduced moduli; recenter the series on its magnitude.
    let log_scale = -PI * tau.im * 0.25 + PI * v.im.abs();
    for n in 0..MAX_TERMS {
        let half = n as f64 + 0.5;
        let c = (2 * n + 1) as f64 * PI;
        let base = i * PI * tau * half * half - log_scale; // log of q^{(n+1/2)^2} / scale
        let osc = c * v.im.abs(); // growth scale of sin/cos(cv)
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        // diff = 2 q^{..} sin(cv) / scale, sum = 2 q^{..} cos(cv) / scale.
        let (diff, sum) = if base.re > -EXP_SAFE && osc < EXP_SAFE {
            // Direct product; accurate for small cv.
            let qn = base.exp();
            let arg = c * v;
            (2.0 * qn * arg.sin(), 2.0 * qn * arg.cos())
        } else {
            // Fused exponentials; neither factor alone is representable.
            let e_plus = (base + i * c * v).exp();
            let e_minus = (base - i * c * v).exp();
            (-i * (e_plus - e_minus), e_plus + e_minus)
        };
        t0 += sign * diff;
        t1 += sign * c * sum;
        t2 -= sign * c * c * diff;
        t3 -= sign * c * c * c * sum;
        let term_mag = diff.norm().max(sum.norm()) * (1.0 + c * c * c);
        scale = scale.max(term_mag);
        if term_mag < TERM_EPS * scale && n >= 2 {
            break;
        }
    }
    Theta1 {
        t0,
        t1,
        t2,
        t3,
        log_scale,
    }
}

/// theta1'(0|tau) and theta1'''(0|tau), used for sigma normalization and
/// eta1, rescaled like [`Theta1`]: true values are t_k * exp(log_scale).
pub struct Theta1Nulls {
    pub t1: Complex64,
    pub t3: Complex64,
    pub log_scale: f64,
}

pub fn theta1_nulls(tau: Complex64) -> Theta1Nulls {
    let i = Complex64::i();
    let mut t1 = Complex64::new(0.0, 0.0);
    let mut t3 = Complex64::new(0.0, 0.0);
    // q^{1/4} alone underflows for very tall moduli; factor it out.
    let log_scale = -PI * tau.im * 0.25;
    for n in 0..MAX_TERMS {
        let half = n as f64 + 0.5;
        let c = (2 * n + 1) as f64 * PI;
        let qn = (i * PI * tau * half * half - log_scale).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        t1 += sign * 2.0 * c * qn;
        t3 -= sign * 2.0 * c * c * c * qn;
        if qn.norm() * (1.0 + c * c * c) < TERM_EPS && n >= 2 {
            break;
        }
    }
    Theta1Nulls { t1, t3, log_scale }
}
