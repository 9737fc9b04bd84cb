//! Weierstrass elliptic functions for the lattice Z + Z*tau.
//!
//! All evaluation goes through theta series at a modulus reduced to the
//! standard fundamental domain, so accuracy is uniform over the whole
//! upper half plane. The defining lattice sums are deliberately not used
//! here; they serve as independent oracles in the test suite.

mod reduce;
mod theta;

pub use reduce::{reduce_arg, reduce_tau, ReducedArg, ReducedTau, Unimodular};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default pole guard: minimum distance, measured in the reduced cell,
/// that an argument must keep from the lattice.
pub const DEFAULT_POLE_GUARD: f64 = 1e-8;

/// Complex division with power-of-two prescaling. The naive quotient
/// underflows its denominator norm for operands below ~1e-154, which
/// theta values at strongly reduced moduli reach routinely.
fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    let m = b.re.abs().max(b.im.abs());
    if m == 0.0 || !m.is_finite() {
        return a / b;
    }
    let s = 2.0f64.powi(-m.log2().floor() as i32);
    (a * s) / (b * s)
}

/// Everything derived from tau: periods, quasi-periods, invariants and
/// branch values, plus the reduced-modulus data used for evaluation.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct LatticeData {
    tau: Complex64,
    omega: [Complex64; 3],
    eta1: Complex64,
    eta2: Complex64,
    g2: Complex64,
    g3: Complex64,
    e: [Complex64; 3],
    pole_guard: f64,
    // Reduced-modulus evaluation data.
    red: ReducedTau,
    theta_deriv_null: Complex64,
    null_log_scale: f64,
    eta1_red: Complex64,
    eta2_red: Complex64,
}

impl LatticeData {
    /// Build the lattice data for Z + Z*tau. Fails unless Im tau > 0.
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_pole_guard(tau, DEFAULT_POLE_GUARD)
    }

    /// As [`LatticeData::new`] with an explicit pole-guard radius.
    pub fn with_pole_guard(tau: Complex64, pole_guard: f64) -> Result<Self> {
        if tau.im <= 0.0 || !tau.is_finite() {
            return Err(Error::Domain(format!(
                "tau must satisfy Im tau > 0, got {tau}"
            )));
        }
        let red = reduce_tau(tau);
        let nulls = theta::theta1_nulls(red.tau);
        let eta1_red = -cdiv(nulls.t3, 3.0 * nulls.t1);
        // eta2 at the reduced modulus from an independent series point:
        // zeta(tau'/2) = eta1'*tau'/2 + theta1'/theta1 at tau'/2.
        let half_tau = red.tau / 2.0;
        let th = theta::theta1(half_tau, red.tau);
        let eta2_red = eta1_red * red.tau + 2.0 * cdiv(th.t1, th.t0);

        let qhat = (Complex64::i() * 2.0 * PI * red.tau).exp();
        let (e4, e6) = eisenstein_e4_e6(qhat);
        let mu = red.mu;
        let mu2 = mu * mu;
        let mu4 = mu2 * mu2;
        let g = red.gamma;
        let eta1 = (g.a as f64 * eta1_red - g.c as f64 * eta2_red) / mu;
        let eta2 = (g.d as f64 * eta2_red - g.b as f64 * eta1_red) / mu;
        let g2 = (4.0 * PI.powi(4) / 3.0) * e4 / mu4;
        let g3 = (8.0 * PI.powi(6) / 27.0) * e6 / (mu4 * mu2);

        let mut lattice = LatticeData {
            tau,
            omega: [Complex64::new(1.0, 0.0), tau, tau + 1.0],
            eta1,
            eta2,
            g2,
            g3,
            e: [Complex64::default(); 3],
            pole_guard,
            red,
            theta_deriv_null: nulls.t1,
            null_log_scale: nulls.log_scale,
            eta1_red,
            eta2_red,
        };
        for k in 0..3 {
            lattice.e[k] = lattice.wp(lattice.omega[k] / 2.0)?;
        }
        Ok(lattice)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// The periods omega_1 = 1, omega_2 = tau, omega_3 = 1 + tau.
    pub fn omega(&self) -> [Complex64; 3] {
        self.omega
    }

    /// Half period omega_k / 2 for k in 1..=3.
    pub fn half_period(&self, k: usize) -> Complex64 {
        self.omega[k - 1] / 2.0
    }

    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }

    pub fn eta2(&self) -> Complex64 {
        self.eta2
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    /// Branch values e_k = wp(omega_k / 2).
    pub fn branch_values(&self) -> [Complex64; 3] {
        self.e
    }

    pub fn pole_guard(&self) -> f64 {
        self.pole_guard
    }

    /// Legendre residual tau*eta1 - eta2 - 2*pi*i; zero in exact arithmetic.
    pub fn legendre_residual(&self) -> f64 {
        (self.tau * self.eta1 - self.eta2 - Complex64::new(0.0, 2.0 * PI)).norm()
    }

    /// Real coordinates (r, s) with z = r + s*tau.
    pub fn real_coords(&self, z: Complex64) -> (f64, f64) {
        let s = z.im / self.tau.im;
        let r = z.re - s * self.tau.re;
        (r, s)
    }

    /// Distance from z to the nearest lattice point, measured in the
    /// reduced cell (the scale at which the pole guard applies).
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        reduce_arg(z / self.red.mu, self.red.tau).pole_distance
    }

    fn reduced(&self, z: Complex64) -> Result<(ReducedArg, theta::Theta1)> {
        let w = z / self.red.mu;
        let ra = reduce_arg(w, self.red.tau);
        if ra.pole_distance < self.pole_guard {
            return Err(Error::Pole {
                nearest: self.red.mu * ra.nearest,
                distance: ra.pole_distance,
            });
        }
        let th = theta::theta1(ra.offset, self.red.tau);
        Ok((ra, th))
    }

    /// Weierstrass wp(z; tau).
    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        let (_, th) = self.reduced(z)?;
        let u1 = cdiv(th.t1, th.t0);
        let u2 = cdiv(th.t2, th.t0);
        let w = -self.eta1_red - (u2 - u1 * u1);
        Ok(w / (self.red.mu * self.red.mu))
    }

    /// Derivative wp'(z; tau).
    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        let (_, th) = self.reduced(z)?;
        let u1 = cdiv(th.t1, th.t0);
        let u2 = cdiv(th.t2, th.t0);
        let u3 = cdiv(th.t3, th.t0);
        let wp = -(u3 - 3.0 * u1 * u2 + 2.0 * u1 * u1 * u1);
        Ok(wp / (self.red.mu * self.red.mu * self.red.mu))
    }

    /// wp and wp' in one reduction pass.
    pub fn wp_wp_prime(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (_, th) = self.reduced(z)?;
        let u1 = cdiv(th.t1, th.t0);
        let u2 = cdiv(th.t2, th.t0);
        let u3 = cdiv(th.t3, th.t0);
        let mu2 = self.red.mu * self.red.mu;
        let wp = (-self.eta1_red - (u2 - u1 * u1)) / mu2;
        let wpp = -(u3 - 3.0 * u1 * u2 + 2.0 * u1 * u1 * u1) / (mu2 * self.red.mu);
        Ok((wp, wpp))
    }

    /// Weierstrass zeta(z; tau).
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let (ra, th) = self.reduced(z)?;
        let zeta_red = self.eta1_red * ra.offset
            + cdiv(th.t1, th.t0)
            + ra.m as f64 * self.eta1_red
            + ra.n as f64 * self.eta2_red;
        Ok(zeta_red / self.red.mu)
    }

    /// Weierstrass sigma(z; tau). Entire; no pole guard applies.
    pub fn sigma(&self, z: Complex64) -> Complex64 {
        let w = z / self.red.mu;
        let ra = reduce_arg(w, self.red.tau);
        let th = theta::theta1(ra.offset, self.red.tau);
        let base = (self.eta1_red * ra.offset * ra.offset / 2.0 + th.log_scale
            - self.null_log_scale)
            .exp()
            * cdiv(th.t0, self.theta_deriv_null);
        // sigma(z + m + n*tau') = eps * exp(eta(omega)(z + omega/2)) * sigma(z)
        // with eps = (-1)^{m + n + m*n}.
        let (m, n) = (ra.m, ra.n);
        let omega = m as f64 + n as f64 * self.red.tau;
        let eta = m as f64 * self.eta1_red + n as f64 * self.eta2_red;
        let eps = if (m + n + m * n) % 2 == 0 { 1.0 } else { -1.0 };
        let shifted = eps * (eta * (ra.offset + omega / 2.0)).exp() * base;
        self.red.mu * shifted
    }

    /// Scaled residual of wp'^2 = 4 wp^3 - g2 wp - g3 at z.
    pub fn cubic_residual(&self, z: Complex64) -> Result<f64> {
        let (p, pp) = self.wp_wp_prime(z)?;
        let lhs = pp * pp;
        let rhs = 4.0 * p * p * p - self.g2 * p - self.g3;
        Ok((lhs - rhs).norm() / (1.0 + p.norm().powi(3)))
    }
}

/// E4 and E6 from the divisor-power q-expansions; q is exp(2*pi*i*tau)
/// at a reduced modulus, so a handful of terms reaches full precision.
fn eisenstein_e4_e6(qhat: Complex64) -> (Complex64, Complex64) {
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for k in 1..64u32 {
        qk *= qhat;
        let kf = k as f64;
        let geom = qk / (1.0 - qk);
        let t4 = 240.0 * kf.powi(3) * geom;
        let t6 = 504.0 * kf.powi(5) * geom;
        e4 += t4;
        e6 -= t6;
        if t6.norm() < 1e-19 {
            break;
        }
    }
    (e4, e6)
}
