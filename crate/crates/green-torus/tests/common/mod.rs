//! Shared test support: brute-force lattice-sum oracles for the
//! Weierstrass functions and invariants, finite-difference helpers, and
//! deterministic samplers.
//!
//! The oracles sum the defining series over the index square
//! max(|m|, |n|) <= N and Richardson-extrapolate in N. They share no
//! code with the library's evaluation path.

#![allow(dead_code)]

use num_complex::Complex64;

/// Sum f(omega) over 0 < max(|m|,|n|) <= n_max, omega = m + n*tau.
fn lattice_sum<F: Fn(Complex64) -> Complex64>(tau: Complex64, n_max: i64, f: F) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in -n_max..=n_max {
        for n in -n_max..=n_max {
            if m == 0 && n == 0 {
                continue;
            }
            acc += f(m as f64 + n as f64 * tau);
        }
    }
    acc
}

/// Richardson extrapolation against the error model sum_k c_k / N^{p_k},
/// sampled at N, 2N, 4N, ... (one level per order in `orders`).
fn richardson(values: &[Complex64], orders: &[f64]) -> Complex64 {
    let mut v = values.to_vec();
    for (level, &p) in orders.iter().enumerate() {
        let f = 2f64.powf(p);
        for i in 0..v.len() - 1 - level {
            v[i] = (f * v[i + 1] - v[i]) / (f - 1.0);
        }
    }
    v[0]
}

pub fn wp_oracle(z: Complex64, tau: Complex64, n_base: i64) -> Complex64 {
    let partial = |n_max: i64| {
        1.0 / (z * z) + lattice_sum(tau, n_max, |w| 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w))
    };
    let vals = [partial(n_base), partial(2 * n_base), partial(4 * n_base)];
    richardson(&vals, &[2.0, 3.0])
}

pub fn wp_prime_oracle(z: Complex64, tau: Complex64, n_base: i64) -> Complex64 {
    let partial = |n_max: i64| {
        let mut acc = -2.0 / (z * z * z);
        acc += lattice_sum(tau, n_max, |w| {
            let d = z - w;
            -2.0 / (d * d * d)
        });
        acc
    };
    let vals = [partial(n_base), partial(2 * n_base), partial(4 * n_base)];
    richardson(&vals, &[2.0, 3.0])
}

pub fn zeta_oracle(z: Complex64, tau: Complex64, n_base: i64) -> Complex64 {
    let partial =
        |n_max: i64| 1.0 / z + lattice_sum(tau, n_max, |w| 1.0 / (z - w) + 1.0 / w + z / (w * w));
    let vals = [partial(n_base), partial(2 * n_base), partial(4 * n_base)];
    richardson(&vals, &[2.0, 3.0])
}

pub fn sigma_oracle(z: Complex64, tau: Complex64, n_base: i64) -> Complex64 {
    // Accumulate log(product) term-wise; branch offsets vanish under exp.
    let partial = |n_max: i64| {
        z.ln()
            + lattice_sum(tau, n_max, |w| {
                (1.0 - z / w).ln() + z / w + z * z / (2.0 * w * w)
            })
    };
    let vals = [partial(n_base), partial(2 * n_base), partial(4 * n_base)];
    richardson(&vals, &[2.0, 3.0]).exp()
}

pub fn g2_oracle(tau: Complex64, n_base: i64) -> Complex64 {
    let partial = |n_max: i64| 60.0 * lattice_sum(tau, n_max, |w| (w * w * w * w).inv());
    let vals = [partial(n_base), partial(2 * n_base), partial(4 * n_base)];
    richardson(&vals, &[2.0, 3.0])
}

pub fn g3_oracle(tau: Complex64, n_base: i64) -> Complex64 {
    let partial = |n_max: i64| 140.0 * lattice_sum(tau, n_max, |w| (w * w * w * w * w * w).inv());
    let vals = [partial(n_base), partial(2 * n_base), partial(4 * n_base)];
    richardson(&vals, &[4.0, 5.0])
}

pub fn eta1_oracle(tau: Complex64, n_base: i64) -> Complex64 {
    2.0 * zeta_oracle(Complex64::new(0.5, 0.0), tau, n_base)
}

pub fn eta2_oracle(tau: Complex64, n_base: i64) -> Complex64 {
    2.0 * zeta_oracle(tau / 2.0, tau, n_base)
}

/// Central difference with one Richardson refinement, step h.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d1 = d(h);
    let d2 = d(h / 2.0);
    (4.0 * d2 - d1) / 3.0
}

/// Deterministic sampler for tau in the basic fundamental domain of
/// Gamma_0(2): 0 <= Re tau <= 1, |tau - 1/2| >= 1/2.
pub fn sample_f0(rng: &mut impl rand::Rng, im_max: f64) -> Complex64 {
    loop {
        let re: f64 = rng.gen_range(0.0..1.0);
        let im: f64 = rng.gen_range(0.05..im_max);
        let tau = Complex64::new(re, im);
        if (tau - Complex64::new(0.5, 0.0)).norm() >= 0.5 {
            return tau;
        }
    }
}
