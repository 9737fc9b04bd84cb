//! Reduction of the modulus to the standard fundamental domain and of
//! arguments to the period cell centered at the origin.
//!
//! Series evaluation is only well conditioned for tau with Im tau
//! bounded away from zero. Every lattice therefore stores a reduced
//! modulus tau' = gamma(tau) with |Re tau'| <= 1/2 and |tau'| >= 1,
//! together with the unimodular gamma and the rescaling mu = c*tau + d
//! satisfying Z + Z*tau = mu * (Z + Z*tau').

use num_complex::Complex64;

/// Integer matrix [[a, b], [c, d]] acting on the upper half plane by
/// tau -> (a*tau + b) / (c*tau + d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unimodular {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Unimodular {
    pub const IDENTITY: Unimodular = Unimodular {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, tau: Complex64) -> Complex64 {
        (self.a as f64 * tau + self.b as f64) / (self.c as f64 * tau + self.d as f64)
    }

    /// Left-compose: (m * self)(tau) = m(self(tau)).
    fn compose(m: Unimodular, s: Unimodular) -> Unimodular {
        Unimodular {
            a: m.a * s.a + m.b * s.c,
            b: m.a * s.b + m.b * s.d,
            c: m.c * s.a + m.d * s.c,
            d: m.c * s.b + m.d * s.d,
        }
    }
}

/// Result of reducing tau into the standard fundamental domain.
#[derive(Debug, Clone, Copy)]
pub struct ReducedTau {
    /// gamma(tau), satisfying |Re| <= 1/2 + eps and |tau'| >= 1 - eps.
    pub tau: Complex64,
    pub gamma: Unimodular,
    /// mu = c*tau_original + d.
    pub mu: Complex64,
}

const MAX_REDUCTION_STEPS: usize = 256;

/// Reduce tau to the standard SL(2,Z) fundamental domain.
pub fn reduce_tau(tau: Complex64) -> ReducedTau {
    let mut t = tau;
    let mut gamma = Unimodular::IDENTITY;
    for _ in 0..MAX_REDUCTION_STEPS {
        let n = t.re.round();
        if n != 0.0 {
            t -= n;
            let shift = Unimodular {
                a: 1,
                b: -(n as i64),
                c: 0,
                d: 1,
            };
            gamma = Unimodular::compose(shift, gamma);
        }
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -t.inv();
            let inv = Unimodular {
                a: 0,
                b: -1,
                c: 1,
                d: 0,
            };
            gamma = Unimodular::compose(inv, gamma);
        } else {
            break;
        }
    }
    let mu = gamma.c as f64 * tau + gamma.d as f64;
    // Recompute from the exact integer matrix for consistency.
    let t_exact = gamma.apply(tau);
    ReducedTau {
        tau: t_exact,
        gamma,
        mu,
    }
}

/// z split as z = offset + m + n*tau with offset in the cell
/// [-1/2,1/2) x [-1/2,1/2) of lattice coordinates.
#[derive(Debug, Clone, Copy)]
pub struct ReducedArg {
    pub offset: Complex64,
    pub m: i64,
    pub n: i64,
    /// Euclidean distance from z to the nearest lattice point.
    pub pole_distance: f64,
    /// The nearest lattice point itself.
    pub nearest: Complex64,
}

/// Reduce z modulo Z + Z*tau to the cell centered at the origin.
pub fn reduce_arg(z: Complex64, tau: Complex64) -> ReducedArg {
    let im = tau.im;
    let y = z.im / im;
    let x = z.re - y * tau.re;
    let m = x.round();
    let n = y.round();
    let offset = z - m - n * tau;
    // The rounded point need not be the closest one for skew lattices;
    // check the surrounding 3x3 block.
    let mut best = offset.norm();
    let mut bm = m as i64;
    let mut bn = n as i64;
    for dm in -1..=1 {
        for dn in -1..=1 {
            let cand = offset - dm as f64 - dn as f64 * tau;
            if cand.norm() < best {
                best = cand.norm();
                bm = m as i64 + dm;
                bn = n as i64 + dn;
            }
        }
    }
    ReducedArg {
        offset,
        m: m as i64,
        n: n as i64,
        pole_distance: best,
        nearest: bm as f64 + bn as f64 * tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_lands_in_fundamental_domain() {
        let samples = [
            Complex64::new(0.03, 0.04),
            Complex64::new(5.7, 0.2),
            Complex64::new(-3.2, 0.01),
            Complex64::new(0.5, 2.0),
            Complex64::new(0.0, 0.001),
        ];
        for &tau in &samples {
            let r = reduce_tau(tau);
            assert_eq!(r.gamma.det(), 1);
            assert!(r.tau.re.abs() <= 0.5 + 1e-9);
            assert!(r.tau.norm() >= 1.0 - 1e-9);
            assert!(r.tau.im >= 0.8);
            let back = r.gamma.apply(tau);
            assert!((back - r.tau).norm() < 1e-12 * r.tau.norm());
        }
    }

    #[test]
    fn arg_reduction_offsets_are_small() {
        let tau = Complex64::new(0.31, 1.27);
        let z = Complex64::new(7.3, -4.9);
        let r = reduce_arg(z, tau);
        let rebuilt = r.offset + r.m as f64 + r.n as f64 * tau;
        assert!((rebuilt - z).norm() < 1e-12 * z.norm());
        let y = r.offset.im / tau.im;
        let x = r.offset.re - y * tau.re;
        assert!(x.abs() <= 0.5 + 1e-12 && y.abs() <= 0.5 + 1e-12);
    }
}
