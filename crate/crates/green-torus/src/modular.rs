//! The congruence group Gamma_0(2) and its basic fundamental domain
//! F_0 = { 0 <= Re tau <= 1, |tau - 1/2| >= 1/2 }.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// An element of Gamma_0(2): integer matrix [[a, b], [c, d]] with
/// determinant 1 and c even, acting by tau -> (a tau + b)/(c tau + d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gamma02 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Gamma02 {
    pub const IDENTITY: Gamma02 = Gamma02 {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Domain(format!(
                "matrix [[{a},{b}],[{c},{d}]] has determinant {} != 1",
                a * d - b * c
            )));
        }
        if c % 2 != 0 {
            return Err(Error::Domain(format!(
                "matrix [[{a},{b}],[{c},{d}]] has odd lower-left entry; not in Gamma_0(2)"
            )));
        }
        Ok(Gamma02 { a, b, c, d })
    }

    pub fn apply(&self, tau: Complex64) -> Complex64 {
        (self.a as f64 * tau + self.b as f64) / (self.c as f64 * tau + self.d as f64)
    }

    /// The rescaling c*tau + d carrying Z + Z*tau onto
    /// (c*tau + d)(Z + Z*gamma(tau)).
    pub fn scale(&self, tau: Complex64) -> Complex64 {
        self.c as f64 * tau + self.d as f64
    }
}

/// Membership in the basic fundamental domain F_0 of Gamma_0(2).
pub fn f0_contains(tau: Complex64) -> bool {
    tau.im > 0.0 && (0.0..=1.0).contains(&tau.re) && (tau - Complex64::new(0.5, 0.0)).norm() >= 0.5
}

/// Enumerate Gamma_0(2) elements with |entries| <= bound (identity first,
/// in deterministic lexicographic order).
pub fn enumerate_gamma02(bound: i64) -> Vec<Gamma02> {
    let mut out = vec![Gamma02::IDENTITY];
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in (-bound..=bound).filter(|c| c % 2 == 0) {
                for d in -bound..=bound {
                    if a * d - b * c == 1 && !(a == 1 && b == 0 && c == 0 && d == 1) {
                        out.push(Gamma02 { a, b, c, d });
                    }
                }
            }
        }
    }
    out
}
