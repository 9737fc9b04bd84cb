//! Hecke's form Z_{r,s}(tau) = zeta(r + s*tau) - r*eta1 - s*eta2 and the
//! pre-modular forms Z^(n) for n = 1, 2, 3, whose tau-zeros at real
//! (r, s) outside the half lattice detect nontrivial critical points of
//! G_n. Includes Newton zero-finding in tau and sign-change scanning in
//! (r, s) over the four open triangles of [0,1] x [0,1/2].

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Residual below which a polished zero is accepted.
pub const ZERO_TOL: f64 = 1e-10;
/// Exclusion radius around half-lattice points of the (r, s) square.
/// Z^(n) suffers catastrophic cancellation as (r, s) approaches the
/// lattice (the Laurent tails of Z^3, wp Z, wp' cancel), so zeros this
/// close to (1/2)Z^2 cannot be certified in double precision.
pub const HALF_LATTICE_EXCLUSION: f64 = 1e-3;
/// Default per-triangle scan resolution.
pub const DEFAULT_SCAN_GRID: usize = 200;
/// Step of the central difference for dZ/dtau in the tau-Newton.
const TAU_FD_STEP: f64 = 1e-7;
const TAU_NEWTON_MAX_ITER: usize = 60;
const RS_NEWTON_MAX_ITER: usize = 40;

/// The four open triangles covering [0,1] x [0,1/2] up to boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Triangle {
    /// 0 < r, s < 1/2, r + s > 1/2.
    T0,
    /// 1/2 < r < 1, 0 < s < 1/2, r + s > 1.
    T1,
    /// 1/2 < r < 1, 0 < s < 1/2, r + s < 1.
    T2,
    /// r, s > 0, r + s < 1/2.
    T3,
}

impl Triangle {
    pub const ALL: [Triangle; 4] = [Triangle::T0, Triangle::T1, Triangle::T2, Triangle::T3];

    pub fn contains(&self, r: f64, s: f64) -> bool {
        match self {
            Triangle::T0 => r > 0.0 && r < 0.5 && s > 0.0 && s < 0.5 && r + s > 0.5,
            Triangle::T1 => r > 0.5 && r < 1.0 && s > 0.0 && s < 0.5 && r + s > 1.0,
            Triangle::T2 => r > 0.5 && r < 1.0 && s > 0.0 && s < 0.5 && r + s < 1.0,
            Triangle::T3 => r > 0.0 && s > 0.0 && r + s < 0.5,
        }
    }

    /// The triangle containing (r, s), if any (boundaries excluded).
    pub fn locate(r: f64, s: f64) -> Option<Triangle> {
        Triangle::ALL.iter().copied().find(|t| t.contains(r, s))
    }

    /// Bounding box (r_min, r_max, s_min, s_max).
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self {
            Triangle::T0 => (0.0, 0.5, 0.0, 0.5),
            Triangle::T1 | Triangle::T2 => (0.5, 1.0, 0.0, 0.5),
            Triangle::T3 => (0.0, 0.5, 0.0, 0.5),
        }
    }
}

/// Hecke's Z_{r,s}(tau) for complex parameters; the curve-side
/// evaluation of Corollary-type identities needs complex (r, s).
pub fn hecke_z_complex(r: Complex64, s: Complex64, lattice: &LatticeData) -> Result<Complex64> {
    let z = r + s * lattice.tau();
    Ok(lattice.zeta(z)? - r * lattice.eta1() - s * lattice.eta2())
}

/// Hecke's Z_{r,s}(tau) for real (r, s) not in Z^2.
pub fn hecke_z(r: f64, s: f64, lattice: &LatticeData) -> Result<Complex64> {
    hecke_z_complex(Complex64::new(r, 0.0), Complex64::new(s, 0.0), lattice)
}

/// Z^(n) for n = 1, 2, 3 at complex (r, s):
///   Z^(1) = Z
///   Z^(2) = Z^3 - 3 wp Z - wp'
///   Z^(3) = Z^6 - 15 wp Z^4 - 20 wp' Z^3 + (27/4 g2 - 45 wp^2) Z^2
///           - 12 wp wp' Z - 5/4 wp'^2
/// with Z = Z_{r,s}(tau), wp = wp(r + s*tau), wp' = wp'(r + s*tau).
pub fn z_n_complex(
    r: Complex64,
    s: Complex64,
    lattice: &LatticeData,
    n: usize,
) -> Result<Complex64> {
    let z = hecke_z_complex(r, s, lattice)?;
    if n == 1 {
        return Ok(z);
    }
    let arg = r + s * lattice.tau();
    let (wp, wpp) = lattice.wp_wp_prime(arg)?;
    match n {
        2 => Ok(z * z * z - 3.0 * wp * z - wpp),
        3 => {
            let z2 = z * z;
            let z3 = z2 * z;
            let g2 = lattice.g2();
            Ok(
                z3 * z3 - 15.0 * wp * z2 * z2 - 20.0 * wpp * z3 + (6.75 * g2 - 45.0 * wp * wp) * z2
                    - 12.0 * wp * wpp * z
                    - 1.25 * wpp * wpp,
            )
        }
        _ => Err(Error::Capability(format!(
            "Z^({n}) has no explicit formula here; only n <= 3 is supported"
        ))),
    }
}

/// Z^(n) for real parameters.
pub fn z_n(r: f64, s: f64, lattice: &LatticeData, n: usize) -> Result<Complex64> {
    z_n_complex(Complex64::new(r, 0.0), Complex64::new(s, 0.0), lattice, n)
}

/// Newton zero-finding of tau -> Z^(n)_{r,s}(tau) from `seed_tau`.
/// The derivative is a central difference; zeros are simple, so the
/// iteration is quadratic once close.
pub fn find_tau_zero(r: f64, s: f64, seed_tau: Complex64, n: usize) -> Result<Complex64> {
    let f = |tau: Complex64| -> Result<Complex64> {
        let l = LatticeData::new(tau)?;
        z_n(r, s, &l, n)
    };
    let mut tau = seed_tau;
    let mut residual = f64::INFINITY;
    for _ in 0..TAU_NEWTON_MAX_ITER {
        let val = f(tau)?;
        residual = val.norm();
        if residual < ZERO_TOL {
            return Ok(tau);
        }
        let d = (f(tau + TAU_FD_STEP)? - f(tau - TAU_FD_STEP)?) / (2.0 * TAU_FD_STEP);
        if d.norm() < 1e-14 {
            return Err(Error::SingularSystem(
                "dZ/dtau vanished during Newton".into(),
            ));
        }
        let mut step = val / d;
        if step.norm() > 0.5 {
            step *= 0.5 / step.norm();
        }
        let next = tau - step;
        if next.im <= 1e-4 {
            return Err(Error::Domain(format!(
                "tau-Newton left the upper half plane at {next}"
            )));
        }
        tau = next;
    }
    Err(Error::NoConvergence {
        iterations: TAU_NEWTON_MAX_ITER,
        residual,
        last: vec![tau],
    })
}

/// |dZ^(n)/dtau| at a zero; simple zeros keep this bounded away from 0.
pub fn tau_derivative_magnitude(r: f64, s: f64, tau: Complex64, n: usize) -> Result<f64> {
    let f = |t: Complex64| -> Result<Complex64> {
        let l = LatticeData::new(t)?;
        z_n(r, s, &l, n)
    };
    Ok(((f(tau + TAU_FD_STEP)? - f(tau - TAU_FD_STEP)?) / (2.0 * TAU_FD_STEP)).norm())
}

/// A polished real zero of (r, s) -> Z^(n)_{r,s}(tau).
#[derive(Debug, Clone, Copy)]
pub struct RsZero {
    pub r: f64,
    pub s: f64,
    pub residual: f64,
    pub triangle: Triangle,
}

fn near_half_lattice(r: f64, s: f64) -> bool {
    let fr = (2.0 * r - (2.0 * r).round()).abs();
    let fs = (2.0 * s - (2.0 * s).round()).abs();
    fr < HALF_LATTICE_EXCLUSION && fs < HALF_LATTICE_EXCLUSION
}

/// Newton polish of a real (r, s) zero of the complex equation Z^(n) = 0
/// (two real unknowns, finite-difference 2x2 Jacobian).
fn polish_rs(r0: f64, s0: f64, lattice: &LatticeData, n: usize) -> Result<(f64, f64, f64)> {
    let mut r = r0;
    let mut s = s0;
    let h = 1e-7;
    let mut residual = f64::INFINITY;
    for _ in 0..RS_NEWTON_MAX_ITER {
        let v = z_n(r, s, lattice, n)?;
        residual = v.norm();
        if residual < ZERO_TOL {
            return Ok((r, s, residual));
        }
        let dr = (z_n(r + h, s, lattice, n)? - z_n(r - h, s, lattice, n)?) / (2.0 * h);
        let ds = (z_n(r, s + h, lattice, n)? - z_n(r, s - h, lattice, n)?) / (2.0 * h);
        // Solve [Re dr, Re ds; Im dr, Im ds] * delta = -[Re v; Im v].
        let det = dr.re * ds.im - ds.re * dr.im;
        if det.abs() < 1e-18 {
            return Err(Error::SingularSystem("rs-Newton Jacobian".into()));
        }
        let step_r = (-v.re * ds.im + v.im * ds.re) / det;
        let step_s = (-dr.re * v.im + dr.im * v.re) / det;
        let clamp = 0.1f64;
        let norm = step_r.hypot(step_s);
        let scale = if norm > clamp { clamp / norm } else { 1.0 };
        r += step_r * scale;
        s += step_s * scale;
        if near_half_lattice(r, s) || !(-0.5..1.5).contains(&r) || !(-0.5..1.0).contains(&s) {
            return Err(Error::Domain("rs-Newton left the scan region".into()));
        }
    }
    Err(Error::NoConvergence {
        iterations: RS_NEWTON_MAX_ITER,
        residual,
        last: vec![],
    })
}

/// All real zeros of (r, s) -> Z^(n)_{r,s}(tau) in the given open
/// triangle at the given grid resolution: cells where both Re Z^(n) and
/// Im Z^(n) change sign are polished by Newton. An empty result
/// certifies only the absence of sign-change cells at this resolution.
pub fn find_rs_zeros(
    lattice: &LatticeData,
    n: usize,
    triangle: Triangle,
    grid: usize,
) -> Result<Vec<RsZero>> {
    if grid < 2 {
        return Err(Error::Domain("grid resolution must be at least 2".into()));
    }
    let (r_min, r_max, s_min, s_max) = triangle.bounding_box();
    let dr = (r_max - r_min) / grid as f64;
    let ds = (s_max - s_min) / grid as f64;
    // Values on grid nodes; NaN marks nodes outside the triangle or at
    // excluded points.
    let mut values = vec![Complex64::new(f64::NAN, f64::NAN); (grid + 1) * (grid + 1)];
    for i in 0..=grid {
        for j in 0..=grid {
            let r = r_min + i as f64 * dr;
            let s = s_min + j as f64 * ds;
            if !triangle.contains(r, s) || near_half_lattice(r, s) {
                continue;
            }
            if let Ok(v) = z_n(r, s, lattice, n) {
                values[i * (grid + 1) + j] = v;
            }
        }
    }
    let mut zeros: Vec<RsZero> = Vec::new();
    let cell_diag = dr.hypot(ds);
    for i in 0..grid {
        for j in 0..grid {
            let corners = [
                values[i * (grid + 1) + j],
                values[(i + 1) * (grid + 1) + j],
                values[i * (grid + 1) + j + 1],
                values[(i + 1) * (grid + 1) + j + 1],
            ];
            if corners.iter().any(|v| v.re.is_nan()) {
                continue;
            }
            let re_signs = corners.iter().map(|v| v.re > 0.0).collect::<Vec<_>>();
            let im_signs = corners.iter().map(|v| v.im > 0.0).collect::<Vec<_>>();
            let re_change = !re_signs.iter().all(|&x| x == re_signs[0]);
            let im_change = !im_signs.iter().all(|&x| x == im_signs[0]);
            if !(re_change && im_change) {
                continue;
            }
            let r0 = r_min + (i as f64 + 0.5) * dr;
            let s0 = s_min + (j as f64 + 0.5) * ds;
            // Failed cells are skipped; the grid records the attempt.
            if let Ok((r, s, residual)) = polish_rs(r0, s0, lattice, n) {
                if near_half_lattice(r, s) {
                    continue;
                }
                if !triangle.contains(r, s) {
                    continue;
                }
                let duplicate = zeros.iter().any(|z| (z.r - r).hypot(z.s - s) < cell_diag);
                if !duplicate {
                    zeros.push(RsZero {
                        r,
                        s,
                        residual,
                        triangle,
                    });
                }
            }
        }
    }
    Ok(zeros)
}
