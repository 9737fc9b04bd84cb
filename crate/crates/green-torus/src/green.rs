//! The Green function on E_tau and the multiple Green function G_n.
//!
//! The Green function has -4*pi*dG/dz = zeta(z) - z*eta1 + 2*pi*i*s with
//! z = r + s*tau, r,s real. Its value is represented through log|sigma|
//! with a quadratic correction,
//!
//!   G(z) = -log|sigma(z)|/(2 pi) + Re(eta1 z^2)/(4 pi)
//!          + (Im z)^2 / (2 Im tau) + C(tau),
//!
//! where C(tau) enforces zero mean; C is fixed reproducibly by midpoint
//! quadrature on a 64x64 grid. Second derivatives follow from the
//! gradient formula:
//!
//!   -4*pi*G_zz   = -wp(z) - eta1 + pi/Im(tau),
//!   -4*pi*G_zzb  = -pi/Im(tau).
//!
//! G_n(z_1..z_n) = sum_{j<k} G(z_j - z_k) - n * sum_j G(z_j), invariant
//! under permutations; its gradient system and full 2n x 2n real Hessian
//! are assembled from these identities.

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Grid used to fix the zero-mean constant of `green_value`.
pub const MEAN_QUADRATURE_GRID: usize = 64;

/// Default finite-difference steps: gradients and Hessians.
pub const FD_GRADIENT_STEP: f64 = 1e-5;
pub const FD_HESSIAN_STEP: f64 = 1e-4;

/// A point on E_tau carrying its real coordinates z = r + s*tau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub z: Complex64,
    pub r: f64,
    pub s: f64,
}

impl TorusPoint {
    pub fn new(z: Complex64, lattice: &LatticeData) -> Self {
        let (r, s) = lattice.real_coords(z);
        TorusPoint { z, r, s }
    }

    pub fn from_coords(r: f64, s: f64, lattice: &LatticeData) -> Self {
        TorusPoint {
            z: r + s * lattice.tau(),
            r,
            s,
        }
    }

    /// Representative with (r, s) in [0,1)^2.
    pub fn canonical(&self, lattice: &LatticeData) -> Self {
        let r = self.r - self.r.floor();
        let s = self.s - self.s.floor();
        TorusPoint::from_coords(r, s, lattice)
    }
}

/// An n-point configuration on E_tau avoiding 0 and the diagonal,
/// compared as a multiset.
#[derive(Debug, Clone)]
pub struct Configuration {
    points: Vec<TorusPoint>,
}

/// Minimum torus distance any two points (and any point and 0) must keep.
pub const CONFIG_SEPARATION: f64 = 1e-9;

impl Configuration {
    pub fn new(points: Vec<Complex64>, lattice: &LatticeData) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("configuration must be non-empty".into()));
        }
        for (j, &z) in points.iter().enumerate() {
            if lattice.pole_distance(z) < CONFIG_SEPARATION {
                return Err(Error::Domain(format!(
                    "point {j} at {z} coincides with the lattice"
                )));
            }
        }
        for j in 0..points.len() {
            for k in (j + 1)..points.len() {
                if lattice.pole_distance(points[j] - points[k]) < CONFIG_SEPARATION {
                    return Err(Error::Domain(format!(
                        "points {j} and {k} coincide on the torus: {} ~ {}",
                        points[j], points[k]
                    )));
                }
            }
        }
        Ok(Configuration {
            points: points
                .iter()
                .map(|&z| TorusPoint::new(z, lattice))
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn zs(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.z).collect()
    }

    pub fn negated(&self, lattice: &LatticeData) -> Configuration {
        Configuration {
            points: self
                .points
                .iter()
                .map(|p| TorusPoint::new(-p.z, lattice))
                .collect(),
        }
    }

    /// Multiset equality on the torus within `tol` (torus distance).
    pub fn multiset_eq(&self, other: &Configuration, lattice: &LatticeData, tol: f64) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut used = vec![false; other.n()];
        'outer: for p in &self.points {
            for (k, q) in other.points.iter().enumerate() {
                if !used[k] && lattice.pole_distance(p.z - q.z) < tol {
                    used[k] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Whether the configuration equals its own negation as a multiset.
    pub fn is_negation_symmetric(&self, lattice: &LatticeData, tol: f64) -> bool {
        self.multiset_eq(&self.negated(lattice), lattice, tol)
    }

    /// Whether the configuration and its negation have disjoint supports.
    pub fn disjoint_from_negation(&self, lattice: &LatticeData, tol: f64) -> bool {
        let neg = self.negated(lattice);
        for p in &self.points {
            for q in neg.points() {
                if lattice.pole_distance(p.z - q.z) < tol {
                    return false;
                }
            }
        }
        true
    }
}

/// dG/dz. Pole at the lattice.
pub fn green_dz(z: Complex64, lattice: &LatticeData) -> Result<Complex64> {
    let zeta = lattice.zeta(z)?;
    let (_, s) = lattice.real_coords(z);
    Ok(-(zeta - z * lattice.eta1() + Complex64::new(0.0, 2.0 * PI * s)) / (4.0 * PI))
}

/// Real gradient (dG/dx, dG/dy) = (2 Re G_z, -2 Im G_z).
pub fn green_gradient(z: Complex64, lattice: &LatticeData) -> Result<[f64; 2]> {
    let gz = green_dz(z, lattice)?;
    Ok([2.0 * gz.re, -2.0 * gz.im])
}

/// Second complex derivative G_zz.
pub fn green_dzz(z: Complex64, lattice: &LatticeData) -> Result<Complex64> {
    let wp = lattice.wp(z)?;
    Ok((wp + lattice.eta1() - Complex64::new(PI / lattice.tau().im, 0.0)) / (4.0 * PI))
}

/// The constant mixed derivative G_{z zbar} = 1/(4 Im tau).
pub fn green_dzzbar(lattice: &LatticeData) -> f64 {
    1.0 / (4.0 * lattice.tau().im)
}

/// G without the zero-mean constant.
fn green_value_raw(z: Complex64, lattice: &LatticeData) -> Result<f64> {
    let d = lattice.pole_distance(z);
    if d < lattice.pole_guard() {
        return Err(Error::Pole {
            nearest: z,
            distance: d,
        });
    }
    let sigma = lattice.sigma(z);
    let quad = (lattice.eta1() * z * z).re / (4.0 * PI);
    Ok(-sigma.norm().ln() / (2.0 * PI) + quad + z.im * z.im / (2.0 * lattice.tau().im))
}

/// Midpoint-quadrature mean of G over the torus at the given grid size.
pub fn green_mean_offset(lattice: &LatticeData, grid: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let r = (i as f64 + 0.5) / grid as f64;
            let s = (j as f64 + 0.5) / grid as f64;
            acc += green_value_raw(r + s * lattice.tau(), lattice).expect("midpoint avoids poles");
        }
    }
    acc / (grid * grid) as f64
}

/// The Green function value, normalized to zero mean by midpoint
/// quadrature on the default grid. Diagnostic quantity; recomputes the
/// normalizing constant on every call.
pub fn green_value(z: Complex64, lattice: &LatticeData) -> Result<f64> {
    Ok(green_value_raw(z, lattice)? - green_mean_offset(lattice, MEAN_QUADRATURE_GRID))
}

/// As `green_value` with a caller-supplied mean offset (from
/// [`green_mean_offset`]) so batch evaluation can amortize it.
pub fn green_value_with_offset(z: Complex64, lattice: &LatticeData, offset: f64) -> Result<f64> {
    Ok(green_value_raw(z, lattice)? - offset)
}

/// G_n value: sum_{j<k} G(a_j - a_k) - n sum_j G(a_j).
pub fn gn_value(config: &Configuration, lattice: &LatticeData) -> Result<f64> {
    let offset = green_mean_offset(lattice, MEAN_QUADRATURE_GRID);
    gn_value_with_offset(config, lattice, offset)
}

fn gn_value_with_offset(config: &Configuration, lattice: &LatticeData, offset: f64) -> Result<f64> {
    let zs = config.zs();
    let n = zs.len();
    let mut acc = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            acc += green_value_with_offset(zs[j] - zs[k], lattice, offset)?;
        }
        acc -= n as f64 * green_value_with_offset(zs[j], lattice, offset)?;
    }
    Ok(acc)
}

/// Gradient of G_n: component j is sum_{k!=j} grad G(a_j - a_k) - n grad G(a_j).
pub fn gn_gradient(config: &Configuration, lattice: &LatticeData) -> Result<Vec<[f64; 2]>> {
    let zs = config.zs();
    let n = zs.len();
    let mut out = vec![[0.0; 2]; n];
    for j in 0..n {
        for k in 0..n {
            if k == j {
                continue;
            }
            let g = green_gradient(zs[j] - zs[k], lattice)?;
            out[j][0] += g[0];
            out[j][1] += g[1];
        }
        let g = green_gradient(zs[j], lattice)?;
        out[j][0] -= n as f64 * g[0];
        out[j][1] -= n as f64 * g[1];
    }
    Ok(out)
}

/// Largest gradient component magnitude; the residual used to certify
/// critical points.
pub fn gn_gradient_residual(config: &Configuration, lattice: &LatticeData) -> Result<f64> {
    let g = gn_gradient(config, lattice)?;
    Ok(g.iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs())))
}

/// 2x2 real Hessian block of G at argument w.
fn hessian_block(w: Complex64, lattice: &LatticeData) -> Result<[[f64; 2]; 2]> {
    let gzz = green_dzz(w, lattice)?;
    let v = green_dzzbar(lattice);
    Ok([
        [2.0 * gzz.re + 2.0 * v, -2.0 * gzz.im],
        [-2.0 * gzz.im, -2.0 * gzz.re + 2.0 * v],
    ])
}

/// Full 2n x 2n real Hessian of G_n, coordinates ordered
/// (x_1, y_1, ..., x_n, y_n); assembled analytically.
pub fn gn_hessian(config: &Configuration, lattice: &LatticeData) -> Result<DMatrix<f64>> {
    let zs = config.zs();
    let n = zs.len();
    let mut h = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let add = |h: &mut DMatrix<f64>, row: usize, col: usize, blk: &[[f64; 2]; 2], sign: f64| {
        for a in 0..2 {
            for b in 0..2 {
                h[(2 * row + a, 2 * col + b)] += sign * blk[a][b];
            }
        }
    };
    for j in 0..n {
        for k in (j + 1)..n {
            let blk = hessian_block(zs[j] - zs[k], lattice)?;
            add(&mut h, j, j, &blk, 1.0);
            add(&mut h, k, k, &blk, 1.0);
            add(&mut h, j, k, &blk, -1.0);
            add(&mut h, k, j, &blk, -1.0);
        }
        let blk = hessian_block(zs[j], lattice)?;
        add(&mut h, j, j, &blk, -(n as f64));
    }
    Ok(h)
}

/// Central finite differences of `gn_gradient`, one Richardson step.
/// Oracle for the analytic Hessian assembly.
pub fn gn_hessian_fd(
    config: &Configuration,
    lattice: &LatticeData,
    step: f64,
) -> Result<DMatrix<f64>> {
    let zs = config.zs();
    let n = zs.len();
    let grad_flat = |zs_mod: &[Complex64]| -> Result<Vec<f64>> {
        let cfg = Configuration::new(zs_mod.to_vec(), lattice)?;
        let g = gn_gradient(&cfg, lattice)?;
        Ok(g.into_iter().flatten().collect())
    };
    let column = |coord: usize, h: f64| -> Result<Vec<f64>> {
        let mut plus = zs.clone();
        let mut minus = zs.clone();
        let (idx, is_im) = (coord / 2, coord % 2 == 1);
        let delta = if is_im {
            Complex64::new(0.0, h)
        } else {
            Complex64::new(h, 0.0)
        };
        plus[idx] += delta;
        minus[idx] -= delta;
        let gp = grad_flat(&plus)?;
        let gm = grad_flat(&minus)?;
        Ok(gp
            .iter()
            .zip(&gm)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect())
    };
    let mut h_mat = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for coord in 0..2 * n {
        let c1 = column(coord, step)?;
        let c2 = column(coord, step / 2.0)?;
        for row in 0..2 * n {
            h_mat[(row, coord)] = (4.0 * c2[row] - c1[row]) / 3.0;
        }
    }
    // Exact symmetrization; FD columns are independently noisy.
    let ht = h_mat.transpose();
    Ok((h_mat + ht) * 0.5)
}

/// Central finite differences of `gn_value`, one Richardson step.
pub fn gn_gradient_fd(
    config: &Configuration,
    lattice: &LatticeData,
    step: f64,
) -> Result<Vec<[f64; 2]>> {
    let offset = green_mean_offset(lattice, MEAN_QUADRATURE_GRID);
    let zs = config.zs();
    let n = zs.len();
    let value = |zs_mod: &[Complex64]| -> Result<f64> {
        let cfg = Configuration::new(zs_mod.to_vec(), lattice)?;
        gn_value_with_offset(&cfg, lattice, offset)
    };
    let mut out = vec![[0.0; 2]; n];
    for j in 0..n {
        for (axis, out_slot) in [(0usize, 0usize), (1, 1)] {
            let d = |h: f64| -> Result<f64> {
                let delta = if axis == 0 {
                    Complex64::new(h, 0.0)
                } else {
                    Complex64::new(0.0, h)
                };
                let mut plus = zs.clone();
                let mut minus = zs.clone();
                plus[j] += delta;
                minus[j] -= delta;
                Ok((value(&plus)? - value(&minus)?) / (2.0 * h))
            };
            let d1 = d(step)?;
            let d2 = d(step / 2.0)?;
            out[j][out_slot] = (4.0 * d2 - d1) / 3.0;
        }
    }
    Ok(out)
}
