//! The hyperelliptic curve Y_n attached to the integral Lame equation:
//! configurations solving the zeta system, the accessory parameter map
//! B = (2n-1) sum_j wp(a_j), Lame polynomials for n <= 2, monodromy data
//! (r, s), and the derivative system a'(B) with the induced quantities
//! c0, d0, r_B, s_B, tau_r, tau_s.

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use crate::green::Configuration;
use crate::premodular::Triangle;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-12;
/// Post-condition tolerance on curve residuals and |B_a - B|.
pub const CURVE_RESIDUAL_TOL: f64 = 1e-10;
/// Largest Newton step per iteration, in lattice-cell units.
const NEWTON_STEP_CLAMP: f64 = 0.3;
/// Iterates may not come closer than this to 0 or the diagonal.
const COLLISION_GUARD: f64 = 1e-7;
const MAX_HALVINGS: usize = 40;

/// A point of Y_n: a configuration, its accessory parameter, and tau.
#[derive(Debug, Clone)]
pub struct YnPoint {
    pub config: Configuration,
    pub b: Complex64,
    pub tau: Complex64,
}

/// The pair of curve points above one accessory parameter.
#[derive(Debug, Clone)]
pub struct YnPair {
    pub plus: YnPoint,
    pub minus: YnPoint,
}

/// Monodromy data (r, s) modulo integer shifts and sign.
#[derive(Debug, Clone)]
pub struct MonodromyData {
    /// As solved from the configuration; varies continuously along curves.
    pub raw_r: Complex64,
    pub raw_s: Complex64,
    /// Canonical representative: reduced mod Z^2 into [0,1)^2, then
    /// sign-flipped into [0,1] x [0,1/2] when real.
    pub r: Complex64,
    pub s: Complex64,
    pub is_real: bool,
    /// Which open triangle of the scan region contains (r, s), if real.
    pub representative_box: Option<Triangle>,
}

/// Tolerance deciding whether monodromy data counts as real.
pub const RS_REAL_TOL: f64 = 1e-8;
/// Tolerance deciding whether (r, s) sits on the half lattice.
pub const RS_HALF_LATTICE_TOL: f64 = 1e-8;

impl MonodromyData {
    fn from_raw(raw_r: Complex64, raw_s: Complex64) -> Self {
        let is_real = raw_r.im.abs() < RS_REAL_TOL && raw_s.im.abs() < RS_REAL_TOL;
        let mut r = raw_r - raw_r.re.floor();
        let mut s = raw_s - raw_s.re.floor();
        if is_real && s.re > 0.5 + RS_HALF_LATTICE_TOL {
            // (r, s) ~ (-r, -s): flip into the lower half of the square.
            r = Complex64::new((1.0 - r.re).rem_euclid(1.0), -r.im);
            s = Complex64::new(1.0 - s.re, -s.im);
        }
        let representative_box = if is_real {
            Triangle::locate(r.re, s.re)
        } else {
            None
        };
        MonodromyData {
            raw_r,
            raw_s,
            r,
            s,
            is_real,
            representative_box,
        }
    }

    fn is_half_lattice(&self) -> bool {
        let near_half_int = |x: Complex64| {
            x.im.abs() < RS_REAL_TOL
                && (2.0 * x.re - (2.0 * x.re).round()).abs() < RS_HALF_LATTICE_TOL
        };
        near_half_int(self.raw_r) && near_half_int(self.raw_s)
    }
}

/// Derivatives along the B-parametrization of Y_n at a non-branch point.
#[derive(Debug, Clone)]
pub struct CurveDerivatives {
    pub a_prime: Vec<Complex64>,
    pub c0: Complex64,
    pub d0: Complex64,
    pub r_b: Complex64,
    pub s_b: Complex64,
    pub tau_r: Complex64,
    pub tau_s: Complex64,
}

/// The holomorphic residuals g^1..g^{n-1} defining Y_n:
/// g^j = sum_{k != j} (zeta(a_j - a_k) + zeta(a_k) - zeta(a_j)).
pub fn yn_residuals(config: &Configuration, lattice: &LatticeData) -> Result<Vec<Complex64>> {
    let zs = config.zs();
    residuals_raw(&zs, lattice)
}

fn residuals_raw(zs: &[Complex64], lattice: &LatticeData) -> Result<Vec<Complex64>> {
    let n = zs.len();
    let zeta: Vec<Complex64> = zs.iter().map(|&z| lattice.zeta(z)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n.saturating_sub(1) {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k == j {
                continue;
            }
            acc += lattice.zeta(zs[j] - zs[k])? + zeta[k] - zeta[j];
        }
        out.push(acc);
    }
    Ok(out)
}

/// The accessory parameter B_a = (2n-1) sum_j wp(a_j).
pub fn accessory_b(config: &Configuration, lattice: &LatticeData) -> Result<Complex64> {
    accessory_b_raw(&config.zs(), lattice)
}

fn accessory_b_raw(zs: &[Complex64], lattice: &LatticeData) -> Result<Complex64> {
    let n = zs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for &z in zs {
        acc += lattice.wp(z)?;
    }
    Ok((2 * n - 1) as f64 * acc)
}

/// Partial derivatives dg^j/da_m of the residuals, an (n-1) x n matrix,
/// from zeta' = -wp:
///   dg^j/da_j = sum_{k != j} (wp(a_j) - wp(a_j - a_k)),
///   dg^j/da_m = wp(a_j - a_m) - wp(a_m) for m != j.
pub(crate) fn residual_partials(
    zs: &[Complex64],
    lattice: &LatticeData,
) -> Result<DMatrix<Complex64>> {
    let n = zs.len();
    let wp: Vec<Complex64> = zs.iter().map(|&z| lattice.wp(z)).collect::<Result<_>>()?;
    let mut mat = DMatrix::<Complex64>::zeros(n - 1, n);
    for j in 0..n - 1 {
        let mut diag = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k == j {
                continue;
            }
            let wjk = lattice.wp(zs[j] - zs[k])?;
            diag += -wjk + wp[j];
            mat[(j, k)] = wjk - wp[k];
        }
        mat[(j, j)] = diag;
    }
    Ok(mat)
}

/// The Lame polynomial, n <= 2 only:
/// l_1(B) = 4B^3 - g2 B - g3 (roots exactly e_1, e_2, e_3),
/// l_2(B) = (B^2 - 3 g2)(B^3 - (9/4) g2 B + (27/4) g3).
pub fn lame_poly(b: Complex64, lattice: &LatticeData, n: usize) -> Result<Complex64> {
    let g2 = lattice.g2();
    let g3 = lattice.g3();
    match n {
        1 => Ok(4.0 * b * b * b - g2 * b - g3),
        2 => Ok((b * b - 3.0 * g2) * (b * b * b - 2.25 * g2 * b + 6.75 * g3)),
        _ => Err(Error::Capability(format!(
            "no explicit Lame polynomial for n = {n}; test branch points via a = -a"
        ))),
    }
}

/// All roots of the Lame polynomial, n <= 2: {e_k} for n = 1 and
/// {+-sqrt(3 g2)} union {-3 e_k} for n = 2.
pub fn lame_roots(lattice: &LatticeData, n: usize) -> Result<Vec<Complex64>> {
    let e = lattice.branch_values();
    match n {
        1 => Ok(e.to_vec()),
        2 => {
            let s = (3.0 * lattice.g2()).sqrt();
            Ok(vec![s, -s, -3.0 * e[0], -3.0 * e[1], -3.0 * e[2]])
        }
        _ => Err(Error::Capability(format!(
            "no explicit Lame polynomial for n = {n}"
        ))),
    }
}

/// Invert wp on the torus by damped Newton from a deterministic seed
/// battery. Returns one of the two preimages.
pub fn wp_inverse(value: Complex64, lattice: &LatticeData) -> Result<Complex64> {
    let tau = lattice.tau();
    let mut seeds: Vec<Complex64> = Vec::new();
    if value.norm() > 20.0 {
        // wp(z) ~ 1/z^2 near the origin.
        let inv_sqrt = value.sqrt().inv();
        seeds.push(inv_sqrt);
        seeds.push(inv_sqrt * Complex64::i());
    }
    for i in 1..6 {
        for j in 1..6 {
            seeds.push(i as f64 / 6.0 + (j as f64 / 6.0) * tau);
        }
    }
    seeds.sort_by(|a, b| {
        let fa = lattice
            .wp(*a)
            .map(|w| (w - value).norm())
            .unwrap_or(f64::INFINITY);
        let fb = lattice
            .wp(*b)
            .map(|w| (w - value).norm())
            .unwrap_or(f64::INFINITY);
        fa.partial_cmp(&fb).unwrap()
    });
    let tol = 1e-11 * value.norm().max(1.0);
    let mut best = seeds[0];
    let mut best_res = f64::INFINITY;
    for &seed in seeds.iter().take(8) {
        let mut a = seed;
        for _ in 0..80 {
            let (w, wp) = match lattice.wp_wp_prime(a) {
                Ok(v) => v,
                Err(_) => break,
            };
            let f = w - value;
            if f.norm() < best_res {
                best_res = f.norm();
                best = a;
            }
            if f.norm() < tol {
                return Ok(a);
            }
            if wp.norm() < 1e-14 {
                break;
            }
            let mut step = f / wp;
            if step.norm() > NEWTON_STEP_CLAMP {
                step *= NEWTON_STEP_CLAMP / step.norm();
            }
            let next = a - step;
            if lattice.pole_distance(next) < COLLISION_GUARD {
                break;
            }
            a = next;
        }
    }
    if best_res < tol * 100.0 {
        return Ok(best);
    }
    Err(Error::NoConvergence {
        iterations: 80,
        residual: best_res,
        last: vec![best],
    })
}

/// One Newton solve of {g^j = 0, B_a = b} from the given start.
fn newton_solve_at_b(
    b: Complex64,
    start: &[Complex64],
    lattice: &LatticeData,
) -> Result<Vec<Complex64>> {
    let n = start.len();
    let mut zs = start.to_vec();
    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let g = residuals_raw(&zs, lattice)?;
        let ba = accessory_b_raw(&zs, lattice)?;
        let mut f = DVector::<Complex64>::zeros(n);
        for (j, &gj) in g.iter().enumerate() {
            f[j] = gj;
        }
        f[n - 1] = ba - b;
        residual = f.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if residual < NEWTON_TOL * b.norm().max(1.0) {
            return Ok(zs);
        }
        let mut jac = DMatrix::<Complex64>::zeros(n, n);
        if n > 1 {
            let partials = residual_partials(&zs, lattice)?;
            for j in 0..n - 1 {
                for k in 0..n {
                    jac[(j, k)] = partials[(j, k)];
                }
            }
        }
        for k in 0..n {
            jac[(n - 1, k)] = (2 * n - 1) as f64 * lattice.wp_prime(zs[k])?;
        }
        let delta = jac
            .lu()
            .solve(&f)
            .ok_or_else(|| Error::SingularSystem("Newton Jacobian for Y_n".into()))?;
        let mut scale = 1.0f64;
        let max_step = delta.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if max_step > NEWTON_STEP_CLAMP {
            scale = NEWTON_STEP_CLAMP / max_step;
        }
        // Step rejection on collision with the lattice or the diagonal.
        let mut accepted = false;
        for _ in 0..8 {
            let cand: Vec<Complex64> = zs
                .iter()
                .zip(delta.iter())
                .map(|(z, d)| z - scale * d)
                .collect();
            let clean = cand
                .iter()
                .all(|&z| lattice.pole_distance(z) > COLLISION_GUARD)
                && cand.iter().enumerate().all(|(i, &z)| {
                    cand.iter()
                        .skip(i + 1)
                        .all(|&w| lattice.pole_distance(z - w) > COLLISION_GUARD)
                });
            if clean {
                zs = cand;
                accepted = true;
                break;
            }
            scale /= 2.0;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations: NEWTON_MAX_ITER,
                residual,
                last: zs,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_MAX_ITER,
        residual,
        last: zs,
    })
}

/// Solve Y_n at accessory parameter b, returning the pair (a, -a).
///
/// For n <= 2 without a seed the point is constructed in closed form
/// (wp-inversion); with a seed, Newton starts there and falls back to a
/// homotopy along B with adaptive step halving.
pub fn solve_yn_from_b(
    b: Complex64,
    lattice: &LatticeData,
    n: usize,
    seed: Option<&Configuration>,
) -> Result<YnPair> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let zs = match seed {
        Some(cfg) => {
            if cfg.n() != n {
                return Err(Error::Domain(format!(
                    "seed has {} points, expected {n}",
                    cfg.n()
                )));
            }
            let mut start = cfg.zs();
            // A negation-symmetric seed sits exactly on a branch point,
            // where the Jacobian is singular; nudge it first.
            if cfg.is_negation_symmetric(lattice, 1e-9) {
                for (j, z) in start.iter_mut().enumerate() {
                    *z += 1e-4 * Complex64::new(0.7, 0.4) * (j as f64 + 1.0);
                }
            }
            match newton_solve_at_b(b, &start, lattice) {
                Ok(sol) => sol,
                Err(_) => continue_along_b(b, &start, lattice)?,
            }
        }
        None => match n {
            1 => vec![wp_inverse(b, lattice)?],
            2 => {
                let start = y2_closed_form_seed(b, lattice)?;
                newton_solve_at_b(b, &start, lattice)?
            }
            _ => {
                return Err(Error::Capability(
                    "solving Y_n for n >= 3 requires a seed configuration".into(),
                ))
            }
        },
    };
    let config = Configuration::new(zs.clone(), lattice)?;
    let neg = Configuration::new(zs.iter().map(|z| -z).collect(), lattice)?;
    let plus = YnPoint {
        config,
        b,
        tau: lattice.tau(),
    };
    let minus = YnPoint {
        config: neg,
        b,
        tau: lattice.tau(),
    };
    Ok(YnPair { plus, minus })
}

/// Seed for Y_2 at parameter b: wp(a_1), wp(a_2) are the roots of
/// t^2 - (B/3) t + (B^2/9 - g2/4), with the signs of wp' opposite.
fn y2_closed_form_seed(b: Complex64, lattice: &LatticeData) -> Result<Vec<Complex64>> {
    let g2 = lattice.g2();
    let half_sum = b / 6.0;
    let disc = (g2 / 4.0 - b * b / 12.0).sqrt();
    let p1 = half_sum + disc;
    let p2 = half_sum - disc;
    let a1 = wp_inverse(p1, lattice)?;
    let mut a2 = wp_inverse(p2, lattice)?;
    let w1 = lattice.wp_prime(a1)?;
    let w2 = lattice.wp_prime(a2)?;
    if (w1 + w2).norm() > (w1 - w2).norm() {
        a2 = -a2;
    }
    Ok(vec![a1, a2])
}

/// Homotopy in B from the seed's own accessory parameter to `target`
/// with adaptive step halving.
fn continue_along_b(
    target: Complex64,
    seed: &[Complex64],
    lattice: &LatticeData,
) -> Result<Vec<Complex64>> {
    let b_start = accessory_b_raw(seed, lattice)?;
    let mut current = seed.to_vec();
    let mut t = 0.0f64;
    let mut step = 1.0f64;
    let mut halvings = 0usize;
    while t < 1.0 {
        let t_next = (t + step).min(1.0);
        let b_next = b_start + (target - b_start) * t_next;
        match newton_solve_at_b(b_next, &current, lattice) {
            Ok(sol) => {
                current = sol;
                t = t_next;
                step = (step * 2.0).min(1.0);
            }
            Err(e) => {
                step /= 2.0;
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(e);
                }
            }
        }
    }
    Ok(current)
}

/// Largest defining-equation residual of a YnPoint, including |B_a - B|.
pub fn yn_point_residual(point: &YnPoint, lattice: &LatticeData) -> Result<f64> {
    let g = yn_residuals(&point.config, lattice)?;
    let ba = accessory_b(&point.config, lattice)?;
    let mut r = (ba - point.b).norm();
    for v in g {
        r = r.max(v.norm());
    }
    Ok(r)
}

/// Monodromy data of a curve point: the unique (r, s) with
/// r + s*tau = sum a_j and r*eta1 + s*eta2 = sum zeta(a_j), solved in
/// closed form through the Legendre relation:
/// r = (eta2 A - tau Z) / (-2 pi i), s = (eta1 A - Z) / (2 pi i).
pub fn monodromy_rs(point: &YnPoint, lattice: &LatticeData) -> Result<MonodromyData> {
    let zs = point.config.zs();
    let a_sum: Complex64 = zs.iter().sum();
    let mut zeta_sum = Complex64::new(0.0, 0.0);
    for &z in &zs {
        zeta_sum += lattice.zeta(z)?;
    }
    let (eta1, eta2, tau) = (lattice.eta1(), lattice.eta2(), lattice.tau());
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let r = (eta2 * a_sum - tau * zeta_sum) / (-two_pi_i);
    let s = (eta1 * a_sum - zeta_sum) / two_pi_i;
    // Consistency of both defining equations.
    let res1 = (r + s * tau - a_sum).norm();
    let res2 = (r * eta1 + s * eta2 - zeta_sum).norm();
    let scale = a_sum.norm().max(zeta_sum.norm()).max(1.0);
    if res1 > CURVE_RESIDUAL_TOL * scale || res2 > CURVE_RESIDUAL_TOL * scale {
        return Err(Error::SingularSystem(format!(
            "monodromy system residuals {res1:.3e}, {res2:.3e}"
        )));
    }
    let data = MonodromyData::from_raw(r, s);
    if data.is_half_lattice() {
        return Err(Error::BranchPoint { r, s });
    }
    Ok(data)
}

/// Solve the derivative system along Y_n at a non-branch point:
/// the n-1 rows sum_k (dg^j/da_k) a_k' = 0 together with
/// (2n-1) sum_j wp'(a_j) a_j' = 1, then
///   d0 = sum a_j', c0 = -sum wp(a_j) a_j',
///   s_B = (c0 - d0 eta1) / (-2 pi i), r_B = (c0 tau - d0 eta2) / (2 pi i),
///   tau_r = 8 pi^2 s_B, tau_s = -8 pi^2 r_B.
pub fn curve_derivatives(point: &YnPoint, lattice: &LatticeData) -> Result<CurveDerivatives> {
    let zs = point.config.zs();
    let n = zs.len();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    if n > 1 {
        let partials = residual_partials(&zs, lattice)?;
        for j in 0..n - 1 {
            for k in 0..n {
                mat[(j, k)] = partials[(j, k)];
            }
        }
    }
    for k in 0..n {
        mat[(n - 1, k)] = (2 * n - 1) as f64 * lattice.wp_prime(zs[k])?;
    }
    let mut rhs = DVector::<Complex64>::zeros(n);
    rhs[n - 1] = Complex64::new(1.0, 0.0);
    let a_prime = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("derivative system on Y_n (branch point?)".into()))?;

    let d0: Complex64 = a_prime.iter().sum();
    let mut c0 = Complex64::new(0.0, 0.0);
    for (k, &z) in zs.iter().enumerate() {
        c0 -= lattice.wp(z)? * a_prime[k];
    }
    let (eta1, eta2, tau) = (lattice.eta1(), lattice.eta2(), lattice.tau());
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let s_b = (c0 - d0 * eta1) / (-two_pi_i);
    let r_b = (c0 * tau - d0 * eta2) / two_pi_i;
    let tau_r = 8.0 * PI * PI * s_b;
    let tau_s = -8.0 * PI * PI * r_b;
    if tau_r.norm() == 0.0 && tau_s.norm() == 0.0 {
        return Err(Error::SingularSystem("(tau_r, tau_s) = (0, 0)".into()));
    }
    Ok(CurveDerivatives {
        a_prime: a_prime.iter().copied().collect(),
        c0,
        d0,
        r_b,
        s_b,
        tau_r,
        tau_s,
    })
}

/// Finite-difference verification of the wedge identity
/// d tau ^ dB = 8 pi^2 dr ^ ds: returns the relative residual
/// |det J - 1/(8 pi^2)| / (1/(8 pi^2)) where J is the central-difference
/// Jacobian of (tau, B) -> (r, s) at step h, with the Y_n solver as the
/// map evaluator.
pub fn wedge_check(point: &YnPoint, lattice: &LatticeData, h: f64) -> Result<f64> {
    let n = point.config.n();
    let _ = lattice;
    let rs_at = |tau: Complex64, b: Complex64| -> Result<(Complex64, Complex64)> {
        let l = LatticeData::new(tau)?;
        let pair = solve_yn_from_b(b, &l, n, Some(&point.config))?;
        let m = monodromy_rs(&pair.plus, &l)?;
        Ok((m.raw_r, m.raw_s))
    };
    // The map is holomorphic, so real-direction differences suffice.
    let (rp_tau, sp_tau) = rs_at(point.tau + h, point.b)?;
    let (rm_tau, sm_tau) = rs_at(point.tau - h, point.b)?;
    let r_tau = (rp_tau - rm_tau) / (2.0 * h);
    let s_tau = (sp_tau - sm_tau) / (2.0 * h);
    let (rp_b, sp_b) = rs_at(point.tau, point.b + h)?;
    let (rm_b, sm_b) = rs_at(point.tau, point.b - h)?;
    let r_b = (rp_b - rm_b) / (2.0 * h);
    let s_b = (sp_b - sm_b) / (2.0 * h);
    let det = r_tau * s_b - r_b * s_tau;
    let target = 1.0 / (8.0 * PI * PI);
    Ok((det - target).norm() / target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn residuals_empty_for_n1() {
        let l = LatticeData::new(c(0.0, 1.0)).unwrap();
        let cfg = Configuration::new(vec![c(0.3, 0.2)], &l).unwrap();
        assert!(yn_residuals(&cfg, &l).unwrap().is_empty());
    }

    #[test]
    fn symmetric_pair_residual_matches_duplication() {
        // For {a, -a}: g^1 = zeta(2a) - 2 zeta(a) = wp''(a) / (2 wp'(a)).
        let l = LatticeData::new(c(0.0, 1.0)).unwrap();
        let a = 0.25 + 0.1 * l.tau();
        let cfg = Configuration::new(vec![a, -a], &l).unwrap();
        let g = yn_residuals(&cfg, &l).unwrap();
        let wp = l.wp(a).unwrap();
        let wpp = l.wp_prime(a).unwrap();
        let wp2 = 6.0 * wp * wp - l.g2() / 2.0;
        let expected = wp2 / (2.0 * wpp);
        assert!((g[0] - expected).norm() < 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn residuals_odd_under_negation() {
        let tau = c(0.2, 1.1);
        let l = LatticeData::new(tau).unwrap();
        let zs = vec![0.31 + 0.17 * tau, 0.62 + 0.4 * tau, 0.13 + 0.71 * tau];
        let cfg = Configuration::new(zs.clone(), &l).unwrap();
        let neg = Configuration::new(zs.iter().map(|z| -z).collect(), &l).unwrap();
        let g = yn_residuals(&cfg, &l).unwrap();
        let gn = yn_residuals(&neg, &l).unwrap();
        for (a, b) in g.iter().zip(&gn) {
            assert!((a + b).norm() < 1e-11);
        }
    }

    #[test]
    fn lame_poly_vanishes_at_roots() {
        let l = LatticeData::new(c(0.3, 1.4)).unwrap();
        for e in l.branch_values() {
            assert!(lame_poly(e, &l, 1).unwrap().norm() < 1e-9);
        }
        let scale = l.g2().norm().powf(2.5).max(1.0);
        for root in lame_roots(&l, 2).unwrap() {
            assert!(lame_poly(root, &l, 2).unwrap().norm() < 1e-8 * scale);
        }
        assert!(matches!(
            lame_poly(c(1.0, 0.0), &l, 3),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn l2_square_lattice_factorization() {
        // g3(i) = 0, so l2(B) = (B^2 - 3 g2) B (B^2 - (9/4) g2).
        let l = LatticeData::new(c(0.0, 1.0)).unwrap();
        let g2 = l.g2();
        for &b in &[c(1.3, 0.4), c(-0.7, 2.2), c(5.0, -1.0)] {
            let direct = (b * b - 3.0 * g2) * b * (b * b - 2.25 * g2);
            let got = lame_poly(b, &l, 2).unwrap();
            assert!((got - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn wp_inverse_roundtrip() {
        let l = LatticeData::new(c(0.4, 1.2)).unwrap();
        for &v in &[c(1.0, 2.0), c(-3.0, 0.5), c(40.0, -11.0), c(0.01, 0.02)] {
            let a = wp_inverse(v, &l).unwrap();
            assert!((l.wp(a).unwrap() - v).norm() < 1e-9 * v.norm().max(1.0));
        }
    }

    #[test]
    fn solve_y1_hits_branch_point() {
        let l = LatticeData::new(c(0.1, 1.3)).unwrap();
        let e1 = l.branch_values()[0];
        let pair = solve_yn_from_b(e1, &l, 1, None).unwrap();
        let a = pair.plus.config.zs()[0];
        // a = omega1/2 up to lattice translation and sign.
        let d = l.pole_distance(2.0 * a - 1.0);
        assert!(d < 1e-5, "distance {d}");
    }

    #[test]
    fn solve_y2_generic_point() {
        let l = LatticeData::new(c(0.0, 2.0)).unwrap();
        let b = c(3.0, 1.0);
        let pair = solve_yn_from_b(b, &l, 2, None).unwrap();
        assert!(yn_point_residual(&pair.plus, &l).unwrap() < CURVE_RESIDUAL_TOL);
        assert!(yn_point_residual(&pair.minus, &l).unwrap() < CURVE_RESIDUAL_TOL);
        assert!(pair.plus.config.disjoint_from_negation(&l, 1e-6));
        // 2 a_j stays off the lattice at a non-branch point.
        for z in pair.plus.config.zs() {
            assert!(l.pole_distance(2.0 * z) > 1e-4);
        }
    }

    #[test]
    fn monodromy_shift_and_negation() {
        let tau = c(0.3, 1.2);
        let l = LatticeData::new(tau).unwrap();
        let b = c(2.0, 0.7);
        let pair = solve_yn_from_b(b, &l, 2, None).unwrap();
        let m = monodromy_rs(&pair.plus, &l).unwrap();
        // Translate one point by 1: (r, s) shifts by an integer vector.
        let mut zs = pair.plus.config.zs();
        zs[0] += 1.0;
        let shifted = YnPoint {
            config: Configuration::new(zs, &l).unwrap(),
            b,
            tau,
        };
        let ms = monodromy_rs(&shifted, &l).unwrap();
        let dr = ms.raw_r - m.raw_r;
        let ds = ms.raw_s - m.raw_s;
        assert!((dr - dr.re.round()).norm() < 1e-9 && (ds - ds.re.round()).norm() < 1e-9);
        // Negation flips the raw data.
        let mn = monodromy_rs(&pair.minus, &l).unwrap();
        assert!((mn.raw_r + m.raw_r).norm() < 1e-9);
        assert!((mn.raw_s + m.raw_s).norm() < 1e-9);
    }

    #[test]
    fn hexagonal_monodromy_is_one_third() {
        let tau = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let l = LatticeData::new(tau).unwrap();
        let a = (1.0 + tau) / 3.0;
        let b = l.wp(a).unwrap();
        let point = YnPoint {
            config: Configuration::new(vec![a], &l).unwrap(),
            b,
            tau,
        };
        let m = monodromy_rs(&point, &l).unwrap();
        assert!(m.is_real);
        assert!((m.r - c(1.0 / 3.0, 0.0)).norm() < 1e-10);
        assert!((m.s - c(1.0 / 3.0, 0.0)).norm() < 1e-10);
        assert_eq!(m.representative_box, Some(Triangle::T0));
    }

    #[test]
    fn branch_point_monodromy_detected() {
        let l = LatticeData::new(c(0.0, 1.3)).unwrap();
        let point = YnPoint {
            config: Configuration::new(vec![c(0.5, 0.0)], &l).unwrap(),
            b: l.branch_values()[0],
            tau: l.tau(),
        };
        assert!(matches!(
            monodromy_rs(&point, &l),
            Err(Error::BranchPoint { .. })
        ));
    }

    #[test]
    fn n1_curve_derivatives_closed_form() {
        let l = LatticeData::new(c(0.2, 1.5)).unwrap();
        let a = 0.31 + 0.24 * l.tau();
        let b = l.wp(a).unwrap();
        let point = YnPoint {
            config: Configuration::new(vec![a], &l).unwrap(),
            b,
            tau: l.tau(),
        };
        let d = curve_derivatives(&point, &l).unwrap();
        let wp_prime = l.wp_prime(a).unwrap();
        assert!((d.a_prime[0] - wp_prime.inv()).norm() < 1e-10 * wp_prime.inv().norm());
        let tau_r_expect = -4.0 * PI * Complex64::i() * (l.eta1() + b) / wp_prime;
        assert!((d.tau_r - tau_r_expect).norm() < 1e-9 * tau_r_expect.norm());
        let ratio = d.tau_s / d.tau_r;
        let ratio_expect = l.tau() - Complex64::new(0.0, 2.0 * PI) / (l.eta1() + b);
        assert!((ratio - ratio_expect).norm() < 1e-9 * ratio_expect.norm().max(1.0));
    }

    #[test]
    fn a_prime_matches_finite_differences_n2() {
        let l = LatticeData::new(c(0.0, 2.0)).unwrap();
        let b = c(3.0, 1.0);
        let pair = solve_yn_from_b(b, &l, 2, None).unwrap();
        let d = curve_derivatives(&pair.plus, &l).unwrap();
        let h = 1e-6;
        let plus = solve_yn_from_b(b + h, &l, 2, Some(&pair.plus.config)).unwrap();
        let minus = solve_yn_from_b(b - h, &l, 2, Some(&pair.plus.config)).unwrap();
        for k in 0..2 {
            let fd = (plus.plus.config.zs()[k] - minus.plus.config.zs()[k]) / (2.0 * h);
            assert!(
                (fd - d.a_prime[k]).norm() < 1e-6 * d.a_prime[k].norm().max(1.0),
                "k {k}: fd {fd} analytic {}",
                d.a_prime[k]
            );
        }
    }

    #[test]
    fn wedge_identity_n1_square_lattice() {
        let l = LatticeData::new(c(0.0, 1.0)).unwrap();
        let b = 2.0 * l.branch_values()[0];
        let pair = solve_yn_from_b(b, &l, 1, None).unwrap();
        let res = wedge_check(&pair.plus, &l, 1e-5).unwrap();
        assert!(res < 1e-5, "wedge residual {res}");
    }
}
