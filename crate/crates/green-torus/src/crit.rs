//! End-to-end critical point pipelines for G_n: trivial points through
//! Lame-polynomial roots (branch points of Y_n), nontrivial points
//! through real zeros of the pre-modular forms, the closed-form Hessian
//! determinant
//!
//!   det D^2 G_n = (-1)^n n^2 / (4 (2 pi)^{2n+2} Im tau)
//!                 * c_p * |tau_r|^2 * Im(tau_s / tau_r),
//!
//! the Jacobian of the trace map phi, and degeneracy classification.

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use crate::green::{self, Configuration};
use crate::lame::{
    self, accessory_b, curve_derivatives, monodromy_rs, wp_inverse, CurveDerivatives,
    MonodromyData, YnPoint,
};
use crate::modular::Gamma02;
use crate::premodular::{self, RsZero, Triangle};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Residual bound certifying a configuration as critical.
pub const CRITICAL_RESIDUAL_TOL: f64 = 1e-8;
/// Relative margin below which tau_s/tau_r counts as real (degenerate).
pub const DEGENERACY_MARGIN_TOL: f64 = 1e-6;
/// Multiplicity threshold for Lame-polynomial roots.
const ROOT_SEPARATION_TOL: f64 = 1e-8;
const RECOVERY_NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Trivial,
    Nontrivial,
}

/// Degeneracy verdict carrying its margin. For nontrivial points the
/// margin is |Im(tau_s conj(tau_r))| / (|tau_r|^2 + |tau_s|^2); for
/// trivial points it is |det_numeric| itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegeneracyVerdict {
    NonDegenerate { margin: f64 },
    NearDegenerate { margin: f64 },
    Degenerate { margin: f64 },
}

impl DegeneracyVerdict {
    fn from_margin(margin: f64) -> Self {
        if margin < DEGENERACY_MARGIN_TOL {
            DegeneracyVerdict::Degenerate { margin }
        } else if margin < 10.0 * DEGENERACY_MARGIN_TOL {
            DegeneracyVerdict::NearDegenerate { margin }
        } else {
            DegeneracyVerdict::NonDegenerate { margin }
        }
    }

    pub fn margin(&self) -> f64 {
        match *self {
            DegeneracyVerdict::NonDegenerate { margin }
            | DegeneracyVerdict::NearDegenerate { margin }
            | DegeneracyVerdict::Degenerate { margin } => margin,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, DegeneracyVerdict::Degenerate { .. })
    }
}

/// A fully analyzed critical point of G_n.
#[derive(Debug, Clone)]
pub struct CriticalPointRecord {
    pub config: Configuration,
    pub kind: CriticalKind,
    pub b: Complex64,
    /// Monodromy data; absent for trivial points, whose (r, s) sits on
    /// the half lattice.
    pub rs: Option<MonodromyData>,
    /// Determinant of the analytically assembled 2n x 2n Hessian.
    pub det_numeric: f64,
    /// Closed-form determinant; nontrivial points only.
    pub det_closed: Option<f64>,
    pub c_p: Option<f64>,
    /// tau_s / tau_r; None when tau_r = 0 (the ratio is infinite).
    pub tau_ratio: Option<Complex64>,
    pub degeneracy: DegeneracyVerdict,
    pub gradient_residual: f64,
    /// Set when a Lame-polynomial root was merged with a neighbor.
    pub multiple_root: bool,
}

/// Trivial-point search output with per-root failure log.
#[derive(Debug, Clone)]
pub struct TrivialSearch {
    pub records: Vec<CriticalPointRecord>,
    pub failures: Vec<String>,
}

/// A matched pair of nontrivial critical points (a, -a).
#[derive(Debug, Clone)]
pub struct NontrivialPair {
    pub plus: CriticalPointRecord,
    pub minus: CriticalPointRecord,
}

/// Nontrivial search output; zeros that resisted recovery are kept.
#[derive(Debug, Clone)]
pub struct NontrivialSearch {
    pub pairs: Vec<NontrivialPair>,
    pub unresolved: Vec<RsZero>,
    /// Scan resolution per triangle; completeness is limited by it.
    pub grid: usize,
}

/// Degeneracy of a nontrivial point from its curve derivatives.
pub fn classify_degeneracy(derivs: &CurveDerivatives) -> DegeneracyVerdict {
    let tau_r = derivs.tau_r;
    let tau_s = derivs.tau_s;
    let margin = (tau_s * tau_r.conj()).im.abs() / (tau_r.norm_sqr() + tau_s.norm_sqr());
    DegeneracyVerdict::from_margin(margin)
}

/// det D(phi o a) where phi(a) = -4 pi sum_j grad G(a_j), via
/// -(1/(4 pi^2 Im tau)) |tau_r|^2 Im(tau_s/tau_r); cross-checked against
/// the c0/d0 form -(4 |c0 - d0 eta1|^2 / Im tau) Im(tau + 2 pi i/(c0/d0 - eta1))
/// whenever d0 is not tiny.
pub fn jacobian_phi(derivs: &CurveDerivatives, lattice: &LatticeData) -> Result<f64> {
    let im_tau = lattice.tau().im;
    let tau_r = derivs.tau_r;
    let tau_s = derivs.tau_s;
    let primary = -(tau_s * tau_r.conj()).im / (4.0 * PI * PI * im_tau);
    if derivs.d0.norm() > 1e-9 * derivs.c0.norm().max(1.0) {
        let w = derivs.c0 - derivs.d0 * lattice.eta1();
        let inner = lattice.tau()
            + Complex64::new(0.0, 2.0 * PI) / (derivs.c0 / derivs.d0 - lattice.eta1());
        let alt = -(4.0 * w.norm_sqr() / im_tau) * inner.im;
        let scale = primary.abs().max(alt.abs()).max(1e-300);
        if (primary - alt).abs() > 1e-10 * scale {
            return Err(Error::SingularSystem(format!(
                "Jacobian closed forms disagree: {primary:.17e} vs {alt:.17e}"
            )));
        }
    }
    Ok(primary)
}

/// The trace map phi(a) = -4 pi sum_j grad G(a_j) as a real 2-vector.
pub fn phi_map(config: &Configuration, lattice: &LatticeData) -> Result<[f64; 2]> {
    let mut acc = [0.0f64; 2];
    for &z in &config.zs() {
        let g = green::green_gradient(z, lattice)?;
        acc[0] += g[0];
        acc[1] += g[1];
    }
    Ok([-4.0 * PI * acc[0], -4.0 * PI * acc[1]])
}

/// Closed-form Hessian determinant and the constant c_p at a nontrivial
/// critical point. c_p is the squared modulus of the ratio between the
/// principal (n-1) minor of the residual-partial matrix (after rotating
/// the largest |a_k'(B)| into the last slot) and that pivot derivative.
pub fn hessian_closed_form(
    point: &YnPoint,
    derivs: &CurveDerivatives,
    lattice: &LatticeData,
) -> Result<(f64, f64)> {
    let n = point.config.n();
    if !point.config.disjoint_from_negation(lattice, 1e-7) {
        return Err(Error::Domain(
            "closed-form Hessian requires a nontrivial (non-branch) point".into(),
        ));
    }
    // Maximal pivot: rotate the point with the largest |a_k'| to the end.
    let (pivot, pivot_val) = derivs
        .a_prime
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(k, v)| (k, *v))
        .unwrap();
    if pivot_val.norm() == 0.0 {
        return Err(Error::SingularSystem(
            "all a_k'(B) vanish at a nontrivial critical point".into(),
        ));
    }
    let det_minor = if n == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        let mut zs = point.config.zs();
        zs.swap(pivot, n - 1);
        let partials = lame::residual_partials(&zs, lattice)?;
        let mut minor = DMatrix::<Complex64>::zeros(n - 1, n - 1);
        for j in 0..n - 1 {
            for k in 0..n - 1 {
                minor[(j, k)] = partials[(j, k)];
            }
        }
        minor.lu().determinant()
    };
    let c_p = det_minor.norm_sqr() / pivot_val.norm_sqr();
    if c_p <= 0.0 {
        return Err(Error::SingularSystem("c_p vanished".into()));
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let prefactor =
        sign * (n * n) as f64 / (4.0 * (2.0 * PI).powi(2 * n as i32 + 2) * lattice.tau().im);
    let det = prefactor * c_p * (derivs.tau_s * derivs.tau_r.conj()).im;
    Ok((det, c_p))
}

/// The explicit n = 2 determinant expression
///   c_p |B^2 + 3 eta1 B - (3/2) g2|^2 / ((2 pi)^4 |l_2(B)| Im tau)
///   * Im(tau - 6 pi i B / (B^2 + 3 eta1 B - (3/2) g2)),
///
/// an algebraic rearrangement of the general formula.
pub fn hessian_n2_example_form(b: Complex64, c_p: f64, lattice: &LatticeData) -> Result<f64> {
    let x = b * b + 3.0 * lattice.eta1() * b - 1.5 * lattice.g2();
    let l2 = lame::lame_poly(b, lattice, 2)?;
    let inner = lattice.tau() - Complex64::new(0.0, 6.0 * PI) * b / x;
    Ok(c_p * x.norm_sqr() / ((2.0 * PI).powi(4) * l2.norm() * lattice.tau().im) * inner.im)
}

fn determinant(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

/// Assemble a record for a configuration already certified critical.
fn build_record(
    config: Configuration,
    kind: CriticalKind,
    lattice: &LatticeData,
    multiple_root: bool,
) -> Result<CriticalPointRecord> {
    let gradient_residual = green::gn_gradient_residual(&config, lattice)?;
    let b = accessory_b(&config, lattice)?;
    let det_numeric = determinant(&green::gn_hessian(&config, lattice)?);
    match kind {
        CriticalKind::Trivial => Ok(CriticalPointRecord {
            config,
            kind,
            b,
            rs: None,
            det_numeric,
            det_closed: None,
            c_p: None,
            tau_ratio: None,
            degeneracy: DegeneracyVerdict::from_margin(det_numeric.abs()),
            gradient_residual,
            multiple_root,
        }),
        CriticalKind::Nontrivial => {
            let point = YnPoint {
                config: config.clone(),
                b,
                tau: lattice.tau(),
            };
            let rs = monodromy_rs(&point, lattice)?;
            let derivs = curve_derivatives(&point, lattice)?;
            let (det_closed, c_p) = hessian_closed_form(&point, &derivs, lattice)?;
            let tau_ratio = if derivs.tau_r.norm() > 1e-12 * derivs.tau_s.norm().max(1.0) {
                Some(derivs.tau_s / derivs.tau_r)
            } else {
                None
            };
            Ok(CriticalPointRecord {
                config,
                kind,
                b,
                rs: Some(rs),
                det_numeric,
                det_closed: Some(det_closed),
                c_p: Some(c_p),
                tau_ratio,
                degeneracy: classify_degeneracy(&derivs),
                gradient_residual,
                multiple_root,
            })
        }
    }
}

/// All trivial critical points of G_n (branch points of Y_n).
///
/// For n <= 2 the Lame-polynomial roots are known in closed form; for
/// n = 3 the search runs over the symmetric ansatz {h, a, -a} with h a
/// half period. Larger n is not supported.
pub fn find_trivial(lattice: &LatticeData, n: usize) -> Result<TrivialSearch> {
    match n {
        0 => Err(Error::Domain("n must be positive".into())),
        1 => {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for k in 1..=3 {
                let hp = lattice.half_period(k);
                match Configuration::new(vec![hp], lattice)
                    .and_then(|cfg| build_record(cfg, CriticalKind::Trivial, lattice, false))
                {
                    Ok(rec) => records.push(rec),
                    Err(e) => failures.push(format!("half period {k}: {e}")),
                }
            }
            Ok(TrivialSearch { records, failures })
        }
        2 => find_trivial_n2(lattice),
        3 => find_trivial_n3(lattice),
        _ => Err(Error::Capability(format!(
            "trivial-point search implemented for n <= 3, got {n}"
        ))),
    }
}

fn find_trivial_n2(lattice: &LatticeData) -> Result<TrivialSearch> {
    let roots = lame::lame_roots(lattice, 2)?;
    // Merge multiple roots (finite exceptional tau set).
    let scale = roots.iter().fold(0.0f64, |m, r| m.max(r.norm())).max(1.0);
    let mut merged: Vec<(Complex64, bool)> = Vec::new();
    for &root in &roots {
        if let Some(entry) = merged
            .iter_mut()
            .find(|(r, _)| (*r - root).norm() < ROOT_SEPARATION_TOL * scale)
        {
            entry.1 = true;
            continue;
        }
        merged.push((root, false));
    }
    let e = lattice.branch_values();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (root, multiple) in merged {
        let build = || -> Result<CriticalPointRecord> {
            // -3 e_l corresponds to the two complementary half periods;
            // +-sqrt(3 g2) to a symmetric pair {a, -a} with wp(a) = B/6.
            let half_period_root = (0..3).find(|&l| (root + 3.0 * e[l]).norm() < 1e-6 * scale);
            let config = match half_period_root {
                Some(l) => {
                    let others: Vec<Complex64> = (0..3)
                        .filter(|&k| k != l)
                        .map(|k| lattice.half_period(k + 1))
                        .collect();
                    Configuration::new(others, lattice)?
                }
                None => {
                    let a = wp_inverse(root / 6.0, lattice)?;
                    Configuration::new(vec![a, -a], lattice)?
                }
            };
            let rec = build_record(config, CriticalKind::Trivial, lattice, multiple)?;
            if rec.gradient_residual > CRITICAL_RESIDUAL_TOL {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    residual: rec.gradient_residual,
                    last: rec.config.zs(),
                });
            }
            Ok(rec)
        };
        match build() {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push(format!("root {root}: {e}")),
        }
    }
    Ok(TrivialSearch { records, failures })
}

/// n = 3: configurations {h, a, -a}. The residual at the half period is
/// identically zero, leaving one scalar equation
///   F_h(a) = zeta(a - h) + zeta(h) + zeta(2a) - 3 zeta(a) = 0,
/// solved by grid scan plus Newton; plus the all-half-period triple.
fn find_trivial_n3(lattice: &LatticeData) -> Result<TrivialSearch> {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let triple: Vec<Complex64> = (1..=3).map(|k| lattice.half_period(k)).collect();
    match Configuration::new(triple, lattice)
        .and_then(|cfg| build_record(cfg, CriticalKind::Trivial, lattice, false))
    {
        Ok(rec) => records.push(rec),
        Err(e) => failures.push(format!("half-period triple: {e}")),
    }

    let tau = lattice.tau();
    for k in 1..=3 {
        let h = lattice.half_period(k);
        let f = |a: Complex64| -> Result<Complex64> {
            Ok(
                lattice.zeta(a - h)? + lattice.zeta(h)? + lattice.zeta(2.0 * a)?
                    - 3.0 * lattice.zeta(a)?,
            )
        };
        let f_deriv = |a: Complex64| -> Result<Complex64> {
            Ok(-lattice.wp(a - h)? - 2.0 * lattice.wp(2.0 * a)? + 3.0 * lattice.wp(a)?)
        };
        let mut found: Vec<Complex64> = Vec::new();
        let grid = 14;
        for i in 0..grid {
            for j in 0..grid {
                let mut a =
                    (i as f64 + 0.41) / grid as f64 + ((j as f64 + 0.57) / grid as f64) * tau;
                let clean = |z: Complex64| {
                    lattice.pole_distance(z) > 1e-3
                        && lattice.pole_distance(2.0 * z) > 1e-3
                        && lattice.pole_distance(z - h) > 1e-3
                };
                if !clean(a) {
                    continue;
                }
                let mut ok = false;
                for _ in 0..RECOVERY_NEWTON_MAX_ITER {
                    let v = match f(a) {
                        Ok(v) => v,
                        Err(_) => break,
                    };
                    if v.norm() < 1e-11 {
                        ok = true;
                        break;
                    }
                    let d = match f_deriv(a) {
                        Ok(d) => d,
                        Err(_) => break,
                    };
                    if d.norm() < 1e-12 {
                        break;
                    }
                    let mut step = v / d;
                    if step.norm() > 0.2 {
                        step *= 0.2 / step.norm();
                    }
                    let next = a - step;
                    if !clean(next) {
                        break;
                    }
                    a = next;
                }
                if ok
                    && found.iter().all(|&z| {
                        lattice.pole_distance(z - a) > 1e-6 && lattice.pole_distance(z + a) > 1e-6
                    })
                {
                    found.push(a);
                }
            }
        }
        for a in found {
            match Configuration::new(vec![h, a, -a], lattice)
                .and_then(|cfg| build_record(cfg, CriticalKind::Trivial, lattice, false))
            {
                Ok(rec) => {
                    if rec.gradient_residual < CRITICAL_RESIDUAL_TOL
                        && records.iter().all(|r: &CriticalPointRecord| {
                            !r.config.multiset_eq(&rec.config, lattice, 1e-6)
                        })
                    {
                        records.push(rec);
                    }
                }
                Err(e) => failures.push(format!("ansatz h_{k}, a: {e}")),
            }
        }
    }
    Ok(TrivialSearch { records, failures })
}

/// Recover the configuration behind a real pre-modular zero: solve the
/// square system {g^j = 0, sum a_j = r + s tau} by multi-start Newton,
/// then verify the second monodromy equation (the trace identity).
fn recover_from_rs(zero: &RsZero, lattice: &LatticeData, n: usize) -> Result<Configuration> {
    let tau = lattice.tau();
    let target = zero.r + zero.s * tau;
    if n == 1 {
        return Configuration::new(vec![target], lattice);
    }
    let seeds = recovery_seeds(target, lattice, n);
    for seed in seeds {
        if let Ok(zs) = newton_recover(&seed, target, lattice) {
            // Second defining equation of the monodromy data.
            let mut zeta_sum = Complex64::new(0.0, 0.0);
            let mut valid = true;
            for &z in &zs {
                match lattice.zeta(z) {
                    Ok(v) => zeta_sum += v,
                    Err(_) => {
                        valid = false;
                        break;
                    }
                }
            }
            if !valid {
                continue;
            }
            let rhs = zero.r * lattice.eta1() + zero.s * lattice.eta2();
            if (zeta_sum - rhs).norm() > CRITICAL_RESIDUAL_TOL * rhs.norm().max(1.0) {
                continue;
            }
            if let Ok(cfg) = Configuration::new(zs, lattice) {
                if cfg.disjoint_from_negation(lattice, 1e-7) {
                    return Ok(cfg);
                }
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: RECOVERY_NEWTON_MAX_ITER,
        residual: f64::NAN,
        last: vec![],
    })
}

fn recovery_seeds(target: Complex64, lattice: &LatticeData, n: usize) -> Vec<Vec<Complex64>> {
    let tau = lattice.tau();
    let mut seeds = Vec::new();
    let grid = if n == 2 { 7 } else { 5 };
    let clean = |zs: &[Complex64]| {
        zs.iter().all(|&z| lattice.pole_distance(z) > 0.02)
            && zs.iter().enumerate().all(|(i, &z)| {
                zs.iter()
                    .skip(i + 1)
                    .all(|&w| lattice.pole_distance(z - w) > 0.02)
            })
    };
    match n {
        2 => {
            for i in 0..grid {
                for j in 0..grid {
                    let a1 =
                        (i as f64 + 0.5) / grid as f64 + ((j as f64 + 0.5) / grid as f64) * tau;
                    let a2 = target - a1;
                    let cand = vec![a1, a2];
                    if clean(&cand) {
                        seeds.push(cand);
                    }
                }
            }
        }
        3 => {
            for i in 0..grid {
                for j in 0..grid {
                    for u in 0..grid {
                        for v in 0..grid {
                            let a1 = (i as f64 + 0.5) / grid as f64
                                + ((j as f64 + 0.5) / grid as f64) * tau;
                            let a2 = (u as f64 + 0.3) / grid as f64
                                + ((v as f64 + 0.7) / grid as f64) * tau;
                            let a3 = target - a1 - a2;
                            let cand = vec![a1, a2, a3];
                            if clean(&cand) {
                                seeds.push(cand);
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    // Rank by initial residual; keep the most promising starts.
    let mut scored: Vec<(f64, Vec<Complex64>)> = seeds
        .into_iter()
        .map(|zs| {
            let score = recovery_residual(&zs, target, lattice).unwrap_or(f64::INFINITY);
            (score, zs)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    scored.into_iter().take(16).map(|(_, zs)| zs).collect()
}

fn recovery_residual(zs: &[Complex64], target: Complex64, lattice: &LatticeData) -> Result<f64> {
    let n = zs.len();
    let mut zeta = Vec::with_capacity(n);
    for &z in zs {
        zeta.push(lattice.zeta(z)?);
    }
    let mut worst: f64 = 0.0;
    for j in 0..n - 1 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k != j {
                acc += lattice.zeta(zs[j] - zs[k])? + zeta[k] - zeta[j];
            }
        }
        worst = worst.max(acc.norm());
    }
    let sum: Complex64 = zs.iter().sum();
    Ok(worst.max((sum - target).norm()))
}

fn newton_recover(
    seed: &[Complex64],
    target: Complex64,
    lattice: &LatticeData,
) -> Result<Vec<Complex64>> {
    let n = seed.len();
    let mut zs = seed.to_vec();
    let mut residual = f64::INFINITY;
    for _ in 0..RECOVERY_NEWTON_MAX_ITER {
        let mut f = DVector::<Complex64>::zeros(n);
        let mut zeta = Vec::with_capacity(n);
        for &z in &zs {
            zeta.push(lattice.zeta(z)?);
        }
        for j in 0..n - 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                if k != j {
                    acc += lattice.zeta(zs[j] - zs[k])? + zeta[k] - zeta[j];
                }
            }
            f[j] = acc;
        }
        let sum: Complex64 = zs.iter().sum();
        f[n - 1] = sum - target;
        residual = f.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if residual < 1e-12 {
            return Ok(zs);
        }
        let mut jac = DMatrix::<Complex64>::zeros(n, n);
        let partials = lame::residual_partials(&zs, lattice)?;
        for j in 0..n - 1 {
            for k in 0..n {
                jac[(j, k)] = partials[(j, k)];
            }
        }
        for k in 0..n {
            jac[(n - 1, k)] = Complex64::new(1.0, 0.0);
        }
        let delta = jac
            .lu()
            .solve(&f)
            .ok_or_else(|| Error::SingularSystem("recovery Jacobian".into()))?;
        let max_step = delta.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let mut scale = if max_step > 0.25 {
            0.25 / max_step
        } else {
            1.0
        };
        let mut accepted = false;
        for _ in 0..6 {
            let cand: Vec<Complex64> = zs
                .iter()
                .zip(delta.iter())
                .map(|(z, d)| z - scale * d)
                .collect();
            let clean = cand.iter().all(|&z| lattice.pole_distance(z) > 1e-6)
                && cand.iter().enumerate().all(|(i, &z)| {
                    cand.iter()
                        .skip(i + 1)
                        .all(|&w| lattice.pole_distance(z - w) > 1e-6)
                });
            if clean {
                zs = cand;
                accepted = true;
                break;
            }
            scale /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: RECOVERY_NEWTON_MAX_ITER,
        residual,
        last: zs,
    })
}

/// All nontrivial critical points detectable at the given scan
/// resolution: real zeros of Z^(n) over the four triangles of
/// [0,1] x [0,1/2], each recovered to a configuration and emitted as a
/// +-pair. n <= 3.
pub fn find_nontrivial(lattice: &LatticeData, n: usize, grid: usize) -> Result<NontrivialSearch> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if n > 3 {
        return Err(Error::Capability(
            "nontrivial search needs Z^(n); only n <= 3 is available".into(),
        ));
    }
    let mut zeros: Vec<RsZero> = Vec::new();
    for t in Triangle::ALL {
        for z in premodular::find_rs_zeros(lattice, n, t, grid)? {
            if zeros.iter().all(|w| (w.r - z.r).hypot(w.s - z.s) > 1e-7) {
                zeros.push(z);
            }
        }
    }
    let mut pairs = Vec::new();
    let mut unresolved = Vec::new();
    for zero in zeros {
        match recover_from_rs(&zero, lattice, n) {
            Ok(config) => {
                let neg = config.negated(lattice);
                let build = build_record(config, CriticalKind::Nontrivial, lattice, false)
                    .and_then(|plus| {
                        let minus = build_record(neg, CriticalKind::Nontrivial, lattice, false)?;
                        Ok((plus, minus))
                    });
                match build {
                    Ok((plus, minus))
                        if plus.gradient_residual < CRITICAL_RESIDUAL_TOL
                            && minus.gradient_residual < CRITICAL_RESIDUAL_TOL =>
                    {
                        let dup = pairs.iter().any(|p: &NontrivialPair| {
                            p.plus.config.multiset_eq(&plus.config, lattice, 1e-7)
                                || p.minus.config.multiset_eq(&plus.config, lattice, 1e-7)
                        });
                        if !dup {
                            pairs.push(NontrivialPair { plus, minus });
                        }
                    }
                    _ => unresolved.push(zero),
                }
            }
            Err(_) => unresolved.push(zero),
        }
    }
    Ok(NontrivialSearch {
        pairs,
        unresolved,
        grid,
    })
}

/// Transport a critical point by gamma in Gamma_0(2): tau maps to
/// gamma(tau) and each point to z / (c tau + d). The transported record
/// is rebuilt from scratch at the target lattice.
pub fn gamma_transport(
    record: &CriticalPointRecord,
    gamma: Gamma02,
    lattice: &LatticeData,
    lattice_target: &LatticeData,
) -> Result<CriticalPointRecord> {
    let expected = gamma.apply(lattice.tau());
    if (lattice_target.tau() - expected).norm() > 1e-12 * expected.norm().max(1.0) {
        return Err(Error::Domain(format!(
            "target lattice has tau {}, expected gamma(tau) = {expected}",
            lattice_target.tau()
        )));
    }
    let mu = gamma.scale(lattice.tau());
    let zs: Vec<Complex64> = record.config.zs().iter().map(|&z| z / mu).collect();
    let config = Configuration::new(zs, lattice_target)?;
    build_record(config, record.kind, lattice_target, record.multiple_root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lame::solve_yn_from_b;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn n1_trivial_points_are_the_half_periods() {
        let l = LatticeData::new(c(0.0, 1.0)).unwrap();
        let found = find_trivial(&l, 1).unwrap();
        assert!(found.failures.is_empty());
        assert_eq!(found.records.len(), 3);
        for rec in &found.records {
            assert!(rec.gradient_residual < 1e-10);
            assert!(rec.config.is_negation_symmetric(&l, 1e-9));
            assert!(rec.det_numeric.abs() > 1e-6);
        }
    }

    #[test]
    fn n2_rectangular_has_five_trivial_points() {
        let l = LatticeData::new(c(0.0, 2.0)).unwrap();
        let found = find_trivial(&l, 2).unwrap();
        assert!(found.failures.is_empty(), "failures {:?}", found.failures);
        assert_eq!(found.records.len(), 5);
        for rec in &found.records {
            assert!(
                rec.gradient_residual < 1e-9,
                "residual {}",
                rec.gradient_residual
            );
            assert!(rec.config.is_negation_symmetric(&l, 1e-7));
            assert!(!rec.multiple_root);
            // Trivial points sit on roots of the Lame polynomial.
            let lp = lame::lame_poly(rec.b, &l, 2).unwrap();
            assert!(lp.norm() < 1e-6 * l.g2().norm().powf(2.5));
        }
    }

    #[test]
    fn n1_rectangular_has_no_nontrivial_points() {
        let l = LatticeData::new(c(0.0, 2.0)).unwrap();
        let found = find_nontrivial(&l, 1, 80).unwrap();
        assert!(found.pairs.is_empty());
        assert!(found.unresolved.is_empty());
    }

    #[test]
    fn n1_hexagonal_nontrivial_pair() {
        let tau = Complex64::from_polar(1.0, PI / 3.0);
        let l = LatticeData::new(tau).unwrap();
        let found = find_nontrivial(&l, 1, 80).unwrap();
        assert_eq!(found.pairs.len(), 1, "unresolved {:?}", found.unresolved);
        let pair = &found.pairs[0];
        let expect = (1.0 + tau) / 3.0;
        assert!(l.pole_distance(pair.plus.config.zs()[0] - expect) < 1e-8);
        assert!(l.pole_distance(pair.minus.config.zs()[0] + expect) < 1e-8);
        // Closed form against numeric determinant.
        let det_closed = pair.plus.det_closed.unwrap();
        assert!(
            (det_closed - pair.plus.det_numeric).abs() < 1e-8 * det_closed.abs(),
            "closed {det_closed} numeric {}",
            pair.plus.det_numeric
        );
        assert!(pair.plus.c_p.unwrap() > 0.0);
        assert!(!pair.plus.degeneracy.is_degenerate());
        // The pair shares its determinant by evenness of G.
        assert!(
            (pair.plus.det_numeric - pair.minus.det_numeric).abs()
                < 1e-10 * pair.plus.det_numeric.abs()
        );
    }

    #[test]
    fn n1_c_p_equals_wp_prime_norm_squared() {
        let tau = Complex64::from_polar(1.0, PI / 3.0);
        let l = LatticeData::new(tau).unwrap();
        let p = (1.0 + tau) / 3.0;
        let config = Configuration::new(vec![p], &l).unwrap();
        let b = accessory_b(&config, &l).unwrap();
        let point = YnPoint { config, b, tau };
        let derivs = curve_derivatives(&point, &l).unwrap();
        let (_, c_p) = hessian_closed_form(&point, &derivs, &l).unwrap();
        let wp_prime = l.wp_prime(p).unwrap();
        assert!((c_p - wp_prime.norm_sqr()).abs() < 1e-9 * wp_prime.norm_sqr());
    }

    #[test]
    fn degeneracy_verdicts() {
        let mk = |tau_r: Complex64, tau_s: Complex64| CurveDerivatives {
            a_prime: vec![],
            c0: c(0.0, 0.0),
            d0: c(0.0, 0.0),
            r_b: c(0.0, 0.0),
            s_b: c(0.0, 0.0),
            tau_r,
            tau_s,
        };
        // Forced real ratio: degenerate.
        let d = mk(c(1.0, 0.0), c(2.0, 0.0));
        assert!(classify_degeneracy(&d).is_degenerate());
        // tau_r = 0 (infinite ratio): degenerate.
        let d = mk(c(0.0, 0.0), c(1.0, 0.0));
        assert!(classify_degeneracy(&d).is_degenerate());
        // Generic complex ratio: not degenerate.
        let d = mk(c(1.0, 0.0), c(0.0, 1.0));
        assert!(!classify_degeneracy(&d).is_degenerate());
        // Verdict invariant under simultaneous sign flip.
        let d1 = mk(c(1.2, 0.3), c(0.4, 0.9));
        let d2 = mk(-c(1.2, 0.3), -c(0.4, 0.9));
        assert_eq!(
            classify_degeneracy(&d1).margin(),
            classify_degeneracy(&d2).margin()
        );
    }

    #[test]
    fn gamma_transport_identity_and_shift() {
        let tau = Complex64::from_polar(1.0, PI / 3.0);
        let l = LatticeData::new(tau).unwrap();
        let found = find_nontrivial(&l, 1, 80).unwrap();
        let rec = &found.pairs[0].plus;
        // Identity leaves the record unchanged.
        let id = Gamma02::IDENTITY;
        let same = gamma_transport(rec, id, &l, &l).unwrap();
        assert!(same.config.multiset_eq(&rec.config, &l, 1e-10));
        // tau -> tau + 1 transports the critical point.
        let shift = Gamma02::new(1, 1, 0, 1).unwrap();
        let l2 = LatticeData::new(tau + 1.0).unwrap();
        let moved = gamma_transport(rec, shift, &l, &l2).unwrap();
        assert!(moved.gradient_residual < 1e-9);
        assert_eq!(
            moved.degeneracy.is_degenerate(),
            rec.degeneracy.is_degenerate()
        );
    }

    #[test]
    fn jacobian_forms_agree_n1() {
        let l = LatticeData::new(c(0.0, 1.0)).unwrap();
        let b = 2.0 * l.branch_values()[0];
        let pair = solve_yn_from_b(b, &l, 1, None).unwrap();
        let d = curve_derivatives(&pair.plus, &l).unwrap();
        assert!(jacobian_phi(&d, &l).is_ok());
    }
}
