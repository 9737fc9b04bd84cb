//! The identity-verification suite behind `green-torus verify`.

use green_torus::crit::{find_nontrivial, find_trivial, hessian_n2_example_form};
use green_torus::green::{gn_hessian, gn_hessian_fd, Configuration, FD_HESSIAN_STEP};
use green_torus::lame::{monodromy_rs, solve_yn_from_b, wedge_check};
use green_torus::premodular::{hecke_z, z_n_complex};
use green_torus::LatticeData;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub target: f64,
    pub measured: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Tolerances {
    pub legendre: Option<f64>,
    pub cubic: Option<f64>,
    pub sigma: Option<f64>,
    pub special: Option<f64>,
    pub wedge: Option<f64>,
    pub hessian_fd: Option<f64>,
    pub det_match: Option<f64>,
    pub z2_curve: Option<f64>,
}

fn sample_f0(rng: &mut ChaCha8Rng, im_max: f64) -> Complex64 {
    loop {
        let re: f64 = rng.gen_range(0.0..1.0);
        let im: f64 = rng.gen_range(0.05..im_max);
        let tau = Complex64::new(re, im);
        if (tau - Complex64::new(0.5, 0.0)).norm() >= 0.5 {
            return tau;
        }
    }
}

fn check(name: &'static str, measured: f64, target: f64) -> Check {
    Check {
        name,
        target,
        measured,
        passed: measured < target,
    }
}

pub fn run(level: Level, tol: &Tolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);

    // Legendre relation over F_0.
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let tau = sample_f0(&mut rng, 4.0);
        if let Ok(l) = LatticeData::new(tau) {
            worst = worst.max(l.legendre_residual());
        }
    }
    checks.push(check(
        "legendre-relation",
        worst,
        tol.legendre.unwrap_or(1e-10),
    ));

    // Cubic differential equation and sigma transformation law.
    let mut worst_cubic = 0.0f64;
    let mut worst_sigma = 0.0f64;
    for _ in 0..100 {
        let tau = sample_f0(&mut rng, 4.0);
        let l = match LatticeData::new(tau) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let r: f64 = rng.gen_range(0.1..0.9);
        let s: f64 = rng.gen_range(0.1..0.9);
        let z = r + s * tau;
        if l.pole_distance(z) < 0.05 {
            continue;
        }
        if let Ok(res) = l.cubic_residual(z) {
            worst_cubic = worst_cubic.max(res);
        }
        for (omega, eta) in [(l.omega()[0], l.eta1()), (l.omega()[1], l.eta2())] {
            let lhs = l.sigma(z + omega);
            let rhs = -(eta * (z + omega / 2.0)).exp() * l.sigma(z);
            worst_sigma = worst_sigma.max((lhs - rhs).norm() / rhs.norm().max(1e-12));
        }
    }
    checks.push(check(
        "cubic-ode-residual",
        worst_cubic,
        tol.cubic.unwrap_or(1e-8),
    ));
    checks.push(check(
        "sigma-transformation-law",
        worst_sigma,
        tol.sigma.unwrap_or(1e-8),
    ));

    // Symmetry-forced special values.
    let special_tol = tol.special.unwrap_or(1e-10);
    let li = LatticeData::new(Complex64::new(0.0, 1.0)).expect("square lattice");
    let lhex = LatticeData::new(Complex64::from_polar(1.0, PI / 3.0)).expect("hexagonal lattice");
    let special = (li.eta1() - PI)
        .norm()
        .max(li.g3().norm())
        .max(lhex.g2().norm());
    checks.push(check(
        "special-values-square-hexagonal",
        special,
        special_tol,
    ));

    // Wedge identity at sample points of Y_1 and Y_2.
    let mut worst_wedge = 0.0f64;
    let wedge_samples = [
        (Complex64::new(0.0, 1.0), 1usize, Complex64::new(3.0, 4.0)),
        (Complex64::new(0.3, 1.2), 1, Complex64::new(-2.0, 1.5)),
        (Complex64::new(0.0, 2.0), 2, Complex64::new(3.0, 1.0)),
        (Complex64::new(0.25, 1.1), 2, Complex64::new(9.0, 2.0)),
    ];
    for (tau, n, b) in wedge_samples {
        let l = LatticeData::new(tau).expect("sample lattice");
        match solve_yn_from_b(b, &l, n, None).and_then(|p| wedge_check(&p.plus, &l, 1e-5)) {
            Ok(res) => worst_wedge = worst_wedge.max(res),
            Err(_) => worst_wedge = f64::INFINITY,
        }
    }
    checks.push(check(
        "wedge-identity",
        worst_wedge,
        tol.wedge.unwrap_or(1e-5),
    ));

    // Analytic Hessian assembly against finite differences.
    let mut worst_h = 0.0f64;
    for (n, tau) in [
        (1usize, Complex64::new(0.0, 2.0)),
        (2, Complex64::new(0.3, 1.2)),
    ] {
        let l = LatticeData::new(tau).expect("sample lattice");
        let zs: Vec<Complex64> = (0..n)
            .map(|k| 0.23 + 0.11 * k as f64 + (0.31 + 0.17 * k as f64) * tau)
            .collect();
        let cfg = Configuration::new(zs, &l).expect("sample configuration");
        let ana = gn_hessian(&cfg, &l).expect("hessian");
        let fd = gn_hessian_fd(&cfg, &l, FD_HESSIAN_STEP).expect("fd hessian");
        let scale = ana.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
        let err = (&ana - &fd).iter().fold(0.0f64, |m, &x| m.max(x.abs())) / scale;
        worst_h = worst_h.max(err);
    }
    checks.push(check(
        "hessian-vs-finite-differences",
        worst_h,
        tol.hessian_fd.unwrap_or(1e-6),
    ));

    // Rectangular count: exactly five trivial, all non-degenerate.
    let l2i = LatticeData::new(Complex64::new(0.0, 2.0)).expect("rectangular lattice");
    let trivial = find_trivial(&l2i, 2);
    let min_trivial_det = match &trivial {
        Ok(t) if t.records.len() == 5 && t.failures.is_empty() => t
            .records
            .iter()
            .map(|r| r.det_numeric.abs())
            .fold(f64::INFINITY, f64::min),
        _ => 0.0,
    };
    checks.push(Check {
        name: "rectangular-trivial-count-and-dets",
        target: 1e-6,
        measured: min_trivial_det,
        passed: min_trivial_det > 1e-6,
    });

    if level == Level::Full {
        // Hexagonal nontrivial pipeline with the closed-form determinant.
        let hex_res = (|| -> Option<f64> {
            let z = hecke_z(1.0 / 3.0, 1.0 / 3.0, &lhex).ok()?.norm();
            if z > 1e-10 {
                return Some(f64::INFINITY);
            }
            let found = find_nontrivial(&lhex, 1, 120).ok()?;
            let pair = found.pairs.first()?;
            let closed = pair.plus.det_closed?;
            Some((closed - pair.plus.det_numeric).abs() / closed.abs())
        })()
        .unwrap_or(f64::INFINITY);
        checks.push(check(
            "hexagonal-nontrivial-det-match",
            hex_res,
            tol.det_match.unwrap_or(1e-5),
        ));

        // n = 2 closed form at a discovered nontrivial point, plus the
        // explicit example expression against the general formula.
        let n2_res = (|| -> Option<(f64, f64)> {
            let tau = Complex64::new(0.63, 0.75);
            let l = LatticeData::new(tau).ok()?;
            let found = find_nontrivial(&l, 2, 150).ok()?;
            let pair = found.pairs.first()?;
            let rec = &pair.plus;
            let closed = rec.det_closed?;
            let det_rel = (closed - rec.det_numeric).abs() / closed.abs();
            let example = hessian_n2_example_form(rec.b, rec.c_p?, &l).ok()?;
            let example_rel = (example - closed).abs() / closed.abs();
            Some((det_rel, example_rel))
        })()
        .unwrap_or((f64::INFINITY, f64::INFINITY));
        checks.push(check(
            "n2-nontrivial-det-match",
            n2_res.0,
            tol.det_match.unwrap_or(1e-5),
        ));
        checks.push(check("n2-example-vs-general-form", n2_res.1, 1e-10));

        // Z^(2) vanishes at the monodromy data along Y_2.
        let mut worst_z2 = 0.0f64;
        let mut used = 0;
        let lq = LatticeData::new(Complex64::new(0.0, 2.0)).expect("rectangular lattice");
        for k in 0..30 {
            if used >= 20 {
                break;
            }
            let b =
                Complex64::from_polar(9.0, 2.0 * PI * k as f64 / 30.0) + Complex64::new(1.0, 0.5);
            let Ok(y2_pair) = solve_yn_from_b(b, &lq, 2, None) else {
                continue;
            };
            let Ok(m) = monodromy_rs(&y2_pair.plus, &lq) else {
                continue;
            };
            if lq.pole_distance(m.raw_r + m.raw_s * lq.tau()) < 0.02 {
                continue;
            }
            if let Ok(z2) = z_n_complex(m.raw_r, m.raw_s, &lq, 2) {
                worst_z2 = worst_z2.max(z2.norm());
                used += 1;
            }
        }
        if used < 20 {
            worst_z2 = f64::INFINITY;
        }
        checks.push(check(
            "z2-vanishes-along-y2",
            worst_z2,
            tol.z2_curve.unwrap_or(1e-8),
        ));
    }

    checks
}
