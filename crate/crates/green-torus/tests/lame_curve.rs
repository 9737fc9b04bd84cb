//! Curve-level identities: the wedge identity at sampled points, local
//! injectivity of the monodromy map, and analytic r_B, s_B against
//! re-solving finite differences.

use green_torus::lame::{
    curve_derivatives, monodromy_rs, solve_yn_from_b, wedge_check, yn_point_residual,
    CURVE_RESIDUAL_TOL,
};
use green_torus::LatticeData;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sample_points() -> Vec<(Complex64, usize, Complex64)> {
    // (tau, n, B) off the branch locus.
    vec![
        (c(0.0, 1.0), 1, c(13.75, 0.0)),
        (c(0.0, 1.0), 1, c(3.0, 4.0)),
        (c(0.3, 1.2), 1, c(-2.0, 1.5)),
        (c(0.5, 0.9), 1, c(7.0, -3.0)),
        (c(0.0, 1.4), 1, c(0.5, 2.5)),
        (c(0.0, 2.0), 2, c(3.0, 1.0)),
        (c(0.0, 2.0), 2, c(-11.0, 5.0)),
        (c(0.25, 1.1), 2, c(9.0, 2.0)),
        (c(0.5, 1.3), 2, c(-4.0, -6.0)),
        (c(0.1, 0.85), 2, c(16.0, 3.0)),
    ]
}

#[test]
fn wedge_identity_at_sampled_points() {
    for (tau, n, b) in sample_points() {
        let l = LatticeData::new(tau).unwrap();
        let pair = solve_yn_from_b(b, &l, n, None).unwrap();
        assert!(yn_point_residual(&pair.plus, &l).unwrap() < CURVE_RESIDUAL_TOL);
        let res = wedge_check(&pair.plus, &l, 1e-5).unwrap();
        assert!(
            res < 1e-5,
            "wedge residual {res:.3e} at tau {tau}, n {n}, B {b}"
        );
    }
}

#[test]
fn wedge_residual_scales_quadratically() {
    let l = LatticeData::new(c(0.0, 1.0)).unwrap();
    let b = c(3.0, 4.0);
    let pair = solve_yn_from_b(b, &l, 1, None).unwrap();
    // At moderate h truncation dominates; doubling h should multiply the
    // residual by about four.
    let r1 = wedge_check(&pair.plus, &l, 2e-3).unwrap();
    let r2 = wedge_check(&pair.plus, &l, 4e-3).unwrap();
    let r4 = wedge_check(&pair.plus, &l, 8e-3).unwrap();
    let ratio21 = r2 / r1;
    let ratio42 = r4 / r2;
    assert!(
        (2.0..8.5).contains(&ratio21) && (2.0..8.5).contains(&ratio42),
        "ratios {ratio21:.2} {ratio42:.2} (r1 {r1:.3e} r2 {r2:.3e} r4 {r4:.3e})"
    );
}

#[test]
fn monodromy_locally_injective_in_b() {
    let l = LatticeData::new(c(0.0, 2.0)).unwrap();
    let base = c(3.0, 1.0);
    let offsets = [c(0.0, 0.0), c(1e-3, 0.0), c(0.0, 1e-3), c(-1e-3, 1e-3)];
    let mut seen: Vec<(Complex64, Complex64)> = Vec::new();
    let seed = solve_yn_from_b(base, &l, 2, None).unwrap();
    for off in offsets {
        let pair = solve_yn_from_b(base + off, &l, 2, Some(&seed.plus.config)).unwrap();
        let m = monodromy_rs(&pair.plus, &l).unwrap();
        for (r, s) in &seen {
            let d = (m.raw_r - r).norm() + (m.raw_s - s).norm();
            assert!(d > 1e-9, "monodromy collision at offset {off}");
        }
        seen.push((m.raw_r, m.raw_s));
    }
}

#[test]
fn analytic_rb_sb_match_finite_differences() {
    for (tau, n, b) in sample_points().into_iter().step_by(2) {
        let l = LatticeData::new(tau).unwrap();
        let pair = solve_yn_from_b(b, &l, n, None).unwrap();
        let d = curve_derivatives(&pair.plus, &l).unwrap();
        assert!(d.tau_r.norm() + d.tau_s.norm() > 0.0);
        let h = 1e-6;
        let rs = |bb: Complex64| {
            let p = solve_yn_from_b(bb, &l, n, Some(&pair.plus.config)).unwrap();
            let m = monodromy_rs(&p.plus, &l).unwrap();
            (m.raw_r, m.raw_s)
        };
        let (rp, sp) = rs(b + h);
        let (rm, sm) = rs(b - h);
        let r_b_fd = (rp - rm) / (2.0 * h);
        let s_b_fd = (sp - sm) / (2.0 * h);
        assert!(
            (r_b_fd - d.r_b).norm() < 1e-5 * d.r_b.norm().max(1e-3),
            "r_B fd {r_b_fd} analytic {} at tau {tau} n {n}",
            d.r_b
        );
        assert!(
            (s_b_fd - d.s_b).norm() < 1e-5 * d.s_b.norm().max(1e-3),
            "s_B fd {s_b_fd} analytic {} at tau {tau} n {n}",
            d.s_b
        );
    }
}
