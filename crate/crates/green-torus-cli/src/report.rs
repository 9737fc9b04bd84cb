//! Machine-readable views of critical-point records. Floats are emitted
//! with 17 significant digits so round-trips are lossless.

use green_torus::crit::{CriticalKind, CriticalPointRecord, DegeneracyVerdict, NontrivialSearch};
use green_torus::LatticeData;
use num_complex::Complex64;
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", fmt_f64(z.re), fmt_f64(z.im))
    } else {
        format!("{}-{}i", fmt_f64(z.re), fmt_f64(-z.im))
    }
}

#[derive(Serialize)]
pub struct PointDto {
    pub re: f64,
    pub im: f64,
    pub r: f64,
    pub s: f64,
}

#[derive(Serialize)]
pub struct RsDto {
    pub r_re: f64,
    pub r_im: f64,
    pub s_re: f64,
    pub s_im: f64,
    pub is_real: bool,
    pub representative_box: Option<String>,
}

#[derive(Serialize)]
pub struct RecordDto {
    pub kind: String,
    pub points: Vec<PointDto>,
    pub b_re: f64,
    pub b_im: f64,
    pub rs: Option<RsDto>,
    pub det_numeric: f64,
    pub det_closed: Option<f64>,
    pub c_p: Option<f64>,
    pub tau_ratio_re: Option<f64>,
    pub tau_ratio_im: Option<f64>,
    pub degeneracy: String,
    pub degeneracy_margin: f64,
    pub gradient_residual: f64,
    pub multiple_root: bool,
}

impl RecordDto {
    pub fn from_record(rec: &CriticalPointRecord) -> Self {
        RecordDto {
            kind: match rec.kind {
                CriticalKind::Trivial => "trivial".into(),
                CriticalKind::Nontrivial => "nontrivial".into(),
            },
            points: rec
                .config
                .points()
                .iter()
                .map(|p| PointDto {
                    re: p.z.re,
                    im: p.z.im,
                    r: p.r,
                    s: p.s,
                })
                .collect(),
            b_re: rec.b.re,
            b_im: rec.b.im,
            rs: rec.rs.as_ref().map(|m| RsDto {
                r_re: m.r.re,
                r_im: m.r.im,
                s_re: m.s.re,
                s_im: m.s.im,
                is_real: m.is_real,
                representative_box: m.representative_box.map(|t| format!("{t:?}")),
            }),
            det_numeric: rec.det_numeric,
            det_closed: rec.det_closed,
            c_p: rec.c_p,
            tau_ratio_re: rec.tau_ratio.map(|t| t.re),
            tau_ratio_im: rec.tau_ratio.map(|t| t.im),
            degeneracy: match rec.degeneracy {
                DegeneracyVerdict::NonDegenerate { .. } => "non-degenerate".into(),
                DegeneracyVerdict::NearDegenerate { .. } => "near-degenerate".into(),
                DegeneracyVerdict::Degenerate { .. } => "degenerate".into(),
            },
            degeneracy_margin: rec.degeneracy.margin(),
            gradient_residual: rec.gradient_residual,
            multiple_root: rec.multiple_root,
        }
    }
}

#[derive(Serialize)]
pub struct CriticalReportDto {
    pub schema_version: String,
    pub tool_version: String,
    pub tau_re: f64,
    pub tau_im: f64,
    pub n: usize,
    pub rs_grid: usize,
    pub trivial: Vec<RecordDto>,
    pub nontrivial: Vec<RecordDto>,
    pub unresolved_zeros: Vec<(f64, f64)>,
    pub failures: Vec<String>,
    pub complete: bool,
}

pub fn critical_report(
    lattice: &LatticeData,
    n: usize,
    grid: usize,
    trivial: &green_torus::crit::TrivialSearch,
    nontrivial: &NontrivialSearch,
) -> CriticalReportDto {
    let mut nontrivial_records = Vec::new();
    for pair in &nontrivial.pairs {
        nontrivial_records.push(RecordDto::from_record(&pair.plus));
        nontrivial_records.push(RecordDto::from_record(&pair.minus));
    }
    let complete = trivial.failures.is_empty() && nontrivial.unresolved.is_empty();
    CriticalReportDto {
        schema_version: SCHEMA_VERSION.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        tau_re: lattice.tau().re,
        tau_im: lattice.tau().im,
        n,
        rs_grid: grid,
        trivial: trivial.records.iter().map(RecordDto::from_record).collect(),
        nontrivial: nontrivial_records,
        unresolved_zeros: nontrivial.unresolved.iter().map(|z| (z.r, z.s)).collect(),
        failures: trivial.failures.clone(),
        complete,
    }
}

/// Flat CSV rendering: one row per record.
pub fn csv_summary(report: &CriticalReportDto) -> String {
    let mut out = String::from(
        "kind,b_re,b_im,r,s,det_numeric,det_closed,c_p,degeneracy,degeneracy_margin,gradient_residual,multiple_root\n",
    );
    for rec in report.trivial.iter().chain(report.nontrivial.iter()) {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            rec.kind,
            fmt_f64(rec.b_re),
            fmt_f64(rec.b_im),
            rec.rs.as_ref().map(|m| fmt_f64(m.r_re)).unwrap_or_default(),
            rec.rs.as_ref().map(|m| fmt_f64(m.s_re)).unwrap_or_default(),
            fmt_f64(rec.det_numeric),
            opt(rec.det_closed),
            opt(rec.c_p),
            rec.degeneracy,
            fmt_f64(rec.degeneracy_margin),
            fmt_f64(rec.gradient_residual),
            rec.multiple_root,
        ));
    }
    out
}

pub fn text_summary(report: &CriticalReportDto) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "tau = {} + {}i, n = {} (rs-grid {})\n",
        fmt_f64(report.tau_re),
        fmt_f64(report.tau_im),
        report.n,
        report.rs_grid
    ));
    out.push_str(&format!(
        "trivial: {}   nontrivial: {}   unresolved zeros: {}\n",
        report.trivial.len(),
        report.nontrivial.len(),
        report.unresolved_zeros.len()
    ));
    for (label, recs) in [
        ("trivial", &report.trivial),
        ("nontrivial", &report.nontrivial),
    ] {
        for rec in recs.iter() {
            out.push_str(&format!(
                "  [{label}] B = {} + {}i  det_num = {}  ",
                fmt_f64(rec.b_re),
                fmt_f64(rec.b_im),
                fmt_f64(rec.det_numeric)
            ));
            if let Some(dc) = rec.det_closed {
                out.push_str(&format!("det_closed = {}  ", fmt_f64(dc)));
            }
            if let Some(cp) = rec.c_p {
                out.push_str(&format!("c_p = {}  ", fmt_f64(cp)));
            }
            if let Some(rs) = &rec.rs {
                out.push_str(&format!(
                    "(r,s) = ({}, {})  ",
                    fmt_f64(rs.r_re),
                    fmt_f64(rs.s_re)
                ));
            }
            out.push_str(&format!(
                "{} (margin {})  grad_res = {}\n",
                rec.degeneracy,
                fmt_f64(rec.degeneracy_margin),
                fmt_f64(rec.gradient_residual)
            ));
        }
    }
    for (r, s) in &report.unresolved_zeros {
        out.push_str(&format!(
            "  [unresolved] (r,s) = ({}, {})\n",
            fmt_f64(*r),
            fmt_f64(*s)
        ));
    }
    for f in &report.failures {
        out.push_str(&format!("  [failure] {f}\n"));
    }
    out
}
