//! Deterministic tau-plane scans with CSV output and a JSON sidecar.

use anyhow::{Context, Result};
use green_torus::crit::{find_nontrivial, find_trivial};
use green_torus::lame::{solve_yn_from_b, wedge_check};
use green_torus::modular::f0_contains;
use green_torus::LatticeData;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    CriticalPoints,
    EnMembership,
    DegeneracyMargin,
    WedgeResidual,
}

impl Task {
    pub fn parse_list(s: &str) -> Result<Vec<Task>, String> {
        s.split(',')
            .map(|t| match t.trim() {
                "critical-points" => Ok(Task::CriticalPoints),
                "en-membership" => Ok(Task::EnMembership),
                "degeneracy-margin" => Ok(Task::DegeneracyMargin),
                "wedge-residual" => Ok(Task::WedgeResidual),
                other => Err(format!("unknown task '{other}'")),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanJob {
    pub n: usize,
    /// Restrict rows to the basic fundamental domain F_0.
    pub f0_only: bool,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub res_re: usize,
    pub res_im: usize,
    pub tasks: Vec<Task>,
    pub rs_grid: usize,
    pub threads: usize,
}

impl ScanJob {
    pub fn validate(&self) -> Result<(), String> {
        if self.im_min <= 0.0 {
            return Err("scan region must satisfy Im tau > 0".into());
        }
        if self.res_re < 2 || self.res_im < 2 {
            return Err("resolution must be at least 2 per axis".into());
        }
        if self.re_max < self.re_min || self.im_max < self.im_min {
            return Err("empty scan region".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Row {
    re: f64,
    im: f64,
    n_trivial: Option<usize>,
    n_nontrivial: Option<usize>,
    min_abs_det: Option<f64>,
    min_margin: Option<f64>,
    wedge_residual: Option<f64>,
    failed: bool,
}

fn scan_cell(tau: Complex64, job: &ScanJob) -> Row {
    let mut row = Row {
        re: tau.re,
        im: tau.im,
        n_trivial: None,
        n_nontrivial: None,
        min_abs_det: None,
        min_margin: None,
        wedge_residual: None,
        failed: false,
    };
    let lattice = match LatticeData::new(tau) {
        Ok(l) => l,
        Err(_) => {
            row.failed = true;
            return row;
        }
    };
    let wants = |t: Task| job.tasks.contains(&t);
    let need_records = wants(Task::CriticalPoints) || wants(Task::DegeneracyMargin);
    let need_nontrivial = need_records || wants(Task::EnMembership);
    if need_nontrivial {
        let trivial = if need_records {
            Some(find_trivial(&lattice, job.n))
        } else {
            None
        };
        let nontrivial = find_nontrivial(&lattice, job.n, job.rs_grid);
        match (trivial, nontrivial) {
            (Some(Ok(t)), Ok(nt)) => {
                row.failed |= !t.failures.is_empty() || !nt.unresolved.is_empty();
                row.n_trivial = Some(t.records.len());
                row.n_nontrivial = Some(2 * nt.pairs.len());
                let mut min_det = f64::INFINITY;
                let mut min_margin = f64::INFINITY;
                for rec in t
                    .records
                    .iter()
                    .chain(nt.pairs.iter().flat_map(|p| [&p.plus, &p.minus]))
                {
                    min_det = min_det.min(rec.det_numeric.abs());
                    min_margin = min_margin.min(rec.degeneracy.margin());
                }
                if min_det.is_finite() {
                    row.min_abs_det = Some(min_det);
                    row.min_margin = Some(min_margin);
                }
            }
            (None, Ok(nt)) => {
                row.failed |= !nt.unresolved.is_empty();
                row.n_nontrivial = Some(2 * nt.pairs.len());
            }
            _ => row.failed = true,
        }
    }
    if wants(Task::WedgeResidual) {
        // A deterministic off-branch accessory parameter per cell.
        let e1 = lattice.branch_values()[0];
        let b = 2.0 * e1 + Complex64::new(0.31, 0.47) * (1.0 + e1.norm());
        match solve_yn_from_b(b, &lattice, job.n.min(2), None)
            .and_then(|p| wedge_check(&p.plus, &lattice, 1e-5))
        {
            Ok(res) => row.wedge_residual = Some(res),
            Err(_) => row.failed = true,
        }
    }
    row
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: &'a str,
    tool_version: &'a str,
    job: &'a ScanJob,
    tolerances: serde_json::Value,
}

/// Run the scan and write CSV plus JSON sidecar. Returns the number of
/// failed cells.
pub fn run(job: &ScanJob, out: &PathBuf) -> Result<usize> {
    let mut cells: Vec<Complex64> = Vec::new();
    for j in 0..job.res_im {
        for i in 0..job.res_re {
            // Row-major order, low Im first, deterministic.
            let re = job.re_min + (i as f64 + 0.5) * (job.re_max - job.re_min) / job.res_re as f64;
            let im = job.im_min + (j as f64 + 0.5) * (job.im_max - job.im_min) / job.res_im as f64;
            let tau = Complex64::new(re, im);
            if job.f0_only && !f0_contains(tau) {
                continue;
            }
            cells.push(tau);
        }
    }
    let rows: Vec<Row> = cells.par_iter().map(|&tau| scan_cell(tau, job)).collect();

    let file =
        std::fs::File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(
        w,
        "re_tau,im_tau,n_trivial,n_nontrivial,min_abs_det,min_degeneracy_margin,wedge_residual"
    )?;
    let mut failures = 0usize;
    for row in &rows {
        if row.failed {
            failures += 1;
        }
        writeln!(
            w,
            "{:.16e},{:.16e},{},{},{},{},{}",
            row.re,
            row.im,
            fmt_opt_usize(row.n_trivial),
            fmt_opt_usize(row.n_nontrivial),
            fmt_opt_f64(row.min_abs_det),
            fmt_opt_f64(row.min_margin),
            fmt_opt_f64(row.wedge_residual),
        )?;
    }
    w.flush()?;

    let sidecar = Sidecar {
        schema_version: crate::report::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        job,
        tolerances: serde_json::json!({
            "rs_zero": green_torus::premodular::ZERO_TOL,
            "critical_residual": green_torus::crit::CRITICAL_RESIDUAL_TOL,
            "degeneracy_margin": green_torus::crit::DEGENERACY_MARGIN_TOL,
        }),
    };
    let sidecar_path = out.with_extension("json");
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)
        .with_context(|| format!("cannot write {}", sidecar_path.display()))?;
    Ok(failures)
}
