//! Command-line front end for the torus Green-function toolkit.
//!
//! Exit codes: 0 success/complete, 2 partial results, 3 verification
//! failure, 64 usage error.

mod parse;
mod report;
mod scan;
mod verify;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use green_torus::crit::{find_nontrivial, find_trivial};
use green_torus::green::{gn_hessian_fd, FD_HESSIAN_STEP};
use green_torus::lame::{lame_poly, lame_roots};
use green_torus::premodular::{find_rs_zeros, Triangle, DEFAULT_SCAN_GRID};
use green_torus::LatticeData;
use parse::ComplexArg;
use report::{fmt_complex, fmt_f64};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_PARTIAL: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "green-torus",
    version,
    about = "Critical points of multiple Green functions on flat tori"
)]
struct Cli {
    /// Worker threads for scans (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity-verification suite.
    Verify {
        #[arg(long, default_value = "quick", value_parser = ["quick", "full"])]
        level: String,
        /// Per-check tolerance overrides.
        #[arg(long)]
        tol_legendre: Option<f64>,
        #[arg(long)]
        tol_cubic: Option<f64>,
        #[arg(long)]
        tol_sigma: Option<f64>,
        #[arg(long)]
        tol_special: Option<f64>,
        #[arg(long)]
        tol_wedge: Option<f64>,
        #[arg(long)]
        tol_hessian_fd: Option<f64>,
        #[arg(long)]
        tol_det_match: Option<f64>,
        #[arg(long)]
        tol_z2: Option<f64>,
    },
    /// Report all critical points of G_n at one tau.
    Critical {
        #[arg(long)]
        tau: ComplexArg,
        #[arg(long)]
        n: usize,
        /// Per-triangle scan resolution for the nontrivial search.
        #[arg(long, default_value_t = DEFAULT_SCAN_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "text", value_parser = ["text", "json", "csv"])]
        format: String,
    },
    /// Scan a tau region and write per-cell CSV.
    Scan {
        #[arg(long)]
        n: usize,
        /// Restrict to the basic fundamental domain F_0.
        #[arg(long, default_value_t = false)]
        f0_only: bool,
        #[arg(long, default_value_t = 0.0)]
        re_min: f64,
        #[arg(long, default_value_t = 1.0)]
        re_max: f64,
        #[arg(long, default_value_t = 0.6)]
        im_min: f64,
        #[arg(long, default_value_t = 2.0)]
        im_max: f64,
        #[arg(long, default_value_t = 10)]
        res_re: usize,
        #[arg(long, default_value_t = 10)]
        res_im: usize,
        /// Comma-separated: critical-points,en-membership,degeneracy-margin,wedge-residual
        #[arg(long, default_value = "critical-points,degeneracy-margin")]
        tasks: String,
        /// Per-triangle (r, s) scan resolution within each cell.
        #[arg(long, default_value_t = 100)]
        rs_grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Real zeros of the pre-modular form Z^(n) over the scan triangles.
    PremodularZeros {
        #[arg(long)]
        tau: ComplexArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SCAN_GRID)]
        grid: usize,
        /// Triangle index 0..3, or "all".
        #[arg(long, default_value = "all")]
        r#box: String,
        #[arg(long, default_value = "text", value_parser = ["text", "json"])]
        format: String,
    },
    /// Roots of the Lame polynomial (n <= 2) with separation check.
    LameRoots {
        #[arg(long)]
        tau: ComplexArg,
        #[arg(long)]
        n: usize,
    },
    /// Hessian determinants (closed form, analytic assembly, finite
    /// differences) at every critical point found at tau.
    Hessian {
        #[arg(long)]
        tau: ComplexArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SCAN_GRID)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::from(EXIT_OK);
                }
                _ => EXIT_USAGE,
            };
            eprintln!("{e}");
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn make_lattice(tau: ComplexArg) -> anyhow::Result<LatticeData> {
    LatticeData::new(tau.0).map_err(|e| anyhow::anyhow!("invalid tau: {e}"))
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Verify {
            level,
            tol_legendre,
            tol_cubic,
            tol_sigma,
            tol_special,
            tol_wedge,
            tol_hessian_fd,
            tol_det_match,
            tol_z2,
        } => {
            let level = if level == "full" {
                verify::Level::Full
            } else {
                verify::Level::Quick
            };
            let tol = verify::Tolerances {
                legendre: tol_legendre,
                cubic: tol_cubic,
                sigma: tol_sigma,
                special: tol_special,
                wedge: tol_wedge,
                hessian_fd: tol_hessian_fd,
                det_match: tol_det_match,
                z2_curve: tol_z2,
            };
            let checks = verify::run(level, &tol);
            let mut failed = false;
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} {:40} measured {:>12.3e}  target {:>9.1e}",
                    c.name, c.measured, c.target
                );
                failed |= !c.passed;
            }
            Ok(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }

        Command::Critical {
            tau,
            n,
            grid,
            out,
            format,
        } => {
            let lattice = make_lattice(tau)?;
            let trivial = find_trivial(&lattice, n)?;
            let nontrivial = find_nontrivial(&lattice, n, grid)?;
            let dto = report::critical_report(&lattice, n, grid, &trivial, &nontrivial);
            let rendered = match format.as_str() {
                "json" => serde_json::to_string_pretty(&dto)?,
                "csv" => report::csv_summary(&dto),
                _ => report::text_summary(&dto),
            };
            match out {
                Some(path) => std::fs::write(path, rendered)?,
                None => println!("{rendered}"),
            }
            Ok(if dto.complete { EXIT_OK } else { EXIT_PARTIAL })
        }

        Command::Scan {
            n,
            f0_only,
            re_min,
            re_max,
            im_min,
            im_max,
            res_re,
            res_im,
            tasks,
            rs_grid,
            out,
        } => {
            let tasks = scan::Task::parse_list(&tasks).map_err(|e| anyhow::anyhow!(e))?;
            let job = scan::ScanJob {
                n,
                f0_only,
                re_min,
                re_max,
                im_min,
                im_max,
                res_re,
                res_im,
                tasks,
                rs_grid,
                threads: rayon::current_num_threads(),
            };
            job.validate().map_err(|e| anyhow::anyhow!(e))?;
            let failures = scan::run(&job, &out)?;
            if failures > 0 {
                eprintln!("{failures} cells reported failures (sentinel rows)");
                Ok(EXIT_PARTIAL)
            } else {
                Ok(EXIT_OK)
            }
        }

        Command::PremodularZeros {
            tau,
            n,
            grid,
            r#box,
            format,
        } => {
            let lattice = make_lattice(tau)?;
            let triangles: Vec<Triangle> = match r#box.as_str() {
                "all" => Triangle::ALL.to_vec(),
                "0" => vec![Triangle::T0],
                "1" => vec![Triangle::T1],
                "2" => vec![Triangle::T2],
                "3" => vec![Triangle::T3],
                other => anyhow::bail!("unknown box '{other}' (expected 0..3 or all)"),
            };
            let mut all = Vec::new();
            for t in triangles {
                all.extend(find_rs_zeros(&lattice, n, t, grid)?);
            }
            if format == "json" {
                let items: Vec<serde_json::Value> = all
                    .iter()
                    .map(|z| {
                        serde_json::json!({
                            "r": z.r, "s": z.s,
                            "residual": z.residual,
                            "triangle": format!("{:?}", z.triangle),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&items)?);
            } else {
                println!(
                    "{} zero(s) of Z^({n}) at tau = {}",
                    all.len(),
                    fmt_complex(tau.0)
                );
                for z in &all {
                    println!(
                        "  (r, s) = ({}, {})  residual {:.3e}  {:?}",
                        fmt_f64(z.r),
                        fmt_f64(z.s),
                        z.residual,
                        z.triangle
                    );
                }
            }
            Ok(EXIT_OK)
        }

        Command::LameRoots { tau, n } => {
            let lattice = make_lattice(tau)?;
            let roots = lame_roots(&lattice, n)?;
            let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.norm()));
            println!("l_{n} roots at tau = {}:", fmt_complex(tau.0));
            let mut min_sep = f64::INFINITY;
            for (i, r) in roots.iter().enumerate() {
                let residual = lame_poly(*r, &lattice, n)?.norm();
                println!("  B = {}   |l_{n}(B)| = {residual:.3e}", fmt_complex(*r));
                for other in roots.iter().skip(i + 1) {
                    min_sep = min_sep.min((r - other).norm());
                }
            }
            println!("minimum root separation: {:.6e}", min_sep);
            if min_sep < 1e-8 * scale {
                println!("warning: multiple roots detected (discriminant-zero modulus)");
            }
            Ok(EXIT_OK)
        }

        Command::Hessian { tau, n, grid } => {
            let lattice = make_lattice(tau)?;
            let trivial = find_trivial(&lattice, n)?;
            let nontrivial = find_nontrivial(&lattice, n, grid)?;
            let mut partial = !trivial.failures.is_empty() || !nontrivial.unresolved.is_empty();
            println!(
                "Hessian determinants at tau = {}, n = {n} ({} trivial, {} nontrivial)",
                fmt_complex(tau.0),
                trivial.records.len(),
                2 * nontrivial.pairs.len()
            );
            let all: Vec<_> = trivial
                .records
                .iter()
                .chain(nontrivial.pairs.iter().flat_map(|p| [&p.plus, &p.minus]))
                .collect();
            for rec in all {
                let fd_det = gn_hessian_fd(&rec.config, &lattice, FD_HESSIAN_STEP)
                    .map(|h| h.lu().determinant());
                let fd_str = match fd_det {
                    Ok(d) => fmt_f64(d),
                    Err(_) => {
                        partial = true;
                        "failed".into()
                    }
                };
                print!(
                    "  [{:?}] B = {}\n    det_numeric = {}  det_fd = {fd_str}",
                    rec.kind,
                    fmt_complex(rec.b),
                    fmt_f64(rec.det_numeric)
                );
                if let (Some(dc), Some(cp)) = (rec.det_closed, rec.c_p) {
                    print!("  det_closed = {}  c_p = {}", fmt_f64(dc), fmt_f64(cp));
                }
                println!(
                    "\n    degeneracy margin = {}",
                    fmt_f64(rec.degeneracy.margin())
                );
            }
            Ok(if partial { EXIT_PARTIAL } else { EXIT_OK })
        }
    }
}
