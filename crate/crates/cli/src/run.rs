//! The `run` and `certify` commands.

use crate::config::{ExperimentConfig, Mode, SmootherName};
use blockmg::conditions::full_report;
use blockmg::experiment::FemExperiment;
use blockmg::femgen::{
    assemble_stiffness, build_geometric_symbol, build_linear_interp_symbol, extract_symbol,
    FemProblem1D, TransferKind,
};
use blockmg::mgsolve::{richardson_omega_from_matrix, Cycle, SmootherSpec, SolveFlag};
use blockmg::multilevel::{assemble_2d_problem, check_multilevel_conditions, tensor_symbol_2d};
use blockmg::{MatrixTrigPolynomial, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

pub const CSV_HEADER: &str = "t,N,cycle,iterations,final_residual,flag";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: u32,
    pub n: usize,
    pub cycle: Cycle,
    pub iterations: usize,
    pub final_residual: f64,
    pub flag: Option<SolveFlag>,
}

pub fn cycle_name(c: Cycle) -> &'static str {
    match c {
        Cycle::TwoGrid => "tgm",
        Cycle::VCycle => "vcycle",
    }
}

pub fn flag_name(f: Option<SolveFlag>) -> &'static str {
    match f {
        None => "ok",
        Some(SolveFlag::MaxIterations) => "max_iterations",
        Some(SolveFlag::Diverged) => "diverged",
    }
}

fn experiment(c: &ExperimentConfig, t: u32) -> Result<FemExperiment> {
    let mut e = FemExperiment::new(c.r, c.coefficient.clone());
    e.dim = c.dim;
    e.projector = c.projector;
    e.tol = c.tol;
    e.max_iter = c.max_iter;
    e.seed = c.seed;
    e.coarsest_max = c.coarsest_max_size;
    e.smoother = match c.smoother {
        SmootherName::GaussSeidel => SmootherSpec::gauss_seidel(c.pre_sweeps, c.post_sweeps),
        SmootherName::Richardson => {
            let omega = match c.omega {
                Some(w) => w,
                None => {
                    let a = if c.dim == 1 {
                        assemble_stiffness(&FemProblem1D::new(c.coefficient.clone(), c.r, 1 << t)?)?
                    } else {
                        assemble_2d_problem(c.r, t)?.matrix
                    };
                    richardson_omega_from_matrix(&a)?
                }
            };
            SmootherSpec::richardson(omega, c.pre_sweeps, c.post_sweeps)
        }
    };
    Ok(e)
}

fn rows_for(c: &ExperimentConfig, t: u32) -> Result<Vec<Row>> {
    let e = experiment(c, t)?;
    let h = e.hierarchy(t)?;
    let n = h.sizes()[0];
    c.cycles
        .iter()
        .map(|&cycle| {
            let out = e.run(&h, cycle)?;
            Ok(Row {
                t,
                n,
                cycle,
                iterations: out.iterations,
                final_residual: out.final_residual(),
                flag: out.flag,
            })
        })
        .collect()
}

/// Solves every `(t, cycle)` pair, spreading `t` values over `jobs` threads.
/// Rows come back ordered by `t`, then cycle, whatever the scheduling.
pub fn solve_rows(c: &ExperimentConfig) -> Result<Vec<Row>> {
    let slots: Vec<Mutex<Option<Result<Vec<Row>>>>> =
        c.t_range.iter().map(|_| Mutex::new(None)).collect();
    let jobs = c.jobs.min(c.t_range.len()).max(1);
    std::thread::scope(|s| {
        for k in 0..jobs {
            let slots = &slots;
            s.spawn(move || {
                for (i, &t) in c.t_range.iter().enumerate().skip(k).step_by(jobs) {
                    *slots[i].lock().expect("slot lock") = Some(rows_for(c, t));
                }
            });
        }
    });
    let mut rows = Vec::new();
    for slot in slots {
        rows.extend(
            slot.into_inner()
                .expect("slot lock")
                .expect("every slot is filled")?,
        );
    }
    Ok(rows)
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{:e},{}\n",
            r.t,
            r.n,
            cycle_name(r.cycle),
            r.iterations,
            r.final_residual,
            flag_name(r.flag)
        ));
    }
    s
}

fn projector_symbol(r: usize, kind: TransferKind) -> Result<MatrixTrigPolynomial> {
    match kind {
        TransferKind::Linear => build_linear_interp_symbol(r),
        TransferKind::Geometric => build_geometric_symbol(r),
    }
}

/// Certification of the constant-coefficient symbol against the configured
/// projector. The diffusion coefficient does not enter the symbols.
pub fn certification(c: &ExperimentConfig) -> Result<Value> {
    let f = extract_symbol(c.r)?;
    let p = projector_symbol(c.r, c.projector)?;
    if c.dim == 1 {
        Ok(serde_json::to_value(full_report(&f, &p)?).expect("report serializes"))
    } else {
        let rep = check_multilevel_conditions(
            &[(f.clone(), p.clone()), (f, p)],
            &tensor_symbol_2d(c.r)?,
        )?;
        Ok(serde_json::to_value(rep).expect("report serializes"))
    }
}

fn config_json(c: &ExperimentConfig) -> Value {
    json!({
        "mode": c.mode,
        "dim": c.dim,
        "r": c.r,
        "t_range": c.t_range,
        "coefficient": c.coefficient.name(),
        "projector": c.projector,
        "cycles": c.cycles.iter().map(|&x| cycle_name(x)).collect::<Vec<_>>(),
        "smoother": c.smoother,
        "omega": c.omega,
        "pre_sweeps": c.pre_sweeps,
        "post_sweeps": c.post_sweeps,
        "tol": c.tol,
        "max_iter": c.max_iter,
        "seed": c.seed,
        "jobs": c.jobs,
        "coarsest_max_size": c.coarsest_max_size,
    })
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub rows: Vec<Row>,
    pub all_converged: bool,
    pub csv_path: Option<PathBuf>,
    pub json_path: PathBuf,
}

#[derive(Debug)]
pub enum RunError {
    Numeric(blockmg::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numeric(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<blockmg::Error> for RunError {
    fn from(e: blockmg::Error) -> Self {
        RunError::Numeric(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Runs the configured experiment, writing `<output>.csv` (solve modes) and
/// `<output>.json`.
pub fn run(c: &ExperimentConfig) -> std::result::Result<RunOutcome, RunError> {
    let solve = matches!(c.mode, Mode::Solve | Mode::Both);
    let certify = matches!(c.mode, Mode::Certify | Mode::Both);
    let rows = if solve { solve_rows(c)? } else { Vec::new() };
    let cert = if certify {
        certification(c)?
    } else {
        Value::Null
    };
    let csv_path = if solve {
        let p = with_ext(&c.output, ".csv");
        write_atomic(&p, &rows_csv(&rows))?;
        Some(p)
    } else {
        None
    };
    let rows_json: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "t": r.t,
                "N": r.n,
                "cycle": cycle_name(r.cycle),
                "iterations": r.iterations,
                "final_residual": r.final_residual,
                "flag": flag_name(r.flag),
            })
        })
        .collect();
    let report = json!({ "config": config_json(c), "rows": rows_json, "certification": cert });
    let json_path = with_ext(&c.output, ".json");
    write_atomic(
        &json_path,
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    let all_converged = rows.iter().all(|r| r.flag.is_none());
    Ok(RunOutcome {
        rows,
        all_converged,
        csv_path,
        json_path,
    })
}
