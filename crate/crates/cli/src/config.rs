//! Flat `key = value` experiment configuration.
//!
//! Blank lines and text after `#` are ignored. Keys and defaults:
//!
//! | key | values | default |
//! |---|---|---|
//! | `mode` | `solve`, `certify`, `both` | `solve` |
//! | `dim` | `1`, `2` | `1` |
//! | `r` | degree, `1..=4` in 1D, `1..=3` in 2D | `2` |
//! | `t_range` | `a..b` (inclusive) or `a,b,c` | `4..10` |
//! | `coefficient` | `one`, `xsq_plus_one`, `exp_minus_2x` | `one` |
//! | `projector` | `linear`, `geometric` | `linear` |
//! | `cycle` | `tgm`, `vcycle`, `both` | `vcycle` |
//! | `smoother` | `gauss_seidel`, `richardson` | `gauss_seidel` |
//! | `omega` | Richardson weight | `1/‖A‖` (Gershgorin) |
//! | `pre_sweeps`, `post_sweeps` | sweeps | `1`, `1` |
//! | `tol` | relative residual | `1e-6` |
//! | `max_iter` | iteration cap | `100` |
//! | `seed` | right-hand side seed | `20240101` |
//! | `output` | path prefix for `.csv` and `.json` | `blockmg_run` |
//! | `jobs` | concurrent `t` values | `1` |
//! | `coarsest_max_size` | direct-solve threshold | `64` |

use blockmg::experiment::DEFAULT_SEED;
use blockmg::femgen::{Coefficient, TransferKind};
use blockmg::mgsolve::{Cycle, COARSEST_MAX_SIZE};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    Certify,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherName {
    GaussSeidel,
    Richardson,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub dim: usize,
    pub r: usize,
    pub t_range: Vec<u32>,
    pub coefficient: Coefficient,
    pub projector: TransferKind,
    pub cycles: Vec<Cycle>,
    pub smoother: SmootherName,
    pub omega: Option<f64>,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub jobs: usize,
    pub coarsest_max_size: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Solve,
            dim: 1,
            r: 2,
            t_range: (4..=10).collect(),
            coefficient: Coefficient::One,
            projector: TransferKind::Linear,
            cycles: vec![Cycle::VCycle],
            smoother: SmootherName::GaussSeidel,
            omega: None,
            pre_sweeps: 1,
            post_sweeps: 1,
            tol: 1e-6,
            max_iter: 100,
            seed: DEFAULT_SEED,
            output: PathBuf::from("blockmg_run"),
            jobs: 1,
            coarsest_max_size: COARSEST_MAX_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}")))
}

fn parse_range(v: &str) -> Result<Vec<u32>, ConfigError> {
    let out: Vec<u32> = if let Some((a, b)) = v.split_once("..") {
        let (a, b): (u32, u32) = (num("t_range", a.trim())?, num("t_range", b.trim())?);
        if a > b {
            return err(format!("t_range: empty range {v:?}"));
        }
        (a..=b).collect()
    } else {
        v.split(',')
            .map(|s| num("t_range", s.trim()))
            .collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return err("t_range is empty");
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", ln + 1));
            };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if kv.insert(k.clone(), v).is_some() {
                return err(format!("line {}: duplicate key {k}", ln + 1));
            }
        }
        let mut c = ExperimentConfig::default();
        for (k, v) in &kv {
            let v = v.as_str();
            match k.as_str() {
                "mode" => {
                    c.mode = match v {
                        "solve" => Mode::Solve,
                        "certify" => Mode::Certify,
                        "both" => Mode::Both,
                        _ => return err(format!("mode: unknown value {v:?}")),
                    }
                }
                "dim" => c.dim = num(k, v)?,
                "r" => c.r = num(k, v)?,
                "t_range" => c.t_range = parse_range(v)?,
                "coefficient" => {
                    c.coefficient = match v {
                        "one" => Coefficient::One,
                        "xsq_plus_one" => Coefficient::XSquaredPlusOne,
                        "exp_minus_2x" => Coefficient::ExpMinusTwoX,
                        _ => return err(format!("coefficient: unknown value {v:?}")),
                    }
                }
                "projector" => {
                    c.projector = match v {
                        "linear" => TransferKind::Linear,
                        "geometric" => TransferKind::Geometric,
                        _ => return err(format!("projector: unknown value {v:?}")),
                    }
                }
                "cycle" => {
                    c.cycles = match v {
                        "tgm" => vec![Cycle::TwoGrid],
                        "vcycle" => vec![Cycle::VCycle],
                        "both" => vec![Cycle::TwoGrid, Cycle::VCycle],
                        _ => return err(format!("cycle: unknown value {v:?}")),
                    }
                }
                "smoother" => {
                    c.smoother = match v {
                        "gauss_seidel" => SmootherName::GaussSeidel,
                        "richardson" => SmootherName::Richardson,
                        _ => return err(format!("smoother: unknown value {v:?}")),
                    }
                }
                "omega" => c.omega = Some(num(k, v)?),
                "pre_sweeps" => c.pre_sweeps = num(k, v)?,
                "post_sweeps" => c.post_sweeps = num(k, v)?,
                "tol" => c.tol = num(k, v)?,
                "max_iter" => c.max_iter = num(k, v)?,
                "seed" => c.seed = num(k, v)?,
                "output" => c.output = PathBuf::from(v),
                "jobs" => c.jobs = num(k, v)?,
                "coarsest_max_size" => c.coarsest_max_size = num(k, v)?,
                _ => return err(format!("unknown key {k:?}")),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self.dim {
            1 if (1..=4).contains(&self.r) => {}
            2 if (1..=blockmg::multilevel::MAX_TENSOR_DEGREE).contains(&self.r) => {}
            1 | 2 => {
                return err(format!(
                    "r = {} is not supported for dim = {}",
                    self.r, self.dim
                ))
            }
            d => return err(format!("dim must be 1 or 2, got {d}")),
        }
        if self.dim == 2 && !matches!(self.coefficient, Coefficient::One) {
            return err("dim = 2 supports coefficient = one only");
        }
        let tmax = if self.dim == 2 {
            blockmg::multilevel::MAX_TENSOR_LEVEL
        } else {
            20
        };
        if let Some(t) = self.t_range.iter().find(|&&t| t < 2 || t > tmax) {
            return err(format!("t = {t} outside 2..={tmax}"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return err("tol must lie in (0, 1)");
        }
        if self.max_iter == 0 || self.jobs == 0 {
            return err("max_iter and jobs must be positive");
        }
        if self.pre_sweeps + self.post_sweeps == 0 {
            return err("at least one smoothing sweep is required");
        }
        if let Some(w) = self.omega {
            if self.smoother != SmootherName::Richardson {
                return err("omega applies to smoother = richardson only");
            }
            if !(w > 0.0) {
                return err("omega must be positive");
            }
        }
        Ok(())
    }
}
