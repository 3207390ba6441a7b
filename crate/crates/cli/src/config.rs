//! Experiment configuration: built-in defaults per problem, overlaid by an
//! optional JSON file, overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{io_err, CliError, CliResult};

pub const OUT_DIR_ENV: &str = "INLM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "inlm-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Pde,
    Nn,
    Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestScalingName {
    Train,
    Own,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSettings {
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    pub path: PathBuf,
    pub target_column: usize,
    #[serde(default)]
    pub excluded_columns: Vec<usize>,
    #[serde(default)]
    pub has_header: Option<bool>,
    #[serde(default = "default_scaling")]
    pub test_scaling: TestScalingName,
}

fn default_scaling() -> TestScalingName {
    TestScalingName::Train
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NnSettings {
    pub train: usize,
    pub test: usize,
    pub input_dim: usize,
    pub act_a: f64,
    pub act_c: f64,
    pub csv: Option<CsvSource>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub seed: u64,
    pub noise_pct: f64,
    pub alpha_sweep: Vec<f64>,
    pub lambda: f64,
    pub tau: f64,
    pub cg_iters: usize,
    pub max_iters: usize,
    /// Stop each run at the discrepancy index instead of recording it and
    /// continuing to `max_iters`.
    pub stop_at_discrepancy: bool,
    pub pde: PdeSettings,
    pub nn: NnSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(problem: ProblemKind) -> Self {
        let nn = NnSettings {
            train: 10_000,
            test: 1_000,
            input_dim: 14,
            act_a: 2.0 / 3.0,
            act_c: 8.0,
            csv: None,
        };
        let pde = PdeSettings { n: 32 };
        match problem {
            ProblemKind::Nn => Self {
                problem,
                seed: 0,
                noise_pct: 0.01,
                alpha_sweep: vec![0.0, 0.05, 0.10, 0.20],
                lambda: 1000.0,
                tau: 1.0,
                cg_iters: 3,
                max_iters: 10,
                stop_at_discrepancy: false,
                pde,
                nn,
                output_dir: None,
            },
            ProblemKind::Pde | ProblemKind::Scalar => Self {
                problem,
                seed: 0,
                noise_pct: 0.01,
                alpha_sweep: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
                lambda: 0.01,
                tau: 1.0,
                cg_iters: 2,
                max_iters: 200,
                stop_at_discrepancy: false,
                pde,
                nn,
                output_dir: None,
            },
        }
    }

    /// Defaults for `problem` overlaid by the JSON object at `path`.
    pub fn from_file(problem: ProblemKind, path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let overlay: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut base = serde_json::to_value(Self::defaults(problem))?;
        merge(&mut base, overlay);
        let cfg: Self =
            serde_json::from_value(base).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.problem != problem {
            return Err(CliError::Config(format!(
                "{}: problem {:?} does not match the subcommand",
                path.display(),
                cfg.problem
            )));
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.alpha_sweep.is_empty() {
            return bad("alpha sweep is empty".into());
        }
        if let Some(a) = self.alpha_sweep.iter().find(|a| !(**a >= 0.0 && **a <= 1.0)) {
            return bad(format!("alpha {a} is outside [0, 1]"));
        }
        if !(self.noise_pct >= 0.0 && self.noise_pct.is_finite()) {
            return bad(format!("noise level {} must be nonnegative", self.noise_pct));
        }
        if self.cg_iters == 0 || self.max_iters == 0 {
            return bad("cg_iters and max_iters must be positive".into());
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) || !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!(
                "lambda = {} and tau = {} must be positive",
                self.lambda, self.tau
            ));
        }
        if self.problem == ProblemKind::Nn && (self.nn.train == 0 || self.nn.input_dim == 0) {
            return bad("nn needs at least one training sample and one input".into());
        }
        if self.problem == ProblemKind::Pde && self.pde.n < 4 {
            return bad(format!("grid size n = {} must be at least 4", self.pde.n));
        }
        Ok(())
    }

    /// Output directory: flag, then environment, then config file, then default.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    /// First 16 hex digits of SHA-256 over the key-sorted compact JSON form,
    /// with the output directory left out.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output_dir = None;
        let value = serde_json::to_value(&canon).expect("config serializes");
        let text = serde_json::to_string(&value).expect("value serializes");
        let digest = Sha256::digest(text.as_bytes());
        hex::encode(digest)[..16].to_string()
    }

    /// The same experiment restricted to one inertial weight.
    pub fn single_run(&self, alpha: f64) -> Self {
        Self {
            alpha_sweep: vec![alpha],
            ..self.clone()
        }
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
