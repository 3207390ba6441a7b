//! File formats: CSV series and grids, JSON summaries. Every number is written
//! with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use inlm_core::inlm::RunTrace;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{io_err, CliResult};

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number printed by [`fmt_num`]; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub const TRACE_HEADER: &str = "k,alpha_k,lambda_k,residual,distance,step_norm";

/// One row per record; `distance` is left empty without ground truth.
pub fn write_trace_csv(path: &Path, trace: &RunTrace) -> CliResult<()> {
    write_with(path, |out| {
        writeln!(out, "{TRACE_HEADER}")?;
        for r in &trace.records {
            let distance = r.distance_to_truth.map(fmt_num).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.k,
                fmt_num(r.alpha_k),
                fmt_num(r.lambda_k),
                fmt_num(r.residual_norm),
                distance,
                fmt_num(r.step_norm)
            )?;
        }
        Ok(())
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn write_with(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    body(&mut out).and_then(|_| out.flush()).map_err(io_err(path))
}

pub fn write_grid(path: &Path, n: usize, v: &inlm_core::Vector) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    inlm_core::pde::write_grid_csv(&mut out, n, v)?;
    out.flush().map_err(io_err(path))
}

/// File-name tag for an inertial weight, e.g. `alpha_0.05`.
pub fn alpha_tag(alpha: f64) -> String {
    format!("alpha_{alpha}")
}
