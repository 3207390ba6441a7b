//! Training a single saturated-linear neuron `z ↦ σ(⟨W, z⟩ + b)` as the
//! nonlinear equation `F(W, b) = y`, one equation per training sample.
//!
//! Parameters are flattened to `[W_1, ..., W_d, b]`. The derivative used by
//! the solver is the generalized one built from the right derivative of σ.

use std::path::Path;

use crate::error::{check_dim, Error, Result};
use crate::linops::{ForwardModel, LinearOperator, Vector};
use crate::rng;

/// Saturated linear activation: slope 1 on `(-c, c)`, slope `a` outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SatLin {
    pub a: f64,
    pub c: f64,
}

impl SatLin {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) || !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "activation needs a in (0, 1) and c > 0, got a = {a}, c = {c}"
            )));
        }
        Ok(Self { a, c })
    }

    /// Tangential cone constant `(1-a)/a` of the scalar activation.
    pub fn wtcc_constant(&self) -> f64 {
        (1.0 - self.a) / self.a
    }
}

impl Default for SatLin {
    fn default() -> Self {
        Self { a: 2.0 / 3.0, c: 8.0 }
    }
}

pub fn sigma(act: &SatLin, t: f64) -> f64 {
    if t >= act.c {
        act.c + act.a * (t - act.c)
    } else if t <= -act.c {
        -act.c + act.a * (t + act.c)
    } else {
        t
    }
}

/// Right derivative of σ: `a` at `t = c`, `1` at `t = -c`.
pub fn sigma_rderiv(act: &SatLin, t: f64) -> f64 {
    if t >= act.c || t < -act.c {
        act.a
    } else {
        1.0
    }
}

/// Largest observed `|σ(t') - σ(t) - s(t)(t'-t)| / |σ(t') - σ(t)|` over random
/// pairs. Pairs are drawn at several magnitudes and around both knees.
pub fn check_scalar_wtcc(act: &SatLin, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("wTCC check needs at least one trial".into()));
    }
    let mut stream = rng::seeded(seed);
    let c = act.c;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let span = match i % 4 {
            0 => 2.0 * c,
            1 => 10.0 * c,
            2 => 1e3 * c,
            _ => 1e6 * c,
        };
        let mut draw = |j: usize| {
            if (i + j).is_multiple_of(5) {
                // near a knee
                let knee = if rng::open_uniform(&mut stream, 0.0, 1.0) < 0.5 {
                    c
                } else {
                    -c
                };
                knee + rng::open_uniform(&mut stream, -1e-3, 1e-3) * c
            } else {
                rng::open_uniform(&mut stream, -span, span)
            }
        };
        let t = draw(0);
        let t2 = draw(1);
        let diff = sigma(act, t2) - sigma(act, t);
        if diff == 0.0 {
            continue;
        }
        let ratio = (diff - sigma_rderiv(act, t) * (t2 - t)).abs() / diff.abs();
        if !ratio.is_finite() {
            return Err(Error::NonFinite("wTCC ratio".into()));
        }
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// How test inputs are scaled relative to the training slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TestScaling {
    /// Divide by the largest training-input norm.
    #[default]
    TrainFactor,
    /// Divide by the largest test-input norm.
    OwnFactor,
}

/// Samples `0..n_train` form the training slice (the equations), the next
/// `n_test` the test slice.
#[derive(Clone, Debug)]
pub struct NnProblem {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    dim: usize,
    n_train: usize,
    n_test: usize,
    act: SatLin,
    scale_factor: f64,
}

impl NnProblem {
    /// Scales raw inputs so the largest training input has norm 1.
    pub fn new(
        raw_inputs: Vec<f64>,
        targets: Vec<f64>,
        dim: usize,
        n_train: usize,
        n_test: usize,
        act: SatLin,
        scaling: TestScaling,
    ) -> Result<Self> {
        if dim == 0 || n_train == 0 {
            return Err(Error::InvalidParameter(
                "input dimension and training size must be positive".into(),
            ));
        }
        let n_samples = n_train + n_test;
        check_dim("NN targets", n_samples, targets.len())?;
        check_dim("NN inputs", n_samples * dim, raw_inputs.len())?;
        if raw_inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("NN dataset".into()));
        }
        let max_norm = |rows: &[f64]| {
            rows.chunks(dim)
                .map(|z| z.iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(0.0, f64::max)
        };
        let nonzero = |f: f64| if f > 0.0 { f } else { 1.0 };
        let split = n_train * dim;
        let scale_factor = nonzero(max_norm(&raw_inputs[..split]));
        let test_factor = match scaling {
            TestScaling::TrainFactor => scale_factor,
            TestScaling::OwnFactor => nonzero(max_norm(&raw_inputs[split..])),
        };
        let mut inputs = raw_inputs;
        inputs[..split].iter_mut().for_each(|v| *v /= scale_factor);
        inputs[split..].iter_mut().for_each(|v| *v /= test_factor);
        Ok(Self {
            inputs,
            targets,
            dim,
            n_train,
            n_test,
            act,
            scale_factor,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn n_test(&self) -> usize {
        self.n_test
    }

    pub fn activation(&self) -> &SatLin {
        &self.act
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    /// Scaled input of sample `i` (train and test indices are contiguous).
    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    /// Training targets, the right-hand side of the equation.
    pub fn train_targets(&self) -> Vector {
        Vector::new(self.targets[..self.n_train].to_vec()).expect("targets are finite")
    }

    fn preactivation(&self, x: &[f64], i: usize) -> f64 {
        let (w, b) = x.split_at(self.dim);
        self.input(i).iter().zip(w).map(|(z, w)| z * w).sum::<f64>() + b[0]
    }

    /// Network output for sample `i` with flattened parameters `x`.
    pub fn predict(&self, x: &Vector, i: usize) -> Result<f64> {
        check_dim("NN parameters", self.param_dim(), x.len())?;
        Ok(sigma(&self.act, self.preactivation(x.as_slice(), i)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NnParams {
    pub w: Vec<f64>,
    pub b: f64,
}

impl NnParams {
    pub fn zeros(dim: usize) -> Self {
        Self {
            w: vec![0.0; dim],
            b: 0.0,
        }
    }

    pub fn to_vector(&self) -> Result<Vector> {
        let mut data = self.w.clone();
        data.push(self.b);
        Vector::new(data)
    }

    pub fn from_vector(x: &Vector) -> Result<Self> {
        let (b, w) = x
            .as_slice()
            .split_last()
            .ok_or_else(|| Error::InvalidParameter("empty parameter vector".into()))?;
        Ok(Self { w: w.to_vec(), b: *b })
    }
}

/// `[σ(⟨W, z_i⟩ + b)]_i` over the training slice.
pub fn nn_forward(prob: &NnProblem, p: &NnParams) -> Result<Vector> {
    prob.apply(&p.to_vector()?)
}

pub fn nn_jacobian_apply(prob: &NnProblem, p: &NnParams, hdir: &Vector) -> Result<Vector> {
    prob.jacobian_apply(&p.to_vector()?, hdir)
}

pub fn nn_adjoint_apply(prob: &NnProblem, p: &NnParams, r: &Vector) -> Result<Vector> {
    prob.adjoint_apply(&p.to_vector()?, r)
}

/// Generalized derivative `h ↦ [s(⟨W, z_i⟩ + b)(⟨W_h, z_i⟩ + b_h)]_i`.
#[derive(Clone, Debug)]
pub struct NnLinearization<'a> {
    prob: &'a NnProblem,
    slopes: Vec<f64>,
}

impl NnLinearization<'_> {
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }
}

impl LinearOperator for NnLinearization<'_> {
    fn domain_dim(&self) -> usize {
        self.prob.param_dim()
    }

    fn range_dim(&self) -> usize {
        self.prob.n_train
    }

    fn apply(&self, h: &Vector) -> Result<Vector> {
        check_dim("NN Jacobian direction", self.domain_dim(), h.len())?;
        let h = h.as_slice();
        Vector::from_fn(self.prob.n_train, |i| self.slopes[i] * self.prob.preactivation(h, i))
    }

    fn apply_adjoint(&self, r: &Vector) -> Result<Vector> {
        check_dim("NN adjoint argument", self.range_dim(), r.len())?;
        let dim = self.prob.dim;
        let mut out = vec![0.0; dim + 1];
        for i in 0..self.prob.n_train {
            let weight = self.slopes[i] * r[i];
            for (o, z) in out[..dim].iter_mut().zip(self.prob.input(i)) {
                *o += weight * z;
            }
            out[dim] += weight;
        }
        Vector::new(out)
    }
}

impl ForwardModel for NnProblem {
    type Linearization<'a> = NnLinearization<'a>;

    fn domain_dim(&self) -> usize {
        self.param_dim()
    }

    fn range_dim(&self) -> usize {
        self.n_train
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        self.evaluate(x).map(|(fx, _)| fx)
    }

    fn linearize(&self, x: &Vector) -> Result<NnLinearization<'_>> {
        self.evaluate(x).map(|(_, lin)| lin)
    }

    fn evaluate(&self, x: &Vector) -> Result<(Vector, NnLinearization<'_>)> {
        check_dim("NN parameters", self.param_dim(), x.len())?;
        let pre: Vec<f64> = (0..self.n_train).map(|i| self.preactivation(x.as_slice(), i)).collect();
        let fx = Vector::new(pre.iter().map(|t| sigma(&self.act, *t)).collect())?;
        let slopes = pre.iter().map(|t| sigma_rderiv(&self.act, *t)).collect();
        Ok((fx, NnLinearization { prob: self, slopes }))
    }
}

/// `|NN(z_i) - y_i| / |y_i|` for every test sample.
pub fn relative_test_errors(prob: &NnProblem, x: &Vector) -> Result<Vec<f64>> {
    if prob.n_test == 0 {
        return Err(Error::UndefinedMetric("test slice is empty".into()));
    }
    (prob.n_train..prob.n_train + prob.n_test)
        .map(|i| {
            let y = prob.target(i);
            if y.abs() < 1e-12 {
                return Err(Error::UndefinedMetric(format!("test target {i} is (near) zero: {y:e}")));
            }
            Ok((prob.predict(x, i)? - y).abs() / y.abs())
        })
        .collect()
}

/// `1 - mean_i |NN(z_i) - y_i| / |y_i|` over the test slice.
pub fn performance(prob: &NnProblem, x: &Vector) -> Result<f64> {
    let errs = relative_test_errors(prob, x)?;
    Ok(1.0 - errs.iter().sum::<f64>() / errs.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub input_dim: usize,
    pub noise_pct: f64,
    pub seed: u64,
    pub act: SatLin,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_train: 10_000,
            n_test: 1_000,
            input_dim: 14,
            noise_pct: 0.01,
            seed: 0,
            act: SatLin::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthDataset {
    pub problem: NnProblem,
    /// Generating parameters expressed in scaled input coordinates.
    pub truth: NnParams,
    /// `|y^δ - y|` over the training slice.
    pub train_noise: f64,
}

/// Inputs uniform in the unit ball, truth uniform in `(-1, 1)` per coordinate,
/// targets `σ(⟨W*, z⟩ + b*)` plus a Gaussian perturbation of total norm
/// `noise_pct |y|`.
pub fn synth_dataset(spec: &SynthSpec) -> Result<SynthDataset> {
    let SynthSpec {
        n_train,
        n_test,
        input_dim: dim,
        noise_pct,
        seed,
        act,
    } = *spec;
    if n_train == 0 || dim == 0 {
        return Err(Error::InvalidParameter(
            "synthetic dataset needs n_train > 0 and input_dim > 0".into(),
        ));
    }
    if !(noise_pct >= 0.0 && noise_pct.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {noise_pct}"
        )));
    }
    let n = n_train + n_test;
    let mut stream = rng::seeded(seed);
    let w_true = rng::uniform_vector(&mut stream, dim, -1.0, 1.0).into_vec();
    let b_true = rng::open_uniform(&mut stream, -1.0, 1.0);

    let mut inputs = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let dir = loop {
            let g = rng::normal_vector(&mut stream, dim);
            if g.norm() > 0.0 {
                break g;
            }
        };
        let radius = rng::open_uniform(&mut stream, 0.0, 1.0).powf(1.0 / dim as f64);
        let scale = radius / dir.norm();
        inputs.extend(dir.iter().map(|v| v * scale));
    }
    let clean: Vec<f64> = inputs
        .chunks(dim)
        .map(|z| sigma(&act, z.iter().zip(&w_true).map(|(z, w)| z * w).sum::<f64>() + b_true))
        .collect();

    let mut targets = clean.clone();
    let mut train_noise = 0.0;
    if noise_pct > 0.0 {
        let y_norm = clean.iter().map(|v| v * v).sum::<f64>().sqrt();
        let e = loop {
            let e = rng::normal_vector(&mut stream, n);
            if e.norm() > 0.0 {
                break e;
            }
        };
        let factor = noise_pct * y_norm / e.norm();
        targets.iter_mut().zip(e.iter()).for_each(|(t, e)| *t += factor * e);
        train_noise = factor * e.as_slice()[..n_train].iter().map(|v| v * v).sum::<f64>().sqrt();
    }

    let problem = NnProblem::new(inputs, targets, dim, n_train, n_test, act, TestScaling::TrainFactor)?;
    let f = problem.scale_factor();
    let truth = NnParams {
        w: w_true.iter().map(|w| w * f).collect(),
        b: b_true,
    };
    Ok(SynthDataset {
        problem,
        truth,
        train_noise,
    })
}

/// Starting parameters with coordinates uniform in `(-1, 1)`.
pub fn random_initial_params(input_dim: usize, seed: u64) -> Vector {
    rng::uniform_vector(&mut rng::seeded(seed), input_dim + 1, -1.0, 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvSpec {
    pub target_column: usize,
    pub excluded_columns: Vec<usize>,
    pub n_train: usize,
    pub n_test: usize,
    /// `None` detects a header: the first row is one if any field is not a number.
    pub has_header: Option<bool>,
    pub scaling: TestScaling,
}

/// Reads a numeric CSV; every column other than the target and the excluded
/// ones becomes an input coordinate.
pub fn load_csv_dataset(path: &Path, spec: &CsvSpec, act: SatLin) -> Result<NnProblem> {
    let csv_err = |row: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(0, e.to_string()))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| csv_err(row, e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let is_header = idx == 0 && spec.has_header.unwrap_or(parsed.is_err());
        if is_header {
            continue;
        }
        let values = parsed.map_err(|e| csv_err(row, format!("not a number: {e}")))?;
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(csv_err(row, format!("non-finite value in column {bad}")));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(csv_err(row, format!("expected {w} fields, found {}", values.len())));
            }
            _ => {}
        }
        rows.push(values);
    }

    let width = width.ok_or_else(|| csv_err(0, "no data rows".into()))?;
    for col in std::iter::once(&spec.target_column).chain(&spec.excluded_columns) {
        if *col >= width {
            return Err(csv_err(
                0,
                format!("column {col} does not exist (file has {width} columns)"),
            ));
        }
    }
    let needed = spec.n_train + spec.n_test;
    if rows.len() < needed {
        return Err(csv_err(
            0,
            format!("{} data rows, but the split needs {needed}", rows.len()),
        ));
    }
    let keep: Vec<usize> = (0..width)
        .filter(|c| *c != spec.target_column && !spec.excluded_columns.contains(c))
        .collect();
    if keep.is_empty() {
        return Err(csv_err(0, "no input columns left".into()));
    }
    let mut inputs = Vec::with_capacity(needed * keep.len());
    let mut targets = Vec::with_capacity(needed);
    for row in rows.iter().take(needed) {
        inputs.extend(keep.iter().map(|c| row[*c]));
        targets.push(row[spec.target_column]);
    }
    NnProblem::new(
        inputs,
        targets,
        keep.len(),
        spec.n_train,
        spec.n_test,
        act,
        spec.scaling,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_values() {
        let act = SatLin::default();
        assert_eq!(sigma(&act, 0.0), 0.0);
        assert!((sigma(&act, 11.0) - 10.0).abs() < 1e-14);
        assert!((sigma(&act, 9.0) - (8.0 + 2.0 / 3.0)).abs() < 1e-14);
        assert_eq!(sigma_rderiv(&act, 0.0), 1.0);
        assert_eq!(sigma_rderiv(&act, 8.0), 2.0 / 3.0);
        assert_eq!(sigma_rderiv(&act, -8.0), 1.0);
        assert_eq!(sigma_rderiv(&act, -8.5), 2.0 / 3.0);
        assert!((act.wtcc_constant() - 0.5).abs() < 1e-15);
        for t in [0.3, 7.9, 8.0, 12.0, 1e5] {
            assert_eq!(sigma(&act, -t), -sigma(&act, t));
        }
    }

    #[test]
    fn activation_rejects_bad_parameters() {
        assert!(SatLin::new(1.0, 8.0).is_err());
        assert!(SatLin::new(0.5, 0.0).is_err());
        assert!(SatLin::new(0.5, 1.0).is_ok());
    }

    #[test]
    fn wtcc_ratio_tends_to_bound() {
        let act = SatLin::default();
        let ratio = |t: f64, t2: f64| {
            let d = sigma(&act, t2) - sigma(&act, t);
            (d - sigma_rderiv(&act, t) * (t2 - t)).abs() / d.abs()
        };
        assert_eq!(ratio(1.0, 3.0), 0.0);
        let far = ratio(0.0, 1e9);
        assert!((far - 0.5).abs() < 1e-7 && far <= 0.5);
    }

    fn tiny_problem() -> NnProblem {
        // two samples in 2-d, one test sample
        NnProblem::new(
            vec![0.5, 0.0, 0.0, 0.25, 0.1, 0.1],
            vec![1.0, 2.0, 4.0],
            2,
            2,
            1,
            SatLin::default(),
            TestScaling::TrainFactor,
        )
        .unwrap()
    }

    #[test]
    fn scaling_maps_largest_train_input_to_unit_norm() {
        let prob = tiny_problem();
        assert_eq!(prob.scale_factor(), 0.5);
        assert_eq!(prob.input(0), &[1.0, 0.0]);
        assert_eq!(prob.input(1), &[0.0, 0.5]);
        assert_eq!(prob.input(2), &[0.2, 0.2]);
    }

    #[test]
    fn single_sample_adjoint() {
        let prob = NnProblem::new(
            vec![0.5, 0.0],
            vec![1.0],
            2,
            1,
            0,
            SatLin::default(),
            TestScaling::TrainFactor,
        )
        .unwrap();
        let p = NnParams {
            w: vec![20.0, 0.0],
            b: 0.0,
        };
        let r = Vector::new(vec![3.0]).unwrap();
        let adj = nn_adjoint_apply(&prob, &p, &r).unwrap();
        let s = 2.0 / 3.0;
        assert_eq!(adj.as_slice(), &[s * 3.0 * 1.0, 0.0, s * 3.0]);
    }

    #[test]
    fn forward_values() {
        let prob = tiny_problem();
        assert_eq!(nn_forward(&prob, &NnParams::zeros(2)).unwrap(), Vector::zeros(2));
        let p = NnParams {
            w: vec![0.5, 0.0],
            b: 0.0,
        };
        assert_eq!(nn_forward(&prob, &p).unwrap()[0], 0.5);
    }

    #[test]
    fn performance_averages_relative_misfits() {
        let prob = NnProblem::new(
            vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
            vec![1.0, 100.0, 50.0],
            1,
            2,
            1,
            SatLin::default(),
            TestScaling::TrainFactor,
        );
        assert!(prob.is_err(), "inputs must match n_samples * dim");

        // test targets 1 and 2, predictions 0.98 and 2.08: misfits 0.02 and 0.04
        let prob = NnProblem::new(
            vec![1.0, 0.0, 0.0, 1.0],
            vec![5.0, 5.0, 1.0, 2.0],
            1,
            2,
            2,
            SatLin::default(),
            TestScaling::TrainFactor,
        )
        .unwrap();
        let x = Vector::new(vec![0.0, 0.98]).unwrap();
        let x2 = Vector::new(vec![1.1, 0.98]).unwrap();
        assert!((performance(&prob, &x).unwrap() - (1.0 - (0.02 + 0.51) / 2.0)).abs() < 1e-14);
        let errs = relative_test_errors(&prob, &x2).unwrap();
        assert!((errs[0] - 0.02).abs() < 1e-14 && (errs[1] - 0.04).abs() < 1e-14);
        assert!((performance(&prob, &x2).unwrap() - 0.97).abs() < 1e-14);
    }

    #[test]
    fn zero_test_target_is_rejected() {
        let prob = NnProblem::new(
            vec![1.0, 1.0],
            vec![1.0, 0.0],
            1,
            1,
            1,
            SatLin::default(),
            TestScaling::TrainFactor,
        )
        .unwrap();
        let x = Vector::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(performance(&prob, &x), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn synthetic_data_is_reproducible_and_scaled() {
        let spec = SynthSpec {
            n_train: 200,
            n_test: 20,
            noise_pct: 0.0,
            seed: 11,
            ..SynthSpec::default()
        };
        let a = synth_dataset(&spec).unwrap();
        let b = synth_dataset(&spec).unwrap();
        assert_eq!(a.problem.inputs, b.problem.inputs);
        assert_eq!(a.problem.targets, b.problem.targets);
        let max = (0..200)
            .map(|i| a.problem.input(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-15);
        let fit = nn_forward(&a.problem, &a.truth).unwrap();
        let rel = fit.distance(&a.problem.train_targets()).unwrap() / fit.norm();
        assert!(rel < 1e-14, "noise-free targets must be fitted by the truth: {rel}");
        assert_eq!(a.train_noise, 0.0);
    }
}
