//! Coefficient identification for `-Δu + c u = g` on the unit square with
//! zero Dirichlet data, discretized by the five-point stencil.
//!
//! The grid has `n × n` interior nodes; node `(i, j)` sits at
//! `((i+1)h, (j+1)h)` with `h = 1/(n+1)` and is stored at index `j*n + i`.

use std::io::{BufRead, Write};

use crate::banded::BandCholesky;
use crate::error::{check_dim, Error, Result};
use crate::linops::{ForwardModel, LinearOperator, Vector};
use crate::rng;

pub const DEFAULT_FORWARD_TOL: f64 = 1e-10;

/// Standard deviation of the phantom blur, in domain units.
pub const PHANTOM_BLUR_SIGMA: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct EllipticProblem {
    n: usize,
    h: f64,
    z: Vector,
    forward_tol: f64,
}

impl EllipticProblem {
    pub fn new(n: usize, z: Vector) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid size must be positive".into()));
        }
        check_dim("PDE right-hand side", n * n, z.len())?;
        Ok(Self {
            n,
            h: grid_spacing(n),
            z,
            forward_tol: DEFAULT_FORWARD_TOL,
        })
    }

    pub fn with_forward_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "forward tolerance must be positive, got {tol}"
            )));
        }
        self.forward_tol = tol;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn z(&self) -> &Vector {
        &self.z
    }

    pub fn forward_tol(&self) -> f64 {
        self.forward_tol
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    fn factor(&self, c: &Vector) -> Result<BandCholesky> {
        check_dim("PDE coefficient", self.dim(), c.len())?;
        let (n, inv_h2) = (self.n, 1.0 / (self.h * self.h));
        BandCholesky::factor(self.dim(), n, |i, d| match d {
            0 => 4.0 * inv_h2 + c[i],
            1 if i % n != 0 => -inv_h2,
            d if d == n => -inv_h2,
            _ => 0.0,
        })
    }

    fn solve_with(&self, factor: &BandCholesky, rhs: &Vector) -> Result<Vector> {
        check_dim("PDE solve", factor.dim(), rhs.len())?;
        let mut x = rhs.as_slice().to_vec();
        factor.solve_in_place(&mut x);
        Vector::new(x)
    }

    fn forward_with(&self, factor: &BandCholesky, c: &Vector) -> Result<Vector> {
        let u = self.solve_with(factor, &self.z)?;
        let residual = stencil_apply(self.n, c, &u)?.distance(&self.z)?;
        let tolerance = self.forward_tol * self.z.norm();
        if residual > tolerance {
            return Err(Error::ForwardSolve { residual, tolerance });
        }
        Ok(u)
    }
}

pub fn grid_spacing(n: usize) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// Coordinates of the node stored at `idx`.
pub fn node_coords(n: usize, idx: usize) -> (f64, f64) {
    let h = grid_spacing(n);
    (((idx % n) + 1) as f64 * h, ((idx / n) + 1) as f64 * h)
}

/// `(-Δ_n + diag(c)) v`, off-grid neighbours taken as zero.
pub fn stencil_apply(n: usize, c: &Vector, v: &Vector) -> Result<Vector> {
    check_dim("stencil coefficient", n * n, c.len())?;
    check_dim("stencil argument", n * n, v.len())?;
    let inv_h2 = 1.0 / grid_spacing(n).powi(2);
    let v = v.as_slice();
    Vector::from_fn(n * n, |idx| {
        let (i, j) = (idx % n, idx / n);
        let mut acc = 4.0 * v[idx];
        if i > 0 {
            acc -= v[idx - 1];
        }
        if i + 1 < n {
            acc -= v[idx + 1];
        }
        if j > 0 {
            acc -= v[idx - n];
        }
        if j + 1 < n {
            acc -= v[idx + n];
        }
        inv_h2 * acc + c[idx] * v[idx]
    })
}

/// `u = (-Δ_n + diag(c))⁻¹ z`, verified against the forward tolerance.
pub fn forward_solve(prob: &EllipticProblem, c: &Vector) -> Result<Vector> {
    let factor = prob.factor(c)?;
    prob.forward_with(&factor, c)
}

/// `F'(c) h = -L_c⁻¹ (h ⊙ u)` with `u = F(c)`.
pub fn pde_jacobian_apply(prob: &EllipticProblem, c: &Vector, u_cache: &Vector, hdir: &Vector) -> Result<Vector> {
    check_dim("cached state", prob.dim(), u_cache.len())?;
    PdeLinearization {
        factor: prob.factor(c)?,
        u: u_cache.clone(),
    }
    .apply(hdir)
}

/// `F'(c)* r = -u ⊙ L_c⁻¹ r` with `u = F(c)`.
pub fn pde_adjoint_apply(prob: &EllipticProblem, c: &Vector, u_cache: &Vector, r: &Vector) -> Result<Vector> {
    check_dim("cached state", prob.dim(), u_cache.len())?;
    PdeLinearization {
        factor: prob.factor(c)?,
        u: u_cache.clone(),
    }
    .apply_adjoint(r)
}

/// `F'(c)` holding the factorization of `L_c` and the state `u = F(c)`.
#[derive(Clone, Debug)]
pub struct PdeLinearization {
    factor: BandCholesky,
    u: Vector,
}

impl PdeLinearization {
    pub fn state(&self) -> &Vector {
        &self.u
    }

    fn solve(&self, rhs: &Vector) -> Result<Vector> {
        check_dim("PDE linearization", self.u.len(), rhs.len())?;
        let mut x = rhs.as_slice().to_vec();
        self.factor.solve_in_place(&mut x);
        Vector::new(x)
    }
}

impl LinearOperator for PdeLinearization {
    fn domain_dim(&self) -> usize {
        self.u.len()
    }

    fn range_dim(&self) -> usize {
        self.u.len()
    }

    fn apply(&self, h: &Vector) -> Result<Vector> {
        self.solve(&h.hadamard(&self.u)?)?.scaled(-1.0)
    }

    fn apply_adjoint(&self, r: &Vector) -> Result<Vector> {
        self.solve(r)?.hadamard(&self.u)?.scaled(-1.0)
    }
}

impl ForwardModel for EllipticProblem {
    type Linearization<'a> = PdeLinearization;

    fn domain_dim(&self) -> usize {
        self.dim()
    }

    fn range_dim(&self) -> usize {
        self.dim()
    }

    fn apply(&self, c: &Vector) -> Result<Vector> {
        forward_solve(self, c)
    }

    fn linearize(&self, c: &Vector) -> Result<PdeLinearization> {
        self.evaluate(c).map(|(_, lin)| lin)
    }

    fn evaluate(&self, c: &Vector) -> Result<(Vector, PdeLinearization)> {
        let factor = self.factor(c)?;
        let u = self.forward_with(&factor, c)?;
        Ok((u.clone(), PdeLinearization { factor, u }))
    }
}

/// Ground truth of the benchmark: coefficient, exact state and sampled source.
#[derive(Clone, Debug)]
pub struct Phantom {
    pub c_true: Vector,
    pub u_true: Vector,
    pub g_grid: Vector,
}

/// `g(x, y) = 200 exp(-10(x-½)² - 10(y-½)²)`
pub fn source(x: f64, y: f64) -> f64 {
    200.0 * (-10.0 * (x - 0.5).powi(2) - 10.0 * (y - 0.5).powi(2)).exp()
}

/// Value 10 on the closed disks of radius 0.1 around (0.25, 0.5) and (0.75, 0.5), else 0.
pub fn phantom_indicator(x: f64, y: f64) -> f64 {
    let inside = |cx: f64| (x - cx).powi(2) + (y - 0.5).powi(2) <= 0.01 + 1e-12;
    if inside(0.25) || inside(0.75) {
        10.0
    } else {
        0.0
    }
}

/// Convolves a grid function with a sampled Gaussian of standard deviation
/// `sigma`, normalized to unit discrete mass and truncated at `ceil(4σ/h)`
/// nodes. Values outside the grid count as zero.
pub fn gaussian_blur(n: usize, v: &Vector, sigma: f64) -> Result<Vector> {
    check_dim("blur input", n * n, v.len())?;
    let h = grid_spacing(n);
    let radius = (4.0 * sigma / h).ceil() as isize;
    let side = (2 * radius + 1) as usize;
    let mut kernel = Vec::with_capacity(side * side);
    for dj in -radius..=radius {
        for di in -radius..=radius {
            let r2 = ((di * di + dj * dj) as f64) * h * h;
            kernel.push((-r2 / (2.0 * sigma * sigma)).exp());
        }
    }
    let mass: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= mass);

    let n_i = n as isize;
    Vector::from_fn(n * n, |idx| {
        let (i, j) = ((idx % n) as isize, (idx / n) as isize);
        let mut acc = 0.0;
        for dj in -radius..=radius {
            let jj = j + dj;
            if !(0..n_i).contains(&jj) {
                continue;
            }
            for di in -radius..=radius {
                let ii = i + di;
                if !(0..n_i).contains(&ii) {
                    continue;
                }
                let kw = kernel[((dj + radius) as usize) * side + (di + radius) as usize];
                acc += kw * v[(jj * n_i + ii) as usize];
            }
        }
        acc
    })
}

/// Builds the benchmark problem and its phantom on an `n × n` grid.
pub fn make_phantom(n: usize) -> Result<(EllipticProblem, Phantom)> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("phantom needs n >= 4, got {n}")));
    }
    let sample = |f: fn(f64, f64) -> f64| {
        Vector::from_fn(n * n, |idx| {
            let (x, y) = node_coords(n, idx);
            f(x, y)
        })
    };
    let g_grid = sample(source)?;
    let c0 = sample(phantom_indicator)?;
    let c_true = gaussian_blur(n, &c0, PHANTOM_BLUR_SIGMA)?;
    let prob = EllipticProblem::new(n, g_grid.clone())?;
    let u_true = forward_solve(&prob, &c_true)?;
    Ok((prob, Phantom { c_true, u_true, g_grid }))
}

/// `c = (g + Δ_n u) / u`, entrywise.
pub fn naive_reconstruction(n: usize, u: &Vector, g_grid: &Vector) -> Result<Vector> {
    check_dim("naive reconstruction state", n * n, u.len())?;
    check_dim("naive reconstruction source", n * n, g_grid.len())?;
    if let Some((index, value)) = u.iter().enumerate().find(|(_, v)| v.abs() < 1e-300) {
        return Err(Error::DivisionBlowup { index, value: *value });
    }
    let neg_laplace = stencil_apply(n, &Vector::zeros(n * n), u)?;
    Vector::from_fn(n * n, |i| (g_grid[i] - neg_laplace[i]) / u[i])
}

/// `u + δ e/|e|` with `e` seeded standard normal and `δ = pct |u|`.
pub fn add_relative_noise(u_true: &Vector, pct: f64, seed: u64) -> Result<(Vector, f64)> {
    if !(pct >= 0.0 && pct.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {pct}"
        )));
    }
    if pct == 0.0 {
        return Ok((u_true.clone(), 0.0));
    }
    let delta = pct * u_true.norm();
    let mut stream = rng::seeded(seed);
    let e = loop {
        let e = rng::normal_vector(&mut stream, u_true.len());
        if e.norm() > 0.0 {
            break e;
        }
    };
    let mut noisy = u_true.clone();
    noisy.axpy(delta / e.norm(), &e)?;
    Ok((noisy, delta))
}

/// Writes `v` as `n` comma-separated rows of `n` values, grid row `j` on line `j`.
pub fn write_grid_csv<W: Write>(mut out: W, n: usize, v: &Vector) -> Result<()> {
    check_dim("grid output", n * n, v.len())?;
    for row in v.as_slice().chunks(n) {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a square grid written by [`write_grid_csv`]; returns `(n, values)`.
pub fn read_grid_csv<R: BufRead>(input: R) -> Result<(usize, Vector)> {
    let mut values = Vec::new();
    let mut width = None;
    for (row, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let parsed = parsed.map_err(|e| Error::InvalidParameter(format!("grid row {row}: {e}")))?;
        match width {
            None => width = Some(parsed.len()),
            Some(w) if w != parsed.len() => {
                return Err(Error::InvalidParameter(format!(
                    "grid row {row} has {} values, expected {w}",
                    parsed.len()
                )))
            }
            _ => {}
        }
        values.extend(parsed);
    }
    let n = width.unwrap_or(0);
    if n == 0 || values.len() != n * n {
        return Err(Error::InvalidParameter("grid is not square".into()));
    }
    Ok((n, Vector::new(values)?))
}
