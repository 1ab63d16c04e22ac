//! Orthonormal subspaces of a spectral cluster and their densities
//! `ρ^R = Σ_j ζ_j |g_j|²`.
//!
//! A subspace is stored as an `N × d` coefficient matrix `B` over the
//! normalized exponentials `e_k = (2π)^{-n/2} e^{ik·x}` of the cluster. The
//! density is kept as the `N × N` matrix `P = B diag(ζ) B*`, which does not
//! depend on the choice of orthonormal basis of `R`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents;
use crate::lattice::{count_band, SpectralBand, SpectralCluster, TorusConfig};
use crate::trig::{next_pow2, Grid, TrigPoly, MAX_GRID_POINTS};

/// Tolerance on `B*B = I`.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ClusterSubspace {
    cluster: SpectralCluster,
    coeffs: DMatrix<Complex64>,
}

impl ClusterSubspace {
    pub fn cluster(&self) -> &SpectralCluster {
        &self.cluster
    }

    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    /// `dim R`.
    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    /// Same span, basis rotated by a `d × d` unitary.
    pub fn rotated(&self, q: &DMatrix<Complex64>) -> Result<Self> {
        make_subspace(self.cluster.clone(), &self.coeffs * q)
    }

    /// Value of the `j`-th basis function at `x`.
    pub fn basis_value(&self, j: usize, x: &[f64]) -> Complex64 {
        let norm = self.cluster.config.eigenfunction_sq().sqrt();
        self.cluster
            .freqs
            .iter()
            .enumerate()
            .map(|(i, f)| self.coeffs[(i, j)] * plane_wave(&f.k, x))
            .sum::<Complex64>()
            * norm
    }
}

fn plane_wave(k: &[i64], x: &[f64]) -> Complex64 {
    let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
    Complex64::from_polar(1.0, phase)
}

/// Validates orthonormality of the columns of `b` and wraps it.
pub fn make_subspace(cluster: SpectralCluster, b: DMatrix<Complex64>) -> Result<ClusterSubspace> {
    let n_freq = cluster.len();
    if b.nrows() != n_freq {
        return Err(Error::Shape {
            expected: n_freq,
            got: b.nrows(),
        });
    }
    let d = b.ncols();
    if d == 0 || d > n_freq {
        return Err(Error::Validation(format!(
            "subspace dimension must be in 1..={n_freq}, got {d}"
        )));
    }
    let gram = b.adjoint() * &b;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (gram[(i, j)] - Complex64::new(target, 0.0)).norm();
            if dev > ORTHONORMAL_TOL {
                return Err(Error::Validation(format!(
                    "columns not orthonormal: (B*B)[{i},{j}] = {} deviates by {dev:.3e}",
                    gram[(i, j)]
                )));
            }
        }
    }
    Ok(ClusterSubspace { cluster, coeffs: b })
}

/// Span of the exponentials at the given cluster positions.
pub fn coordinate_subspace(cluster: SpectralCluster, indices: &[usize]) -> Result<ClusterSubspace> {
    let mut b = DMatrix::zeros(cluster.len(), indices.len());
    for (j, &i) in indices.iter().enumerate() {
        if i >= cluster.len() {
            return Err(Error::Validation(format!("index {i} outside cluster of size {}", cluster.len())));
        }
        b[(i, j)] = Complex64::new(1.0, 0.0);
    }
    make_subspace(cluster, b)
}

/// The whole cluster `U`.
pub fn full_subspace(cluster: SpectralCluster) -> Result<ClusterSubspace> {
    let idx: Vec<usize> = (0..cluster.len()).collect();
    coordinate_subspace(cluster, &idx)
}

/// Seeded complex Gaussian `rows × cols` matrix.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Orthonormal columns spanning the same space as `m` (Householder QR).
pub fn orthonormalize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let q = m.qr().q();
    // one re-orthogonalization pass keeps B*B = I well inside tolerance
    q.clone().qr().q()
}

/// Random `d`-dimensional subspace of the cluster from a seeded Gaussian
/// frame.
pub fn random_subspace(cluster: SpectralCluster, d: usize, seed: u64) -> Result<ClusterSubspace> {
    if d == 0 || d > cluster.len() {
        return Err(Error::Validation(format!(
            "subspace dimension must be in 1..={}, got {d}",
            cluster.len()
        )));
    }
    let b = orthonormalize(gaussian_matrix(cluster.len(), d, seed));
    make_subspace(cluster, b)
}

/// Seeded random `d × d` unitary.
pub fn random_unitary(d: usize, seed: u64) -> DMatrix<Complex64> {
    orthonormalize(gaussian_matrix(d, d, seed))
}

/// A weighted density `Σ_j ζ_j |g_j|²`.
#[derive(Debug, Clone)]
pub struct DensityFunction {
    config: TorusConfig,
    band: SpectralBand,
    freqs: Vec<Vec<i64>>,
    projector: DMatrix<Complex64>,
    basis: DMatrix<Complex64>,
    weights: Vec<Complex64>,
}

/// `P = B diag(ζ) B*` with real weights, `ζ ≡ 1` when absent.
pub fn density(subspace: &ClusterSubspace, weights: Option<&[f64]>) -> Result<DensityFunction> {
    let d = subspace.dim();
    let zeta: Vec<Complex64> = match weights {
        None => vec![Complex64::new(1.0, 0.0); d],
        Some(w) => {
            if w.len() != d {
                return Err(Error::Shape {
                    expected: d,
                    got: w.len(),
                });
            }
            if w.iter().any(|z| !z.is_finite()) {
                return Err(Error::Domain("weights must be finite".into()));
            }
            w.iter().map(|&z| Complex64::new(z, 0.0)).collect()
        }
    };
    density_complex(subspace, &zeta)
}

/// Density with complex weights; the result is complex-valued in general.
pub fn density_complex(subspace: &ClusterSubspace, zeta: &[Complex64]) -> Result<DensityFunction> {
    let d = subspace.dim();
    if zeta.len() != d {
        return Err(Error::Shape {
            expected: d,
            got: zeta.len(),
        });
    }
    let b = subspace.coeffs();
    let mut bz = b.clone();
    for (j, z) in zeta.iter().enumerate() {
        for i in 0..b.nrows() {
            bz[(i, j)] *= z;
        }
    }
    let projector = &bz * b.adjoint();
    let cluster = subspace.cluster();
    Ok(DensityFunction {
        config: cluster.config,
        band: cluster.band,
        freqs: cluster.freqs.iter().map(|f| f.k.clone()).collect(),
        projector,
        basis: b.clone(),
        weights: zeta.to_vec(),
    })
}

impl DensityFunction {
    pub fn config(&self) -> &TorusConfig {
        &self.config
    }

    pub fn projector(&self) -> &DMatrix<Complex64> {
        &self.projector
    }

    pub fn band(&self) -> &SpectralBand {
        &self.band
    }

    /// `Σ ζ_j`, which is also `∫ρ`.
    pub fn total_weight(&self) -> Complex64 {
        self.projector.trace()
    }

    /// Complex value of `(2π)^{-n} Σ_{k,k'} P_{kk'} e^{i(k−k')·x}`.
    pub fn eval_complex(&self, x: &[f64]) -> Complex64 {
        let v: Vec<Complex64> = self.freqs.iter().map(|k| plane_wave(k, x)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, vi) in v.iter().enumerate() {
            let row: Complex64 = v
                .iter()
                .enumerate()
                .map(|(j, vj)| self.projector[(i, j)] * vj.conj())
                .sum();
            acc += vi * row;
        }
        acc * self.config.eigenfunction_sq()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_complex(x).re
    }

    /// `Σ_j ζ_j |g_j(x)|²` summed basis function by basis function.
    pub fn eval_direct(&self, x: &[f64]) -> Complex64 {
        let v: Vec<Complex64> = self.freqs.iter().map(|k| plane_wave(k, x)).collect();
        let norm = self.config.eigenfunction_sq();
        (0..self.basis.ncols())
            .map(|j| {
                let g: Complex64 = v.iter().enumerate().map(|(i, vi)| self.basis[(i, j)] * vi).sum();
                self.weights[j] * g.norm_sqr() * norm
            })
            .sum()
    }

    /// Fourier coefficients on difference frequencies `k − k'`.
    pub fn fourier(&self) -> TrigPoly {
        let n = self.config.dim();
        let scale = self.config.eigenfunction_sq();
        let mut acc: HashMap<Vec<i64>, Complex64> = HashMap::new();
        for (i, ki) in self.freqs.iter().enumerate() {
            for (j, kj) in self.freqs.iter().enumerate() {
                let p = self.projector[(i, j)];
                if p.norm_sqr() == 0.0 {
                    continue;
                }
                let s: Vec<i64> = ki.iter().zip(kj).map(|(a, b)| a - b).collect();
                *acc.entry(s).or_default() += p * scale;
            }
        }
        let mut terms: Vec<_> = acc.into_iter().collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        TrigPoly::from_terms(n, terms).expect("difference frequencies have dimension n")
    }

    /// Per-axis grid size resolving the density's bandwidth `2(λ+ε)`.
    pub fn base_grid(&self) -> usize {
        next_pow2((4.0 * self.band.upper()).ceil() as usize + 1)
    }
}

/// Result of an `L^q` norm computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub q: f64,
    pub value: f64,
    /// Certified bracket for `q = ∞`; `value ± error_estimate` otherwise.
    pub lower: f64,
    pub upper: f64,
    pub error_estimate: f64,
    pub grid: usize,
    /// Whether the value is exact up to rounding.
    pub exact: bool,
}

/// Options for the supremum bracket.
#[derive(Debug, Clone, Copy)]
pub struct SupOptions {
    pub rel_tol: f64,
    /// Budget in term evaluations for the cell refinement.
    pub max_work: f64,
    /// Largest grid used for the global bound and the initial cells.
    pub max_grid_points: usize,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_work: 4e8,
            max_grid_points: 1 << 21,
        }
    }
}

fn is_even_integer(q: f64) -> bool {
    q.fract() == 0.0 && (q as i64) % 2 == 0
}

fn grid_integral(grid: &Grid, q: f64) -> f64 {
    let s: f64 = grid
        .values
        .par_iter()
        .map(|v| v.re.abs().powf(q))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    (s * grid.cell_volume()).powf(1.0 / q)
}

/// `‖ρ‖_{L^q}` on the torus, `q ∈ [1, ∞]` (`q` plays the role of `p/2`).
pub fn lp_norm(density: &DensityFunction, q: f64) -> Result<LpNorm> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::Domain(format!("L^q norm needs q >= 1, got {q}")));
    }
    let coeffs = density.fourier();
    if q.is_infinite() {
        return sup_bracket(density, &coeffs, SupOptions::default());
    }
    let n = density.config.dim();
    let bandwidth = coeffs.max_frequency().max(1) as usize;
    let base = density.base_grid().max(next_pow2(2 * bandwidth + 1));
    if is_even_integer(q) {
        // ρ^q has per-axis degree ≤ q·bandwidth: the rectangle rule is exact
        let g = next_pow2(q as usize * bandwidth + 1).max(base);
        let grid = coeffs.sample(g)?;
        let value = grid_integral(&grid, q);
        return Ok(LpNorm {
            q,
            value,
            lower: value,
            upper: value,
            error_estimate: 0.0,
            grid: g,
            exact: true,
        });
    }
    let fine_fits = (2 * base).checked_pow(n as u32).is_some_and(|t| t <= MAX_GRID_POINTS);
    let (coarse, fine) = if fine_fits { (base, 2 * base) } else { (base / 2, base) };
    let v_coarse = grid_integral(&coeffs.sample(coarse)?, q);
    let v_fine = grid_integral(&coeffs.sample(fine)?, q);
    let err = (v_fine - v_coarse).abs();
    Ok(LpNorm {
        q,
        value: v_fine,
        lower: v_fine - err,
        upper: v_fine + err,
        error_estimate: err,
        grid: fine,
        exact: false,
    })
}

/// Value, gradient and Hessian (row-major) of a real trigonometric
/// polynomial at `x`.
fn value_derivatives(terms: &[(Vec<f64>, Complex64)], x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut val = 0.0;
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    for (s, c) in terms {
        let phase: f64 = s.iter().zip(x).map(|(si, xi)| si * xi).sum();
        let e = c * Complex64::from_polar(1.0, phase);
        val += e.re;
        for a in 0..n {
            grad[a] -= s[a] * e.im;
            for b in a..n {
                hess[a * n + b] -= s[a] * s[b] * e.re;
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            hess[a * n + b] = hess[b * n + a];
        }
    }
    (val, grad, hess)
}

/// Eigen-decomposition of a small symmetric matrix: (values, vectors as
/// columns, row-major).
fn sym_eigen(n: usize, h: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = DMatrix::from_row_slice(n, n, h);
    let e = m.symmetric_eigen();
    let vecs: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| e.eigenvectors[(i, j)]).collect();
    (e.eigenvalues.iter().copied().collect(), vecs)
}

/// Upper bound of `g·δ + ½ δᵀHδ` over `|δ| ≤ r`, taken over the enclosing
/// box in the eigenbasis of `H`.
fn quadratic_box_max(n: usize, g: &[f64], h: &[f64], r: f64) -> f64 {
    let (vals, vecs) = if n == 2 {
        let (a, b, d) = (h[0], h[1], h[3]);
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let (l1, l2) = (mid + rad, mid - rad);
        // eigenvector for l1
        let (vx, vy) = if b.abs() > 1e-300 {
            (l1 - d, b)
        } else if a >= d {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let nv = (vx * vx + vy * vy).sqrt();
        let (vx, vy) = (vx / nv, vy / nv);
        (vec![l1, l2], vec![vx, -vy, vy, vx])
    } else {
        sym_eigen(n, h)
    };
    let mut total = 0.0;
    for (k, &mu) in vals.iter().enumerate() {
        let gk: f64 = (0..n).map(|i| vecs[i * n + k] * g[i]).sum::<f64>().abs();
        total += if mu < 0.0 && gk <= -mu * r {
            gk * gk / (-2.0 * mu)
        } else {
            gk * r + 0.5 * mu * r * r
        };
    }
    total
}

/// Certified bracket for `sup_x ρ(x)`.
///
/// A global bound `U ≥ sup|ρ|` comes from the grid maximum: at an extremum
/// the gradient vanishes and the second directional derivative is at most
/// `Ω² sup|ρ|` (`Ω` the largest frequency), so `U = max|ρ(x_j)|/(1 − ½Ω²r²)`.
/// Cells are then bounded by the local quadratic model plus a third-order
/// remainder `min(Σ|s|³|ρ̂_s|, Ω³U) r³/6`, and the worst cell is bisected
/// until the bracket closes or the work budget runs out.
fn sup_bracket(density: &DensityFunction, coeffs: &TrigPoly, opts: SupOptions) -> Result<LpNorm> {
    let n = density.config.dim();
    let terms: Vec<(Vec<f64>, Complex64)> = coeffs
        .terms()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, v)| (k.iter().map(|&x| x as f64).collect(), *v))
        .collect();
    let norm_of = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let omega = terms.iter().map(|(s, _)| norm_of(s)).fold(0.0, f64::max);
    let base = density.base_grid().max(next_pow2(2 * coeffs.max_frequency().max(1) as usize + 1));
    if omega == 0.0 {
        let v = terms.first().map_or(0.0, |t| t.1.re);
        return Ok(LpNorm {
            q: f64::INFINITY,
            value: v,
            lower: v,
            upper: v,
            error_estimate: 0.0,
            grid: base,
            exact: true,
        });
    }
    let abs_sum: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
    let h2: f64 = terms.iter().map(|(s, c)| norm_of(s).powi(2) * c.norm()).sum();
    let t3: f64 = terms.iter().map(|(s, c)| norm_of(s).powi(3) * c.norm()).sum();
    let half_diag = |g: usize| (n as f64).sqrt() * std::f64::consts::PI / g as f64;
    let fits = |g: usize| g.checked_pow(n as u32).is_some_and(|t| t <= opts.max_grid_points);

    // global bound on sup|ρ|
    let mut g = base;
    while 0.5 * (omega * half_diag(g)).powi(2) > 0.125 && fits(2 * g) {
        g *= 2;
    }
    let values = coeffs.sample(g)?;
    let c2 = 0.5 * (omega * half_diag(g)).powi(2);
    let max_abs = values.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
    let u = if c2 < 1.0 { (max_abs / (1.0 - c2)).min(abs_sum) } else { abs_sum };
    let h2 = h2.min(omega * omega * u);
    let t3 = t3.min(omega.powi(3) * u);

    let bound = |val: f64, grad: &[f64], hess: &[f64], r: f64| {
        let first = norm_of(grad) * r + 0.5 * h2 * r * r;
        let quad = quadratic_box_max(n, grad, hess, r) + t3 * r * r * r / 6.0;
        val + first.min(quad)
    };

    // derivative grids on the same points
    let mut lower = values.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let sample_re = |f: &dyn Fn(&[f64], Complex64) -> Complex64| -> Result<Vec<f64>> {
        let mut p = TrigPoly::new(n);
        for (s, c) in &terms {
            p.add_term(s.iter().map(|&x| x as i64).collect(), f(s, *c))?;
        }
        Ok(p.sample(g)?.values.into_iter().map(|v| v.re).collect())
    };
    let mut grads = Vec::with_capacity(n);
    for a in 0..n {
        grads.push(sample_re(&|s, c| c * Complex64::new(0.0, s[a]))?);
    }
    let mut hessians = vec![Vec::new(); n * n];
    for a in 0..n {
        for b in a..n {
            hessians[a * n + b] = sample_re(&|s, c| c * (-s[a] * s[b]))?;
        }
    }
    let half0 = std::f64::consts::PI / g as f64;
    let r0 = half_diag(g);
    let initial: Vec<(usize, f64)> = (0..values.values.len())
        .into_par_iter()
        .filter_map(|idx| {
            let grad: Vec<f64> = grads.iter().map(|gr| gr[idx]).collect();
            let mut hess = vec![0.0; n * n];
            for a in 0..n {
                for b in a..n {
                    hess[a * n + b] = hessians[a * n + b][idx];
                    hess[b * n + a] = hess[a * n + b];
                }
            }
            let ub = bound(values.values[idx].re, &grad, &hess, r0);
            (ub > lower).then_some((idx, ub))
        })
        .collect();
    drop(grads);
    drop(hessians);

    // (bound, center, half side) in a max-heap on the bound
    struct Cell(f64, Vec<f64>, f64);
    impl PartialEq for Cell {
        fn eq(&self, o: &Self) -> bool {
            self.0.total_cmp(&o.0).is_eq()
        }
    }
    impl Eq for Cell {}
    impl PartialOrd for Cell {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Cell {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0)
        }
    }
    let mut heap: std::collections::BinaryHeap<Cell> = initial
        .into_iter()
        .map(|(idx, ub)| Cell(ub, values.point(idx), half0))
        .collect();
    drop(values);

    let tol = |lo: f64| opts.rel_tol * lo.abs().max(f64::MIN_POSITIVE);
    let per_eval = terms.len().max(1) as f64;
    let mut work = 0.0;
    loop {
        while heap.peek().is_some_and(|c| c.0 <= lower) {
            heap.pop();
        }
        let upper = heap.peek().map_or(lower, |c| c.0).max(lower).min(u);
        if upper - lower <= tol(lower) || work >= opts.max_work || heap.is_empty() {
            return Ok(LpNorm {
                q: f64::INFINITY,
                value: lower,
                lower,
                upper,
                error_estimate: upper - lower,
                grid: g,
                exact: false,
            });
        }
        let Cell(_, center, half) = heap.pop().expect("non-empty");
        // Newton step from the center sharpens the lower bound
        let (_, grad, hess) = value_derivatives(&terms, &center);
        let h = DMatrix::from_row_slice(n, n, &hess);
        if let Some(step) = h.lu().solve(&nalgebra::DVector::from_column_slice(&grad)) {
            let xn: Vec<f64> = center.iter().zip(step.iter()).map(|(c, d)| c - d).collect();
            if norm_of(&step.iter().copied().collect::<Vec<_>>()) <= 2.0 * half * (n as f64).sqrt() {
                lower = lower.max(value_derivatives(&terms, &xn).0);
            }
        }
        work += 2.0 * per_eval;
        let child_half = half / 2.0;
        let r = child_half * (n as f64).sqrt();
        for mask in 0..(1usize << n) {
            let c: Vec<f64> = center
                .iter()
                .enumerate()
                .map(|(i, &x)| x + if mask >> i & 1 == 1 { child_half } else { -child_half })
                .collect();
            let (val, grad, hess) = value_derivatives(&terms, &c);
            work += per_eval;
            lower = lower.max(val);
            let ub = bound(val, &grad, &hess, r);
            if ub > lower {
                heap.push(Cell(ub, c, child_half));
            }
        }
    }
}

/// How `ε` is chosen as a function of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsRule {
    Fixed(f64),
    /// `λ^{-(n-1)/(n+1)}`.
    Shrink,
    /// `λ^{-power}`.
    Power(f64),
}

impl EpsRule {
    /// Width for `λ`; the rate-based rules are floored at `2/λ` and capped
    /// at 1.
    pub fn eval(&self, n: usize, lambda: f64) -> Result<f64> {
        let floor = |e: f64| e.max(2.0 / lambda).min(1.0);
        match *self {
            EpsRule::Fixed(e) => Ok(e),
            EpsRule::Shrink => exponents::shrink_rate(n, lambda).map(floor),
            EpsRule::Power(p) => Ok(floor(lambda.powf(-p))),
        }
    }
}

impl std::str::FromStr for EpsRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "shrink" {
            return Ok(EpsRule::Shrink);
        }
        if let Some(p) = s.strip_prefix("power:") {
            return p
                .parse()
                .map(EpsRule::Power)
                .map_err(|_| Error::InvalidConfig(format!("bad power in eps rule '{s}'")));
        }
        s.parse()
            .map(EpsRule::Fixed)
            .map_err(|_| Error::InvalidConfig(format!("eps rule must be a number, 'shrink' or 'power:<x>', got '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupDensityRatio {
    pub lambda: f64,
    pub epsilon: f64,
    pub count: u64,
    /// `sup ρ^U / (λ^{n-1} ε)`.
    pub ratio: f64,
    pub empty: bool,
}

/// Full-cluster sup-density over `λ^{n-1} ε`; on the torus
/// `sup ρ^U = N/(2π)^n`.
pub fn sup_density_ratio(cfg: &TorusConfig, lambda: f64, rule: EpsRule) -> Result<SupDensityRatio> {
    if !(lambda >= 2.0) {
        return Err(Error::Domain(format!("lambda must be >= 2, got {lambda}")));
    }
    let epsilon = rule.eval(cfg.dim(), lambda)?;
    let band = SpectralBand::new(lambda, epsilon)?;
    let count = count_band(cfg, &band);
    let ratio = count as f64 / (cfg.volume() * lambda.powi(cfg.dim() as i32 - 1) * epsilon);
    Ok(SupDensityRatio {
        lambda,
        epsilon,
        count,
        ratio,
        empty: count == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_band;
    use std::f64::consts::PI;

    fn cluster(n: usize, lambda: f64, eps: f64) -> SpectralCluster {
        enumerate_band(&TorusConfig::new(n).unwrap(), &SpectralBand::new(lambda, eps).unwrap()).unwrap()
    }

    #[test]
    fn full_cluster_density_is_constant() {
        let c = cluster(2, 5.0, 0.1);
        let u = full_subspace(c).unwrap();
        let rho = density(&u, None).unwrap();
        let expected = 20.0 / (2.0 * PI).powi(2);
        assert!((expected - 0.506_606).abs() < 1e-6);
        for x in [[0.0, 0.0], [1.0, 2.0], [3.3, -0.7]] {
            assert!((rho.eval(&x) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn non_orthonormal_rejected() {
        let c = cluster(2, 5.0, 0.1);
        let mut b = DMatrix::zeros(c.len(), 2);
        b[(0, 0)] = Complex64::new(1.0, 0.0);
        b[(0, 1)] = Complex64::new(1e-6, 0.0);
        b[(1, 1)] = Complex64::new(1.0, 0.0);
        let err = make_subspace(c, b).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("[0,1]") || msg.contains("[1,0]")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unitary_full_rank_accepted() {
        let c = cluster(2, 5.0, 0.1);
        let n = c.len();
        let s = make_subspace(c, random_unitary(n, 9)).unwrap();
        assert_eq!(s.dim(), n);
    }

    #[test]
    fn random_frame_is_orthonormal() {
        let c = cluster(3, 4.0, 0.5);
        let s = random_subspace(c, 7, 42).unwrap();
        let g = s.coeffs().adjoint() * s.coeffs();
        let dev = (g - DMatrix::identity(7, 7)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn two_mode_interference() {
        let c = cluster(2, 5.0, 0.1);
        let i = c.index_of(&[3, 4]).unwrap();
        let j = c.index_of(&[5, 0]).unwrap();
        let mut b = DMatrix::zeros(c.len(), 1);
        b[(i, 0)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        b[(j, 0)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = make_subspace(c, b).unwrap();
        let rho = density(&s, None).unwrap();
        let vol = (2.0 * PI).powi(2);
        let x = [0.4, -1.1];
        let expected = (1.0 + ((3.0_f64 - 5.0) * x[0] + 4.0 * x[1]).cos()) / vol;
        assert!((rho.eval(&x) - expected).abs() < 1e-14);
        let l1 = lp_norm(&rho, 1.0).unwrap();
        assert!((l1.value - 1.0).abs() < 1e-10);
        let sup = lp_norm(&rho, f64::INFINITY).unwrap();
        let true_max = 2.0 / vol;
        assert!(sup.lower <= true_max + 1e-15 && true_max <= sup.upper + 1e-15);
        assert!(sup.upper - sup.lower <= 1e-6, "{sup:?}");
    }

    #[test]
    fn sup_bracket_contains_dense_maximum() {
        let c = cluster(2, 20.0, 0.3);
        for (d, seed) in [(1, 3u64), (4, 9)] {
            let rho = density(&random_subspace(c.clone(), d, seed).unwrap(), None).unwrap();
            let sup = lp_norm(&rho, f64::INFINITY).unwrap();
            let m = 400;
            let mut dense: f64 = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let x = [2.0 * PI * i as f64 / m as f64, 2.0 * PI * j as f64 / m as f64];
                    dense = dense.max(rho.eval_direct(&x).re);
                }
            }
            assert!(dense <= sup.upper * (1.0 + 1e-12), "{dense} {sup:?}");
            assert!(sup.lower >= dense * (1.0 - 1e-3), "{dense} {sup:?}");
            assert!(sup.upper - sup.lower <= 1e-6 * sup.lower, "{sup:?}");
        }
    }

    #[test]
    fn constant_density_norms() {
        let c = cluster(2, 5.0, 0.1);
        let rho = density(&full_subspace(c).unwrap(), None).unwrap();
        let cst = 20.0 / (2.0 * PI).powi(2);
        for q in [1.0, 2.0, 3.0, 4.5] {
            let v = lp_norm(&rho, q).unwrap();
            assert!((v.value - cst * (2.0 * PI).powf(2.0 / q)).abs() < 1e-10, "q={q}");
        }
        assert!((lp_norm(&rho, f64::INFINITY).unwrap().value - cst).abs() < 1e-12);
        assert!(matches!(lp_norm(&rho, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn weights_shape_checked() {
        let c = cluster(2, 5.0, 0.1);
        let s = random_subspace(c, 3, 1).unwrap();
        assert!(matches!(density(&s, Some(&[1.0, 2.0])), Err(Error::Shape { .. })));
    }

    #[test]
    fn weighted_density_matches_direct_sum() {
        let c = cluster(2, 7.0, 0.5);
        let s = random_subspace(c, 4, 3).unwrap();
        let rho = density(&s, Some(&[0.5, -1.0, 2.0, 0.25])).unwrap();
        for x in [[0.1, 0.2], [2.0, 5.0]] {
            assert!((rho.eval_complex(&x) - rho.eval_direct(&x)).norm() < 1e-10);
        }
        assert!((rho.total_weight().re - 1.75).abs() < 1e-12);
    }

    #[test]
    fn sup_density_ratio_examples() {
        let cfg = TorusConfig::new(2).unwrap();
        let r = sup_density_ratio(&cfg, 1000.0, EpsRule::Shrink).unwrap();
        let band = SpectralBand::new(1000.0, r.epsilon).unwrap();
        let n = count_band(&cfg, &band);
        assert!((r.epsilon - 0.1).abs() < 1e-12);
        assert!((r.ratio - n as f64 / ((2.0 * PI).powi(2) * 1000.0 * r.epsilon)).abs() < 1e-12);
        let e = sup_density_ratio(&cfg, 2.1, EpsRule::Fixed(0.05)).unwrap();
        assert!(e.empty && e.ratio == 0.0);
        let narrow = sup_density_ratio(&cfg, 50.0, EpsRule::Fixed(0.1)).unwrap();
        let wide = sup_density_ratio(&cfg, 50.0, EpsRule::Fixed(0.2)).unwrap();
        assert!(wide.count >= narrow.count);
    }

    #[test]
    fn eps_rule_parsing() {
        assert_eq!("shrink".parse::<EpsRule>().unwrap(), EpsRule::Shrink);
        assert_eq!("0.25".parse::<EpsRule>().unwrap(), EpsRule::Fixed(0.25));
        assert_eq!("power:0.5".parse::<EpsRule>().unwrap(), EpsRule::Power(0.5));
        assert!("bogus".parse::<EpsRule>().is_err());
    }
}
