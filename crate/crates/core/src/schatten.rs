//! Schatten norms of `h χ h̄` for a band projector `χ` and a trigonometric
//! polynomial `h`.
//!
//! With `T = h χ` restricted to the cluster, `T*T` is the Gram matrix
//! `G_{kk'} = ⟨h e_{k'}, h e_k⟩ = w_{k−k'}`, where `w` are the Fourier
//! coefficients of `|h|²`, and `h χ h̄ = TT*` has the same nonzero spectrum.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterSubspace;
use crate::error::{Error, Result};
use crate::exponents::{self, Exponent};
use crate::lattice::{count_band, SpectralBand, SpectralCluster, TorusConfig};
use crate::mollifier::Mollifier;
use crate::trig::{next_pow2, TrigPoly, MAX_GRID_POINTS};

/// Largest cluster for which a dense eigensolve is attempted.
pub const DEFAULT_EIGEN_CAP: usize = 4000;

/// `h(x) = Σ_q c_q e^{iq·x}` with cached `|h|²` coefficients.
#[derive(Debug, Clone)]
pub struct TestFunction {
    poly: TrigPoly,
    abs_sq: TrigPoly,
    seed: Option<u64>,
}

impl TestFunction {
    pub fn new(poly: TrigPoly) -> Result<Self> {
        if poly.is_empty() {
            return Err(Error::Validation("test function has no Fourier terms".into()));
        }
        let abs_sq = poly.abs_sq();
        Ok(Self {
            poly,
            abs_sq,
            seed: None,
        })
    }

    /// `h ≡ 1`.
    pub fn constant(n: usize) -> Self {
        let p = TrigPoly::from_terms(n, [(vec![0; n], Complex64::new(1.0, 0.0))]).expect("matching dimension");
        Self::new(p).expect("nonempty")
    }

    /// `modes` distinct frequencies in `[-max_freq, max_freq]^n` with complex
    /// Gaussian coefficients.
    pub fn random(n: usize, modes: usize, max_freq: i64, seed: u64) -> Result<Self> {
        let side = (2 * max_freq + 1) as usize;
        if modes == 0 || side.checked_pow(n as u32).is_none_or(|t| t < modes) {
            return Err(Error::InvalidConfig(format!(
                "cannot place {modes} distinct modes in [-{max_freq}, {max_freq}]^{n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut poly = TrigPoly::new(n);
        while poly.len() < modes {
            let q: Vec<i64> = (0..n).map(|_| rng.random_range(-max_freq..=max_freq)).collect();
            if poly.coeff(&q) != Complex64::default() {
                continue;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            poly.add_term(q, Complex64::new(re, im))?;
        }
        let mut h = Self::new(poly)?;
        h.seed = Some(seed);
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn poly(&self) -> &TrigPoly {
        &self.poly
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.poly.eval(x)
    }

    pub fn abs_sq_at(&self, x: &[f64]) -> f64 {
        self.poly.eval(x).norm_sqr()
    }

    /// Fourier coefficients `w_s` of `|h|²`.
    pub fn abs_sq_coeffs(&self) -> &TrigPoly {
        &self.abs_sq
    }

    /// `‖h‖₂² = (2π)^n Σ |c_q|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.dim() as i32) * self.poly.coeff_norm_sq()
    }

    /// `‖h‖₂²` by the rectangle rule on a grid resolving `|h|²`.
    pub fn l2_norm_sq_grid(&self) -> Result<f64> {
        let g = next_pow2(2 * self.poly.max_frequency() as usize + 1);
        let grid = self.poly.sample(g)?;
        Ok(grid.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume())
    }

    /// `(‖h‖_q, error estimate)` from two nested grids.
    pub fn lp_norm(&self, q: f64) -> Result<(f64, f64)> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("L^q norm needs q >= 1, got {q}")));
        }
        let n = self.dim();
        let base = next_pow2(8 * (2 * self.poly.max_frequency() as usize + 1));
        let fine_fits = (2 * base).checked_pow(n as u32).is_some_and(|t| t <= MAX_GRID_POINTS);
        let (coarse, fine) = if fine_fits { (base, 2 * base) } else { (base / 2, base) };
        let norm = |g: usize| -> Result<f64> {
            let grid = self.poly.sample(g)?;
            if q.is_infinite() {
                return Ok(grid.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
            let s: f64 = grid.values.iter().map(|v| v.norm().powf(q)).sum();
            Ok((s * grid.cell_volume()).powf(1.0 / q))
        };
        let (a, b) = (norm(coarse)?, norm(fine)?);
        Ok((b, (a - b).abs()))
    }
}

/// `G = T*T` over the cluster's exponentials.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    cluster: SpectralCluster,
    matrix: DMatrix<Complex64>,
    h_l2_sq: f64,
    eigen: OnceLock<std::result::Result<Vec<f64>, String>>,
}

/// Assembles `G` with the default size cap.
pub fn gram_matrix(cluster: &SpectralCluster, h: &TestFunction) -> Result<GramMatrix> {
    gram_matrix_with_cap(cluster, h, DEFAULT_EIGEN_CAP)
}

pub fn gram_matrix_with_cap(cluster: &SpectralCluster, h: &TestFunction, cap: usize) -> Result<GramMatrix> {
    if h.dim() != cluster.dim() {
        return Err(Error::Shape {
            expected: cluster.dim(),
            got: h.dim(),
        });
    }
    let n = cluster.len();
    if n == 0 {
        return Err(Error::Validation("cluster is empty".into()));
    }
    if n > cap {
        return Err(Error::Capacity(format!(
            "cluster has {n} frequencies, dense Gram cap is {cap}; only trace and Frobenius norms are available"
        )));
    }
    let w = h.abs_sq_coeffs();
    let freqs = &cluster.freqs;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut diff = vec![0i64; cluster.dim()];
            (0..n)
                .map(|j| {
                    for (d, (a, b)) in diff.iter_mut().zip(freqs[i].k.iter().zip(&freqs[j].k)) {
                        *d = a - b;
                    }
                    w.coeff(&diff)
                })
                .collect()
        })
        .collect();
    let mut matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    // exact Hermitian symmetry and a real diagonal
    for i in 0..n {
        matrix[(i, i)] = Complex64::new(matrix[(i, i)].re, 0.0);
        for j in 0..i {
            matrix[(i, j)] = matrix[(j, i)].conj();
        }
    }
    Ok(GramMatrix {
        cluster: cluster.clone(),
        matrix,
        h_l2_sq: h.l2_norm_sq(),
        eigen: OnceLock::new(),
    })
}

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn cluster(&self) -> &SpectralCluster {
        &self.cluster
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|v| v.re).sum()
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        let r = self.eigen.get_or_init(|| {
            let n = self.matrix.nrows();
            match self.matrix.clone().try_symmetric_eigen(1e-15, 1000 * n.max(10)) {
                Some(e) => {
                    let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
                    v.sort_by(|a, b| b.total_cmp(a));
                    Ok(v)
                }
                None => Err(format!("Hermitian eigensolver did not converge for N={n}")),
            }
        });
        match r {
            Ok(v) => Ok(v),
            Err(msg) => Err(Error::Numeric(msg.clone())),
        }
    }

    /// Unit-norm eigenvector of the largest eigenvalue.
    pub fn top_eigenvector(&self) -> Result<(f64, Vec<Complex64>)> {
        let n = self.matrix.nrows();
        let e = self
            .matrix
            .clone()
            .try_symmetric_eigen(1e-15, 1000 * n.max(10))
            .ok_or_else(|| Error::Numeric(format!("Hermitian eigensolver did not converge for N={n}")))?;
        let (idx, &val) = e
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        Ok((val, e.eigenvectors.column(idx).iter().copied().collect()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchattenReport {
    /// `f64::INFINITY` for the operator norm.
    pub alpha: f64,
    pub norm: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub n: usize,
    pub cluster_size: usize,
    /// Right-hand side of the matching bound, when one applies.
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

/// `(Σ μ_i^α)^{1/α}` over the eigenvalues of `G`, plus the matching bound:
/// `λ^{n−1} ε ‖h‖₂²` at `α = 1`, `λ^{(n−1)/(n+1)} ‖h‖²_{L^{n+1}}` at `α = n+1`.
pub fn schatten_norm(g: &GramMatrix, h: &TestFunction, alpha: f64) -> Result<SchattenReport> {
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!("Schatten exponent must be >= 1, got {alpha}")));
    }
    let eig = g.eigenvalues()?;
    let top = eig.first().copied().unwrap_or(0.0).max(0.0);
    let norm = if alpha.is_infinite() {
        top
    } else if top == 0.0 {
        0.0
    } else {
        let s: f64 = eig.iter().map(|&v| (v.max(0.0) / top).powf(alpha)).sum();
        top * s.powf(1.0 / alpha)
    };
    let band = g.cluster.band;
    let n = g.cluster.dim();
    let (lambda, eps) = (band.lambda(), band.epsilon());
    let bound = if alpha == 1.0 {
        Some(lambda.powi(n as i32 - 1) * eps * g.h_l2_sq)
    } else if alpha == (n + 1) as f64 {
        let (lq, _) = h.lp_norm((n + 1) as f64)?;
        Some(lambda.powf((n as f64 - 1.0) / (n as f64 + 1.0)) * lq * lq)
    } else {
        None
    };
    Ok(SchattenReport {
        alpha,
        norm,
        lambda,
        epsilon: eps,
        n,
        cluster_size: g.cluster.len(),
        bound,
        ratio: bound.map(|b| norm / b),
    })
}

/// `‖h χ h̄‖_{S¹} = N w_0` without assembling `G`.
pub fn trace_norm(cluster: &SpectralCluster, h: &TestFunction) -> f64 {
    cluster.len() as f64 * h.abs_sq_coeffs().coeff(&vec![0; h.dim()]).re
}

/// `‖h χ h̄‖_{S²} = ‖G‖_F` by streaming over pairs, for clusters past the cap.
pub fn frobenius_norm(cluster: &SpectralCluster, h: &TestFunction) -> f64 {
    let w = h.abs_sq_coeffs();
    let freqs = &cluster.freqs;
    let s: f64 = (0..freqs.len())
        .into_par_iter()
        .map(|i| {
            let mut diff = vec![0i64; cluster.dim()];
            let mut acc = 0.0;
            for f in freqs {
                for (d, (a, b)) in diff.iter_mut().zip(f.k.iter().zip(&freqs[i].k)) {
                    *d = a - b;
                }
                acc += w.coeff(&diff).norm_sqr();
            }
            acc
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    s.sqrt()
}

/// Trace norm over `(ελ^{n−1} + (λ/ε)^{(n−1)/2}) ‖h‖₂²`. On the torus the
/// trace norm is `(2π)^{-n} N ‖h‖₂²`, so the ratio is a lattice count.
pub fn trace_bound_ratio(cfg: &TorusConfig, lambda: f64, eps: f64, h: &TestFunction) -> Result<f64> {
    let band = SpectralBand::new(lambda, eps)?;
    if h.dim() != cfg.dim() {
        return Err(Error::Shape {
            expected: cfg.dim(),
            got: h.dim(),
        });
    }
    let n = cfg.dim() as f64;
    let count = count_band(cfg, &band) as f64;
    let trace = count * h.abs_sq_coeffs().coeff(&vec![0; cfg.dim()]).re;
    let bound = eps * lambda.powf(n - 1.0) + (lambda / eps).powf((n - 1.0) / 2.0);
    Ok(trace / (bound * h.l2_norm_sq()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub alpha: f64,
    pub alpha_conj: f64,
    /// `Σ_j |ζ_j| ∫ |g_j|² |h|²`.
    pub lhs: f64,
    /// `‖h χ h̄‖_{S^{α'}} ‖ζ‖_{ℓ^α}`.
    pub rhs: f64,
    pub slack: f64,
}

fn lp_seq(v: &[f64], a: f64) -> f64 {
    if a.is_infinite() {
        v.iter().map(|x| x.abs()).fold(0.0, f64::max)
    } else {
        v.iter().map(|x| x.abs().powf(a)).sum::<f64>().powf(1.0 / a)
    }
}

/// Trace duality `Σ ζ_j ∫|g_j|²|h|² ≤ ‖h χ h̄‖_{S^{α'}} ‖ζ‖_{ℓ^α}` with
/// `α = α(p)` and `χ` the projector of the whole cluster.
pub fn dual_pairing_check(sub: &ClusterSubspace, zeta: &[f64], h: &TestFunction, p: Exponent) -> Result<DualityReport> {
    let d = sub.dim();
    if zeta.len() != d {
        return Err(Error::Shape {
            expected: d,
            got: zeta.len(),
        });
    }
    let cluster = sub.cluster();
    let n = cluster.dim();
    if h.dim() != n {
        return Err(Error::Shape { expected: n, got: h.dim() });
    }
    let alpha = exponents::alpha(n, p)?;
    let alpha_conj = exponents::conjugate(alpha);

    // ∫ |g_j|² |h|² by the rectangle rule on a grid resolving the product
    let kmax = cluster
        .freqs
        .iter()
        .flat_map(|f| f.k.iter().map(|c| c.abs()))
        .max()
        .unwrap_or(0);
    let g = next_pow2(2 * (kmax + h.poly().max_frequency()) as usize + 1);
    let h_grid = h.poly().sample(g)?;
    let norm = cluster.config.eigenfunction_sq().sqrt();
    let b = sub.coeffs();
    let mut lhs = 0.0;
    for (j, z) in zeta.iter().enumerate() {
        if *z == 0.0 {
            continue;
        }
        let terms = cluster
            .freqs
            .iter()
            .enumerate()
            .map(|(i, f)| (f.k.clone(), b[(i, j)] * norm));
        let gj = TrigPoly::from_terms(n, terms)?.sample(g)?;
        let integral: f64 = gj
            .values
            .iter()
            .zip(&h_grid.values)
            .map(|(a, hv)| a.norm_sqr() * hv.norm_sqr())
            .sum::<f64>()
            * gj.cell_volume();
        lhs += z.abs() * integral;
    }

    let gram = gram_matrix(cluster, h)?;
    let s_norm = schatten_norm(&gram, h, alpha_conj)?.norm;
    let rhs = s_norm * lp_seq(zeta, alpha);
    Ok(DualityReport {
        alpha,
        alpha_conj,
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitBandReport {
    pub lambda: f64,
    pub epsilon: f64,
    /// `‖h b(ε^{-1}(√−Δ − λ)) h̄‖_{S¹}`.
    pub lhs: f64,
    /// `Σ_l (1 + |l−λ|/ε)^{-2} ‖h χ_l h̄‖_{S¹}`, `χ_l` the unit band `[l, l+1)`.
    pub rhs: f64,
    /// `lhs / rhs`.
    pub fitted_c: f64,
    /// Unit bands summed.
    pub bands: usize,
}

/// Trace-norm form of `h b(·) h̄ ≤ C h (1+ε^{-1}|√−Δ−λ|)^{-2} h̄`.
pub fn unit_band_chain_check(cfg: &TorusConfig, lambda: f64, eps: f64, m: &Mollifier, h: &TestFunction) -> Result<UnitBandReport> {
    let radius = m.decay_radius(1e-16_f64.sqrt());
    unit_band_chain_check_with(cfg, lambda, eps, radius, |t| m.b(t), h)
}

/// As [`unit_band_chain_check`] for an arbitrary profile negligible past `radius`.
pub fn unit_band_chain_check_with<F: Fn(f64) -> f64 + Sync>(
    cfg: &TorusConfig,
    lambda: f64,
    eps: f64,
    radius: f64,
    profile: F,
    h: &TestFunction,
) -> Result<UnitBandReport> {
    SpectralBand::new(lambda, eps)?;
    let w0 = h.abs_sq_coeffs().coeff(&vec![0; cfg.dim()]).re;
    let diag = crate::kernels::mollified_diagonal_with(cfg, lambda, eps, radius, &profile)?;
    // trace of h f(√−Δ) h̄ = w_0 Σ_k f(|k|) = w_0 (2π)^n · diagonal
    let lhs = w0 * diag.value * cfg.volume();
    let l_max = (lambda + radius * eps).ceil() as u64;
    let rhs: f64 = (0..=l_max)
        .into_par_iter()
        .map(|l| {
            let l = l as f64;
            let count = count_band(cfg, &SpectralBand::new(l, 1.0).expect("unit band")) as f64;
            (1.0 + (l - lambda).abs() / eps).powi(-2) * count * w0
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(UnitBandReport {
        lambda,
        epsilon: eps,
        lhs,
        rhs,
        fitted_c: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        bands: l_max as usize + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{coordinate_subspace, random_subspace};
    use crate::lattice::enumerate_band;
    use crate::mollifier::default_mollifier;
    use std::f64::consts::PI;

    fn cluster(n: usize, lambda: f64, eps: f64) -> SpectralCluster {
        enumerate_band(&TorusConfig::new(n).unwrap(), &SpectralBand::new(lambda, eps).unwrap()).unwrap()
    }

    #[test]
    fn constant_and_unimodular_give_identity() {
        let c = cluster(2, 5.0, 0.1);
        let one = TestFunction::constant(2);
        let g = gram_matrix(&c, &one).unwrap();
        let scale = (2.0 * PI).powi(-2);
        // |h|² = 1 has w_0 = 1, so G = I
        for i in 0..c.len() {
            for j in 0..c.len() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g.matrix()[(i, j)] - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        }
        assert!((schatten_norm(&g, &one, 1.0).unwrap().norm - 20.0).abs() < 1e-12);
        let shift = TestFunction::new(TrigPoly::from_terms(2, [(vec![1, 0], Complex64::new(1.0, 0.0))]).unwrap()).unwrap();
        let g2 = gram_matrix(&c, &shift).unwrap();
        assert!((g2.matrix() - g.matrix()).iter().all(|v| v.norm() < 1e-15));
        assert!((one.l2_norm_sq() * scale - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        // cluster {(1,0), (0,1)} and h = 1 + c e^{i(1,-1)·x}
        let c = cluster(2, 1.0, 0.1);
        let sub = coordinate_subspace(c.clone(), &[c.index_of(&[0, 1]).unwrap(), c.index_of(&[1, 0]).unwrap()]).unwrap();
        let coeff = Complex64::new(0.3, 0.4);
        let h = TestFunction::new(
            TrigPoly::from_terms(2, [(vec![0, 0], Complex64::new(1.0, 0.0)), (vec![1, -1], coeff)]).unwrap(),
        )
        .unwrap();
        let g = gram_matrix(&c, &h).unwrap();
        let eig = g.eigenvalues().unwrap();
        // (0,1)~(1,0) and (-1,0)~(0,-1) couple through w_{±(1,-1)}
        let w0 = 1.0 + coeff.norm_sqr();
        let off = coeff.norm();
        let mut expected = vec![w0 + off, w0 + off, w0 - off, w0 - off];
        expected.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in eig.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{eig:?} vs {expected:?}");
        }
        assert_eq!(sub.dim(), 2);
    }

    #[test]
    fn parseval_grid_agrees() {
        for seed in 0..10 {
            let h = TestFunction::random(3, 4, 3, seed).unwrap();
            let a = h.l2_norm_sq();
            let b = h.l2_norm_sq_grid().unwrap();
            assert!((a - b).abs() < 1e-8 * a);
        }
    }

    #[test]
    fn trace_identity_and_monotonicity() {
        let c = cluster(2, 10.0, 0.5);
        for seed in 0..5 {
            let h = TestFunction::random(2, 3, 2, seed).unwrap();
            let g = gram_matrix(&c, &h).unwrap();
            let tr = schatten_norm(&g, &h, 1.0).unwrap().norm;
            let expected = (2.0 * PI).powi(-2) * c.len() as f64 * h.l2_norm_sq();
            assert!((tr - expected).abs() < 1e-10 * expected);
            assert!((trace_norm(&c, &h) - expected).abs() < 1e-10 * expected);
            let mut last = f64::INFINITY;
            for a in [1.0, 1.5, 2.0, 3.0, 7.0, f64::INFINITY] {
                let v = schatten_norm(&g, &h, a).unwrap().norm;
                assert!(v <= last * (1.0 + 1e-12));
                last = v;
            }
            let fro = schatten_norm(&g, &h, 2.0).unwrap().norm;
            assert!((frobenius_norm(&c, &h) - fro).abs() < 1e-10 * fro);
            let eig = g.eigenvalues().unwrap();
            assert!(*eig.last().unwrap() >= -1e-10 * g.trace());
        }
    }

    #[test]
    fn isospectral_with_grid_operator() {
        // h χ h̄ discretized on a grid exact for all products involved
        let c = cluster(2, 2.0, 0.2);
        assert!(c.len() <= 6);
        for seed in 0..4 {
            let modes = 2 + (seed as usize % 2);
            let h = TestFunction::random(2, modes, 1, seed).unwrap();
            let g = gram_matrix(&c, &h).unwrap();
            let eig = g.eigenvalues().unwrap().to_vec();
            let gs = 16usize;
            let step = 2.0 * PI / gs as f64;
            let pts: Vec<[f64; 2]> = (0..gs * gs).map(|i| [(i / gs) as f64 * step, (i % gs) as f64 * step]).collect();
            let hv: Vec<Complex64> = pts.iter().map(|x| h.eval(x)).collect();
            let cell = step * step;
            let m = DMatrix::from_fn(pts.len(), pts.len(), |i, j| {
                let k: Complex64 = c
                    .freqs
                    .iter()
                    .map(|f| {
                        let ph = f.k[0] as f64 * (pts[i][0] - pts[j][0]) + f.k[1] as f64 * (pts[i][1] - pts[j][1]);
                        Complex64::from_polar(1.0, ph)
                    })
                    .sum::<Complex64>()
                    / (2.0 * PI).powi(2);
                hv[i] * k * hv[j].conj() * cell
            });
            let mut big: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
            big.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in eig.iter().zip(&big) {
                assert!((a - b).abs() < 1e-6, "{eig:?} vs {:?}", &big[..eig.len()]);
            }
            assert!(big[eig.len()].abs() < 1e-9);
        }
    }

    #[test]
    fn cap_enforced() {
        let c = cluster(2, 10.0, 1.0);
        let h = TestFunction::constant(2);
        assert!(matches!(gram_matrix_with_cap(&c, &h, 10), Err(Error::Capacity(_))));
        assert!(matches!(schatten_norm(&gram_matrix(&c, &h).unwrap(), &h, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn trace_bound_ratio_examples() {
        let cfg = TorusConfig::new(2).unwrap();
        let one = TestFunction::constant(2);
        let r = trace_bound_ratio(&cfg, 20.0, 0.5, &one).unwrap();
        let n = count_band(&cfg, &SpectralBand::new(20.0, 0.5).unwrap()) as f64;
        let expected = n / ((2.0 * PI).powi(2) * (0.5 * 20.0 + (20.0f64 / 0.5).sqrt()));
        assert!((r - expected).abs() < 1e-14 * expected);
        assert_eq!(trace_bound_ratio(&cfg, 0.5, 0.001, &one).unwrap(), 0.0);
        let h = TestFunction::random(2, 5, 3, 11).unwrap();
        assert!((trace_bound_ratio(&cfg, 20.0, 0.5, &h).unwrap() - r).abs() < 1e-12 * r);
    }

    #[test]
    fn duality_trivial_case() {
        let c = cluster(2, 5.0, 0.1);
        let sub = coordinate_subspace(c.clone(), &[0]).unwrap();
        let one = TestFunction::constant(2);
        let p = Exponent::Finite(6.0);
        let r = dual_pairing_check(&sub, &[1.0], &one, p).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        let expected = (c.len() as f64).powf(1.0 / r.alpha_conj);
        assert!((r.rhs - expected).abs() < 1e-10 * expected);
        assert!(matches!(dual_pairing_check(&sub, &[1.0, 2.0], &one, p), Err(Error::Shape { .. })));
    }

    #[test]
    fn duality_random_and_extremal() {
        let c = cluster(2, 8.0, 0.7);
        for seed in 0..10u64 {
            let d = 1 + (seed as usize % c.len());
            let sub = random_subspace(c.clone(), d, seed).unwrap();
            let h = TestFunction::random(2, 3, 2, 100 + seed).unwrap();
            let zeta: Vec<f64> = (0..d).map(|j| ((j as f64 + 1.0) * 0.37 + seed as f64).sin()).collect();
            for p in [Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Finite(6.0), Exponent::Infinity] {
                let r = dual_pairing_check(&sub, &zeta, &h, p).unwrap();
                assert!(r.slack >= -1e-9, "{r:?}");
            }
        }
        // α = 1 (p = 2): equality along the top eigenvector
        let h = TestFunction::random(2, 3, 2, 7).unwrap();
        let g = gram_matrix(&c, &h).unwrap();
        let (_, v) = g.top_eigenvector().unwrap();
        let b = DMatrix::from_column_slice(c.len(), 1, &v);
        let sub = crate::cluster::make_subspace(c.clone(), b).unwrap();
        let r = dual_pairing_check(&sub, &[1.0], &h, Exponent::Finite(2.0)).unwrap();
        assert_eq!(r.alpha, 1.0);
        assert!(r.slack.abs() <= 1e-6 * r.rhs, "{r:?}");
    }

    #[test]
    fn unit_band_indicator_and_constant() {
        let cfg = TorusConfig::new(2).unwrap();
        let one = TestFunction::constant(2);
        let (lambda, eps) = (30.3, 0.5);
        let ind = unit_band_chain_check_with(&cfg, lambda, eps, 1.0, |t| if (0.0..1.0).contains(&t) { 1.0 } else { 0.0 }, &one)
            .unwrap();
        let n_band = count_band(&cfg, &SpectralBand::new(lambda, eps).unwrap()) as f64;
        assert!((ind.lhs - n_band).abs() < 1e-9);
        // [30.3, 30.8) lies inside the unit band l = 30
        let n30 = count_band(&cfg, &SpectralBand::new(30.0, 1.0).unwrap()) as f64;
        let w30 = (1.0 + 0.3 / eps).powi(-2);
        assert!(ind.lhs <= n30 && ind.rhs >= w30 * n30);

        let m = default_mollifier();
        let r = unit_band_chain_check(&cfg, 30.0, 0.5, m, &one).unwrap();
        // oracle: explicit shell sums over a brute list of frequencies
        let l_max = (r.bands - 1) as f64;
        let big = enumerate_band(&cfg, &SpectralBand::new(0.0, l_max + 1.0).unwrap()).unwrap();
        let lhs: f64 = big.freqs.iter().map(|f| m.b((f.norm() - 30.0) / 0.5)).sum();
        let rhs: f64 = big
            .freqs
            .iter()
            .map(|f| (1.0 + (f.norm().floor() - 30.0).abs() / 0.5).powi(-2))
            .sum();
        assert!((r.lhs - lhs).abs() < 1e-10 * lhs);
        assert!((r.rhs - rhs).abs() < 1e-10 * rhs, "{} vs {rhs}", r.rhs);
        assert!(r.fitted_c.is_finite() && r.fitted_c > 0.0);
    }
}
