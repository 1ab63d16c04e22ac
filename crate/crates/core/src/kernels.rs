//! Diagonal of the mollified projector kernel `A(x,x)` on the torus, its
//! split into a short-time part and lattice translates, and the Fourier
//! transform of the unit-sphere measure.
//!
//! With `f(μ) = a((μ−λ)/ε) + a((−μ−λ)/ε)` the frequency side is
//! `P = (2π)^{-n} Σ_k f(|k|)`, and `A(x,x) = P − J` where `J` collects the
//! `a((−μ−λ)/ε)` terms. Poisson summation rewrites `P` as
//! `Σ_m K(2πm)` with `K(z) = (2π)^{-n} ∫ f(|ξ|) e^{iz·ξ} dξ`, which vanishes
//! for `|z| ≥ 1/ε`. A smooth time cutoff `c` splits `f = f_c + f_{1−c}`,
//! where `f_c(r) = (ε/2π)[H(λ−r) + H(λ+r)]` and
//! `H(τ) = ∫ c(t) â(εt) cos(τt) dt`; `K^c(z)` vanishes once `|z|` exceeds
//! the cutoff radius.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, gamma, hankel_pq};
use crate::error::{Error, Result};
use crate::lattice::{shell_histogram, unit_ball_volume, unit_sphere_area, NormWindow, SpectralBand, TorusConfig};
use crate::mollifier::{Cutoff, Mollifier, TimeWindow};
use crate::quadrature::{gl16, CompositeRule};

/// Lattice points we are willing to visit in one shell sum.
pub const MAX_SHELL_POINTS: f64 = 4e8;

/// `∫_{S^{n-1}} e^{i r ω_1} dω = (2π)^{n/2} r^{-ν} J_ν(r)`, `ν = (n−2)/2`.
pub fn sphere_ft(n: usize, r: f64) -> Complex64 {
    Complex64::new(sphere_ft_real(n, r), 0.0)
}

/// Real value of [`sphere_ft`] (the transform of an even measure is real).
pub fn sphere_ft_real(n: usize, r: f64) -> f64 {
    let nu = (n as f64 - 2.0) / 2.0;
    let r = r.abs();
    let scale = (2.0 * PI).powf(n as f64 / 2.0);
    if r < 4.0 {
        // r^{-ν} J_ν(r) = Σ (−1)^k (r/2)^{2k} / (2^ν k! Γ(k+ν+1))
        let q = 0.25 * r * r;
        let mut term = 1.0 / (2f64.powf(nu) * gamma(nu + 1.0));
        let mut sum = term;
        for k in 1..60 {
            let kf = k as f64;
            term *= -q / (kf * (kf + nu));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        scale * sum
    } else {
        scale * r.powf(-nu) * bessel_j(nu, r)
    }
}

/// `|S^{n−2}| ∫_0^π cos(r cos θ) sin^{n−2}θ dθ`, by composite Gauss–Legendre.
pub fn sphere_ft_quadrature(n: usize, r: f64) -> f64 {
    let panels = 16 + (r.abs() * PI / 4.0).ceil() as usize;
    let rule = CompositeRule::uniform(gl16(), 0.0, PI, panels);
    let inner = rule.integrate(|th| (r * th.cos()).cos() * th.sin().powi(n as i32 - 2));
    unit_sphere_area(n - 1) * inner
}

/// Sphere transform with its stationary-phase split
/// `(1+r)^{-(n−1)/2} [m_+(r) e^{ir} + m_−(r) e^{−ir}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFT {
    pub n: usize,
}

impl SurfaceFT {
    pub fn new(n: usize) -> Result<Self> {
        TorusConfig::new(n)?;
        Ok(Self { n })
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        sphere_ft(self.n, r)
    }

    fn nu(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    /// Smallest `r` at which the Hankel amplitudes are accurate.
    pub fn amplitude_from(&self) -> f64 {
        if self.n % 2 == 1 {
            1.0
        } else {
            25.0
        }
    }

    /// `m_+(r)`; `m_−` is its conjugate. `None` below [`Self::amplitude_from`].
    pub fn m_plus(&self, r: f64) -> Option<Complex64> {
        if r < self.amplitude_from() {
            return None;
        }
        let nu = self.nu();
        let (p, q) = hankel_pq(nu, r);
        let phase = Complex64::from_polar(1.0, -(0.5 * nu + 0.25) * PI);
        let amp = 0.5
            * (1.0 + r).powf((self.n as f64 - 1.0) / 2.0)
            * (2.0 * PI).powf(self.n as f64 / 2.0)
            * r.powf(-nu)
            * (2.0 / (PI * r)).sqrt();
        Some(Complex64::new(p, q) * phase * amp)
    }

    /// `sup |d̂σ(r)| (1+r)^{(n−1)/2}` over `r = 0, step, …, r_max`.
    pub fn envelope_constant(&self, r_max: f64, step: f64) -> f64 {
        let steps = (r_max / step).ceil() as usize;
        (0..=steps)
            .map(|i| {
                let r = (i as f64 * step).min(r_max);
                sphere_ft_real(self.n, r).abs() * (1.0 + r).powf((self.n as f64 - 1.0) / 2.0)
            })
            .fold(0.0, f64::max)
    }

    /// Fitted `C_j = sup r^j |m_+^{(j)}(r)|` for `j = 0, 1, 2` over
    /// `[max(r_lo, amplitude_from), r_hi]`, derivatives by central differences.
    pub fn amplitude_derivative_constants(&self, r_lo: f64, r_hi: f64, samples: usize) -> [f64; 3] {
        let lo = r_lo.max(self.amplitude_from()) + 0.01;
        let d = 1e-3;
        let mut out = [0.0f64; 3];
        for i in 0..=samples {
            let r = lo + (r_hi - lo) * i as f64 / samples as f64;
            let (Some(m0), Some(mp), Some(mm)) = (self.m_plus(r), self.m_plus(r + d), self.m_plus(r - d)) else {
                continue;
            };
            let d1 = (mp - mm) / (2.0 * d);
            let d2 = (mp - 2.0 * m0 + mm) / (d * d);
            out[0] = out[0].max(m0.norm());
            out[1] = out[1].max(r * d1.norm());
            out[2] = out[2].max(r * r * d2.norm());
        }
        out
    }
}

/// A shell sum together with a bound on what the truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSum {
    pub value: f64,
    pub truncation_error: f64,
    /// Lattice points visited.
    pub points: u64,
}

/// `(2π)^{-n} Σ_{r_lo ≤ |k| ≤ r_hi} f(|k|)`.
fn shell_sum<F: Fn(f64) -> f64 + Sync>(cfg: &TorusConfig, r_lo: f64, r_hi: f64, f: F) -> Result<(f64, u64)> {
    let n = cfg.dim();
    let est = unit_ball_volume(n) * (r_hi + 2.0).powi(n as i32);
    if est > MAX_SHELL_POINTS || !est.is_finite() {
        return Err(Error::Range(format!(
            "shell sum up to radius {r_hi:.1} in dimension {n} needs ~{est:.2e} points (cap {MAX_SHELL_POINTS:.0e})"
        )));
    }
    let lo = (r_lo.max(0.0).powi(2)).floor() as u64;
    let hi = (r_hi * r_hi).ceil() as u64 + 1;
    let window = NormWindow { lo, hi };
    let hist = shell_histogram(cfg, window);
    let mut sum = 0.0;
    let mut points = 0;
    for (i, &c) in hist.iter().enumerate() {
        if c > 0 {
            sum += c as f64 * f(((lo + i as u64) as f64).sqrt());
            points += c;
        }
    }
    Ok((sum / cfg.volume(), points))
}

/// Relative level below which `a` is treated as zero.
pub const DECAY_TOL: f64 = 1e-16;

fn decay_error(cfg: &TorusConfig, radius: f64) -> f64 {
    // `a < DECAY_TOL` past the cut and keeps decaying; bound the dropped
    // terms by the tolerance times the lattice points out to twice the cut
    DECAY_TOL * unit_ball_volume(cfg.dim()) * (2.0 * radius + 2.0).powi(cfg.dim() as i32) / cfg.volume()
}

/// `A(x,x) = (2π)^{-n} Σ_k a((|k|−λ)/ε)`, constant in `x`.
pub fn mollified_diagonal(cfg: &TorusConfig, lambda: f64, eps: f64, m: &Mollifier) -> Result<DiagonalSum> {
    mollified_diagonal_with(cfg, lambda, eps, m.decay_radius(DECAY_TOL), |t| m.a(t))
}

/// Same shell sum for any even profile `f` negligible beyond `radius`.
pub fn mollified_diagonal_with<F: Fn(f64) -> f64 + Sync>(
    cfg: &TorusConfig,
    lambda: f64,
    eps: f64,
    radius: f64,
    f: F,
) -> Result<DiagonalSum> {
    SpectralBand::new(lambda, eps)?;
    let r_hi = lambda + radius * eps;
    let r_lo = lambda - radius * eps;
    let (value, points) = shell_sum(cfg, r_lo, r_hi, |mu| f((mu - lambda) / eps))?;
    Ok(DiagonalSum {
        value,
        truncation_error: decay_error(cfg, r_hi),
        points,
    })
}

/// `(2π)^{-n} Σ_k b((|k|−λ)/ε)` next to `½ (2π)^{-n} N(λ, δε)`, with `δ`
/// the half-level of `b`. Returns `(diagonal of b, lower bound)`.
pub fn half_level_comparison(cfg: &TorusConfig, lambda: f64, eps: f64, m: &Mollifier) -> Result<(f64, f64)> {
    let delta = m.half_level_delta();
    let radius = m.decay_radius(DECAY_TOL.sqrt());
    let diag = mollified_diagonal_with(cfg, lambda, eps, radius, |t| m.b(t))?.value;
    let count = crate::lattice::count_band(cfg, &SpectralBand::new(lambda, delta * eps)?);
    Ok((diag, 0.5 * count as f64 / cfg.volume()))
}

/// `J = (2π)^{-n} Σ_k a((−|k|−λ)/ε)`.
pub fn j_term(cfg: &TorusConfig, lambda: f64, eps: f64, m: &Mollifier) -> Result<DiagonalSum> {
    SpectralBand::new(lambda, eps)?;
    let radius = m.decay_radius(DECAY_TOL);
    let r_hi = radius * eps - lambda;
    if r_hi < 0.0 {
        return Ok(DiagonalSum {
            value: 0.0,
            truncation_error: DECAY_TOL * m.a(lambda / eps).max(0.0),
            points: 0,
        });
    }
    let (value, points) = shell_sum(cfg, 0.0, r_hi, |mu| m.a((-mu - lambda) / eps))?;
    Ok(DiagonalSum {
        value,
        truncation_error: decay_error(cfg, r_hi),
        points,
    })
}

/// Nonzero translate shells `{(|m|², multiplicity)}` with `2π|m| < z_max`.
pub fn translate_shells(cfg: &TorusConfig, z_max: f64) -> Vec<(u64, u64)> {
    translate_shells_between(cfg, 0.0, z_max)
}

fn translate_shells_between(cfg: &TorusConfig, z_min: f64, z_max: f64) -> Vec<(u64, u64)> {
    let unit = 2.0 * PI;
    let hi_f = (z_max / unit).powi(2);
    if !(hi_f > 0.0) {
        return Vec::new();
    }
    let lo = ((z_min / unit).powi(2).floor() as u64).max(1);
    let hi = hi_f.ceil() as u64 + 1;
    let window = NormWindow { lo, hi };
    shell_histogram(cfg, window)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (lo + i as u64, c))
        .filter(|&(m2, _)| {
            let z = unit * (m2 as f64).sqrt();
            z >= z_min && z < z_max
        })
        .collect()
}

/// `(2π)^{-n} ∫_lo^hi p(r) r^{n−1} d̂σ(z r) dr` for each `z`, at panel width
/// `w` and `w/2`; returns the finer values and the per-`z` differences.
fn radial_transforms<P: Fn(f64) -> f64 + Sync>(
    n: usize,
    lo: f64,
    hi: f64,
    w: f64,
    profile: P,
    zs: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let run = |width: f64| -> Vec<f64> {
        if hi <= lo {
            return vec![0.0; zs.len()];
        }
        let rule = CompositeRule::with_max_width(gl16(), lo, hi, width);
        let pw: Vec<f64> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&r, &wt)| wt * profile(r) * r.powi(n as i32 - 1))
            .collect();
        zs.par_iter()
            .map(|&z| {
                rule.nodes
                    .iter()
                    .zip(&pw)
                    .map(|(&r, &v)| v * sphere_ft_real(n, z * r))
                    .sum::<f64>()
                    / (2.0 * PI).powi(n as i32)
            })
            .collect()
    };
    let coarse = run(w);
    let fine = run(w / 2.0);
    let err = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).collect();
    (fine, err)
}

/// `H(τ) = 2∫_0^T w(t) â(εt) cos(τt) dt` by the trapezoid rule, which is
/// spectrally accurate because the integrand extends to a smooth even
/// function vanishing to all orders at `±T`.
#[derive(Debug, Clone)]
pub struct HProfile {
    step: f64,
    weights: Vec<f64>,
    /// `|H(τ)|` is below `H_TOL · max|H|` for `|τ| ≥ radius`.
    pub radius: f64,
}

/// Headroom added to `tau_max` when choosing the trapezoid step.
const ALIAS_MARGIN: f64 = 600.0;
const H_SCAN_END: f64 = 1000.0;
/// Relative cut for `H`; the trapezoid sum has a roundoff floor near 1e-17.
const H_TOL: f64 = 1e-14;

impl HProfile {
    pub fn new(m: &Mollifier, window: TimeWindow, eps: f64) -> Result<Self> {
        let support = 1.0 / eps;
        let end = match window {
            TimeWindow::Cutoff(c) => c.outer.min(support),
            _ => support,
        };
        let step = (2.0 * PI / (H_SCAN_END + ALIAS_MARGIN)).min(end / 64.0);
        let count = (end / step).ceil() as usize;
        let weights: Vec<f64> = (0..=count)
            .into_par_iter()
            .map(|j| {
                let t = j as f64 * step;
                let w = if j == 0 { 1.0 } else { 2.0 };
                w * step * window.eval(t) * m.a_hat(eps * t)
            })
            .collect();
        let mut prof = Self {
            step,
            weights,
            radius: H_SCAN_END,
        };
        let scan: Vec<f64> = (0..=(H_SCAN_END * 4.0) as usize)
            .into_par_iter()
            .map(|i| prof.eval(i as f64 * 0.25).abs())
            .collect();
        let peak = scan.iter().copied().fold(0.0, f64::max);
        let last = scan.iter().rposition(|&v| v > H_TOL * peak).unwrap_or(0);
        if last + 40 >= scan.len() {
            return Err(Error::Numeric(format!(
                "H profile still at {:.2e} of its peak at τ={H_SCAN_END}",
                scan[scan.len() - 1] / peak.max(f64::MIN_POSITIVE)
            )));
        }
        prof.radius = (last + 1) as f64 * 0.25 + 1.0;
        Ok(prof)
    }

    /// Direct trapezoid sum, unaware of the decay radius.
    pub fn eval(&self, tau: f64) -> f64 {
        let theta = tau * self.step;
        let rot = Complex64::from_polar(1.0, theta);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for (j, &w) in self.weights.iter().enumerate() {
            if j % 32 == 0 {
                z = Complex64::from_polar(1.0, j as f64 * theta);
            }
            acc += w * z.re;
            z *= rot;
        }
        acc
    }

    /// `H(τ)`, zero past the decay radius.
    pub fn eval_truncated(&self, tau: f64) -> f64 {
        if tau.abs() >= self.radius {
            0.0
        } else {
            self.eval(tau)
        }
    }
}

/// Options for [`decompose_diagonal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Time cutoff; neighbours are the translates `0 < 2π|m| < outer`.
    pub cutoff: Cutoff,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            cutoff: lattice_cutoff(),
        }
    }
}

/// The unit cutoff scaled to the lattice spacing `2π`: translates with
/// `|m| ≤ 2` fall inside its support.
pub fn lattice_cutoff() -> Cutoff {
    Cutoff::default().scaled(2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDiagonalReport {
    pub n: usize,
    pub lambda: f64,
    pub epsilon: f64,
    /// `A(x,x)` by the shell sum.
    pub total: f64,
    /// `A(x,x)` reassembled from the pieces below.
    pub total_reassembled: f64,
    pub j: f64,
    /// `K^c(0)`.
    pub i1_main: f64,
    /// `Σ K^c(2πm)` over neighbours; the same sum is `I21`.
    pub i1_neighbor: f64,
    /// `K^{1−c}(0)`, zero in odd dimensions.
    pub i2_local: f64,
    /// `Σ K(2πm)` over `0 < 2π|m| < 1/ε`.
    pub i22: f64,
    pub i21: f64,
    pub translates: u64,
    pub quadrature_error: f64,
    /// `total / (ελ^{n−1} + (λ/ε)^{(n−1)/2})`.
    pub ratio_total: f64,
    /// `i1_main / (ελ^{n−1})`.
    pub ratio_i1: f64,
    /// `i22 / (λ/ε)^{(n−1)/2}`.
    pub ratio_i22: f64,
    /// `j / λ^{−4}`.
    pub ratio_j: f64,
}

/// `ελ^{n−1}` and `(λ/ε)^{(n−1)/2}`.
pub fn two_term_bound(n: usize, lambda: f64, eps: f64) -> (f64, f64) {
    let k = n as f64 - 1.0;
    (eps * lambda.powf(k), (lambda / eps).powf(k / 2.0))
}

/// Full-profile pieces `K(0)` and `Σ_{0<2π|m|<1/ε} K(2πm)` with errors.
struct FullTranslates {
    k0: f64,
    shells: f64,
    count: u64,
    error: f64,
}

fn full_translates(cfg: &TorusConfig, lambda: f64, eps: f64, m: &Mollifier, z_lo: f64, z_hi: f64) -> FullTranslates {
    let n = cfg.dim();
    let radius = m.decay_radius(DECAY_TOL);
    let lo = (lambda - radius * eps).max(0.0);
    let hi = lambda + radius * eps;
    let shells = translate_shells_between(cfg, z_lo, z_hi);
    let mut zs = vec![0.0];
    zs.extend(shells.iter().map(|&(m2, _)| 2.0 * PI * (m2 as f64).sqrt()));
    let width = eps.min(1.0) / 8.0;
    let (vals, errs) = radial_transforms(
        n,
        lo,
        hi,
        width,
        |r| m.a((r - lambda) / eps) + m.a((-r - lambda) / eps),
        &zs,
    );
    let mut sum = 0.0;
    let mut error = errs[0];
    let mut count = 0;
    for (i, &(_, mult)) in shells.iter().enumerate() {
        sum += mult as f64 * vals[i + 1];
        error += mult as f64 * errs[i + 1];
        count += mult;
    }
    FullTranslates {
        k0: vals[0],
        shells: sum,
        count,
        error,
    }
}

/// Splits `A(x,x)` into `J`, the short-time pieces `I1`, and the long-time
/// lattice translates `I2 = I22 − I21` (plus the local `K^{1−c}(0)`).
pub fn decompose_diagonal(
    cfg: &TorusConfig,
    lambda: f64,
    eps: f64,
    m: &Mollifier,
    opts: KernelOptions,
) -> Result<KernelDiagonalReport> {
    SpectralBand::new(lambda, eps)?;
    if !(eps * lambda > 1.0 && eps <= 1.0) {
        return Err(Error::Domain(format!(
            "decomposition needs 1/λ < ε ≤ 1, got λ={lambda}, ε={eps}"
        )));
    }
    let n = cfg.dim();
    let total = mollified_diagonal(cfg, lambda, eps, m)?;
    let j = j_term(cfg, lambda, eps, m)?;

    let full = full_translates(cfg, lambda, eps, m, 0.0, 1.0 / eps);

    let cut = opts.cutoff;
    let h = HProfile::new(m, TimeWindow::Cutoff(cut), eps)?;
    let neighbours = translate_shells(cfg, cut.outer);
    let mut zs = vec![0.0];
    zs.extend(neighbours.iter().map(|&(m2, _)| 2.0 * PI * (m2 as f64).sqrt()));
    let lo = (lambda - h.radius).max(0.0);
    let hi = lambda + h.radius;
    let (vals, errs) = radial_transforms(
        n,
        lo,
        hi,
        0.25,
        |r| eps / (2.0 * PI) * (h.eval_truncated(lambda - r) + h.eval_truncated(lambda + r)),
        &zs,
    );
    let i1_main = vals[0];
    let mut i1_neighbor = 0.0;
    let mut neighbor_err = 0.0;
    for (i, &(_, mult)) in neighbours.iter().enumerate() {
        i1_neighbor += mult as f64 * vals[i + 1];
        neighbor_err += mult as f64 * errs[i + 1];
    }
    let i21 = i1_neighbor;
    let i2_local = full.k0 - i1_main;
    let i22 = full.shells;
    let total_reassembled = i1_main + i1_neighbor + i2_local + (i22 - i21) - j.value;

    let quadrature_error = full.error
        + errs[0]
        + neighbor_err
        + total.truncation_error
        + j.truncation_error
        // interpolation error of the a-table, weighted by the radial mass
        + 1e-11 * full.k0.abs()
        + 1e-12 * total.value.abs();

    let (b1, b2) = two_term_bound(n, lambda, eps);
    Ok(KernelDiagonalReport {
        n,
        lambda,
        epsilon: eps,
        total: total.value,
        total_reassembled,
        j: j.value,
        i1_main,
        i1_neighbor,
        i2_local,
        i22,
        i21,
        translates: full.count,
        quadrature_error,
        ratio_total: total.value / (b1 + b2),
        ratio_i1: i1_main / b1,
        ratio_i22: i22 / b2,
        ratio_j: j.value * lambda.powi(4),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodizationReport {
    pub n: usize,
    pub lambda: f64,
    pub epsilon: f64,
    /// `(2π)^{-n} Σ_k f(|k|)`.
    pub lattice_side: f64,
    /// `Σ_m K(2πm)`.
    pub translate_side: f64,
    pub relative_discrepancy: f64,
    /// Nonzero translates summed.
    pub translates: u64,
    /// `Σ |K(2πm)|` over the shells just past `1/ε`.
    pub tail_estimate: f64,
    pub quadrature_error: f64,
}

/// Frequency side against translate side of the smoothed periodization.
pub fn periodized_diagonal_check(cfg: &TorusConfig, lambda: f64, eps: f64, m: &Mollifier) -> Result<PeriodizationReport> {
    SpectralBand::new(lambda, eps)?;
    let radius = m.decay_radius(DECAY_TOL);
    let (lattice_side, _) = shell_sum(cfg, 0.0, lambda + radius * eps, |mu| {
        m.a((mu - lambda) / eps) + m.a((-mu - lambda) / eps)
    })?;
    let distinct = (1.0 / (2.0 * PI * eps)).powi(2);
    if distinct > 1e5 {
        return Err(Error::Capacity(format!(
            "ε={eps} needs translates out to |m|² ≈ {distinct:.0}"
        )));
    }
    let inside = full_translates(cfg, lambda, eps, m, 0.0, 1.0 / eps);
    let outside = full_translates(cfg, lambda, eps, m, 1.0 / eps, 1.0 / eps + 4.0 * PI);
    let tail_estimate = outside.shells.abs();
    let translate_side = inside.k0 + inside.shells;
    if tail_estimate > 1e-6 * lattice_side.abs() {
        return Err(Error::Numeric(format!(
            "translate sum not converged: tail {tail_estimate:.3e} beyond |z| = 1/ε against side {lattice_side:.3e}"
        )));
    }
    Ok(PeriodizationReport {
        n: cfg.dim(),
        lambda,
        epsilon: eps,
        lattice_side,
        translate_side,
        relative_discrepancy: (lattice_side - translate_side).abs() / lattice_side.abs().max(f64::MIN_POSITIVE),
        translates: inside.count,
        tail_estimate,
        quadrature_error: inside.error,
    })
}

/// Poisson summation for `f(μ) = exp(−μ²/(2s²))` through the same lattice
/// and radial machinery; returns the relative discrepancy.
pub fn gaussian_poisson_selftest(cfg: &TorusConfig, s: f64) -> Result<f64> {
    let n = cfg.dim();
    let f = |mu: f64| (-mu * mu / (2.0 * s * s)).exp();
    let r_max = 9.5 * s;
    let (lattice_side, _) = shell_sum(cfg, 0.0, r_max, f)?;
    // K(z) ∝ exp(−s²z²/2), negligible past z = 10/s
    let shells = translate_shells(cfg, 10.0 / s);
    let mut zs = vec![0.0];
    zs.extend(shells.iter().map(|&(m2, _)| 2.0 * PI * (m2 as f64).sqrt()));
    let width = (0.5 / zs.last().copied().unwrap_or(1.0).max(1.0)).min(s / 4.0);
    let (vals, _) = radial_transforms(n, 0.0, r_max, width, f, &zs);
    let translate_side = vals[0]
        + shells
            .iter()
            .enumerate()
            .map(|(i, &(_, mult))| mult as f64 * vals[i + 1])
            .sum::<f64>();
    Ok((lattice_side - translate_side).abs() / lattice_side.abs())
}
