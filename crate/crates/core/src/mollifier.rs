//! The auxiliary Schwartz pair `(a, b = a²)` with `â` supported in `(-1, 1)`.
//!
//! Fourier convention: `â(t) = ∫ a(τ) e^{-iτt} dτ`, `a(τ) = (1/2π) ∫ â(t) e^{iτt} dt`.
//!
//! Given an even bump `γ` supported in `(-1/2, 1/2)`, let
//! `g(τ) = ∫ γ(t) cos(τt) dt`. Then `a = g² / g(0)²` is even, non-negative,
//! `a(0) = 1`, and `â = (2π / g(0)²) · (γ * γ)` is supported in `(-1, 1)`.
//! The squared form makes non-negativity structural; `â` is evaluated
//! independently through the convolution `γ * γ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gl16, CompositeRule};

/// Parameters of the mollifier, serializable into run configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    /// `s` in the default bump `exp(-s / (1 - (2t)²))`.
    pub sharpness: f64,
    /// Gauss–Legendre panels on `[0, 1/2]` for `g`.
    pub gamma_panels: usize,
    /// Spacing of the `g` table.
    pub table_step: f64,
    /// End of the `g` table; `a` is treated as zero beyond it.
    pub table_max: f64,
    /// Gauss–Legendre panels for the convolution `γ * γ`.
    pub conv_panels: usize,
}

impl Default for MollifierSpec {
    fn default() -> Self {
        Self {
            sharpness: 1.0,
            gamma_panels: 64,
            table_step: 0.01,
            table_max: 800.0,
            conv_panels: 16,
        }
    }
}

/// Even profile on `(-1/2, 1/2)`.
#[derive(Clone)]
pub struct GammaProfile {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for GammaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaProfile").field("name", &self.name).finish()
    }
}

impl GammaProfile {
    /// `exp(-s / (1 - (2t)²))` on `|t| < 1/2`.
    pub fn bump(sharpness: f64) -> Self {
        Self {
            name: format!("bump(s={sharpness})"),
            f: Arc::new(move |t: f64| {
                let u = 1.0 - 4.0 * t * t;
                if u <= 0.0 {
                    0.0
                } else {
                    (-sharpness / u).exp()
                }
            }),
        }
    }

    /// Arbitrary profile; evaluated only on `(-1/2, 1/2)`.
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(name: &str, f: F) -> Self {
        Self {
            name: name.to_owned(),
            f: Arc::new(move |t: f64| if t.abs() >= 0.5 { 0.0 } else { f(t) }),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Smooth even cutoff: 1 on `|t| ≤ inner`, 0 on `|t| ≥ outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Self {
            inner: 1.0,
            outer: 2.0,
        }
    }
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "cutoff needs 0 < inner < outer, got inner={inner}, outer={outer}"
            )));
        }
        Ok(Self { inner, outer })
    }

    /// Cutoff scaled by `factor` in time.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            inner: self.inner * factor,
            outer: self.outer * factor,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= self.inner {
            return 1.0;
        }
        if t >= self.outer {
            return 0.0;
        }
        let u = (t - self.inner) / (self.outer - self.inner);
        let psi = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
        let a = psi(1.0 - u);
        a / (a + psi(u))
    }
}

/// Which time-domain weight multiplies `â(εt)` in `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeWindow {
    /// `c(t)`.
    Cutoff(Cutoff),
    /// `1 − c(t)`.
    Complement(Cutoff),
    /// No cutoff.
    Full,
}

impl TimeWindow {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeWindow::Cutoff(c) => c.eval(t),
            TimeWindow::Complement(c) => 1.0 - c.eval(t),
            TimeWindow::Full => 1.0,
        }
    }

    /// Sub-intervals of `[0, end]` on which the weight is smooth.
    fn breakpoints(&self, end: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        if let TimeWindow::Cutoff(c) | TimeWindow::Complement(c) = self {
            for b in [c.inner, c.outer] {
                if b < end {
                    pts.push(b);
                }
            }
        }
        pts.push(end);
        pts
    }

    /// Whether the weight vanishes identically on `[0, end]`.
    fn vanishes_on(&self, end: f64) -> bool {
        match self {
            TimeWindow::Complement(c) => end <= c.inner,
            _ => false,
        }
    }
}

/// Immutable mollifier with a cached table of `g` and `g'`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    spec: MollifierSpec,
    gamma: GammaProfile,
    g0: f64,
    g_table: Vec<f64>,
    dg_table: Vec<f64>,
    /// `â` at the nodes of two nested-resolution rules on `[0, 1]`.
    ahat_fine: (CompositeRule, Vec<f64>),
    ahat_coarse: (CompositeRule, Vec<f64>),
}

const AHAT_FINE_PANELS: usize = 4096;
const AHAT_COARSE_PANELS: usize = 2048;

/// Builds the mollifier from the default bump with the given spec.
pub fn build_mollifier(spec: MollifierSpec) -> Result<Mollifier> {
    build_mollifier_with(GammaProfile::bump(spec.sharpness), spec)
}

/// Builds the mollifier from an arbitrary even non-negative profile.
pub fn build_mollifier_with(gamma: GammaProfile, spec: MollifierSpec) -> Result<Mollifier> {
    if !(spec.sharpness > 0.0) || spec.gamma_panels == 0 || spec.conv_panels == 0 {
        return Err(Error::Construction("mollifier spec has non-positive parameters".into()));
    }
    if !(spec.table_step > 0.0 && spec.table_max > spec.table_step) {
        return Err(Error::Construction("table step/max must satisfy 0 < step < max".into()));
    }
    // profile checks on a probe grid
    let mut peak = 0.0f64;
    for i in 0..=1000 {
        let t = 0.5 * i as f64 / 1000.0 * 0.999;
        let (v, w) = (gamma.eval(t), gamma.eval(-t));
        if !v.is_finite() || !w.is_finite() {
            return Err(Error::Construction(format!("profile not finite at t={t}")));
        }
        if v < 0.0 || w < 0.0 {
            return Err(Error::Construction(format!("profile changes sign near t={t}")));
        }
        if (v - w).abs() > 1e-12 * v.abs().max(w.abs()).max(1e-300) {
            return Err(Error::Construction(format!("profile is not even at t={t}")));
        }
        peak = peak.max(v);
    }
    if peak == 0.0 {
        return Err(Error::Construction("profile vanishes identically".into()));
    }

    let rule = CompositeRule::uniform(gl16(), 0.0, 0.5, spec.gamma_panels);
    let gw: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| (t, 2.0 * w * gamma.eval(t)))
        .collect();
    let g_at = |tau: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut dg = 0.0;
        for &(t, w) in &gw {
            let (s, c) = (tau * t).sin_cos();
            g += w * c;
            dg -= w * t * s;
        }
        (g, dg)
    };
    let g0 = g_at(0.0).0;
    let len = (spec.table_max / spec.table_step).ceil() as usize + 1;
    let table: Vec<(f64, f64)> = (0..len)
        .into_par_iter()
        .map(|j| g_at(j as f64 * spec.table_step))
        .collect();
    let (g_table, dg_table) = table.into_iter().unzip();

    let conv = |t: f64| gamma_conv(&gamma, t, spec.conv_panels);
    let scale = 2.0 * PI / (g0 * g0);
    let tab = |panels: usize| {
        let r = CompositeRule::uniform(gl16(), 0.0, 1.0, panels);
        let v: Vec<f64> = r.nodes.par_iter().map(|&t| scale * conv(t)).collect();
        (r, v)
    };
    let ahat_fine = tab(AHAT_FINE_PANELS);
    let ahat_coarse = tab(AHAT_COARSE_PANELS);

    Ok(Mollifier {
        spec,
        gamma,
        g0,
        g_table,
        dg_table,
        ahat_fine,
        ahat_coarse,
    })
}

/// `(γ * γ)(t) = ∫ γ(s) γ(t − s) ds`.
fn gamma_conv(gamma: &GammaProfile, t: f64, panels: usize) -> f64 {
    let t = t.abs();
    if t >= 1.0 {
        return 0.0;
    }
    let lo = t - 0.5;
    let hi = 0.5;
    CompositeRule::uniform(gl16(), lo, hi, panels).integrate(|s| gamma.eval(s) * gamma.eval(t - s))
}

/// Process-wide default mollifier, built on first use.
pub fn default_mollifier() -> &'static Mollifier {
    static M: std::sync::OnceLock<Mollifier> = std::sync::OnceLock::new();
    M.get_or_init(|| build_mollifier(MollifierSpec::default()).expect("default mollifier builds"))
}

impl Mollifier {
    pub fn spec(&self) -> &MollifierSpec {
        &self.spec
    }

    pub fn gamma(&self) -> &GammaProfile {
        &self.gamma
    }

    /// Largest tabulated argument; `a` is zero beyond.
    pub fn table_end(&self) -> f64 {
        (self.g_table.len() - 1) as f64 * self.spec.table_step
    }

    /// `g(τ)/g(0)` by cubic Hermite interpolation of the table.
    fn g_normalized(&self, tau: f64) -> f64 {
        let x = tau.abs();
        let h = self.spec.table_step;
        let pos = x / h;
        let j = pos.floor() as usize;
        if j + 1 >= self.g_table.len() {
            return 0.0;
        }
        let u = pos - j as f64;
        let (y0, y1) = (self.g_table[j], self.g_table[j + 1]);
        let (d0, d1) = (self.dg_table[j] * h, self.dg_table[j + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * d0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * d1;
        v / self.g0
    }

    /// `a(τ)`.
    pub fn a(&self, tau: f64) -> f64 {
        let g = self.g_normalized(tau);
        g * g
    }

    /// `b(τ) = a(τ)²`.
    pub fn b(&self, tau: f64) -> f64 {
        let a = self.a(tau);
        a * a
    }

    /// `a(τ)` by direct quadrature, bypassing the table.
    pub fn a_direct(&self, tau: f64) -> f64 {
        let panels = self.spec.gamma_panels.max((tau.abs() / 4.0).ceil() as usize);
        let g = CompositeRule::uniform(gl16(), 0.0, 0.5, panels)
            .integrate(|t| 2.0 * self.gamma.eval(t) * (tau * t).cos());
        (g / self.g0).powi(2)
    }

    /// `â(t) = (2π/g(0)²) (γ*γ)(t)`, zero for `|t| ≥ 1`.
    pub fn a_hat(&self, t: f64) -> f64 {
        2.0 * PI / (self.g0 * self.g0) * gamma_conv(&self.gamma, t, self.spec.conv_panels)
    }

    /// `b̂ = (1/2π) â * â`, supported in `(-2, 2)`.
    pub fn b_hat(&self, t: f64) -> f64 {
        let t = t.abs();
        if t >= 2.0 {
            return 0.0;
        }
        let lo = t - 1.0;
        CompositeRule::uniform(gl16(), lo, 1.0, 32).integrate(|s| self.a_hat(s) * self.a_hat(t - s))
            / (2.0 * PI)
    }

    /// Smallest `τ_R` with `a(τ) < threshold` for all tabulated `τ ≥ τ_R`.
    pub fn decay_radius(&self, threshold: f64) -> f64 {
        let h = self.spec.table_step;
        for j in (0..self.g_table.len()).rev() {
            let v = self.g_table[j] / self.g0;
            if v * v >= threshold {
                return (j + 1) as f64 * h;
            }
        }
        0.0
    }

    /// `(1/π) ∫_{-1}^{1} â(s) cos(sλ/ε) cos(sμ/ε) ds` using one of the cached
    /// `â` tables.
    fn frequency_side(&self, table: &(CompositeRule, Vec<f64>), mu: f64, lambda: f64, eps: f64) -> f64 {
        let (rule, vals) = table;
        let (wl, wm) = (lambda / eps, mu / eps);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .zip(vals)
            .map(|((&s, &w), &v)| w * v * (s * wl).cos() * (s * wm).cos())
            .sum::<f64>()
            * 2.0
            / PI
    }

    /// Discrepancy between `(ε/π)∫ â(εt) e^{-itλ} cos(tμ) dt` and
    /// `a((μ−λ)/ε) + a((−μ−λ)/ε)`.
    pub fn frequency_identity_check(&self, mu: f64, lambda: f64, eps: f64) -> Result<f64> {
        if !(mu >= 0.0 && lambda >= 0.0 && eps > 0.0) {
            return Err(Error::Domain(format!(
                "identity check needs mu >= 0, lambda >= 0, eps > 0 (got {mu}, {lambda}, {eps})"
            )));
        }
        let omega = (lambda + mu) / eps;
        // 16-point panels resolve up to ~8 radians each
        let max_omega = 8.0 * AHAT_COARSE_PANELS as f64;
        if omega > max_omega {
            return Err(Error::Numeric(format!(
                "oscillation {omega:.1} rad exceeds resolvable {max_omega:.1} rad \
                 ({AHAT_COARSE_PANELS} coarse / {AHAT_FINE_PANELS} fine panels)"
            )));
        }
        let fine = self.frequency_side(&self.ahat_fine, mu, lambda, eps);
        let coarse = self.frequency_side(&self.ahat_coarse, mu, lambda, eps);
        if (fine - coarse).abs() > 1e-10 {
            return Err(Error::Numeric(format!(
                "frequency-side quadrature not converged: fine={fine:.3e}, coarse={coarse:.3e}"
            )));
        }
        let time_side = self.a((mu - lambda) / eps) + self.a((-mu - lambda) / eps);
        Ok((fine - time_side).abs())
    }

    /// Largest grid-certified `δ` with `b ≥ 1/2` on `[0, δ]`.
    pub fn half_level_delta(&self) -> f64 {
        let step = 1e-3;
        let mut t = 0.0;
        while self.b(t + step) >= 0.5 {
            t += step;
        }
        // bisection between the last certified point and the first failure
        let (mut lo, mut hi) = (t, t + step);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.b(mid) >= 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `H(τ) = ∫ w(t) â(εt) e^{-iτt} dt` for a single `τ`.
    pub fn h_eps(&self, window: TimeWindow, eps: f64, tau: f64) -> f64 {
        HTransform::new(self, window, eps, tau.abs() + 1.0).eval(tau)
    }

    /// `H_ε` with the cutoff `c`.
    pub fn h_eps_cutoff(&self, c: Cutoff, eps: f64, tau: f64) -> f64 {
        self.h_eps(TimeWindow::Cutoff(c), eps, tau)
    }
}

/// Precomputed quadrature for `H(τ) = 2∫_0^T w(t) â(εt) cos(τt) dt`, valid
/// for `|τ| ≤ tau_max`.
#[derive(Debug, Clone)]
pub struct HTransform {
    nodes: Vec<f64>,
    weighted: Vec<f64>,
    pub tau_max: f64,
}

impl HTransform {
    pub fn new(m: &Mollifier, window: TimeWindow, eps: f64, tau_max: f64) -> Self {
        let support = 1.0 / eps;
        let end = match window {
            TimeWindow::Cutoff(c) => c.outer.min(support),
            _ => support,
        };
        if window.vanishes_on(end) {
            return Self {
                nodes: Vec::new(),
                weighted: Vec::new(),
                tau_max,
            };
        }
        let mut rule = CompositeRule::default();
        let pts = window.breakpoints(end);
        // ~4 rad of oscillation per 16-point panel, plus resolution of â(εt)
        let h = (4.0 / tau_max.max(1.0)).min(0.05 / eps).min(0.25);
        for w in pts.windows(2) {
            if w[1] > w[0] {
                rule.extend(CompositeRule::with_max_width(gl16(), w[0], w[1], h));
            }
        }
        let weighted: Vec<f64> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&t, &wt)| 2.0 * wt * window.eval(t) * m.a_hat(eps * t))
            .collect();
        Self {
            nodes: rule.nodes,
            weighted,
            tau_max,
        }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&t, &w)| w * (tau * t).cos())
            .sum()
    }
}

/// `sup_τ (1+|τ|)^N |f(τ)|` over the given sample points.
pub fn decay_constant<F: Fn(f64) -> f64>(f: F, order: i32, taus: &[f64]) -> f64 {
    taus.iter()
        .map(|&t| (1.0 + t.abs()).powi(order) * f(t).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> &'static Mollifier {
        default_mollifier()
    }

    #[test]
    fn normalization_and_support() {
        assert!((m().a(0.0) - 1.0).abs() < 1e-10);
        assert!((m().b(0.0) - 1.0).abs() < 1e-10);
        assert_eq!(m().a_hat(1.5), 0.0);
        assert_eq!(m().a_hat(-1.0), 0.0);
        assert_eq!(m().b_hat(2.5), 0.0);
        assert!(m().a_hat(0.9) > 0.0);
    }

    #[test]
    fn inversion_at_zero() {
        // a(0) = (1/2π) ∫ â
        let v = CompositeRule::uniform(gl16(), 0.0, 1.0, 64).integrate(|t| m().a_hat(t)) * 2.0;
        assert!((v / (2.0 * PI) - 1.0).abs() < 1e-10);
        // b(0) = (1/2π) ∫ b̂
        let v = CompositeRule::uniform(gl16(), 0.0, 2.0, 32).integrate(|t| m().b_hat(t)) * 2.0;
        assert!((v / (2.0 * PI) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn table_matches_direct_quadrature() {
        for tau in [0.37, 3.0, 17.123, 49.99, 123.4, 333.3] {
            let t = m().a(tau);
            let d = m().a_direct(tau);
            assert!((t - d).abs() < 1e-11, "tau={tau}: table {t} direct {d}");
        }
    }

    #[test]
    fn evenness_and_sign() {
        for i in 0..2000 {
            let tau = i as f64 * 0.173;
            assert!((m().a(tau) - m().a(-tau)).abs() < 1e-12);
            assert!(m().a(tau) >= -1e-12);
        }
    }

    #[test]
    fn tail_decay() {
        // the default bump decays like exp(-c sqrt τ): a(50) ~ 1e-5
        assert!(m().a(50.0) < 1e-4);
        assert!(m().a(100.0) < 1e-7);
        assert!(m().decay_radius(1e-14) < 450.0);
        let taus: Vec<f64> = (0..8000).map(|i| i as f64 * 0.1).collect();
        for order in [2, 4, 8] {
            let c = decay_constant(|t| m().a(t), order, &taus);
            assert!(c.is_finite() && c > 0.0);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let odd = GammaProfile::custom("odd", |t| t);
        assert!(matches!(
            build_mollifier_with(odd, MollifierSpec::default()),
            Err(Error::Construction(_))
        ));
        let sign = GammaProfile::custom("sign", |t| (8.0 * t).cos());
        assert!(matches!(
            build_mollifier_with(sign, MollifierSpec::default()),
            Err(Error::Construction(_))
        ));
        let zero = GammaProfile::custom("zero", |_| 0.0);
        assert!(build_mollifier_with(zero, MollifierSpec::default()).is_err());
    }

    #[test]
    fn custom_profile_builds() {
        let spec = MollifierSpec {
            table_max: 100.0,
            ..MollifierSpec::default()
        };
        let p = GammaProfile::custom("cos2", |t| {
            let c = (PI * t).cos();
            (-1.0 / (c * c).max(1e-300)).exp()
        });
        let mo = build_mollifier_with(p, spec).unwrap();
        assert!((mo.a(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_examples() {
        let (lambda, eps) = (20.0, 0.5);
        assert!(m().frequency_identity_check(lambda, lambda, eps).unwrap() <= 1e-8);
        assert!(m().frequency_identity_check(lambda + 3.0 * eps, lambda, eps).unwrap() <= 1e-8);
        assert!(m().frequency_identity_check(0.0, lambda, eps).unwrap() <= 1e-10);
        assert!(m().frequency_identity_check(-1.0, lambda, eps).is_err());
        assert!(matches!(
            m().frequency_identity_check(1e5, 1e5, 0.01),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn half_level() {
        let d = m().half_level_delta();
        assert!(d > 0.0);
        assert!(m().b(d) >= 0.5);
        assert!(m().b(d + 1e-9) < 0.5);
        for i in 0..=1000 {
            assert!(m().b(d * i as f64 / 1000.0) >= 0.5);
        }
    }

    #[test]
    fn plancherel() {
        let end = m().table_end();
        let time = CompositeRule::with_max_width(gl16(), 0.0, end, 0.5).integrate(|t| m().a(t).powi(2)) * 2.0;
        let freq = CompositeRule::uniform(gl16(), 0.0, 1.0, 64).integrate(|t| m().a_hat(t).powi(2)) * 2.0
            / (2.0 * PI);
        assert!((time - freq).abs() < 1e-8, "time {time} freq {freq}");
    }

    #[test]
    fn h_eps_properties() {
        let c = Cutoff::default();
        // ∫ H_ε = 2π c(0) â(0)
        for eps in [0.1, 0.5, 1.0] {
            let h = HTransform::new(m(), TimeWindow::Cutoff(c), eps, 400.0);
            let total = CompositeRule::with_max_width(gl16(), 0.0, 400.0, 0.25).integrate(|t| h.eval(t)) * 2.0;
            assert!((total - 2.0 * PI * m().a_hat(0.0)).abs() < 1e-6, "eps={eps}: {total}");
        }
        // ε → 0: H_ε → â(0) ĉ
        let small = 1e-4;
        for tau in [0.0, 1.5, 4.0] {
            let h = m().h_eps_cutoff(c, small, tau);
            let c_hat = CompositeRule::uniform(gl16(), 0.0, 2.0, 32).integrate(|t| 2.0 * c.eval(t) * (tau * t).cos());
            assert!((h - m().a_hat(0.0) * c_hat).abs() < 1e-4 * m().a_hat(0.0).max(1.0), "tau={tau}");
        }
    }

    #[test]
    fn cutoff_shape() {
        let c = Cutoff::default();
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(-1.0), 1.0);
        assert_eq!(c.eval(2.0), 0.0);
        assert!((c.eval(1.5) - 0.5).abs() < 1e-15);
        assert!(Cutoff::new(2.0, 1.0).is_err());
    }
}
