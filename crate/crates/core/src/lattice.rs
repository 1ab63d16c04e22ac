//! Exact enumeration of integer frequency vectors in balls, shells and thin
//! annuli of `Z^n`.
//!
//! The torus is `R^n / (2πZ)^n`, so the exponential `e^{ik·x}` is an
//! eigenfunction of `sqrt(-Δ)` with eigenvalue `|k|`. A spectral band
//! `[λ, λ+ε)` therefore corresponds to the annulus `λ² ≤ |k|² < (λ+ε)²`.
//!
//! Band endpoints are converted to exact decimal rationals (the shortest
//! decimal that round-trips the `f64`) and squared exactly, so membership of
//! the integer `|k|²` is never decided by a floating-point comparison.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported torus dimension.
pub const MAX_DIM: usize = 8;

/// Upper limit on squared norms handled with `u64` arithmetic.
pub const MAX_NORM_SQ: u64 = 1 << 60;

/// Default cube size guard for [`brute_force_band_oracle`].
pub const DEFAULT_ORACLE_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusConfig {
    n: usize,
}

impl TorusConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "torus dimension must be at least 2, got {n}"
            )));
        }
        if n > MAX_DIM {
            return Err(Error::InvalidConfig(format!(
                "torus dimension {n} exceeds supported maximum {MAX_DIM}"
            )));
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(2π)^n`, the volume of the torus.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.n as i32)
    }

    /// Pointwise value of `|e_k|²` for the normalized exponentials.
    pub fn eigenfunction_sq(&self) -> f64 {
        1.0 / self.volume()
    }
}

/// The half-open band `[lambda, lambda + epsilon)` in `sqrt(-Δ)` units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBand {
    lambda: f64,
    epsilon: f64,
}

impl SpectralBand {
    pub fn new(lambda: f64, epsilon: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "band start must be finite and non-negative, got {lambda}"
            )));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "band width must be finite and positive, got {epsilon}"
            )));
        }
        let band = Self { lambda, epsilon };
        let hi = band.upper_sq_exact();
        if hi > BigRational::from_integer(BigInt::from(MAX_NORM_SQ)) {
            return Err(Error::Range(format!(
                "(lambda + epsilon)^2 exceeds 2^60 for lambda={lambda}, epsilon={epsilon}"
            )));
        }
        Ok(band)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn upper(&self) -> f64 {
        self.lambda + self.epsilon
    }

    /// Whether `1/λ < ε ≤ 1`, the regime of the shrinking-band estimates.
    pub fn in_shrinking_regime(&self) -> bool {
        self.lambda >= 1.0 && self.epsilon * self.lambda > 1.0 && self.epsilon <= 1.0
    }

    pub(crate) fn lower_sq_exact(&self) -> BigRational {
        let l = exact_decimal(self.lambda);
        &l * &l
    }

    pub(crate) fn upper_sq_exact(&self) -> BigRational {
        let u = exact_decimal(self.lambda) + exact_decimal(self.epsilon);
        &u * &u
    }

    /// Integer window `[lo, hi)` of squared norms belonging to the band.
    pub fn norm_window(&self) -> NormWindow {
        let lo = self.lower_sq_exact().ceil().to_integer();
        let hi = self.upper_sq_exact().ceil().to_integer();
        NormWindow {
            lo: lo.to_u64().expect("band validated against MAX_NORM_SQ"),
            hi: hi.to_u64().expect("band validated against MAX_NORM_SQ"),
        }
    }
}

/// Half-open window `lo ≤ |k|² < hi` of exact squared norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormWindow {
    pub lo: u64,
    pub hi: u64,
}

impl NormWindow {
    pub fn contains(&self, m: u64) -> bool {
        self.lo <= m && m < self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }
}

/// Converts an `f64` to the exact rational value of its shortest
/// round-tripping decimal representation.
pub fn exact_decimal(x: f64) -> BigRational {
    let s = format!("{x:e}");
    let (mant, exp) = s.split_once('e').expect("`{:e}` always has an exponent");
    let exp: i64 = exp.parse().expect("valid exponent");
    let negative = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .expect("decimal digits");
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    value
}

/// An integer frequency vector with its exact squared norm.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencyVector {
    pub k: Vec<i64>,
    pub norm_sq: u64,
}

impl FrequencyVector {
    pub fn new(k: Vec<i64>) -> Self {
        let norm_sq = k.iter().map(|&c| (c * c) as u64).sum();
        Self { k, norm_sq }
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq as f64).sqrt()
    }
}

impl PartialOrd for FrequencyVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FrequencyVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k.cmp(&other.k)
    }
}

/// All integer frequencies of a band, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCluster {
    pub config: TorusConfig,
    pub band: SpectralBand,
    pub freqs: Vec<FrequencyVector>,
}

impl SpectralCluster {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    /// Position of `k` in the sorted frequency list.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        self.freqs.binary_search_by(|f| f.k.as_slice().cmp(k)).ok()
    }
}

/// `(a, b)` with `a = ceil(sqrt(lo))`, `b = floor(sqrt(hi))`.
fn coordinate_range(lo: u64, hi: u64) -> Option<(i64, i64)> {
    let b = hi.sqrt();
    let mut a = lo.sqrt();
    if a * a < lo {
        a += 1;
    }
    (a <= b).then_some((a as i64, b as i64))
}

/// Visits, in lexicographic order, every `k` with `prefix` fixed and
/// `lo ≤ |k|² < hi`.
fn visit_rec<F: FnMut(&[i64], u64)>(
    n: usize,
    prefix: &mut Vec<i64>,
    partial: u64,
    window: NormWindow,
    f: &mut F,
) {
    if window.hi <= partial {
        return;
    }
    let budget = window.hi - 1 - partial;
    if prefix.len() + 1 == n {
        let need = window.lo.saturating_sub(partial);
        let Some((a, b)) = coordinate_range(need, budget) else {
            return;
        };
        for k in (a.max(1)..=b).rev().map(|k| -k) {
            prefix.push(k);
            f(prefix, partial + (k * k) as u64);
            prefix.pop();
        }
        for k in a..=b {
            prefix.push(k);
            f(prefix, partial + (k * k) as u64);
            prefix.pop();
        }
        return;
    }
    let b = budget.sqrt() as i64;
    for k in -b..=b {
        prefix.push(k);
        visit_rec(n, prefix, partial + (k * k) as u64, window, f);
        prefix.pop();
    }
}

/// Calls `f(k, |k|²)` for each lattice point in the window, in lexicographic
/// order.
pub fn visit_window<F: FnMut(&[i64], u64)>(n: usize, window: NormWindow, mut f: F) {
    if window.is_empty() {
        return;
    }
    let mut prefix = Vec::with_capacity(n);
    visit_rec(n, &mut prefix, 0, window, &mut f);
}

fn count_rec(n: usize, depth: usize, partial: u64, window: NormWindow) -> u64 {
    if window.hi <= partial {
        return 0;
    }
    let budget = window.hi - 1 - partial;
    if depth + 1 == n {
        let need = window.lo.saturating_sub(partial);
        return match coordinate_range(need, budget) {
            None => 0,
            Some((0, b)) => 2 * b as u64 + 1,
            Some((a, b)) => 2 * (b - a + 1) as u64,
        };
    }
    let b = budget.sqrt() as i64;
    (-b..=b)
        .map(|k| count_rec(n, depth + 1, partial + (k * k) as u64, window))
        .sum()
}

/// Number of lattice points with `lo ≤ |k|² < hi`.
pub fn count_window(n: usize, window: NormWindow) -> u64 {
    if window.is_empty() {
        return 0;
    }
    if n == 1 {
        return count_rec(1, 0, 0, window);
    }
    let b = (window.hi - 1).sqrt() as i64;
    (-b..=b)
        .into_par_iter()
        .map(|k| count_rec(n, 1, (k * k) as u64, window))
        .sum()
}

/// Exact enumeration of the band's frequencies.
///
/// Work is proportional to the annulus plus the projection of the ball onto
/// the first `n-1` coordinates; the leading coordinate is split across
/// threads and merged in order.
pub fn enumerate_band(cfg: &TorusConfig, band: &SpectralBand) -> Result<SpectralCluster> {
    let n = cfg.dim();
    let window = band.norm_window();
    let freqs = if window.is_empty() {
        Vec::new()
    } else {
        let b = (window.hi - 1).sqrt() as i64;
        let chunks: Vec<Vec<FrequencyVector>> = (-b..=b)
            .into_par_iter()
            .map(|k0| {
                let mut out = Vec::new();
                let mut prefix = vec![k0];
                let partial = (k0 * k0) as u64;
                visit_rec(n, &mut prefix, partial, window, &mut |k, m| {
                    out.push(FrequencyVector {
                        k: k.to_vec(),
                        norm_sq: m,
                    })
                });
                out
            })
            .collect();
        chunks.into_iter().flatten().collect()
    };
    Ok(SpectralCluster {
        config: *cfg,
        band: *band,
        freqs,
    })
}

/// Cardinality of the band without materializing its vectors.
pub fn count_band(cfg: &TorusConfig, band: &SpectralBand) -> u64 {
    count_window(cfg.dim(), band.norm_window())
}

/// `#{k : |k|² = m}`.
pub fn shell_multiplicity(cfg: &TorusConfig, m: u64) -> u64 {
    count_window(cfg.dim(), NormWindow { lo: m, hi: m + 1 })
}

/// Histogram of squared norms over a window: entry `i` counts `|k|² = lo + i`.
pub fn shell_histogram(cfg: &TorusConfig, window: NormWindow) -> Vec<u64> {
    if window.is_empty() {
        return Vec::new();
    }
    let len = (window.hi - window.lo) as usize;
    let n = cfg.dim();
    let b = (window.hi - 1).sqrt() as i64;
    (-b..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; len],
            |mut hist, k0| {
                let mut prefix = vec![k0];
                visit_rec(n, &mut prefix, (k0 * k0) as u64, window, &mut |_, m| {
                    hist[(m - window.lo) as usize] += 1
                });
                hist
            },
        )
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallCount {
    pub radius: f64,
    pub count: u64,
    /// `ω_n r^n`.
    pub volume_term: f64,
    /// `count - ω_n r^n`.
    pub remainder: f64,
}

/// `#{k ∈ Z^n : |k| ≤ r}` with its Weyl remainder.
pub fn count_ball(cfg: &TorusConfig, r: f64) -> Result<BallCount> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
    }
    let r_exact = exact_decimal(r);
    let r_sq = (&r_exact * &r_exact).floor().to_integer();
    let r_sq = r_sq
        .to_u64()
        .filter(|&m| m < MAX_NORM_SQ)
        .ok_or_else(|| Error::Range(format!("radius {r} too large for exact counting")))?;
    let count = count_window(cfg.dim(), NormWindow { lo: 0, hi: r_sq + 1 });
    let volume_term = unit_ball_volume(cfg.dim()) * r.powi(cfg.dim() as i32);
    Ok(BallCount {
        radius: r,
        count,
        volume_term,
        remainder: count as f64 - volume_term,
    })
}

/// Full scan of the cube `[-R, R]^n`, `R = floor(λ+ε) + 1`, with membership
/// decided by exact rational comparison. Slow by construction; serves as the
/// reference for [`enumerate_band`].
pub fn brute_force_band_oracle(cfg: &TorusConfig, band: &SpectralBand) -> Result<SpectralCluster> {
    brute_force_band_oracle_with_cap(cfg, band, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_band_oracle_with_cap(
    cfg: &TorusConfig,
    band: &SpectralBand,
    cap: u64,
) -> Result<SpectralCluster> {
    let n = cfg.dim();
    let half = band.upper().floor() as i64 + 1;
    let side = (2 * half + 1) as f64;
    let cells = side.powi(n as i32);
    if cells > cap as f64 {
        return Err(Error::Capacity(format!(
            "oracle cube has {cells:.3e} cells, cap is {cap}"
        )));
    }
    let lo = band.lower_sq_exact();
    let hi = band.upper_sq_exact();
    let mut freqs = Vec::new();
    let mut k = vec![-half; n];
    loop {
        let m: i64 = k.iter().map(|c| c * c).sum();
        let m_rat = BigRational::from_integer(BigInt::from(m));
        if m_rat >= lo && m_rat < hi {
            freqs.push(FrequencyVector::new(k.clone()));
        }
        // odometer, last coordinate fastest: lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(SpectralCluster {
                    config: *cfg,
                    band: *band,
                    freqs,
                });
            }
            i -= 1;
            if k[i] < half {
                k[i] += 1;
                break;
            }
            k[i] = -half;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize) -> TorusConfig {
        TorusConfig::new(n).unwrap()
    }

    #[test]
    fn dimension_validation() {
        assert!(matches!(TorusConfig::new(1), Err(Error::InvalidConfig(_))));
        assert!(matches!(TorusConfig::new(9), Err(Error::InvalidConfig(_))));
        assert!(TorusConfig::new(2).is_ok());
    }

    #[test]
    fn exact_decimal_matches_intent() {
        let s = exact_decimal(0.9) + exact_decimal(0.1);
        assert_eq!(s, BigRational::from_integer(1.into()));
        assert_eq!(exact_decimal(5.1) * BigRational::from_integer(10.into()), BigRational::from_integer(51.into()));
        assert_eq!(exact_decimal(-2.5e-3), BigRational::new((-25).into(), 10000.into()));
        assert_eq!(exact_decimal(1e20), BigRational::from_integer(num_traits::pow(BigInt::from(10), 20)));
    }

    #[test]
    fn window_is_half_open() {
        // [0.9, 1.0) must exclude |k|² = 1
        let w = SpectralBand::new(0.9, 0.1).unwrap().norm_window();
        assert_eq!(w, NormWindow { lo: 1, hi: 1 });
        let w = SpectralBand::new(5.0, 1.0).unwrap().norm_window();
        assert_eq!(w, NormWindow { lo: 25, hi: 36 });
    }

    #[test]
    fn band_5_to_5_1_in_2d() {
        let c = enumerate_band(&cfg(2), &SpectralBand::new(5.0, 0.1).unwrap()).unwrap();
        assert_eq!(c.len(), 20);
        assert_eq!(c.freqs.iter().filter(|f| f.norm_sq == 25).count(), 12);
        assert_eq!(c.freqs.iter().filter(|f| f.norm_sq == 26).count(), 8);
        assert!(c.freqs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_band() {
        let c = enumerate_band(&cfg(2), &SpectralBand::new(1.2, 0.2).unwrap()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn band_1_to_1_5_in_3d() {
        let c = enumerate_band(&cfg(3), &SpectralBand::new(1.0, 0.5).unwrap()).unwrap();
        assert_eq!(c.len(), 18);
    }

    #[test]
    fn ball_counts() {
        assert_eq!(count_ball(&cfg(2), 0.0).unwrap().count, 1);
        assert_eq!(count_ball(&cfg(2), 5.0).unwrap().count, 81);
        assert_eq!(count_ball(&cfg(3), 1.0).unwrap().count, 7);
        assert!(count_ball(&cfg(2), -1.0).is_err());
    }

    #[test]
    fn shells() {
        assert_eq!(shell_multiplicity(&cfg(2), 25), 12);
        assert_eq!(shell_multiplicity(&cfg(2), 3), 0);
        assert_eq!(shell_multiplicity(&cfg(4), 1), 8);
        assert_eq!(shell_multiplicity(&cfg(2), 0), 1);
    }

    #[test]
    fn histogram_matches_multiplicities() {
        let c = cfg(3);
        let w = NormWindow { lo: 10, hi: 60 };
        let h = shell_histogram(&c, w);
        for (i, &count) in h.iter().enumerate() {
            assert_eq!(count, shell_multiplicity(&c, 10 + i as u64));
        }
    }

    #[test]
    fn oracle_agrees_small() {
        let c = cfg(3);
        let band = SpectralBand::new(10.0, 0.05).unwrap();
        let fast = enumerate_band(&c, &band).unwrap();
        let slow = brute_force_band_oracle(&c, &band).unwrap();
        assert_eq!(fast.freqs, slow.freqs);
    }

    #[test]
    fn oracle_capacity_guard() {
        let band = SpectralBand::new(100.0, 1.0).unwrap();
        let err = brute_force_band_oracle_with_cap(&cfg(3), &band, 1000).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn range_guard() {
        assert!(matches!(SpectralBand::new(2e9, 1.0), Err(Error::Range(_))));
        assert!(SpectralBand::new(1.0, 0.0).is_err());
    }

    #[test]
    fn ball_volumes() {
        use std::f64::consts::PI;
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-15);
    }
}
