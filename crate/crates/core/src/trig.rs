//! Finite trigonometric polynomials on the torus and exact sampling on
//! uniform grids.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Maximum number of grid points we are willing to allocate.
pub const MAX_GRID_POINTS: usize = 1 << 26;

/// `f(x) = Σ_q c_q e^{iq·x}` with finitely many nonzero `c_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    n: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPoly {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, Complex64)>>(n: usize, terms: I) -> Result<Self> {
        let mut p = Self::new(n);
        for (q, c) in terms {
            p.add_term(q, c)?;
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, q: Vec<i64>, c: Complex64) -> Result<()> {
        if q.len() != self.n {
            return Err(Error::Shape {
                expected: self.n,
                got: q.len(),
            });
        }
        *self.coeffs.entry(q).or_insert(Complex64::new(0.0, 0.0)) += c;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, q: &[i64]) -> Complex64 {
        self.coeffs.get(q).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|q_i|` over all terms and axes.
    pub fn max_frequency(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|q| q.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(q, c)| {
                let phase: f64 = q.iter().zip(x).map(|(&qi, &xi)| qi as f64 * xi).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Coefficients of `|f|²`: `w_s = Σ_{q−q'=s} c_q conj(c_{q'})`.
    pub fn abs_sq(&self) -> TrigPoly {
        let mut out = TrigPoly::new(self.n);
        for (q, c) in &self.coeffs {
            for (q2, c2) in &self.coeffs {
                let s: Vec<i64> = q.iter().zip(q2).map(|(a, b)| a - b).collect();
                *out.coeffs.entry(s).or_default() += c * c2.conj();
            }
        }
        out
    }

    /// `Σ |c_q|²`.
    pub fn coeff_norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Exact samples at `x_j = 2π j / g` on the `g^n` grid.
    pub fn sample(&self, g: usize) -> Result<Grid> {
        let mut grid = Grid::zeros(self.n, g)?;
        for (q, c) in &self.coeffs {
            let idx = grid.wrap_index(q);
            grid.values[idx] += c;
        }
        grid.inverse_dft();
        Ok(grid)
    }
}

/// Values on the uniform `g^n` grid, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub g: usize,
    pub values: Vec<Complex64>,
}

impl Grid {
    pub fn zeros(n: usize, g: usize) -> Result<Self> {
        let total = g
            .checked_pow(n as u32)
            .filter(|&t| t <= MAX_GRID_POINTS)
            .ok_or_else(|| Error::Capacity(format!("grid {g}^{n} exceeds {MAX_GRID_POINTS} points")))?;
        Ok(Self {
            n,
            g,
            values: vec![Complex64::new(0.0, 0.0); total],
        })
    }

    /// Flat index of the frequency `q` reduced mod `g`.
    pub fn wrap_index(&self, q: &[i64]) -> usize {
        let g = self.g as i64;
        q.iter()
            .fold(0usize, |acc, &qi| acc * self.g + qi.rem_euclid(g) as usize)
    }

    /// Grid coordinates of flat index `idx`.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let h = 2.0 * std::f64::consts::PI / self.g as f64;
        let mut x = vec![0.0; self.n];
        for i in (0..self.n).rev() {
            x[i] = (idx % self.g) as f64 * h;
            idx /= self.g;
        }
        x
    }

    /// Cell volume `(2π/g)^n`.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI / self.g as f64).powi(self.n as i32)
    }

    /// Unnormalized inverse DFT along every axis: `Σ_k v_k e^{+2πi j·k/g}`.
    fn inverse_dft(&mut self) {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(self.g, FftDirection::Inverse);
        let g = self.g;
        let total = self.values.len();
        let mut line = vec![Complex64::new(0.0, 0.0); g];
        for axis in 0..self.n {
            let stride = g.pow((self.n - 1 - axis) as u32);
            let block = stride * g;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = self.values[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        self.values[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Smallest power of two `≥ m`.
pub fn next_pow2(m: usize) -> usize {
    m.max(1).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_matches_direct_evaluation() {
        let p = TrigPoly::from_terms(
            2,
            [
                (vec![0, 0], Complex64::new(1.0, 0.0)),
                (vec![3, -1], Complex64::new(0.5, -0.25)),
                (vec![-2, 5], Complex64::new(-0.1, 0.7)),
            ],
        )
        .unwrap();
        let grid = p.sample(16).unwrap();
        for idx in [0, 1, 17, 100, 255] {
            let x = grid.point(idx);
            assert!((grid.values[idx] - p.eval(&x)).norm() < 1e-13);
        }
    }

    #[test]
    fn abs_sq_matches_pointwise() {
        let p = TrigPoly::from_terms(
            3,
            [
                (vec![1, 0, 0], Complex64::new(1.0, 1.0)),
                (vec![0, -2, 1], Complex64::new(0.3, 0.0)),
            ],
        )
        .unwrap();
        let w = p.abs_sq();
        let x = [0.3, -1.2, 2.2];
        assert!((w.eval(&x).re - p.eval(&x).norm_sqr()).abs() < 1e-14);
        assert!(w.eval(&x).im.abs() < 1e-14);
    }

    #[test]
    fn shape_checked() {
        let mut p = TrigPoly::new(2);
        assert!(matches!(p.add_term(vec![1], Complex64::default()), Err(Error::Shape { .. })));
    }

    #[test]
    fn grid_cap() {
        assert!(matches!(Grid::zeros(8, 1024), Err(Error::Capacity(_))));
    }
}
