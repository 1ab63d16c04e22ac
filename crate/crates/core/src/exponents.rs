//! Exponent bookkeeping for the cluster bounds: `σ(p)`, `α(p)`, the
//! shrinking band width `ε(λ)` and the right-hand side of the interpolated
//! `L^{p/2}` density bound.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Lebesgue exponent `p ∈ [2, ∞]`, with `∞` kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(p >= 2.0) {
            return Err(Error::Domain(format!("exponent p must be >= 2, got {p}")));
        }
        Ok(Exponent::Finite(p))
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `p/2`, the Lebesgue index of the density norm.
    pub fn half(&self) -> f64 {
        self.as_f64() / 2.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("cannot parse exponent '{s}'")))
                .and_then(Exponent::new),
        }
    }
}

/// `2(n+1)/(n-1)`, where the two branches of `σ` and `α` meet.
pub fn critical_p(n: usize) -> f64 {
    2.0 * (n as f64 + 1.0) / (n as f64 - 1.0)
}

fn is_subcritical(n: usize, p: Exponent) -> bool {
    match p {
        Exponent::Finite(p) => p < critical_p(n),
        Exponent::Infinity => false,
    }
}

/// Lower branch of `σ`, valid for `2 ≤ p ≤ p_c`.
pub fn sigma_low(n: usize, p: Exponent) -> f64 {
    (n as f64 - 1.0) / 2.0 * (0.5 - p.reciprocal())
}

/// Upper branch of `σ`, valid for `p_c ≤ p ≤ ∞`.
pub fn sigma_high(n: usize, p: Exponent) -> f64 {
    n as f64 * (0.5 - p.reciprocal()) - 0.5
}

/// Lower branch of `α`: `2p/(p+2)`.
pub fn alpha_low(_n: usize, p: Exponent) -> f64 {
    match p {
        Exponent::Finite(p) => 2.0 * p / (p + 2.0),
        Exponent::Infinity => 2.0,
    }
}

/// Upper branch of `α`: `p(n-1)/(2n)`, infinite at `p = ∞`.
pub fn alpha_high(n: usize, p: Exponent) -> f64 {
    match p {
        Exponent::Finite(p) => p * (n as f64 - 1.0) / (2.0 * n as f64),
        Exponent::Infinity => f64::INFINITY,
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("dimension must be >= 2, got {n}")));
    }
    Ok(())
}

fn check_p(p: Exponent) -> Result<()> {
    match p {
        Exponent::Finite(v) if !(v >= 2.0) => Err(Error::Domain(format!("exponent p must be >= 2, got {v}"))),
        _ => Ok(()),
    }
}

/// Growth exponent `σ(p)` of single-function cluster bounds.
pub fn sigma(n: usize, p: Exponent) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    Ok(if is_subcritical(n, p) {
        sigma_low(n, p)
    } else {
        sigma_high(n, p)
    })
}

/// Schatten exponent `α(p)` governing the gain from orthogonality.
pub fn alpha(n: usize, p: Exponent) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    Ok(if is_subcritical(n, p) {
        alpha_low(n, p)
    } else {
        alpha_high(n, p)
    })
}

/// Hölder conjugate of an exponent in `[1, ∞]`.
pub fn conjugate(a: f64) -> f64 {
    if a.is_infinite() {
        1.0
    } else if a == 1.0 {
        f64::INFINITY
    } else {
        a / (a - 1.0)
    }
}

/// Power of `ε` in the interpolated bound: `1 − 2(n+1)/(p(n−1))`.
pub fn eps_power(n: usize, p: Exponent) -> f64 {
    1.0 - 2.0 * (n as f64 + 1.0) * p.reciprocal() / (n as f64 - 1.0)
}

/// Shrinking band width `ε(λ) = λ^{-(n-1)/(n+1)}`.
pub fn shrink_rate(n: usize, lambda: f64) -> Result<f64> {
    check_n(n)?;
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("shrink rate needs lambda >= 1, got {lambda}")));
    }
    Ok(lambda.powf(-(n as f64 - 1.0) / (n as f64 + 1.0)))
}

/// `λ^{2σ(p)} ε^{epsPower} dimR^{1/α(p)}` for `p ≥ p_c`.
pub fn density_norm_bound(n: usize, p: Exponent, lambda: f64, eps: f64, dim_r: usize) -> Result<f64> {
    check_n(n)?;
    if is_subcritical(n, p) {
        return Err(Error::Domain(format!(
            "interpolated bound needs p >= {}, got {p}",
            critical_p(n)
        )));
    }
    let s = sigma_high(n, p);
    let a = alpha_high(n, p);
    Ok(lambda.powf(2.0 * s) * eps.powf(eps_power(n, p)) * (dim_r as f64).powf(1.0 / a))
}

/// One row of the exponent table printed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub n: usize,
    pub p: Exponent,
    pub sigma: f64,
    pub alpha: f64,
    pub eps_power: f64,
    pub critical_p: f64,
}

pub fn profile(n: usize, p: Exponent) -> Result<ExponentProfile> {
    Ok(ExponentProfile {
        n,
        p,
        sigma: sigma(n, p)?,
        alpha: alpha(n, p)?,
        eps_power: eps_power(n, p),
        critical_p: critical_p(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn sigma_examples() {
        for n in 2..=8 {
            assert_eq!(sigma(n, f(2.0)).unwrap(), 0.0);
        }
        assert_eq!(sigma(3, Exponent::Infinity).unwrap(), 1.0);
        assert!((sigma_low(2, f(6.0)) - 1.0 / 6.0).abs() < 1e-15);
        assert!((sigma_high(2, f(6.0)) - 1.0 / 6.0).abs() < 1e-15);
        assert!(matches!(sigma(2, Exponent::Finite(1.5)), Err(Error::Domain(_))));
        assert!(Exponent::new(1.0).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(3, f(2.0)).unwrap(), 1.0);
        assert!((alpha_low(2, f(6.0)) - 1.5).abs() < 1e-15);
        assert!((alpha_high(2, f(6.0)) - 1.5).abs() < 1e-15);
        assert_eq!(alpha(2, f(12.0)).unwrap(), 3.0);
        assert!(alpha(2, Exponent::Infinity).unwrap().is_infinite());
    }

    #[test]
    fn shrink_rate_examples() {
        assert!((shrink_rate(2, 1000.0).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(shrink_rate(5, 1.0).unwrap(), 1.0);
        assert!((shrink_rate(3, 16.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(shrink_rate(2, 0.5).is_err());
    }

    #[test]
    fn eps_power_endpoints() {
        for n in 2..=8 {
            assert!(eps_power(n, f(critical_p(n))).abs() < 1e-14);
            assert_eq!(eps_power(n, Exponent::Infinity), 1.0);
        }
    }

    #[test]
    fn density_norm_bound_examples() {
        let v = density_norm_bound(2, Exponent::Infinity, 50.0, 0.2, 37).unwrap();
        assert!((v - 50.0 * 0.2).abs() < 1e-12);
        // critical p: 1/α = n/(n+1)
        let pc = f(critical_p(3));
        let v = density_norm_bound(3, pc, 10.0, 0.3, 8).unwrap();
        let expected = 10f64.powf(2.0 * sigma_high(3, pc)) * 8f64.powf(3.0 / 4.0);
        assert!((v - expected).abs() < 1e-12 * expected);
        // worked example, exponents written out by hand: 2σ(12) = 2/3
        let v = density_norm_bound(2, f(12.0), 100.0, 0.1, 10).unwrap();
        let expected = 100f64.powf(2.0 / 3.0) * 0.1f64.powf(0.5) * 10f64.powf(1.0 / 3.0);
        assert!((v - expected).abs() < 1e-12 * expected);
        assert!(density_norm_bound(2, f(4.0), 10.0, 0.5, 1).is_err());
    }

    #[test]
    fn parse_exponent() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("12".parse::<Exponent>().unwrap(), Exponent::Finite(12.0));
        assert!("x".parse::<Exponent>().is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert!((conjugate(1.5) - 3.0).abs() < 1e-15);
    }
}
