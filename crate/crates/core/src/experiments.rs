//! Parameter sweeps over `λ`, log-log fits and result files.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cluster::{density, full_subspace, lp_norm, random_subspace, EpsRule};
use crate::error::{Error, Result};
use crate::exponents::{self, Exponent};
use crate::kernels::{decompose_diagonal, two_term_bound, KernelOptions};
use crate::lattice::{count_band, enumerate_band, SpectralBand, TorusConfig};
use crate::mollifier::default_mollifier;
use crate::schatten::{gram_matrix, schatten_norm, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Counts,
    Kernel,
    Schatten,
    Corollary,
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counts" => Ok(SweepMode::Counts),
            "kernel" => Ok(SweepMode::Kernel),
            "schatten" => Ok(SweepMode::Schatten),
            "corollary" => Ok(SweepMode::Corollary),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep mode '{other}' (counts, kernel, schatten, corollary)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: usize,
    pub mode: SweepMode,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
    pub eps: EpsRule,
    pub seed: u64,
    /// Random `h` per point (schatten) or subspaces per dimension (corollary).
    pub trials: usize,
    /// Exponents `p` for corollary mode.
    pub p_list: Vec<Exponent>,
    /// Modes and frequency range of random test functions.
    pub h_modes: usize,
    pub h_max_freq: i64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            n: 2,
            mode: SweepMode::Counts,
            lambda_min: 10.0,
            lambda_max: 5000.0,
            points: 20,
            eps: EpsRule::Shrink,
            seed: 0,
            trials: 1,
            p_list: vec![Exponent::Finite(6.0), Exponent::Finite(12.0), Exponent::Infinity],
            h_modes: 3,
            h_max_freq: 2,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        TorusConfig::new(self.n)?;
        if !(self.lambda_min > 0.0 && self.lambda_max >= self.lambda_min && self.lambda_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < lambda_min <= lambda_max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.points == 0 {
            return Err(Error::InvalidConfig("sweep needs at least one point".into()));
        }
        if self.points > 1 && self.lambda_max == self.lambda_min {
            return Err(Error::InvalidConfig("several points need lambda_max > lambda_min".into()));
        }
        if let EpsRule::Fixed(e) = self.eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidConfig(format!("fixed eps must be positive, got {e}")));
            }
        }
        if matches!(self.mode, SweepMode::Schatten | SweepMode::Corollary) && self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.mode == SweepMode::Corollary {
            if self.p_list.is_empty() {
                return Err(Error::InvalidConfig("corollary mode needs at least one p".into()));
            }
            let pc = exponents::critical_p(self.n);
            for p in &self.p_list {
                if p.as_f64() < pc {
                    return Err(Error::InvalidConfig(format!("p = {p} is below the critical exponent {pc}")));
                }
            }
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        geometric_grid(self.lambda_min, self.lambda_max, self.points)
    }

    pub fn config_hash(&self) -> String {
        config_hash(self)
    }
}

/// First 16 hex digits of SHA-256 over the JSON form of `cfg`.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("settings serialize");
    Sha256::digest(json.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// `count` points from `lo` to `hi`, equally spaced in `log λ`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub epsilon: f64,
    pub n_dim: usize,
    /// Cluster size `N`.
    pub count: u64,
    /// Measured quantity (equals `count` in counts mode).
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    /// Free-form tag, e.g. `p=6;dim=12`.
    pub label: String,
    pub seed: Option<u64>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(lambda: f64, n: usize, label: String, err: Error) -> Self {
        Self {
            lambda,
            epsilon: f64::NAN,
            n_dim: n,
            count: 0,
            value: f64::NAN,
            bound: f64::NAN,
            ratio: f64::NAN,
            label,
            seed: None,
            wall_ms: 0.0,
            error: Some(err.to_string()),
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    /// OLS slope of `log y` against `log λ`; absent for fewer than 4 usable
    /// rows or a single distinct `λ`.
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    /// Largest `y`.
    #[serde(rename = "C")]
    pub c: f64,
    /// Smallest `y`.
    pub min: f64,
    pub points: usize,
}

/// Ordinary least squares of `log y` on `log x` over positive finite pairs.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Fit {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite() && **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let c = pts.iter().map(|p| p.1.exp()).fold(0.0, f64::max);
    let min = pts.iter().map(|p| p.1.exp()).fold(f64::INFINITY, f64::min);
    let m = pts.len();
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / m.max(1) as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if m < 4 || sxx <= 1e-300 {
        return Fit {
            slope: None,
            stderr: None,
            c,
            min,
            points: m,
        };
    }
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if m > 2 { (rss / (m as f64 - 2.0) / sxx).sqrt() } else { 0.0 };
    Fit {
        slope: Some(slope),
        stderr: Some(stderr),
        c,
        min,
        points: m,
    }
}

/// Fit of `ratio` against `λ` over the successful rows.
pub fn fit_constant(rows: &[SweepRow]) -> Fit {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.ok()).collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.lambda).collect();
    let ys: Vec<f64> = ok.iter().map(|r| r.ratio).collect();
    fit_loglog(&xs, &ys)
}

/// Fit of `value` against `λ` over the successful rows.
pub fn fit_values(rows: &[SweepRow]) -> Fit {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.ok()).collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.lambda).collect();
    let ys: Vec<f64> = ok.iter().map(|r| r.value).collect();
    fit_loglog(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    /// Fit of the ratio column.
    pub fit: Fit,
    /// Fit of the value column.
    pub value_fit: Fit,
    pub meta: SweepMeta,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> (Result<T>, f64) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed().as_secs_f64() * 1e3)
}

fn counts_row(spec: &SweepSpec, cfg: &TorusConfig, lambda: f64) -> Vec<SweepRow> {
    let (r, ms) = timed(|| {
        let eps = spec.eps.eval(spec.n, lambda)?;
        let count = count_band(cfg, &SpectralBand::new(lambda, eps)?);
        Ok((eps, count))
    });
    match r {
        Ok((eps, count)) => {
            let bound = lambda.powi(spec.n as i32 - 1) * eps;
            vec![SweepRow {
                lambda,
                epsilon: eps,
                n_dim: spec.n,
                count,
                value: count as f64,
                bound,
                ratio: count as f64 / bound,
                label: String::new(),
                seed: None,
                wall_ms: ms,
                error: None,
            }]
        }
        Err(e) => vec![SweepRow::failed(lambda, spec.n, String::new(), e)],
    }
}

fn kernel_row(spec: &SweepSpec, cfg: &TorusConfig, lambda: f64) -> Vec<SweepRow> {
    let (r, ms) = timed(|| {
        let eps = spec.eps.eval(spec.n, lambda)?;
        let rep = decompose_diagonal(cfg, lambda, eps, default_mollifier(), KernelOptions::default())?;
        let count = count_band(cfg, &SpectralBand::new(lambda, eps)?);
        Ok((eps, rep, count))
    });
    match r {
        Ok((eps, rep, count)) => {
            let (b1, b2) = two_term_bound(spec.n, lambda, eps);
            vec![SweepRow {
                lambda,
                epsilon: eps,
                n_dim: spec.n,
                count,
                value: rep.total,
                bound: b1 + b2,
                ratio: rep.ratio_total,
                label: format!("j={:e};i22={:e}", rep.j, rep.i22),
                seed: None,
                wall_ms: ms,
                error: None,
            }]
        }
        Err(e) => vec![SweepRow::failed(lambda, spec.n, String::new(), e)],
    }
}

fn schatten_rows(spec: &SweepSpec, cfg: &TorusConfig, lambda: f64, point: usize) -> Vec<SweepRow> {
    let alpha = (spec.n + 1) as f64;
    (0..spec.trials)
        .map(|t| {
            let seed = spec.seed.wrapping_add((point * spec.trials + t) as u64);
            let (r, ms) = timed(|| {
                let eps = spec.eps.eval(spec.n, lambda)?;
                let cluster = enumerate_band(cfg, &SpectralBand::new(lambda, eps)?)?;
                let h = TestFunction::random(spec.n, spec.h_modes, spec.h_max_freq, seed)?;
                let g = gram_matrix(&cluster, &h)?;
                let rep = schatten_norm(&g, &h, alpha)?;
                Ok((eps, cluster.len() as u64, rep))
            });
            match r {
                Ok((eps, count, rep)) => SweepRow {
                    lambda,
                    epsilon: eps,
                    n_dim: spec.n,
                    count,
                    value: rep.norm,
                    bound: rep.bound.unwrap_or(f64::NAN),
                    ratio: rep.ratio.unwrap_or(f64::NAN),
                    label: format!("alpha={alpha}"),
                    seed: Some(seed),
                    wall_ms: ms,
                    error: None,
                },
                Err(e) => {
                    let mut row = SweepRow::failed(lambda, spec.n, format!("alpha={alpha}"), e);
                    row.seed = Some(seed);
                    row
                }
            }
        })
        .collect()
}

/// Subspace dimensions sampled per cluster: `1, ⌈N/4⌉, ⌈N/2⌉, N`.
pub fn subspace_dims(n_cluster: usize) -> Vec<usize> {
    let mut d = vec![1, n_cluster.div_ceil(4), n_cluster.div_ceil(2), n_cluster];
    d.dedup();
    d.retain(|&x| x >= 1);
    d
}

fn density_rows(spec: &SweepSpec, cfg: &TorusConfig, lambda: f64, point: usize) -> Vec<SweepRow> {
    let setup = (|| {
        let eps = spec.eps.eval(spec.n, lambda)?;
        let cluster = enumerate_band(cfg, &SpectralBand::new(lambda, eps)?)?;
        if cluster.is_empty() {
            return Err(Error::Validation(format!("empty cluster at λ={lambda}, ε={eps}")));
        }
        Ok((eps, cluster))
    })();
    let (eps, cluster) = match setup {
        Ok(v) => v,
        Err(e) => return vec![SweepRow::failed(lambda, spec.n, String::new(), e)],
    };
    let n_cluster = cluster.len();
    let mut rows = Vec::new();
    for d in subspace_dims(n_cluster) {
        let trials = if d == n_cluster { 1 } else { spec.trials };
        for t in 0..trials {
            let seed = spec.seed.wrapping_add((point * 1_000_000 + d * 1000 + t) as u64);
            let sub = if d == n_cluster {
                full_subspace(cluster.clone())
            } else {
                random_subspace(cluster.clone(), d, seed)
            };
            let rho = sub.and_then(|s| density(&s, None));
            for &p in &spec.p_list {
                let label = format!("p={p};dim={d}");
                let (r, ms) = timed(|| {
                    let rho = rho.as_ref().map_err(Clone::clone)?;
                    let norm = lp_norm(rho, p.half())?;
                    let rhs = exponents::density_norm_bound(spec.n, p, lambda, eps, d)?;
                    Ok((norm.value, rhs))
                });
                rows.push(match r {
                    Ok((value, bound)) => SweepRow {
                        lambda,
                        epsilon: eps,
                        n_dim: spec.n,
                        count: n_cluster as u64,
                        value,
                        bound,
                        ratio: value / bound,
                        label,
                        seed: (d != n_cluster).then_some(seed),
                        wall_ms: ms,
                        error: None,
                    },
                    Err(e) => SweepRow::failed(lambda, spec.n, label, e),
                });
            }
        }
    }
    rows
}

/// Runs every grid point; failures are kept as rows, more than 20% failed
/// rows is an error.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cfg = TorusConfig::new(spec.n)?;
    let lambdas = spec.lambdas();
    run_on_grid(spec, &cfg, &lambdas)
}

fn run_on_grid(spec: &SweepSpec, cfg: &TorusConfig, lambdas: &[f64]) -> Result<SweepResult> {
    let per_point: Vec<Vec<SweepRow>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| match spec.mode {
            SweepMode::Counts => counts_row(spec, cfg, lambda),
            SweepMode::Kernel => kernel_row(spec, cfg, lambda),
            SweepMode::Schatten => schatten_rows(spec, cfg, lambda, i),
            SweepMode::Corollary => density_rows(spec, cfg, lambda, i),
        })
        .collect();
    let rows: Vec<SweepRow> = per_point.into_iter().flatten().collect();
    let failed = rows.iter().filter(|r| !r.ok()).count();
    if failed * 5 > rows.len() {
        let first = rows.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(Error::Numeric(format!(
            "{failed} of {} sweep rows failed; first: {first}",
            rows.len()
        )));
    }
    Ok(SweepResult {
        spec: spec.clone(),
        fit: fit_constant(&rows),
        value_fit: fit_values(&rows),
        rows,
        meta: SweepMeta {
            seed: spec.seed,
            config_hash: spec.config_hash(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
        },
    })
}

/// Density-bound sweep on an explicit `λ` list, one result per `p`.
pub fn density_bound_suite(
    n: usize,
    p_list: &[Exponent],
    lambdas: &[f64],
    eps: EpsRule,
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepResult>> {
    let cfg = TorusConfig::new(n)?;
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    p_list
        .iter()
        .map(|&p| {
            let spec = SweepSpec {
                n,
                mode: SweepMode::Corollary,
                lambda_min: sorted[0],
                lambda_max: *sorted.last().expect("nonempty"),
                points: sorted.len(),
                eps,
                seed,
                trials,
                p_list: vec![p],
                ..SweepSpec::default()
            };
            spec.validate()?;
            run_on_grid(&spec, &cfg, &sorted)
        })
        .collect()
}

/// Header of the counts-mode CSV.
pub const COUNTS_HEADER: [&str; 7] = ["lambda", "epsilon", "n_dim", "count", "bound", "ratio", "wall_ms"];
/// Header of the CSV for the other modes.
pub const GENERIC_HEADER: [&str; 11] = [
    "lambda", "epsilon", "n_dim", "count", "value", "bound", "ratio", "label", "seed", "wall_ms", "error",
];

fn num(v: f64) -> String {
    format!("{v}")
}

/// CSV rows followed by `#`-prefixed fit and metadata lines.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    if result.spec.mode == SweepMode::Counts {
        w.write_record(COUNTS_HEADER).map_err(io)?;
        for r in &result.rows {
            w.write_record([
                num(r.lambda),
                num(r.epsilon),
                r.n_dim.to_string(),
                r.count.to_string(),
                num(r.bound),
                num(r.ratio),
                format!("{:.3}", r.wall_ms),
            ])
            .map_err(io)?;
        }
    } else {
        w.write_record(GENERIC_HEADER).map_err(io)?;
        for r in &result.rows {
            w.write_record([
                num(r.lambda),
                num(r.epsilon),
                r.n_dim.to_string(),
                r.count.to_string(),
                num(r.value),
                num(r.bound),
                num(r.ratio),
                r.label.clone(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                format!("{:.3}", r.wall_ms),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
    }
    let mut out = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "undefined".into());
    writeln!(
        out,
        "# fit: slope={} stderr={} C={} min={} points={}",
        opt(result.fit.slope),
        opt(result.fit.stderr),
        num(result.fit.c),
        num(result.fit.min),
        result.fit.points
    )?;
    writeln!(
        out,
        "# value_fit: slope={} stderr={}",
        opt(result.value_fit.slope),
        opt(result.value_fit.stderr)
    )?;
    writeln!(out, "# meta: seed={} config_hash={}", result.meta.seed, result.meta.config_hash)?;
    Ok(())
}

pub fn to_json(result: &SweepResult) -> Result<String> {
    serde_json::to_string_pretty(result).map_err(|e| Error::Io(e.to_string()))
}

/// Static scatter of `log ratio` against `log λ` with the fitted line.
pub fn to_svg(result: &SweepResult) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let pts: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter(|r| r.ok() && r.ratio > 0.0 && r.ratio.is_finite())
        .map(|r| (r.lambda.ln(), r.ratio.ln()))
        .collect();
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    s.push_str(&format!(
        "<line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">log lambda</text>\n\
         <text x=\"12\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">log ratio</text>\n",
        h - pad,
        w - pad,
        h - pad,
        h - pad,
        w / 2.0,
        h - 12.0,
        h / 2.0,
        h / 2.0
    ));
    for &(x, y) in &pts {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    if let Some(slope) = result.fit.slope {
        let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let line = |x: f64| mean_y + slope * (x - mean_x);
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"crimson\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\">slope {:.4}</text>\n",
            sx(x0),
            sy(line(x0)),
            sx(x1),
            sy(line(x1)),
            pad + 8.0,
            pad - 10.0,
            slope
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `result` as csv, json or svg depending on `format`.
pub fn write_result(result: &SweepResult, format: &str, path: Option<&Path>) -> Result<()> {
    let body: Vec<u8> = match format {
        "csv" => {
            let mut buf = Vec::new();
            write_csv(result, &mut buf)?;
            buf
        }
        "json" => {
            let mut s = to_json(result)?;
            s.push('\n');
            s.into_bytes()
        }
        "svg" => to_svg(result).into_bytes(),
        other => return Err(Error::InvalidConfig(format!("unknown output format '{other}'"))),
    };
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().write_all(&body)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(lambda: f64, ratio: f64) -> SweepRow {
        SweepRow {
            lambda,
            epsilon: 1.0,
            n_dim: 2,
            count: 1,
            value: ratio,
            bound: 1.0,
            ratio,
            label: String::new(),
            seed: None,
            wall_ms: 0.0,
            error: None,
        }
    }

    #[test]
    fn constant_ratios() {
        let rows: Vec<SweepRow> = geometric_grid(10.0, 1000.0, 8).into_iter().map(|l| row(l, 0.7)).collect();
        let f = fit_constant(&rows);
        assert!((f.c - 0.7).abs() < 1e-15);
        assert!(f.slope.unwrap().abs() < 1e-12);
    }

    #[test]
    fn synthetic_power() {
        let rows: Vec<SweepRow> = geometric_grid(10.0, 5000.0, 20)
            .into_iter()
            .map(|l| row(l, l.powf(0.1)))
            .collect();
        let f = fit_constant(&rows);
        assert!((f.slope.unwrap() - 0.1).abs() < 1e-12);
        assert!(f.stderr.unwrap() < 1e-12);
    }

    #[test]
    fn single_point_flagged() {
        let f = fit_constant(&[row(10.0, 2.0)]);
        assert!(f.slope.is_none());
        assert_eq!(f.c, 2.0);
    }

    #[test]
    fn grid_shape() {
        let g = geometric_grid(10.0, 5000.0, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[19], 5000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn counts_sweep_small_is_reproducible() {
        let spec = SweepSpec {
            lambda_min: 10.0,
            lambda_max: 200.0,
            points: 6,
            ..SweepSpec::default()
        };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        let strip = |r: &SweepResult| {
            let mut buf = Vec::new();
            let mut r = r.clone();
            r.rows.iter_mut().for_each(|x| x.wall_ms = 0.0);
            write_csv(&r, &mut buf).unwrap();
            buf
        };
        assert_eq!(strip(&a), strip(&b));
        let text = String::from_utf8(strip(&a)).unwrap();
        assert!(text.starts_with("lambda,epsilon,n_dim,count,bound,ratio,wall_ms\n"));
        assert!(text.contains("# meta: seed=0 config_hash="));
        let json: serde_json::Value = serde_json::from_str(&to_json(&a).unwrap()).unwrap();
        assert!(json["fit"]["C"].is_number());
        assert!(json["meta"]["config_hash"].is_string());
        assert_eq!(json["rows"].as_array().unwrap().len(), 6);
        assert!(to_svg(&a).contains("<circle"));
    }

    #[test]
    fn validation() {
        let bad = SweepSpec {
            lambda_min: 0.0,
            ..SweepSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = SweepSpec {
            mode: SweepMode::Corollary,
            p_list: vec![Exponent::Finite(4.0)],
            ..SweepSpec::default()
        };
        assert!(bad.validate().is_err());
        assert_ne!(SweepSpec::default().config_hash(), bad.config_hash());
    }

    #[test]
    fn subspace_dims_cover_range() {
        assert_eq!(subspace_dims(20), vec![1, 5, 10, 20]);
        assert_eq!(subspace_dims(1), vec![1]);
        assert_eq!(subspace_dims(4), vec![1, 2, 4]);
    }
}
