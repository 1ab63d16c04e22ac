//! Command-line front end: argument parsing, config files and report
//! rendering. `main.rs` only forwards `argv` and the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cluster::{density, full_subspace, lp_norm, random_subspace, EpsRule};
use crate::error::{Error, Result};
use crate::experiments::{self, config_hash, SweepMode, SweepSpec};
use crate::exponents::{self, Exponent};
use crate::kernels::{decompose_diagonal, gaussian_poisson_selftest, periodized_diagonal_check, KernelOptions};
use crate::lattice::{enumerate_band, SpectralBand, TorusConfig};
use crate::mollifier::{build_mollifier, default_mollifier, Mollifier, MollifierSpec};
use crate::schatten::{gram_matrix, schatten_norm, TestFunction};

#[derive(Debug, Parser)]
#[command(name = "toruslab", version, about = "Spectral cluster experiments on the flat torus")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate and count lattice frequencies with λ ≤ |k| < λ+ε.
    Count(CountArgs),
    /// L^{p/2} norms of the density of a cluster subspace.
    Density(DensityArgs),
    /// Diagonal decomposition of the mollified projector kernel.
    Kernel(KernelArgs),
    /// Frequency side against translate side of the smoothed kernel.
    Poisson(PoissonArgs),
    /// Schatten norm of the cluster compression of h χ h̄.
    Schatten(SchattenArgs),
    /// Table of σ(p), α(p) and the ε power.
    Exponents(ExponentsArgs),
    /// Sweep over a geometric λ grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// key=value file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Output format: text, json or csv (sweep also accepts svg).
    #[arg(long)]
    #[serde(skip)]
    pub format: Option<String>,
    /// Output file (default: stdout).
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BandArgs {
    /// Torus dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Band width.
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MollifierArgs {
    /// Sharpness s of the bump exp(-s/(1-4t²)).
    #[arg(long, default_value_t = 1.0)]
    pub sharpness: f64,
    /// Spacing of the tabulated inverse transform.
    #[arg(long, default_value_t = 0.01)]
    pub table_step: f64,
}

impl MollifierArgs {
    fn build(&self) -> Result<MollifierHandle> {
        let spec = MollifierSpec {
            sharpness: self.sharpness,
            table_step: self.table_step,
            ..MollifierSpec::default()
        };
        if spec == MollifierSpec::default() {
            Ok(MollifierHandle::Shared(default_mollifier()))
        } else {
            Ok(MollifierHandle::Owned(Box::new(build_mollifier(spec)?)))
        }
    }
}

enum MollifierHandle {
    Shared(&'static Mollifier),
    Owned(Box<Mollifier>),
}

impl MollifierHandle {
    fn get(&self) -> &Mollifier {
        match self {
            MollifierHandle::Shared(m) => m,
            MollifierHandle::Owned(m) => m,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub band: BandArgs,
    /// Print only the count.
    #[arg(long)]
    pub no_list: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub band: BandArgs,
    /// Subspace dimension (default: the whole cluster).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated exponents p (default: critical, twice critical, inf).
    #[arg(long)]
    pub p: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelArgs {
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub mollifier: MollifierArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PoissonArgs {
    #[command(flatten)]
    pub band: BandArgs,
    /// Width of the Gaussian used for the self-test.
    #[arg(long, default_value_t = 1.5)]
    pub gaussian_s: f64,
    #[command(flatten)]
    pub mollifier: MollifierArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchattenArgs {
    #[command(flatten)]
    pub band: BandArgs,
    /// Schatten exponent, `inf` for the operator norm (default n+1).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Nonzero Fourier modes of the random h.
    #[arg(long, default_value_t = 3)]
    pub h_modes: usize,
    /// Largest |frequency component| of h.
    #[arg(long, default_value_t = 2)]
    pub h_max_freq: i64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExponentsArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Comma-separated exponents p (default: 2, 4, critical, 2·critical, inf).
    #[arg(long)]
    pub p: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// counts, kernel, schatten or corollary.
    #[arg(long, default_value = "counts")]
    pub mode: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 10.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 5000.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// A number, `shrink` or `power:<x>`.
    #[arg(long, default_value = "shrink")]
    pub eps: String,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Comma-separated exponents p for corollary mode.
    #[arg(long, default_value = "6,12,inf")]
    pub p: String,
    #[arg(long, default_value_t = 3)]
    pub h_modes: usize,
    #[arg(long, default_value_t = 2)]
    pub h_max_freq: i64,
    #[command(flatten)]
    pub common: Common,
}

impl SweepArgs {
    pub fn to_spec(&self) -> Result<SweepSpec> {
        let spec = SweepSpec {
            n: self.n,
            mode: self.mode.parse::<SweepMode>()?,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            points: self.points,
            eps: self.eps.parse::<EpsRule>()?,
            seed: self.common.seed,
            trials: self.trials,
            p_list: parse_exponents(&self.p)?,
            h_modes: self.h_modes,
            h_max_freq: self.h_max_freq,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_exponents(s: &str) -> Result<Vec<Exponent>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse::<Exponent>().map_err(|e| Error::InvalidConfig(e.to_string())))
        .collect()
}

/// Reads a key=value file into `--key value` arguments. `#` starts a
/// comment; `key=true` becomes a bare flag and `key=false` is dropped.
pub fn config_file_args(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key == "config" {
            return Err(Error::InvalidConfig("config files cannot include other config files".into()));
        }
        match v.trim() {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            v => {
                out.push(format!("--{key}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// Splices the `--config` file contents in front of the explicit flags so
/// that the latter win.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it
                .next()
                .ok_or_else(|| Error::InvalidConfig("--config needs a path".into()))?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = a.to_str().and_then(|s| s.strip_prefix("--config=")) {
            path = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let extra = config_file_args(&path)?;
    if rest.len() < 2 {
        return Err(Error::InvalidConfig("--config needs a subcommand".into()));
    }
    let mut out: Vec<OsString> = rest[..2].to_vec();
    out.extend(extra);
    out.extend(rest[2..].iter().cloned());
    Ok(out)
}


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

fn parse_format(s: Option<&str>, default: Format, allow_svg: bool) -> Result<Format> {
    match s {
        None => Ok(default),
        Some("text") => Ok(Format::Text),
        Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        Some("svg") if allow_svg => Ok(Format::Svg),
        Some(other) => Err(Error::InvalidConfig(format!("unsupported output format '{other}'"))),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One report: a flat object or an array of flat objects.
struct Report {
    command: &'static str,
    config: Value,
    hash: String,
    seed: u64,
    result: Value,
}

impl Report {
    fn new<C: Serialize>(command: &'static str, cfg: &C, seed: u64, result: Value) -> Self {
        Self {
            command,
            config: serde_json::to_value(cfg).expect("config serializes"),
            hash: config_hash(cfg),
            seed,
            result,
        }
    }

    fn meta_line(&self) -> String {
        format!(
            "# toruslab {} {} config_hash={} seed={}",
            self.command,
            env!("CARGO_PKG_VERSION"),
            self.hash,
            self.seed
        )
    }

    fn rows(&self) -> Vec<&Map<String, Value>> {
        match &self.result {
            Value::Array(a) => a.iter().filter_map(Value::as_object).collect(),
            Value::Object(o) => vec![o],
            _ => Vec::new(),
        }
    }

    fn render(&self, format: Format) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        match format {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "config": self.config,
                    "result": self.result,
                    "meta": {
                        "seed": self.seed,
                        "config_hash": self.hash,
                        "version": env!("CARGO_PKG_VERSION"),
                    },
                });
                serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Io(e.to_string()))?;
                out.push(b'\n');
            }
            Format::Csv => {
                let rows = self.rows();
                let mut w = csv::Writer::from_writer(&mut out);
                let io = |e: csv::Error| Error::Io(e.to_string());
                if let Some(first) = rows.first() {
                    w.write_record(first.keys()).map_err(io)?;
                    for r in &rows {
                        w.write_record(r.values().map(cell)).map_err(io)?;
                    }
                }
                w.flush()?;
                drop(w);
                writeln!(out, "{}", self.meta_line())?;
            }
            Format::Text | Format::Svg => {
                writeln!(out, "{}", self.meta_line())?;
                let rows = self.rows();
                if rows.len() == 1 {
                    let width = rows[0].keys().map(String::len).max().unwrap_or(0);
                    for (k, v) in rows[0] {
                        writeln!(out, "{k:<width$}  {}", cell(v))?;
                    }
                } else if let Some(first) = rows.first() {
                    let keys: Vec<&String> = first.keys().collect();
                    let table: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| keys.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()).collect())
                        .collect();
                    let widths: Vec<usize> = keys
                        .iter()
                        .enumerate()
                        .map(|(i, k)| table.iter().map(|r| r[i].len()).max().unwrap_or(0).max(k.len()))
                        .collect();
                    let line = |cells: Vec<&str>| {
                        cells
                            .iter()
                            .zip(&widths)
                            .map(|(c, w)| format!("{c:>w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                    };
                    writeln!(out, "{}", line(keys.iter().map(|k| k.as_str()).collect()))?;
                    for r in &table {
                        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn emit(bytes: &[u8], path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

/// Finite values as numbers, the rest as `inf`, `-inf` or `nan`.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn band_setup(b: &BandArgs) -> Result<(TorusConfig, SpectralBand)> {
    Ok((TorusConfig::new(b.n)?, SpectralBand::new(b.lambda, b.eps)?))
}

fn run_count(a: &CountArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, band) = band_setup(&a.band)?;
    let cluster = enumerate_band(&cfg, &band)?;
    let format = parse_format(a.common.format.as_deref(), Format::Text, false)?;
    let hash = config_hash(a);
    let meta = format!(
        "# toruslab count {} config_hash={hash} seed={}",
        env!("CARGO_PKG_VERSION"),
        a.common.seed
    );
    let mut buf = Vec::new();
    match format {
        Format::Text => {
            writeln!(buf, "{meta}")?;
            writeln!(buf, "{}", cluster.len())?;
            if !a.no_list {
                for f in &cluster.freqs {
                    let k: Vec<String> = f.k.iter().map(i64::to_string).collect();
                    writeln!(buf, "{}  |k|²={}", k.join(" "), f.norm_sq)?;
                }
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            let io = |e: csv::Error| Error::Io(e.to_string());
            let mut header: Vec<String> = (1..=cfg.dim()).map(|i| format!("k{i}")).collect();
            header.push("norm_sq".into());
            w.write_record(&header).map_err(io)?;
            for f in &cluster.freqs {
                let mut rec: Vec<String> = f.k.iter().map(i64::to_string).collect();
                rec.push(f.norm_sq.to_string());
                w.write_record(&rec).map_err(io)?;
            }
            w.flush()?;
            drop(w);
            writeln!(buf, "# count={}", cluster.len())?;
            writeln!(buf, "{meta}")?;
        }
        Format::Json => {
            let vectors: Vec<&Vec<i64>> = if a.no_list {
                Vec::new()
            } else {
                cluster.freqs.iter().map(|f| &f.k).collect()
            };
            let doc = json!({
                "command": "count",
                "config": to_value(a),
                "result": {
                    "n": cfg.dim(),
                    "lambda": band.lambda(),
                    "epsilon": band.epsilon(),
                    "count": cluster.len(),
                    "vectors": vectors,
                },
                "meta": {"seed": a.common.seed, "config_hash": hash, "version": env!("CARGO_PKG_VERSION")},
            });
            serde_json::to_writer_pretty(&mut buf, &doc).map_err(|e| Error::Io(e.to_string()))?;
            buf.push(b'\n');
        }
        Format::Svg => unreachable!(),
    }
    emit(&buf, a.common.output.as_deref(), out)
}

fn run_density(a: &DensityArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, band) = band_setup(&a.band)?;
    let n = cfg.dim();
    let ps = match &a.p {
        Some(s) => parse_exponents(s)?,
        None => {
            let pc = exponents::critical_p(n);
            vec![Exponent::Finite(pc), Exponent::Finite(2.0 * pc), Exponent::Infinity]
        }
    };
    let format = parse_format(a.common.format.as_deref(), Format::Text, false)?;
    let cluster = enumerate_band(&cfg, &band)?;
    if cluster.is_empty() {
        return Err(Error::Validation(format!(
            "no frequencies with {} <= |k| < {}",
            band.lambda(),
            band.upper()
        )));
    }
    let n_cluster = cluster.len();
    let d = a.dim.unwrap_or(n_cluster);
    if d == 0 || d > n_cluster {
        return Err(Error::InvalidConfig(format!("dim must be in 1..={n_cluster}, got {d}")));
    }
    let sub = if d == n_cluster {
        full_subspace(cluster)?
    } else {
        random_subspace(cluster, d, a.common.seed)?
    };
    let rho = density(&sub, None)?;
    let mut rows = Vec::new();
    for p in ps {
        let norm = lp_norm(&rho, p.half())?;
        let rhs = exponents::density_norm_bound(n, p, band.lambda(), band.epsilon(), d).ok();
        rows.push(json!({
            "p": p.to_string(),
            "cluster_size": n_cluster,
            "dim": d,
            "norm": num(norm.value),
            "lower": num(norm.lower),
            "upper": num(norm.upper),
            "error_estimate": norm.error_estimate,
            "rhs": rhs,
            "ratio": rhs.map(|r| norm.value / r),
        }));
    }
    let report = Report::new("density", a, a.common.seed, Value::Array(rows));
    emit(&report.render(format)?, a.common.output.as_deref(), out)
}

fn run_kernel(a: &KernelArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, band) = band_setup(&a.band)?;
    let format = parse_format(a.common.format.as_deref(), Format::Text, false)?;
    let m = a.mollifier.build()?;
    let rep = decompose_diagonal(&cfg, band.lambda(), band.epsilon(), m.get(), KernelOptions::default())?;
    let report = Report::new("kernel", a, a.common.seed, to_value(&rep));
    emit(&report.render(format)?, a.common.output.as_deref(), out)
}

fn run_poisson(a: &PoissonArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, band) = band_setup(&a.band)?;
    let format = parse_format(a.common.format.as_deref(), Format::Text, false)?;
    let m = a.mollifier.build()?;
    let rep = periodized_diagonal_check(&cfg, band.lambda(), band.epsilon(), m.get())?;
    let gauss = gaussian_poisson_selftest(&cfg, a.gaussian_s)?;
    let mut v = to_value(&rep);
    v["gaussian_selftest"] = json!(gauss);
    let report = Report::new("poisson", a, a.common.seed, v);
    emit(&report.render(format)?, a.common.output.as_deref(), out)
}

fn run_schatten(a: &SchattenArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, band) = band_setup(&a.band)?;
    let n = cfg.dim();
    let format = parse_format(a.common.format.as_deref(), Format::Text, false)?;
    let alpha = match a.alpha.as_deref() {
        None => (n + 1) as f64,
        Some(s) => s
            .parse::<Exponent>()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .as_f64(),
    };
    let cluster = enumerate_band(&cfg, &band)?;
    let h = TestFunction::random(n, a.h_modes, a.h_max_freq, a.common.seed)?;
    let g = gram_matrix(&cluster, &h)?;
    let rep = schatten_norm(&g, &h, alpha)?;
    let expected_trace = cluster.len() as f64 * h.l2_norm_sq() / cfg.volume();
    let mut v = to_value(&rep);
    v["alpha"] = num(rep.alpha);
    v["trace"] = json!(g.trace());
    v["trace_expected"] = json!(expected_trace);
    v["h_l2_sq"] = json!(h.l2_norm_sq());
    let report = Report::new("schatten", a, a.common.seed, v);
    emit(&report.render(format)?, a.common.output.as_deref(), out)
}

fn run_exponents(a: &ExponentsArgs, out: &mut dyn Write) -> Result<()> {
    TorusConfig::new(a.n)?;
    let format = parse_format(a.common.format.as_deref(), Format::Text, false)?;
    let ps = match &a.p {
        Some(s) => parse_exponents(s)?,
        None => {
            let pc = exponents::critical_p(a.n);
            let mut v = vec![2.0, 4.0, pc, 2.0 * pc];
            v.sort_by(f64::total_cmp);
            v.dedup();
            let mut v: Vec<Exponent> = v.into_iter().map(Exponent::Finite).collect();
            v.push(Exponent::Infinity);
            v
        }
    };
    let rows: Vec<Value> = ps
        .into_iter()
        .map(|p| {
            let prof = exponents::profile(a.n, p)?;
            Ok(json!({
                "n": prof.n,
                "p": p.to_string(),
                "sigma": num(prof.sigma),
                "alpha": num(prof.alpha),
                "alpha_conj": num(exponents::conjugate(prof.alpha)),
                "eps_power": num(prof.eps_power),
                "critical_p": num(prof.critical_p),
            }))
        })
        .collect::<Result<_>>()?;
    let report = Report::new("exponents", a, a.common.seed, Value::Array(rows));
    emit(&report.render(format)?, a.common.output.as_deref(), out)
}

fn run_sweep_cmd(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let spec = a.to_spec()?;
    let format = parse_format(a.common.format.as_deref(), Format::Csv, true)?;
    let result = experiments::run_sweep(&spec)?;
    let bytes = match format {
        Format::Csv | Format::Text => {
            let mut buf = Vec::new();
            experiments::write_csv(&result, &mut buf)?;
            buf
        }
        Format::Json => {
            let mut s = experiments::to_json(&result)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Svg => experiments::to_svg(&result).into_bytes(),
    };
    emit(&bytes, a.common.output.as_deref(), out)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Count(a) => &a.common,
        Command::Density(a) => &a.common,
        Command::Kernel(a) => &a.common,
        Command::Poisson(a) => &a.common,
        Command::Schatten(a) => &a.common,
        Command::Exponents(a) => &a.common,
        Command::Sweep(a) => &a.common,
    }
}

/// Executes an already parsed command.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    let run = |buf: &mut Vec<u8>| match &cli.command {
        Command::Count(a) => run_count(a, buf),
        Command::Density(a) => run_density(a, buf),
        Command::Kernel(a) => run_kernel(a, buf),
        Command::Poisson(a) => run_poisson(a, buf),
        Command::Schatten(a) => run_schatten(a, buf),
        Command::Exponents(a) => run_exponents(a, buf),
        Command::Sweep(a) => run_sweep_cmd(a, buf),
    };
    match common(&cli.command).jobs {
        Some(0) => return Err(Error::InvalidConfig("--jobs must be >= 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(|| run(&mut buf))?,
        None => run(&mut buf)?,
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Full front end: returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
