//! Problem files, run configuration and table output for the `spps`
//! command-line tool. All numerics live in `spps_core`.

use std::path::PathBuf;

use serde::Serialize;
use spps_core::catalog::{self, CatalogEntry};
use spps_core::expr::parse_expression;
use spps_core::precision::{Complex, Mp, Numeric, PrecisionContext, Real};
use spps_core::spectral::{eigen_iterate, ShiftMode, SpectralOptions};
use spps_core::spps::{solve_ivp, Chunking};
use spps_core::Error;

pub mod fixture;

pub use fixture::ProblemFile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for anything the user can fix in the configuration, 2 when the
    /// computation itself gave up.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(e) => match e {
                Error::Contract(_)
                | Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::Unsupported(_)
                | Error::Singularity { .. }
                | Error::NodeSingularity { .. } => 1,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Catalog(String),
    File(PathBuf),
}

impl Source {
    pub fn load(&self) -> Result<CatalogEntry, CliError> {
        match self {
            Source::Catalog(name) => catalog::by_name(name).map_err(|e| CliError::Config(e.to_string())),
            Source::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ProblemFile::from_json(&text)?.to_entry()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: usize,
    pub powers: usize,
    pub digits: u32,
    pub count: usize,
    pub shift: ShiftMode,
    pub tol: f64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { grid: 2000, powers: 60, digits: 34, count: 5, shift: ShiftMode::Auto, tol: 1e-8, format: Format::Csv }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid == 0 || self.powers == 0 || self.count == 0 {
            return Err(CliError::Config("grid, powers and count must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        PrecisionContext::new(self.digits).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    fn spectral(&self, first_index: usize) -> SpectralOptions {
        SpectralOptions {
            grid: self.grid,
            powers: self.powers,
            tolerance: self.tol,
            shift: self.shift.clone(),
            first_index,
            ..SpectralOptions::default()
        }
    }
}

/// `auto`, `none`, or a comma separated list of shift points.
pub fn parse_shift(s: &str) -> Result<ShiftMode, CliError> {
    match s.trim() {
        "auto" => Ok(ShiftMode::Auto),
        "none" => Ok(ShiftMode::None),
        list => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .map(ShiftMode::Explicit)
            .ok_or_else(|| CliError::Config(format!("--shift expects auto, none or numbers, got '{s}'"))),
    }
}

// Both backends behind one call site: 15 digits runs on f64.
macro_rules! at_precision {
    ($digits:expr, |$num:ident| $body:expr) => {{
        let ctx = PrecisionContext::new($digits).map_err(|e| CliError::Config(e.to_string()))?;
        if ctx.is_hardware() {
            let mut $num = Numeric::<f64>::new(ctx);
            $body
        } else {
            let mut $num = Numeric::<Mp>::new(ctx);
            $body
        }
    }};
}

fn sig(digits: u32) -> usize {
    if digits <= 15 {
        17
    } else {
        digits.min(40) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub n: usize,
    pub lambda_re: String,
    pub lambda_im: String,
    pub delta1: f64,
    pub delta2: f64,
    pub tail_bound: f64,
    pub shift_round: usize,
}

pub fn eigs(entry: &CatalogEntry, cfg: &RunConfig) -> Result<Vec<EigenRow>, CliError> {
    cfg.validate()?;
    at_precision!(cfg.digits, |num| eigs_at(entry, cfg, &mut num))
}

fn eigs_at<R: Real>(entry: &CatalogEntry, cfg: &RunConfig, num: &mut Numeric<R>) -> Result<Vec<EigenRow>, CliError> {
    let pairs = eigen_iterate(&entry.problem, cfg.count, &cfg.spectral(entry.first_index), num)?;
    let s = sig(cfg.digits);
    Ok(pairs
        .iter()
        .map(|p| EigenRow {
            n: p.index_hint,
            lambda_re: num.decimal(&p.lambda.re, s),
            lambda_im: num.decimal(&p.lambda.im, s),
            delta1: p.delta1,
            delta2: p.delta2,
            tail_bound: p.tail,
            shift_round: p.round,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IvpInput {
    pub lambda: String,
    pub a: String,
    pub b: String,
    pub x0: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IvpRow {
    pub x: String,
    pub u_re: String,
    pub u_im: String,
    pub du_re: String,
    pub du_im: String,
}

pub fn ivp(entry: &CatalogEntry, cfg: &RunConfig, input: &IvpInput) -> Result<Vec<IvpRow>, CliError> {
    cfg.validate()?;
    at_precision!(cfg.digits, |num| ivp_at(entry, cfg, input, &mut num))
}

fn constant<R: Real>(what: &str, text: &str, num: &mut Numeric<R>) -> Result<Complex<R>, CliError> {
    let e = parse_expression(text).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
    e.constant_value(num).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn ivp_at<R: Real>(entry: &CatalogEntry, cfg: &RunConfig, input: &IvpInput, num: &mut Numeric<R>) -> Result<Vec<IvpRow>, CliError> {
    let lambda = constant("--lambda", &input.lambda, num)?;
    let a = constant("--a", &input.a, num)?;
    let b = constant("--b", &input.b, num)?;
    let x0 = constant("--x0", &input.x0, num)?.re;
    let grid = entry.problem.grid(cfg.grid, num)?;
    let (lo, hi) = (grid.a().to_f64(), grid.b().to_f64());
    if !(lo..=hi).contains(&x0.to_f64()) {
        return Err(CliError::Config(format!("--x0 must lie in [{lo}, {hi}]")));
    }
    let j = grid.nearest(&x0);
    let chunking = Chunking { tolerance: cfg.tol, ..Chunking::default() };
    let (u, du) = solve_ivp(&entry.problem, &grid, &lambda, j, &a, &b, cfg.powers, chunking, num)?;
    let s = sig(cfg.digits);
    Ok(grid
        .nodes()
        .iter()
        .zip(u.values().iter().zip(du.values()))
        .map(|(x, (u, du))| IvpRow {
            x: num.decimal(x, s),
            u_re: num.decimal(&u.re, s),
            u_im: num.decimal(&u.im, s),
            du_re: num.decimal(&du.re, s),
            du_im: num.decimal(&du.im, s),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: String,
    pub n: usize,
    pub lambda_n: String,
}

/// Settings for one sweep point: explicit values win, otherwise the
/// entry's recommended settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub powers: Option<usize>,
    pub digits: Option<u32>,
}

impl Overrides {
    pub fn apply(&self, base: &RunConfig, entry: &CatalogEntry) -> RunConfig {
        let rec = entry.recommended;
        RunConfig {
            grid: self.grid.unwrap_or(rec.grid),
            powers: self.powers.unwrap_or(rec.powers),
            digits: self.digits.unwrap_or(rec.digits),
            ..base.clone()
        }
    }
}

/// Real parts of the first eigenvalues of the periodic singular problem for
/// every ε. A failing ε yields NaN rows; the error is returned alongside.
pub fn sweep(eps: &[String], base: &RunConfig, over: &Overrides) -> Result<(Vec<SweepRow>, Vec<(String, CliError)>), CliError> {
    let mut jobs = Vec::with_capacity(eps.len());
    for e in eps {
        let v: f64 = e.trim().parse().map_err(|_| CliError::Config(format!("bad epsilon '{e}'")))?;
        let entry = catalog::benilov(v).map_err(|err| CliError::Config(format!("epsilon {e}: {err}")))?;
        let cfg = over.apply(base, &entry);
        cfg.validate()?;
        jobs.push((e.trim().to_string(), entry, cfg));
    }
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|(_, entry, cfg)| s.spawn(move || eigs(entry, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for ((e, entry, cfg), res) in jobs.into_iter().zip(results) {
        match res {
            Ok(found) => rows.extend(found.into_iter().map(|r| SweepRow { epsilon: e.clone(), n: r.n, lambda_n: r.lambda_re })),
            Err(err) => {
                rows.extend((0..cfg.count).map(|k| SweepRow { epsilon: e.clone(), n: entry.first_index + k, lambda_n: "NaN".into() }));
                failures.push((e, err));
            }
        }
    }
    Ok((rows, failures))
}

/// Serialize rows with a header (CSV, LF endings) or as a JSON array.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Config(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| CliError::Config(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_entry() -> CatalogEntry {
        catalog::by_name("constant-dirichlet").unwrap()
    }

    #[test]
    fn shift_flag() {
        assert_eq!(parse_shift("auto").unwrap(), ShiftMode::Auto);
        assert_eq!(parse_shift("none").unwrap(), ShiftMode::None);
        assert_eq!(parse_shift("66, 146").unwrap(), ShiftMode::Explicit(vec![66.0, 146.0]));
        assert!(parse_shift("sixty").is_err());
    }

    #[test]
    fn validation_rejects_nonpositive_settings() {
        for cfg in [
            RunConfig { grid: 0, ..RunConfig::default() },
            RunConfig { count: 0, ..RunConfig::default() },
            RunConfig { tol: -1.0, ..RunConfig::default() },
            RunConfig { digits: 3, ..RunConfig::default() },
        ] {
            assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Numeric(Error::Stagnation { round: 3 }).exit_code(), 2);
        assert_eq!(CliError::Numeric(Error::Accuracy { requested: 1e-8, achieved: 1e-3 }).exit_code(), 2);
        assert_eq!(CliError::Numeric(Error::Contract("x".into())).exit_code(), 1);
    }

    #[test]
    fn sine_spectrum_at_both_precisions() {
        for digits in [15, 34] {
            let cfg = RunConfig { digits, count: 3, grid: 2000, powers: 60, ..RunConfig::default() };
            let rows = eigs(&constant_entry(), &cfg).unwrap();
            let got: Vec<f64> = rows.iter().map(|r| r.lambda_re.parse().unwrap()).collect();
            assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 3]);
            for (g, want) in got.iter().zip([1.0, 4.0, 9.0]) {
                assert!((g - want).abs() < 1e-9, "{digits}: {g}");
            }
        }
    }

    #[test]
    fn ivp_reproduces_sine() {
        let cfg = RunConfig { digits: 15, grid: 2000, powers: 60, ..RunConfig::default() };
        let input = IvpInput { lambda: "4".into(), a: "0".into(), b: "1".into(), x0: "0".into() };
        let rows = ivp(&constant_entry(), &cfg, &input).unwrap();
        assert_eq!(rows.len(), 2001);
        for r in &rows {
            let x: f64 = r.x.parse().unwrap();
            let u: f64 = r.u_re.parse().unwrap();
            assert!((u - (2.0 * x).sin() / 2.0).abs() < 1e-8, "x = {x}");
        }
        let bad = IvpInput { x0: "7".into(), ..input };
        assert_eq!(ivp(&constant_entry(), &cfg, &bad).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn csv_is_lf_terminated_with_header() {
        let rows = vec![SweepRow { epsilon: "0.1".into(), n: 1, lambda_n: "1.5".into() }];
        let s = render(&rows, Format::Csv).unwrap();
        assert_eq!(s, "epsilon,n,lambda_n\n0.1,1,1.5\n");
        let j = render(&rows, Format::Json).unwrap();
        assert!(j.contains("\"lambda_n\": \"1.5\""));
    }
}
