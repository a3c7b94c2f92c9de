//! Batch front end shared by the `trajquad` binary and the golden tests.
//!
//! A run is described by a [`RunConfig`], read from a JSON file and/or
//! flags (flags win). Every output starts with the library version and the
//! merged config, so a result file can be replayed.

use crate::exactalg::{fmt_rational, to_f64, MultiPoly, Rational, Var};
use crate::trajectory::{build_grid, Direction, Potential1D, TrajectoryError};
use crate::{coulomb, excited, gexpand, greens, oracle, oscpert};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::str::FromStr;
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("method breakdown: {0}")]
    Method(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 config, 2 method, 3 tolerance. I/O problems count as config errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Method(_) => 2,
            CliError::Tolerance(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn method_err(e: impl std::fmt::Display) -> CliError {
    CliError::Method(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Gexpand,
    Perturb,
    Coulomb,
    Stark,
    GreensCheck,
    Excited,
    Oracle,
}

impl Command {
    /// Command-specific keys accepted besides `command`, `out` and `format`.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Gexpand => &["potential", "order", "g", "n", "extent"],
            Command::Perturb => &["parity", "p", "order", "g", "eps"],
            Command::Coulomb => &["potential", "order", "g", "eps"],
            Command::Stark => &["order", "g", "eps"],
            Command::GreensCheck => &["g", "n", "extent"],
            Command::Excited => &["freqs", "occupation", "potential", "n", "extent"],
            Command::Oracle => &["potential", "domain", "n", "levels", "radial", "g", "eps", "r_max"],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ParityArg {
    Even,
    Odd,
}

/// Merged run description. `None` means "use the command's default".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Polynomial in `x` (one-dimensional commands) or `r`, `u` (coulomb,
    /// radial oracle).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParityArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    /// Grid points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Rationals as text, e.g. `"3/2"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freqs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub occupation: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Command-line flags; every value overrides the `--config` file.
#[derive(Debug, Parser)]
#[command(name = "trajquad", version, about = "Trajectory quadrature for semiclassical ground and excited states")]
pub struct Args {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Coupling g (> 0).
    #[arg(long)]
    pub g: Option<f64>,
    /// Perturbation strength ε.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Expansion order.
    #[arg(long)]
    pub order: Option<usize>,
    /// Potential polynomial, e.g. "1/2*x^2 + 1/10*x^4" or "r^2".
    #[arg(long)]
    pub potential: Option<String>,
    /// perturb: parity of the perturbation x^{2p} (even) or x^{2p+1} (odd).
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
    /// perturb: power index p.
    #[arg(long)]
    pub p: Option<u32>,
    /// Grid points.
    #[arg(long, visible_alias = "points")]
    pub n: Option<usize>,
    /// Trajectory length (gexpand, excited) or grid half-width (greens-check).
    #[arg(long)]
    pub extent: Option<f64>,
    /// oracle: box as "a,b".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,
    /// oracle: number of eigenvalues.
    #[arg(long)]
    pub levels: Option<usize>,
    /// oracle: radial Coulomb problem with U(r) = potential.
    #[arg(long)]
    pub radial: Option<bool>,
    /// oracle: outer radius of the radial box.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// excited: frequencies, comma separated rationals.
    #[arg(long, value_delimiter = ',')]
    pub freqs: Option<Vec<String>>,
    /// excited: occupation numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub occupation: Option<Vec<u32>>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Args {
    fn overrides(&self) -> Result<RunConfig, CliError> {
        let domain = match &self.domain {
            None => None,
            Some(d) if d.len() == 2 => Some([d[0], d[1]]),
            Some(_) => return Err(config_err("--domain needs two values a,b")),
        };
        Ok(RunConfig {
            command: self.command,
            g: self.g,
            eps: self.eps,
            order: self.order,
            potential: self.potential.clone(),
            parity: self.parity,
            p: self.p,
            n: self.n,
            extent: self.extent,
            domain,
            levels: self.levels,
            radial: self.radial,
            r_max: self.r_max,
            freqs: self.freqs.clone(),
            occupation: self.occupation.clone(),
            out: self.out.clone(),
            format: self.format,
        })
    }

    /// Config file (if any) overlaid with the flags, validated.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        let cfg = base.overlay(self.overrides()?);
        cfg.validate()?;
        Ok(cfg)
    }
}

macro_rules! pick {
    ($top:ident, $base:ident, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(config_err)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        pick!(
            top, base, command, g, eps, order, potential, parity, p, n, extent, domain, levels, radial, r_max, freqs,
            occupation, out, format
        )
    }

    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! mark {
            ($($f:ident),*) => { $( if self.$f.is_some() { v.push(stringify!($f)); } )* };
        }
        mark!(g, eps, order, potential, parity, p, n, extent, domain, levels, radial, r_max, freqs, occupation);
        v
    }

    /// Keys must belong to the command; numbers must be in range.
    pub fn validate(&self) -> Result<(), CliError> {
        let cmd = self.command.ok_or_else(|| config_err("no command given"))?;
        let allowed = cmd.keys();
        if let Some(bad) = self.present().into_iter().find(|k| !allowed.contains(k)) {
            return Err(config_err(format!("key `{bad}` does not apply to this command")));
        }
        let finite = |name: &str, v: Option<f64>| match v {
            Some(x) if !x.is_finite() => Err(config_err(format!("{name} must be finite"))),
            _ => Ok(()),
        };
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(config_err(format!("{name} must be positive"))),
            _ => Ok(()),
        };
        positive("g", self.g)?;
        finite("eps", self.eps)?;
        positive("extent", self.extent)?;
        positive("r_max", self.r_max)?;
        if let Some([a, b]) = self.domain {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(config_err("domain must satisfy a < b"));
            }
        }
        if self.levels == Some(0) {
            return Err(config_err("levels must be at least 1"));
        }
        if let Some(o) = self.order {
            let (lo, hi) = match cmd {
                Command::Gexpand => (1, gexpand::MAX_ORDER),
                Command::Stark => (2, 64),
                _ => (1, 64),
            };
            if o < lo || o > hi {
                return Err(config_err(format!("order must be in {lo}..={hi}")));
            }
        }
        if let Some(n) = self.n {
            let lo = match cmd {
                Command::Oracle => 200,
                Command::GreensCheck => 101,
                _ => 64,
            };
            if n < lo || n > 2_000_001 {
                return Err(config_err(format!("n must be in {lo}..=2000001")));
            }
            if cmd == Command::GreensCheck && n % 2 == 0 {
                return Err(config_err("greens-check needs an odd n"));
            }
        }
        if let Some(p) = self.p {
            if p > 16 {
                return Err(config_err("p must be at most 16"));
            }
        }
        if let Some(f) = &self.freqs {
            parse_freqs(f)?;
        }
        Ok(())
    }

    fn command(&self) -> Command {
        self.command.expect("validated")
    }
}

fn parse_freqs(f: &[String]) -> Result<Vec<Rational>, CliError> {
    f.iter()
        .map(|s| Rational::from_str(s.trim()).map_err(|_| config_err(format!("frequency `{s}` is not a rational"))))
        .collect()
}

/// Table plus named summary values.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Vec<(String, Value)>,
    /// Checks that exceeded their tolerance.
    pub failures: Vec<String>,
}

impl Report {
    fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    fn row(&mut self, cells: Vec<Value>) {
        self.rows.push(cells);
    }

    fn note(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.push((key.into(), v.into()));
    }

    fn result_json(&self) -> Value {
        let table: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        let summary: serde_json::Map<String, Value> = self.summary.iter().cloned().collect();
        json!({ "table": table, "summary": summary, "failures": self.failures })
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Render a finished run in the configured format.
pub fn render(cfg: &RunConfig, report: &Report) -> String {
    match cfg.format.unwrap_or_default() {
        Format::Json => {
            let cfg_value: Value = serde_json::from_str(&cfg.to_json()).expect("config is JSON");
            let doc = json!({ "version": VERSION, "config": cfg_value, "result": report.result_json() });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = format!("# trajquad {VERSION}\n# config: {}\n", cfg.to_json());
            for (k, v) in &report.summary {
                out.push_str(&format!("# {k}: {}\n", cell_text(v)));
            }
            for f in &report.failures {
                out.push_str(&format!("# FAILED: {f}\n"));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.columns).expect("in-memory write");
            for r in &report.rows {
                w.write_record(r.iter().map(cell_text)).expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
            out
        }
    }
}

/// Run the configured command. Tolerance failures are listed in the
/// report, not returned as errors, so the output can still be written.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match cfg.command() {
        Command::Gexpand => run_gexpand(cfg),
        Command::Perturb => run_perturb(cfg),
        Command::Coulomb => run_coulomb(cfg, false),
        Command::Stark => run_coulomb(cfg, true),
        Command::GreensCheck => run_greens(cfg),
        Command::Excited => run_excited(cfg),
        Command::Oracle => run_oracle(cfg),
    }
}

/// Run, render, and write to `out` or return the text for stdout.
pub fn execute(cfg: &RunConfig) -> Result<Option<String>, CliError> {
    let report = run(cfg)?;
    finish(cfg, &report)
}

/// Emit a finished report; failed checks become [`CliError::Tolerance`]
/// after the output is written.
pub fn finish(cfg: &RunConfig, report: &Report) -> Result<Option<String>, CliError> {
    let text = render(cfg, report);
    let shown = match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            None
        }
        None => Some(text),
    };
    if !report.failures.is_empty() {
        if let Some(t) = &shown {
            print!("{t}");
        }
        return Err(CliError::Tolerance(report.failures.join("; ")));
    }
    Ok(shown)
}

fn potential_1d(cfg: &RunConfig, default: &str) -> Result<Potential1D, CliError> {
    let text = cfg.potential.as_deref().unwrap_or(default);
    let v = Potential1D::parse(text, 0.0).map_err(config_err)?;
    v.validate().map_err(config_err)?;
    Ok(v)
}

fn traj_err(e: TrajectoryError) -> CliError {
    match e {
        TrajectoryError::Quadrature(_) => method_err(e),
        _ => config_err(e),
    }
}

fn run_gexpand(cfg: &RunConfig) -> Result<Report, CliError> {
    let v = potential_1d(cfg, "1/2*x^2 + 1/10*x^4")?;
    let order = cfg.order.unwrap_or(3);
    let grid = build_grid(&v, cfg.extent.unwrap_or(2.0), cfg.n.unwrap_or(2001), Direction::Plus).map_err(traj_err)?;
    let sol = gexpand::hierarchy(&grid, order).map_err(method_err)?;
    let mut rep = Report::new(&["k", "e_k", "pde_residual"]);
    for k in 0..=order {
        let res = if k == 0 { 0.0 } else { sol.pde_residual(k).iter().fold(0.0f64, |m, r| m.max(r.abs())) };
        rep.row(vec![json!(k), json!(sol.energies[k]), json!(res)]);
    }
    if let Some(g) = cfg.g {
        rep.note("energy", gexpand::assemble_energy(&sol, g));
    }
    Ok(rep)
}

fn run_perturb(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.p.unwrap_or(2);
    let order = cfg.order.unwrap_or(4);
    let s = match cfg.parity.unwrap_or(ParityArg::Even) {
        ParityArg::Even => oscpert::solve_even(p, order),
        ParityArg::Odd => oscpert::solve_odd(p, order),
    }
    .map_err(method_err)?;
    let g = cfg.g.unwrap_or(1.0);
    let mut rep = Report::new(&["k", "delta_exact", "delta_at_g"]);
    for (k, exact, value) in oscpert::table_rows(&s, g) {
        rep.row(vec![json!(k), json!(exact), json!(value)]);
    }
    if let Some(eps) = cfg.eps {
        rep.note("energy", s.energy(g, eps, order));
    }
    Ok(rep)
}

fn run_coulomb(cfg: &RunConfig, stark: bool) -> Result<Report, CliError> {
    let sol = if stark {
        coulomb::solve_stark(cfg.order.unwrap_or(12))
    } else {
        let text = cfg.potential.as_deref().unwrap_or("r^2");
        let u = MultiPoly::parse_in(text, &[Var::R, Var::U]).map_err(config_err)?;
        coulomb::solve(&u, cfg.order.unwrap_or(8))
    }
    .map_err(|e| match e {
        coulomb::CoulombError::InvalidPotential(_) | coulomb::CoulombError::InvalidOrder(_) => config_err(e),
        _ => method_err(e),
    })?;
    let trunc = sol.order();
    let mut rep = Report::new(&["n", "e_n", "s_n"]);
    for (n, e, s) in sol.table() {
        rep.row(vec![json!(n), json!(e), json!(s)]);
    }
    rep.note("energy", sol.energy_text(trunc).map_err(method_err)?);
    if let (Some(g), Some(eps)) = (cfg.g, cfg.eps) {
        rep.note("energy_value", sol.energy(g, eps, trunc));
    }
    Ok(rep)
}

/// Tolerances of the numeric identity checks.
pub const DBAR_TOL: f64 = 1e-7;
pub const ONE_PLUS_CT_TOL: f64 = 1e-6;
pub const GREEN_TOL: f64 = 1e-5;

fn run_greens(cfg: &RunConfig) -> Result<Report, CliError> {
    let g = cfg.g.unwrap_or(1.0);
    let extent = cfg.extent.unwrap_or(8.0);
    let n = cfg.n.unwrap_or(4001);
    let mut checks = Vec::new();
    for l in 1..=4 {
        checks.push((greens::check_dbar_hermite(l, g, extent, n), DBAR_TOL));
    }
    for k in [2, 3] {
        let f = greens::WaveProfile::harmonic(extent, n, move |x| x.powi(k)).map_err(method_err)?;
        let tag = |r: Result<greens::IdentityReport, _>| {
            r.map(|mut r: greens::IdentityReport| {
                r.identity = format!("{}, f = x^{k}", r.identity);
                r
            })
        };
        checks.push((tag(greens::check_one_plus_ct(&f, g)), ONE_PLUS_CT_TOL));
        checks.push((tag(greens::check_green_residual(&f, g)), GREEN_TOL));
    }
    let mut rep = Report::new(&["identity", "grid_size", "max_residual", "tolerance", "pass"]);
    for (r, tol) in checks {
        let r = r.map_err(method_err)?;
        let pass = r.max_residual <= tol;
        if !pass {
            rep.failures.push(format!("{} residual {:e} > {tol:e}", r.identity, r.max_residual));
        }
        rep.row(vec![json!(r.identity), json!(r.grid_size), json!(r.max_residual), json!(tol), json!(pass)]);
    }
    Ok(rep)
}

fn run_excited(cfg: &RunConfig) -> Result<Report, CliError> {
    let occupation = cfg.occupation.clone().unwrap_or_else(|| vec![1]);
    let freqs = match &cfg.freqs {
        Some(f) => parse_freqs(f)?,
        None => vec![Rational::from_integer(1.into()); occupation.len()],
    };
    let spec = excited::ExcitedSpec::new(freqs, occupation).map_err(config_err)?;
    let (chi0, e0) = excited::chi0_e0(&spec);
    let mut rep = Report::new(&["quantity", "value"]);
    rep.row(vec![json!("chi0"), json!(chi0.to_string())]);
    rep.row(vec![json!("e0"), json!(fmt_rational(&e0))]);
    rep.row(vec![json!("chi1_harmonic"), json!(excited::chi1_harmonic(&spec).to_string())]);
    let multiplet = excited::multiplet(&spec);
    let text: Vec<String> =
        multiplet.iter().map(|m| m.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")).collect();
    rep.row(vec![json!("multiplet"), json!(text.join("; "))]);
    if cfg.potential.is_some() {
        if spec.dim() != 1 {
            return Err(config_err("numeric E1 needs a single mode"));
        }
        let v = potential_1d(cfg, "")?;
        let grid =
            build_grid(&v, cfg.extent.unwrap_or(2.0), cfg.n.unwrap_or(2001), Direction::Plus).map_err(traj_err)?;
        let sol = gexpand::hierarchy(&grid, 1).map_err(method_err)?;
        let n = spec.occupation[0];
        let e1 = excited::excited_e1_numeric(&grid, &sol.s[0], n).map_err(method_err)?;
        rep.row(vec![json!("e0_potential"), json!(n as f64 * grid.curvature_root())]);
        rep.row(vec![json!("e1_numeric"), json!(e1)]);
        if (grid.curvature_root() - to_f64(&spec.freqs[0])).abs() > 1e-12 * grid.curvature_root() {
            rep.note("warning", "freqs differ from the potential's curvature; exact rows use freqs");
        }
    }
    Ok(rep)
}

fn run_oracle(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.n.unwrap_or(2000);
    let res = if cfg.radial.unwrap_or(false) {
        let text = cfg.potential.as_deref().unwrap_or("r^2");
        let u = MultiPoly::parse_in(text, &[Var::R]).map_err(config_err)?;
        let g = cfg.g.unwrap_or(1.0);
        let eps = cfg.eps.unwrap_or(0.0);
        oracle::solve_radial(g, move |r| u.eval(&[r]), eps, cfg.r_max.unwrap_or(40.0), n)
    } else {
        let text = cfg.potential.as_deref().unwrap_or("1/2*x^2");
        let v = MultiPoly::parse_in(text, &[Var::X]).map_err(config_err)?;
        let [a, b] = cfg.domain.unwrap_or([-10.0, 10.0]);
        oracle::solve_1d(move |x| v.eval(&[x]), (a, b), n, cfg.levels.unwrap_or(1))
    }
    .map_err(|e| match e {
        oracle::OracleError::InvalidInput(_) => config_err(e),
        _ => method_err(e),
    })?;
    let mut rep = Report::new(&["j", "eigenvalue", "error_estimate", "coarse", "fine"]);
    for j in 0..res.eigenvalues.len() {
        rep.row(vec![
            json!(j),
            json!(res.eigenvalues[j]),
            json!(res.error_estimates[j]),
            json!(res.coarse[j]),
            json!(res.fine[j]),
        ]);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    #[test]
    fn unknown_and_foreign_keys_rejected() {
        assert!(RunConfig::from_json(r#"{"command":"stark","colour":1}"#).is_err());
        let c = cfg(r#"{"command":"stark","potential":"r^2"}"#);
        assert_eq!(c.validate().unwrap_err().exit_code(), 1);
    }

    #[test]
    fn ranges_checked() {
        for bad in [
            r#"{"command":"perturb","g":-1}"#,
            r#"{"command":"gexpand","order":4}"#,
            r#"{"command":"greens-check","n":4000}"#,
            r#"{"command":"oracle","domain":[1,-1]}"#,
            r#"{"command":"excited","freqs":["a"]}"#,
        ] {
            assert!(cfg(bad).validate().is_err(), "{bad}");
        }
    }

    #[test]
    fn overlay_prefers_flags() {
        let base = cfg(r#"{"command":"stark","order":8,"g":2}"#);
        let top = RunConfig { order: Some(12), ..Default::default() };
        let m = base.overlay(top);
        assert_eq!((m.order, m.g), (Some(12), Some(2.0)));
    }

    #[test]
    fn echo_round_trips() {
        let c = cfg(r#"{"command":"oracle","potential":"1/2*x^2","n":400,"domain":[-8,8],"format":"json"}"#);
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn stark_table() {
        let rep = run(&cfg(r#"{"command":"stark","order":12}"#)).unwrap();
        assert_eq!(rep.rows[6][1], json!("-9/4 * ε^2"));
        assert_eq!(rep.rows[12][1], json!("-3555/64 * ε^4"));
    }

    #[test]
    fn perturb_quartic() {
        let rep = run(&cfg(r#"{"command":"perturb","parity":"even","p":2,"order":2,"g":1}"#)).unwrap();
        assert_eq!(rep.rows[0][1], json!("3/4 * ĝ^2"));
        assert_eq!(rep.rows[0][2], json!(0.75));
        assert_eq!(rep.rows[1][1], json!("-21/8 * ĝ^5"));
        assert_eq!(rep.rows[1][2], json!(-2.625));
    }

    #[test]
    fn oracle_harmonic() {
        let rep = run(&cfg(r#"{"command":"oracle","potential":"0.5*x^2","n":400}"#)).unwrap();
        let e = rep.rows[0][1].as_f64().unwrap();
        assert!((e - 0.5).abs() < 1e-4, "{e}");
    }

    #[test]
    fn failed_check_exits_with_tolerance_code() {
        let c = cfg(r#"{"command":"greens-check"}"#);
        let mut rep = Report::new(&["identity"]);
        rep.failures.push("made up".into());
        assert_eq!(finish(&c, &rep).unwrap_err().exit_code(), 3);
        assert!(render(&c, &rep).contains("# FAILED: made up"));
    }

    #[test]
    fn csv_carries_version_and_config() {
        let c = cfg(r#"{"command":"stark","order":4}"#);
        let text = render(&c, &run(&c).unwrap());
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# trajquad {VERSION}"));
        let echo = lines.next().unwrap().strip_prefix("# config: ").unwrap();
        assert_eq!(RunConfig::from_json(echo).unwrap(), c);
    }
}
