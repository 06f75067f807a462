//! Batch front end: a TOML run configuration with `BOSEGP_` environment
//! overrides, dispatch to the library, and deterministic JSON/CSV reports.
//!
//! Environment keys map onto config paths with `__` between levels, so
//! `BOSEGP_SOLVER__TOLERANCE=1e-8` sets `solver.tolerance`. Values are read
//! as TOML and fall back to plain strings.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{self, BoundReport, SandwichOptions, DEFAULT_C, DEFAULT_EXPONENT};
use crate::gp::{self, GpSolution, Grid, SolverOptions};
use crate::potentials::{InteractionPotential, TrapPotential};
use crate::scattering::{compute_scattering, ScatteringOptions, ScatteringResult};
use crate::tf::{self, TfConvergence, TfSolution};
use crate::{Error, Result};

pub const ENV_PREFIX: &str = "BOSEGP_";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys spelled in upper case in the config file.
const UPPER_KEYS: [&str; 4] = ["N", "C", "L", "R"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Scatter,
    Solve,
    Tf,
    Bounds,
    Sweep,
    Sandwich,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Scatter,
        Command::Solve,
        Command::Tf,
        Command::Bounds,
        Command::Sweep,
        Command::Sandwich,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Solve => "solve",
            Command::Tf => "tf",
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
            Command::Sandwich => "sandwich",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

/// A single particle number or a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Count {
    One(f64),
    Sweep(Vec<f64>),
}

impl Count {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Count::One(n) => vec![*n],
            Count::Sweep(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// Half-width of the Neumann box.
    #[serde(rename = "R")]
    pub box_extent: f64,
    pub box_h: f64,
    pub exponent: f64,
    pub radial_h: f64,
    pub radial_extent: Option<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        let s = SandwichOptions::default();
        Self {
            c: DEFAULT_C,
            l: s.cell,
            box_extent: s.box_extent,
            box_h: s.box_h,
            exponent: DEFAULT_EXPONENT,
            radial_h: s.radial_h,
            radial_extent: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TfConfig {
    pub na: Vec<f64>,
    pub h: f64,
}

impl Default for TfConfig {
    fn default() -> Self {
        Self {
            na: vec![1.0, 10.0, 100.0, 1000.0],
            h: 0.02,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub trap: TrapPotential,
    #[serde(default = "InteractionPotential::zero")]
    pub interaction: InteractionPotential,
    #[serde(rename = "N")]
    pub n: Count,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub a1: Option<f64>,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub tf: TfConfig,
    #[serde(default)]
    pub scattering: ScatteringOptions,
    #[serde(default)]
    pub outputs: Outputs,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.a, self.a1) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::Config("give exactly one of `a` and `a1`".into()));
            }
            (Some(a), None) | (None, Some(a)) if !(a >= 0.0 && a.is_finite()) => {
                return Err(Error::Config(format!(
                    "scattering length must be finite and nonnegative, got {a}"
                )));
            }
            _ => {}
        }
        let ns = self.n.values();
        if ns.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
            return Err(Error::Config("`N` values must be positive".into()));
        }
        if !strictly_increasing(&ns) {
            return Err(Error::Config(
                "`N` sweep must be strictly increasing".into(),
            ));
        }
        if !strictly_increasing(&self.tf.na) || self.tf.na.iter().any(|x| *x <= 0.0) {
            return Err(Error::Config(
                "`tf.na` must be positive and strictly increasing".into(),
            ));
        }
        let tol = self.solver.tolerance;
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::Config(format!(
                "`solver.tolerance` = {tol} must lie in (0, 1e-2]"
            )));
        }
        Ok(())
    }

    /// `a` at particle number `n`.
    pub fn a_at(&self, n: f64) -> f64 {
        self.a.unwrap_or_else(|| self.a1.unwrap_or(0.0) / n)
    }

    /// `a1 = N a` at particle number `n`.
    pub fn a1_at(&self, n: f64) -> f64 {
        self.a1.unwrap_or_else(|| self.a.unwrap_or(0.0) * n)
    }

    fn sandwich_options(&self, estar: bool) -> SandwichOptions {
        SandwichOptions {
            radial_h: self.bounds.radial_h,
            radial_extent: self.bounds.radial_extent,
            box_extent: self.bounds.box_extent,
            box_h: self.bounds.box_h,
            cell: self.bounds.l,
            c: self.bounds.c,
            exponent: self.bounds.exponent,
            estar,
            solver: self.solver,
            scattering: self.scattering,
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn key_for(segment: &str) -> String {
    let lower = segment.to_ascii_lowercase();
    UPPER_KEYS
        .iter()
        .find(|k| k.eq_ignore_ascii_case(&lower))
        .map_or(lower, |k| (*k).to_string())
}

fn parse_override(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_overrides(
    table: &mut toml::Table,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<Vec<String>> {
    let mut applied = Vec::new();
    let mut vars: Vec<(String, String)> = env
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(key_for).collect();
        if path.iter().any(String::is_empty) {
            return Err(Error::Config(format!("malformed override {key}")));
        }
        let (last, parents) = path.split_last().expect("nonempty path");
        let mut node = &mut *table;
        for p in parents {
            let entry = node
                .entry(p.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            node = entry
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("override {key}: `{p}` is not a table")))?;
        }
        node.insert(last.clone(), parse_override(&raw));
        applied.push(path.join("."));
    }
    Ok(applied)
}

/// Parses and validates a config, applying `BOSEGP_` overrides from `env`.
pub fn parse_config(
    text: &str,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<RunConfig> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let applied = apply_overrides(&mut table, env)?;
    let merged = if applied.is_empty() {
        text.to_string()
    } else {
        toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?
    };
    let cfg: RunConfig = toml::from_str(&merged).map_err(|e| {
        let origin = if applied.is_empty() {
            String::new()
        } else {
            format!(" (after overrides of {})", applied.join(", "))
        };
        Error::Config(format!("{e}{origin}"))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(
    path: &Path,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, env).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub n: f64,
    pub a: f64,
    pub solution: Option<GpSolution>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfPayload {
    pub tf: TfSolution,
    pub convergence: TfConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    Scatter(ScatteringResult),
    Solve(Vec<SolveRow>),
    Tf(TfPayload),
    Bounds(Vec<BoundReport>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub provenance: Provenance,
    /// All validity flags true.
    pub valid: bool,
    /// Which flags failed, if any.
    pub failures: Vec<String>,
    pub payload: Payload,
}

fn solve_grid(cfg: &RunConfig, n: f64) -> Result<Grid> {
    match cfg.grid {
        Some(g) => Ok(g),
        None => tf::grid_for(&cfg.trap, n * cfg.a_at(n), 0.02).map_err(|_| {
            Error::Config("`grid` is required for a trap that is not homogeneous".into())
        }),
    }
}

fn scatter(cfg: &RunConfig) -> Result<(Payload, Vec<String>)> {
    let s = compute_scattering(&cfg.interaction, &cfg.scattering)?;
    let mut failures = Vec::new();
    if s.bracket_width() > cfg.scattering.tolerance {
        failures.push(format!(
            "bracket width {:e} above tolerance",
            s.bracket_width()
        ));
    }
    if let Some(sr) = s.sr_bound {
        if s.bracket.0 > sr {
            failures.push(format!("a = {} exceeds half the second moment {sr}", s.a));
        }
    }
    Ok((Payload::Scatter(s), failures))
}

fn solve(cfg: &RunConfig) -> Result<(Payload, Vec<String>)> {
    let ns = cfg.n.values();
    let grids = ns
        .iter()
        .map(|&n| solve_grid(cfg, n))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<SolveRow> = ns
        .par_iter()
        .zip(grids)
        .map(|(&n, g)| {
            let a = cfg.a_at(n);
            match gp::minimize(&cfg.trap, a, n, g, &cfg.solver) {
                Ok(sol) => SolveRow {
                    n,
                    a,
                    solution: Some(sol),
                    error: None,
                },
                Err(e) => SolveRow {
                    n,
                    a,
                    solution: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut failures = Vec::new();
    for r in &rows {
        match &r.solution {
            None => failures.push(format!(
                "N = {}: {}",
                r.n,
                r.error.as_deref().unwrap_or("failed")
            )),
            Some(s) => {
                if !s.extent_adequate {
                    failures.push(format!(
                        "N = {}: grid extent too small for μ = {}",
                        r.n, s.mu
                    ));
                }
                if s.floor_hit {
                    failures.push(format!("N = {}: amplitude floor reached", r.n));
                }
            }
        }
    }
    Ok((Payload::Solve(rows), failures))
}

fn thomas_fermi(cfg: &RunConfig) -> Result<(Payload, Vec<String>)> {
    let n = cfg.n.values()[0];
    let tf_sol = tf::tf_minimize(&cfg.trap, n, cfg.a_at(n).max(f64::MIN_POSITIVE))?;
    let conv = tf::gp_tf_convergence(&cfg.trap, &cfg.tf.na, cfg.tf.h, &cfg.solver)?;
    let mut failures = Vec::new();
    for r in &conv.rows {
        if !r.tf_below_gp {
            failures.push(format!(
                "Na = {}: F = {} above E^GP = {}",
                r.na, r.f_value, r.gp_energy
            ));
        }
    }
    if conv
        .rows
        .windows(2)
        .any(|w| w[1].energy_ratio >= w[0].energy_ratio)
    {
        failures.push("energy ratio not decreasing in Na".into());
    }
    Ok((
        Payload::Tf(TfPayload {
            tf: tf_sol,
            convergence: conv,
        }),
        failures,
    ))
}

fn report_failures(reports: &[BoundReport]) -> Vec<String> {
    let mut f = Vec::new();
    for r in reports {
        for e in &r.errors {
            f.push(format!("N = {}: {e}", r.n));
        }
        if !r.ordered {
            f.push(format!("N = {}: lower ≤ E^GP ≤ upper fails", r.n));
        }
        if !r.valid {
            f.push(format!("N = {}: report not valid", r.n));
        }
    }
    f
}

fn sandwich(cfg: &RunConfig, estar: bool, sweep: bool) -> Result<(Payload, Vec<String>)> {
    let ns = cfg.n.values();
    let a1 = cfg.a1_at(ns[0]);
    if cfg.a.is_some() && ns.len() > 1 {
        return Err(Error::Config(
            "sweeps run at fixed `a1`; give `a1` instead of `a`".into(),
        ));
    }
    let opts = cfg.sandwich_options(estar);
    let reports = bounds::sweep(&cfg.trap, &cfg.interaction, a1, &ns, &opts)?;
    let mut failures = report_failures(&reports);
    if sweep {
        if !bounds::gaps_shrinking(&reports.iter().map(|r| r.upper_gap).collect::<Vec<_>>()) {
            failures.push("upper gap not shrinking with N".into());
        }
        if !bounds::gaps_shrinking(&reports.iter().map(|r| r.lower_gap).collect::<Vec<_>>()) {
            failures.push("lower gap not shrinking with N".into());
        }
    }
    Ok((Payload::Bounds(reports), failures))
}

/// Runs `command` on a validated config.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let (payload, failures) = match command {
        Command::Scatter => scatter(cfg)?,
        Command::Solve => solve(cfg)?,
        Command::Tf => thomas_fermi(cfg)?,
        Command::Bounds => sandwich(cfg, true, false)?,
        Command::Sandwich => sandwich(cfg, false, false)?,
        Command::Sweep => sandwich(cfg, false, true)?,
    };
    Ok(RunReport {
        command,
        provenance: Provenance {
            config_hash: cfg.hash(),
            version: VERSION.to_string(),
            grid: cfg.grid,
        },
        valid: failures.is_empty(),
        failures,
        payload,
    })
}

/// Pretty JSON with every float written to 17 significant digits.
struct Digits17(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(report: &RunReport) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Digits17(serde_json::ser::PrettyFormatter::new()),
    );
    report.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn from_json(bytes: &[u8]) -> Result<RunReport> {
    Ok(serde_json::from_slice(bytes)?)
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Table {
    doc: Vec<(&'static str, &'static str)>,
    rows: Vec<Vec<String>>,
}

fn table(payload: &Payload) -> Table {
    match payload {
        Payload::Scatter(s) => Table {
            doc: vec![
                ("r", "radius"),
                ("u", "zero-energy solution, u'(r_max) = 1"),
                ("h", "r - u/u', increasing to the scattering length"),
            ],
            rows: s
                .u_samples
                .iter()
                .zip(&s.h_samples)
                .map(|((r, u), (_, h))| vec![num(*r), num(*u), num(*h)])
                .collect(),
        },
        Payload::Solve(rows) => Table {
            doc: vec![
                ("n", "particle number"),
                ("a", "scattering length"),
                ("energy", "discrete GP energy"),
                ("kinetic", "gradient term"),
                ("trap", "trap term"),
                ("interaction", "4πa∫Φ⁴"),
                ("mu", "chemical potential"),
                ("rho_bar", "∫ρ²/N"),
                ("max_density", "sup ρ"),
                ("residual", "GP equation residual"),
                ("virial", "(2/3)T - (s/3)P + U, homogeneous traps only"),
                ("iterations", "minimiser iterations"),
                ("error", "failure message, empty on success"),
            ],
            rows: rows
                .iter()
                .map(|r| {
                    let s = r.solution.as_ref();
                    let f = |g: fn(&GpSolution) -> f64| opt(s.map(g));
                    vec![
                        num(r.n),
                        num(r.a),
                        f(|s| s.energy),
                        f(|s| s.parts.kinetic),
                        f(|s| s.parts.trap),
                        f(|s| s.parts.interaction),
                        f(|s| s.mu),
                        f(|s| s.rho_bar),
                        f(|s| s.max_density),
                        f(|s| s.residual_gp),
                        opt(s.and_then(|s| s.virial_residual)),
                        s.map(|s| s.iterations.to_string()).unwrap_or_default(),
                        r.error.clone().unwrap_or_default(),
                    ]
                })
                .collect(),
        },
        Payload::Tf(t) => {
            let mut rows: Vec<Vec<String>> = t
                .convergence
                .rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.na),
                        num(r.energy_ratio),
                        num(r.l2_distance),
                        num(r.f_value),
                        num(r.gp_energy),
                        r.tf_below_gp.to_string(),
                        num(r.gradient_upper),
                    ]
                })
                .collect();
            rows.push(vec![
                "inf".into(),
                num(t.convergence.limit_ratio),
                num(0.0),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            Table {
                doc: vec![
                    ("na", "coupling Na; the last row is the analytic limit"),
                    ("energy_ratio", "E^GP(1,Na) / (Na)^{s/(s+3)}"),
                    (
                        "l2_distance",
                        "L² distance of the rescaled GP density to the unit TF density",
                    ),
                    ("f_value", "TF energy F(1,Na)"),
                    ("gp_energy", "E^GP(1,Na)"),
                    ("tf_below_gp", "F(1,Na) ≤ E^GP(1,Na)"),
                    (
                        "gradient_upper",
                        "TF energy plus the mollified gradient term, an upper bound",
                    ),
                ],
                rows,
            }
        }
        Payload::Bounds(reports) => Table {
            doc: vec![
                ("n", "particle number"),
                ("a", "scattering length a1/N"),
                ("lower", "assembled box lower bound, empty when vacuous"),
                ("gp", "full-space GP energy"),
                ("gp_box", "Neumann-box GP energy"),
                ("upper", "Dyson-type upper bound"),
                ("upper_gap", "upper/gp - 1"),
                ("lower_gap", "1 - lower/gp, empty when vacuous"),
                ("estar", "E*(1, Na), empty when not computed"),
                ("valid", "all validity flags of the row"),
            ],
            rows: reports
                .iter()
                .map(|r| {
                    vec![
                        num(r.n),
                        num(r.a),
                        opt(r.lower_assembled.and_then(|l| l.value)),
                        opt(r.gp_reference),
                        opt(r.gp_box),
                        opt(r.upper_value),
                        opt(r.upper_gap),
                        opt(r.lower_gap),
                        opt(r.estar.map(|e| e.per_particle)),
                        r.valid.to_string(),
                    ]
                })
                .collect(),
        },
    }
}

/// CSV with `#` comment lines naming the run and documenting each column.
pub fn to_csv(report: &RunReport) -> Result<Vec<u8>> {
    let t = table(&report.payload);
    let mut out = Vec::new();
    writeln!(
        out,
        "# bosegp {} {} config-sha256 {}",
        report.provenance.version, report.command, report.provenance.config_hash
    )?;
    for (name, doc) in &t.doc {
        writeln!(out, "# {name}: {doc}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(t.doc.iter().map(|(n, _)| *n))?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(out)
}

pub fn emit(report: &RunReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Writes the report to the config's `outputs` paths.
pub fn write_outputs(report: &RunReport, outputs: &Outputs) -> Result<()> {
    if let Some(p) = &outputs.json {
        std::fs::write(p, to_json(report)?)?;
    }
    if let Some(p) = &outputs.csv {
        std::fs::write(p, to_csv(report)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
N = 1.0
a = 0.0
[trap]
kind = "harmonic"
[grid]
kind = "radial"
h = 0.02
R = 8.0
boundary = "decay"
"#;

    fn none() -> Vec<(String, String)> {
        vec![]
    }

    #[test]
    fn parses_and_solves_linear_case() {
        let cfg = parse_config(BASE, none()).unwrap();
        let rep = run(Command::Solve, &cfg).unwrap();
        assert!(rep.valid, "{:?}", rep.failures);
        let Payload::Solve(rows) = &rep.payload else {
            panic!()
        };
        assert!((rows[0].solution.as_ref().unwrap().energy - 3.0).abs() < 1e-3);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err =
            parse_config(&format!("{BASE}\n[solver]\ntolerence = 1e-9\n"), none()).unwrap_err();
        assert!(err.to_string().contains("tolerence"), "{err}");
        let err = parse_config(&format!("bogus = 1\n{BASE}"), none()).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn exactly_one_coupling() {
        assert!(parse_config(&format!("a1 = 1.0\n{BASE}"), none()).is_err());
        assert!(parse_config(&BASE.replace("a = 0.0", ""), none()).is_err());
    }

    #[test]
    fn sweeps_and_tolerance_validated() {
        assert!(parse_config(&BASE.replace("N = 1.0", "N = [10.0, 5.0]"), none()).is_err());
        assert!(parse_config(&format!("{BASE}\n[solver]\ntolerance = 0.1\n"), none()).is_err());
        assert!(parse_config(&format!("{BASE}\n[solver]\ntolerance = 0.0\n"), none()).is_err());
    }

    #[test]
    fn environment_overrides() {
        let env = vec![
            ("BOSEGP_SOLVER__TOLERANCE".to_string(), "1e-7".to_string()),
            ("BOSEGP_N".to_string(), "[1.0, 2.0]".to_string()),
            ("BOSEGP_BOUNDS__C".to_string(), "2.5".to_string()),
            ("BOSEGP_TRAP__KIND".to_string(), "harmonic".to_string()),
            ("OTHER".to_string(), "x".to_string()),
        ];
        let cfg = parse_config(BASE, env).unwrap();
        assert_eq!(cfg.solver.tolerance, 1e-7);
        assert_eq!(cfg.n, Count::Sweep(vec![1.0, 2.0]));
        assert_eq!(cfg.bounds.c, 2.5);
        let bad = vec![("BOSEGP_SOLVER__TOLERENCE".to_string(), "1".to_string())];
        assert!(parse_config(BASE, bad).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = parse_config(BASE, none()).unwrap();
        let b = parse_config(&BASE.replace("h = 0.02", "h = 0.025"), none()).unwrap();
        assert_eq!(a.hash(), parse_config(BASE, none()).unwrap().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let rep = RunReport {
            command: Command::Sweep,
            provenance: Provenance {
                config_hash: "0".repeat(64),
                version: VERSION.into(),
                grid: None,
            },
            valid: true,
            failures: vec![],
            payload: Payload::Bounds(vec![]),
        };
        let text = String::from_utf8(to_csv(&rep).unwrap()).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(
            data,
            vec!["n,a,lower,gp,gp_box,upper,upper_gap,lower_gap,estar,valid"]
        );
    }

    #[test]
    fn json_uses_seventeen_digits() {
        let cfg = parse_config(BASE, none()).unwrap();
        let rep = run(Command::Solve, &cfg).unwrap();
        let text = String::from_utf8(to_json(&rep).unwrap()).unwrap();
        assert!(text.contains("\"energy\": 3.0000"));
        let energy_line = text
            .lines()
            .find(|l| l.trim_start().starts_with("\"energy\""))
            .unwrap();
        let digits: String = energy_line
            .split(':')
            .nth(1)
            .unwrap()
            .trim()
            .trim_end_matches(',')
            .split('e')
            .next()
            .unwrap()
            .replace('.', "");
        assert_eq!(digits.len(), 17);
        assert!(
            from_json(text.as_bytes()).unwrap() == rep,
            "round trip changed the report"
        );
    }
}
