//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to one subcommand and returns the
//! process exit status: 0 on success or PASS, 1 on I/O or parse failures,
//! 2 on invalid input or validation findings, 3 on a verification
//! disagreement or bound violation.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::envelope::{
    binary_deviation_curve, envelope_crossings, hyperbolic_envelope, linear_envelope, linear_sensitivity_value_bound,
    min_admissible_deviation, sensitivity_value_bound, Branch, DeviationBound, Envelope,
};
use crate::error::Error;
use crate::network::{load_network, resolve_variables, validate_document, DiscreteNetwork, EvidenceProfile};
use crate::sensfun::{derive_sensitivity, FunctionKind, SensitivityFunction};
use crate::sweep::{
    fixture_scenarios, random_corpus, skip_reason, sweep, verify_corpus, CorpusReport, EnvelopeFault, Scenario,
    SweepOptions, SweepResult, Verdict, DEFAULT_GRID_STEP, DEFAULT_SEED,
};

/// Largest tolerated gap between a closed form and the bisection oracle.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "sensbounds",
    version,
    about = "Sensitivity functions and evidence-invariant bounds for Bayesian networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a network file and list every finding.
    Validate { network: PathBuf },
    /// Derive the sensitivity function of a posterior in one parameter.
    Sensfun(SensfunArgs),
    /// Envelopes and the sensitivity-value bound through (x0, p0).
    Bounds(BoundsArgs),
    /// Minimum admissible deviation of the most likely value.
    Deviation(DeviationArgs),
    /// Analyze parameters under every evidence profile of the observables.
    Sweep(SweepArgs),
    /// Check all bounds against exact sensitivity functions.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Decimal digits in display columns.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct SensfunArgs {
    pub network: PathBuf,
    /// Target as VAR=STATE.
    #[arg(long)]
    pub target: String,
    /// Observations as VAR=STATE, repeated or comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub evidence: Vec<String>,
    /// Parameter as NODE:STATE|PARENT=STATE,...
    #[arg(long)]
    pub param: String,
    /// Emit the curve at this many evenly spaced points of [0, 1].
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, required_unless_present = "surface")]
    pub x0: Option<f64>,
    #[arg(long, required_unless_present = "surface")]
    pub p0: Option<f64>,
    /// Use the envelope for linear sensitivity functions.
    #[arg(long)]
    pub linear: bool,
    /// Emit the envelope at this many evenly spaced points of [0, 1].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Emit the sensitivity-value bound over an (x0, p0) grid instead.
    #[arg(long, conflicts_with_all = ["x0", "p0", "samples"])]
    pub surface: bool,
    /// Interior grid points per axis in surface mode.
    #[arg(long, default_value_t = 99)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DeviationArgs {
    #[arg(long)]
    pub x0: f64,
    /// Probability of the most likely value.
    #[arg(long, required_unless_present = "curve")]
    pub p1: Option<f64>,
    /// Probability of the runner-up.
    #[arg(long, required_unless_present = "curve")]
    pub p2: Option<f64>,
    #[arg(long)]
    pub linear: bool,
    /// Compare the closed form with the bisection oracle.
    #[arg(long)]
    pub verify: bool,
    /// Emit the binary curve over p1 in [0.5, 1) with p2 = 1 - p1.
    #[arg(long, conflicts_with_all = ["p1", "p2"])]
    pub curve: bool,
    /// Points on the curve.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub network: PathBuf,
    #[arg(long)]
    pub target: String,
    /// Observable variables, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub observables: Vec<String>,
    #[arg(long, required_unless_present = "all_params", conflicts_with = "all_params")]
    pub param: Option<String>,
    /// Sweep every parameter that is not on a deterministic or near-boundary row.
    #[arg(long)]
    pub all_params: bool,
    /// Step of the containment grid over [0, 1].
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    pub grid: f64,
    /// Largest number of evidence profiles.
    #[arg(long, default_value_t = crate::network::DEFAULT_PROFILE_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(conflicts_with_all = ["random", "fixtures"], required_unless_present_any = ["random", "fixtures"])]
    pub network: Option<PathBuf>,
    /// Target for a network file; defaults to the first state of the first variable.
    #[arg(long, requires = "network")]
    pub target: Option<String>,
    /// Observables for a network file; default to every leaf except the target.
    #[arg(long, value_delimiter = ',', requires = "network")]
    pub observables: Option<Vec<String>>,
    /// Verify this many seeded random networks.
    #[arg(long, conflicts_with = "fixtures")]
    pub random: Option<usize>,
    #[arg(long, env = "SENSBOUNDS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Verify the networks shipped with the crate.
    #[arg(long)]
    pub fixtures: bool,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    pub grid: f64,
    #[arg(long, default_value_t = crate::network::DEFAULT_PROFILE_CAP)]
    pub cap: u128,
    /// Shift the envelope anchors by this amount (test hook).
    #[arg(long, hide = true)]
    pub inject_fault: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Input(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::Lib(Error::Parse(_) | Error::Internal(_)) => 1,
            CliError::Lib(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) | CliError::Input(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match &cli.command {
        Command::Validate { network } => cmd_validate(network, out),
        Command::Sensfun(a) => cmd_sensfun(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Deviation(a) => cmd_deviation(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_network(path: &Path) -> CliResult<DiscreteNetwork> {
    Ok(load_network(&read_text(path)?)?)
}

fn emit(target: &OutputArgs, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match &target.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write output: {e}"))),
    }
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

/// Rounds to `precision` decimals and drops trailing zeros.
pub fn format_display(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let mut s = format!("{x:.precision$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_raw(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    /// A numeric value that does not exist for this row.
    Missing,
    Text(String),
    Flag(bool),
}

impl Cell {
    fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }

    fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn display(&self, precision: usize) -> String {
        match self {
            Cell::Num(x) => format_display(*x, precision),
            Cell::Missing => "-".into(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Missing => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

/// Rows of cells under named columns, rendered as an aligned table, CSV or JSON.
#[derive(Debug, Clone, Default)]
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn numeric(&self, col: usize) -> bool {
        self.rows.iter().all(|r| matches!(r[col], Cell::Num(_) | Cell::Missing))
            && self.rows.iter().any(|r| matches!(r[col], Cell::Num(_)))
    }

    fn render_table(&self, precision: usize) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.display(precision)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([self.columns[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let numeric: Vec<bool> = (0..self.columns.len()).map(|j| self.numeric(j)).collect();
        let mut s = String::new();
        let line = |s: &mut String, items: &[String]| {
            let parts: Vec<String> = items
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    if numeric[j] {
                        format!("{v:>w$}", w = widths[j])
                    } else {
                        format!("{v:<w$}", w = widths[j])
                    }
                })
                .collect();
            s.push_str(parts.join("  ").trim_end());
            s.push('\n');
        };
        line(&mut s, &self.columns);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        line(&mut s, &rule);
        for r in &cells {
            line(&mut s, r);
        }
        s
    }

    /// `name  value` lines for the first row.
    fn render_vertical(&self, precision: usize) -> String {
        let width = self.columns.iter().map(String::len).max().unwrap_or(0);
        let mut s = String::new();
        if let Some(row) = self.rows.first() {
            for (name, cell) in self.columns.iter().zip(row) {
                let _ = writeln!(s, "{name:<width$}  {}", cell.display(precision));
            }
        }
        s
    }

    /// Numeric columns carry a rounded display column and a full-precision `_raw` twin.
    fn render_csv(&self, precision: usize) -> String {
        let numeric: Vec<bool> = (0..self.columns.len()).map(|j| self.numeric(j)).collect();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            header.push(c.clone());
            if numeric[j] {
                header.push(format!("{c}_raw"));
            }
        }
        w.write_record(&header).expect("in-memory csv");
        for row in &self.rows {
            let mut rec = Vec::new();
            for (j, cell) in row.iter().enumerate() {
                match cell {
                    Cell::Num(x) => {
                        rec.push(format_display(*x, precision));
                        rec.push(format_raw(*x));
                    }
                    Cell::Missing => {
                        rec.push(String::new());
                        if numeric[j] {
                            rec.push(String::new());
                        }
                    }
                    other => {
                        rec.push(other.display(precision));
                        if numeric[j] {
                            rec.push(String::new());
                        }
                    }
                }
            }
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    fn json_rows(&self) -> Value {
        Value::Array(self.rows.iter().map(|r| self.json_object(r)).collect())
    }

    fn json_first(&self) -> Value {
        self.rows.first().map_or(Value::Null, |r| self.json_object(r))
    }

    fn json_object(&self, row: &[Cell]) -> Value {
        let mut m = Map::new();
        for (c, cell) in self.columns.iter().zip(row) {
            m.insert(c.clone(), cell.json());
        }
        Value::Object(m)
    }
}

/// `n` evenly spaced points of `[0, 1]`, both ends included.
fn unit_samples(n: usize) -> CliResult<Vec<f64>> {
    if n < 2 {
        return Err(CliError::Input(format!("--samples must be at least 2, got {n}")));
    }
    Ok((0..n).map(|j| j as f64 / (n - 1) as f64).collect())
}

fn kind_of(linear: bool) -> FunctionKind {
    if linear {
        FunctionKind::Linear
    } else {
        FunctionKind::Hyperbolic
    }
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let text = read_text(path)?;
    let findings = validate_document(&text)?;
    let mut s = String::new();
    if findings.is_empty() {
        s.push_str("OK\n");
    } else {
        for f in &findings {
            let _ = writeln!(s, "finding: {f}");
        }
        let _ = writeln!(s, "{} finding(s)", findings.len());
    }
    out.write_all(s.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))?;
    Ok(if findings.is_empty() { 0 } else { 2 })
}

fn function_report(a: &SensfunArgs, f: &SensitivityFunction) -> Table {
    let mut t = Table::new(&[
        "target",
        "evidence",
        "parameter",
        "x0",
        "p0",
        "kind",
        "c1",
        "c2",
        "c3",
        "c4",
        "sensitivity_value",
        "r",
        "s",
        "t",
        "quadrant",
    ]);
    let c = f.coefficients;
    let hyp = f.to_hyperbola().ok();
    t.push(vec![
        Cell::text(&a.target),
        Cell::text(a.evidence.join(",")),
        Cell::text(&a.param),
        Cell::Num(f.x0),
        Cell::Num(f.p0),
        Cell::text(f.kind.to_string()),
        Cell::Num(c.c1),
        Cell::Num(c.c2),
        Cell::Num(c.c3),
        Cell::Num(c.c4),
        Cell::Num(f.sensitivity_value()),
        Cell::opt(hyp.map(|h| h.r)),
        Cell::opt(hyp.map(|h| h.s)),
        Cell::opt(hyp.map(|h| h.t)),
        hyp.map_or(Cell::text("-"), |h| Cell::text(format!("{:?}", h.quadrant))),
    ]);
    t
}

fn cmd_sensfun(a: &SensfunArgs, out: &mut dyn Write) -> CliResult<i32> {
    let net = read_network(&a.network)?;
    let target = net.parse_target(&a.target)?;
    let evidence = EvidenceProfile::parse(&net, &a.evidence)?;
    let pref = net.parse_parameter(&a.param)?;
    let f = derive_sensitivity(&net, target, &evidence, &pref)?;
    let report = function_report(a, &f);
    let curve = match a.samples {
        Some(n) => {
            let mut t = Table::new(&["x", "f"]);
            for x in unit_samples(n)? {
                t.push(vec![Cell::Num(x), Cell::opt(f.evaluate(x).ok())]);
            }
            Some(t)
        }
        None => None,
    };
    let p = a.output.precision;
    let text = match a.output.format {
        Format::Table => {
            let mut s = report.render_vertical(p);
            if let Some(c) = &curve {
                s.push('\n');
                s.push_str(&c.render_table(p));
            }
            s
        }
        Format::Csv => curve.as_ref().unwrap_or(&report).render_csv(p),
        Format::Json => {
            let mut v = report.json_first();
            if let Some(c) = &curve {
                v["curve"] = c.json_rows();
            }
            json_text(&v)
        }
    };
    emit(&a.output, &text, out)?;
    Ok(0)
}

fn branch_cells(b: &Branch) -> [Cell; 4] {
    match b {
        Branch::Hyperbola(h) => [Cell::text("hyperbola"), Cell::Num(h.r), Cell::Num(h.s), Cell::Num(h.t)],
        Branch::Line(l) => [
            Cell::text(format!("line y = {}x + {}", l.slope, l.intercept)),
            Cell::Missing,
            Cell::Missing,
            Cell::Missing,
        ],
    }
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> CliResult<i32> {
    let p = a.output.precision;
    if a.surface {
        if a.points == 0 {
            return Err(CliError::Input("--points must be positive".into()));
        }
        let mut t = Table::new(&["x0", "p0", "bound"]);
        let axis: Vec<f64> = (1..=a.points).map(|j| j as f64 / (a.points + 1) as f64).collect();
        for &x0 in &axis {
            for &p0 in &axis {
                let bound = if a.linear {
                    linear_sensitivity_value_bound(x0, p0)?
                } else {
                    sensitivity_value_bound(x0, p0)?
                };
                t.push(vec![Cell::Num(x0), Cell::Num(p0), Cell::Num(bound)]);
            }
        }
        let text = match a.output.format {
            Format::Table => t.render_table(p),
            Format::Csv => t.render_csv(p),
            Format::Json => json_text(&t.json_rows()),
        };
        emit(&a.output, &text, out)?;
        return Ok(0);
    }

    let (x0, p0) = (a.x0.expect("required by clap"), a.p0.expect("required by clap"));
    let (report, env): (Table, Box<dyn Envelope>) = if a.linear {
        let env = linear_envelope(x0, p0)?;
        let mut t = Table::new(&[
            "x0",
            "p0",
            "kind",
            "sensitivity_value_bound",
            "increasing_slope",
            "increasing_intercept",
            "decreasing_slope",
            "decreasing_intercept",
        ]);
        t.push(vec![
            Cell::Num(x0),
            Cell::Num(p0),
            Cell::text("linear"),
            Cell::Num(linear_sensitivity_value_bound(x0, p0)?),
            Cell::Num(env.increasing.slope),
            Cell::Num(env.increasing.intercept),
            Cell::Num(env.decreasing.slope),
            Cell::Num(env.decreasing.intercept),
        ]);
        (t, Box::new(env))
    } else {
        let env = hyperbolic_envelope(x0, p0)?;
        let mut t = Table::new(&[
            "x0",
            "p0",
            "kind",
            "sensitivity_value_bound",
            "increasing",
            "increasing_r",
            "increasing_s",
            "increasing_t",
            "decreasing",
            "decreasing_r",
            "decreasing_s",
            "decreasing_t",
        ]);
        let mut row = vec![
            Cell::Num(x0),
            Cell::Num(p0),
            Cell::text("hyperbolic"),
            Cell::Num(sensitivity_value_bound(x0, p0)?),
        ];
        row.extend(branch_cells(&env.increasing));
        row.extend(branch_cells(&env.decreasing));
        t.push(row);
        (t, Box::new(env))
    };
    let curve = match a.samples {
        Some(n) => {
            let mut t = Table::new(&["x", "increasing", "decreasing", "lower", "upper"]);
            for x in unit_samples(n)? {
                let (lo, hi) = env.bounds_at(x);
                t.push(vec![
                    Cell::Num(x),
                    Cell::Num(env.increasing_at(x)),
                    Cell::Num(env.decreasing_at(x)),
                    Cell::Num(lo),
                    Cell::Num(hi),
                ]);
            }
            Some(t)
        }
        None => None,
    };
    let text = match a.output.format {
        Format::Table => {
            let mut s = report.render_vertical(p);
            if let Some(c) = &curve {
                s.push('\n');
                s.push_str(&c.render_table(p));
            }
            s
        }
        Format::Csv => curve.as_ref().unwrap_or(&report).render_csv(p),
        Format::Json => {
            let mut v = report.json_first();
            if let Some(c) = &curve {
                v["curve"] = c.json_rows();
            }
            json_text(&v)
        }
    };
    emit(&a.output, &text, out)?;
    Ok(0)
}

fn deviation_cells(d: &DeviationBound) -> Vec<Cell> {
    vec![
        Cell::Num(d.alpha),
        Cell::Num(d.beta),
        Cell::Num(d.x_alpha),
        Cell::Num(d.x_beta),
        Cell::Flag(d.clamped_alpha),
        Cell::Flag(d.clamped_beta),
    ]
}

fn cmd_deviation(a: &DeviationArgs, out: &mut dyn Write) -> CliResult<i32> {
    let p = a.output.precision;
    let kind = kind_of(a.linear);
    if a.curve {
        if a.points == 0 {
            return Err(CliError::Input("--points must be positive".into()));
        }
        let mut t = Table::new(&[
            "p1",
            "p2",
            "alpha",
            "beta",
            "x_alpha",
            "x_beta",
            "clamped_alpha",
            "clamped_beta",
        ]);
        for (p1, d) in binary_deviation_curve(a.x0, kind, a.points)? {
            let mut row = vec![Cell::Num(p1), Cell::Num(1.0 - p1)];
            row.extend(deviation_cells(&d));
            t.push(row);
        }
        let text = match a.output.format {
            Format::Table => t.render_table(p),
            Format::Csv => t.render_csv(p),
            Format::Json => json_text(&t.json_rows()),
        };
        emit(&a.output, &text, out)?;
        return Ok(0);
    }

    let (p1, p2) = (a.p1.expect("required by clap"), a.p2.expect("required by clap"));
    let d = min_admissible_deviation(a.x0, p1, p2, kind)?;
    let mut columns = vec![
        "x0",
        "p1",
        "p2",
        "kind",
        "alpha",
        "beta",
        "x_alpha",
        "x_beta",
        "clamped_alpha",
        "clamped_beta",
    ];
    let mut row = vec![
        Cell::Num(a.x0),
        Cell::Num(p1),
        Cell::Num(p2),
        Cell::text(kind.to_string()),
    ];
    row.extend(deviation_cells(&d));
    let mut agree = true;
    if a.verify {
        let (oa, ob) = envelope_crossings(a.x0, p1, p2, kind)?;
        let gap = (oa - d.x_alpha).abs().max((ob - d.x_beta).abs());
        agree = gap <= VERIFY_TOL;
        columns.extend(["oracle_x_alpha", "oracle_x_beta", "max_gap", "agreement"]);
        row.extend([Cell::Num(oa), Cell::Num(ob), Cell::Num(gap), Cell::Flag(agree)]);
    }
    let mut t = Table::new(&columns);
    t.push(row);
    let text = match a.output.format {
        Format::Table => {
            let mut s = t.render_vertical(p);
            let _ = writeln!(
                s,
                "interval     [{}, {}]",
                format_display(d.x_alpha, p),
                format_display(d.x_beta, p)
            );
            s
        }
        Format::Csv => t.render_csv(p),
        Format::Json => json_text(&t.json_first()),
    };
    emit(&a.output, &text, out)?;
    Ok(if agree { 0 } else { 3 })
}

fn sweep_table(results: &[SweepResult]) -> Table {
    let mut t = Table::new(&[
        "parameter",
        "profile_index",
        "profile",
        "status",
        "evidence_probability",
        "p0",
        "kind",
        "sensitivity_value",
        "alpha",
        "beta",
        "bound_alpha",
        "bound_beta",
        "max_envelope_violation",
        "contained",
        "sound",
    ]);
    for r in results {
        for rec in &r.records {
            t.push(vec![
                Cell::text(&r.parameter),
                Cell::Num(rec.index as f64),
                Cell::text(&rec.profile),
                Cell::text(if rec.is_analyzed() { "analyzed" } else { "undefined" }),
                Cell::Num(rec.evidence_probability),
                Cell::opt(rec.p0),
                Cell::text(rec.kind.map_or("-".to_string(), |k| k.to_string())),
                Cell::opt(rec.sensitivity_value),
                Cell::opt(rec.exact_deviation.map(|d| d.alpha)),
                Cell::opt(rec.exact_deviation.map(|d| d.beta)),
                Cell::opt(rec.bound_deviation.map(|d| d.alpha)),
                Cell::opt(rec.bound_deviation.map(|d| d.beta)),
                Cell::Num(rec.max_envelope_violation),
                Cell::Flag(rec.containment_ok),
                rec.deviation_sound.map_or(Cell::text("-"), Cell::Flag),
            ]);
        }
    }
    t
}

fn verdict_of(results: &[SweepResult]) -> Verdict {
    if results.iter().all(SweepResult::passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult<i32> {
    let net = read_network(&a.network)?;
    let target = net.parse_target(&a.target)?;
    let observables = resolve_variables(&net, &a.observables)?;
    let options = SweepOptions {
        grid_step: a.grid,
        profile_cap: a.cap,
        fault: None,
    };
    let mut skipped = Vec::new();
    let prefs = match &a.param {
        Some(text) => vec![net.parse_parameter(text)?],
        None => net
            .parameters()
            .into_iter()
            .filter(|pref| match skip_reason(&net, pref) {
                Some(reason) => {
                    skipped.push((net.describe_parameter(pref), reason));
                    false
                }
                None => true,
            })
            .collect(),
    };
    let results = prefs
        .iter()
        .map(|pref| sweep(&net, target, &observables, pref, &options))
        .collect::<crate::Result<Vec<_>>>()?;
    let verdict = verdict_of(&results);
    let p = a.output.precision;
    let text = match a.output.format {
        Format::Csv => sweep_table(&results).render_csv(p),
        Format::Json => {
            let skipped: Vec<Value> = skipped
                .iter()
                .map(|(param, reason)| json!({"parameter": param, "reason": reason}))
                .collect();
            json_text(&json!({
                "target": a.target,
                "observables": a.observables,
                "parameters": results,
                "skipped": skipped,
                "verdict": verdict,
            }))
        }
        Format::Table => {
            let mut s = String::new();
            for r in &results {
                let _ = writeln!(s, "parameter {}  (x0 = {})", r.parameter, format_display(r.x0, p));
                s.push_str(&sweep_table(std::slice::from_ref(r)).render_table(p));
                s.push_str(&aggregate_text(r, p));
                s.push('\n');
            }
            for (param, reason) in &skipped {
                let _ = writeln!(s, "skipped {param}: {reason}");
            }
            let _ = writeln!(s, "verdict: {verdict}");
            s
        }
    };
    emit(&a.output, &text, out)?;
    Ok(if verdict == Verdict::Pass { 0 } else { 3 })
}

fn aggregate_text(r: &SweepResult, p: usize) -> String {
    let a = &r.aggregate;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "profiles: {} ({} undefined); linear: {}, hyperbolic: {}; structural linear: {}",
        a.profile_count,
        a.undefined_count,
        a.linearity.numeric_linear,
        a.linearity.numeric_hyperbolic,
        a.linearity.structural
    );
    if let Some(w) = &a.worst_sensitivity {
        let _ = writeln!(
            s,
            "largest sensitivity value: {} at {}",
            format_display(w.value, p),
            w.profile
        );
    }
    if let (Some(al), Some(be)) = (&a.min_alpha, &a.min_beta) {
        let _ = writeln!(
            s,
            "smallest deviation: alpha {} at {}, beta {} at {}",
            format_display(al.value, p),
            al.profile,
            format_display(be.value, p),
            be.profile
        );
    }
    let _ = writeln!(
        s,
        "violations: containment {}, deviation {}, equivalence {}, linearity {}",
        a.containment_violations.len(),
        a.deviation_violations.len(),
        a.equivalence_failures.len(),
        a.linearity.mismatches
    );
    s
}

/// Default analysis for a network file: first state of the first variable,
/// observing every leaf other than the target.
fn default_scenario(net: &DiscreteNetwork) -> (usize, Vec<usize>) {
    let target = 0;
    let observables = (0..net.len())
        .filter(|&v| v != target && net.children(v).is_empty())
        .collect();
    (target, observables)
}

fn corpus_summary(report: &CorpusReport) -> (Table, Table) {
    let mut summary = Table::new(&[
        "network",
        "target",
        "observables",
        "parameters",
        "skipped",
        "profiles",
        "containment_violations",
        "deviation_violations",
        "equivalence_failures",
        "linearity_mismatches",
        "max_envelope_violation",
        "verdict",
    ]);
    let mut violations = Table::new(&["network", "parameter", "profile_index", "profile", "check", "detail"]);
    for n in &report.networks {
        let sum = |f: fn(&SweepResult) -> usize| n.parameters.iter().map(f).sum::<usize>();
        let worst = n
            .parameters
            .iter()
            .flat_map(|r| r.records.iter().map(|rec| rec.max_envelope_violation))
            .fold(0.0f64, f64::max);
        summary.push(vec![
            Cell::text(&n.name),
            Cell::text(&n.target),
            Cell::text(n.observables.join(",")),
            Cell::Num(n.parameters.len() as f64),
            Cell::Num(n.skipped.len() as f64),
            Cell::Num(sum(|r| r.records.len()) as f64),
            Cell::Num(sum(|r| r.aggregate.containment_violations.len()) as f64),
            Cell::Num(sum(|r| r.aggregate.deviation_violations.len()) as f64),
            Cell::Num(sum(|r| r.aggregate.equivalence_failures.len()) as f64),
            Cell::Num(sum(|r| r.aggregate.linearity.mismatches) as f64),
            Cell::Num(worst),
            Cell::text(n.verdict.to_string()),
        ]);
        for r in &n.parameters {
            for rec in &r.records {
                let mut add = |check: &str, detail: String| {
                    violations.push(vec![
                        Cell::text(&n.name),
                        Cell::text(&r.parameter),
                        Cell::Num(rec.index as f64),
                        Cell::text(&rec.profile),
                        Cell::text(check),
                        Cell::text(detail),
                    ])
                };
                if !rec.containment_ok {
                    add("containment", format!("excursion {:e}", rec.max_envelope_violation));
                }
                if rec.deviation_sound == Some(false) {
                    add("deviation", "bound interval leaves the exact interval".into());
                }
                if rec.max_equivalence_error > crate::sweep::EQUIVALENCE_TOL {
                    add("equivalence", format!("gap {:e}", rec.max_equivalence_error));
                }
                if r.aggregate.linearity.structural && rec.kind == Some(FunctionKind::Hyperbolic) {
                    add("linearity", "structurally linear but numerically hyperbolic".into());
                }
            }
        }
    }
    (summary, violations)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let started = Instant::now();
    let scenarios: Vec<Scenario> = if let Some(path) = &a.network {
        let network = read_network(path)?;
        let (default_target, default_obs) = default_scenario(&network);
        let target = match &a.target {
            Some(t) => network.parse_target(t)?,
            None => (default_target, 0),
        };
        let observables = match &a.observables {
            Some(names) => resolve_variables(&network, names)?,
            None => default_obs.into_iter().filter(|&v| v != target.0).collect(),
        };
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        vec![Scenario {
            name,
            network,
            target,
            observables,
        }]
    } else if let Some(count) = a.random {
        random_corpus(count, a.seed)
    } else {
        fixture_scenarios()
    };
    let fault = match a.inject_fault {
        Some(shift) if !(shift > 0.0 && shift < 1.0) => {
            return Err(CliError::Input(format!("fault shift {shift} must lie in (0, 1)")));
        }
        Some(shift) => Some(EnvelopeFault { anchor_shift: shift }),
        None => None,
    };
    let options = SweepOptions {
        grid_step: a.grid,
        profile_cap: a.cap,
        fault,
    };
    let report = verify_corpus(&scenarios, &options)?;
    let elapsed = started.elapsed().as_secs_f64();
    let (summary, violations) = corpus_summary(&report);
    let p = a.output.precision;
    let text = match a.output.format {
        Format::Table => {
            let mut s = summary.render_table(p);
            if !violations.rows.is_empty() {
                s.push_str("\nviolations\n");
                s.push_str(&violations.render_table(p));
            }
            let _ = writeln!(s, "\nverdict: {}", report.verdict);
            let _ = writeln!(s, "runtime: {elapsed:.3} s");
            s
        }
        Format::Csv => summary.render_csv(p),
        Format::Json => {
            let mut v = json!({
                "seed": a.random.map(|_| a.seed),
                "grid_step": a.grid,
                "networks": summary.json_rows(),
                "violations": violations.json_rows(),
                "verdict": report.verdict,
            });
            if a.random.is_none() {
                v.as_object_mut().expect("object").remove("seed");
            }
            json_text(&v)
        }
    };
    emit(&a.output, &text, out)?;
    if a.output.format != Format::Table {
        let _ = writeln!(err, "verdict: {}; runtime: {elapsed:.3} s", report.verdict);
    }
    Ok(if report.verdict == Verdict::Pass { 0 } else { 3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("sensbounds").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn display_formatting() {
        assert_eq!(format_display(0.29999999999999993, 6), "0.3");
        assert_eq!(format_display(1.7777777777777777, 6), "1.777778");
        assert_eq!(format_display(1.0, 6), "1");
        assert_eq!(format_display(-1e-12, 6), "0");
        assert_eq!(format_display(0.5, 0), "0");
        assert_eq!(format_raw(0.1), "0.1");
        assert_eq!(format_raw(1.0), "1.0");
    }

    #[test]
    fn csv_has_raw_twins_and_lf() {
        let mut t = Table::new(&["name", "x"]);
        t.push(vec![Cell::text("a"), Cell::Num(1.0 / 3.0)]);
        t.push(vec![Cell::text("b,c"), Cell::Missing]);
        let csv = t.render_csv(4);
        assert_eq!(csv, "name,x,x_raw\na,0.3333,0.3333333333333333\n\"b,c\",,\n");
    }

    #[test]
    fn bounds_report() {
        let (code, out, _) = run_args(&["bounds", "--x0", "0.5", "--p0", "0.5"]);
        assert_eq!(code, 0);
        assert!(out
            .lines()
            .any(|l| l.starts_with("sensitivity_value_bound") && l.ends_with(" 1")));
        let (_, out, _) = run_args(&["bounds", "--x0", "0.1", "--p0", "0.8"]);
        assert!(out.contains("1.777778"));
    }

    #[test]
    fn deviation_exit_codes() {
        let (code, out, _) = run_args(&["deviation", "--x0", "0.8", "--p1", "0.8", "--p2", "0.2", "--linear"]);
        assert_eq!(code, 0);
        assert!(out.contains("[0.5, 1]"));
        let (code, _, err) = run_args(&["deviation", "--x0", "0.8", "--p1", "0.2", "--p2", "0.8"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
        let (code, _, _) = run_args(&["deviation", "--x0", "0.4"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, err) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sensfun"));
        assert!(err.is_empty());
    }
}
