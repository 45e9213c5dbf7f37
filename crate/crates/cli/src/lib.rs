//! Command-line front end for `famrisk`.
//!
//! Exit codes: 0 success, 1 invalid usage or input, 2 infeasible or no
//! solution, 3 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use famrisk::dataset::{analyze_all, bundled_records, load_records, DiseaseRecord};
use famrisk::report::{
    format_sig, render_lorenz_figure, render_report, render_samples_csv, Cell, ReportFormat, Table,
    DEFAULT_PRECISION,
};
use famrisk::simulation::{simulate, RiskSource, SimulationConfig};
use famrisk::{
    fit_from_risk_and_frr, frr_curve, irr_given_frr, solve_risk_structure, Affected, BetaRiskModel,
    DichotomousRiskModel, Error, Sweep,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable holding the default random seed.
pub const SEED_ENV: &str = "FAMRISK_SEED";
const DEFAULT_SEED: u64 = 20_170_101;

/// Families simulated per continuous record for the skyscraper data.
const SKYSCRAPER_FAMILIES: usize = 400;
const COMPARISON_RISK: f64 = 0.01;
const COMPARISON_FRRS: [f64; 3] = [1.5, 2.3, 6.0];

#[derive(Debug, Parser)]
#[command(
    name = "famrisk",
    version,
    about = "Risk distributions implied by familial relative risks"
)]
pub struct Cli {
    /// Output format: table, csv or json.
    #[arg(long, global = true, default_value = "table", value_parser = parse_format)]
    pub format: ReportFormat,

    /// Significant digits for numeric output.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION, value_parser = parse_precision)]
    pub precision: usize,

    /// Write the main output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve FRR1 and FRR2 for the two-group IRR and high-risk proportion q.
    Solve(SolveArgs),
    /// Fit a beta risk distribution to a lifetime risk and FRR.
    Fit(FitArgs),
    /// Emit curve data for re-plotting.
    Curves(CurvesArgs),
    /// Simulate families and estimate FRRs and the Gini index empirically.
    Simulate(SimulateArgs),
    /// Analyze a disease dataset and optionally write figures.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// FRR given one affected relative.
    #[arg(long, allow_negative_numbers = true)]
    pub frr1: f64,
    /// FRR given two affected relatives.
    #[arg(long, allow_negative_numbers = true)]
    pub frr2: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Lifetime risk (mean risk), in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub risk: f64,
    /// Familial relative risk, at least 1.
    #[arg(long, allow_negative_numbers = true)]
    pub frr: f64,
    /// Top percentages of the population to report burden shares for.
    #[arg(long, num_args = 1.., default_values_t = [10.0])]
    pub top: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Dichotomous,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// FRR against IRR at fixed q.
    Irr,
    /// FRR against q at fixed IRR.
    Q,
    /// Dichotomous: IRR needed for each FRR at fixed q. Beta: Gini and top
    /// share against FRR at fixed risk.
    Frr,
    /// Lorenz curve of a beta model.
    Lorenz,
    /// Density of a beta model.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AffectedArg {
    One,
    Two,
    Both,
}

impl AffectedArg {
    fn list(self) -> &'static [Affected] {
        match self {
            AffectedArg::One => &[Affected::One],
            AffectedArg::Two => &[Affected::Two],
            AffectedArg::Both => &Affected::ALL,
        }
    }
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, value_enum, default_value = "dichotomous")]
    pub model: ModelKind,
    #[arg(long, value_enum)]
    pub sweep: SweepKind,
    /// High-risk proportion (dichotomous irr and frr sweeps).
    #[arg(long)]
    pub q: Option<f64>,
    /// Individual relative risk (dichotomous q sweep).
    #[arg(long)]
    pub irr: Option<f64>,
    /// Lifetime risk (beta sweeps).
    #[arg(long)]
    pub risk: Option<f64>,
    /// FRR (beta lorenz and density sweeps).
    #[arg(long)]
    pub frr: Option<f64>,
    /// First grid value.
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Last grid value.
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Space the grid logarithmically.
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_enum, default_value = "both")]
    pub affected: AffectedArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "beta")]
    pub model: ModelKind,
    /// High-risk proportion (dichotomous).
    #[arg(long, required_if_eq("model", "dichotomous"))]
    pub q: Option<f64>,
    /// Individual relative risk (dichotomous).
    #[arg(long, required_if_eq("model", "dichotomous"))]
    pub irr: Option<f64>,
    /// Absolute risk in the low-risk group (dichotomous).
    #[arg(long, default_value_t = 0.01)]
    pub low_risk: f64,
    /// Lifetime risk (beta).
    #[arg(long, required_if_eq("model", "beta"))]
    pub risk: Option<f64>,
    /// FRR (beta).
    #[arg(long, required_if_eq("model", "beta"))]
    pub frr: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub family_size: usize,
    /// Number of families; accepts forms such as 1e6.
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub families: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DataSource {
    /// Dataset CSV file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Use the dataset shipped with the library.
    #[arg(long)]
    pub bundled: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub source: DataSource,
    /// Directory for SVG figures and skyscraper sample data.
    #[arg(long)]
    pub figures: Option<PathBuf>,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_precision(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(p) if (1..=17).contains(&p) => Ok(p),
        _ => Err(format!("expected an integer from 1 to 17, got {s}")),
    }
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("not a non-negative integer: {s}")),
    }
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_infeasible() => EXIT_INFEASIBLE,
            CliError::Core(Error::Io(_)) => EXIT_IO,
            CliError::Core(_) => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };

    let mut warnings = Vec::new();
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a, &cli, &mut warnings),
        Command::Fit(a) => cmd_fit(a, &cli),
        Command::Curves(a) => cmd_curves(a, &cli),
        Command::Simulate(a) => cmd_simulate(a, &cli, &mut warnings),
        Command::Report(a) => cmd_report(a, &cli, &mut warnings),
    };
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let (text, code) = match outcome {
        Ok(text) => (text, EXIT_OK),
        Err(ReportFailure::Partial(text, code, message)) => {
            let _ = writeln!(stderr, "error: {message}");
            (text, code)
        }
        Err(ReportFailure::Failed(e)) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            return e.exit_code();
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(stderr, "error: {}: {e}", path.display());
                return EXIT_IO;
            }
        }
        None => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_IO;
            }
        }
    }
    code
}

/// Subcommand failure: either nothing to print, or output that should still
/// be written before exiting non-zero.
enum ReportFailure {
    Failed(CliError),
    Partial(String, i32, String),
}

impl<E: Into<CliError>> From<E> for ReportFailure {
    fn from(e: E) -> Self {
        ReportFailure::Failed(e.into())
    }
}

fn cmd_solve(
    a: &SolveArgs,
    cli: &Cli,
    warnings: &mut Vec<String>,
) -> Result<String, ReportFailure> {
    let s = solve_risk_structure(a.frr1, a.frr2)?;
    if s.is_degenerate() {
        warnings.push(
            "degenerate: FRR1 = FRR2 = 1 means no risk variation; IRR = 1 and q is undetermined"
                .into(),
        );
    }
    let mut t = Table::new("", &["frr1", "frr2", "irr", "q", "residual", "iterations"]);
    t.push(vec![
        a.frr1.into(),
        a.frr2.into(),
        s.irr.into(),
        s.q.into(),
        s.residual_norm.into(),
        (s.iterations as f64).into(),
    ]);
    Ok(t.render(cli.format, cli.precision))
}

fn check_percent(p: f64) -> Result<f64, CliError> {
    if p > 0.0 && p < 100.0 {
        Ok(p / 100.0)
    } else {
        Err(CliError::Usage(format!(
            "--top {p}: percentage must lie strictly between 0 and 100"
        )))
    }
}

fn cmd_fit(a: &FitArgs, cli: &Cli) -> Result<String, ReportFailure> {
    let fractions = a
        .top
        .iter()
        .map(|&p| check_percent(p))
        .collect::<Result<Vec<_>, _>>()?;
    let model = fit_from_risk_and_frr(a.risk, a.frr)?;
    let params = model.params();
    let gini = model.gini();
    let mut t = Table::new(
        "",
        &[
            "risk",
            "frr",
            "alpha",
            "beta",
            "gini",
            "top_percent",
            "top_share",
            "mean_risk_ratio",
            "median_risk_ratio",
        ],
    );
    for (&pct, &f) in a.top.iter().zip(&fractions) {
        t.push(vec![
            a.risk.into(),
            a.frr.into(),
            params.map(|p| p.alpha()).into(),
            params.map(|p| p.beta()).into(),
            gini.into(),
            pct.into(),
            model.top_share(f)?.into(),
            model.mean_risk_ratio(f)?.into(),
            model.median_risk_ratio(f)?.into(),
        ]);
    }
    Ok(t.render(cli.format, cli.precision))
}

fn grid(from: f64, to: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| Err(CliError::Usage(format!("invalid sweep range: {m}")));
    if points == 0 {
        return bad("--points must be at least 1");
    }
    if !(from.is_finite() && to.is_finite()) {
        return bad("bounds must be finite");
    }
    if points > 1 && from >= to {
        return bad("--from must be below --to");
    }
    if log && from <= 0.0 {
        return bad("--log needs a positive --from");
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / n;
            if i == points - 1 {
                to
            } else if log {
                (from.ln() + t * (to.ln() - from.ln())).exp()
            } else {
                from + t * (to - from)
            }
        })
        .collect())
}

fn need(v: Option<f64>, flag: &str, sweep: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--sweep {sweep} needs {flag}")))
}

fn usage_on_domain(e: Error) -> CliError {
    match e {
        Error::Domain { .. } => CliError::Usage(format!("invalid sweep range: {e}")),
        other => CliError::Core(other),
    }
}

fn affected_label(a: Affected) -> &'static str {
    match a {
        Affected::One => "frr1",
        Affected::Two => "frr2",
    }
}

fn cmd_curves(a: &CurvesArgs, cli: &Cli) -> Result<String, ReportFailure> {
    let points = a.points;
    let affected = a.affected.list();
    let table = match (a.model, a.sweep) {
        (ModelKind::Dichotomous, SweepKind::Irr) => {
            let q = need(a.q, "--q", "irr")?;
            let xs = grid(
                a.from.unwrap_or(1.0),
                a.to.unwrap_or(100.0),
                points.unwrap_or(100),
                a.log,
            )?;
            series_table("irr", &xs, affected, |aff| {
                frr_curve(Sweep::Irr { q }, &xs, aff)
            })?
        }
        (ModelKind::Dichotomous, SweepKind::Q) => {
            let irr = need(a.irr, "--irr", "q")?;
            let xs = grid(
                a.from.unwrap_or(0.001),
                a.to.unwrap_or(0.5),
                points.unwrap_or(100),
                a.log,
            )?;
            series_table("q", &xs, affected, |aff| {
                frr_curve(Sweep::Q { irr }, &xs, aff)
            })?
        }
        (ModelKind::Dichotomous, SweepKind::Frr) => {
            let q = need(a.q, "--q", "frr")?;
            let xs = grid(
                a.from.unwrap_or(1.0),
                a.to.unwrap_or(5.0),
                points.unwrap_or(100),
                a.log,
            )?;
            let mut cols = vec!["frr"];
            cols.extend(affected.iter().map(|&x| match x {
                Affected::One => "irr_one_affected",
                Affected::Two => "irr_two_affected",
            }));
            let mut t = Table::new("", &cols);
            for &x in &xs {
                let mut row: Vec<Cell> = vec![x.into()];
                for &aff in affected {
                    row.push(match irr_given_frr(q, x, aff) {
                        Ok(v) => v.into(),
                        Err(e) if e.is_infeasible() => Cell::Empty,
                        Err(e) => return Err(usage_on_domain(e).into()),
                    });
                }
                t.push(row);
            }
            t
        }
        (ModelKind::Beta, SweepKind::Frr) => {
            let risk = need(a.risk, "--risk", "frr")?;
            let xs = grid(
                a.from.unwrap_or(1.0),
                a.to.unwrap_or(10.0),
                points.unwrap_or(50),
                a.log,
            )?;
            let mut t = Table::new("", &["frr", "alpha", "beta", "gini", "top10_share"]);
            for &frr in &xs {
                let m = fit_from_risk_and_frr(risk, frr).map_err(usage_on_domain)?;
                let p = m.params();
                t.push(vec![
                    frr.into(),
                    p.map(|p| p.alpha()).into(),
                    p.map(|p| p.beta()).into(),
                    m.gini().into(),
                    m.top_share(0.1)?.into(),
                ]);
            }
            t
        }
        (ModelKind::Beta, SweepKind::Lorenz) => {
            let m = beta_from(a, "lorenz")?;
            let xs = grid(
                a.from.unwrap_or(0.0),
                a.to.unwrap_or(1.0),
                points.unwrap_or(1001),
                false,
            )?;
            let mut t = Table::new("", &["population_share", "burden_share"]);
            for &u in &xs {
                t.push(vec![
                    u.into(),
                    m.lorenz_at(u).map_err(usage_on_domain)?.into(),
                ]);
            }
            t
        }
        (ModelKind::Beta, SweepKind::Density) => {
            let m = beta_from(a, "density")?;
            let Some(p) = m.params() else {
                return Err(CliError::Usage(
                    "a model with FRR = 1 is a point mass and has no density".into(),
                )
                .into());
            };
            let upper = m.quantile(0.999)?;
            let xs = grid(
                a.from.unwrap_or(upper / 1000.0),
                a.to.unwrap_or(upper),
                points.unwrap_or(200),
                a.log,
            )?;
            let mut t = Table::new("", &["risk", "density"]);
            for &x in &xs {
                let d = famrisk::special::beta_pdf(x, &p).map_err(usage_on_domain)?;
                t.push(vec![x.into(), d.into()]);
            }
            t
        }
        (model, sweep) => {
            return Err(CliError::Usage(format!(
                "--sweep {} is not available for --model {}",
                sweep.to_possible_value().expect("named").get_name(),
                model.to_possible_value().expect("named").get_name()
            ))
            .into())
        }
    };
    Ok(table.render(cli.format, cli.precision))
}

fn beta_from(a: &CurvesArgs, sweep: &str) -> Result<BetaRiskModel, CliError> {
    let risk = need(a.risk, "--risk", sweep)?;
    let frr = need(a.frr, "--frr", sweep)?;
    Ok(fit_from_risk_and_frr(risk, frr)?)
}

fn series_table(
    xname: &str,
    xs: &[f64],
    affected: &[Affected],
    curve: impl Fn(Affected) -> famrisk::Result<Vec<(f64, f64)>>,
) -> Result<Table, CliError> {
    let mut cols = vec![xname];
    cols.extend(affected.iter().map(|&a| affected_label(a)));
    let series = affected
        .iter()
        .map(|&aff| curve(aff).map_err(usage_on_domain))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new("", &cols);
    for (i, &x) in xs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(series.iter().map(|s| Cell::Num(s[i].1)));
        t.push(row);
    }
    Ok(t)
}

fn cmd_simulate(
    a: &SimulateArgs,
    cli: &Cli,
    warnings: &mut Vec<String>,
) -> Result<String, ReportFailure> {
    let (source, expected) = match a.model {
        ModelKind::Dichotomous => {
            let q = a.q.expect("required by clap");
            let irr = a.irr.expect("required by clap");
            let m = DichotomousRiskModel::new(q, irr, Some(a.low_risk))?;
            let mean = m.population_risk().expect("low risk set");
            (
                RiskSource::Dichotomous(m),
                [
                    Some(m.frr_one_affected()),
                    Some(m.frr_two_affected()),
                    Some(mean),
                    Some(dichotomous_gini(&m)),
                ],
            )
        }
        ModelKind::Beta => {
            let m = fit_from_risk_and_frr(
                a.risk.expect("required by clap"),
                a.frr.expect("required by clap"),
            )?;
            (
                RiskSource::Beta(m),
                [
                    Some(m.frr_of()),
                    Some(m.frr_two_of()),
                    Some(m.mean_risk()),
                    Some(m.gini()),
                ],
            )
        }
    };
    let config = SimulationConfig::new(source, a.family_size, a.families, a.seed)?;
    let out = simulate(&config)?;
    if out.one_conditioning_events == 0 {
        warnings.push("no family had an affected relative; FRR1 is not estimable".into());
    }
    if a.family_size >= 3 && out.two_conditioning_events == 0 {
        warnings.push("no family had two affected relatives; FRR2 is not estimable".into());
    }
    for (name, e) in [("FRR1", out.frr_one), ("FRR2", out.frr_two)] {
        if e.is_some_and(|e| e.value == 0.0 && e.std_error == 0.0) {
            warnings.push(format!(
                "no conditioned member fell ill; the {name} estimate of 0 is not informative, \
                 simulate more families"
            ));
        }
    }
    let mut t = Table::new("", &["quantity", "estimate", "std_error", "model_value"]);
    let est = |e: Option<famrisk::simulation::Estimate>| -> [Cell; 2] {
        match e {
            Some(e) => [e.value.into(), e.std_error.into()],
            None => [Cell::Empty, Cell::Empty],
        }
    };
    let rows: [(&str, [Cell; 2]); 4] = [
        ("frr1", est(out.frr_one)),
        ("frr2", est(out.frr_two)),
        ("mean_risk", [out.empirical_mean_risk.into(), Cell::Empty]),
        ("gini", est(out.empirical_gini)),
    ];
    for ((name, [v, se]), model_value) in rows.into_iter().zip(expected) {
        let model_value = if name == "frr2" && a.family_size < 3 {
            Cell::Empty
        } else {
            model_value.into()
        };
        t.push(vec![name.into(), v, se, model_value]);
    }
    t.push(vec![
        "families".into(),
        (out.n_families as f64).into(),
        Cell::Empty,
        Cell::Empty,
    ]);
    Ok(t.render(cli.format, cli.precision))
}

/// Gini index of the two-point risk distribution.
fn dichotomous_gini(m: &DichotomousRiskModel) -> f64 {
    let (q, r) = (m.q(), m.irr());
    // Mean |X - Y| / (2 E[X]) with X, Y iid on {1, r} (low group scaled to 1).
    q * (1.0 - q) * (r - 1.0) / (q * r + 1.0 - q)
}

fn slug(name: &str) -> String {
    let mut s = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            s.push(ch.to_ascii_lowercase());
        } else if !s.ends_with('_') {
            s.push('_');
        }
    }
    s.trim_matches('_').to_string()
}

fn cmd_report(
    a: &ReportArgs,
    cli: &Cli,
    warnings: &mut Vec<String>,
) -> Result<String, ReportFailure> {
    let records: Vec<DiseaseRecord> = match (&a.source.data, a.source.bundled) {
        (Some(path), false) => load_records(path)?,
        (None, true) => bundled_records(),
        _ => unreachable!("clap enforces exactly one data source"),
    };
    let outcomes = analyze_all(&records);
    let text = render_report(&outcomes, cli.format, cli.precision);

    if let Some(dir) = &a.figures {
        write_figures(dir, &outcomes, a.seed, cli.precision)?;
    }

    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| o.analysis.is_err())
        .map(|o| o.record.name.as_str())
        .collect();
    if !outcomes.is_empty() && failed.len() == outcomes.len() {
        return Err(ReportFailure::Partial(
            text,
            EXIT_INFEASIBLE,
            "no record could be analyzed".into(),
        ));
    }
    for name in failed {
        warnings.push(format!("record {name:?} could not be analyzed"));
    }
    Ok(text)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", path.display()))))
}

fn write_figures(
    dir: &Path,
    outcomes: &[famrisk::dataset::RecordOutcome],
    seed: u64,
    precision: usize,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", dir.display()))))?;
    let mut samples = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let Ok(analysis) = &o.analysis else { continue };
        let Some(c) = &analysis.continuous else {
            continue;
        };
        let svg = render_lorenz_figure(&[(o.record.name.clone(), c.lorenz.clone())]);
        write_file(
            &dir.join(format!("lorenz_{:02}_{}.svg", i + 1, slug(&o.record.name))),
            &svg,
        )?;
        samples.push((
            o.record.name.clone(),
            c.model
                .sample_risks(SKYSCRAPER_FAMILIES, seed.wrapping_add(i as u64)),
        ));
    }

    let mut curves = Vec::new();
    for frr in COMPARISON_FRRS {
        let m = fit_from_risk_and_frr(COMPARISON_RISK, frr)?;
        curves.push((
            format!("FRR {}", format_sig(frr, precision)),
            m.lorenz_curve(famrisk::dataset::LORENZ_POINTS),
        ));
    }
    write_file(
        &dir.join("lorenz_comparison.svg"),
        &render_lorenz_figure(&curves),
    )?;
    write_file(
        &dir.join("skyscraper_samples.csv"),
        &render_samples_csv(&samples, precision),
    )?;
    Ok(())
}
