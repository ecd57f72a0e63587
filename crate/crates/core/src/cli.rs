//! Batch driver: one subcommand per experiment, CSV output, optional SVG plots.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;

mod experiments;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_ERROR: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "octa-euler", version, about = "Octahedral-symmetric Euler experiments")]
pub struct Cli {
    /// JSON experiment config; flags override its parameters.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write an SVG line plot.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Seed for random sample points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Element tables of the octahedral groups.
    GroupTables(GroupTablesArgs),
    /// PV Riesz transforms of the sector indicator functions.
    #[command(name = "riesz2d-verify")]
    #[serde(rename = "riesz2d-verify")]
    Riesz2dVerify(Riesz2dArgs),
    /// Logarithmic slope of the Riesz transforms of the sign function.
    BcSlope(BcSlopeArgs),
    /// Sector Poisson modes and their discrete Laplacian.
    SectorModes(SectorModesArgs),
    /// Moment expansion of the velocity for a smooth bump vorticity.
    ExpansionCheck(ExpansionArgs),
    /// PV velocity against the closed form for constant octant vorticity.
    VelocityVerify(VerifyArgs),
    /// PV velocity gradient against the closed form.
    GradientVerify(VerifyArgs),
    /// Sphere moments of the symmetric constant vorticity.
    SphereMoments(SphereMomentsArgs),
    /// Blow-up verdicts for initial amplitudes.
    BlowupClassify(ClassifyArgs),
    /// Trajectory of the amplitude system.
    BlowupIntegrate(IntegrateArgs),
    /// Slip condition on the chamber faces.
    SlipCheck(SlipArgs),
    /// Particle paths of the explicit flow.
    FlowMap(FlowMapArgs),
    /// Hölder seminorms of sampled fields near the origin.
    HolderProbe(HolderArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GroupTables(_) => "group-tables",
            Self::Riesz2dVerify(_) => "riesz2d-verify",
            Self::BcSlope(_) => "bc-slope",
            Self::SectorModes(_) => "sector-modes",
            Self::ExpansionCheck(_) => "expansion-check",
            Self::VelocityVerify(_) => "velocity-verify",
            Self::GradientVerify(_) => "gradient-verify",
            Self::SphereMoments(_) => "sphere-moments",
            Self::BlowupClassify(_) => "blowup-classify",
            Self::BlowupIntegrate(_) => "blowup-integrate",
            Self::SlipCheck(_) => "slip-check",
            Self::FlowMap(_) => "flow-map",
            Self::HolderProbe(_) => "holder-probe",
        }
    }
}

macro_rules! params {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fm])*
                #[arg(long)]
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }
    };
}

params!(GroupTablesArgs {
    /// `O`, `O-tilde` or `both`.
    group: String,
});

params!(Riesz2dArgs {
    n_points: usize,
    r_min: f64,
    r_max: f64,
    tolerance: f64,
});

params!(BcSlopeArgs {
    /// Comma-separated radii, decreasing.
    #[arg(value_delimiter = ',')]
    radii: Vec<f64>,
    /// `raw` or `normalized`.
    normalization: String,
    expected_c12: f64,
    tolerance: f64,
});

params!(SectorModesArgs {
    /// Comma-separated `m:alpha` pairs.
    #[arg(value_delimiter = ',')]
    cases: Vec<String>,
    #[arg(value_delimiter = ',')]
    radii: Vec<f64>,
    h: f64,
    tolerance: f64,
});

params!(ExpansionArgs {
    k_min: i32,
    k_max: i32,
    min_slope: f64,
    /// `default` or `fast`.
    profile: String,
});

params!(VerifyArgs {
    /// Comma-separated `lambda:mu` pairs.
    #[arg(value_delimiter = ',')]
    pairs: Vec<String>,
    n_points: usize,
    tolerance: f64,
    /// `default` or `fast`.
    profile: String,
});

params!(SphereMomentsArgs {
    radius: f64,
    lambda: f64,
    mu: f64,
    tolerance: f64,
});

params!(ClassifyArgs {
    #[arg(allow_hyphen_values = true)]
    lambda: f64,
    #[arg(allow_hyphen_values = true)]
    mu: f64,
    t_max: f64,
    escape_threshold: f64,
});

params!(IntegrateArgs {
    #[arg(allow_hyphen_values = true)]
    lambda: f64,
    #[arg(allow_hyphen_values = true)]
    mu: f64,
    rtol: f64,
    atol: f64,
    escape_threshold: f64,
    t_max: f64,
    /// Resample at this spacing instead of writing accepted steps.
    sample_dt: f64,
    identity_tolerance: f64,
});

params!(SlipArgs {
    #[arg(allow_hyphen_values = true)]
    lambda: f64,
    #[arg(allow_hyphen_values = true)]
    mu: f64,
    n_samples: usize,
    tolerance: f64,
});

params!(FlowMapArgs {
    #[arg(allow_hyphen_values = true)]
    lambda: f64,
    #[arg(allow_hyphen_values = true)]
    mu: f64,
    n_paths: usize,
    /// End time as a fraction of the blow-up time (or of `t_end` without blow-up).
    fraction: f64,
    t_end: f64,
    steps: usize,
    tolerance: f64,
});

params!(HolderArgs {
    alpha: f64,
    levels: u32,
    n_angular: usize,
    /// `octant-vorticity` or `localized`.
    field: String,
});

/// Contents of a `--config` file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub plot: Option<bool>,
}

/// A line plot request: x column and y columns of the report.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub x: String,
    pub ys: Vec<String>,
    pub log_x: bool,
    pub log_y: bool,
}

/// Tabular result of one experiment.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Indices of rows that breach a tolerance.
    pub failures: Vec<usize>,
    /// `key=value` pairs appended to the summary line.
    pub notes: Vec<(String, String)>,
    pub plot: Option<PlotSpec>,
}

impl Report {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<String>, pass: bool) {
        if !pass {
            self.failures.push(self.rows.len());
        }
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Shortest representation that round-trips.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub(crate) struct Context {
    pub seed: u64,
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub csv: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> Outcome {
    let msg = msg.to_string().replace('\n', " ");
    Outcome { code: EXIT_USAGE, summary: format!("RESULT status=usage-error message={msg:?}"), csv: None }
}

fn config_error(msg: impl std::fmt::Display) -> Outcome {
    let msg = msg.to_string().replace('\n', " ");
    Outcome { code: EXIT_CONFIG, summary: format!("RESULT status=config-error message={msg:?}"), csv: None }
}

fn merge<T: Serialize + DeserializeOwned>(flags: &T, params: &Value) -> Result<T, String> {
    let mut base = match params {
        Value::Null => serde_json::Map::new(),
        Value::Object(m) => m.clone(),
        _ => return Err("params must be a JSON object".into()),
    };
    if let Value::Object(over) = serde_json::to_value(flags).map_err(|e| e.to_string())? {
        base.extend(over);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| e.to_string())
}

fn merge_command(flags: Option<Command>, cfg: &ExperimentConfig) -> Result<Command, String> {
    let from_cfg: Command = serde_json::from_value(serde_json::json!({
        "subcommand": cfg.subcommand,
        "params": if cfg.params.is_null() { Value::Object(Default::default()) } else { cfg.params.clone() },
    }))
    .map_err(|e| format!("config: {e}"))?;
    let Some(flags) = flags else {
        return Ok(from_cfg);
    };
    if flags.name() != from_cfg.name() {
        return Err(format!("config is for {:?}, command line asks for {:?}", from_cfg.name(), flags.name()));
    }
    let p = &cfg.params;
    Ok(match flags {
        Command::GroupTables(a) => Command::GroupTables(merge(&a, p)?),
        Command::Riesz2dVerify(a) => Command::Riesz2dVerify(merge(&a, p)?),
        Command::BcSlope(a) => Command::BcSlope(merge(&a, p)?),
        Command::SectorModes(a) => Command::SectorModes(merge(&a, p)?),
        Command::ExpansionCheck(a) => Command::ExpansionCheck(merge(&a, p)?),
        Command::VelocityVerify(a) => Command::VelocityVerify(merge(&a, p)?),
        Command::GradientVerify(a) => Command::GradientVerify(merge(&a, p)?),
        Command::SphereMoments(a) => Command::SphereMoments(merge(&a, p)?),
        Command::BlowupClassify(a) => Command::BlowupClassify(merge(&a, p)?),
        Command::BlowupIntegrate(a) => Command::BlowupIntegrate(merge(&a, p)?),
        Command::SlipCheck(a) => Command::SlipCheck(merge(&a, p)?),
        Command::FlowMap(a) => Command::FlowMap(merge(&a, p)?),
        Command::HolderProbe(a) => Command::HolderProbe(merge(&a, p)?),
    })
}

fn write_outputs(name: &str, report: &Report, dir: &Path, plot: bool) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = report.header.clone();
    header.push("pass".into());
    w.write_record(&header)?;
    for (i, row) in report.rows.iter().enumerate() {
        let mut r = row.clone();
        r.push((!report.failures.contains(&i)).to_string());
        w.write_record(&r)?;
    }
    w.flush()?;
    if plot {
        if let Some(svg) = report.plot.as_ref().and_then(|p| render_svg(name, report, p)) {
            fs::write(dir.join(format!("{name}.svg")), svg)?;
        }
    }
    Ok(path)
}

fn render_svg(title: &str, report: &Report, spec: &PlotSpec) -> Option<String> {
    let xi = report.column(&spec.x)?;
    let tx = |v: f64| if spec.log_x { v.abs().log10() } else { v };
    let ty = |v: f64| if spec.log_y { v.abs().log10() } else { v };
    let series: Vec<(String, Vec<(f64, f64)>)> = spec
        .ys
        .iter()
        .filter_map(|y| {
            let yi = report.column(y)?;
            let pts: Vec<(f64, f64)> = report
                .rows
                .iter()
                .filter_map(|r| Some((tx(r[xi].parse().ok()?), ty(r[yi].parse().ok()?))))
                .filter(|(a, b): &(f64, f64)| a.is_finite() && b.is_finite())
                .collect();
            Some((y.clone(), pts))
        })
        .collect();
    let all: Vec<&(f64, f64)> = series.iter().flat_map(|s| &s.1).collect();
    if all.is_empty() {
        return None;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (w, h, m) = (640.0, 400.0, 60.0);
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{title}</text>\n\
         <line x1=\"{m}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{}\" stroke=\"black\"/>\n",
        w / 2.0,
        h - m,
        w - m,
        h - m,
        h - m
    );
    let lx = if spec.log_x { format!("log10 {}", spec.x) } else { spec.x.clone() };
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{lx}</text>\n", w / 2.0, h - 20.0);
    s += &format!("<text x=\"{m}\" y=\"{}\" text-anchor=\"start\">{:.3e}</text>\n", h - m + 15.0, x0);
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>\n", w - m, h - m + 15.0, x1);
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>\n", m - 4.0, h - m, y0);
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>\n", m - 4.0, m + 4.0, y1);
    for (k, (name, pts)) in series.iter().enumerate() {
        let c = colors[k % colors.len()];
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
        s += &format!("<polyline fill=\"none\" stroke=\"{c}\" stroke-width=\"1.5\" points=\"{}\"/>\n", path.join(" "));
        let ly = m + 16.0 * k as f64;
        let label = if spec.log_y { format!("log10 {name}") } else { name.clone() };
        s += &format!("<text x=\"{}\" y=\"{ly}\" fill=\"{c}\" text-anchor=\"end\">{label}</text>\n", w - m);
    }
    s += "</svg>\n";
    Some(s)
}

fn configure_threads() {
    if let Some(n) = std::env::var("OCTA_EULER_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs one parsed invocation and reports its exit code and summary line.
pub fn run(cli: Cli) -> Outcome {
    configure_threads();
    let cfg = match &cli.config {
        None => None,
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read config {}: {e}", path.display())),
            };
            if text.trim().is_empty() {
                return usage(format!("config {} is empty", path.display()));
            }
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) if m.is_empty() => return usage(format!("config {} is empty", path.display())),
                Err(e) => return config_error(format!("malformed config: {e}")),
                Ok(v) => match serde_json::from_value::<ExperimentConfig>(v) {
                    Ok(c) => Some(c),
                    Err(e) => return config_error(format!("malformed config: {e}")),
                },
            }
        }
    };
    let command = match (cli.command, &cfg) {
        (flags, Some(cfg)) => match merge_command(flags, cfg) {
            Ok(c) => c,
            Err(e) => return config_error(e),
        },
        (Some(c), None) => c,
        (None, None) => return usage("no subcommand given; see --help"),
    };
    let out = cli.out.or_else(|| cfg.as_ref().and_then(|c| c.out.clone())).unwrap_or_else(|| PathBuf::from("."));
    let seed = cli.seed.or_else(|| cfg.as_ref().and_then(|c| c.seed)).unwrap_or(0);
    let plot = cli.plot || cfg.as_ref().and_then(|c| c.plot).unwrap_or(false);
    let name = command.name();
    let ctx = Context { seed };
    let report = match experiments::dispatch(&command, &ctx) {
        Ok(r) => r,
        Err(e) => {
            let code = match e {
                Error::InvalidParameter(_) | Error::OutsideDomain(_) | Error::InvalidCutoff(_) => EXIT_USAGE,
                _ => EXIT_ERROR,
            };
            let status = if code == EXIT_USAGE { "usage-error" } else { "error" };
            let msg = e.to_string().replace('\n', " ");
            return Outcome { code, summary: format!("RESULT subcommand={name} status={status} message={msg:?}"), csv: None };
        }
    };
    let csv = match write_outputs(name, &report, &out, plot) {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                code: EXIT_ERROR,
                summary: format!("RESULT subcommand={name} status=io-error message={:?}", e.to_string()),
                csv: None,
            }
        }
    };
    let failed = !report.failures.is_empty();
    let mut summary = format!(
        "RESULT subcommand={name} status={} rows={} failures={} csv={}",
        if failed { "tolerance-failure" } else { "ok" },
        report.rows.len(),
        report.failures.len(),
        csv.display()
    );
    for (k, v) in &report.notes {
        summary += &format!(" {k}={v}");
    }
    Outcome { code: if failed { EXIT_TOLERANCE } else { EXIT_OK }, summary, csv: Some(csv) }
}

/// Parses `args`, runs, prints the summary line, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => {
                    println!("RESULT status=usage-error message={:?}", e.kind().to_string());
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = run(cli);
    if outcome.code == EXIT_USAGE {
        eprintln!("usage: octa-euler <SUBCOMMAND> [--config <path>] [--out <dir>] [--plot] [--seed <u64>]");
    }
    println!("{}", outcome.summary);
    outcome.code
}
