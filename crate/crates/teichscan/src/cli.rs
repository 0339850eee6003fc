//! The `teichscan` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use teichscan_core::curves::{FlatCurve, Segment};
use teichscan_core::decomposition::ThickThin;
use teichscan_core::estimators::{
    classify_from, estimate_from, lower_bound_from, profile_with, EssentialClass, Kind, LengthEstimate, Profile,
};
use teichscan_core::experiments::suite::SuiteSpec;
use teichscan_core::experiments::{
    curve_at, decompose_at, midpoint_violation, quasiconvexity, slope_report, value_at, QuasiConvexityReport,
    ScanResult, SlopeReport,
};
use teichscan_core::flow::make_scan;
use teichscan_core::surface::builders::{flat_torus, slit_tori, square_tiled};
use teichscan_core::surface::{FlatSurface, Violation};
use teichscan_core::{Config, PlanarVector};

use crate::atomic::emit;
use crate::curve_json::{self, CurveDoc};
use crate::error::{CliError, CliResult, ExitCode};
use crate::report::{self, Envelope};
use crate::{csv, parallel, surface_json, svg};

/// Environment variable overriding the developed-triangle budget.
pub const BUDGET_ENV: &str = "TEICHSCAN_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "teichscan", version, about = "Thick-thin length estimates along Teichmüller geodesics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a surface and write it as JSON.
    Build(BuildArgs),
    /// Write a curve document.
    Curve(CurveArgs),
    /// Check the invariants of a surface file.
    Validate(ValidateArgs),
    /// Thick-thin decomposition of a surface.
    Decompose(DecomposeArgs),
    /// Length estimates of one curve.
    Estimate(EstimateArgs),
    /// Estimates of one curve along the flow.
    Scan(ScanArgs),
    /// Quasiconvexity constants of a written scan.
    Quasiconvexity(QuasiArgs),
    /// Canned experiments.
    #[command(subcommand)]
    Example(ExampleCommand),
    /// Property suite over a seeded ensemble of square-tiled surfaces.
    Suite(SuiteArgs),
}

#[derive(Subcommand, Debug)]
pub enum BuildKind {
    /// Rectangular torus.
    Torus {
        #[arg(long = "w", alias = "width")]
        w: f64,
        #[arg(long = "h", alias = "height")]
        h: f64,
    },
    /// Square-tiled surface from two permutations, e.g. `--horiz 1,2,0`.
    SquareTiled {
        #[arg(long, value_delimiter = ',')]
        horiz: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        vert: Vec<usize>,
    },
    /// Two slit tori glued along a slit.
    SlitTori {
        #[arg(long)]
        a: f64,
        /// Also write the slit curve α here.
        #[arg(long)]
        curve_output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(subcommand)]
    pub kind: BuildKind,
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Triangle of the start point.
    #[arg(long, requires_all = ["start", "vector"], conflicts_with = "cylinder")]
    pub tri: Option<usize>,
    /// Barycentric start point, e.g. `0.3,0.3,0.4`.
    #[arg(long, value_delimiter = ',')]
    pub start: Vec<f64>,
    /// Holonomy of the closed trajectory in the triangle's frame, `h,v`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub vector: Vec<f64>,
    /// Index of a short curve in the decomposition.
    #[arg(long, requires = "pos")]
    pub cylinder: Option<usize>,
    /// Relative height of the core leaf in `(0, 1)`.
    #[arg(long)]
    pub pos: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub weight: f64,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = teichscan_core::config::DEFAULT_M0)]
    pub m0: f64,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub surface: PathBuf,
    /// Flow the surface for this time first.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Ext,
    Hyp,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Ext => Kind::Ext,
            KindArg::Hyp => Kind::Hyp,
        }
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub surface: PathBuf,
    #[arg(long)]
    pub curve: PathBuf,
    /// Only this kind; both when absent.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Grid {
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = teichscan_core::config::DEFAULT_T_STEP)]
    pub t_step: f64,
}

impl Grid {
    fn times(&self) -> CliResult<Vec<f64>> {
        Ok(make_scan(self.t_min, self.t_max, self.t_step)
            .map_err(|e| CliError::config(e.to_string()))?
            .into_iter()
            .map(|t| t.t())
            .collect())
    }
}

#[derive(Args, Debug, Clone)]
pub struct ScanOutputs {
    /// Scan as JSON.
    #[arg(long)]
    pub json_output: Option<PathBuf>,
    /// Plot of the scan.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Which classifier fills the CSV class columns.
    #[arg(long, value_enum, default_value = "ext")]
    pub class_kind: KindArg,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub surface: PathBuf,
    #[arg(long)]
    pub curve: PathBuf,
    #[command(flatten)]
    pub grid: Grid,
    #[command(flatten)]
    pub outputs: ScanOutputs,
    /// CSV destination; stdout when absent.
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct QuasiArgs {
    /// Scan written by `scan`, as JSON or CSV.
    #[arg(long)]
    pub scan: PathBuf,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ExampleCommand {
    /// Scan of the slit curve on the slit tori, with slopes and quasiconvexity.
    SlitTori(SlitArgs),
}

#[derive(Args, Debug)]
pub struct SlitArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2.3, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = teichscan_core::config::DEFAULT_T_STEP)]
    pub t_step: f64,
    /// Report destination (JSON); the CSV goes to `--output`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub outputs: ScanOutputs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub size: usize,
    #[arg(long, default_value_t = 12)]
    pub max_squares: usize,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = teichscan_core::config::DEFAULT_T_STEP)]
    pub t_step: f64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

/// Parse arguments, run, print errors to stderr and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Config as i32 } else { ExitCode::Success as i32 };
        }
    };
    match run(cli) {
        Ok(code) => code as i32,
        Err(e) => {
            eprintln!("teichscan: {e}");
            e.code as i32
        }
    }
}

/// Settings from `m0` and the environment.
pub fn config(m0: f64) -> CliResult<Config> {
    let mut cfg = Config::default().with_m0(m0);
    if let Ok(v) = std::env::var(BUDGET_ENV) {
        cfg.develop_budget = v
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("{BUDGET_ENV}={v:?} is not a positive integer")))?;
    }
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(cfg)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn load_surface(path: &Path) -> CliResult<FlatSurface> {
    surface_json::from_json(&read(path)?)
}

fn load_curve(path: &Path, s: &FlatSurface, cfg: &Config) -> CliResult<FlatCurve> {
    curve_json::from_json(&read(path)?)?.curve(s, cfg)
}

fn invalid(violations: &[Violation]) -> CliResult<()> {
    if violations.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(CliError::validation(format!("surface is invalid:\n  {}", lines.join("\n  "))))
}

pub fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Build(a) => build(a),
        Command::Curve(a) => curve(a),
        Command::Validate(a) => validate(a),
        Command::Decompose(a) => decompose(a),
        Command::Estimate(a) => estimate(a),
        Command::Scan(a) => scan(a),
        Command::Quasiconvexity(a) => quasi(a),
        Command::Example(ExampleCommand::SlitTori(a)) => slit_example(a),
        Command::Suite(a) => suite(a),
    }
}

fn build(a: BuildArgs) -> CliResult<ExitCode> {
    let s = match a.kind {
        BuildKind::Torus { w, h } => flat_torus(w, h)?,
        BuildKind::SquareTiled { horiz, vert } => square_tiled(&horiz, &vert)?,
        BuildKind::SlitTori { a: x, curve_output } => {
            let st = slit_tori(x)?;
            if let Some(p) = curve_output {
                emit(Some(&p), curve_json::to_json(&CurveDoc::chain(vec![st.alpha], 1.0)).as_bytes())?;
            }
            st.surface
        }
    };
    invalid(&s.validate())?;
    emit(a.output.as_deref(), surface_json::to_json(&s).as_bytes())?;
    Ok(ExitCode::Success)
}

fn curve(a: CurveArgs) -> CliResult<ExitCode> {
    let doc = match (a.tri, a.cylinder) {
        (Some(tri), None) => {
            if a.start.len() != 3 || a.vector.len() != 2 {
                return Err(CliError::config("--start takes 3 barycentric coordinates and --vector 2 components"));
            }
            let seg = Segment {
                tri,
                start: [a.start[0], a.start[1], a.start[2]],
                vector: PlanarVector::new(a.vector[0], a.vector[1]),
            };
            CurveDoc::chain(vec![seg], a.weight)
        }
        (None, Some(id)) => CurveDoc::cylinder(id, a.pos.unwrap_or(0.5), a.weight),
        _ => return Err(CliError::config("give either --tri/--start/--vector or --cylinder/--pos")),
    };
    emit(a.output.as_deref(), curve_json::to_json(&doc).as_bytes())?;
    Ok(ExitCode::Success)
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    file: String,
    valid: bool,
    triangles: usize,
    vertices: usize,
    area: f64,
    violations: &'a [Violation],
}

fn validate(a: ValidateArgs) -> CliResult<ExitCode> {
    let s = load_surface(&a.file)?;
    let v = s.validate();
    if a.json {
        let r = ValidationReport {
            file: a.file.display().to_string(),
            valid: v.is_empty(),
            triangles: s.num_triangles(),
            vertices: s.num_vertices(),
            area: s.area(),
            violations: &v,
        };
        emit(None, report::to_json(report::VALIDATION_SCHEMA, &r).as_bytes())?;
    } else if v.is_empty() {
        println!("{}: valid ({} triangles, {} vertices, area {})", a.file.display(), s.num_triangles(), s.num_vertices(), s.area());
    } else {
        for x in &v {
            println!("{x}");
        }
    }
    Ok(if v.is_empty() { ExitCode::Success } else { ExitCode::Validation })
}

fn decomposition(path: &Path, t: f64, cfg: &Config) -> CliResult<(FlatSurface, ThickThin)> {
    let s = load_surface(path)?;
    invalid(&s.validate())?;
    let (st, tt) = decompose_at(&s, t, cfg)?;
    Ok((st, tt?))
}

fn decompose(a: DecomposeArgs) -> CliResult<ExitCode> {
    let cfg = config(a.common.m0)?;
    let (_, tt) = decomposition(&a.surface, a.t, &cfg)?;
    let text = if a.json {
        report::to_json(report::DECOMPOSITION_SCHEMA, &tt)
    } else {
        let mut out = format!("{} short curves, {} pieces, systole {}\n", tt.shorts.len(), tt.pieces.len(), tt.systole);
        for (k, x) in tt.shorts.iter().enumerate() {
            out.push_str(&format!(
                "short {k}: length {} e {} f {} g {} modsum {} ext {}\n",
                x.length,
                x.e,
                x.f,
                x.g,
                x.modulus_sum(),
                x.ext_estimate
            ));
        }
        for y in &tt.pieces {
            out.push_str(&format!(
                "piece {}: diam {} area {} degenerate {} boundary {:?}\n",
                y.id, y.diam, y.area, y.degenerate, y.boundary
            ));
        }
        out
    };
    emit(a.common.output.as_deref(), text.as_bytes())?;
    Ok(ExitCode::Success)
}

#[derive(Serialize)]
struct KindReport {
    estimate: LengthEstimate,
    lower_bound: LengthEstimate,
    class: EssentialClass,
}

#[derive(Serialize)]
struct EstimateReport {
    t: f64,
    m0: f64,
    flat_length: f64,
    is_short: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    ext: Option<KindReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hyp: Option<KindReport>,
}

fn kind_report(kind: Kind, pr: &Profile, tt: &ThickThin, cfg: &Config) -> KindReport {
    let estimate = estimate_from(kind, pr, tt);
    let class = classify_from(pr, &estimate, cfg.balanced_band);
    KindReport { lower_bound: lower_bound_from(kind, pr, tt), class, estimate }
}

fn estimate(a: EstimateArgs) -> CliResult<ExitCode> {
    let cfg = config(a.common.m0)?;
    let s = load_surface(&a.surface)?;
    invalid(&s.validate())?;
    let c = load_curve(&a.curve, &s, &cfg)?;
    let (st, tt) = decompose_at(&s, a.t, &cfg)?;
    let tt = tt?;
    let g = curve_at(&st, &c, a.t, &cfg)?;
    let pr = profile_with(&st, &g, &tt, &cfg)?;
    let want = |k: KindArg| a.kind.is_none_or(|x| x == k);
    let r = EstimateReport {
        t: a.t,
        m0: cfg.m0,
        flat_length: pr.length,
        is_short: pr.short.is_some(),
        ext: want(KindArg::Ext).then(|| kind_report(Kind::Ext, &pr, &tt, &cfg)),
        hyp: want(KindArg::Hyp).then(|| kind_report(Kind::Hyp, &pr, &tt, &cfg)),
    };
    let text = if a.json {
        report::to_json(report::ESTIMATE_SCHEMA, &r)
    } else {
        let mut out = format!("flat length {}{}\n", r.flat_length, if r.is_short { " (short curve)" } else { "" });
        for (name, k) in [("ext", &r.ext), ("hyp", &r.hyp)] {
            if let Some(k) = k {
                out.push_str(&format!(
                    "{name}: {} (lower bound {}), {:?} case {:?}, dominance {}\n",
                    k.estimate.total, k.lower_bound.total, k.class.direction, k.class.case, k.class.dominance
                ));
            }
        }
        out
    };
    emit(a.common.output.as_deref(), text.as_bytes())?;
    Ok(ExitCode::Success)
}

fn write_scan(scan: &ScanResult, csv_path: Option<&Path>, o: &ScanOutputs, title: &str) -> CliResult<()> {
    emit(csv_path, csv::to_csv(scan, o.class_kind.into()).as_bytes())?;
    if let Some(p) = &o.json_output {
        emit(Some(p), report::to_json(report::SCAN_SCHEMA, scan).as_bytes())?;
    }
    if let Some(p) = &o.svg {
        emit(Some(p), svg::plot(scan, title).as_bytes())?;
    }
    Ok(())
}

fn scan(a: ScanArgs) -> CliResult<ExitCode> {
    let cfg = config(a.common.m0)?;
    let grid = a.grid.times()?;
    let s = load_surface(&a.surface)?;
    invalid(&s.validate())?;
    let c = load_curve(&a.curve, &s, &cfg)?;
    let pool = parallel::pool(a.outputs.jobs)?;
    let mut result = parallel::scan(&pool, &s, &c, &grid, &cfg)?;
    result.surface = a.surface.display().to_string();
    result.curve = a.curve.display().to_string();
    write_scan(&result, a.common.output.as_deref(), &a.outputs, &result.curve.clone())?;
    Ok(ExitCode::Success)
}

fn quasi(a: QuasiArgs) -> CliResult<ExitCode> {
    let text = read(&a.scan)?;
    let scan: ScanResult = if text.trim_start().starts_with('{') {
        report::from_json(report::SCAN_SCHEMA, &text)?
    } else {
        csv::scan_from_csv(&text, f64::NAN)?
    };
    let r = quasiconvexity(&scan)?;
    emit(a.output.as_deref(), report::to_json(report::QUASICONVEXITY_SCHEMA, &r).as_bytes())?;
    Ok(ExitCode::Success)
}

#[derive(Serialize)]
struct SlitReport {
    a: f64,
    m0: f64,
    ext_at_zero: Option<f64>,
    slopes: Option<SlopeReport>,
    /// Times of a strict midpoint violation of the ext series.
    midpoint_violation: Option<(f64, f64, f64)>,
    quasiconvexity: QuasiConvexityReport,
    flagged_rows: usize,
}

fn slit_example(a: SlitArgs) -> CliResult<ExitCode> {
    let cfg = config(a.common.m0)?;
    let grid = Grid { t_min: a.t_min, t_max: a.t_max, t_step: a.t_step }.times()?;
    let st = slit_tori(a.a)?;
    let c = FlatCurve::trajectory(st.alpha, 1.0);
    let pool = parallel::pool(a.outputs.jobs)?;
    let mut result = parallel::scan(&pool, &st.surface, &c, &grid, &cfg)?;
    result.surface = format!("slit-tori a={}", a.a);
    result.curve = "alpha".into();
    let last = grid.last().copied().unwrap_or(0.0);
    let kerckhoff = (0.5 * (1.0 / (a.a * a.a)).ln()).min(last);
    let r = SlitReport {
        a: a.a,
        m0: cfg.m0,
        ext_at_zero: value_at(&result, Kind::Ext, 0.0).ok(),
        slopes: slope_report(&result, (grid[0].max(-2.0), 0.0), (0.0, kerckhoff)).ok(),
        midpoint_violation: midpoint_violation(&result, Kind::Ext),
        quasiconvexity: quasiconvexity(&result)?,
        flagged_rows: result.rows.iter().filter(|r| !r.is_clean()).count(),
    };
    write_scan(&result, a.common.output.as_deref(), &a.outputs, &result.surface.clone())?;
    let json = report::to_json(report::EXAMPLE_SCHEMA, &r);
    match &a.report {
        Some(p) => emit(Some(p), json.as_bytes())?,
        None => eprint!("{json}"),
    }
    Ok(ExitCode::Success)
}

fn suite(a: SuiteArgs) -> CliResult<ExitCode> {
    let cfg = config(a.common.m0)?;
    let spec = SuiteSpec {
        seed: a.seed,
        size: a.size,
        max_squares: a.max_squares,
        t_min: a.t_min,
        t_max: a.t_max,
        t_step: a.t_step,
    };
    let pool = parallel::pool(a.jobs)?;
    let r = parallel::suite(&pool, spec, &cfg)?;
    for c in &r.checks {
        let v = c.value.map_or("none".to_string(), |x| format!("{x:.4}"));
        eprintln!("{} {} {} (cap {})", if c.pass { "PASS" } else { "FAIL" }, c.name, v, c.cap);
    }
    let body = Envelope { schema: report::SUITE_SCHEMA.to_string(), body: &r };
    let mut text = serde_json::to_string_pretty(&body)?;
    text.push('\n');
    emit(a.common.output.as_deref(), text.as_bytes())?;
    Ok(if r.passed() { ExitCode::Success } else { ExitCode::Validation })
}
