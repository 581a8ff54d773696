//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rmt_gaps::{build, EnsembleSpec, Execution, GapQuery, Model, Quantity, SimulationConfig};

use crate::config::{parse_method, parse_real, parse_real_list, parse_spec, ConfigFile, EnsembleOverrides};
use crate::curve::{curve, linspace};
use crate::error::{CliError, Result};
use crate::output::{render_report, render_rows, write_out, Abscissa, Format, ResultRow};
use crate::report::{reproduce_table, ReproduceOptions};
use crate::tables::table;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "RMT_GAPS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rmt-gaps", version, about = "Gap probabilities and extreme-eigenvalue statistics of random-matrix ensembles")]
struct Cli {
    /// Worker threads (overrides RMT_GAPS_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// E(r,s): probability that no eigenvalue lies in (r, s).
    Gap(GapArgs),
    /// Ẽ(r,s): probability that every eigenvalue lies in [r, s].
    DoubleGap(GapArgs),
    /// Survival function of the smallest eigenvalue.
    SfMin(PointArgs),
    /// Distribution function of the largest eigenvalue.
    CdfMax(PointArgs),
    /// Density of the smallest eigenvalue.
    PdfMin(PointArgs),
    /// Density of the largest eigenvalue.
    PdfMax(PointArgs),
    /// Joint density of the smallest and largest eigenvalues.
    JointPdf(JointArgs),
    /// Inverse normalization C⁻¹ of the joint eigenvalue density.
    Partition(PartitionArgs),
    /// Sample spectra and estimate E(r,s) and Ẽ(r,s).
    Simulate(SimulateArgs),
    /// Compare analytic values with simulation for a published table.
    ReproduceTable(TableArgs),
    /// Plot-ready grid of a distribution or density, optionally with MC.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Args)]
struct SpecArgs {
    /// TOML file with [ensemble], [query] and [simulation] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// gauss-wigner, laguerre-wishart, cauchy-lorentz-i, cauchy-lorentz-ii, jacobi-manova or bures-hall.
    #[arg(long)]
    family: Option<String>,
    /// Correlated variant (implied by --sigma).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    correlated: Option<bool>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated σ values; rationals such as 3/4 are exact.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// auto, appell or cauchy-map (correlated Jacobi only).
    #[arg(long)]
    jacobi_route: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct SimArgs {
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// auto, direct or log-gas.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct GapArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Add a Monte-Carlo estimate.
    #[arg(long)]
    mc: bool,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct PointArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Grid start (with --to and --points).
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct JointArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct PartitionArgs {
    #[command(flatten)]
    spec: SpecArgs,
}

#[derive(Debug, Clone, Args)]
struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct TableArgs {
    /// 1 to 10, bures-corr or bures-uncorr.
    id: String,
    /// Compare with the published analytic values only.
    #[arg(long)]
    no_mc: bool,
    /// Record wall time in the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct CurveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// sf-min, cdf-max, pdf-min or pdf-max.
    #[arg(long, default_value = "pdf-min")]
    quantity: String,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    /// Add Monte-Carlo estimates (histograms for densities).
    #[arg(long)]
    mc: bool,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    out: OutArgs,
}

struct Loaded {
    file: ConfigFile,
    spec: EnsembleSpec,
}

fn load(args: &SpecArgs) -> Result<Loaded> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    let flags = EnsembleOverrides {
        family: args.family.clone(),
        correlated: args.correlated,
        n: args.n,
        sigma: args.sigma.clone(),
        alpha: args.alpha.clone(),
        beta: args.beta.clone(),
        kappa: args.kappa.clone(),
        jacobi_route: args.jacobi_route.clone(),
    };
    let spec = parse_spec(&file.ensemble, &flags)?;
    Ok(Loaded { file, spec })
}

fn real_or(flag: &Option<String>, file: &Option<crate::config::Real>, name: &str) -> Result<f64> {
    match (flag, file) {
        (Some(t), _) => parse_real(t),
        (None, Some(v)) => v.value(),
        (None, None) => Err(CliError::validation(format!("missing required parameter: {name}"))),
    }
}

fn opt_real_or(flag: &Option<String>, file: &Option<crate::config::Real>) -> Result<Option<f64>> {
    match (flag, file) {
        (Some(t), _) => parse_real(t).map(Some),
        (None, Some(v)) => v.value().map(Some),
        (None, None) => Ok(None),
    }
}

fn sim_config(file: &ConfigFile, args: &SimArgs, exec: Execution) -> Result<SimulationConfig> {
    let mut cfg = SimulationConfig::default().with_execution(exec);
    if let Some(r) = args.realizations.or(file.simulation.realizations) {
        cfg = cfg.with_realizations(r);
    }
    if let Some(s) = args.seed.or(file.simulation.seed) {
        cfg = cfg.with_seed(s);
    }
    if let Some(m) = args.method.as_ref().or(file.simulation.method.as_ref()) {
        cfg = cfg.with_method(parse_method(m)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit_rows(rows: &[ResultRow], out: &OutArgs, default: Format) -> Result<()> {
    write_out(&render_rows(rows, out.format.unwrap_or(default))?, out.output.as_deref())
}

fn gap_command(args: &GapArgs, tilde: bool, exec: Execution) -> Result<i32> {
    let l = load(&args.spec)?;
    let r = real_or(&args.r, &l.file.query.r, "r")?;
    let s = real_or(&args.s, &l.file.query.s, "s")?;
    let model = build(&l.spec)?;
    let q = GapQuery::new(r, s);
    let v = if tilde { model.double_gap_probability(q)? } else { model.gap_probability(q)? };
    let mut row = ResultRow::analytic(Abscissa::Interval(r, s), v);
    if args.mc {
        let run = rmt_gaps::simulate(&model, &sim_config(&l.file, &args.sim, exec)?)?;
        let est = if tilde { run.double_gap(r, s)? } else { run.gap(r, s)? };
        row = row.with_mc(est.value, est.std_error);
    }
    emit_rows(&[row], &args.out, Format::Text)?;
    Ok(0)
}

fn parse_quantity(text: &str) -> Result<Quantity> {
    match text.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "sf-min" => Ok(Quantity::SfMin),
        "cdf-max" => Ok(Quantity::CdfMax),
        "pdf-min" => Ok(Quantity::PdfMin),
        "pdf-max" => Ok(Quantity::PdfMax),
        other => Err(CliError::validation(format!("unknown quantity '{other}' (sf-min, cdf-max, pdf-min, pdf-max)"))),
    }
}

fn point_command(args: &PointArgs, quantity: Quantity, exec: Execution) -> Result<i32> {
    let l = load(&args.spec)?;
    let q = &l.file.query;
    let xs = if let Some(t) = &args.x {
        parse_real_list(t)?
    } else if let Some(list) = &q.x {
        if args.from.is_some() || args.to.is_some() {
            grid(&args.from, &args.to, args.points, &l.file)?
        } else {
            list.values()?
        }
    } else {
        grid(&args.from, &args.to, args.points, &l.file)?
    };
    if xs.is_empty() {
        return Err(CliError::validation("missing required parameter: x (or --from/--to/--points)"));
    }
    let model = build(&l.spec)?;
    let ys = model.evaluate_grid(quantity, &xs, exec)?;
    let rows: Vec<ResultRow> = xs.iter().zip(ys).map(|(&x, y)| ResultRow::analytic(Abscissa::X(x), y)).collect();
    emit_rows(&rows, &args.out, if rows.len() == 1 { Format::Text } else { Format::Csv })?;
    Ok(0)
}

fn grid(from: &Option<String>, to: &Option<String>, points: Option<usize>, file: &ConfigFile) -> Result<Vec<f64>> {
    let a = real_or(from, &file.query.from, "x (or --from/--to/--points)")?;
    let b = real_or(to, &file.query.to, "to")?;
    let p = points.or(file.query.points).unwrap_or(200);
    linspace(a, b, p)
}

fn joint_command(args: &JointArgs) -> Result<i32> {
    let l = load(&args.spec)?;
    let r = real_or(&args.r, &l.file.query.r, "r")?;
    let s = real_or(&args.s, &l.file.query.s, "s")?;
    let model = build(&l.spec)?;
    let v = model.joint_extreme_pdf(r, s)?;
    emit_rows(&[ResultRow::analytic(Abscissa::Interval(r, s), v.value)], &args.out, Format::Text)?;
    Ok(0)
}

fn partition_command(args: &PartitionArgs) -> Result<i32> {
    let l = load(&args.spec)?;
    let model: Model = build(&l.spec)?;
    println!("{}", crate::output::fmt_sig(model.partition()));
    Ok(0)
}

fn simulate_command(args: &SimulateArgs, exec: Execution) -> Result<i32> {
    let l = load(&args.spec)?;
    let r = real_or(&args.r, &l.file.query.r, "r")?;
    let s = real_or(&args.s, &l.file.query.s, "s")?;
    let model = build(&l.spec)?;
    let cfg = sim_config(&l.file, &args.sim, exec)?;
    let run = rmt_gaps::simulate(&model, &cfg)?;
    let q = GapQuery::new(r, s);
    let g = run.gap(r, s)?;
    let d = run.double_gap(r, s)?;
    let rows = [
        ResultRow::analytic(Abscissa::Interval(r, s), model.gap_probability(q)?).with_mc(g.value, g.std_error),
        ResultRow::analytic(Abscissa::Interval(r, s), model.double_gap_probability(q)?).with_mc(d.value, d.std_error),
    ];
    eprintln!(
        "sampler {:?}, {} realizations, seed {}, acceptance {}, sign violations {}, restarts {}",
        run.method,
        run.samples.len(),
        run.seed,
        run.acceptance_rate.map(|a| format!("{a:.3}")).unwrap_or_else(|| "n/a".into()),
        run.sign_violations,
        run.restarts
    );
    emit_rows(&rows, &args.out, Format::Csv)?;
    Ok(0)
}

fn table_command(args: &TableArgs, exec: Execution) -> Result<i32> {
    let t = table(&args.id)?;
    let simulation = if args.no_mc { None } else { Some(sim_config(&ConfigFile::default(), &args.sim, exec)?) };
    let report = reproduce_table(&t, &ReproduceOptions { simulation, execution: exec, record_time: args.timing })?;
    write_out(&render_report(&report, args.out.format.unwrap_or(Format::Json))?, args.out.output.as_deref())?;
    Ok(if report.all_pass { 0 } else { 1 })
}

fn curve_command(args: &CurveArgs, exec: Execution) -> Result<i32> {
    let l = load(&args.spec)?;
    let quantity = parse_quantity(&args.quantity)?;
    let from = opt_real_or(&args.from, &l.file.query.from)?;
    let to = opt_real_or(&args.to, &l.file.query.to)?;
    let (from, to) = match (from, to) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::validation("missing required parameter: from/to")),
    };
    let points = args.points.or(l.file.query.points).unwrap_or(200);
    let model = build(&l.spec)?;
    let cfg = if args.mc { Some(sim_config(&l.file, &args.sim, exec)?) } else { None };
    let rows = curve(&model, quantity, from, to, points, cfg.as_ref(), exec)?;
    emit_rows(&rows, &args.out, Format::Csv)?;
    Ok(0)
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim().parse::<usize>().map_err(|_| CliError::validation(format!("{THREADS_ENV} must be a positive integer")))?,
        ),
        _ => None,
    };
    if let Some(k) = flag.or(from_env) {
        if k == 0 {
            return Err(CliError::validation("thread count ≥ 1 violated"));
        }
        // A pool may already exist when embedded; keep it in that case.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32> {
    configure_threads(cli.threads)?;
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::Gap(a) => gap_command(a, false, exec),
        Command::DoubleGap(a) => gap_command(a, true, exec),
        Command::SfMin(a) => point_command(a, Quantity::SfMin, exec),
        Command::CdfMax(a) => point_command(a, Quantity::CdfMax, exec),
        Command::PdfMin(a) => point_command(a, Quantity::PdfMin, exec),
        Command::PdfMax(a) => point_command(a, Quantity::PdfMax, exec),
        Command::JointPdf(a) => joint_command(a),
        Command::Partition(a) => partition_command(a),
        Command::Simulate(a) => simulate_command(a, exec),
        Command::ReproduceTable(a) => table_command(a, exec),
        Command::Curve(a) => curve_command(a, exec),
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 for invalid input (or a failing table), 2 for numerical failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            let kind = if e.exit_code() == 1 { "invalid input" } else { "numerical failure" };
            eprintln!("error ({kind}): {e}");
            e.exit_code()
        }
    }
}

/// Convenience for tests: the config text of a spec written to `path`.
pub fn write_spec_config(spec: &EnsembleSpec, path: &Path) -> Result<()> {
    std::fs::write(path, crate::config::spec_to_toml(spec)).map_err(|e| CliError::io(path, e))
}
