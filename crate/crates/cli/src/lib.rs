//! Command-line driver. [`run`] parses arguments, delegates to the
//! `solvmetric` library and writes results to the given streams; it returns
//! the process exit code (0 success, 1 input error, 2 internal error).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use solvmetric::harness::{
    default_scenario_aggregation, delta_sweep, evaluate, head_to_head, make_fold_plan, mznc_flip_point,
    runtime_distribution, AggregationMethod, EvalConfig,
};
use solvmetric::io::{
    emit_report, parse_aslib_runs, parse_runs, read_runs, write_runs, write_trajectories, Provenance, Report,
    ReportFormat,
};
use solvmetric::synthkit::{generate, ArchetypeSpec};
use solvmetric::{BaseMetric, InstanceId, Metric, SbsPolicy, Scenario, SolverId};

#[derive(Parser, Debug)]
#[command(name = "solvmetric", version, about = "Score solvers and meta-solvers from recorded run tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score every solver of one scenario under one or more metrics
    Score(ScoreArgs),
    /// Score several scenarios under one metric and rank solvers on the total
    Rank(RankArgs),
    /// Count instances on which each of two solvers is strictly faster
    Head2head(Head2HeadArgs),
    /// MZNC scores over a list of time thresholds, as long-form CSV
    SweepDelta(SweepArgs),
    /// Sorted runtimes of solved instances per solver (cactus plot data)
    RuntimeDist(DistArgs),
    /// Generate a seeded synthetic scenario as a runs CSV
    Gen(GenArgs),
    /// Check a runs file against the schema and scenario invariants
    Validate(InputArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Runs CSV (`instance_id,solver_id,status,time_s[,obj]`) or ASlib `.arff` file
    runs: PathBuf,
    /// Timeout in seconds
    #[arg(long)]
    timeout: f64,
    /// Trajectory CSV (`instance_id,solver_id,t_s,obj`); defaults to `<stem>_trajectories.csv` when present
    #[arg(long)]
    trajectories: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Par,
    Solved,
    Mznc,
    NormRuntime,
    Speedup,
    ClosedGap,
    Ratio,
    Area,
    BoundedReward,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BaseName {
    Par,
    Runtime,
    Area,
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// PAR penalty factor (also used by a `par` closed-gap base)
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
    /// MZNC time-equivalence threshold in seconds
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Lower bound of the bounded reward for unproven solutions
    #[arg(long)]
    alpha: Option<f64>,
    /// Upper bound of the bounded reward for unproven solutions
    #[arg(long)]
    beta: Option<f64>,
    /// Per-instance metric the closed gap is measured in
    #[arg(long, value_enum, default_value_t = BaseName::Par)]
    base: BaseName,
}

impl MetricArgs {
    fn metric(&self, name: MetricName) -> Result<Metric, CliError> {
        let m = match name {
            MetricName::Par => Metric::Par { lambda: self.lambda },
            MetricName::Solved => Metric::Solved,
            MetricName::Mznc => Metric::Mznc { delta: self.delta },
            MetricName::NormRuntime => Metric::NormalizedRuntime,
            MetricName::Speedup => Metric::Speedup,
            MetricName::ClosedGap => Metric::ClosedGap {
                base: match self.base {
                    BaseName::Par => BaseMetric::Par { lambda: self.lambda },
                    BaseName::Runtime => BaseMetric::Runtime,
                    BaseName::Area => BaseMetric::Area,
                },
            },
            MetricName::Ratio => Metric::Ratio,
            MetricName::Area => Metric::Area,
            MetricName::BoundedReward => match (self.alpha, self.beta) {
                (Some(alpha), Some(beta)) => Metric::BoundedReward { alpha, beta },
                _ => return Err(CliError::Input("bounded-reward needs --alpha and --beta".into())),
            },
        };
        m.validate().map_err(input)?;
        Ok(m)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyName {
    Train,
    Test,
    Full,
}

impl From<PolicyName> for SbsPolicy {
    fn from(p: PolicyName) -> Self {
        match p {
            PolicyName::Train => SbsPolicy::TrainSplit,
            PolicyName::Test => SbsPolicy::TestSplit,
            PolicyName::Full => SbsPolicy::FullDataset,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AggName {
    Sum,
    Mean,
    Geomean,
    Median,
}

impl From<AggName> for AggregationMethod {
    fn from(a: AggName) -> Self {
        match a {
            AggName::Sum => AggregationMethod::Sum,
            AggName::Mean => AggregationMethod::ArithmeticMean,
            AggName::Geomean => AggregationMethod::GeometricMean,
            AggName::Median => AggregationMethod::Median,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Metric to compute; repeat for several columns
    #[arg(long = "metric", value_enum, required = true)]
    metrics: Vec<MetricName>,
    #[command(flatten)]
    params: MetricArgs,
    /// Number of cross-validation folds
    #[arg(long)]
    folds: Option<usize>,
    /// Number of repeated fold plans
    #[arg(long, default_value_t = 1, requires = "folds")]
    repeats: usize,
    /// Seed for fold shuffling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance set the single best solver is chosen on (default: train with folds, full without)
    #[arg(long, value_enum)]
    sbs_policy: Option<PolicyName>,
    /// How per-fold scores are merged (default depends on the metric)
    #[arg(long, value_enum)]
    aggregation: Option<AggName>,
    /// Solvers to score (comma separated; default all)
    #[arg(long, value_delimiter = ',')]
    candidates: Option<Vec<String>>,
    /// Solvers the VBS and SBS are built from (comma separated; default all)
    #[arg(long, value_delimiter = ',')]
    portfolio: Option<Vec<String>>,
    /// Gap ratio below which the closed-gap baseline is flagged
    #[arg(long, default_value_t = solvmetric::baselines::DEFAULT_GAP_WARNING)]
    gap_warning: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct RankArgs {
    /// Runs files, one per scenario
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    /// Timeout in seconds: once for all files, or once per file in order
    #[arg(long = "timeout", required = true)]
    timeouts: Vec<f64>,
    #[arg(long, value_enum)]
    metric: MetricName,
    #[command(flatten)]
    params: MetricArgs,
    /// How per-scenario scores are combined (default: mean for par, norm-runtime and speedup, sum otherwise)
    #[arg(long, value_enum)]
    aggregation: Option<AggName>,
    /// Solvers to score (comma separated; default all)
    #[arg(long, value_delimiter = ',')]
    candidates: Option<Vec<String>>,
    /// Solvers the VBS and SBS are built from (comma separated; default all)
    #[arg(long, value_delimiter = ',')]
    portfolio: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct Head2HeadArgs {
    #[command(flatten)]
    input: InputArgs,
    solver_a: String,
    solver_b: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ascending thresholds in seconds, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    deltas: Vec<f64>,
    /// Solvers compared among themselves (comma separated; default all)
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
    /// Report on stderr the threshold from which A stays ahead of B
    #[arg(long, value_delimiter = ',', num_args = 1, value_names = ["A,B"])]
    flip: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Solvers to export (comma separated; default all)
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// JSON archetype spec; the built-in thorough-vs-fast archetype when absent
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances of the built-in archetype
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Overrides the spec's timeout
    #[arg(long)]
    timeout: Option<f64>,
    /// Overrides the spec's share of optimization instances
    #[arg(long)]
    optimization_share: Option<f64>,
    /// Runs CSV to write (stdout when absent); trajectories go next to it
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Score(a) => cmd_score(a, out, err),
        Command::Rank(a) => cmd_rank(a, out, err),
        Command::Head2head(a) => cmd_head2head(a, out, err),
        Command::SweepDelta(a) => cmd_sweep(a, out, err),
        Command::RuntimeDist(a) => cmd_dist(a, out, err),
        Command::Gen(a) => cmd_gen(a, out, err),
        Command::Validate(a) => cmd_validate(a, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(CliError::Internal(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            2
        }
    }
}

fn load_path(path: &Path, timeout: f64, trajectories: Option<&Path>, err: &mut dyn Write) -> Result<Scenario, CliError> {
    let is_arff = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("arff"));
    if is_arff {
        if trajectories.is_some() {
            return Err(CliError::Input("--trajectories cannot be combined with an .arff input".into()));
        }
        let imp = parse_aslib_runs(path, timeout).map_err(input)?;
        for w in &imp.warnings {
            writeln!(err, "warning: {}: {w}", path.display()).map_err(internal)?;
        }
        return Ok(imp.scenario);
    }
    match trajectories {
        None => parse_runs(path, timeout).map_err(input),
        Some(t) => {
            let open = |p: &Path| fs::File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())));
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            read_runs(open(path)?, Some(open(t)?), &id, timeout).map_err(input)
        }
    }
}

fn load(a: &InputArgs, err: &mut dyn Write) -> Result<Scenario, CliError> {
    load_path(&a.runs, a.timeout, a.trajectories.as_deref(), err)
}

fn solver_ids(names: &Option<Vec<String>>) -> Option<Vec<SolverId>> {
    names.as_ref().map(|v| v.iter().map(|s| SolverId::from(s.trim())).collect())
}

fn write_out(out: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    out.write_all(bytes).and_then(|_| out.flush()).map_err(internal)
}

fn cmd_score(a: ScoreArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load(&a.input, err)?;
    let mut seen = Vec::new();
    let mut metrics = Vec::new();
    for name in &a.metrics {
        if seen.contains(name) {
            return Err(CliError::Input(format!("metric {name:?} given more than once")));
        }
        seen.push(*name);
        metrics.push(a.params.metric(*name)?);
    }
    let plan = match a.folds {
        None => None,
        Some(k) => {
            let ids: Vec<InstanceId> = scenario.instances().iter().map(|i| i.id.clone()).collect();
            Some(make_fold_plan(&ids, k, a.repeats, a.seed).map_err(input)?)
        }
    };
    let mut evaluations = Vec::new();
    let mut policy = None;
    for m in metrics {
        let mut cfg = EvalConfig::new(m);
        cfg.fold_plan = plan.clone();
        cfg.sbs_policy = a.sbs_policy.map(Into::into);
        cfg.aggregation = a.aggregation.map(Into::into);
        cfg.candidates = solver_ids(&a.candidates);
        cfg.portfolio = solver_ids(&a.portfolio);
        cfg.gap_warning = a.gap_warning;
        let ev = evaluate(&scenario, &cfg).map_err(input)?;
        if matches!(m, Metric::ClosedGap { .. }) {
            policy = Some(ev.sbs_policy);
        }
        evaluations.push((m, ev));
    }
    let mut prov = Provenance::new(solvmetric::VERSION);
    prov.timeouts_s = vec![scenario.timeout_s()];
    prov.sbs_policy = policy;
    if let Some(p) = &plan {
        prov.seed = Some(p.seed);
        prov.folds = Some(p.k);
        prov.repeats = Some(p.repeats);
    }
    let report = Report::from_evaluations(scenario.id(), &evaluations, prov).map_err(input)?;
    write_out(out, &emit_report(&report, a.format.into()))
}

fn cmd_rank(a: RankArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let timeouts: Vec<f64> = match a.timeouts.len() {
        1 => vec![a.timeouts[0]; a.runs.len()],
        n if n == a.runs.len() => a.timeouts.clone(),
        n => {
            return Err(CliError::Input(format!("got {n} --timeout values for {} runs files", a.runs.len())));
        }
    };
    let metric = a.params.metric(a.metric)?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (path, tau) in a.runs.iter().zip(&timeouts) {
        let scenario = load_path(path, *tau, None, err)?;
        let mut cfg = EvalConfig::new(metric);
        cfg.candidates = solver_ids(&a.candidates);
        cfg.portfolio = solver_ids(&a.portfolio);
        let ev = evaluate(&scenario, &cfg).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        warnings.extend(ev.warnings.iter().map(|w| format!("{}: {w}", scenario.id())));
        rows.push((scenario.id().to_string(), ev.merged));
    }
    let method = a.aggregation.map_or_else(|| default_scenario_aggregation(metric.id()), Into::into);
    let mut prov = Provenance::new(solvmetric::VERSION);
    prov.timeouts_s = timeouts;
    let mut report = Report::from_scenarios("total", rows, method, prov).map_err(input)?;
    report.warnings = warnings;
    write_out(out, &emit_report(&report, a.format.into()))
}

fn cmd_head2head(a: Head2HeadArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load(&a.input, err)?;
    let h = head_to_head(&scenario, &a.solver_a.as_str().into(), &a.solver_b.as_str().into()).map_err(input)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&h).map_err(internal)? + "\n",
        Format::Csv => format!(
            "solver_a,solver_b,a_faster,b_faster,ties\n{},{},{},{},{}\n",
            h.solver_a, h.solver_b, h.a_faster, h.b_faster, h.ties
        ),
        Format::Text => format!(
            "{} faster: {}\n{} faster: {}\nties: {}\n",
            h.solver_a, h.a_faster, h.solver_b, h.b_faster, h.ties
        ),
    };
    write_out(out, text.as_bytes())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load(&a.input, err)?;
    let solvers = solver_ids(&a.solvers).unwrap_or_else(|| scenario.solvers().to_vec());
    let sweep = delta_sweep(&scenario, &solvers, &a.deltas).map_err(input)?;
    let mut text = String::from("delta,solver,score\n");
    for (d, s, v) in sweep.rows() {
        text.push_str(&format!("{d},{s},{v}\n"));
    }
    write_out(out, text.as_bytes())?;
    if let Some(pair) = &a.flip {
        let [x, y] = pair.as_slice() else {
            return Err(CliError::Input("--flip takes exactly two solvers, e.g. --flip A,B".into()));
        };
        let (x, y) = (SolverId::from(x.as_str()), SolverId::from(y.as_str()));
        let flip = mznc_flip_point(&scenario, &solvers, &x, &y).map_err(input)?;
        let msg = match flip {
            Some(d) => format!("{x} stays ahead of {y} for every delta >= {d}"),
            None => format!("{x} is not ahead of {y} at large deltas"),
        };
        writeln!(err, "{msg}").map_err(internal)?;
    }
    Ok(())
}

fn cmd_dist(a: DistArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load(&a.input, err)?;
    let solvers = solver_ids(&a.solvers).unwrap_or_else(|| scenario.solvers().to_vec());
    let mut text = String::from("solver,solved,time_s\n");
    for s in &solvers {
        let times = runtime_distribution(&scenario, s).map_err(input)?;
        for (k, t) in times.iter().enumerate() {
            text.push_str(&format!("{s},{},{t:.3}\n", k + 1));
        }
    }
    write_out(out, text.as_bytes())
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut spec = match &a.spec {
        None => ArchetypeSpec::thorough_vs_fast(a.seed, a.instances),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let mut s: ArchetypeSpec =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            s.seed = a.seed;
            s
        }
    };
    if let Some(t) = a.timeout {
        spec.timeout_s = t;
    }
    if let Some(share) = a.optimization_share {
        spec.optimization_share = share;
    }
    let scenario = generate(&spec).map_err(input)?;
    match &a.output {
        None => {
            let mut buf = Vec::new();
            write_runs(&scenario, &mut buf).map_err(internal)?;
            write_out(out, &buf)?;
            if scenario.has_trajectories() {
                writeln!(err, "warning: trajectories are only written with --output").map_err(internal)?;
            }
        }
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            write_runs(&scenario, file).map_err(internal)?;
            if scenario.has_trajectories() {
                let tp = solvmetric::io::trajectory_path_for(path);
                let file = fs::File::create(&tp).map_err(|e| CliError::Input(format!("{}: {e}", tp.display())))?;
                write_trajectories(&scenario, file).map_err(internal)?;
            }
        }
    }
    Ok(())
}

fn cmd_validate(a: InputArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load(&a, err)?;
    let n_opt = scenario.instances().iter().filter(|i| i.is_optimization()).count();
    let text = format!(
        "ok: {} ({} instances, {} optimization, {} solvers, timeout {} s)\n",
        scenario.id(),
        scenario.n_instances(),
        n_opt,
        scenario.n_solvers(),
        scenario.timeout_s()
    );
    write_out(out, text.as_bytes())
}
