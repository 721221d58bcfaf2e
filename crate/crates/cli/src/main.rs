use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use friedrichs_lab::hajlasz::{minimal_upper_gradient, seminorm, BoundaryTrace, LpOptions, Objective};
use friedrichs_lab::hardy::templates::parse_problem;
use friedrichs_lab::hardy::{best_constant_lower_with, refine_study, OptimizeOptions};
use friedrichs_lab::harness::{
    corpus_run, default_specs, resolve_domain, sharp_constant_check, CorpusConfig, FunctionSource, InequalitySpec, DEFAULT_DOMAINS,
    DEFAULT_SPATIAL_DOMAINS,
};
use friedrichs_lab::measure::{rearrange, RearrangementProfile, SampledFunction, SampledMeasureSpace};
use friedrichs_lab::potential::{check_pointwise, parse_trial, PointwiseConfig, PointwiseOrder, TrialFunction};
use friedrichs_lab::ri_norms::{norm_eval, NormSpec};
use friedrichs_lab::{Error, Execution, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Numerical laboratory for Friedrichs-type and Sobolev-type inequalities.
#[derive(Parser, Debug)]
#[command(name = "friedrichs-lab", version, arg_required_else_help = true)]
struct Cli {
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true, env = "FRIEDRICHS_LAB_THREADS")]
    threads: Option<usize>,

    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    dry_run: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Decreasing rearrangement of values sampled on a measure space.
    Rearrange(RearrangeArgs),
    /// Evaluate a rearrangement-invariant norm of a step profile.
    Norm(NormArgs),
    /// Lower estimate of a Hardy-type operator norm.
    Hardy(HardyArgs),
    /// First boundary hit of a ray.
    Raycast(RaycastArgs),
    /// Minimal upper gradient of a boundary trace.
    Hajlasz(HajlaszArgs),
    /// Empirical constant of a pointwise potential estimate.
    CheckPointwise(PointwiseArgs),
    /// Evaluate inequalities over domains and trial functions.
    CheckInequality(InequalityArgs),
    /// Ratio against the sharp isoperimetric constant on a ball.
    SharpConst(SharpArgs),
    /// Summarize a report.json written by check-inequality.
    Report(ReportArgs),
}

#[derive(Args, Debug, Serialize)]
struct RearrangeArgs {
    /// Atoms, one per line: `id,weight[,x,y[,z]]`.
    #[arg(long)]
    space: PathBuf,
    /// One value per line, in atom order.
    #[arg(long)]
    values: PathBuf,
    /// Profile CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct NormArgs {
    /// `Lp(p)`, `Lorentz(p,sigma)`, `LZ(p,sigma,theta)`, `expL(gamma)` or `Linf`.
    #[arg(long)]
    spec: String,
    /// Profile CSV with columns `t_break,value`.
    #[arg(long)]
    profile: PathBuf,
    /// Measure of the underlying space for LZ and exp norms.
    #[arg(long)]
    mass: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct HardyArgs {
    /// Problem file of `key = value` lines.
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run a refinement study with this many levels instead of one estimate.
    #[arg(long)]
    levels: Option<usize>,
    /// Coarsest grid of the refinement study.
    #[arg(long, default_value_t = 64)]
    base_grid: usize,
    /// CSV `level,grid,estimate` for refinement studies.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RaycastArgs {
    #[arg(long)]
    domain: String,
    /// Origin `x,y[,z]`.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Direction `a,b[,c]`; normalized before casting.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
}

#[derive(Args, Debug, Serialize)]
struct HajlaszArgs {
    /// CSV with header `x,y[,z],value[,weight]`.
    #[arg(long)]
    trace: PathBuf,
    /// `sup` or `int`.
    #[arg(long, default_value = "sup")]
    objective: String,
    /// Also report the induced seminorm in this norm.
    #[arg(long)]
    normspec: Option<String>,
    /// Destination of the gradient CSV.
    #[arg(long, default_value = "g.csv")]
    out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    budget: usize,
}

#[derive(Args, Debug, Serialize)]
struct PointwiseArgs {
    /// `first`, `second-u`, `second-grad` or `symmetric`.
    #[arg(long)]
    order: String,
    #[arg(long, default_value = "builtin:square")]
    domain: String,
    /// Trial function `family:params`.
    #[arg(long)]
    u: String,
    /// Interior spacing; defaults to diam/32.
    #[arg(long)]
    h: Option<f64>,
    /// Angular resolution of the visibility integrals.
    #[arg(long, default_value_t = 64)]
    mdirs: usize,
    /// Number of resolutions, each halving h and doubling mdirs.
    #[arg(long, default_value_t = 2)]
    levels: usize,
    #[arg(long, default_value_t = 48)]
    max_eval: usize,
}

#[derive(Args, Debug, Serialize)]
struct InequalityArgs {
    /// TOML inequality spec; every built-in spec when absent.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Repeatable; builtin name or domain file.
    #[arg(long)]
    domain: Vec<String>,
    /// `default` for the seeded corpus or a file of `label = family:params` lines.
    #[arg(long, default_value = "default")]
    corpus: String,
    /// Single trial function; overrides the corpus.
    #[arg(long)]
    u: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interior spacing is diam/cells unless the spec sets h.
    #[arg(long, default_value_t = 32)]
    cells: usize,
    /// Directory receiving report.json and report.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Plot-ready `case,ratio` CSV.
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SharpArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long = "R", default_value_t = 1.0)]
    radius: f64,
    /// Polygon vertices (n = 2) or voxels per radius (n = 3).
    #[arg(long, default_value_t = 512)]
    mesh: usize,
    #[arg(long, default_value = "const:1")]
    u: String,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    #[arg(long, default_value = "report.json")]
    input: PathBuf,
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    eprint!("{}", e.render());
                    ExitCode::from(1)
                }
                _ => {
                    eprint!("error_code=usage {}", e.render());
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error_code={} {e}", e.code());
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let exec = configure_threads(cli.threads)?;
    if cli.dry_run {
        let mut cfg = serde_json::to_value(&cli.command).map_err(|e| Error::Internal(e.to_string()))?;
        cfg["threads"] = json!(cli.threads);
        cfg["execution"] = json!(if exec.is_parallel() { "parallel" } else { "sequential" });
        if let Command::CheckInequality(a) = &cli.command {
            cfg["specs"] = serde_json::to_value(inequality_specs(a)?).map_err(|e| Error::Internal(e.to_string()))?;
        }
        return print_json(&cfg);
    }
    match cli.command {
        Command::Rearrange(a) => cmd_rearrange(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Hardy(a) => cmd_hardy(a, exec),
        Command::Raycast(a) => cmd_raycast(a),
        Command::Hajlasz(a) => cmd_hajlasz(a, exec),
        Command::CheckPointwise(a) => cmd_pointwise(a, exec),
        Command::CheckInequality(a) => cmd_inequality(a, exec),
        Command::SharpConst(a) => cmd_sharp(a, exec),
        Command::Report(a) => cmd_report(a),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<Execution> {
    match threads {
        Some(0) => Err(Error::InvalidInput("--threads must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Internal(e.to_string()))?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if !path.is_file() {
        return Err(Error::InvalidInput(format!("{} does not exist", path.display())));
    }
    Ok(fs::read_to_string(path)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
    match writeln!(io::stdout().lock(), "{s}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn parse_point(s: &str, what: &str) -> Result<[f64; 3]> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad {what} component `{x}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    match v[..] {
        [a, b] => Ok([a, b, 0.0]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::Parse(format!("{what} needs 2 or 3 components, got `{s}`"))),
    }
}

fn cmd_rearrange(a: RearrangeArgs) -> Result<()> {
    let space = SampledMeasureSpace::read_text(read_input(&a.space)?.as_bytes())?;
    let values = read_input(&a.values)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<f64>().map_err(|e| Error::Parse(format!("bad value `{l}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let prof = rearrange(&SampledFunction::new(&space, values)?)?;
    match a.out {
        Some(p) => prof.write_csv(create(&p)?),
        None => prof.write_csv(io::stdout().lock()),
    }
}

fn cmd_norm(a: NormArgs) -> Result<()> {
    let mut spec: NormSpec = a.spec.parse()?;
    if let Some(m) = a.mass {
        spec = spec.with_mass(m);
    }
    let prof = RearrangementProfile::read_csv(read_input(&a.profile)?.as_bytes())?;
    let value = norm_eval(&spec, &prof)?;
    print_json(&json!({ "spec": spec.to_string(), "norm": value }))
}

fn cmd_hardy(a: HardyArgs, exec: Execution) -> Result<()> {
    let problem = parse_problem(&read_input(&a.problem)?)?;
    let opts = OptimizeOptions { restarts: a.restarts, seed: a.seed, exec, ..Default::default() };
    match a.levels {
        Some(levels) => {
            let study = refine_study(&problem, levels, a.base_grid, &opts)?;
            if let Some(p) = &a.out {
                study.write_csv(create(p)?)?;
            }
            print_json(&study)
        }
        None => print_json(&best_constant_lower_with(&problem, a.grid, &opts, None)?),
    }
}

fn cmd_raycast(a: RaycastArgs) -> Result<()> {
    let d = resolve_domain(&a.domain)?;
    let x = parse_point(&a.x, "origin")?;
    let mut th = parse_point(&a.theta, "direction")?;
    let len = th.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    th.iter_mut().for_each(|c| *c /= len);
    let hit = d.ray_first_hit(x, th)?;
    print_json(&json!({ "origin": x, "direction": th, "hit": hit }))
}

fn cmd_hajlasz(a: HajlaszArgs, exec: Execution) -> Result<()> {
    let objective: Objective = a.objective.parse()?;
    let normspec = a.normspec.as_deref().map(str::parse::<NormSpec>).transpose()?;
    let tr = BoundaryTrace::read_csv(read_input(&a.trace)?.as_bytes())?;
    let opts = LpOptions { budget: a.budget, exec, ..Default::default() };
    let ug = minimal_upper_gradient(&tr, objective, &opts)?;
    let mut w = create(&a.out)?;
    writeln!(w, "x,y,z,g")?;
    for (p, g) in tr.points().iter().zip(&ug.g) {
        writeln!(w, "{},{},{},{}", p[0], p[1], p[2], g)?;
    }
    w.flush()?;
    let mut out = json!({
        "objective": ug.objective,
        "value": ug.value,
        "min_slack": ug.min_slack,
        "constraints": ug.constraints,
        "rounds": ug.rounds,
        "samples": tr.len(),
    });
    if let Some(spec) = normspec {
        out["seminorm"] = serde_json::to_value(seminorm(&tr, &spec, &opts)?).map_err(|e| Error::Internal(e.to_string()))?;
    }
    print_json(&out)
}

fn cmd_pointwise(a: PointwiseArgs, exec: Execution) -> Result<()> {
    let order: PointwiseOrder = a.order.parse()?;
    let d = resolve_domain(&a.domain)?;
    let u = parse_trial(&a.u)?;
    if a.levels == 0 || a.mdirs == 0 {
        return Err(Error::InvalidInput("--levels and --mdirs must be positive".into()));
    }
    let base = PointwiseConfig { max_eval: a.max_eval, exec, ..PointwiseConfig::new(a.h.unwrap_or(d.diameter() / 32.0), a.mdirs) };
    let reports = (0..a.levels).map(|k| check_pointwise(order, &u, &d, &base.refined(1 << k))).collect::<Result<Vec<_>>>()?;
    let c: Vec<f64> = reports.iter().map(|r| r.c_emp).collect();
    let drift = match c[..] {
        [.., a, b] if a > 0.0 => Some((b - a).abs() / a),
        _ => None,
    };
    let table: Vec<Value> =
        reports.iter().map(|r| json!({ "h": r.h, "directions": r.directions, "c_emp": r.c_emp, "evaluated": r.evaluated })).collect();
    print_json(&json!({
        "order": order,
        "domain": a.domain,
        "function": u.to_string(),
        "c_emp": c.last(),
        "drift": drift,
        "refinement": table,
        "reports": reports,
    }))
}

fn inequality_specs(a: &InequalityArgs) -> Result<Vec<InequalitySpec>> {
    match &a.spec {
        Some(p) => Ok(vec![InequalitySpec::parse(&read_input(p)?)?]),
        None => Ok(default_specs()),
    }
}

fn corpus_file(text: &str) -> Result<Vec<(String, TrialFunction)>> {
    let mut out = Vec::new();
    for line in text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()) {
        let (label, desc) = match line.split_once('=') {
            Some((l, d)) => (l.trim().to_string(), d.trim()),
            None => (line.to_string(), line),
        };
        out.push((label, parse_trial(desc)?));
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("corpus file lists no functions".into()));
    }
    Ok(out)
}

fn cmd_inequality(a: InequalityArgs, exec: Execution) -> Result<()> {
    let specs = inequality_specs(&a)?;
    let domains = if !a.domain.is_empty() {
        a.domain.clone()
    } else if let Some(d) = specs.iter().find_map(|s| s.domain.clone()).filter(|_| specs.len() == 1) {
        vec![d]
    } else {
        DEFAULT_DOMAINS.iter().chain(&DEFAULT_SPATIAL_DOMAINS).map(|s| s.to_string()).collect()
    };
    let functions = match (&a.u, a.corpus.as_str()) {
        (Some(u), _) => FunctionSource::Explicit(vec![(u.clone(), parse_trial(u)?)]),
        (None, "default") => FunctionSource::Default,
        (None, file) => FunctionSource::Explicit(corpus_file(&read_input(Path::new(file))?)?),
    };
    let cfg = CorpusConfig { domains, specs, functions, seed: a.seed, cells: a.cells, exec };
    let report = corpus_run(&cfg)?;
    fs::create_dir_all(&a.out_dir)?;
    let mut json_out = create(&a.out_dir.join("report.json"))?;
    json_out.write_all(report.to_json()?.as_bytes())?;
    json_out.write_all(b"\n")?;
    json_out.flush()?;
    report.write_csv(create(&a.out_dir.join("report.csv"))?)?;
    if let Some(p) = &a.emit_plot {
        report.write_ratios_csv(create(p)?)?;
    }
    print_json(&report.summary)
}

fn cmd_sharp(a: SharpArgs, exec: Execution) -> Result<()> {
    let u = parse_trial(&a.u)?;
    print_json(&sharp_constant_check(a.n, a.radius, a.mesh, &u, exec)?)
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let v: Value = serde_json::from_str(&read_input(&a.input)?).map_err(|e| Error::Parse(format!("{}: {e}", a.input.display())))?;
    let cases = v["cases"].as_array().ok_or_else(|| Error::Parse("report has no `cases` array".into()))?;
    let ratio = |c: &Value| c["report"]["ratio"].as_f64();
    let mut rows: std::collections::BTreeMap<String, (usize, usize, usize, Option<f64>)> = Default::default();
    for c in cases {
        let e = rows.entry(c["theorem"].as_str().unwrap_or("?").to_string()).or_default();
        e.0 += 1;
        if c["report"].is_null() {
            e.1 += 1;
        } else if c["report"]["degenerate"].as_bool() == Some(true) {
            e.2 += 1;
        }
        if let Some(r) = ratio(c) {
            e.3 = Some(e.3.map_or(r, |m: f64| m.max(r)));
        }
    }
    let mut out = io::stdout().lock();
    writeln!(out, "{:<14} {:>6} {:>7} {:>11} {:>14}", "theorem", "cases", "failed", "degenerate", "max ratio")?;
    for (th, (n, f, g, m)) in &rows {
        let m = m.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into());
        writeln!(out, "{th:<14} {n:>6} {f:>7} {g:>11} {m:>14}")?;
    }
    if let Some(p) = &a.emit_plot {
        let mut w = create(p)?;
        writeln!(w, "case,ratio")?;
        for c in cases {
            let r = ratio(c).map(|x| x.to_string()).unwrap_or_default();
            writeln!(w, "{},{}", c["case"].as_str().unwrap_or(""), r)?;
        }
        w.flush()?;
    }
    Ok(())
}
