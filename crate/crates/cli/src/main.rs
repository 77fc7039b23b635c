//! `bergman`: reproducible experiments on Bergman-type metrics of model
//! domains, with CSV output for sweeps and JSON output for single results.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use bergman_core::criterion::{criterion_sweep, fraction_sup_probe, leading_tuple, norm_identity_residual};
use bergman_core::geodesy::{completeness_probe, distance_upper, DistanceConfig, LengthConfig, ProbeConfig, ProbeMethod};
use bergman_core::green::{hyperconvexity_bound, BoundConfig, DEFAULT_LEVEL, MIN_SAMPLES};
use bergman_core::metrics::{metric_tensors, DEFAULT_FD_STEP};
use bergman_core::report::{random_interior_points, run_report};
use bergman_core::wedge::{is_decomposable, plucker_residual, WedgeJson, WedgeVector};
use bergman_core::{BasisSpec, Domain, KernelSource, MetricKind, Point};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

const MAX_KMAX: usize = 12;
const MAX_FD_STEP: f64 = 0.1;

#[derive(Parser, Debug)]
#[command(name = "bergman", version, about = "Bergman metric experiments on model domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Bergman, Ricci and modified tensors at `--at` (JSON).
    Tensors,
    /// Norm identity residuals at seeded interior points (CSV).
    Identity,
    /// Criterion ratio of the leading basis tuple along an approach sequence (CSV).
    Criterion,
    /// Optimizer bracket of the fraction supremum at `--at` (JSON).
    SupProbe,
    /// Upper bound on the distance from `--at` to `--target` (JSON).
    Distance,
    /// Distances along an approach sequence toward `--target` (CSV).
    Probe,
    /// Green sublevel volumes and the mass bound at a sequence of poles (CSV).
    Green,
    /// Plucker residual of a wedge vector read from `--input` or stdin (JSON).
    Plucker,
    /// Orthonormal basis terms (CSV).
    Basis,
    /// The full acceptance suite with per-check residuals.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum KernelChoice {
    /// Closed form where available, otherwise the truncated series.
    Auto,
    Series,
    Closed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Auto,
    Radial,
    Optimized,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// disc | polydisc:<n> | ball:<n> | annulus:<r> | punctured-disc | custom:<file.json>
    #[arg(long, global = true, default_value = "disc")]
    domain: String,
    /// Number of basis terms m.
    #[arg(long, global = true, default_value_t = 30)]
    basis_size: usize,
    /// Finite-difference step h.
    #[arg(long, global = true, default_value_t = DEFAULT_FD_STEP)]
    fd_step: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Path segments for distance optimization.
    #[arg(long, global = true, default_value_t = 16)]
    segments: usize,
    /// Descent iterations for distance optimization.
    #[arg(long, global = true, default_value_t = 200)]
    iters: usize,
    /// Length of the approach sequence.
    #[arg(long, global = true, default_value_t = 6)]
    kmax: usize,
    #[arg(long, global = true, default_value = "tilde")]
    metric: MetricKind,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Interior point, coordinates separated by commas (e.g. `0.3,0.1-0.2i`).
    #[arg(long, global = true)]
    at: Option<String>,
    /// Boundary target for sweeps, interior endpoint for `distance`.
    #[arg(long, global = true)]
    target: Option<String>,
    #[arg(long, global = true, value_enum)]
    kernel: Option<KernelChoice>,
    /// Number of seeded points for `identity`.
    #[arg(long, global = true, default_value_t = 100)]
    points: usize,
    /// Random restarts for `sup-probe`.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    /// Monte Carlo samples per estimate for `green`.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    /// Sublevel for `green`.
    #[arg(long, global = true, default_value_t = DEFAULT_LEVEL, allow_negative_numbers = true)]
    level: f64,
    #[arg(long, global = true, value_enum, default_value = "auto")]
    method: Method,
    /// Coordinate map for `plucker`.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Decomposability tolerance for `plucker`.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
}

enum Failure {
    Usage(String),
    Numerical(bergman_core::Error),
    Io(String),
    Checks(Vec<usize>),
}

impl From<bergman_core::Error> for Failure {
    fn from(e: bergman_core::Error) -> Self {
        Failure::Numerical(e)
    }
}

/// Validated configuration shared by all commands.
struct RunConfig {
    args: RunArgs,
    domain: Domain,
    format: Format,
}

/// Tabular output.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(k) => json!(k),
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

enum Output {
    Table(Table),
    Json(Value),
    /// Pre-rendered CSV body including its column row.
    Csv(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(failure) => {
            let diag = match failure {
                Failure::Numerical(e) => json!({
                    "status": "numerical-failure",
                    "kind": variant_name(&e),
                    "message": e.to_string(),
                }),
                Failure::Io(msg) => json!({ "status": "io-failure", "message": msg }),
                Failure::Checks(ids) => json!({
                    "status": "check-failure",
                    "failed_checks": ids,
                }),
                Failure::Usage(_) => unreachable!(),
            };
            eprintln!("{diag}");
            ExitCode::from(3)
        }
    }
}

fn variant_name(e: &bergman_core::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn run(command: Command, args: RunArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new(command, args)?;
    let output = match command {
        Command::Tensors => tensors(&cfg)?,
        Command::Identity => identity(&cfg)?,
        Command::Criterion => criterion(&cfg)?,
        Command::SupProbe => sup_probe(&cfg)?,
        Command::Distance => distance(&cfg)?,
        Command::Probe => probe(&cfg)?,
        Command::Green => green(&cfg)?,
        Command::Plucker => plucker(&cfg)?,
        Command::Basis => Output::Csv(BasisSpec::build(&cfg.domain, cfg.args.basis_size)?.to_csv()),
        Command::Report => return report(&cfg),
    };
    cfg.emit(command, output)
}

impl RunConfig {
    fn new(command: Command, args: RunArgs) -> Result<Self, Failure> {
        let domain = parse_domain(&args.domain)?;
        let n = domain.dim();
        if args.basis_size < n + 1 {
            return Err(Failure::Usage(format!("--basis-size must be at least n+1 = {}", n + 1)));
        }
        if args.fd_step <= 0.0 || !(..=MAX_FD_STEP).contains(&args.fd_step) {
            return Err(Failure::Usage(format!("--fd-step must lie in (0, {MAX_FD_STEP}]")));
        }
        if args.kmax == 0 || args.kmax > MAX_KMAX {
            return Err(Failure::Usage(format!("--kmax must lie in 1..={MAX_KMAX}")));
        }
        if args.segments == 0 || args.points == 0 || args.restarts == 0 {
            return Err(Failure::Usage("--segments, --points and --restarts must be positive".into()));
        }
        if args.samples < MIN_SAMPLES {
            return Err(Failure::Usage(format!("--samples must be at least {MIN_SAMPLES}")));
        }
        if !(..0.0).contains(&args.level) || args.tol.is_nan() || args.tol <= 0.0 {
            return Err(Failure::Usage("--level must be negative and --tol positive".into()));
        }
        let json_only = matches!(command, Command::Tensors | Command::SupProbe | Command::Distance | Command::Plucker);
        let csv_only = command == Command::Basis;
        let format = match (args.format, json_only) {
            (Some(Format::Csv), true) => {
                return Err(Failure::Usage("this command emits JSON only".into()));
            }
            (Some(Format::Json), _) if csv_only => {
                return Err(Failure::Usage("this command emits CSV only".into()));
            }
            (Some(f), _) => f,
            (None, true) => Format::Json,
            (None, false) => Format::Csv,
        };
        Ok(RunConfig { args, domain, format })
    }

    fn source(&self, default: KernelChoice) -> Result<KernelSource, Failure> {
        let m = self.args.basis_size;
        Ok(match self.args.kernel.unwrap_or(default) {
            KernelChoice::Auto => KernelSource::preferred(&self.domain, m)?,
            KernelChoice::Series => KernelSource::Series(BasisSpec::build(&self.domain, m)?),
            KernelChoice::Closed => KernelSource::ClosedForm(self.domain.clone()),
        })
    }

    fn point(&self, raw: &Option<String>, flag: &str) -> Result<Option<Point>, Failure> {
        raw.as_deref()
            .map(|s| Point::parse(s).map_err(|e| Failure::Usage(format!("{flag}: {e}"))))
            .transpose()
    }

    /// `--at`, or a fixed interior point of the domain.
    fn at(&self) -> Result<Point, Failure> {
        Ok(self.point(&self.args.at, "--at")?.unwrap_or_else(|| default_interior(&self.domain)))
    }

    /// `--target`, or the boundary point `(1, 0, ..., 0)`.
    fn boundary_target(&self) -> Result<Point, Failure> {
        Ok(self.point(&self.args.target, "--target")?.unwrap_or_else(|| {
            let mut p = Point::origin(self.domain.dim());
            p.0[0] = Complex64::new(1.0, 0.0);
            p
        }))
    }

    fn length(&self) -> LengthConfig {
        LengthConfig { fd_step: self.args.fd_step, ..LengthConfig::default() }
    }

    fn distance(&self) -> DistanceConfig {
        DistanceConfig {
            segments: self.args.segments,
            iters: self.args.iters,
            seed: self.args.seed,
            length: self.length(),
        }
    }

    /// The resolved configuration, in a fixed key order.
    fn header(&self, command: Command) -> BTreeMap<&'static str, String> {
        let a = &self.args;
        let mut h = BTreeMap::new();
        h.insert("command", command_name(command).to_string());
        h.insert("domain", self.domain.to_string());
        h.insert("basis_size", a.basis_size.to_string());
        h.insert("fd_step", format!("{:e}", a.fd_step));
        h.insert("seed", a.seed.to_string());
        h.insert("units", units(command).to_string());
        let mut put = |k: &'static str, v: String| {
            h.insert(k, v);
        };
        match command {
            Command::Tensors => put("kernel", kernel_name(a.kernel, KernelChoice::Auto)),
            Command::Identity => put("points", a.points.to_string()),
            _ => {}
        }
        if matches!(command, Command::Identity | Command::Criterion | Command::Distance | Command::Probe | Command::Green) {
            let default = if command == Command::Identity { KernelChoice::Series } else { KernelChoice::Auto };
            put("kernel", kernel_name(a.kernel, default));
        }
        if matches!(command, Command::Criterion | Command::Probe | Command::Green) {
            put("kmax", a.kmax.to_string());
        }
        if matches!(command, Command::Distance | Command::Probe) {
            put("metric", a.metric.to_string());
            put("segments", a.segments.to_string());
            put("iters", a.iters.to_string());
        }
        match command {
            Command::Probe => put("method", format!("{:?}", a.method).to_lowercase()),
            Command::SupProbe => put("restarts", a.restarts.to_string()),
            Command::Green => {
                put("samples", a.samples.to_string());
                put("level", format!("{:e}", a.level));
            }
            Command::Plucker => put("tol", format!("{:e}", a.tol)),
            _ => {}
        }
        if let Some(at) = &a.at {
            put("at", at.clone());
        }
        if let Some(t) = &a.target {
            put("target", t.clone());
        }
        h
    }

    fn render(&self, command: Command, output: Output) -> String {
        let header = self.header(command);
        match (self.format, output) {
            (Format::Json, Output::Json(result)) => {
                let doc = json!({ "header": header, "result": result });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
            }
            (Format::Json, Output::Table(t)) => {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                    .collect();
                let doc = json!({ "header": header, "rows": rows });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
            }
            (Format::Csv, body) => {
                let line: Vec<String> = header
                    .iter()
                    .map(|(k, v)| if v.contains([' ', '"']) { format!("{k}={v:?}") } else { format!("{k}={v}") })
                    .collect();
                let mut out = format!("# {}\n", line.join(" "));
                match body {
                    Output::Csv(s) => out.push_str(&s),
                    Output::Table(t) => {
                        out.push_str(&t.columns.join(","));
                        out.push('\n');
                        for r in &t.rows {
                            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
                            out.push_str(&cells.join(","));
                            out.push('\n');
                        }
                    }
                    Output::Json(_) => unreachable!("JSON-only commands reject --format csv"),
                }
                out
            }
            (Format::Json, Output::Csv(_)) => unreachable!("CSV-only commands reject --format json"),
        }
    }

    fn emit(&self, command: Command, output: Output) -> Result<(), Failure> {
        let text = self.render(command, output);
        match &self.args.out {
            Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{path}: {e}"))),
            None => io::stdout().lock().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
        }
    }
}

fn parse_domain(s: &str) -> Result<Domain, Failure> {
    if let Some(path) = s.strip_prefix("custom:") {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--domain {path}: {e}")))?;
        return Domain::custom_from_json(&text).map_err(|e| Failure::Usage(e.to_string()));
    }
    s.parse().map_err(|e: bergman_core::Error| Failure::Usage(e.to_string()))
}

fn default_interior(domain: &Domain) -> Point {
    match domain.geometry() {
        Domain::PuncturedDisc => Point::real(0.5),
        Domain::Annulus { inner_radius } => Point::real((1.0 + inner_radius) / 2.0),
        d => Point::origin(d.dim()),
    }
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Tensors => "tensors",
        Command::Identity => "identity",
        Command::Criterion => "criterion",
        Command::SupProbe => "sup-probe",
        Command::Distance => "distance",
        Command::Probe => "probe",
        Command::Green => "green",
        Command::Plucker => "plucker",
        Command::Basis => "basis",
        Command::Report => "report",
    }
}

fn units(c: Command) -> &'static str {
    match c {
        Command::Tensors => "coefficients in dz_i dzbar_j",
        Command::Identity => "relative residual",
        Command::Criterion => "kernel units; boundary_distance euclidean",
        Command::SupProbe => "kernel units",
        Command::Distance | Command::Probe => "metric length; eps euclidean",
        Command::Green => "lebesgue volume; pole_modulus euclidean",
        Command::Plucker => "coordinate units squared",
        Command::Basis => "normalization of z^alpha",
        Command::Report => "per-check residual and tolerance",
    }
}

fn kernel_name(choice: Option<KernelChoice>, default: KernelChoice) -> String {
    format!("{:?}", choice.unwrap_or(default)).to_lowercase()
}

fn coordinate_columns(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).flat_map(|i| [format!("{prefix}{i}_re"), format!("{prefix}{i}_im")]).collect()
}

fn coordinate_cells(p: &Point) -> Vec<Cell> {
    p.0.iter().flat_map(|c| [Cell::Num(c.re), Cell::Num(c.im)]).collect()
}

fn tensors(cfg: &RunConfig) -> Result<Output, Failure> {
    let src = cfg.source(KernelChoice::Auto)?;
    let z = cfg.at()?;
    let t = metric_tensors(&src, &z, cfg.args.fd_step)?;
    Ok(Output::Json(json!({
        "at": z.to_string(),
        "T": t.bergman,
        "Ric": t.ricci,
        "Ttilde": t.tilde,
        "eigenvalues": {
            "T": t.bergman.eigenvalues(),
            "Ric": t.ricci.eigenvalues(),
            "Ttilde": t.tilde.eigenvalues(),
        },
    })))
}

fn identity(cfg: &RunConfig) -> Result<Output, Failure> {
    let src = cfg.source(KernelChoice::Series)?;
    let points = random_interior_points(&cfg.domain, cfg.args.points, cfg.args.seed, 1e-3)?;
    let n = cfg.domain.dim();
    let mut columns = vec!["index".to_string()];
    columns.extend(coordinate_columns("z", n));
    columns.extend(["boundary_distance".into(), "residual".into()]);
    let rows = points
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let mut row = vec![Cell::Int(i)];
            row.extend(coordinate_cells(z));
            row.push(Cell::Num(cfg.domain.boundary_distance(z)?));
            row.push(Cell::Num(norm_identity_residual(&src, z)?));
            Ok(row)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Output::Table(Table { columns, rows }))
}

fn criterion(cfg: &RunConfig) -> Result<Output, Failure> {
    let src = cfg.source(KernelChoice::Auto)?;
    let basis = BasisSpec::build(&cfg.domain, cfg.args.basis_size)?;
    let fs = leading_tuple(&basis);
    let sweep = criterion_sweep(&src, &basis, &fs, &cfg.boundary_target()?, cfg.args.kmax)?;
    let columns = ["k", "boundary_distance", "numerator", "gram", "denominator", "ratio"];
    let rows = sweep
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.k),
                Cell::Num(r.boundary_distance),
                Cell::Num(r.report.numerator),
                Cell::Num(r.report.gram),
                Cell::Num(r.report.denominator),
                Cell::Num(r.report.ratio),
            ]
        })
        .collect();
    Ok(Output::Table(Table { columns: columns.map(String::from).to_vec(), rows }))
}

fn sup_probe(cfg: &RunConfig) -> Result<Output, Failure> {
    let basis = BasisSpec::build(&cfg.domain, cfg.args.basis_size)?;
    let z = cfg.at()?;
    let p = fraction_sup_probe(&basis, &z, cfg.args.restarts, cfg.args.seed)?;
    Ok(Output::Json(json!({
        "at": z.to_string(),
        "best": p.best,
        "target": p.target,
        "dual": p.dual,
        "restarts": p.restarts,
        "best_over_target": p.best / p.target,
    })))
}

fn distance(cfg: &RunConfig) -> Result<Output, Failure> {
    let src = cfg.source(KernelChoice::Auto)?;
    let a = cfg.at()?;
    let b = cfg
        .point(&cfg.args.target, "--target")?
        .ok_or_else(|| Failure::Usage("distance needs --target".into()))?;
    let est = distance_upper(&src, cfg.args.metric, &a, &b, &cfg.distance())?;
    let nodes: Vec<String> = est.path.nodes().iter().map(Point::to_string).collect();
    Ok(Output::Json(json!({
        "from": a.to_string(),
        "to": b.to_string(),
        "distance": est.distance,
        "straight": est.straight,
        "accepted_steps": est.accepted_steps,
        "history": est.history,
        "path": nodes,
    })))
}

fn probe(cfg: &RunConfig) -> Result<Output, Failure> {
    let src = cfg.source(KernelChoice::Auto)?;
    let pcfg = ProbeConfig {
        anchor: cfg.point(&cfg.args.at, "--at")?,
        method: match cfg.args.method {
            Method::Auto => ProbeMethod::Auto,
            Method::Radial => ProbeMethod::Radial,
            Method::Optimized => ProbeMethod::Optimized,
        },
        distance: cfg.distance(),
    };
    let res = completeness_probe(&src, cfg.args.metric, &cfg.boundary_target()?, cfg.args.kmax, &pcfg)?;
    let columns = ["k", "eps", "distance", "slope_fit"];
    let rows = res
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.k),
                Cell::Num(r.boundary_distance),
                Cell::Num(r.distance_estimate),
                r.slope_fit.map_or(Cell::Empty, Cell::Num),
            ]
        })
        .collect();
    Ok(Output::Table(Table { columns: columns.map(String::from).to_vec(), rows }))
}

fn green(cfg: &RunConfig) -> Result<Output, Failure> {
    let src = cfg.source(KernelChoice::Auto)?;
    let basis = BasisSpec::build(&cfg.domain, cfg.args.basis_size)?;
    let fs = leading_tuple(&basis);
    let mut poles = vec![default_interior(&cfg.domain)];
    poles.extend(cfg.domain.approach_sequence(&cfg.boundary_target()?, cfg.args.kmax)?);
    let bcfg = BoundConfig { level: cfg.args.level, samples: cfg.args.samples, seed: cfg.args.seed };
    let rows = hyperconvexity_bound(&src, &basis, &fs, &poles, &bcfg)?;
    let columns = ["pole_modulus", "volume", "stderr", "bound", "ratio", "bound_stderr", "dominated"];
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Num(r.pole.norm_sqr().sqrt()),
                Cell::Num(r.volume.value),
                Cell::Num(r.volume.stderr),
                Cell::Num(r.bound),
                Cell::Num(r.ratio),
                Cell::Num(r.bound_stderr),
                Cell::Text(r.dominated.to_string()),
            ]
        })
        .collect();
    Ok(Output::Table(Table { columns: columns.map(String::from).to_vec(), rows }))
}

fn plucker(cfg: &RunConfig) -> Result<Output, Failure> {
    let text = match &cfg.args.input {
        Some(path) => fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--input {path}: {e}")))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(e.to_string()))?;
            s
        }
    };
    let parsed: WedgeJson =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("coordinate map: {e}")))?;
    let u = WedgeVector::try_from(parsed)?;
    let residual = plucker_residual(&u)?;
    Ok(Output::Json(json!({
        "degree": u.degree(),
        "ambient": u.ambient(),
        "support": u.coords().count(),
        "norm_sqr": u.norm_sqr(),
        "residual": residual,
        "decomposable": is_decomposable(&u, cfg.args.tol)?,
    })))
}

fn report(cfg: &RunConfig) -> Result<(), Failure> {
    let outcomes = run_report(cfg.args.seed);
    let columns = ["id", "status", "name", "residual", "tolerance", "detail"];
    let rows = outcomes
        .iter()
        .map(|o| {
            vec![
                Cell::Int(o.id),
                Cell::Text(if o.passed { "PASS" } else { "FAIL" }.into()),
                Cell::Text(o.name.into()),
                Cell::Num(o.residual),
                Cell::Num(o.tolerance),
                Cell::Text(o.detail.clone()),
            ]
        })
        .collect();
    cfg.emit(Command::Report, Output::Table(Table { columns: columns.map(String::from).to_vec(), rows }))?;
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}
