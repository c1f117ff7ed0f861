use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use projsqueeze::domains::spec::{resolve, BodySpec};
use projsqueeze::experiments::{
    self, fmt_f64, Experiment, GapScan, NonconvexDecay, Orbit, StrictLimit, Table, DEFAULT_DISTS,
};
use projsqueeze::metrics::{caratheodory_c, finsler_f, hilbert_distance, integrated_distance};
use projsqueeze::squeezing::optimize_squeeze;
use projsqueeze::{AffinePoint, Error};

#[derive(Parser)]
#[command(name = "projsqueeze", version, about = "Projective metrics and squeezing estimates on convex domains")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Builtin body name or spec file.
    #[arg(long, global = true, default_value = "ball2")]
    body: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optimizer evaluations per squeezing estimate.
    #[arg(long, global = true, default_value_t = 2000)]
    budget: usize,
    /// CSV output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Direction samples for sampled bounds.
    #[arg(long, global = true, default_value_t = 4096)]
    samples: usize,
    /// Replay one row of the CSV at `--out` instead of running everything.
    #[arg(long, global = true)]
    verify: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add a runtime_ms column (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Finsler metrics and distances at given points.
    Metric {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p: AffinePoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        q: Option<AffinePoint>,
        #[arg(long = "X", value_parser = parse_point, allow_hyphen_values = true)]
        x: Option<AffinePoint>,
        /// Print F and C along X.
        #[arg(long = "F")]
        f: bool,
        /// Print the Hilbert and integrated distances between p and q.
        #[arg(long)]
        dist: bool,
        /// Quadrature nodes per panel for the integrated distance.
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Optimized squeezing estimate at a point.
    Squeeze {
        /// Base point (default: the body's interior witness).
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: Option<AffinePoint>,
    },
    /// Seeded experiments writing CSV.
    #[command(subcommand)]
    Exp(Exp),
}

#[derive(Subcommand)]
enum Exp {
    /// Lower bounds over random convex polygons and the empirical floor.
    GapScan {
        #[arg(long, default_value_t = 100)]
        bodies: usize,
        #[arg(long, default_value_t = 25)]
        points: usize,
    },
    /// Upper bound decay toward the reflex vertex of the L-shape.
    NonconvexDecay,
    /// Squeezing along the inward normal at a strictly convex boundary point.
    StrictLimit {
        /// Distances to the boundary, comma separated.
        #[arg(long, value_delimiter = ',')]
        dists: Option<Vec<f64>>,
    },
    /// Orbit of the centre under ball automorphisms and the localized domain.
    Orbit {
        #[arg(long, default_value_t = 12)]
        max_step: u32,
    },
}

fn parse_point(s: &str) -> Result<AffinePoint, String> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    v.map(AffinePoint::from_vec).map_err(|e| format!("expected comma-separated numbers: {e}"))
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e @ Error::Spec { .. })) => {
            eprintln!("error: spec {e}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch) => ExitCode::from(1),
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Metric { p, q, x, f, dist, nodes } => metric(&resolve(&g.body)?, g, p, q.as_ref(), x.as_ref(), *f, *dist, *nodes),
        Command::Squeeze { z } => squeeze(&resolve(&g.body)?, g, z.clone()),
        Command::Exp(exp) => {
            let e: Box<dyn Experiment> = match exp {
                Exp::GapScan { bodies, points } => Box::new(GapScan::new(*bodies, *points, g.budget, g.seed)),
                Exp::NonconvexDecay => Box::new(NonconvexDecay::new(g.samples, g.seed)?),
                Exp::StrictLimit { dists } => {
                    let spec = resolve(&g.body)?;
                    let dists = dists.clone().unwrap_or_else(|| DEFAULT_DISTS.to_vec());
                    Box::new(StrictLimit::new(spec, dists, g.budget, g.seed)?)
                }
                Exp::Orbit { max_step } => Box::new(Orbit::new(2..=*max_step, g.budget, g.seed)?),
            };
            run_experiment(e.as_ref(), g)
        }
    }
}

fn emit(table: &Table, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => table.write_csv(BufWriter::new(File::create(path)?))?,
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn run_experiment(e: &dyn Experiment, g: &Global) -> Result<(), Failure> {
    if let Some(row) = g.verify {
        let path = g.out.as_ref().ok_or_else(|| Error::InvalidBody("--verify needs --out <csv>".into()))?;
        let table = Table::read_csv(File::open(path)?)?;
        let v = experiments::verify(e, &table, row)?;
        if v.ok() {
            println!("row {row}: ok");
            return Ok(());
        }
        for (col, recorded, fresh) in &v.mismatches {
            println!("row {row}: {col}: recorded {recorded}, recomputed {fresh}");
        }
        return Err(Failure::Mismatch);
    }
    emit(&experiments::run(e, g.timing)?, &g.out)
}

#[allow(clippy::too_many_arguments)]
fn metric(
    spec: &BodySpec,
    g: &Global,
    p: &AffinePoint,
    q: Option<&AffinePoint>,
    x: Option<&AffinePoint>,
    want_f: bool,
    want_dist: bool,
    nodes: usize,
) -> Result<(), Failure> {
    let body = &spec.body;
    if !body.contains(p) {
        return Err(Error::PointNotInterior.into());
    }
    let all = !want_f && !want_dist;
    let mut header = vec!["experiment", "spec_hash", "seed"];
    let mut row = vec!["metric".to_string(), spec.hash(), g.seed.to_string()];
    let mut out = io::stdout().lock();
    if let Some(x) = x.filter(|_| want_f || all) {
        let f = finsler_f(body, p, x)?.f;
        let c = caratheodory_c(body, p, x)?;
        writeln!(out, "F = {f}")?;
        writeln!(out, "C = {c}")?;
        header.extend(["F", "C"]);
        row.extend([fmt_f64(f), fmt_f64(c)]);
    }
    if let Some(q) = q.filter(|_| want_dist || all) {
        if body.is_convex() {
            let d = hilbert_distance(body, p, q)?;
            writeln!(out, "hilbert = {d}")?;
            header.push("hilbert");
            row.push(fmt_f64(d));
        }
        let i = integrated_distance(body, p, q, nodes)?;
        writeln!(out, "integrated = {i}")?;
        header.push("integrated");
        row.push(fmt_f64(i));
    }
    if let Some(path) = &g.out {
        let table = Table { header: header.into_iter().map(String::from).collect(), rows: vec![row] };
        table.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn squeeze(spec: &BodySpec, g: &Global, z: Option<AffinePoint>) -> Result<(), Failure> {
    let body = &spec.body;
    let z = z.unwrap_or_else(|| body.interior_point());
    let est = optimize_squeeze(body, &z, g.budget, g.seed)?;
    let mut out = io::stdout().lock();
    writeln!(out, "lower = {}", est.lower)?;
    if let Some(u) = est.upper {
        writeln!(out, "upper = {u}")?;
    }
    writeln!(out, "method = {}", est.method.tag())?;
    writeln!(out, "evaluations = {} of {}", est.evaluations, est.budget)?;
    if let Some(d) = &est.diagnostic {
        writeln!(out, "reason = {d}")?;
    }
    if let Some(w) = &est.witness {
        let c = &w.certificate;
        writeln!(out, "r_in = {}, r_out = {}", w.r_in, w.r_out)?;
        let kind = if c.exact { "exact".to_string() } else { format!("sampled, {} boundary points", c.directions) };
        writeln!(out, "certificate: {kind}")?;
        if let Some(cons) = c.conservative {
            writeln!(out, "conservative ratio = {cons}")?;
        }
        write!(out, "witness map:{}", w.map.matrix())?;
    }
    if let Some(path) = &g.out {
        let cells = [
            "squeeze".to_string(),
            spec.hash(),
            g.seed.to_string(),
            z.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" "),
            fmt_f64(est.lower),
            est.upper.map(fmt_f64).unwrap_or_default(),
            est.method.tag().to_string(),
            est.budget.to_string(),
            est.evaluations.to_string(),
            est.diagnostic.clone().unwrap_or_default(),
        ];
        let header = ["experiment", "spec_hash", "seed", "z", "lower", "upper", "method", "budget", "evaluations", "diagnostic"];
        let table = Table { header: header.map(String::from).to_vec(), rows: vec![cells.to_vec()] };
        table.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}
