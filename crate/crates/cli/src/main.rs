//! Command-line driver: dataset generation, the three learners, model
//! evaluation, bound calculators, geometry verification suites, the
//! dimension-sweep benchmark, graph reductions, and LP solving.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use polytope_margin::bounds;
use polytope_margin::envelope::{
    hausdorff_speed_profile, no_reenter_check, verify_inner_identity,
    verify_margin_in_envelope, ExpandingPolytope,
};
use polytope_margin::hardness::graph_to_instance;
use polytope_margin::harness::{
    evaluate, generate_instance, heuristic_learn, run_fig3, ExperimentConfig,
};
use polytope_margin::io;
use polytope_margin::learner::{
    build_candidates, enumerate_t_polytope, greedy_polytope, LearnerConfig,
};
use polytope_margin::lp::{
    lp_solve_default, lp_strict_solve_default, LpStatus, StrictLp, DEFAULT_ORACLE_BUDGET,
};
use polytope_margin::sampling::{sample_unit_ball, sample_unit_sphere};
use polytope_margin::{Error, RngSeed};

#[derive(Parser)]
#[command(name = "polytope-margin", about = "Learning convex polytopes with margin", version)]
struct Cli {
    /// Seed for every random component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker-thread cap for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit machine-readable JSON where applicable.
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV where applicable.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a planted-polytope instance.
    Gen(GenArgs),
    /// Learn a polytope from a labeled point CSV.
    Learn(LearnArgs),
    /// Evaluate a model against a labeled point CSV.
    Eval(EvalArgs),
    /// Closed-form capacity and sample-size bounds.
    Bounds(BoundsArgs),
    /// Randomized verification of envelope/margin geometry.
    VerifyGeometry(VerifyArgs),
    /// Dimension sweep of the randomized heuristic.
    BenchFig3(Fig3Args),
    /// Turn a graph edge list into a labeled instance.
    ReduceGraph(ReduceArgs),
    /// Solve a linear system via the separation oracle.
    LpSolve(LpArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    #[arg(long, default_value_t = 0.05)]
    offset_lo: f64,
    #[arg(long, default_value_t = 0.95)]
    offset_hi: f64,
    /// Output CSV of labeled points.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON dump of the planted target polytope.
    #[arg(long)]
    target: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Enumerate,
    Greedy,
    Heuristic,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    gamma: f64,
    /// Exact halfspace count (required by enumerate, a hint for greedy).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Candidate pair budget for the net-based learners.
    #[arg(long)]
    budget: Option<usize>,
    /// Directions per round for the heuristic.
    #[arg(long, default_value_t = 10_000)]
    directions: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    /// Margin for the violation count; defaults to the model's gamma.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    #[value(name = "vc-h")]
    VcHyperplane,
    #[value(name = "vc-p")]
    VcPolytope,
    #[value(name = "vc-env")]
    VcEnvelope,
    #[value(name = "gen-err")]
    GenError,
    #[value(name = "sample-size")]
    SampleSize,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    what: BoundKind,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// VC dimension plugged into the generalization bound.
    #[arg(long)]
    dvc: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryCheck {
    InnerIdentity,
    MarginEnvelope,
    NoReenter,
    HausdorffSpeed,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: GeometryCheck,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Args)]
struct Fig3Args {
    /// Dimension list: "2..8" (inclusive) or "2,3,5".
    #[arg(long, default_value = "2..8")]
    dims: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    directions: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LpArgs {
    /// Constraint matrix CSV (one row per constraint, no header).
    #[arg(long = "A")]
    a: PathBuf,
    /// Right-hand side CSV (single column, no header).
    #[arg(long = "b")]
    b: PathBuf,
    /// Solve the strict system A x < b instead of A x <= b.
    #[arg(long)]
    strict: bool,
    /// Perceptron update budget for the separation oracle.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let seed = RngSeed::new(cli.seed, 0);
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(seed, a),
        Cmd::Learn(a) => cmd_learn(seed, a),
        Cmd::Eval(a) => cmd_eval(cli.json, a),
        Cmd::Bounds(a) => cmd_bounds(cli.json, a),
        Cmd::VerifyGeometry(a) => cmd_verify(seed, a),
        Cmd::BenchFig3(a) => cmd_fig3(cli.seed, a),
        Cmd::ReduceGraph(a) => cmd_reduce(a),
        Cmd::LpSolve(a) => cmd_lp(cli.json, a),
    }
}

fn cmd_gen(seed: RngSeed, a: GenArgs) -> anyhow::Result<ExitCode> {
    let cfg = ExperimentConfig {
        dims: vec![a.d.max(2)],
        n_points: a.n,
        margin: a.margin,
        offset_range: (a.offset_lo, a.offset_hi),
        ..ExperimentConfig::default()
    };
    let mut rng = seed.rng();
    let (points, target) = generate_instance(a.d, &cfg, &mut rng)?;
    io::write_points_path(&a.out, &points)
        .with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(path) = &a.target {
        io::ModelFile::new(&target, a.margin).write_path(path)?;
    }
    eprintln!(
        "wrote {} points ({} positive) in dimension {}",
        points.len(),
        points.iter().filter(|p| p.label() == 1).count(),
        a.d
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_learn(seed: RngSeed, a: LearnArgs) -> anyhow::Result<ExitCode> {
    let sample = io::read_points_path(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    if sample.is_empty() {
        bail!("input sample is empty");
    }
    let model = match a.algo {
        Algo::Heuristic => {
            let mut rng = seed.rng();
            heuristic_learn(&sample, a.directions, &mut rng)?
        }
        Algo::Greedy | Algo::Enumerate => {
            let mut cfg = LearnerConfig::new(a.gamma, seed)?;
            if let Some(t) = a.t {
                cfg = cfg.with_t_hint(t);
            }
            if a.budget.is_some() {
                cfg = cfg.with_candidate_budget(a.budget);
            }
            let candidates = build_candidates(&sample, &cfg)?;
            match a.algo {
                Algo::Greedy => greedy_polytope(&sample, a.gamma, &candidates, &cfg)?,
                Algo::Enumerate => {
                    let t = a.t.context("--t is required for --algo enumerate")?;
                    enumerate_t_polytope(&sample, a.gamma, t, &candidates, cfg.enumeration_cap)?
                }
                Algo::Heuristic => unreachable!(),
            }
        }
    };
    io::ModelFile::new(&model, a.gamma).write_path(&a.out)?;
    eprintln!("learned {} halfspaces -> {}", model.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(json: bool, a: EvalArgs) -> anyhow::Result<ExitCode> {
    let model = io::ModelFile::read_path(&a.model)?;
    let polytope = model.polytope()?;
    let sample = io::read_points_path(&a.input)?;
    let gamma = a.gamma.unwrap_or(model.gamma);
    let report = evaluate(&polytope, &sample, gamma)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "true_pos={} true_neg={} errors={} margin_violations={} (gamma={gamma})",
            report.true_pos, report.true_neg, report.errors, report.margin_violations
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(json: bool, a: BoundsArgs) -> anyhow::Result<ExitCode> {
    let need = |v: Option<f64>, name: &str| v.with_context(|| format!("--{name} is required"));
    let need_u = |v: Option<usize>, name: &str| v.with_context(|| format!("--{name} is required"));
    let (name, value) = match a.what {
        BoundKind::VcHyperplane => (
            "vc_fat_hyperplane",
            bounds::vc_fat_hyperplane(need(a.gamma, "gamma")?)?,
        ),
        BoundKind::VcPolytope => (
            "vc_fat_polytope",
            bounds::vc_fat_polytope(
                need_u(a.d, "d")?,
                need_u(a.t, "t")?,
                need(a.gamma, "gamma")?,
            )?,
        ),
        BoundKind::VcEnvelope => (
            "vc_envelope_polytope",
            bounds::vc_envelope_polytope(
                need_u(a.d, "d")?,
                need_u(a.t, "t")?,
                need(a.gamma, "gamma")?,
            )?,
        ),
        BoundKind::GenError => (
            "generalization_error",
            bounds::generalization_error(
                need_u(a.m, "m")?,
                need(a.dvc, "dvc")?,
                need(a.delta, "delta")?,
            )?,
        ),
        BoundKind::SampleSize => (
            "pac_sample_size",
            bounds::pac_sample_size(
                need_u(a.t, "t")?,
                need(a.gamma, "gamma")?,
                need(a.eps, "eps")?,
                need(a.delta, "delta")?,
            )? as f64,
        ),
    };
    if json {
        let inputs = bounds::BoundInputs {
            gamma: a.gamma,
            t: a.t,
            d: a.d,
            m: a.m,
            eps: a.eps,
            delta_conf: a.delta,
        };
        let doc = serde_json::json!({
            "bound": name,
            "inputs": inputs,
            "value": value,
            "vc_log_base": bounds::VC_LOG_BASE,
            "gen_err_log": bounds::GEN_ERR_LOG,
            "o_constant": bounds::O_CONSTANT,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!(
            "{name} = {value} (vc log base {}, gen-err log {}, O-constants {})",
            bounds::VC_LOG_BASE,
            bounds::GEN_ERR_LOG,
            bounds::O_CONSTANT
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(seed: RngSeed, a: VerifyArgs) -> anyhow::Result<ExitCode> {
    let model = io::ModelFile::read_path(&a.model)?;
    let polytope = model.polytope()?;
    let gamma = a.gamma.unwrap_or(model.gamma);
    let mut rng = seed.rng();
    let violations = match a.check {
        GeometryCheck::InnerIdentity => {
            verify_inner_identity(&polytope, gamma, a.samples, &mut rng)?
        }
        GeometryCheck::MarginEnvelope => {
            verify_margin_in_envelope(&polytope, gamma, a.samples, &mut rng)?
        }
        GeometryCheck::NoReenter => {
            let q = ExpandingPolytope::unit_speed(polytope.clone());
            let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.02).collect();
            let mut bad = 0usize;
            for _ in 0..a.samples {
                let p0 = polytope_margin::geometry::scale(
                    &sample_unit_ball(polytope.dim(), &mut rng)?,
                    3.0,
                );
                let v = sample_unit_sphere(polytope.dim(), &mut rng)?;
                if !no_reenter_check(&q, &p0, &v, &times)? {
                    bad += 1;
                }
            }
            bad
        }
        GeometryCheck::HausdorffSpeed => {
            let q = ExpandingPolytope::unit_speed(polytope.clone());
            let times: Vec<f64> = (0..6).map(|i| i as f64 * 0.2).collect();
            let profile =
                hausdorff_speed_profile(&q, &times, 0.2, a.samples.max(1000), seed)?;
            for (t, s) in times.iter().zip(&profile) {
                println!("tau={t:.2} speed={s:.4}");
            }
            // the profile is nonincreasing up to ray-sampling noise; the
            // slack absorbs the estimator's corner-window variance
            profile
                .windows(2)
                .filter(|w| w[1] > w[0] + 0.1)
                .count()
        }
    };
    if violations == 0 {
        println!("ok: 0 violations over {} samples", a.samples);
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL: {violations} violations over {} samples", a.samples);
        Ok(ExitCode::FAILURE)
    }
}

fn parse_dims(expr: &str) -> anyhow::Result<Vec<usize>> {
    if let Some((lo, hi)) = expr.split_once("..") {
        let lo: usize = lo.trim().parse()?;
        let hi: usize = hi.trim().trim_start_matches('=').parse()?;
        if lo > hi {
            bail!("empty dimension range {expr:?}");
        }
        return Ok((lo..=hi).collect());
    }
    expr.split(',')
        .map(|s| Ok(s.trim().parse()?))
        .collect()
}

fn cmd_fig3(seed: u64, a: Fig3Args) -> anyhow::Result<ExitCode> {
    let cfg = ExperimentConfig {
        dims: parse_dims(&a.dims)?,
        n_points: a.n,
        margin: a.margin,
        directions: a.directions,
        trials: a.trials,
        seed,
        ..ExperimentConfig::default()
    };
    let rows = run_fig3(&cfg)?;
    match &a.out {
        Some(path) => {
            io::write_fig3(std::fs::File::create(path)?, &rows)?;
            eprintln!("wrote {} rows -> {}", rows.len(), path.display());
        }
        None => print!("{}", io::fig3_to_string(&rows)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(a: ReduceArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&a.edges)
        .with_context(|| format!("reading {}", a.edges.display()))?;
    let graph = io::parse_edge_list(&text)?;
    let points = graph_to_instance(&graph)?;
    io::write_points_path(&a.out, &points)?;
    eprintln!(
        "{} vertices, {} edges -> {} points in dimension {}",
        graph.vertices(),
        graph.edges().len(),
        points.len(),
        graph.vertices()
    );
    Ok(ExitCode::SUCCESS)
}

fn read_matrix(path: &PathBuf) -> anyhow::Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .with_context(|| format!("{}:{}: bad number {f:?}", path.display(), i + 1))
            })
            .collect::<anyhow::Result<_>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_lp(json: bool, a: LpArgs) -> anyhow::Result<ExitCode> {
    let matrix = read_matrix(&a.a)?;
    let rhs: Vec<f64> = read_matrix(&a.b)?
        .into_iter()
        .map(|r| {
            if r.len() == 1 {
                Ok(r[0])
            } else {
                bail!("--b must have one value per row")
            }
        })
        .collect::<anyhow::Result<_>>()?;

    let outcome = if a.strict {
        let lp = StrictLp::new(matrix, rhs)?;
        lp_strict_solve_default(&lp, a.budget)
    } else {
        lp_solve_default(&matrix, &rhs, a.budget)
    };
    match outcome {
        Ok(LpStatus::Solved(x)) => {
            if json {
                println!("{}", serde_json::json!({ "status": "solved", "x": x }));
            } else {
                let joined: Vec<String> = x.iter().map(f64::to_string).collect();
                println!("{}", joined.join(","));
            }
            Ok(ExitCode::SUCCESS)
        }
        Ok(LpStatus::InfeasibleOrTimeout) => {
            eprintln!("infeasible or oracle timeout");
            Ok(ExitCode::from(2))
        }
        Err(Error::DegenerateRow { row }) => {
            eprintln!("degenerate equality row {row}");
            Ok(ExitCode::from(3))
        }
        Err(e) => Err(e.into()),
    }
}
