//! Command-line driver: solve the far-field and full 3-D problems, persist
//! the value-field artifact, dump switching maps, and simulate race batches.
//!
//! Exit codes: 0 success; 2 scenario/flag/artifact-format problems; 3 solver
//! failures (no convergence, unreachable obstacle, non-finite simulation
//! state); 4 artifact/scenario parameter-hash mismatch; 1 other I/O errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use matchrace::model::PlayerId;
use matchrace::qvi1d::theta_star_for;
use matchrace::scenario::Scenario;
use matchrace::strategy::{write_plot_data, write_statistics_csv, write_trace_csv};
use matchrace::{
    boundary_field, race_statistics, simulate, solve_1d, Error, FieldArtifact, Grid3, RaceTrace,
    Result, SimConfig, SweepMode, Tack,
};
use rayon::prelude::*;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "matchrace",
    version,
    about = "Match-race value functions, tack-switching maps, and race simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the two far-field switching problems and write their value tables.
    #[command(name = "solve-1d")]
    Solve1d(Solve1dArgs),
    /// Solve the 3-D game to its fixed point and write the field artifact.
    Solve(SolveArgs),
    /// Simulate a batch of races driven by a solved field.
    Simulate(SimulateArgs),
    /// Dump a constant-wind-angle slice of the switching maps as CSV.
    Maps(MapsArgs),
}

#[derive(Args)]
struct Shared {
    /// Scenario file; the symmetric benchmark defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct Solve1dArgs {
    #[command(flatten)]
    shared: Shared,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    #[value(name = "gauss-seidel")]
    GaussSeidel,
    #[value(name = "jacobi")]
    Jacobi,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> SweepMode {
        match m {
            ModeArg::GaussSeidel => SweepMode::GaussSeidel,
            ModeArg::Jacobi => SweepMode::Jacobi,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    shared: Shared,
    /// Sweep mode, overriding the scenario's [solver] section.
    #[arg(long)]
    mode: Option<ModeArg>,
    /// Sweep cap, overriding the scenario (default 100 * n_cells).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Worker threads for Jacobi sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    shared: Shared,
    /// Solved field artifact; defaults to <out>/field.mrvf.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Seed range "A..B" (A inclusive, B exclusive); defaults to the
    /// scenario's single seed.
    #[arg(long)]
    seeds: Option<String>,
    /// Also write per-race plot decompositions (wind, trajectories,
    /// distance, speeds) under <out>/plot_<seed>/.
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args)]
struct MapsArgs {
    #[command(flatten)]
    shared: Shared,
    /// Solved field artifact; defaults to <out>/field.mrvf.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Wind angle of the slice; projected onto the nearest grid node above.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ScenarioParse { .. } | Error::InvalidConfig(_) | Error::MalformedField(_) => 2,
        Error::NoConvergence { .. }
        | Error::ObstacleNeverReached { .. }
        | Error::NonFiniteState { .. } => 3,
        Error::HashMismatch { .. } => 4,
        Error::Io(_) => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve1d(args) => cmd_solve_1d(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Maps(args) => cmd_maps(args),
    }
}

fn load(shared: &Shared) -> Result<Scenario> {
    let sc = match &shared.scenario {
        Some(path) => matchrace::load_scenario(path)?,
        None => Scenario::default(),
    };
    std::fs::create_dir_all(&shared.out)?;
    Ok(sc)
}

fn cmd_solve_1d(args: Solve1dArgs) -> Result<()> {
    let sc = load(&args.shared)?;
    let cfg = &sc.game;
    let eps = matchrace::strategy::SWITCH_EPS_FACTOR * cfg.tol;
    for (player, name) in [(PlayerId::A, "A"), (PlayerId::B, "B")] {
        let v = solve_1d(player, cfg, sc.solver.m_cells)?;
        let t_star = theta_star_for(
            player.s_bar(cfg),
            cfg.sigma,
            cfg.lambda,
            player.switch_cost(cfg),
            cfg.a_star,
        )?;
        let path = args.shared.out.join(format!("value1d_{name}.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(
            w,
            "# player {name}, m_cells {}, theta_star {t_star}",
            v.m_cells
        )?;
        writeln!(w, "theta,v1,v2,diff,switch1,switch2")?;
        for k in 0..v.m_cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                v.node_theta(k),
                v.value(Tack::Port, k),
                v.value(Tack::Starboard, k),
                v.diff(k),
                v.wants_switch(Tack::Port, k, player.switch_cost(cfg), eps) as u8,
                v.wants_switch(Tack::Starboard, k, player.switch_cost(cfg), eps) as u8,
            )?;
        }
        w.flush()?;
        println!(
            "player {name}: theta* = {t_star:.6} (top speed {}, switch cost {}) -> {}",
            player.s_bar(cfg),
            player.switch_cost(cfg),
            path.display()
        );
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let sc = load(&args.shared)?;
    let cfg = &sc.game;
    let mut opts = sc.solver.clone();
    if let Some(mode) = args.mode {
        opts.mode = mode.into();
    }
    if let Some(cap) = args.max_iters {
        opts.max_iters = Some(cap);
    }
    if let Some(threads) = args.threads {
        opts.threads = Some(threads);
    }

    let grid = Grid3::from_config(cfg);
    let table = boundary_field(cfg, &grid, opts.m_cells)?;
    let (field, maps, report) = matchrace::value_iteration(cfg, &table, None, &opts)?;

    let artifact = FieldArtifact {
        field,
        maps,
        param_hash: cfg.param_hash(opts.m_cells),
        converged: report.converged,
        mode: opts.mode,
        iterations: report.iterations as u64,
        residual: report.residual,
        tol: cfg.tol,
    };
    let field_path = args.shared.out.join("field.mrvf");
    std::fs::write(&field_path, artifact.encode())?;

    let report_path = args.shared.out.join("solve_report.csv");
    let mut w = BufWriter::new(File::create(&report_path)?);
    writeln!(w, "sweep,residual,supnorm")?;
    for (n, (res, sup)) in report
        .residual_history
        .iter()
        .zip(&report.supnorm_history)
        .enumerate()
    {
        writeln!(w, "{},{},{}", n + 1, res, sup)?;
    }
    w.flush()?;

    println!(
        "{} on {}^3 nodes ({} mode): {} sweeps, residual {:.3e} (tol {:.1e}), {:.2}s",
        if report.converged {
            "converged"
        } else {
            "NOT converged"
        },
        grid.n_nodes(),
        opts.mode,
        report.iterations,
        report.residual,
        cfg.tol,
        report.wall_time.as_secs_f64()
    );
    println!("field -> {}", field_path.display());
    println!("report -> {}", report_path.display());

    if !report.converged {
        return Err(Error::NoConvergence {
            iterations: report.iterations,
            residual: report.residual,
            tol: cfg.tol,
        });
    }
    Ok(())
}

fn field_path(explicit: &Option<PathBuf>, shared: &Shared) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| shared.out.join("field.mrvf"))
}

/// Load an artifact and insist its parameters match the scenario's.
fn load_artifact(path: &Path, sc: &Scenario) -> Result<FieldArtifact> {
    let bytes = std::fs::read(path)?;
    let artifact = FieldArtifact::decode(&bytes)?;
    let expected = sc.game.param_hash(sc.solver.m_cells);
    if artifact.param_hash != expected {
        return Err(Error::HashMismatch {
            artifact: hex(&artifact.param_hash),
            scenario: hex(&expected),
        });
    }
    Ok(artifact)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_seed_range(s: &str) -> Result<std::ops::Range<u64>> {
    let parse = |part: &str| {
        part.trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidConfig(format!("--seeds wants integers A..B, got '{s}'")))
    };
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::InvalidConfig(format!("--seeds wants a range A..B, got '{s}'")))?;
    let range = parse(a)?..parse(b)?;
    if range.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "--seeds range '{s}' is empty"
        )));
    }
    Ok(range)
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let sc = load(&args.shared)?;
    let artifact = load_artifact(&field_path(&args.field, &args.shared), &sc)?;
    let hash_hex = hex(&artifact.param_hash);
    let seeds: Vec<u64> = match &args.seeds {
        Some(range) => parse_seed_range(range)?.collect(),
        None => vec![sc.sim.seed],
    };

    let traces: Vec<RaceTrace> = seeds
        .par_iter()
        .map(|&seed| -> Result<RaceTrace> {
            let sim = SimConfig {
                seed,
                ..sc.sim.clone()
            };
            let trace = simulate(&artifact.maps, &sim, &sc.game)?;
            let path = args.shared.out.join(format!("trace_{seed}.csv"));
            let mut w = BufWriter::new(File::create(&path)?);
            write_trace_csv(&mut w, &trace, &hash_hex)?;
            w.flush()?;
            if args.plot_data {
                write_plot_data(&args.shared.out.join(format!("plot_{seed}")), &trace)?;
            }
            Ok(trace)
        })
        .collect::<Result<Vec<_>>>()?;

    let stats = race_statistics(&traces, &sc.game);
    let stats_path = args.shared.out.join("stats.csv");
    let mut w = BufWriter::new(File::create(&stats_path)?);
    write_statistics_csv(&mut w, &stats)?;
    w.flush()?;

    println!(
        "{} race(s): A wins {}, B wins {}, draws {}; mean final lead {:.5}",
        stats.races, stats.wins_a, stats.wins_b, stats.draws, stats.mean_final_lead
    );
    println!(
        "mean switches per race: A {:.2}, B {:.2}",
        stats.mean_switches_a, stats.mean_switches_b
    );
    println!("traces and stats -> {}", args.shared.out.display());
    Ok(())
}

fn cmd_maps(args: MapsArgs) -> Result<()> {
    let sc = load(&args.shared)?;
    let artifact = load_artifact(&field_path(&args.field, &args.shared), &sc)?;
    let grid = &artifact.field.grid;
    let k = grid.project_theta(args.theta);
    let theta_k = grid.node_theta(k);

    let path = args.shared.out.join("switching_maps.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(
        w,
        "# switching-map slice at theta node {k} (theta = {theta_k}; requested {})",
        args.theta
    )?;
    writeln!(
        w,
        "# columns: A's target mode then B's target mode per (q,r) pair"
    )?;
    writeln!(w, "x1,x2,aPP,aPS,aSP,aSS,bPP,bPS,bSP,bSS")?;
    let pairs = [
        (Tack::Port, Tack::Port),
        (Tack::Port, Tack::Starboard),
        (Tack::Starboard, Tack::Port),
        (Tack::Starboard, Tack::Starboard),
    ];
    let m = grid.n_nodes();
    for i in 0..m {
        for j in 0..m {
            write!(w, "{},{}", grid.node_x1(i), grid.node_x2(j))?;
            for (q, r) in pairs {
                write!(w, ",{}", artifact.maps.a_target(i, j, k, q, r).number())?;
            }
            for (q, r) in pairs {
                write!(w, ",{}", artifact.maps.b_target(i, j, k, q, r).number())?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    println!(
        "slice at theta = {theta_k} (node {k}) -> {}",
        path.display()
    );
    Ok(())
}
