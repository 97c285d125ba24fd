//! `chemflood` command-line front end.
//!
//! Reports go to stdout as JSON; plot data goes to the `-o` path as CSV with
//! a `#` manifest header. Exit codes: 0 success, 1 usage, 2 model rejected,
//! 3 solver failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chemflood::connect::{ConnectionResult, ConnectionSolver, Spacing};
use chemflood::io::write_csv;
use chemflood::pdesim::{simulate, SimConfig};
use chemflood::riemann::{sample_profile, solve_lax_baseline, solve_riemann, WaveSequence};
use chemflood::twave::{nullcline_rows, velocity_window, SystemKind, TravellingWaveSystem};
use chemflood::{Error, ModelConfig, ModelSet64, Tolerances};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "chemflood", version, about = "Travelling-wave admissibility of chemical-flooding shocks")]
struct Cli {
    /// Model configuration (JSON); the built-in boomerang model if omitted
    #[arg(short, long, global = true)]
    model: Option<PathBuf>,

    /// Dissipative system used to select shocks
    #[arg(long, global = true, value_enum, default_value_t = SystemArg::Noneq)]
    system: SystemArg,

    /// CSV output path
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for sweep and simulate
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Proceed even if the model fails validation
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SystemArg {
    Noneq,
    Diff,
}

impl From<SystemArg> for SystemKind {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Noneq => SystemKind::NonEqAdsorption,
            SystemArg::Diff => SystemKind::CapillaryDiffusion,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SpacingArg {
    UniformV,
    LogKappa,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the flux and adsorption assumptions
    Validate,
    /// Classify the travelling-wave phase portrait at a velocity
    Portrait {
        #[arg(long)]
        v: f64,
        /// Concentration samples for the nullcline CSV
        #[arg(short = 'n', default_value_t = 101)]
        n: usize,
    },
    /// Velocity window of undercompressive shocks
    Window,
    /// Heteroclinic connection at a given v or kappa
    Connect {
        #[arg(long, conflicts_with = "kappa", required_unless_present = "kappa")]
        v: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// v(kappa) curve
    Sweep {
        #[arg(short = 'n', default_value_t = 50)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SpacingArg::UniformV)]
        spacing: SpacingArg,
    },
    /// Riemann solution selected by kappa
    Solve {
        #[arg(long)]
        kappa: f64,
        /// Profile samples in xi
        #[arg(short = 'n', default_value_t = 1000)]
        n: usize,
    },
    /// Riemann solution from the Lax-type baseline (kappa -> 0)
    Lax {
        #[arg(short = 'n', default_value_t = 1000)]
        n: usize,
    },
    /// Finite-volume run of the dissipative system
    Simulate {
        /// One or more ratios; several are run in parallel
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        kappa: Vec<f64>,
        #[arg(long, default_value_t = 2e-3)]
        eps_c: f64,
        #[arg(short = 'n', long, default_value_t = 4000)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// CSV snapshot (x, s, c, alpha) of the final state, single ratio only
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct RunManifest {
    subcommand: String,
    model: Option<PathBuf>,
    system: String,
    tolerances: Tolerances,
    outputs: Vec<PathBuf>,
    deterministic: bool,
    version: &'static str,
}

enum Failure {
    Model(Error),
    Solver(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_model_error() {
            Failure::Model(e)
        } else {
            Failure::Solver(e)
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(e)) => {
            eprintln!("model error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e}");
            ExitCode::from(3)
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Portrait { .. } => "portrait",
        Command::Window => "window",
        Command::Connect { .. } => "connect",
        Command::Sweep { .. } => "sweep",
        Command::Solve { .. } => "solve",
        Command::Lax { .. } => "lax",
        Command::Simulate { .. } => "simulate",
    }
}

fn load_model(path: Option<&Path>) -> Run<ModelSet64> {
    let cfg = match path {
        Some(p) => ModelConfig::from_path(p)?,
        None => ModelConfig::boomerang(),
    };
    Ok(cfg.build()?)
}

fn emit<T: Serialize>(manifest: &RunManifest, result: &T) -> Run<()> {
    let out = json!({ "manifest": manifest, "result": result });
    let text = serde_json::to_string_pretty(&out).map_err(|e| Error::Config(e.to_string()))?;
    // a closed pipe (e.g. `| head`) is not a failure of the run
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn csv(path: &Path, manifest: &RunManifest, columns: &[&str], rows: Vec<Vec<f64>>) -> Run<()> {
    let file = File::create(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    write_csv(&mut BufWriter::new(file), manifest, columns, rows)?;
    Ok(())
}

fn connection_summary(c: &ConnectionResult<f64>) -> serde_json::Value {
    json!({
        "v": c.v,
        "kappa": c.kappa,
        "system": c.kind.to_string(),
        "s_minus": c.s_minus,
        "s_plus": c.s_plus,
        "c0": c.c0,
        "mismatch": c.mismatch,
        "launch_check": c.launch_check,
        "at_window_boundary": c.at_window_boundary,
    })
}

fn profile_rows(seq: &WaveSequence<f64>, n: usize) -> Run<Vec<Vec<f64>>> {
    let (_, _, right) = seq.speed_chain();
    let last = seq.right_fan.v_final.unwrap_or(right).max(seq.shock.v);
    let (lo, hi) = (-0.1, last + 0.25);
    let n = n.max(2);
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let p = sample_profile(seq, &grid)?;
    Ok((0..n).map(|i| vec![p.xi[i], p.s[i], p.c[i]]).collect())
}

fn run(cli: &Cli) -> Run<()> {
    let tol = Tolerances::from_env()?;
    let kind: SystemKind = cli.system.into();
    let mut manifest = RunManifest {
        subcommand: subcommand_name(&cli.command).into(),
        model: cli.model.clone(),
        system: kind.to_string(),
        tolerances: tol,
        outputs: cli.output.iter().cloned().collect(),
        deterministic: true,
        version: env!("CARGO_PKG_VERSION"),
    };
    let model = load_model(cli.model.as_deref())?;
    if let Command::Validate = cli.command {
        let report = model.validate(chemflood::models::DEFAULT_GRID_N)?;
        emit(&manifest, &report)?;
        if !report.passed() {
            return Err(Failure::Model(Error::ModelRejected(report.summary())));
        }
        return Ok(());
    }
    let report = model.ensure_valid(cli.force).map_err(Failure::Model)?;
    if !report.passed() {
        eprintln!("warning: continuing with a model that fails validation: {}", report.summary());
    }

    match &cli.command {
        Command::Validate => unreachable!(),
        Command::Window => {
            let w = velocity_window(&model, &tol)?;
            emit(&manifest, &w)?;
        }
        Command::Portrait { v, n } => {
            let sys = TravellingWaveSystem::new(&model, *v, 1.0, kind)?.with_tolerances(tol);
            let rep = sys.classify_portrait()?;
            if let Some(path) = &cli.output {
                let rows = nullcline_rows(&sys, *n).into_iter().map(|(c, s, b)| vec![c, s, b as f64]).collect();
                csv(path, &manifest, &["c", "s", "branch"], rows)?;
            }
            emit(&manifest, &rep)?;
        }
        Command::Connect { v, kappa } => {
            let mut solver = ConnectionSolver::new(&model, kind).with_tolerances(tol);
            let res = match (v, kappa) {
                (Some(v), _) => solver.find_kappa_for_v(*v)?,
                (None, Some(k)) => solver.find_v_for_kappa(*k)?,
                (None, None) => unreachable!("clap requires one of --v, --kappa"),
            };
            let integral = solver.integral_residual(&res)?;
            if let Some(path) = &cli.output {
                let rows = res.samples_with_slopes().into_iter().map(|(c, s, d)| vec![c, s, d]).collect();
                csv(path, &manifest, &["c", "s", "ds_dc"], rows)?;
            }
            let (r1, r2) = res.rh_residuals(&model);
            let mut out = connection_summary(&res);
            out["rh_residuals"] = json!([r1, r2]);
            out["integral_residual"] = json!(integral);
            emit(&manifest, &out)?;
        }
        Command::Sweep { n, spacing } => {
            let spacing = match spacing {
                SpacingArg::UniformV => Spacing::UniformV,
                SpacingArg::LogKappa => Spacing::LogKappa,
            };
            let mut solver = ConnectionSolver::new(&model, kind).with_tolerances(tol);
            let curve = solver.sweep(*n, spacing, cli.jobs)?;
            if let Some(path) = &cli.output {
                let rows = curve
                    .samples
                    .iter()
                    .map(|s| vec![s.v, s.kappa, s.s_minus, s.s_plus, s.rh_residual, s.integral_residual])
                    .collect();
                csv(path, &manifest, &["v", "kappa", "s_minus", "s_plus", "rh_residual", "integral_residual"], rows)?;
            }
            emit(&manifest, &curve)?;
        }
        Command::Solve { kappa, n } => {
            let (seq, conn) = solve_riemann(&model, *kappa, kind, &tol)?;
            if let Some(path) = &cli.output {
                csv(path, &manifest, &["xi", "s", "c"], profile_rows(&seq, *n)?)?;
            }
            emit(&manifest, &json!({ "sequence": seq, "connection": connection_summary(&conn) }))?;
        }
        Command::Lax { n } => {
            let seq = solve_lax_baseline(&model, &tol)?;
            if let Some(path) = &cli.output {
                csv(path, &manifest, &["xi", "s", "c"], profile_rows(&seq, *n)?)?;
            }
            emit(&manifest, &json!({ "sequence": seq }))?;
        }
        Command::Simulate { kappa, eps_c, cells, t_end, snapshot } => {
            if snapshot.is_some() && kappa.len() > 1 {
                return Err(Failure::Model(Error::Config("--snapshot needs a single --kappa".into())));
            }
            if let Some(p) = snapshot {
                manifest.outputs.push(p.clone());
            }
            let configs: Vec<SimConfig<f64>> = kappa
                .iter()
                .map(|k| SimConfig { cells: *cells, t_end: *t_end, ..SimConfig::for_kappa(kind, *k, *eps_c) })
                .collect();
            let results = run_parallel(&model, &configs, cli.jobs)?;
            let mut reports = Vec::new();
            let mut rows = Vec::new();
            for (k, r) in kappa.iter().zip(&results) {
                rows.extend(r.history.samples.iter().map(|(t, x)| vec![*k, *t, *x]));
                reports.push(json!({
                    "kappa": k,
                    "config": r.config,
                    "steps": r.history.steps,
                    "touched_boundary": r.history.touched_boundary,
                    "fit": r.fit,
                }));
            }
            if let Some(path) = &cli.output {
                csv(path, &manifest, &["kappa", "t", "x_front"], rows)?;
            }
            if let (Some(path), Some(r)) = (snapshot, results.first()) {
                let dx = r.config.dx();
                let st = &r.final_state;
                let rows = (0..st.s.len()).map(|i| vec![(i as f64 + 0.5) * dx, st.s[i], st.c[i], st.alpha[i]]).collect();
                csv(path, &manifest, &["x", "s", "c", "alpha"], rows)?;
            }
            emit(&manifest, &reports)?;
        }
    }
    Ok(())
}

fn run_parallel(
    model: &ModelSet64,
    configs: &[SimConfig<f64>],
    jobs: usize,
) -> Run<Vec<chemflood::pdesim::SimulationResult<f64>>> {
    let jobs = jobs.max(1).min(configs.len().max(1));
    let chunk = configs.len().div_ceil(jobs).max(1);
    let results: Vec<chemflood::Result<Vec<_>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|c| simulate(model, *c)).collect::<chemflood::Result<Vec<_>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
