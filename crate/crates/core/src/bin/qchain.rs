//! Command-line front end for experiments and presets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qchain::experiment::{self, ExperimentSpec, Mode, RunRecord};
use qchain::{Pattern, TargetMode};

#[derive(Parser)]
#[command(name = "qchain", version, about = "Particle-chain design for excitation transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment file (TOML, or JSON). The subcommand fixes the mode.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replaces the seed list with a single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Deterministic single-threaded execution.
    #[arg(long)]
    single_thread: bool,
    /// Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Number of cells, endpoints included.
    #[arg(long)]
    cells: Option<usize>,
    /// Coupling constant J.
    #[arg(long)]
    coupling: Option<f64>,
    /// Maximise max_t p_B(t) without the sink.
    #[arg(long)]
    unitary: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Time series of one geometry.
    Simulate {
        /// Overrides the pattern of `--config`.
        #[arg(long)]
        pattern: Option<Pattern>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive (default) or greedy search over added particles.
    Search {
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        max_added: Option<usize>,
        /// Pattern to compare the optimum against.
        #[arg(long)]
        pattern: Option<Pattern>,
        #[command(flatten)]
        common: Common,
    },
    /// Trains PPO agents, one per seed.
    Train {
        /// Training rounds per seed.
        #[arg(long)]
        rounds: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Transfer statistics of a pattern.
    Evaluate {
        /// Overrides the pattern of `--config`.
        #[arg(long)]
        pattern: Option<Pattern>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a named preset.
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Lists the presets.
    ListPresets,
}

fn base_spec(common: &Common, name: &str, mode: Mode) -> qchain::Result<ExperimentSpec> {
    let mut spec = match &common.config {
        Some(path) => ExperimentSpec::from_file(path)?,
        None => ExperimentSpec::new(name, mode),
    };
    spec.mode = mode;
    Ok(spec)
}

fn set_pattern(spec: &mut ExperimentSpec, pattern: Option<Pattern>) {
    if let Some(p) = pattern {
        spec.physical.n_cells = p.len();
        spec.pattern = Some(p);
    }
}

fn apply(common: &Common, spec: &mut ExperimentSpec) {
    if let Some(n) = common.cells {
        spec.physical.n_cells = n;
    }
    if let Some(j) = common.coupling {
        spec.physical.coupling_j = j;
    }
    if common.unitary {
        spec.physical.sink_enabled = false;
        spec.episode.reward_mode = TargetMode::UnitaryMax;
    }
    if let Some(seed) = common.seed {
        spec.seeds = vec![seed];
    }
    if let Some(n) = common.samples {
        spec.set_samples(n);
    }
    if common.single_thread {
        spec.set_single_thread(true);
    }
    if let Some(out) = &common.out {
        spec.output_dir = Some(out.clone());
    }
}

fn build(command: Command) -> qchain::Result<Option<ExperimentSpec>> {
    let spec = match command {
        Command::ListPresets => {
            for p in experiment::presets() {
                println!("{:<26} {}", p.name, p.summary);
            }
            return Ok(None);
        }
        Command::Simulate { pattern, common } => {
            let mut s = base_spec(&common, "simulate", Mode::Simulate)?;
            set_pattern(&mut s, pattern);
            apply(&common, &mut s);
            s
        }
        Command::Evaluate { pattern, common } => {
            let mut s = base_spec(&common, "evaluate", Mode::EvaluatePattern)?;
            set_pattern(&mut s, pattern);
            apply(&common, &mut s);
            s
        }
        Command::Search {
            greedy,
            max_added,
            pattern,
            common,
        } => {
            let mode = if greedy { Mode::Greedy } else { Mode::BruteForce };
            let mut s = base_spec(&common, "search", mode)?;
            if let Some(k) = max_added {
                s.search.max_added_particles = k;
            }
            set_pattern(&mut s, pattern);
            apply(&common, &mut s);
            s
        }
        Command::Train { rounds, common } => {
            let mut s = base_spec(&common, "train", Mode::Train)?;
            if let Some(r) = rounds {
                s.ppo.max_episodes = r;
            }
            apply(&common, &mut s);
            s
        }
        Command::Preset { name, common } => {
            let mut s = experiment::preset(&name)?;
            apply(&common, &mut s);
            s
        }
    };
    Ok(Some(spec))
}

fn report(rec: &RunRecord) -> serde_json::Value {
    serde_json::json!({
        "status": if rec.all_checks_passed { "ok" } else { "checks_failed" },
        "summary": rec.summary_path(),
        "checks_passed": rec.all_checks_passed,
        "failed_checks": rec.failed_checks().map(|c| &c.metric).collect::<Vec<_>>(),
        "metrics": rec.metrics,
    })
}

fn error_exit(kind: &str, message: &str) -> ExitCode {
    let err = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{err}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return error_exit("usage", e.to_string().trim_end()),
    };
    match build(cli.command).and_then(|s| s.map(|s| experiment::run(&s)).transpose()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(rec)) => {
            println!("{}", serde_json::to_string_pretty(&report(&rec)).expect("serialisable"));
            // Failed expectations are a distinct, non-error outcome.
            if rec.all_checks_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => error_exit(e.kind(), &e.to_string()),
    }
}
