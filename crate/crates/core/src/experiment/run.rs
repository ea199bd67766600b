use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::checks::{CheckResult, Metrics};
use super::{ExperimentSpec, Mode};
use crate::error::{Error, Result};
use crate::exec::derive_seed;
use crate::lindblad::{evaluate_transfer, transfer_value, Backend, ChainGeometry, TargetMode, TimeSample};
use crate::mdp::ChainEnv;
use crate::pattern::Pattern;
use crate::policy::{evaluate_policy, train, ActionSelection, Checkpoint, EpisodeLog};
use crate::search::{brute_force, evaluate_samples, greedy_build, score_pattern, PatternScore, SearchBudget};
use crate::stats::SampleStats;

/// Window for the final-return average in training summaries.
const FINAL_WINDOW: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed { kind: String, message: String },
}

/// Outcome of one training seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub best_pattern: Pattern,
    pub best_transfer: f64,
    pub particles: usize,
    pub rounds: usize,
    pub best_round: usize,
    pub initial_mean_return: f64,
    pub final_mean_return: f64,
    pub evaluations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_transfer: Option<SampleStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_mean_particles: Option<f64>,
}

impl SeedResult {
    pub fn return_gain(&self) -> f64 {
        self.final_mean_return - self.initial_mean_return
    }
}

/// Everything `summary.json` records. Wall-clock time is kept out of the
/// summary so that reruns are byte-identical; it goes to `timing.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub status: RunStatus,
    pub spec: ExperimentSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<SeedResult>,
    pub metrics: Metrics,
    pub checks: Vec<CheckResult>,
    pub all_checks_passed: bool,
    /// Dynamics evaluations performed by the run.
    pub evaluations: u64,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub wall_clock_seconds: f64,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl RunRecord {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn summary_path(&self) -> PathBuf {
        self.output_dir.join("summary.json")
    }
}

struct Recorder<'a> {
    dir: &'a Path,
    rec: RunRecord,
}

impl Recorder<'_> {
    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.rec.artifacts.push(name.to_string());
        Ok(())
    }

    fn time_series(&mut self, name: &str, series: &[TimeSample], sites: usize) -> Result<()> {
        let width = series.first().map_or(0, |s| s.populations.len());
        let mut header: Vec<String> = vec!["time".into()];
        header.extend((0..width).map(|i| if i < sites { format!("site_{i}") } else { "sink".into() }));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = series.iter().map(|s| {
            std::iter::once(s.time)
                .chain(s.populations.iter().copied())
                .map(|v| v.to_string())
                .collect()
        });
        self.csv(name, &header, rows)
    }

    fn metrics(&mut self) -> &mut Metrics {
        &mut self.rec.metrics
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Output directory of a spec: its `output_dir`, or `runs/<name>`.
pub(crate) fn output_dir(spec: &ExperimentSpec) -> PathBuf {
    spec.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(&spec.name))
}

/// Validates and runs an experiment, writing its artifacts, `summary.json`
/// and `timing.json`. A failure part-way still writes the summary (status
/// `failed`) together with a `FAILED` marker file, keeping whatever tables
/// were already complete.
pub fn run(spec: &ExperimentSpec) -> Result<RunRecord> {
    spec.validate()?;
    let dir = output_dir(spec);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let _ = fs::remove_file(dir.join("FAILED"));
    let start = Instant::now();
    let mut r = Recorder {
        dir: &dir,
        rec: RunRecord {
            status: RunStatus::Completed,
            spec: spec.clone(),
            seeds: Vec::new(),
            metrics: Metrics::default(),
            checks: Vec::new(),
            all_checks_passed: false,
            evaluations: 0,
            artifacts: Vec::new(),
            wall_clock_seconds: 0.0,
            output_dir: dir.clone(),
        },
    };
    let outcome = match spec.mode {
        Mode::Train => run_train(spec, &mut r),
        Mode::BruteForce => run_brute_force(spec, &mut r),
        Mode::Greedy => run_greedy(spec, &mut r),
        Mode::EvaluatePattern => run_evaluate(spec, &mut r),
        Mode::DisorderTable => run_table(spec, &mut r),
        Mode::Simulate => run_simulate(spec, &mut r),
        Mode::CouplingSweep => run_sweep(spec, &mut r),
    };
    let mut rec = r.rec;
    rec.checks = spec.expectations.iter().map(|e| e.evaluate(&rec.metrics)).collect();
    rec.all_checks_passed = rec.checks.iter().all(|c| c.passed);
    if let Err(e) = &outcome {
        rec.status = RunStatus::Failed {
            kind: e.kind().into(),
            message: e.to_string(),
        };
        rec.all_checks_passed = false;
    }
    rec.wall_clock_seconds = start.elapsed().as_secs_f64();
    write_json(&dir.join("summary.json"), &rec)?;
    write_json(
        &dir.join("timing.json"),
        &serde_json::json!({ "wall_clock_seconds": rec.wall_clock_seconds }),
    )?;
    match outcome {
        Ok(()) => Ok(rec),
        Err(e) => {
            let marker = dir.join("FAILED");
            fs::write(&marker, format!("{}: {}\n", e.kind(), e)).map_err(|io| Error::io(&marker, io))?;
            Err(e)
        }
    }
}

fn seed0(spec: &ExperimentSpec) -> u64 {
    spec.seeds[0]
}

fn fmt(v: f64) -> String {
    v.to_string()
}

fn run_train(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    let factory = || ChainEnv::new(spec.physical.clone(), spec.episode.clone(), spec.disorder);
    let mut ppo = spec.ppo.clone();
    ppo.single_thread |= spec.single_thread;
    let header = [
        "episode",
        "mean_return",
        "mean_transfer",
        "mean_particles",
        "best_transfer",
    ];
    for &seed in &spec.seeds {
        let outcome = train(factory, &ppo, seed)?;
        let rows = outcome.log.iter().map(|l: &EpisodeLog| {
            vec![
                l.episode.to_string(),
                fmt(l.mean_return),
                fmt(l.mean_transfer),
                fmt(l.mean_particles),
                fmt(l.best_transfer),
            ]
        });
        r.csv(&format!("learning_curve_seed{seed}.csv"), &header, rows)?;
        let ckpt_name = format!("checkpoint_seed{seed}.json");
        Checkpoint::new(outcome.params.clone(), seed, outcome.rounds()).save(&r.dir.join(&ckpt_name))?;
        r.rec.artifacts.push(ckpt_name);

        let mut evaluations = outcome.evaluations;
        let policy = if spec.eval_episodes == 0 {
            None
        } else {
            let p = evaluate_policy(
                &outcome.params.actor,
                factory,
                spec.eval_episodes,
                derive_seed(seed, u64::MAX - 1),
                ActionSelection::Greedy,
                spec.single_thread,
            )?;
            evaluations += p.evaluations;
            Some(p)
        };
        r.rec.evaluations += evaluations;
        r.rec.seeds.push(SeedResult {
            seed,
            particles: outcome.best_pattern.particle_count(),
            best_pattern: outcome.best_pattern.clone(),
            best_transfer: outcome.best_transfer,
            rounds: outcome.rounds(),
            best_round: outcome.best_episode,
            initial_mean_return: outcome.log[0].mean_return,
            final_mean_return: outcome.final_mean_return(FINAL_WINDOW),
            evaluations,
            policy_transfer: policy.as_ref().map(|p| p.transfer),
            policy_mean_particles: policy.as_ref().map(|p| p.mean_particles),
        });
    }

    let seeds = &r.rec.seeds;
    let best = seeds
        .iter()
        .max_by(|a, b| a.best_transfer.total_cmp(&b.best_transfer))
        .expect("seeds validated non-empty")
        .clone();
    let gain = seeds
        .iter()
        .map(SeedResult::return_gain)
        .fold(f64::NEG_INFINITY, f64::max);
    let policy_best = seeds
        .iter()
        .filter_map(|s| s.policy_transfer)
        .max_by(|a, b| a.mean.total_cmp(&b.mean));
    let m = r.metrics();
    m.set("best_transfer", best.best_transfer);
    m.set("best_particles", best.particles as f64);
    m.set("return_gain", gain);
    m.label("best_pattern", best.best_pattern.to_string());
    if let Some(p) = policy_best {
        m.set("policy_mean_transfer", p);
    }
    let g = ChainGeometry::from_pattern(&best.best_pattern, &spec.physical)?;
    let res = evaluate_transfer(&g, &spec.physical)?;
    r.time_series("time_series.csv", &res.time_series, g.count())
}

fn budget(spec: &ExperimentSpec) -> SearchBudget {
    SearchBudget {
        max_added_particles: spec.search.max_added_particles,
        evaluation_mode: spec.physical.target_mode(),
        disorder_samples: spec.search.disorder_samples,
        disorder: spec.disorder,
        seed: seed0(spec),
        max_evaluations: spec.search.max_evaluations,
        single_thread: spec.single_thread,
    }
}

fn score_rows(scores: &[PatternScore]) -> impl Iterator<Item = Vec<String>> + '_ {
    scores.iter().map(|s| {
        vec![
            s.pattern.to_string(),
            s.particles.to_string(),
            fmt(s.transfer),
            fmt(s.stderr),
            s.samples.to_string(),
        ]
    })
}

const SCORE_HEADER: [&str; 5] = ["pattern", "particles", "transfer_mean", "stderr", "samples"];

fn mc_samples(spec: &ExperimentSpec) -> usize {
    if spec.disorder.is_none() {
        0
    } else {
        spec.search.disorder_samples
    }
}

fn run_brute_force(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    let report = brute_force(&spec.physical, &budget(spec))?;
    r.rec.evaluations += report.evaluations as u64;
    r.csv("search.csv", &SCORE_HEADER, score_rows(&report.ranked))?;
    let best = report.best().clone();
    let m = r.metrics();
    m.set("patterns", report.patterns as f64);
    m.set("best_transfer", best.transfer);
    m.set("best_particles", best.particles as f64);
    m.label("best_pattern", best.pattern.to_string());
    if let Some(p) = &spec.pattern {
        let rank = report.ranked.iter().position(|s| &s.pattern == p);
        let reference = match rank {
            Some(i) => report.ranked[i].transfer,
            None => score_pattern(p, &spec.physical, &spec.disorder, mc_samples(spec), seed0(spec))?.transfer,
        };
        let m = r.metrics();
        m.set("reference_transfer", reference);
        m.set("dominance_margin", best.transfer - reference);
        m.label(
            "reference_rank",
            rank.map_or("outside budget".into(), |i| (i + 1).to_string()),
        );
    }
    Ok(())
}

fn run_greedy(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    let g = greedy_build(&spec.physical, &budget(spec))?;
    let rows = g
        .picks
        .iter()
        .zip(&g.candidates_per_step)
        .enumerate()
        .map(|(i, (c, n))| vec![(i + 1).to_string(), c.to_string(), n.to_string()]);
    r.csv("greedy.csv", &["step", "cell", "candidates"], rows)?;
    let m = r.metrics();
    m.set("greedy_transfer", g.transfer);
    m.set("greedy_particles", g.pattern.particle_count() as f64);
    m.label("greedy_pattern", g.pattern.to_string());
    if let Some(p) = &spec.pattern {
        let reference = score_pattern(p, &spec.physical, &spec.disorder, mc_samples(spec), seed0(spec))?;
        r.metrics().set("reference_transfer", reference.transfer);
    }
    Ok(())
}

fn stats_row(label: &str, s: &SampleStats) -> Vec<String> {
    vec![
        label.to_string(),
        fmt(s.mean),
        fmt(s.stderr),
        fmt(s.min),
        fmt(s.max),
        s.samples.to_string(),
    ]
}

fn run_evaluate(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    let pattern = spec.pattern.as_ref().expect("validated");
    let stats = evaluate_samples(
        pattern,
        &spec.physical,
        &spec.disorder,
        spec.samples,
        seed0(spec),
        spec.single_thread,
    )?;
    r.rec.evaluations += stats.samples as u64;
    r.csv(
        "evaluation.csv",
        &["pattern", "transfer_mean", "stderr", "min", "max", "samples"],
        [stats_row(&pattern.to_string(), &stats)],
    )?;
    let m = r.metrics();
    m.set("transfer", stats);
    m.set("transfer_min", stats.min);
    m.set("transfer_max", stats.max);
    m.set("particles", pattern.particle_count() as f64);
    simulate_into(spec, pattern, r)
}

fn simulate_into(spec: &ExperimentSpec, pattern: &Pattern, r: &mut Recorder) -> Result<()> {
    let g = ChainGeometry::from_pattern(pattern, &spec.physical)?;
    let res = evaluate_transfer(&g, &spec.physical)?;
    r.rec.evaluations += 1;
    r.time_series("time_series.csv", &res.time_series, g.count())?;
    let m = r.metrics();
    m.set("target_final", res.target_population_final);
    m.set("target_max", res.target_population_max);
    Ok(())
}

fn run_simulate(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    simulate_into(spec, spec.pattern.as_ref().expect("validated"), r)
}

fn run_table(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    let reference = spec.pattern.as_ref().expect("validated");
    let filled = Pattern::filled(spec.physical.n_cells);
    let seed = seed0(spec);
    let mut rows = Vec::new();
    for (i, row) in spec.table.iter().enumerate() {
        // Optimal and reference columns share realisations.
        let row_seed = derive_seed(seed, i as u64);
        let eval = |p: &Pattern, n: usize, s: u64| {
            evaluate_samples(p, &spec.physical, &row.disorder, n, s, spec.single_thread)
        };
        let opt = eval(&row.pattern, row.samples, row_seed)?;
        let refr = eval(reference, row.samples, row_seed)?;
        let fill = eval(&filled, row.filled_samples, derive_seed(row_seed, 1))?;
        r.rec.evaluations += (opt.samples + refr.samples + fill.samples) as u64;
        let m = r.metrics();
        m.set(format!("row{i}.opt"), opt);
        m.set(format!("row{i}.reference"), refr);
        m.set(format!("row{i}.filled"), fill);
        rows.push(vec![
            row.disorder.label(),
            row.pattern.to_string(),
            fmt(opt.mean),
            fmt(opt.stderr),
            fmt(refr.mean),
            fmt(refr.stderr),
            fmt(fill.mean),
            fmt(fill.stderr),
            row.samples.to_string(),
            row.filled_samples.to_string(),
        ]);
    }
    r.csv(
        "disorder_table.csv",
        &[
            "disorder",
            "pattern",
            "opt_mean",
            "opt_stderr",
            "reference_mean",
            "reference_stderr",
            "filled_mean",
            "filled_stderr",
            "samples",
            "filled_samples",
        ],
        rows,
    )
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

fn run_sweep(spec: &ExperimentSpec, r: &mut Recorder) -> Result<()> {
    let pattern = spec.pattern.as_ref().expect("validated");
    let grid = spec.sweep.grid();
    let mut sink = Vec::with_capacity(grid.len());
    let mut unitary = Vec::with_capacity(grid.len());
    for &j in &grid {
        let base = spec.physical.clone().with_coupling(j);
        let cs = base.clone().with_mode(TargetMode::SinkFinal);
        let cu = base.with_mode(TargetMode::UnitaryMax);
        sink.push(transfer_value(
            &ChainGeometry::from_pattern(pattern, &cs)?,
            &cs,
            Backend::Superoperator,
        )?);
        unitary.push(transfer_value(
            &ChainGeometry::from_pattern(pattern, &cu)?,
            &cu,
            Backend::Superoperator,
        )?);
    }
    r.rec.evaluations += 2 * grid.len() as u64;
    let rows = grid
        .iter()
        .zip(sink.iter().zip(&unitary))
        .map(|(j, (s, u))| vec![fmt(*j), fmt(*s), fmt(*u)]);
    r.csv("coupling_sweep.csv", &["coupling", "p_sink_final", "max_p_b"], rows)?;
    let m = r.metrics();
    m.label("sink_monotone", nondecreasing(&sink).to_string());
    m.label("unitary_monotone", nondecreasing(&unitary).to_string());
    m.set("p_sink_min_coupling", sink[0]);
    m.set("p_sink_max_coupling", *sink.last().unwrap());
    m.set("max_p_b_min_coupling", unitary[0]);
    m.set("max_p_b_max_coupling", *unitary.last().unwrap());
    Ok(())
}
