use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mlp::log_softmax;
use super::{ppo_update, Mlp, PolicyParameters, PpoHyperparams};
use crate::error::{Error, Result};
use crate::exec::{derive_seed, map_indexed, rng_from_seed};
use crate::mdp::ChainEnv;
use crate::pattern::Pattern;
use crate::stats::SampleStats;

/// One episode as seen by the learner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub observations: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub value_estimates: Vec<f64>,
    pub action_log_probs: Vec<f64>,
    /// `Σ γ^k R_{k+1}`.
    pub episode_return: f64,
    pub final_transfer: f64,
    pub final_pattern: Option<Pattern>,
    /// Best configuration visited during the episode (the endpoints-only
    /// chain counts as visited).
    pub best_transfer: f64,
    pub best_pattern: Option<Pattern>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSelection {
    /// Draw from the policy distribution.
    Sample,
    /// Always take the most probable cell (lowest index on ties).
    Greedy,
}

fn select_action(probs_log: &[f64], selection: ActionSelection, rng: &mut crate::exec::Rng) -> usize {
    match selection {
        ActionSelection::Greedy => {
            let mut best = 0;
            for (k, &lp) in probs_log.iter().enumerate() {
                if lp > probs_log[best] {
                    best = k;
                }
            }
            best
        }
        ActionSelection::Sample => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (k, lp) in probs_log.iter().enumerate() {
                acc += lp.exp();
                if u < acc {
                    return k;
                }
            }
            probs_log.len() - 1
        }
    }
}

/// Plays one episode. `seed` fixes both the disorder draws (through
/// [`ChainEnv::reset`]) and a separate action-sampling stream.
pub fn run_episode(
    env: &mut ChainEnv,
    actor: &Mlp,
    critic: Option<&Mlp>,
    seed: u64,
    selection: ActionSelection,
    gamma: f64,
) -> Result<Trajectory> {
    env.reset(seed)?;
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let mut traj = Trajectory {
        best_transfer: env.transfer(),
        best_pattern: Some(env.state().pattern()),
        ..Default::default()
    };
    let mut discount = 1.0;
    while !env.is_done() {
        let obs = env.observation().to_vec();
        let lp = log_softmax(&actor.forward(&obs).logits);
        if lp.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged("actor produced non-finite log-probabilities".into()));
        }
        let action = select_action(&lp, selection, &mut rng);
        let value = critic.map(|c| c.predict(&obs)[0]).unwrap_or(0.0);
        let out = env.step(action)?;
        traj.episode_return += discount * out.reward;
        discount *= gamma;
        traj.observations.push(obs);
        traj.actions.push(action);
        traj.rewards.push(out.reward);
        traj.value_estimates.push(value);
        traj.action_log_probs.push(lp[action]);
        if out.transfer > traj.best_transfer {
            traj.best_transfer = out.transfer;
            traj.best_pattern = Some(env.state().pattern());
        }
    }
    traj.final_transfer = env.transfer();
    traj.final_pattern = Some(env.state().pattern());
    Ok(traj)
}

/// Aggregates of one training round (one episode on each agent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub mean_return: f64,
    pub mean_transfer: f64,
    pub mean_particles: f64,
    /// Best transfer seen so far in training.
    pub best_transfer: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub log: Vec<EpisodeLog>,
    pub best_pattern: Pattern,
    pub best_transfer: f64,
    /// Round in which the best configuration was first visited.
    pub best_episode: usize,
    pub params: PolicyParameters,
    pub evaluations: u64,
    pub seed: u64,
}

impl TrainingOutcome {
    pub fn rounds(&self) -> usize {
        self.log.len()
    }

    /// Mean of the per-round mean returns over the last `window` rounds.
    pub fn final_mean_return(&self, window: usize) -> f64 {
        let tail = &self.log[self.log.len().saturating_sub(window)..];
        tail.iter().map(|l| l.mean_return).sum::<f64>() / tail.len() as f64
    }
}

fn collect_round(
    envs: &mut [ChainEnv],
    params: &PolicyParameters,
    round_seed: u64,
    gamma: f64,
    single_thread: bool,
) -> Result<Vec<Trajectory>> {
    let play = |(i, env): (usize, &mut ChainEnv)| {
        run_episode(
            env,
            &params.actor,
            Some(&params.critic),
            derive_seed(round_seed, i as u64),
            ActionSelection::Sample,
            gamma,
        )
    };
    if single_thread {
        envs.iter_mut().enumerate().map(play).collect()
    } else {
        envs.par_iter_mut().enumerate().map(play).collect()
    }
}

/// Trains a fresh policy. Every random stream derives from `seed`, and
/// trajectories are gathered in agent order, so results are identical with
/// or without the thread pool.
pub fn train<F>(env_factory: F, hp: &PpoHyperparams, seed: u64) -> Result<TrainingOutcome>
where
    F: Fn() -> Result<ChainEnv>,
{
    hp.validate()?;
    let mut envs = (0..hp.n_parallel_envs)
        .map(|_| env_factory())
        .collect::<Result<Vec<_>>>()?;
    let n_cells = envs[0].n_actions();
    if envs.iter().any(|e| e.n_actions() != n_cells) {
        return Err(Error::InvalidConfig("environments disagree on cell count".into()));
    }
    let mut params = PolicyParameters::new(n_cells, hp, &mut rng_from_seed(derive_seed(seed, 0)));
    let mut log = Vec::with_capacity(hp.max_episodes);
    let mut best: Option<(Pattern, f64, usize)> = None;

    for round in 0..hp.max_episodes {
        let round_seed = derive_seed(seed, round as u64 + 1);
        let batch = collect_round(&mut envs, &params, round_seed, hp.discount_gamma, hp.single_thread)?;

        for traj in &batch {
            if best.as_ref().is_none_or(|(_, t, _)| traj.best_transfer > *t) {
                best = Some((traj.best_pattern.clone().unwrap(), traj.best_transfer, round));
            }
        }
        let n = batch.len() as f64;
        log.push(EpisodeLog {
            episode: round,
            mean_return: batch.iter().map(|t| t.episode_return).sum::<f64>() / n,
            mean_transfer: batch.iter().map(|t| t.final_transfer).sum::<f64>() / n,
            mean_particles: batch
                .iter()
                .map(|t| t.final_pattern.as_ref().map_or(0, |p| p.particle_count()) as f64)
                .sum::<f64>()
                / n,
            best_transfer: best.as_ref().map_or(0.0, |b| b.1),
        });

        if batch.iter().any(|t| !t.is_empty()) {
            let mut rng = rng_from_seed(derive_seed(round_seed, u64::MAX));
            ppo_update(&mut params, &batch, hp, &mut rng)?;
        }

        if hp.early_stop && plateaued(&log, hp, envs[0].episode_config().success_threshold) {
            break;
        }
    }
    let evaluations = envs.iter().map(|e| e.evaluations()).sum();
    let (best_pattern, best_transfer, best_episode) = best.expect("at least one round");
    Ok(TrainingOutcome {
        log,
        best_pattern,
        best_transfer,
        best_episode,
        params,
        evaluations,
        seed,
    })
}

fn plateaued(log: &[EpisodeLog], hp: &PpoHyperparams, threshold: f64) -> bool {
    let w = hp.plateau_window;
    if w == 0 || log.len() < 2 * w || log.last().unwrap().best_transfer <= threshold {
        return false;
    }
    let mean = |s: &[EpisodeLog]| s.iter().map(|l| l.mean_return).sum::<f64>() / s.len() as f64;
    let recent = mean(&log[log.len() - w..]);
    let previous = mean(&log[log.len() - 2 * w..log.len() - w]);
    (recent - previous).abs() < hp.plateau_tolerance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEvaluation {
    pub transfer: SampleStats,
    pub mean_particles: f64,
    /// Dynamics evaluations spent on the episodes.
    pub evaluations: u64,
}

/// Runs `episodes` fresh episodes of a fixed policy and summarises the final
/// transfer and particle count.
pub fn evaluate_policy<F>(
    actor: &Mlp,
    env_factory: F,
    episodes: usize,
    seed: u64,
    selection: ActionSelection,
    single_thread: bool,
) -> Result<PolicyEvaluation>
where
    F: Fn() -> Result<ChainEnv> + Sync + Send,
{
    let results = map_indexed(episodes, single_thread, |i| -> Result<(f64, usize, u64)> {
        let mut env = env_factory()?;
        let t = run_episode(&mut env, actor, None, derive_seed(seed, i as u64), selection, 1.0)?;
        Ok((
            t.final_transfer,
            t.final_pattern.map_or(0, |p| p.particle_count()),
            env.evaluations(),
        ))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let transfers: Vec<f64> = results.iter().map(|r| r.0).collect();
    let particles = results.iter().map(|r| r.1 as f64).sum::<f64>() / results.len() as f64;
    Ok(PolicyEvaluation {
        transfer: SampleStats::from_values(&transfers),
        mean_particles: particles,
        evaluations: results.iter().map(|r| r.2).sum(),
    })
}
