use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::mlp::{entropy_logit_gradient, log_softmax};
use super::{compute_gae, Adam, Mlp, MlpSpec, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoHyperparams {
    pub clip_epsilon: f64,
    /// Episodes collected per update, one per parallel agent.
    pub n_parallel_envs: usize,
    pub epochs_per_update: usize,
    pub minibatch_size: usize,
    pub discount_gamma: f64,
    pub gae_lambda: f64,
    pub lr_actor: f64,
    pub lr_critic: f64,
    /// Training rounds; each round runs one episode on every agent.
    pub max_episodes: usize,
    pub entropy_coefficient: f64,
    pub advantage_normalization: bool,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    /// Stop once the best transfer beats the success threshold and the mean
    /// return has plateaued over `plateau_window` rounds.
    pub early_stop: bool,
    pub plateau_window: usize,
    pub plateau_tolerance: f64,
    pub single_thread: bool,
}

impl Default for PpoHyperparams {
    fn default() -> Self {
        Self::no_error()
    }
}

impl PpoHyperparams {
    /// Sink or unitary runs without positional errors.
    pub fn no_error() -> Self {
        PpoHyperparams {
            clip_epsilon: 0.2,
            n_parallel_envs: 100,
            epochs_per_update: 4,
            minibatch_size: 128,
            discount_gamma: 0.99,
            gae_lambda: 0.95,
            lr_actor: 3e-4,
            lr_critic: 5e-4,
            max_episodes: 1499,
            entropy_coefficient: 0.01,
            advantage_normalization: true,
            actor_hidden: vec![128, 128],
            critic_hidden: vec![64, 64],
            early_stop: false,
            plateau_window: 100,
            plateau_tolerance: 0.01,
            single_thread: false,
        }
    }

    /// Uniform positional errors: smaller minibatches and a larger critic.
    pub fn uniform_error() -> Self {
        PpoHyperparams {
            minibatch_size: 64,
            lr_actor: 1e-4,
            lr_critic: 1e-4,
            critic_hidden: vec![128, 128, 128],
            ..Self::no_error()
        }
    }

    pub fn normal_error() -> Self {
        PpoHyperparams {
            lr_actor: 1e-4,
            lr_critic: 1e-4,
            critic_hidden: vec![128, 128, 128],
            ..Self::no_error()
        }
    }

    /// Adaptive η encoding: one more hidden layer on both networks.
    pub fn adaptive() -> Self {
        PpoHyperparams {
            actor_hidden: vec![128, 128, 128],
            critic_hidden: vec![128, 128, 128, 128],
            ..Self::normal_error()
        }
    }

    /// Unitary target: λ = 0.98 and the slower learning rates.
    pub fn unitary() -> Self {
        PpoHyperparams {
            gae_lambda: 0.98,
            lr_actor: 8e-5,
            lr_critic: 1e-4,
            ..Self::no_error()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.clip_epsilon > 0.0
            && (0.0..=1.0).contains(&self.discount_gamma)
            && (0.0..=1.0).contains(&self.gae_lambda)
            && self.n_parallel_envs > 0
            && self.epochs_per_update > 0
            && self.minibatch_size > 0
            && self.lr_actor > 0.0
            && self.lr_critic > 0.0
            && self.entropy_coefficient >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid PPO hyperparameters: {self:?}")))
        }
    }
}

/// Actor and critic with their own optimisers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParameters {
    pub actor: Mlp,
    pub critic: Mlp,
    pub actor_opt: Adam,
    pub critic_opt: Adam,
}

impl PolicyParameters {
    /// Fresh networks; the actor's output layer starts at 1% scale so the
    /// initial policy is close to uniform over cells.
    pub fn new(n_cells: usize, hp: &PpoHyperparams, rng: &mut Rng) -> Self {
        let actor = Mlp::new(MlpSpec::actor(n_cells, &hp.actor_hidden), rng, 0.01);
        let critic = Mlp::new(MlpSpec::critic(n_cells, &hp.critic_hidden), rng, 0.5);
        let actor_opt = Adam::new(actor.params.len(), hp.lr_actor);
        let critic_opt = Adam::new(critic.params.len(), hp.lr_critic);
        PolicyParameters {
            actor,
            critic,
            actor_opt,
            critic_opt,
        }
    }
}

/// One pooled training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub observation: Vec<f64>,
    pub action: usize,
    pub old_log_prob: f64,
    pub advantage: f64,
    pub value_target: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub surrogate: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub samples: usize,
}

/// GAE over each trajectory, pooled, with optional per-batch normalisation.
pub fn prepare_samples(batch: &[Trajectory], hp: &PpoHyperparams) -> Vec<Sample> {
    let mut samples = Vec::new();
    for traj in batch {
        let (adv, targets) = compute_gae(traj, hp.discount_gamma, hp.gae_lambda);
        for k in 0..traj.actions.len() {
            samples.push(Sample {
                observation: traj.observations[k].clone(),
                action: traj.actions[k],
                old_log_prob: traj.action_log_probs[k],
                advantage: adv[k],
                value_target: targets[k],
            });
        }
    }
    if hp.advantage_normalization && samples.len() > 1 {
        let n = samples.len() as f64;
        let mean = samples.iter().map(|s| s.advantage).sum::<f64>() / n;
        let var = samples.iter().map(|s| (s.advantage - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        for s in &mut samples {
            s.advantage = if std > 1e-12 {
                (s.advantage - mean) / (std + 1e-8)
            } else {
                s.advantage - mean
            };
        }
    }
    samples
}

/// Mean clipped surrogate plus entropy bonus of `actor` on `samples`.
pub fn surrogate_objective(actor: &Mlp, samples: &[Sample], hp: &PpoHyperparams) -> f64 {
    let mut total = 0.0;
    for s in samples {
        let logits = actor.forward(&s.observation).logits;
        let lp = log_softmax(&logits);
        let ratio = (lp[s.action] - s.old_log_prob).exp();
        let clipped = ratio.clamp(1.0 - hp.clip_epsilon, 1.0 + hp.clip_epsilon);
        let h = -lp.iter().map(|l| l.exp() * l).sum::<f64>();
        total += (ratio * s.advantage).min(clipped * s.advantage) + hp.entropy_coefficient * h;
    }
    total / samples.len() as f64
}

/// Gradient of `−surrogate` with respect to the actor logits for one sample;
/// also returns (surrogate term, entropy, clipped?, log-ratio).
fn actor_logit_gradient(logits: &[f64], s: &Sample, hp: &PpoHyperparams) -> (Vec<f64>, f64, f64, bool, f64) {
    let lp = log_softmax(logits);
    let log_ratio = lp[s.action] - s.old_log_prob;
    let ratio = log_ratio.exp();
    let clipped_ratio = ratio.clamp(1.0 - hp.clip_epsilon, 1.0 + hp.clip_epsilon);
    let unclipped = ratio * s.advantage;
    let clipped = clipped_ratio * s.advantage;
    // The minimum selects the clipped branch only when it is strictly smaller,
    // which happens exactly when the ratio sits outside the trust region on
    // the side the advantage rewards; that branch is constant in θ.
    let active = unclipped <= clipped;
    let mut g = vec![0.0; logits.len()];
    if active {
        for (k, gk) in g.iter_mut().enumerate() {
            let indicator = if k == s.action { 1.0 } else { 0.0 };
            *gk = -s.advantage * ratio * (indicator - lp[k].exp());
        }
    }
    if hp.entropy_coefficient > 0.0 {
        for (gk, eg) in g.iter_mut().zip(entropy_logit_gradient(logits)) {
            *gk -= hp.entropy_coefficient * eg;
        }
    }
    let h = -lp.iter().map(|l| l.exp() * l).sum::<f64>();
    (g, unclipped.min(clipped), h, !active, log_ratio)
}

/// Gradient of [`surrogate_objective`] with respect to the actor parameters.
pub fn surrogate_gradient(actor: &Mlp, samples: &[Sample], hp: &PpoHyperparams) -> Vec<f64> {
    let mut grad = vec![0.0; actor.params.len()];
    let m = samples.len() as f64;
    for s in samples {
        let f = actor.forward(&s.observation);
        let (g, ..) = actor_logit_gradient(&f.logits, s, hp);
        let g: Vec<f64> = g.iter().map(|x| -x / m).collect();
        actor.backward(&f, &g, &mut grad);
    }
    grad
}

/// Mean squared error of the critic against the value targets.
pub fn value_loss(critic: &Mlp, samples: &[Sample]) -> f64 {
    samples
        .iter()
        .map(|s| (critic.predict(&s.observation)[0] - s.value_target).powi(2))
        .sum::<f64>()
        / samples.len() as f64
}

/// Gradient of [`value_loss`] with respect to the critic parameters.
pub fn value_loss_gradient(critic: &Mlp, samples: &[Sample]) -> Vec<f64> {
    let mut grad = vec![0.0; critic.params.len()];
    let m = samples.len() as f64;
    for s in samples {
        let f = critic.forward(&s.observation);
        critic.backward(&f, &[2.0 * (f.logits[0] - s.value_target) / m], &mut grad);
    }
    grad
}

/// `epochs_per_update` passes of shuffled minibatch updates of both networks.
pub fn ppo_update(
    params: &mut PolicyParameters,
    batch: &[Trajectory],
    hp: &PpoHyperparams,
    rng: &mut Rng,
) -> Result<UpdateStats> {
    let samples = prepare_samples(batch, hp);
    if samples.is_empty() {
        return Err(Error::InvalidConfig("ppo_update needs a non-empty batch".into()));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut stats = UpdateStats {
        samples: samples.len(),
        ..Default::default()
    };
    let mut seen = 0usize;
    let mut actor_grad = vec![0.0; params.actor.params.len()];
    let mut critic_grad = vec![0.0; params.critic.params.len()];

    for epoch in 0..hp.epochs_per_update {
        order.shuffle(rng);
        for (mb_idx, chunk) in order.chunks(hp.minibatch_size).enumerate() {
            actor_grad.iter_mut().for_each(|g| *g = 0.0);
            critic_grad.iter_mut().for_each(|g| *g = 0.0);
            let m = chunk.len() as f64;
            let (mut surr, mut vloss, mut ent, mut kl, mut clipped) = (0.0, 0.0, 0.0, 0.0, 0usize);
            for &i in chunk {
                let s = &samples[i];
                let fa = params.actor.forward(&s.observation);
                let (mut g, term, h, was_clipped, log_ratio) = actor_logit_gradient(&fa.logits, s, hp);
                g.iter_mut().for_each(|x| *x /= m);
                params.actor.backward(&fa, &g, &mut actor_grad);
                surr += term;
                ent += h;
                kl -= log_ratio;
                clipped += was_clipped as usize;

                let fc = params.critic.forward(&s.observation);
                let err = fc.logits[0] - s.value_target;
                vloss += err * err;
                params.critic.backward(&fc, &[2.0 * err / m], &mut critic_grad);
            }
            if !(surr.is_finite() && vloss.is_finite()) {
                return Err(Error::Diverged(format!(
                    "non-finite loss at epoch {epoch}, minibatch {mb_idx}: surrogate sum {surr}, value loss sum {vloss}"
                )));
            }
            params.actor_opt.step(&mut params.actor.params, &actor_grad);
            params.critic_opt.step(&mut params.critic.params, &critic_grad);
            stats.surrogate += surr;
            stats.value_loss += vloss;
            stats.entropy += ent;
            stats.approx_kl += kl;
            stats.clip_fraction += clipped as f64;
            seen += chunk.len();
        }
    }
    params.actor.check_finite()?;
    params.critic.check_finite()?;
    let n = seen as f64;
    stats.surrogate /= n;
    stats.value_loss /= n;
    stats.entropy /= n;
    stats.approx_kl /= n;
    stats.clip_fraction /= n;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::rng_from_seed;
    use rand::Rng as _;

    fn synthetic_batch(actor: &Mlp, critic: &Mlp, seed: u64, episodes: usize) -> Vec<Trajectory> {
        let mut rng = rng_from_seed(seed);
        let n = actor.spec.input_dim;
        (0..episodes)
            .map(|_| {
                let len = rng.random_range(1..6);
                let mut t = Trajectory::default();
                for _ in 0..len {
                    let obs: Vec<f64> = (0..n).map(|_| rng.random_range(0..2) as f64).collect();
                    let lp = log_softmax(&actor.forward(&obs).logits);
                    let a = rng.random_range(0..n);
                    t.value_estimates.push(critic.predict(&obs)[0]);
                    t.observations.push(obs);
                    t.actions.push(a);
                    t.action_log_probs.push(lp[a]);
                    t.rewards.push(rng.random_range(-0.5..1.0));
                }
                t
            })
            .collect()
    }

    fn small_params(seed: u64) -> (PolicyParameters, PpoHyperparams) {
        let hp = PpoHyperparams {
            actor_hidden: vec![16, 16],
            critic_hidden: vec![16],
            minibatch_size: 16,
            ..PpoHyperparams::no_error()
        };
        let mut rng = rng_from_seed(seed);
        let mut p = PolicyParameters::new(7, &hp, &mut rng);
        // Larger output layer so the policy is not uniform.
        p.actor = Mlp::new(MlpSpec::actor(7, &hp.actor_hidden), &mut rng, 1.0);
        p.actor_opt = Adam::new(p.actor.params.len(), hp.lr_actor);
        (p, hp)
    }

    #[test]
    fn zero_advantages_without_entropy_leave_actor_unchanged() {
        let (mut p, mut hp) = small_params(1);
        hp.entropy_coefficient = 0.0;
        hp.advantage_normalization = false;
        hp.discount_gamma = 0.0;
        let mut batch = synthetic_batch(&p.actor, &p.critic, 2, 5);
        // r_k = V(s_k) with γ = 0 makes every TD error, hence every advantage, zero.
        for t in &mut batch {
            t.rewards = t.value_estimates.clone();
        }
        let before = p.actor.clone();
        let critic_before = p.critic.clone();
        let mut rng = rng_from_seed(3);
        ppo_update(&mut p, &batch, &hp, &mut rng).unwrap();
        assert_eq!(p.actor, before);
        // Targets equal the estimates, so the critic gradient is zero too.
        assert_eq!(p.critic, critic_before);
    }

    #[test]
    fn saturated_ratio_has_zero_surrogate_gradient() {
        let hp = PpoHyperparams {
            entropy_coefficient: 0.0,
            ..PpoHyperparams::no_error()
        };
        let logits = vec![0.3, -0.2, 1.0];
        let lp = log_softmax(&logits);
        for (ratio, advantage, expect_zero) in [
            (1.5, 1.0, true),
            (0.5, -1.0, true),
            (1.5, -1.0, false),
            (0.5, 1.0, false),
            (1.1, 1.0, false),
        ] {
            let s = Sample {
                observation: vec![],
                action: 1,
                old_log_prob: lp[1] - f64::ln(ratio),
                advantage,
                value_target: 0.0,
            };
            let (g, _, _, clipped, _) = actor_logit_gradient(&logits, &s, &hp);
            assert_eq!(clipped, expect_zero);
            assert_eq!(g.iter().all(|&x| x == 0.0), expect_zero, "ratio {ratio}, A {advantage}");
        }
    }

    #[test]
    fn one_update_increases_surrogate() {
        let (mut p, mut hp) = small_params(4);
        hp.lr_actor = 1e-4;
        hp.epochs_per_update = 1;
        hp.minibatch_size = 10_000;
        let batch = synthetic_batch(&p.actor, &p.critic, 5, 20);
        let samples = prepare_samples(&batch, &hp);
        let before = surrogate_objective(&p.actor, &samples, &hp);
        ppo_update(&mut p, &batch, &hp, &mut rng_from_seed(6)).unwrap();
        let after = surrogate_objective(&p.actor, &samples, &hp);
        assert!(after > before, "{before} -> {after}");
    }

    #[test]
    fn normalised_advantages() {
        let (p, hp) = small_params(7);
        let batch = synthetic_batch(&p.actor, &p.critic, 8, 10);
        let s = prepare_samples(&batch, &hp);
        let n = s.len() as f64;
        let mean = s.iter().map(|x| x.advantage).sum::<f64>() / n;
        let var = s.iter().map(|x| (x.advantage - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_batch_rejected() {
        let (mut p, hp) = small_params(9);
        assert!(ppo_update(&mut p, &[], &hp, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn non_finite_loss_is_diverged() {
        let (mut p, hp) = small_params(10);
        let mut batch = synthetic_batch(&p.actor, &p.critic, 11, 2);
        batch[0].rewards[0] = f64::NAN;
        let err = ppo_update(
            &mut p,
            &batch,
            &PpoHyperparams {
                advantage_normalization: false,
                ..hp
            },
            &mut rng_from_seed(0),
        );
        assert!(matches!(err, Err(Error::Diverged(_))));
    }
}
