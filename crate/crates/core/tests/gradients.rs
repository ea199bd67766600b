mod common;

use common::{
    actor, critic, kink_margin, manual_forward, numeric_gradient, rel_error, samples, smooth_obs, with_params,
};
use qchain::exec::rng_from_seed;
use qchain::policy::{
    entropy, log_softmax, surrogate_gradient, surrogate_objective, value_loss, value_loss_gradient, PpoHyperparams,
};

const TOL: f64 = 1e-5;

#[test]
fn log_prob_gradient_matches_finite_differences() {
    let mut rng = rng_from_seed(1);
    for seed in 0..20 {
        let net = actor(seed);
        let x = smooth_obs(&mut rng, &net);
        for action in [0, 3, 5] {
            let analytic = net.log_prob_gradient(&x, action);
            let numeric = numeric_gradient(&net.params, |p| {
                log_softmax(&with_params(&net, p).forward(&x).logits)[action]
            });
            let e = rel_error(&analytic, &numeric);
            assert!(e < TOL, "seed {seed} action {action}: rel error {e:e}");
        }
    }
}

#[test]
fn entropy_gradient_matches_finite_differences() {
    let mut rng = rng_from_seed(2);
    for seed in 0..20 {
        let net = actor(seed);
        let x = smooth_obs(&mut rng, &net);
        let analytic = net.entropy_gradient(&x);
        let numeric = numeric_gradient(&net.params, |p| entropy(&with_params(&net, p).forward(&x).logits));
        let e = rel_error(&analytic, &numeric);
        assert!(e < TOL, "seed {seed}: rel error {e:e}");
    }
}

#[test]
fn value_gradient_matches_finite_differences() {
    let mut rng = rng_from_seed(3);
    for seed in 0..20 {
        let net = critic(seed);
        let x = smooth_obs(&mut rng, &net);
        let analytic = net.value_gradient(&x);
        let numeric = numeric_gradient(&net.params, |p| with_params(&net, p).predict(&x)[0]);
        let e = rel_error(&analytic, &numeric);
        assert!(e < TOL, "seed {seed}: rel error {e:e}");
    }
}

#[test]
fn surrogate_gradient_matches_finite_differences() {
    for entropy_coefficient in [0.0, 0.01, 0.3] {
        let hp = PpoHyperparams {
            entropy_coefficient,
            ..PpoHyperparams::default()
        };
        for seed in 0..20 {
            let net = actor(seed + 10);
            let batch = samples(&net, seed);
            let analytic = surrogate_gradient(&net, &batch, &hp);
            let numeric = numeric_gradient(&net.params, |p| surrogate_objective(&with_params(&net, p), &batch, &hp));
            let e = rel_error(&analytic, &numeric);
            assert!(e < TOL, "c_H {entropy_coefficient} seed {seed}: rel error {e:e}");
        }
    }
}

#[test]
fn value_loss_gradient_matches_finite_differences() {
    for seed in 0..20 {
        let net = critic(seed + 20);
        let mut batch = samples(&actor(seed), seed);
        batch.retain(|s| kink_margin(&net, &s.observation) > 1e-3);
        let analytic = value_loss_gradient(&net, &batch);
        let numeric = numeric_gradient(&net.params, |p| value_loss(&with_params(&net, p), &batch));
        let e = rel_error(&analytic, &numeric);
        assert!(e < TOL, "seed {seed}: rel error {e:e}");
    }
}

#[test]
fn saturated_samples_contribute_no_surrogate_gradient() {
    let hp = PpoHyperparams {
        entropy_coefficient: 0.0,
        ..PpoHyperparams::default()
    };
    let net = actor(4);
    let mut batch = samples(&net, 4);
    for (i, s) in batch.iter_mut().enumerate() {
        let lp = log_softmax(&net.forward(&s.observation).logits)[s.action];
        // ratio 1.65 with positive advantage, or 0.61 with negative advantage
        if i % 2 == 0 {
            s.old_log_prob = lp - 0.5;
            s.advantage = s.advantage.abs() + 0.1;
        } else {
            s.old_log_prob = lp + 0.5;
            s.advantage = -s.advantage.abs() - 0.1;
        }
    }
    let g = surrogate_gradient(&net, &batch, &hp);
    assert!(g.iter().all(|&x| x == 0.0));
}

#[test]
fn layout_oracle_matches_forward_pass() {
    let mut rng = rng_from_seed(8);
    for seed in 0..5 {
        for net in [actor(seed), critic(seed)] {
            let x = common::random_obs(&mut rng, 6);
            let (out, _) = manual_forward(&net, &x);
            let lib = net.forward(&x).logits;
            assert!(out.iter().zip(&lib).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}
