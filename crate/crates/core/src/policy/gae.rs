use super::Trajectory;

/// Advantages and value targets for one terminated episode.
///
/// `δ_k = r_k + γ V(s_{k+1}) − V(s_k)` with `V = 0` after the last step, and
/// `A_k = Σ_l (γλ)^l δ_{k+l}`; targets are `A_k + V(s_k)`.
pub fn gae_from_slices(rewards: &[f64], values: &[f64], gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rewards.len(), values.len());
    let n = rewards.len();
    let mut advantages = vec![0.0; n];
    let mut running = 0.0;
    for k in (0..n).rev() {
        let next_value = if k + 1 < n { values[k + 1] } else { 0.0 };
        let delta = rewards[k] + gamma * next_value - values[k];
        running = delta + gamma * lambda * running;
        advantages[k] = running;
    }
    let targets = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    (advantages, targets)
}

pub fn compute_gae(traj: &Trajectory, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    gae_from_slices(&traj.rewards, &traj.value_estimates, gamma, lambda)
}
