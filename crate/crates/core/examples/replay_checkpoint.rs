//! Replays a saved policy greedily and prints the chain built in each episode.
//!
//! ```bash
//! cargo run --release --example replay_checkpoint -- runs/adaptive-normal/checkpoint_seed0.json 10 adaptive
//! ```
//!
//! The optional third argument selects the environment: `sink` (default),
//! `adaptive` (truncated-normal disorder with transfer-encoded state) or
//! `unitary`.

use qchain::mdp::{ChainEnv, DisorderModel, EpisodeConfig};
use qchain::policy::{log_softmax, Checkpoint};
use qchain::{PhysicalConfig, TargetMode};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .ok_or_else(|| anyhow::anyhow!("usage: replay_checkpoint <checkpoint> [episodes] [env]"))?;
    let episodes: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let kind = args.next().unwrap_or_else(|| "sink".into());

    let ckpt = Checkpoint::load(path.as_ref())?;
    let (physical, episode, disorder) = match kind.as_str() {
        "adaptive" => (
            PhysicalConfig::default(),
            EpisodeConfig {
                adaptive_encoding: true,
                ..Default::default()
            },
            DisorderModel::TruncatedNormal { sigma: 0.1 },
        ),
        "unitary" => (
            PhysicalConfig::unitary(),
            EpisodeConfig {
                reward_mode: TargetMode::UnitaryMax,
                ..Default::default()
            },
            DisorderModel::None,
        ),
        _ => (PhysicalConfig::default(), EpisodeConfig::default(), DisorderModel::None),
    };
    let mut env = ChainEnv::new(physical, episode, disorder)?;
    let actor = &ckpt.params.actor;

    for ep in 0..episodes {
        env.reset(ep)?;
        let mut steps = Vec::new();
        while !env.is_done() {
            let lp = log_softmax(&actor.forward(env.observation()).logits);
            let action = (0..lp.len()).max_by(|&a, &b| lp[a].total_cmp(&lp[b])).unwrap();
            let out = env.step(action)?;
            steps.push(format!(
                "{action}{}:{:.3}",
                if out.placed { "" } else { "(noop)" },
                out.transfer
            ));
        }
        println!(
            "episode {ep}: {}  final {} -> {:.4}",
            steps.join(" "),
            env.state().pattern(),
            env.transfer()
        );
    }
    Ok(())
}
