//! Trains a PPO agent to build a 21-cell chain for the sink target.
//!
//! ```bash
//! cargo run --release --example train_sink_chain -- [rounds] [seed]
//! ```

use std::time::Instant;

use qchain::mdp::{ChainEnv, DisorderModel, EpisodeConfig};
use qchain::policy::{train, PpoHyperparams};
use qchain::PhysicalConfig;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let rounds: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(300);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let physical = PhysicalConfig::default();
    let factory = || ChainEnv::new(physical.clone(), EpisodeConfig::default(), DisorderModel::None);
    let hp = PpoHyperparams {
        max_episodes: rounds,
        ..PpoHyperparams::no_error()
    };

    let start = Instant::now();
    let out = train(factory, &hp, seed)?;
    for entry in out.log.iter().step_by((rounds / 20).max(1)) {
        println!(
            "round {:>5}  mean G0 {:.4}  mean transfer {:.4}  particles {:.2}  best {:.4}",
            entry.episode, entry.mean_return, entry.mean_transfer, entry.mean_particles, entry.best_transfer
        );
    }
    println!(
        "best pattern {} with p_sink(T) = {:.4} (first seen in round {}), {:.1}s",
        out.best_pattern,
        out.best_transfer,
        out.best_episode,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
