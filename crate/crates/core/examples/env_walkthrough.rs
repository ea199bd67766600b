//! Steps the chain-building environment by hand: builds the every-fourth
//! chain under truncated-normal disorder with adaptive encoding and prints
//! reward, transfer and observation after each placement.
//!
//! ```bash
//! cargo run --release --example env_walkthrough -- [seed]
//! ```

use qchain::{ChainEnv, DisorderModel, EpisodeConfig, PhysicalConfig};

fn main() -> anyhow::Result<()> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let episode = EpisodeConfig {
        adaptive_encoding: true,
        ..EpisodeConfig::default()
    };
    let mut env = ChainEnv::new(
        PhysicalConfig::default(),
        episode,
        DisorderModel::TruncatedNormal { sigma: 0.1 },
    )?;
    env.reset(seed)?;
    println!("start  transfer {:.4}", env.transfer());
    let mut ret = 0.0;
    for cell in [4, 8, 12, 16] {
        let out = env.step(cell)?;
        ret += out.reward;
        let obs: String = out
            .observation
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    '.'
                } else if v == 1.0 {
                    '#'
                } else {
                    '+'
                }
            })
            .collect();
        println!(
            "cell {cell:>2}  reward {:+.4}  transfer {:.4}  {obs}  done {}",
            out.reward, out.transfer, out.done
        );
        if out.done {
            break;
        }
    }
    println!("return {ret:.4}, {} transfer evaluations", env.evaluations());
    Ok(())
}
