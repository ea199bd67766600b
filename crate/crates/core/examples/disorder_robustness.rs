//! Monte-Carlo transfer of fixed patterns under positional disorder, next to
//! the fully filled chain.
//!
//! ```bash
//! cargo run --release --example disorder_robustness -- [samples] [seed]
//! ```

use qchain::experiment::{EVERY_FIFTH, EVERY_FOURTH, SINK_OPTIMUM};
use qchain::search::{evaluate_samples, filled_baseline};
use qchain::{DisorderModel, Pattern, PhysicalConfig, TargetMode};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let config = PhysicalConfig::default();
    let models = [
        DisorderModel::Uniform { r: 0.1 },
        DisorderModel::Uniform { r: 0.25 },
        DisorderModel::Uniform { r: 0.5 },
        DisorderModel::TruncatedNormal { sigma: 0.1 },
    ];
    let patterns = [SINK_OPTIMUM, EVERY_FOURTH, EVERY_FIFTH];

    for model in &models {
        println!("{}", model.label());
        for text in patterns {
            let pattern: Pattern = text.parse()?;
            let stats = evaluate_samples(&pattern, &config, model, samples, seed, false)?;
            println!("  {text}  {:.4} ± {:.4}", stats.mean, stats.stderr);
        }
        let filled = filled_baseline(&config, TargetMode::SinkFinal, model, samples, seed, false)?;
        println!("  {:<21}  {:.4} ± {:.4}", "filled", filled.mean, filled.stderr);
    }
    Ok(())
}
