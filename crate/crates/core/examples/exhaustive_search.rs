//! Ranks every chain with up to `k` added particles and compares the winner
//! with greedy construction and the filled chain.
//!
//! ```bash
//! cargo run --release --example exhaustive_search -- [k] [unitary]
//! ```

use std::time::Instant;

use qchain::search::{brute_force, filled_baseline, greedy_build, SearchBudget};
use qchain::{DisorderModel, PhysicalConfig, TargetMode};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let mode = match args.next().as_deref() {
        Some("unitary") => TargetMode::UnitaryMax,
        _ => TargetMode::SinkFinal,
    };
    let config = PhysicalConfig::default();
    let budget = SearchBudget::deterministic(k, mode);

    let start = Instant::now();
    let report = brute_force(&config, &budget)?;
    println!("{} patterns in {:.2}s", report.patterns, start.elapsed().as_secs_f64());
    for score in report.ranked.iter().take(10) {
        println!(
            "  {}  particles {:>2}  transfer {:.5}",
            score.pattern, score.particles, score.transfer
        );
    }

    let greedy = greedy_build(&config, &budget)?;
    println!(
        "greedy  {}  transfer {:.5}  picks {:?}",
        greedy.pattern, greedy.transfer, greedy.picks
    );
    let filled = filled_baseline(&config, mode, &DisorderModel::None, 0, 0, false)?;
    println!("filled  transfer {:.5}", filled.mean);
    Ok(())
}
