//! Populations of a donor/acceptor pair with and without the sink, and the
//! same pair at strong coupling.
//!
//! ```bash
//! cargo run --release --example two_site_dynamics
//! ```

use qchain::{evaluate_transfer, ChainGeometry, Pattern, PhysicalConfig};

fn main() -> anyhow::Result<()> {
    let pair = Pattern::endpoints(21);
    let cases = [
        ("sink, J = 0.1", PhysicalConfig::default()),
        ("unitary, J = 0.1", PhysicalConfig::unitary()),
        ("sink, J = 1.0", PhysicalConfig::default().with_coupling(1.0)),
    ];
    for (label, config) in cases {
        let geometry = ChainGeometry::from_pattern(&pair, &config)?;
        let result = evaluate_transfer(&geometry, &config)?;
        println!(
            "{label}: target {:.4} (max on grid {:.4})",
            result.target_value(),
            result.target_population_max
        );
        for sample in result.time_series.iter().step_by(5) {
            let pops: Vec<String> = sample.populations.iter().map(|p| format!("{p:.4}")).collect();
            println!("  t = {:>5.2}  [{}]", sample.time, pops.join(", "));
        }
    }
    Ok(())
}
