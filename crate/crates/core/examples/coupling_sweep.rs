//! Two-site transfer against the coupling strength, with and without sink.
//!
//! ```bash
//! cargo run --release --example coupling_sweep
//! ```

use qchain::experiment::SweepSpec;
use qchain::{evaluate_transfer, ChainGeometry, Pattern, PhysicalConfig};

fn main() -> anyhow::Result<()> {
    let pair = Pattern::endpoints(21);
    println!("{:>8}  {:>10}  {:>10}", "J", "p_sink(T)", "max p_B");
    for j in SweepSpec::default().grid() {
        let sink = PhysicalConfig::default().with_coupling(j);
        let unitary = PhysicalConfig::unitary().with_coupling(j);
        let a = evaluate_transfer(&ChainGeometry::from_pattern(&pair, &sink)?, &sink)?;
        let b = evaluate_transfer(&ChainGeometry::from_pattern(&pair, &unitary)?, &unitary)?;
        println!("{j:>8.4}  {:>10.5}  {:>10.5}", a.target_value(), b.target_value());
    }
    Ok(())
}
