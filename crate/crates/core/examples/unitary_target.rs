//! Compares the sink and unitary figures of merit on the two optimised
//! patterns and the filled chain.
//!
//! ```bash
//! cargo run --release --example unitary_target
//! ```

use qchain::experiment::{SINK_OPTIMUM, UNITARY_OPTIMUM};
use qchain::{evaluate_transfer, ChainGeometry, Pattern, PhysicalConfig};

fn main() -> anyhow::Result<()> {
    let sink = PhysicalConfig::default();
    let unitary = PhysicalConfig::unitary();
    let filled = Pattern::filled(21).to_string();
    println!("{:<21}  {:>8}  {:>8}", "pattern", "p_sink(T)", "max p_B");
    for text in [SINK_OPTIMUM, UNITARY_OPTIMUM, filled.as_str()] {
        let pattern: Pattern = text.parse()?;
        let a = evaluate_transfer(&ChainGeometry::from_pattern(&pattern, &sink)?, &sink)?;
        let b = evaluate_transfer(&ChainGeometry::from_pattern(&pattern, &unitary)?, &unitary)?;
        println!("{text}  {:>9.4}  {:>8.4}", a.target_value(), b.target_value());
    }
    Ok(())
}
