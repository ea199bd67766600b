//! Runs a named preset through the experiment runner and prints its checks.
//!
//! ```bash
//! cargo run --release --example run_preset -- [name]
//! ```

use qchain::experiment::{preset, presets, run};

fn main() -> anyhow::Result<()> {
    let Some(name) = std::env::args().nth(1) else {
        for p in presets() {
            println!("{:<24} {}", p.name, p.summary);
        }
        return Ok(());
    };
    let mut spec = preset(&name)?;
    spec.output_dir = Some(std::env::temp_dir().join(format!("qchain-{name}")));
    let record = run(&spec)?;
    for check in &record.checks {
        let mark = if check.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:<24} observed {:?}", check.metric, check.observed);
    }
    println!("summary at {}", record.summary_path().display());
    Ok(())
}
