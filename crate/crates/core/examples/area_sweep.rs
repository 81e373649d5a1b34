//! Sweeps the side length of the square area at fixed node densities and
//! writes `sweep.csv` and `sweep-runs.csv`.
//!
//!     cargo run --release --example area_sweep -- /tmp/sweep

use cgn::experiments::{run_sweep, ExperimentConfig};

fn main() -> cgn::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/sweep".into());
    let config = ExperimentConfig {
        repetitions: 3,
        sweep: Some(vec![50.0, 75.0, 100.0]),
        output_dir: Some(out.clone().into()),
        ..Default::default()
    };
    let outcome = run_sweep(&config)?;
    println!("a      method          C_min    C_avg    C_var");
    for row in &outcome.rows {
        println!(
            "{:<5}  {:<14}  {:.4}   {:.4}   {:.5}",
            row.a, row.method, row.c_min_mean, row.c_avg_mean, row.c_var_mean
        );
    }
    println!("written to {out}");
    Ok(())
}
