//! Compares the refinement with both baselines on several networks and
//! writes the full artifact set (nodes, assignments, per-cluster capacities,
//! metrics) to the given directory (default `out/compare`).
//!
//!     cargo run --release --example compare_architectures -- /tmp/compare gaussian

use cgn::experiments::{run_compare, ExperimentConfig};
use cgn::SpatialDistribution;

fn main() -> cgn::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "out/compare".into());
    let distribution = match args.next().as_deref() {
        Some("gaussian") => SpatialDistribution::Gaussian,
        _ => SpatialDistribution::Uniform,
    };
    let mut config = ExperimentConfig { repetitions: 4, output_dir: Some(out.clone().into()), ..Default::default() };
    config.placement.distribution = distribution;

    let outcome = run_compare(&config)?;
    println!("{distribution:?}, {} repetitions, written to {out}", config.repetitions);
    println!("method          C_min           C_avg           C_var");
    for row in &outcome.summary {
        println!(
            "{:<14}  {:.4}+-{:.4}  {:.4}+-{:.4}  {:.5}+-{:.5}",
            row.method, row.c_min_mean, row.c_min_std, row.c_avg_mean, row.c_avg_std, row.c_var_mean, row.c_var_std
        );
    }
    Ok(())
}
