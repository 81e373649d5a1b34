//! Runs the capacity-balancing refinement from a k-means++ decomposition of
//! all nodes and prints its trajectory.
//!
//!     cargo run --release --example cgn_refinement

use cgn::capacity::network_report;
use cgn::clustering::{cgn_refine, kmeans_pp, RefinementConfig};
use cgn::placement::generate_network;
use cgn::{FadingBatch, PhysicalParams, PlacementSpec};

fn main() -> cgn::Result<()> {
    let net = generate_network(&PlacementSpec { seed: 11, ..Default::default() }, PhysicalParams::default())?;
    let initial = kmeans_pp(&net.positions(), 40, 11)?;
    let refine_batch = FadingBatch::new(200, 11)?;
    let config = RefinementConfig::default();

    let (partition, trace) = cgn_refine(&net, &initial, &refine_batch, &config)?;
    println!(
        "initial: C_min {:.4}, C_max {:.4}, spread {:.4}",
        trace.initial_c_min,
        trace.initial_c_max,
        trace.initial_spread()
    );
    for r in trace.records.iter().take(10) {
        let grow = r.grow.map_or("-".to_string(), |m| format!("{}:{}->{}", m.node, m.from, m.to));
        let shrink = r.shrink.map_or("-".to_string(), |m| format!("{}:{}->{}", m.node, m.from, m.to));
        println!(
            "iter {:>3}: grow {grow:<12} shrink {shrink:<12} C_min {:.4} C_max {:.4}",
            r.iteration, r.c_min, r.c_max
        );
    }
    println!(
        "stopped after {} iterations ({:?}); best C_min {:.4} at iteration {}",
        trace.iterations(),
        trace.stop,
        trace.best_c_min,
        trace.best_iteration
    );

    // score on an independent batch
    let report_batch = FadingBatch::new(1000, 12)?;
    let before = network_report(&net, &initial, &report_batch)?;
    let after = network_report(&net, &partition, &report_batch)?;
    println!("held-out batch: C_min {:.4} -> {:.4}, C_var {:.5} -> {:.5}", before.c_min, after.c_min, before.c_var, after.c_var);
    Ok(())
}
