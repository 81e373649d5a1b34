//! The two reference decompositions: cellular (one base station per
//! cluster) and BS-clustering (k-means++ over base stations, users on their
//! nearest base station).
//!
//!     cargo run --release --example baselines

use cgn::capacity::network_report;
use cgn::clustering::{bs_clustering_partition, cellular_partition};
use cgn::placement::generate_network;
use cgn::{FadingBatch, PhysicalParams, PlacementSpec};

fn main() -> cgn::Result<()> {
    let net = generate_network(&PlacementSpec { seed: 3, ..Default::default() }, PhysicalParams::default())?;
    let batch = FadingBatch::new(300, 3)?;

    let cellular = cellular_partition(&net)?;
    let idle = cellular.cluster_sizes().iter().filter(|&&s| s == 1).count();
    let report = network_report(&net, &cellular, &batch)?;
    println!(
        "cellular      L = {:>3}: {idle} BSs serve no user, C_min {:.4}, C_avg {:.4}, C_var {:.5}",
        cellular.num_clusters(),
        report.c_min,
        report.c_avg,
        report.c_var
    );

    for l in [10, 40, 100] {
        let part = bs_clustering_partition(&net, l, 3)?;
        let report = network_report(&net, &part, &batch)?;
        println!(
            "bs_clustering L = {l:>3}: C_min {:.4}, C_avg {:.4}, C_var {:.5}",
            report.c_min, report.c_avg, report.c_var
        );
    }
    Ok(())
}
