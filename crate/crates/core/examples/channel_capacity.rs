//! Estimates the uplink sum capacity of a few clusters with the exact
//! estimator (full interference covariance) and the asymptotic one
//! (interference replaced by its diagonal mean), on a shared fading batch.
//!
//!     cargo run --release --example channel_capacity

use cgn::capacity::{cluster_capacity_asymptotic, cluster_capacity_exact, interference_diagonal};
use cgn::clustering::kmeans_pp;
use cgn::model::cluster_views;
use cgn::placement::generate_network;
use cgn::{FadingBatch, PhysicalParams, PlacementSpec};

fn main() -> cgn::Result<()> {
    let spec = PlacementSpec { side_length: 150.0, seed: 1, ..Default::default() };
    let net = generate_network(&spec, PhysicalParams::default())?;
    let partition = kmeans_pp(&net.positions(), 60, 1)?;
    let batch = FadingBatch::new(500, 1)?;

    println!("{} BSs, {} users, 60 clusters, {} fading samples", net.num_bs(), net.num_users(), batch.num_samples());
    println!("cluster  M_l  K_l  mean interference   exact (se)          asymptotic (se)     gap");
    for view in cluster_views(&net, &partition)?.iter().take(8) {
        let exact = cluster_capacity_exact(&net, view, &batch)?;
        let asym = cluster_capacity_asymptotic(&net, view, &batch)?;
        let diag = interference_diagonal(&net, view);
        let mean_diag = diag.iter().sum::<f64>() / diag.len().max(1) as f64;
        println!(
            "{:>7}  {:>3}  {:>3}  {:>17.3e}   {:.4} ({:.4})     {:.4} ({:.4})     {:+.2}%",
            view.cluster_id,
            view.num_bs(),
            view.num_users(),
            mean_diag,
            exact.mean,
            exact.std_error,
            asym.mean,
            asym.std_error,
            100.0 * (asym.mean - exact.mean) / exact.mean.max(f64::MIN_POSITIVE)
        );
    }
    Ok(())
}
