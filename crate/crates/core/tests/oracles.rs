//! Checks against values computed independently of the crate.

use cgn::capacity::{cluster_capacity_asymptotic, cluster_capacity_exact, network_report};
use cgn::clustering::{enumerate_reports, exhaustive_maxmin, DEFAULT_ENUMERATION_CAP};
use cgn::model::cluster_views;
use cgn::placement::generate_network;
use cgn::{ClusterView, FadingBatch, Network, Partition, PhysicalParams, PlacementSpec, Position};

/// Exponential integral E1(x) for small positive x by its power series.
fn exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..60 {
        term *= -x / k as f64;
        sum += term / k as f64;
    }
    -EULER_GAMMA - x.ln() - sum
}

#[test]
fn series_matches_tabulated_e1() {
    // Abramowitz and Stegun, table 5.1: E1(1) = 0.219383934
    assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-12);
}

/// One base station and one user at unit large-scale gain with unit SNR:
/// the capacity is E log2(1 + X) for X ~ Exp(1), which equals
/// e * E1(1) / ln 2.
#[test]
fn single_link_capacity_matches_closed_form() {
    let params = PhysicalParams {
        transmit_power: 1.0,
        noise_power: 1.0,
        path_loss_alpha: 4.0,
        distance_threshold: 1.0,
    };
    let net = Network::new(&[Position::new(0.0, 0.0)], &[Position::new(0.5, 0.0)], params).unwrap();
    let view = ClusterView::from_members(&net, 0, &[0, 1]).unwrap();
    let batch = FadingBatch::new(200_000, 17).unwrap();
    let expected = std::f64::consts::E * exp_integral_e1(1.0) / std::f64::consts::LN_2;
    assert!((expected - 0.860_347_382_270_886_8).abs() < 1e-12);

    let asym = cluster_capacity_asymptotic(&net, &view, &batch).unwrap();
    assert!(
        (asym.mean - expected).abs() < 4.0 * asym.std_error,
        "estimate {} +- {} vs {expected}",
        asym.mean,
        asym.std_error
    );
    let exact = cluster_capacity_exact(&net, &view, &batch).unwrap();
    assert!((exact.mean - asym.mean).abs() < 1e-12);
}

/// A layout and its mirror image must have statistically equal capacities.
#[test]
fn mirrored_clusters_have_equal_capacity() {
    let a = 40.0;
    let left_bs = [Position::new(5.0, 10.0), Position::new(12.0, 30.0)];
    let left_users = [Position::new(8.0, 14.0), Position::new(3.0, 25.0), Position::new(15.0, 20.0)];
    let mirror = |p: &Position| Position::new(a - p.x, p.y);
    let bs: Vec<Position> = left_bs.iter().chain(left_bs.iter().map(mirror).collect::<Vec<_>>().iter()).cloned().collect();
    let users: Vec<Position> = left_users
        .iter()
        .chain(left_users.iter().map(mirror).collect::<Vec<_>>().iter())
        .cloned()
        .collect();
    let net = Network::new(&bs, &users, PhysicalParams::default()).unwrap();
    // ids: BS 0..4 (left 0, 1; right 2, 3), users 4..10 (left 4..7, right 7..10)
    let part = Partition::new(2, vec![0, 0, 1, 1, 0, 0, 0, 1, 1, 1]).unwrap();
    let report = network_report(&net, &part, &FadingBatch::new(20_000, 3).unwrap()).unwrap();
    let (l, r) = (report.per_cluster[0], report.per_cluster[1]);
    let tolerance = 4.0 * (l.std_error.powi(2) + r.std_error.powi(2)).sqrt();
    assert!(l.mean > 0.0);
    assert!((l.mean - r.mean).abs() < tolerance, "{} vs {} (tol {tolerance})", l.mean, r.mean);
}

/// Exact and asymptotic estimators on a moderately dense network stay close.
#[test]
fn asymptotic_estimator_tracks_exact_capacity() {
    let spec = PlacementSpec { side_length: 60.0, seed: 5, ..Default::default() };
    let net = generate_network(&spec, PhysicalParams::default()).unwrap();
    let part = cgn::clustering::kmeans_pp(&net.positions(), 12, 5).unwrap();
    let batch = FadingBatch::new(300, 5).unwrap();
    for view in cluster_views(&net, &part).unwrap() {
        let exact = cluster_capacity_exact(&net, &view, &batch).unwrap();
        let asym = cluster_capacity_asymptotic(&net, &view, &batch).unwrap();
        if exact.mean > 0.0 {
            assert!(
                (asym.mean - exact.mean).abs() / exact.mean < 0.1,
                "cluster {}: {} vs {}",
                view.cluster_id,
                asym.mean,
                exact.mean
            );
        }
    }
}

/// Across small instances the max-min partition sits among the partitions
/// with the smallest capacity spread much more often than chance.
#[test]
fn maxmin_partitions_have_small_spread() {
    let instances = 40;
    let (mut in_decile, mut below_median) = (0, 0);
    for i in 0..instances {
        let spec = PlacementSpec {
            explicit_counts: Some((3, 3)),
            side_length: 10.0,
            seed: 1000 + i,
            ..Default::default()
        };
        let net = generate_network(&spec, PhysicalParams::default()).unwrap();
        let batch = FadingBatch::new(300, i).unwrap();
        let best = exhaustive_maxmin(&net, 2, &batch, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut spreads: Vec<f64> = enumerate_reports(&net, 2, &batch, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .iter()
            .map(|(_, r)| r.spread())
            .collect();
        spreads.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let decile = spreads[(spreads.len() as f64 * 0.1).ceil() as usize - 1];
        let median = spreads[spreads.len() / 2];
        in_decile += usize::from(best.report.spread() <= decile);
        below_median += usize::from(best.report.spread() < median);
    }
    // 31 partitions per instance, so the decile holds 4 of them (~13%).
    assert!(in_decile * 2 >= instances as usize, "in smallest-spread decile on {in_decile}/{instances}");
    assert!(below_median * 10 >= 9 * instances as usize, "below median spread on {below_median}/{instances}");
}
