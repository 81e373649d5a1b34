use super::kmeans::kmeans_pp;
use crate::error::{Error, Result};
use crate::model::{Network, Partition};

/// Nearest base station of every user, lowest base-station id on ties.
pub fn nearest_bs(network: &Network) -> Vec<usize> {
    network
        .user_ids()
        .map(|u| {
            let p = network.position(u);
            network
                .bs_ids()
                .fold((0, f64::INFINITY), |(best, bd), b| {
                    let d = p.distance(&network.position(b));
                    if d < bd {
                        (b, d)
                    } else {
                        (best, bd)
                    }
                })
                .0
        })
        .collect()
}

fn with_users_on_nearest_bs(network: &Network, num_clusters: usize, bs_cluster: &[usize]) -> Result<Partition> {
    let mut assignment = bs_cluster.to_vec();
    assignment.extend(nearest_bs(network).into_iter().map(|b| bs_cluster[b]));
    Partition::new(num_clusters, assignment)
}

/// One cluster per base station; each user joins its nearest base station.
pub fn cellular_partition(network: &Network) -> Result<Partition> {
    let m = network.num_bs();
    if m == 0 {
        return Err(Error::Config("cellular partition needs at least one base station".into()));
    }
    let bs_cluster: Vec<usize> = (0..m).collect();
    with_users_on_nearest_bs(network, m, &bs_cluster)
}

/// k-means++ over base-station positions only; users then follow their
/// nearest base station.
pub fn bs_clustering_partition(network: &Network, num_clusters: usize, seed: u64) -> Result<Partition> {
    if num_clusters > network.num_bs() {
        return Err(Error::Config(format!(
            "BS-clustering with L = {num_clusters} needs at least that many base stations, found {}",
            network.num_bs()
        )));
    }
    let bs_positions: Vec<_> = network.bs_ids().map(|b| network.position(b)).collect();
    let bs_part = kmeans_pp(&bs_positions, num_clusters, seed)?;
    with_users_on_nearest_bs(network, num_clusters, bs_part.assignment())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PhysicalParams, Position};
    use crate::placement::{generate_network, PlacementSpec};

    fn pos(x: f64, y: f64) -> Position {
        Position::new(x, y)
    }

    #[test]
    fn single_bs_owns_everything() {
        let net = Network::new(&[pos(0.0, 0.0)], &[pos(1.0, 1.0), pos(50.0, 3.0)], PhysicalParams::default()).unwrap();
        let part = cellular_partition(&net).unwrap();
        assert_eq!(part.num_clusters(), 1);
        assert!(part.assignment().iter().all(|&c| c == 0));
    }

    #[test]
    fn equidistant_user_joins_lowest_bs() {
        let bs: Vec<Position> = (0..8)
            .map(|i| match i {
                3 => pos(-10.0, 0.0),
                7 => pos(10.0, 0.0),
                _ => pos(100.0 + i as f64 * 20.0, 100.0),
            })
            .collect();
        let net = Network::new(&bs, &[pos(0.0, 0.0)], PhysicalParams::default()).unwrap();
        let part = cellular_partition(&net).unwrap();
        assert_eq!(part.cluster_of(8), 3);
    }

    #[test]
    fn isolated_bs_has_no_users() {
        let net = Network::new(
            &[pos(0.0, 0.0), pos(500.0, 500.0)],
            &[pos(1.0, 0.0), pos(2.0, 2.0)],
            PhysicalParams::default(),
        )
        .unwrap();
        let part = cellular_partition(&net).unwrap();
        assert_eq!(part.cluster_sizes(), vec![3, 1]);
        assert!(cellular_partition(&Network::new(&[], &[pos(0.0, 0.0)], PhysicalParams::default()).unwrap()).is_err());
    }

    #[test]
    fn bs_clustering_with_l_equal_m_is_cellular() {
        let spec = PlacementSpec { explicit_counts: Some((40, 12)), seed: 4, ..Default::default() };
        let net = generate_network(&spec, PhysicalParams::default()).unwrap();
        assert_eq!(bs_clustering_partition(&net, 12, 9).unwrap(), cellular_partition(&net).unwrap());
    }

    #[test]
    fn co_located_bs_single_cluster() {
        let net = Network::new(&[pos(5.0, 5.0); 4], &[pos(0.0, 0.0), pos(9.0, 1.0)], PhysicalParams::default()).unwrap();
        let part = bs_clustering_partition(&net, 1, 0).unwrap();
        assert!(part.assignment().iter().all(|&c| c == 0));
    }

    #[test]
    fn bs_clustering_rejects_l_above_m() {
        let net = Network::new(&[pos(5.0, 5.0)], &[pos(0.0, 0.0)], PhysicalParams::default()).unwrap();
        assert!(bs_clustering_partition(&net, 2, 0).is_err());
    }

    #[test]
    fn users_follow_their_nearest_bs() {
        let spec = PlacementSpec { seed: 17, ..Default::default() };
        let net = generate_network(&spec, PhysicalParams::default()).unwrap();
        let a = bs_clustering_partition(&net, 40, 3).unwrap();
        assert_eq!(a, bs_clustering_partition(&net, 40, 3).unwrap());
        for (u, b) in net.user_ids().zip(nearest_bs(&net)) {
            assert_eq!(a.cluster_of(u), a.cluster_of(b));
        }
    }
}
