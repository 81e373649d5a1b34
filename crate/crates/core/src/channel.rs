//! Path loss with near-field saturation and counter-based Rayleigh fading.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{ClusterView, Network, PhysicalParams};
use crate::seed::{counter_hash, open_unit};

/// Amplitude gain `beta = max(d, d0)^(-alpha/2)`.
pub fn large_scale_fading(distance: f64, params: &PhysicalParams) -> f64 {
    distance
        .max(params.distance_threshold)
        .powf(-params.path_loss_alpha / 2.0)
}

/// Large-scale gain between base station `bs` and user `user` (node ids).
pub fn link_gain(network: &Network, bs: usize, user: usize) -> f64 {
    let d = network.position(bs).distance(&network.position(user));
    large_scale_fading(d, network.params())
}

/// A fixed set of small-scale fading realizations.
///
/// The gain for `(sample, bs, user)` is a pure function of the seed and the
/// three indices, so any subset can be generated in any order (or in
/// parallel) and agree bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FadingBatch {
    num_samples: usize,
    seed: u64,
}

impl FadingBatch {
    pub fn new(num_samples: usize, seed: u64) -> Result<Self> {
        if num_samples == 0 {
            return Err(Error::Config("a fading batch needs at least one sample".into()));
        }
        Ok(FadingBatch { num_samples, seed })
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// CN(0, 1) draw: independent real and imaginary parts, each
    /// `Normal(0, 1/2)`, by Box-Muller on two counter-hashed uniforms.
    pub fn gamma(&self, sample: usize, bs: usize, user: usize) -> Complex64 {
        let key = [sample as u64, bs as u64, user as u64];
        let h1 = counter_hash(self.seed, key);
        let h2 = crate::seed::mix64(h1 ^ 0x6a09_e667_f3bc_c909);
        let u1 = open_unit(h1);
        let u2 = open_unit(h2);
        // |gamma|^2 = -ln(u1) is Exp(1)
        let r = (-u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }
}

/// In-cluster channel `H_l` (`M_l x K_l`) and interference matrix `Pi_l`
/// (`M_l x (K - K_l)`) for one fading sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrices {
    pub h: CMatrix,
    pub pi: CMatrix,
    /// User ids labelling the columns of `pi`, ascending.
    pub outside_users: Vec<usize>,
}

pub(crate) fn check_view(network: &Network, view: &ClusterView) -> Result<()> {
    let bad_bs = view.bs_ids.iter().any(|&id| id >= network.num_bs());
    let bad_user = view
        .user_ids
        .iter()
        .any(|&id| id < network.num_bs() || id >= network.len());
    if bad_bs || bad_user {
        return Err(Error::Validation(format!(
            "cluster {} does not match the network's node kinds",
            view.cluster_id
        )));
    }
    Ok(())
}

/// Users of the network that are not members of `view`.
pub fn outside_users(network: &Network, view: &ClusterView) -> Vec<usize> {
    let mut inside = view.user_ids.iter().peekable();
    network
        .user_ids()
        .filter(|u| {
            if inside.peek() == Some(&u) {
                inside.next();
                false
            } else {
                true
            }
        })
        .collect()
}

/// Fills `h[i][j] = beta * gamma(sample)` for the given base stations and users.
pub(crate) fn channel_block(
    network: &Network,
    batch: &FadingBatch,
    sample: usize,
    bs_ids: &[usize],
    user_ids: &[usize],
) -> CMatrix {
    let mut m = CMatrix::zeros(bs_ids.len(), user_ids.len());
    for (i, &b) in bs_ids.iter().enumerate() {
        for (j, &u) in user_ids.iter().enumerate() {
            m[(i, j)] = batch.gamma(sample, b, u) * link_gain(network, b, u);
        }
    }
    m
}

pub fn sample_channel(
    network: &Network,
    view: &ClusterView,
    batch: &FadingBatch,
    sample_index: usize,
) -> Result<ChannelMatrices> {
    check_view(network, view)?;
    if sample_index >= batch.num_samples() {
        return Err(Error::Validation(format!(
            "sample {sample_index} out of range for a batch of {}",
            batch.num_samples()
        )));
    }
    let outside = outside_users(network, view);
    Ok(ChannelMatrices {
        h: channel_block(network, batch, sample_index, &view.bs_ids, &view.user_ids),
        pi: channel_block(network, batch, sample_index, &view.bs_ids, &outside),
        outside_users: outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cluster_views, Partition, Position};

    fn table_params() -> PhysicalParams {
        PhysicalParams::default()
    }

    #[test]
    fn path_loss_values() {
        let p = table_params();
        assert!((large_scale_fading(5.0, &p) - 0.04).abs() < 1e-15);
        assert!((large_scale_fading(2.0, &p) - 0.04).abs() < 1e-15);
        assert!((large_scale_fading(10.0, &p) - 0.01).abs() < 1e-15);
        assert!((large_scale_fading(0.0, &p) - 0.04).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn path_loss_is_monotone(a in 0.0..1e4f64, b in 0.0..1e4f64) {
            let p = table_params();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            proptest::prop_assert!(large_scale_fading(hi, &p) <= large_scale_fading(lo, &p));
            proptest::prop_assert!(large_scale_fading(lo, &p) <= 0.04 + 1e-15);
        }
    }

    #[test]
    fn fading_has_unit_power() {
        let batch = FadingBatch::new(1, 11).unwrap();
        let n = 40_000;
        let vals: Vec<f64> = (0..n).map(|s| batch.gamma(s, 3, 9).norm_sqr()).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se, "mean power {mean}, se {se}");
        let re_mean = (0..n).map(|s| batch.gamma(s, 3, 9).re).sum::<f64>() / n as f64;
        assert!(re_mean.abs() < 4.0 * (0.5 / n as f64).sqrt());
    }

    fn small_network() -> Network {
        let bs = [Position::new(0.0, 0.0), Position::new(20.0, 0.0)];
        let users = [
            Position::new(1.0, 1.0),
            Position::new(19.0, 2.0),
            Position::new(8.0, -3.0),
        ];
        Network::new(&bs, &users, table_params()).unwrap()
    }

    #[test]
    fn column_counts_and_extremes() {
        let net = small_network();
        let batch = FadingBatch::new(4, 5).unwrap();
        let whole = cluster_views(&net, &Partition::single(net.len())).unwrap();
        let ch = sample_channel(&net, &whole[0], &batch, 0).unwrap();
        assert_eq!(ch.pi.cols(), 0);
        assert_eq!(ch.h.cols(), 3);

        let part = Partition::new(2, vec![0, 1, 1, 1, 1]).unwrap();
        let views = cluster_views(&net, &part).unwrap();
        let ch0 = sample_channel(&net, &views[0], &batch, 2).unwrap();
        assert_eq!(ch0.h.cols(), 0);
        assert_eq!(ch0.pi.cols(), 3);
        for v in &views {
            let ch = sample_channel(&net, v, &batch, 1).unwrap();
            assert_eq!(ch.h.cols() + ch.pi.cols(), net.num_users());
        }
        assert!(sample_channel(&net, &views[0], &batch, 4).is_err());
    }

    #[test]
    fn entries_follow_gain_times_fading() {
        let net = small_network();
        let batch = FadingBatch::new(3, 8).unwrap();
        let part = Partition::new(2, vec![0, 1, 0, 1, 1]).unwrap();
        let views = cluster_views(&net, &part).unwrap();
        let ch = sample_channel(&net, &views[1], &batch, 2).unwrap();
        let again = sample_channel(&net, &views[1], &batch, 2).unwrap();
        assert_eq!(ch, again);
        let cap = 5f64.powf(-2.0);
        assert_eq!(ch.outside_users, vec![2]);
        let expected = batch.gamma(2, 1, 2) * link_gain(&net, 1, 2);
        assert_eq!(ch.pi[(0, 0)], expected);
        for j in 0..ch.h.cols() {
            let u = views[1].user_ids[j];
            let g = batch.gamma(2, 1, u);
            assert!(ch.h[(0, j)].norm() <= cap * g.norm() + 1e-15);
        }
    }

    #[test]
    fn mismatched_view_rejected() {
        let net = small_network();
        let batch = FadingBatch::new(1, 0).unwrap();
        let view = ClusterView {
            cluster_id: 0,
            bs_ids: vec![2],
            user_ids: vec![],
            centroid: None,
        };
        assert!(matches!(sample_channel(&net, &view, &batch, 0), Err(Error::Validation(_))));
    }
}
