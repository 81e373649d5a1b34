//! Uplink cluster sum capacity.
//!
//! The production estimator replaces the interference covariance
//! `Pi Pi^H` by its diagonal limit (sum of squared large-scale gains of the
//! outside users), which depends only on geometry. The exact estimator keeps
//! the full sampled `Pi Pi^H` and is used to check the approximation.
//! Capacities are in bits per channel use.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{channel_block, check_view, link_gain, outside_users, FadingBatch};
use crate::error::{Error, Result};
use crate::linalg::{log_det_identity_plus_gram, CMatrix};
use crate::model::{cluster_views, ClusterView, Network, Partition};

/// Monte Carlo estimate of one cluster's sum capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub num_samples: usize,
}

impl CapacityEstimate {
    pub fn zero(num_samples: usize) -> Self {
        CapacityEstimate {
            mean: 0.0,
            std_error: 0.0,
            num_samples,
        }
    }

    /// Mean and standard error of per-sample values, summed in order.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        CapacityEstimate {
            mean,
            std_error,
            num_samples: n,
        }
    }
}

/// Per-cluster capacities and the network-level summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    pub per_cluster: Vec<CapacityEstimate>,
    pub c_min: f64,
    pub c_max: f64,
    pub c_avg: f64,
    /// Population variance of the per-cluster means.
    pub c_var: f64,
}

impl NetworkReport {
    pub fn from_estimates(per_cluster: Vec<CapacityEstimate>) -> Self {
        let (c_min, c_max, c_avg, c_var) = summarize(per_cluster.iter().map(|e| e.mean));
        NetworkReport {
            per_cluster,
            c_min,
            c_max,
            c_avg,
            c_var,
        }
    }

    pub fn spread(&self) -> f64 {
        self.c_max - self.c_min
    }

    pub fn means(&self) -> Vec<f64> {
        self.per_cluster.iter().map(|e| e.mean).collect()
    }
}

/// `(min, max, mean, population variance)` of a nonempty sequence.
pub fn summarize(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64, f64) {
    let n = values.clone().count() as f64;
    let min = values.clone().fold(f64::INFINITY, f64::min);
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    let avg = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - avg).powi(2)).sum::<f64>() / n;
    (min, max, avg, var)
}

/// `pi_mm = sum over users outside the cluster of beta_mk^2`, one entry per
/// base station of the cluster.
pub fn interference_diagonal(network: &Network, view: &ClusterView) -> Vec<f64> {
    let outside = outside_users(network, view);
    view.bs_ids
        .iter()
        .map(|&b| {
            outside
                .iter()
                .map(|&u| link_gain(network, b, u).powi(2))
                .sum()
        })
        .collect()
}

fn check_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!("{what} evaluated to {value}")))
    }
}

/// Rows scaled by `sqrt(P / (N0 + P pi_mm))`: the fading-free part of
/// `sqrt(P) D^-1/2 H`.
fn whitened_gains(network: &Network, bs_ids: &[usize], user_ids: &[usize], interference: &[f64]) -> Vec<f64> {
    let params = network.params();
    let mut out = Vec::with_capacity(bs_ids.len() * user_ids.len());
    for (&b, &pi) in bs_ids.iter().zip(interference) {
        let w = (params.transmit_power / (params.noise_power + params.transmit_power * pi)).sqrt();
        out.extend(user_ids.iter().map(|&u| w * link_gain(network, b, u)));
    }
    out
}

fn whitened_sample(
    gains: &[f64],
    bs_ids: &[usize],
    user_ids: &[usize],
    batch: &FadingBatch,
    sample: usize,
) -> Result<f64> {
    let mut g = CMatrix::zeros(bs_ids.len(), user_ids.len());
    let k = user_ids.len();
    for (i, &b) in bs_ids.iter().enumerate() {
        for (j, &u) in user_ids.iter().enumerate() {
            g[(i, j)] = batch.gamma(sample, b, u) * gains[i * k + j];
        }
    }
    let nats = log_det_identity_plus_gram(&g)?;
    check_finite(nats / std::f64::consts::LN_2, "asymptotic capacity sample")
}

/// `log2 det(I + P D^-1/2 H H^H D^-1/2)` for one fading sample, with
/// `D = N0 I + P diag(interference)`.
pub fn asymptotic_sample(
    network: &Network,
    bs_ids: &[usize],
    user_ids: &[usize],
    interference: &[f64],
    batch: &FadingBatch,
    sample: usize,
) -> Result<f64> {
    if bs_ids.is_empty() || user_ids.is_empty() {
        return Ok(0.0);
    }
    let gains = whitened_gains(network, bs_ids, user_ids, interference);
    whitened_sample(&gains, bs_ids, user_ids, batch, sample)
}

/// Capacity with a caller-supplied interference diagonal.
pub fn capacity_with_diagonal(
    network: &Network,
    bs_ids: &[usize],
    user_ids: &[usize],
    interference: &[f64],
    batch: &FadingBatch,
) -> Result<CapacityEstimate> {
    if bs_ids.is_empty() || user_ids.is_empty() {
        return Ok(CapacityEstimate::zero(batch.num_samples()));
    }
    if interference.len() != bs_ids.len() {
        return Err(Error::Validation(format!(
            "interference diagonal has {} entries for {} base stations",
            interference.len(),
            bs_ids.len()
        )));
    }
    if let Some(bad) = interference.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Numerical(format!("interference entry {bad}")));
    }
    let gains = whitened_gains(network, bs_ids, user_ids, interference);
    let values = (0..batch.num_samples())
        .map(|s| whitened_sample(&gains, bs_ids, user_ids, batch, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityEstimate::from_samples(&values))
}

/// Production estimator: Monte Carlo mean of the diagonal-interference
/// log-det capacity.
pub fn cluster_capacity_asymptotic(
    network: &Network,
    view: &ClusterView,
    batch: &FadingBatch,
) -> Result<CapacityEstimate> {
    check_view(network, view)?;
    let diag = interference_diagonal(network, view);
    capacity_with_diagonal(network, &view.bs_ids, &view.user_ids, &diag, batch)
}

/// `log2 det(I + P (N0 I + P Pi Pi^H)^-1 H H^H)` for one sample, computed as
/// `log det(N0 I + P Pi Pi^H + P H H^H) - log det(N0 I + P Pi Pi^H)`.
pub fn exact_sample(
    network: &Network,
    view: &ClusterView,
    outside: &[usize],
    batch: &FadingBatch,
    sample: usize,
) -> Result<f64> {
    if view.bs_ids.is_empty() || view.user_ids.is_empty() {
        return Ok(0.0);
    }
    let params = network.params();
    let p = params.transmit_power;
    let mut noise_plus_interference = channel_block(network, batch, sample, &view.bs_ids, outside).gram();
    noise_plus_interference.scale(p);
    noise_plus_interference.add_diagonal(params.noise_power);
    let mut total = channel_block(network, batch, sample, &view.bs_ids, &view.user_ids).gram();
    total.scale(p);
    total.add_assign(&noise_plus_interference);
    let nats = total.hpd_log_det()? - noise_plus_interference.hpd_log_det()?;
    check_finite(nats / std::f64::consts::LN_2, "exact capacity sample")
}

/// Oracle estimator with the full sampled interference covariance.
pub fn cluster_capacity_exact(
    network: &Network,
    view: &ClusterView,
    batch: &FadingBatch,
) -> Result<CapacityEstimate> {
    check_view(network, view)?;
    if view.bs_ids.is_empty() || view.user_ids.is_empty() {
        return Ok(CapacityEstimate::zero(batch.num_samples()));
    }
    let outside = outside_users(network, view);
    let values = (0..batch.num_samples())
        .into_par_iter()
        .map(|s| exact_sample(network, view, &outside, batch, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityEstimate::from_samples(&values))
}

/// Asymptotic capacity of every cluster plus min / max / mean / variance.
///
/// Clusters are evaluated in parallel; each cluster's samples are reduced
/// sequentially, so the result does not depend on the thread count.
pub fn network_report(
    network: &Network,
    partition: &Partition,
    batch: &FadingBatch,
) -> Result<NetworkReport> {
    let views = cluster_views(network, partition)?;
    let per_cluster = views
        .par_iter()
        .map(|v| cluster_capacity_asymptotic(network, v, batch))
        .collect::<Result<Vec<_>>>()?;
    Ok(NetworkReport::from_estimates(per_cluster))
}

/// Largest off-diagonal magnitude of the sampled `Pi Pi^H` divided by its
/// smallest diagonal entry. Shrinks toward zero as the number of outside
/// users grows.
pub fn lemma1_offdiagonal_ratio(
    network: &Network,
    view: &ClusterView,
    batch: &FadingBatch,
    sample_index: usize,
) -> Result<f64> {
    check_view(network, view)?;
    if view.num_bs() < 2 {
        return Err(Error::Validation(format!(
            "off-diagonal ratio needs at least two base stations, cluster {} has {}",
            view.cluster_id,
            view.num_bs()
        )));
    }
    if sample_index >= batch.num_samples() {
        return Err(Error::Validation(format!("sample {sample_index} out of range")));
    }
    let outside = outside_users(network, view);
    if outside.is_empty() {
        return Err(Error::Validation(format!(
            "cluster {} has no outside users, so the interference matrix is empty",
            view.cluster_id
        )));
    }
    let gram = channel_block(network, batch, sample_index, &view.bs_ids, &outside).gram();
    let n = view.num_bs();
    let min_diag = (0..n).map(|i| gram[(i, i)].re).fold(f64::INFINITY, f64::min);
    let max_off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| gram[(i, j)].norm())
        .fold(0.0, f64::max);
    check_finite(max_off / min_diag, "off-diagonal ratio")
}
