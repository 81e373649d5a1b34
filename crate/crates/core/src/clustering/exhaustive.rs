//! Brute-force max-min partitioning for toy instances.

use crate::capacity::{network_report, NetworkReport};
use crate::channel::FadingBatch;
use crate::error::{Error, Result};
use crate::model::{Network, Partition};

/// Default cap on `L^(K+M)`.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Calls `visit` with every partition of `n` nodes into exactly `k`
/// nonempty clusters, each exactly once: labels appear in order of first
/// use (restricted growth strings), so relabelings are skipped.
pub fn for_each_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k == 0 || k > n {
        return Ok(());
    }
    let mut labels = vec![0usize; n];
    fn rec(
        pos: usize,
        used: usize,
        k: usize,
        labels: &mut [usize],
        visit: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        let n = labels.len();
        if pos == n {
            return if used == k { visit(labels) } else { Ok(()) };
        }
        // not enough nodes left to open the remaining clusters
        if k - used > n - pos {
            return Ok(());
        }
        for c in 0..=used.min(k - 1) {
            labels[pos] = c;
            rec(pos + 1, used.max(c + 1), k, labels, visit)?;
        }
        Ok(())
    }
    rec(0, 0, k, &mut labels, &mut visit)
}

fn check_size(network: &Network, num_clusters: usize, cap: u64) -> Result<()> {
    let assignments = (num_clusters as f64).powi(network.len() as i32);
    if assignments > cap as f64 {
        return Err(Error::TooLarge { assignments, cap });
    }
    if num_clusters == 0 || num_clusters > network.len() {
        return Err(Error::Config(format!(
            "cannot split {} nodes into {num_clusters} nonempty clusters",
            network.len()
        )));
    }
    Ok(())
}

/// Every partition with its capacity report, in enumeration order.
pub fn enumerate_reports(
    network: &Network,
    num_clusters: usize,
    batch: &FadingBatch,
    cap: u64,
) -> Result<Vec<(Partition, NetworkReport)>> {
    check_size(network, num_clusters, cap)?;
    let mut out = Vec::new();
    for_each_partition(network.len(), num_clusters, |labels| {
        let part = Partition::new(num_clusters, labels.to_vec())?;
        let report = network_report(network, &part, batch)?;
        out.push((part, report));
        Ok(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub partition: Partition,
    pub c_min: f64,
    pub report: NetworkReport,
    /// Number of partitions evaluated.
    pub evaluated: usize,
}

/// Partition maximizing the minimum cluster capacity on `batch`; the first
/// one in enumeration order wins ties.
pub fn exhaustive_maxmin(
    network: &Network,
    num_clusters: usize,
    batch: &FadingBatch,
    cap: u64,
) -> Result<ExhaustiveResult> {
    check_size(network, num_clusters, cap)?;
    let mut best: Option<ExhaustiveResult> = None;
    let mut evaluated = 0;
    for_each_partition(network.len(), num_clusters, |labels| {
        let part = Partition::new(num_clusters, labels.to_vec())?;
        let report = network_report(network, &part, batch)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|b| report.c_min > b.c_min) {
            best = Some(ExhaustiveResult {
                partition: part,
                c_min: report.c_min,
                report,
                evaluated: 0,
            });
        }
        Ok(())
    })?;
    let mut best = best.expect("at least one partition when 1 <= L <= n");
    best.evaluated = evaluated;
    Ok(best)
}
