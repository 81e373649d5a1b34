//! Capacity-balancing refinement.
//!
//! Each iteration grows the weakest cluster by the outside node closest to
//! it, then sheds the member of the strongest cluster farthest from that
//! cluster's centroid to whichever other cluster is closest to it. The loop
//! stops once the gap between the strongest and weakest cluster is at most
//! `delta`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{capacity_with_diagonal, CapacityEstimate};
use crate::channel::{link_gain, FadingBatch};
use crate::error::{Error, Result};
use crate::model::{centroid_of, Network, NodeKind, Partition, Position};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefinementConfig {
    /// Stop once `C_max - C_min <= delta` (bits per channel use).
    pub delta: f64,
    pub max_iterations: usize,
    /// A move never leaves its donor cluster smaller than this.
    pub min_cluster_size: usize,
    pub seed: u64,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            delta: 0.2,
            max_iterations: 5000,
            min_cluster_size: 1,
            seed: 0,
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::Config(format!("delta must be > 0, got {}", self.delta)));
        }
        if self.max_iterations == 0 || self.min_cluster_size == 0 {
            return Err(Error::Config(
                "max_iterations and min_cluster_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// A partition repeated. The loop is deterministic in the partition,
    /// so it would cycle through already-seen states until the cap.
    Cycle,
    /// No eligible move was left.
    NoMove,
}

/// A single node move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Move {
    pub node: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub grow: Option<Move>,
    pub shrink: Option<Move>,
    /// Capacities after both moves.
    pub c_min: f64,
    pub c_max: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementTrace {
    pub initial_c_min: f64,
    pub initial_c_max: f64,
    pub records: Vec<IterationRecord>,
    /// Final spread is within `delta`.
    pub converged: bool,
    pub stop: StopReason,
    /// Iteration of the best-seen state (0 is the initial partition).
    pub best_iteration: usize,
    pub best_c_min: f64,
    pub best_spread: f64,
    /// Capacities of the returned partition on the refinement batch.
    pub final_capacities: Vec<CapacityEstimate>,
}

impl RefinementTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn initial_spread(&self) -> f64 {
        self.initial_c_max - self.initial_c_min
    }

    pub fn final_c_min(&self) -> f64 {
        self.final_capacities
            .iter()
            .map(|e| e.mean)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn final_spread(&self) -> f64 {
        let max = self
            .final_capacities
            .iter()
            .map(|e| e.mean)
            .fold(f64::NEG_INFINITY, f64::max);
        max - self.final_c_min()
    }
}

/// Mutable clustering state with cached capacities and an interference
/// diagonal kept up to date one move at a time.
pub(crate) struct RefineState<'a> {
    network: &'a Network,
    batch: &'a FadingBatch,
    partition: Partition,
    /// Sorted member ids per cluster.
    members: Vec<Vec<usize>>,
    /// Per base station: sum of squared gains of users outside its cluster.
    interference: Vec<f64>,
    capacities: Vec<CapacityEstimate>,
}

impl<'a> RefineState<'a> {
    pub(crate) fn new(network: &'a Network, partition: Partition, batch: &'a FadingBatch) -> Result<Self> {
        partition.validate_for(network)?;
        let members = partition.members();
        let interference = network
            .bs_ids()
            .map(|b| fresh_interference(network, &partition, b))
            .collect();
        let mut state = RefineState {
            network,
            batch,
            partition,
            members,
            interference,
            capacities: Vec::new(),
        };
        let all: Vec<usize> = (0..state.members.len()).collect();
        state.capacities = vec![CapacityEstimate::zero(batch.num_samples()); all.len()];
        state.refresh(&all)?;
        Ok(state)
    }

    fn split(&self, cluster: usize) -> (Vec<usize>, Vec<usize>) {
        let m = self.network.num_bs();
        let members = &self.members[cluster];
        let cut = members.partition_point(|&id| id < m);
        (members[..cut].to_vec(), members[cut..].to_vec())
    }

    fn refresh(&mut self, clusters: &[usize]) -> Result<()> {
        let updated = clusters
            .par_iter()
            .map(|&c| {
                let (bs, users) = self.split(c);
                let diag: Vec<f64> = bs.iter().map(|&b| self.interference[b]).collect();
                capacity_with_diagonal(self.network, &bs, &users, &diag, self.batch)
            })
            .collect::<Result<Vec<_>>>()?;
        for (&c, est) in clusters.iter().zip(updated) {
            self.capacities[c] = est;
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn interference(&self) -> &[f64] {
        &self.interference
    }

    #[cfg(test)]
    pub(crate) fn partition(&self) -> &Partition {
        &self.partition
    }

    fn extremes(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut hi = 0;
        for (c, e) in self.capacities.iter().enumerate() {
            if e.mean < self.capacities[lo].mean {
                lo = c;
            }
            if e.mean > self.capacities[hi].mean {
                hi = c;
            }
        }
        (lo, hi)
    }

    fn c_min_max(&self) -> (f64, f64) {
        let (lo, hi) = self.extremes();
        (self.capacities[lo].mean, self.capacities[hi].mean)
    }

    fn member_positions(&self, cluster: usize) -> Vec<Position> {
        self.members[cluster]
            .iter()
            .map(|&id| self.network.position(id))
            .collect()
    }

    /// Moves `node` to `to`, updating memberships and the interference cache.
    pub(crate) fn apply(&mut self, node: usize, to: usize) -> Move {
        let from = self.partition.cluster_of(node);
        let at = self.members[from].binary_search(&node).expect("node in its cluster");
        self.members[from].remove(at);
        let at = self.members[to].binary_search(&node).unwrap_err();
        self.members[to].insert(at, node);
        self.partition.reassign(node, to);

        let net = self.network;
        match net.kind(node) {
            NodeKind::User => {
                let m = net.num_bs();
                for &b in self.members[from].iter().take_while(|&&id| id < m) {
                    self.interference[b] += link_gain(net, b, node).powi(2);
                }
                for &b in self.members[to].iter().take_while(|&&id| id < m) {
                    let v = self.interference[b] - link_gain(net, b, node).powi(2);
                    self.interference[b] = v.max(0.0);
                }
            }
            NodeKind::BaseStation => {
                self.interference[node] = fresh_interference(net, &self.partition, node);
            }
        }
        Move { node, from, to }
    }

    /// Outside node nearest to `target` whose removal keeps its donor at or
    /// above `min_size`; lowest id on ties.
    fn grow_candidate(&self, target: usize, min_size: usize) -> Option<usize> {
        let set = self.member_positions(target);
        let mut best: Option<(usize, f64)> = None;
        for node in 0..self.network.len() {
            let c = self.partition.cluster_of(node);
            if c == target || self.members[c].len() <= min_size {
                continue;
            }
            let p = self.network.position(node);
            let d = set.iter().map(|q| p.distance(q)).fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((node, d));
            }
        }
        best.map(|(n, _)| n)
    }

    /// Member of `source` farthest from its centroid, and the other nonempty
    /// cluster closest to it.
    fn shrink_candidate(&self, source: usize, min_size: usize) -> Option<(usize, usize)> {
        if self.members[source].len() <= min_size {
            return None;
        }
        let center = centroid_of(self.member_positions(source).into_iter());
        let mut far: Option<(usize, f64)> = None;
        for &id in &self.members[source] {
            let d = self.network.position(id).distance(&center);
            if far.is_none_or(|(_, bd)| d > bd) {
                far = Some((id, d));
            }
        }
        let (node, _) = far?;
        let p = self.network.position(node);
        let mut dest: Option<(usize, f64)> = None;
        for (c, members) in self.members.iter().enumerate() {
            if c == source || members.is_empty() {
                continue;
            }
            let d = members
                .iter()
                .map(|&id| p.distance(&self.network.position(id)))
                .fold(f64::INFINITY, f64::min);
            if dest.is_none_or(|(_, bd)| d < bd) {
                dest = Some((c, d));
            }
        }
        dest.map(|(c, _)| (node, c))
    }
}

fn compact(partition: &Partition) -> Vec<u32> {
    partition.assignment().iter().map(|&c| c as u32).collect()
}

fn fresh_interference(network: &Network, partition: &Partition, bs: usize) -> f64 {
    let own = partition.cluster_of(bs);
    network
        .user_ids()
        .filter(|&u| partition.cluster_of(u) != own)
        .map(|u| link_gain(network, bs, u).powi(2))
        .sum()
}

/// Runs the refinement from `initial` and returns the final partition with
/// its trace.
///
/// All capacity comparisons reuse `batch`. If the loop stops without the
/// spread reaching `delta`, the best partition seen (largest minimum
/// capacity, then smallest spread) is returned instead of the last one.
pub fn cgn_refine(
    network: &Network,
    initial: &Partition,
    batch: &FadingBatch,
    config: &RefinementConfig,
) -> Result<(Partition, RefinementTrace)> {
    config.validate()?;
    if initial.num_clusters() < 2 {
        return Err(Error::Config("refinement needs at least two clusters".into()));
    }
    let mut state = RefineState::new(network, initial.clone(), batch)?;
    let (initial_c_min, initial_c_max) = state.c_min_max();
    let mut best = (initial.clone(), initial_c_min, initial_c_max - initial_c_min, 0usize);
    let mut best_caps = state.capacities.clone();
    let mut records = Vec::new();
    let mut stop = StopReason::MaxIterations;
    let (mut c_min, mut c_max) = (initial_c_min, initial_c_max);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(compact(&state.partition));

    while c_max - c_min > config.delta && records.len() < config.max_iterations {
        let (s_min, s_max) = state.extremes();
        let mut dirty = Vec::with_capacity(4);

        let grow = state
            .grow_candidate(s_min, config.min_cluster_size)
            .map(|node| state.apply(node, s_min));
        let shrink = state
            .shrink_candidate(s_max, config.min_cluster_size)
            .map(|(node, to)| state.apply(node, to));
        if grow.is_none() && shrink.is_none() {
            stop = StopReason::NoMove;
            break;
        }
        for mv in grow.iter().chain(shrink.iter()) {
            for c in [mv.from, mv.to] {
                if !dirty.contains(&c) {
                    dirty.push(c);
                }
            }
        }
        dirty.sort_unstable();
        state.refresh(&dirty)?;
        (c_min, c_max) = state.c_min_max();
        let iteration = records.len() + 1;
        records.push(IterationRecord {
            iteration,
            grow,
            shrink,
            c_min,
            c_max,
            spread: c_max - c_min,
        });
        if c_min > best.1 || (c_min == best.1 && c_max - c_min < best.2) {
            best = (state.partition.clone(), c_min, c_max - c_min, iteration);
            best_caps = state.capacities.clone();
        }
        if !seen.insert(compact(&state.partition)) {
            stop = StopReason::Cycle;
            break;
        }
    }

    let converged = c_max - c_min <= config.delta;
    if converged {
        stop = StopReason::Converged;
    }
    let (partition, final_capacities) = if converged {
        (state.partition.clone(), state.capacities.clone())
    } else {
        (best.0.clone(), best_caps)
    };
    let trace = RefinementTrace {
        initial_c_min,
        initial_c_max,
        records,
        converged,
        stop,
        best_iteration: best.3,
        best_c_min: best.1,
        best_spread: best.2,
        final_capacities,
    };
    Ok((partition, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{interference_diagonal, network_report};
    use crate::clustering::kmeans_pp;
    use crate::model::{cluster_views, PhysicalParams};
    use crate::placement::{generate_network, PlacementSpec};

    fn setup(seed: u64) -> (Network, Partition, FadingBatch) {
        let spec = PlacementSpec { side_length: 60.0, seed, ..Default::default() };
        let net = generate_network(&spec, PhysicalParams::default()).unwrap();
        let init = kmeans_pp(&net.positions(), 10, seed).unwrap();
        (net, init, FadingBatch::new(40, seed).unwrap())
    }

    #[test]
    fn large_delta_returns_initial() {
        let (net, init, batch) = setup(1);
        let cfg = RefinementConfig { delta: 1e6, ..Default::default() };
        let (part, trace) = cgn_refine(&net, &init, &batch, &cfg).unwrap();
        assert_eq!(part, init);
        assert_eq!(trace.iterations(), 0);
        assert!(trace.converged);
    }

    #[test]
    fn rejects_single_cluster_and_bad_config() {
        let (net, _, batch) = setup(2);
        let one = Partition::single(net.len());
        assert!(cgn_refine(&net, &one, &batch, &RefinementConfig::default()).is_err());
        let (_, init, _) = setup(2);
        let bad = RefinementConfig { delta: 0.0, ..Default::default() };
        assert!(cgn_refine(&net, &init, &batch, &bad).is_err());
    }

    #[test]
    fn incremental_interference_matches_fresh_sums() {
        let (net, init, batch) = setup(3);
        let mut state = RefineState::new(&net, init, &batch).unwrap();
        let n = net.len();
        for step in 0..500 {
            let node = (step * 7919) % n;
            let to = (step * 31 + 3) % 10;
            state.apply(node, to);
        }
        let views = cluster_views(&net, state.partition()).unwrap();
        for v in &views {
            let fresh = interference_diagonal(&net, v);
            for (b, f) in v.bs_ids.iter().zip(&fresh) {
                let cached = state.interference()[*b];
                assert!((cached - f).abs() <= 1e-12 * f.max(1e-300), "bs {b}: {cached} vs {f}");
            }
        }
    }

    #[test]
    fn cached_capacities_match_network_report() {
        let (net, init, batch) = setup(4);
        let cfg = RefinementConfig { delta: 1e-3, max_iterations: 60, ..Default::default() };
        let (part, trace) = cgn_refine(&net, &init, &batch, &cfg).unwrap();
        let report = network_report(&net, &part, &batch).unwrap();
        for (a, b) in report.per_cluster.iter().zip(&trace.final_capacities) {
            assert!((a.mean - b.mean).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_invariants() {
        let (net, init, batch) = setup(5);
        let cfg = RefinementConfig { delta: 0.01, max_iterations: 200, ..Default::default() };
        let (part, trace) = cgn_refine(&net, &init, &batch, &cfg).unwrap();
        part.validate_for(&net).unwrap();
        assert!(part.cluster_sizes().iter().all(|&s| s >= 1));
        assert!(trace.best_c_min >= trace.initial_c_min);
        let mut best = trace.initial_c_min;
        for r in &trace.records {
            assert!(r.spread >= 0.0);
            assert!(r.grow.is_some() || r.shrink.is_some());
            best = best.max(r.c_min);
        }
        assert_eq!(best, trace.best_c_min);
        if trace.converged {
            assert!(trace.final_spread() <= cfg.delta);
        } else {
            assert!((trace.final_c_min() - trace.best_c_min).abs() == 0.0);
        }
        let again = cgn_refine(&net, &init, &batch, &cfg).unwrap();
        assert_eq!(again.0, part);
        assert_eq!(again.1, trace);
    }
}
