//! Domain types shared by every stage of the pipeline: node positions, the
//! network, a partition of the network into clusters and per-cluster views.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Position) -> f64 {
        euclidean_distance(*self, *other)
    }
}

/// Straight-line distance between two points.
pub fn euclidean_distance(p: Position, q: Position) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Distance from `p` to the closest member of `members`.
pub fn point_to_set_distance(p: Position, members: &[Position]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::Validation(
            "point-to-set distance needs a nonempty member set".into(),
        ));
    }
    Ok(members
        .iter()
        .map(|q| euclidean_distance(p, *q))
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    #[serde(rename = "bs")]
    BaseStation,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkNode {
    pub id: usize,
    pub kind: NodeKind,
    pub position: Position,
}

/// Transmit power, noise power, path-loss exponent and the near-field
/// distance threshold below which the path loss saturates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    /// Per-user transmit power in watts.
    pub transmit_power: f64,
    /// Background noise power in watts.
    pub noise_power: f64,
    pub path_loss_alpha: f64,
    /// Meters.
    pub distance_threshold: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            transmit_power: 1.0,
            noise_power: 0.09,
            path_loss_alpha: 4.0,
            distance_threshold: 5.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("transmit_power", self.transmit_power),
            ("noise_power", self.noise_power),
            ("path_loss_alpha", self.path_loss_alpha),
            ("distance_threshold", self.distance_threshold),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Base stations and users in the plane together with the physical
/// parameters of the link model.
///
/// Node ids are dense: base stations occupy `0..M`, users `M..M+K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<NetworkNode>,
    num_bs: usize,
    params: PhysicalParams,
}

impl Network {
    pub fn new(
        bs_positions: &[Position],
        user_positions: &[Position],
        params: PhysicalParams,
    ) -> Result<Self> {
        params.validate()?;
        let nodes: Vec<NetworkNode> = bs_positions
            .iter()
            .map(|p| (NodeKind::BaseStation, *p))
            .chain(user_positions.iter().map(|p| (NodeKind::User, *p)))
            .enumerate()
            .map(|(id, (kind, position))| NetworkNode { id, kind, position })
            .collect();
        if let Some(bad) = nodes.iter().find(|n| !n.position.is_finite()) {
            return Err(Error::Validation(format!(
                "node {} has a non-finite position",
                bad.id
            )));
        }
        Ok(Network {
            nodes,
            num_bs: bs_positions.len(),
            params,
        })
    }

    /// Rebuilds a network from an explicit node list, e.g. one read back
    /// from `nodes.csv`. Ids must be dense with base stations first.
    pub fn from_nodes(mut nodes: Vec<NetworkNode>, params: PhysicalParams) -> Result<Self> {
        nodes.sort_by_key(|n| n.id);
        if nodes.iter().enumerate().any(|(i, n)| n.id != i) {
            return Err(Error::Validation("node ids must be dense from 0".into()));
        }
        let num_bs = nodes
            .iter()
            .take_while(|n| n.kind == NodeKind::BaseStation)
            .count();
        if nodes[num_bs..].iter().any(|n| n.kind != NodeKind::User) {
            return Err(Error::Validation(
                "base stations must occupy the lowest ids".into(),
            ));
        }
        let bs: Vec<Position> = nodes[..num_bs].iter().map(|n| n.position).collect();
        let users: Vec<Position> = nodes[num_bs..].iter().map(|n| n.position).collect();
        Network::new(&bs, &users, params)
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// Same geometry with different physical parameters.
    pub fn with_params(&self, params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        Ok(Network {
            params,
            ..self.clone()
        })
    }

    pub fn nodes(&self) -> &[NetworkNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// M, the number of base stations.
    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    /// K, the number of users.
    pub fn num_users(&self) -> usize {
        self.nodes.len() - self.num_bs
    }

    pub fn bs_ids(&self) -> std::ops::Range<usize> {
        0..self.num_bs
    }

    pub fn user_ids(&self) -> std::ops::Range<usize> {
        self.num_bs..self.nodes.len()
    }

    pub fn position(&self, id: usize) -> Position {
        self.nodes[id].position
    }

    pub fn kind(&self, id: usize) -> NodeKind {
        self.nodes[id].kind
    }

    pub fn positions(&self) -> Vec<Position> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    /// Index of a user among users only (`id - M`).
    pub fn user_index(&self, id: usize) -> usize {
        debug_assert!(id >= self.num_bs);
        id - self.num_bs
    }
}

/// Assignment of every node to one of `num_clusters` clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    num_clusters: usize,
    assignment: Vec<usize>,
}

impl Partition {
    pub fn new(num_clusters: usize, assignment: Vec<usize>) -> Result<Self> {
        if num_clusters == 0 {
            return Err(Error::Validation("a partition needs at least one cluster".into()));
        }
        if let Some((node, c)) = assignment
            .iter()
            .enumerate()
            .find(|(_, c)| **c >= num_clusters)
        {
            return Err(Error::Validation(format!(
                "node {node} assigned to cluster {c}, but only {num_clusters} clusters exist"
            )));
        }
        Ok(Partition {
            num_clusters,
            assignment,
        })
    }

    /// Every node in cluster 0.
    pub fn single(num_nodes: usize) -> Self {
        Partition {
            num_clusters: 1,
            assignment: vec![0; num_nodes],
        }
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Members of every cluster, sorted by node id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    /// Moves a node to another cluster in place.
    pub(crate) fn reassign(&mut self, node: usize, cluster: usize) {
        debug_assert!(cluster < self.num_clusters);
        self.assignment[node] = cluster;
    }

    pub fn validate_for(&self, network: &Network) -> Result<()> {
        if self.assignment.len() != network.len() {
            return Err(Error::Validation(format!(
                "partition covers {} nodes but the network has {}",
                self.assignment.len(),
                network.len()
            )));
        }
        Ok(())
    }
}

/// Materialized cluster S_l: its base stations, users and centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterView {
    pub cluster_id: usize,
    pub bs_ids: Vec<usize>,
    pub user_ids: Vec<usize>,
    /// Mean of all member positions; `None` for an empty cluster.
    pub centroid: Option<Position>,
}

impl ClusterView {
    /// Builds the view of an arbitrary member set. Member ids may be in any
    /// order and are sorted here.
    pub fn from_members(network: &Network, cluster_id: usize, members: &[usize]) -> Result<Self> {
        let mut bs_ids = Vec::new();
        let mut user_ids = Vec::new();
        for &id in members {
            if id >= network.len() {
                return Err(Error::Validation(format!("node {id} is not in the network")));
            }
            match network.kind(id) {
                NodeKind::BaseStation => bs_ids.push(id),
                NodeKind::User => user_ids.push(id),
            }
        }
        bs_ids.sort_unstable();
        user_ids.sort_unstable();
        let all = bs_ids.iter().chain(&user_ids);
        let centroid = if members.is_empty() {
            None
        } else {
            Some(centroid_of(all.map(|&id| network.position(id))))
        };
        Ok(ClusterView {
            cluster_id,
            bs_ids,
            user_ids,
            centroid,
        })
    }

    /// M_l.
    pub fn num_bs(&self) -> usize {
        self.bs_ids.len()
    }

    /// K_l.
    pub fn num_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs_ids.is_empty() && self.user_ids.is_empty()
    }

    pub fn member_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.bs_ids.iter().chain(&self.user_ids).copied()
    }
}

pub(crate) fn centroid_of(points: impl Iterator<Item = Position>) -> Position {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for p in points {
        sx += p.x;
        sy += p.y;
        n += 1;
    }
    Position::new(sx / n as f64, sy / n as f64)
}

/// One view per cluster, in cluster-id order.
pub fn cluster_views(network: &Network, partition: &Partition) -> Result<Vec<ClusterView>> {
    partition.validate_for(network)?;
    partition
        .members()
        .iter()
        .enumerate()
        .map(|(l, members)| ClusterView::from_members(network, l, members))
        .collect()
}
