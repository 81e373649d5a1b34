//! CSV and JSON artifacts written by the harness.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capacity::NetworkReport;
use crate::error::{Error, Result};
use crate::model::{cluster_views, Network, NetworkNode, NodeKind, Partition, PhysicalParams, Position};

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    node_id: usize,
    kind: NodeKind,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AssignmentRow {
    node_id: usize,
    cluster_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub cluster_id: usize,
    pub n_bs: usize,
    pub n_users: usize,
    pub centroid_x: Option<f64>,
    pub centroid_y: Option<f64>,
    pub capacity: f64,
    pub capacity_stderr: f64,
}

/// Per-run record written to `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub method: String,
    pub seed: u64,
    pub repetition: usize,
    #[serde(rename = "L")]
    pub num_clusters: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub c_avg: f64,
    pub c_var: f64,
    pub iterations: usize,
    /// Refinement outcome; `None` for the baselines, which do not iterate.
    pub converged: Option<bool>,
    pub config_hash: String,
    pub version: String,
}

/// Mean and spread of one method's metrics over repetitions; also the row
/// format of `sweep.csv` and `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub a: f64,
    pub method: String,
    pub c_min_mean: f64,
    pub c_min_std: f64,
    pub c_avg_mean: f64,
    pub c_avg_std: f64,
    pub c_var_mean: f64,
    pub c_var_std: f64,
    pub reps: usize,
}

fn create(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Reader::from_reader(file))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = create(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    open(path)?
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(Error::from)
}

/// `nodes.csv`: `node_id,kind,x,y`.
pub fn write_nodes(path: &Path, network: &Network) -> Result<()> {
    write_rows(
        path,
        network.nodes().iter().map(|n| NodeRow {
            node_id: n.id,
            kind: n.kind,
            x: n.position.x,
            y: n.position.y,
        }),
    )
}

pub fn read_nodes(path: &Path, params: PhysicalParams) -> Result<Network> {
    let nodes = read_rows::<NodeRow>(path)?
        .into_iter()
        .map(|r| NetworkNode {
            id: r.node_id,
            kind: r.kind,
            position: Position::new(r.x, r.y),
        })
        .collect();
    Network::from_nodes(nodes, params)
}

/// `assignment-<method>.csv`: `node_id,cluster_id`.
pub fn write_assignment(path: &Path, partition: &Partition) -> Result<()> {
    write_rows(
        path,
        partition
            .assignment()
            .iter()
            .enumerate()
            .map(|(node_id, &cluster_id)| AssignmentRow { node_id, cluster_id }),
    )
}

pub fn read_assignment(path: &Path, num_clusters: usize) -> Result<Partition> {
    let mut rows = read_rows::<AssignmentRow>(path)?;
    rows.sort_by_key(|r| r.node_id);
    if rows.iter().enumerate().any(|(i, r)| r.node_id != i) {
        return Err(Error::Validation(format!(
            "{}: node ids must be dense from 0",
            path.display()
        )));
    }
    Partition::new(num_clusters, rows.into_iter().map(|r| r.cluster_id).collect())
}

pub fn cluster_rows(network: &Network, partition: &Partition, report: &NetworkReport) -> Result<Vec<ClusterRow>> {
    Ok(cluster_views(network, partition)?
        .iter()
        .zip(&report.per_cluster)
        .map(|(v, est)| ClusterRow {
            cluster_id: v.cluster_id,
            n_bs: v.num_bs(),
            n_users: v.num_users(),
            centroid_x: v.centroid.map(|c| c.x),
            centroid_y: v.centroid.map(|c| c.y),
            capacity: est.mean,
            capacity_stderr: est.std_error,
        })
        .collect())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_assignment_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let net = Network::new(
            &[Position::new(0.1, 1.0 / 3.0)],
            &[Position::new(2.0f64.sqrt(), -7.25), Position::new(1e-9, 12345.678)],
            PhysicalParams::default(),
        )
        .unwrap();
        let path = dir.path().join("nodes.csv");
        write_nodes(&path, &net).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("node_id,kind,x,y\n0,bs,"));
        assert!(text.contains("\n1,user,"));
        assert_eq!(read_nodes(&path, PhysicalParams::default()).unwrap(), net);

        let part = Partition::new(3, vec![2, 0, 2]).unwrap();
        let path = dir.path().join("assignment-cgn.csv");
        write_assignment(&path, &part).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("node_id,cluster_id\n"));
        assert_eq!(read_assignment(&path, 3).unwrap(), part);
    }

    #[test]
    fn cluster_rows_leave_empty_centroids_blank() {
        let dir = tempfile::tempdir().unwrap();
        let net = Network::new(&[Position::new(0.0, 0.0)], &[Position::new(1.0, 0.0)], PhysicalParams::default()).unwrap();
        let part = Partition::new(2, vec![0, 0]).unwrap();
        let report = NetworkReport::from_estimates(vec![
            crate::capacity::CapacityEstimate { mean: 0.5, std_error: 0.01, num_samples: 10 },
            crate::capacity::CapacityEstimate::zero(10),
        ]);
        let rows = cluster_rows(&net, &part, &report).unwrap();
        let path = dir.path().join("clusters-cgn.csv");
        write_rows(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "cluster_id,n_bs,n_users,centroid_x,centroid_y,capacity,capacity_stderr"
        );
        assert_eq!(lines.nth(1).unwrap(), "1,0,0,,,0.0,0.0");
        assert_eq!(read_rows::<ClusterRow>(&path).unwrap(), rows);
    }
}
