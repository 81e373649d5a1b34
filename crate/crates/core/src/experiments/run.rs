use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Method};
use super::io::{self, AggregateRow, MetricsRecord};
use crate::capacity::{lemma1_offdiagonal_ratio, network_report, CapacityEstimate, NetworkReport};
use crate::channel::FadingBatch;
use crate::clustering::{
    bs_clustering_partition, cellular_partition, cgn_refine, exhaustive_maxmin, kmeans_pp, RefinementConfig, RefinementTrace,
};
use crate::error::{Error, Result};
use crate::model::{ClusterView, Network, Partition};
use crate::placement::{generate_network, PlacementSpec, SpatialDistribution};
use crate::seed::derive_seed;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seeds of one repetition, all derived from the global seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepetitionSeeds {
    pub network: u64,
    pub kmeans_cgn: u64,
    pub kmeans_bs: u64,
    pub fading_refine: u64,
    pub fading_report: u64,
}

impl RepetitionSeeds {
    pub fn new(global: u64, repetition: usize) -> Self {
        let r = repetition as u64;
        RepetitionSeeds {
            network: derive_seed(global, "network", r),
            kmeans_cgn: derive_seed(global, "kmeans/cgn", r),
            kmeans_bs: derive_seed(global, "kmeans/bs", r),
            fading_refine: derive_seed(global, "fading/refine", r),
            fading_report: derive_seed(global, "fading/report", r),
        }
    }
}

/// The network of one repetition.
pub fn repetition_network(config: &ExperimentConfig, repetition: usize) -> Result<Network> {
    let spec = PlacementSpec {
        seed: RepetitionSeeds::new(config.seed, repetition).network,
        ..config.placement.clone()
    };
    generate_network(&spec, config.physical)
}

/// The fading batch every method of a repetition is scored on.
pub fn report_batch(config: &ExperimentConfig, repetition: usize) -> Result<FadingBatch> {
    FadingBatch::new(
        config.mc_samples_report,
        RepetitionSeeds::new(config.seed, repetition).fading_report,
    )
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub method: Method,
    pub partition: Partition,
    pub report: NetworkReport,
    /// Present for the refinement only.
    pub trace: Option<RefinementTrace>,
}

#[derive(Debug, Clone)]
pub struct RepetitionOutcome {
    pub repetition: usize,
    pub network: Network,
    pub outcomes: Vec<MethodOutcome>,
}

impl RepetitionOutcome {
    pub fn get(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }

    pub fn metrics(&self, config: &ExperimentConfig) -> Vec<MetricsRecord> {
        let hash = config.config_hash();
        self.outcomes
            .iter()
            .map(|o| MetricsRecord {
                method: o.method.name().to_string(),
                seed: config.seed,
                repetition: self.repetition,
                num_clusters: o.partition.num_clusters(),
                c_min: o.report.c_min,
                c_max: o.report.c_max,
                c_avg: o.report.c_avg,
                c_var: o.report.c_var,
                iterations: o.trace.as_ref().map_or(0, |t| t.iterations()),
                converged: o.trace.as_ref().map(|t| t.converged),
                config_hash: hash.clone(),
                version: VERSION.to_string(),
            })
            .collect()
    }
}

/// Partition produced by `method` on `network` for the given repetition.
pub fn build_partition(
    config: &ExperimentConfig,
    network: &Network,
    method: Method,
    seeds: &RepetitionSeeds,
) -> Result<(Partition, Option<RefinementTrace>)> {
    match method {
        Method::Cellular => Ok((cellular_partition(network)?, None)),
        Method::BsClustering => Ok((bs_clustering_partition(network, config.num_clusters, seeds.kmeans_bs)?, None)),
        Method::Cgn => {
            let initial = kmeans_pp(&network.positions(), config.num_clusters, seeds.kmeans_cgn)?;
            let batch = FadingBatch::new(config.mc_samples_refine, seeds.fading_refine)?;
            let (partition, trace) = cgn_refine(network, &initial, &batch, &config.refinement)?;
            Ok((partition, Some(trace)))
        }
    }
}

/// Generates one network and runs every configured method on it.
pub fn run_repetition(config: &ExperimentConfig, repetition: usize) -> Result<RepetitionOutcome> {
    let seeds = RepetitionSeeds::new(config.seed, repetition);
    let network = repetition_network(config, repetition)?;
    let batch = report_batch(config, repetition)?;
    let outcomes = config
        .methods
        .iter()
        .map(|&method| {
            let (partition, trace) = build_partition(config, &network, method, &seeds)?;
            let report = network_report(&network, &partition, &batch)?;
            Ok(MethodOutcome { method, partition, report, trace })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RepetitionOutcome { repetition, network, outcomes })
}

/// Sample mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn aggregate(side_length: f64, method: Method, runs: &[&MethodOutcome]) -> AggregateRow {
    let col = |f: fn(&NetworkReport) -> f64| mean_std(&runs.iter().map(|o| f(&o.report)).collect::<Vec<_>>());
    let (c_min_mean, c_min_std) = col(|r| r.c_min);
    let (c_avg_mean, c_avg_std) = col(|r| r.c_avg);
    let (c_var_mean, c_var_std) = col(|r| r.c_var);
    AggregateRow {
        a: side_length,
        method: method.name().to_string(),
        c_min_mean,
        c_min_std,
        c_avg_mean,
        c_avg_std,
        c_var_mean,
        c_var_std,
        reps: runs.len(),
    }
}

fn aggregate_all(config: &ExperimentConfig, reps: &[RepetitionOutcome]) -> Vec<AggregateRow> {
    config
        .methods
        .iter()
        .map(|&m| {
            let runs: Vec<_> = reps.iter().filter_map(|r| r.get(m)).collect();
            aggregate(config.placement.side_length, m, &runs)
        })
        .collect()
}

fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

/// Directory holding the artifacts of one repetition.
pub fn repetition_dir(out: &Path, repetition: usize) -> PathBuf {
    out.join(format!("rep-{repetition:03}"))
}

fn write_repetition(dir: &Path, config: &ExperimentConfig, rep: &RepetitionOutcome) -> Result<()> {
    io::create_dir(dir)?;
    io::write_nodes(&dir.join("nodes.csv"), &rep.network)?;
    for o in &rep.outcomes {
        io::write_assignment(&dir.join(format!("assignment-{}.csv", o.method)), &o.partition)?;
        let rows = io::cluster_rows(&rep.network, &o.partition, &o.report)?;
        io::write_rows(&dir.join(format!("clusters-{}.csv", o.method)), rows)?;
        if let Some(trace) = &o.trace {
            io::write_json(&dir.join(format!("trace-{}.json", o.method)), trace)?;
        }
    }
    io::write_json(&dir.join("metrics.json"), &rep.metrics(config))
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub repetitions: Vec<RepetitionOutcome>,
    pub summary: Vec<AggregateRow>,
}

/// Runs every method on `repetitions` independent networks and writes
/// per-repetition artifacts, `metrics.json` and `summary.csv` under the
/// output directory.
///
/// Repetitions run in parallel; results are collected in repetition order,
/// so the output does not depend on the thread count.
pub fn run_compare(config: &ExperimentConfig) -> Result<CompareOutcome> {
    config.validate()?;
    let reps = (0..config.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(config, r))
        .collect::<Result<Vec<_>>>()?;
    let summary = aggregate_all(config, &reps);
    let out = output_dir(config);
    io::create_dir(&out)?;
    for rep in &reps {
        write_repetition(&repetition_dir(&out, rep.repetition), config, rep)?;
    }
    let all: Vec<MetricsRecord> = reps.iter().flat_map(|r| r.metrics(config)).collect();
    io::write_json(&out.join("metrics.json"), &all)?;
    io::write_rows(&out.join("summary.csv"), &summary)?;
    io::write_json(&out.join("config.json"), config)?;
    Ok(CompareOutcome { repetitions: reps, summary })
}

/// Recomputes a method's report from the files written by [`run_compare`].
pub fn reload_report(config: &ExperimentConfig, out: &Path, repetition: usize, method: Method) -> Result<NetworkReport> {
    let dir = repetition_dir(out, repetition);
    let network = io::read_nodes(&dir.join("nodes.csv"), config.physical)?;
    let num_clusters = match method {
        Method::Cellular => network.num_bs(),
        _ => config.num_clusters,
    };
    let partition = io::read_assignment(&dir.join(format!("assignment-{method}.csv")), num_clusters)?;
    network_report(&network, &partition, &report_batch(config, repetition)?)
}

/// One repetition of one method at one side length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub a: f64,
    pub repetition: usize,
    pub method: String,
    pub c_min: f64,
    pub c_avg: f64,
    pub c_var: f64,
    pub iterations: usize,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<AggregateRow>,
    pub runs: Vec<SweepRun>,
}

/// Side lengths swept when the configuration names none.
pub const DEFAULT_SWEEP: [f64; 4] = [50.0, 75.0, 100.0, 125.0];

/// Repeats the comparison for every side length in `config.sweep` and
/// writes `sweep.csv` (aggregates) and `sweep-runs.csv` (raw runs).
///
/// Densities stay fixed, so the node counts grow with the area. The same
/// repetition seeds are reused at every side length.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let sides = config.sweep.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec());
    let jobs: Vec<(usize, usize)> = (0..sides.len())
        .flat_map(|i| (0..config.repetitions).map(move |r| (i, r)))
        .collect();
    let configs: Vec<ExperimentConfig> = sides
        .iter()
        .map(|&a| {
            let mut c = config.clone();
            c.placement.side_length = a;
            c
        })
        .collect();
    let reps = jobs
        .par_iter()
        .map(|&(i, r)| run_repetition(&configs[i], r))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        let at: Vec<_> = jobs
            .iter()
            .zip(&reps)
            .filter(|((j, _), _)| *j == i)
            .map(|(_, rep)| rep.clone())
            .collect();
        rows.extend(aggregate_all(c, &at));
        for rep in &at {
            runs.extend(rep.outcomes.iter().map(|o| SweepRun {
                a: sides[i],
                repetition: rep.repetition,
                method: o.method.name().to_string(),
                c_min: o.report.c_min,
                c_avg: o.report.c_avg,
                c_var: o.report.c_var,
                iterations: o.trace.as_ref().map_or(0, |t| t.iterations()),
                converged: o.trace.as_ref().map(|t| t.converged),
            }));
        }
    }
    let out = output_dir(config);
    io::create_dir(&out)?;
    io::write_rows(&out.join("sweep.csv"), &rows)?;
    io::write_rows(&out.join("sweep-runs.csv"), &runs)?;
    Ok(SweepOutcome { rows, runs })
}

/// One case of the off-diagonal decay diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Row {
    pub outside_users: usize,
    pub cluster_bs: usize,
    pub ratio_mean: f64,
    pub ratio_stderr: f64,
}

/// Measures how the off-diagonal part of the interference covariance of a
/// fixed cluster fades as users outside it are added.
///
/// Each case places `M_l` base stations and `n` users uniformly in the
/// configured square; the base stations form the cluster and every user is
/// outside it. The ratio is averaged over `lemma1.samples` fading draws.
pub fn run_lemma1(config: &ExperimentConfig) -> Result<Vec<Lemma1Row>> {
    config.validate()?;
    let cases: Vec<(usize, usize)> = config
        .lemma1
        .cluster_sizes
        .iter()
        .flat_map(|&m| config.lemma1.outside_user_counts.iter().map(move |&n| (m, n)))
        .collect();
    if cases.is_empty() {
        return Err(Error::Config("lemma1 needs cluster sizes and outside user counts".into()));
    }
    let rows = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(m, n))| lemma1_case(config, i as u64, m, n))
        .collect::<Result<Vec<_>>>()?;
    let out = output_dir(config);
    io::create_dir(&out)?;
    io::write_rows(&out.join("lemma1.csv"), &rows)?;
    Ok(rows)
}

fn lemma1_case(config: &ExperimentConfig, index: u64, cluster_bs: usize, outside: usize) -> Result<Lemma1Row> {
    if cluster_bs < 2 || outside == 0 {
        return Err(Error::Config(format!(
            "lemma1 case needs M_l >= 2 and at least one outside user, got M_l = {cluster_bs}, n = {outside}"
        )));
    }
    let spec = PlacementSpec {
        distribution: SpatialDistribution::Uniform,
        explicit_counts: Some((outside, cluster_bs)),
        seed: derive_seed(config.seed, "lemma1/network", index),
        ..config.placement.clone()
    };
    let network = generate_network(&spec, config.physical)?;
    let members: Vec<usize> = network.bs_ids().collect();
    let view = ClusterView::from_members(&network, 0, &members)?;
    let batch = FadingBatch::new(config.lemma1.samples, derive_seed(config.seed, "lemma1/fading", index))?;
    let ratios = (0..batch.num_samples())
        .map(|s| lemma1_offdiagonal_ratio(&network, &view, &batch, s))
        .collect::<Result<Vec<_>>>()?;
    let est = CapacityEstimate::from_samples(&ratios);
    Ok(Lemma1Row {
        outside_users: outside,
        cluster_bs,
        ratio_mean: est.mean,
        ratio_stderr: est.std_error,
    })
}

/// Refinement against exhaustive search on one toy instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerateRow {
    pub instance: usize,
    pub cgn_c_min: f64,
    pub exhaustive_c_min: f64,
    pub matched: bool,
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerateSummary {
    pub instances: usize,
    pub matches: usize,
    pub match_rate: f64,
    /// Instances where the refinement beat exhaustive search; always zero
    /// unless something is broken.
    pub violations: usize,
    pub rows: Vec<EnumerateRow>,
}

/// Compares the refinement with exhaustive max-min search on small random
/// instances. The refinement runs on the same fading batch that scores the
/// exhaustive search.
pub fn run_enumerate(config: &ExperimentConfig) -> Result<EnumerateSummary> {
    config.validate()?;
    let e = &config.enumerate;
    let rows = (0..e.instances)
        .into_par_iter()
        .map(|i| enumerate_instance(config, i))
        .collect::<Result<Vec<_>>>()?;
    let matches = rows.iter().filter(|r| r.matched).count();
    let violations = rows
        .iter()
        .filter(|r| r.cgn_c_min > r.exhaustive_c_min + tolerance(r.exhaustive_c_min))
        .count();
    let summary = EnumerateSummary {
        instances: rows.len(),
        matches,
        match_rate: matches as f64 / rows.len() as f64,
        violations,
        rows,
    };
    let out = output_dir(config);
    io::create_dir(&out)?;
    io::write_rows(&out.join("enumerate.csv"), &summary.rows)?;
    io::write_json(&out.join("enumerate.json"), &summary)?;
    Ok(summary)
}

fn tolerance(value: f64) -> f64 {
    1e-12 * value.abs().max(1.0)
}

fn enumerate_instance(config: &ExperimentConfig, instance: usize) -> Result<EnumerateRow> {
    let e = &config.enumerate;
    let sub = ExperimentConfig {
        seed: derive_seed(config.seed, "enumerate", instance as u64),
        num_clusters: e.num_clusters,
        placement: PlacementSpec {
            side_length: e.side_length,
            explicit_counts: Some((e.num_users, e.num_bs)),
            ..config.placement.clone()
        },
        refinement: RefinementConfig { delta: e.delta, ..config.refinement },
        ..config.clone()
    };
    let network = repetition_network(&sub, 0)?;
    let batch = report_batch(&sub, 0)?;
    let seeds = RepetitionSeeds::new(sub.seed, 0);
    let initial = kmeans_pp(&network.positions(), e.num_clusters, seeds.kmeans_cgn)?;
    let (partition, _) = cgn_refine(&network, &initial, &batch, &sub.refinement)?;
    let cgn = network_report(&network, &partition, &batch)?;
    let best = exhaustive_maxmin(&network, e.num_clusters, &batch, config.enumeration_cap)?;
    Ok(EnumerateRow {
        instance,
        cgn_c_min: cgn.c_min,
        exhaustive_c_min: best.c_min,
        matched: (cgn.c_min - best.c_min).abs() <= tolerance(best.c_min),
        evaluated: best.evaluated,
    })
}

/// Writes `nodes.csv` for the network of repetition 0.
pub fn run_generate(config: &ExperimentConfig) -> Result<Network> {
    config.validate()?;
    let network = repetition_network(config, 0)?;
    let out = output_dir(config);
    io::create_dir(&out)?;
    io::write_nodes(&out.join("nodes.csv"), &network)?;
    Ok(network)
}
