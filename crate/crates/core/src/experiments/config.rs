use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::{RefinementConfig, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::placement::PlacementSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cgn,
    BsClustering,
    Cellular,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cgn, Method::BsClustering, Method::Cellular];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Cgn => "cgn",
            Method::BsClustering => "bs_clustering",
            Method::Cellular => "cellular",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// Settings of the off-diagonal decay diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma1Config {
    /// Cluster sizes M_l (base stations, no in-cluster users).
    pub cluster_sizes: Vec<usize>,
    /// Numbers of users outside the cluster, K - K_l.
    pub outside_user_counts: Vec<usize>,
    /// Fading samples averaged per case.
    pub samples: usize,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Lemma1Config {
            cluster_sizes: vec![8],
            outside_user_counts: vec![100, 1000, 10000],
            samples: 20,
        }
    }
}

/// Settings of the toy exhaustive-search comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnumerateConfig {
    pub instances: usize,
    pub num_bs: usize,
    pub num_users: usize,
    #[serde(rename = "L", alias = "num_clusters")]
    pub num_clusters: usize,
    /// Side of the toy square. Kept small so that capacities are not all
    /// negligible with only a handful of nodes.
    pub side_length: f64,
    /// Spread threshold for the toy refinement. Toy capacities are far below
    /// the network-scale threshold, which would stop the loop before its
    /// first move.
    pub delta: f64,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        EnumerateConfig {
            instances: 20,
            num_bs: 3,
            num_users: 3,
            num_clusters: 2,
            side_length: 20.0,
            delta: 1e-3,
        }
    }
}

/// Everything one experiment needs. Defaults reproduce the reference
/// simulation settings: L = 40, P = 1 W, N0 = 0.09 W, alpha = 4, d0 = 5 m,
/// delta = 0.2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Global seed. Every network, k-means run and fading batch derives its
    /// own seed from this one; `placement.seed` is ignored by the harness.
    pub seed: u64,
    #[serde(rename = "L", alias = "num_clusters")]
    pub num_clusters: usize,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    pub mc_samples_refine: usize,
    pub mc_samples_report: usize,
    /// Side lengths `a` for `sweep`.
    pub sweep: Option<Vec<f64>>,
    pub placement: PlacementSpec,
    pub physical: PhysicalParams,
    pub refinement: RefinementConfig,
    pub lemma1: Lemma1Config,
    pub enumerate: EnumerateConfig,
    /// Cap on `L^(K+M)` for exhaustive search.
    pub enumeration_cap: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            num_clusters: 40,
            methods: Method::ALL.to_vec(),
            repetitions: 1,
            mc_samples_refine: 200,
            mc_samples_report: 1000,
            sweep: None,
            placement: PlacementSpec::default(),
            physical: PhysicalParams::default(),
            refinement: RefinementConfig::default(),
            lemma1: Lemma1Config::default(),
            enumerate: EnumerateConfig::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.physical.validate()?;
        self.refinement.validate()?;
        let mut placement = self.placement.clone();
        placement.allow_degenerate = false;
        placement.validate()?;
        if self.num_clusters == 0 {
            return Err(Error::Config("L must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.mc_samples_refine == 0 || self.mc_samples_report == 0 {
            return Err(Error::Config("Monte Carlo sample counts must be at least 1".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(Error::Config("sweep list is empty".into()));
            }
            if let Some(a) = sweep.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                return Err(Error::Config(format!("sweep side length {a} must be > 0")));
            }
        }
        let e = &self.enumerate;
        if e.instances == 0 || e.num_clusters == 0 || e.num_bs + e.num_users < e.num_clusters {
            return Err(Error::Config(
                "enumerate needs at least one instance and 1 <= L <= K + M".into(),
            ));
        }
        if !(e.side_length.is_finite() && e.side_length > 0.0 && e.delta.is_finite() && e.delta > 0.0) {
            return Err(Error::Config("enumerate side_length and delta must be > 0".into()));
        }
        if self.lemma1.samples == 0 {
            return Err(Error::Config("lemma1 samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Stable digest of the configuration, excluding the output directory.
    pub fn config_hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }
}
