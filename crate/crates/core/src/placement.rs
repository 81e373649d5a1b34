//! Seeded placement of base stations and users in a square area.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Network, PhysicalParams, Position};
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialDistribution {
    /// Each coordinate uniform on `[0, a]`.
    Uniform,
    /// Each coordinate normal around the center of the square, truncated to
    /// the square by rejection.
    Gaussian,
    /// Each coordinate `Normal(0, 1/sqrt 2)`, i.e. the position read as a
    /// CN(0, 1) complex number. Not confined to the square.
    ComplexNormal,
}

/// How many nodes to place and where.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementSpec {
    pub distribution: SpatialDistribution,
    /// Side length `a` of the square area, meters.
    pub side_length: f64,
    /// Users per square meter.
    pub user_density: f64,
    /// Base stations per square meter.
    pub bs_density: f64,
    /// `(K, M)` overriding the density-derived counts.
    pub explicit_counts: Option<(usize, usize)>,
    /// Standard deviation of the truncated Gaussian; `a / 6` when absent.
    pub gaussian_sigma: Option<f64>,
    pub seed: u64,
    /// Permit K = 0 or M = 0.
    pub allow_degenerate: bool,
}

impl Default for PlacementSpec {
    fn default() -> Self {
        PlacementSpec {
            distribution: SpatialDistribution::Uniform,
            side_length: 100.0,
            user_density: 0.04,
            bs_density: 0.02,
            explicit_counts: None,
            gaussian_sigma: None,
            seed: 0,
            allow_degenerate: false,
        }
    }
}

fn density_count(density: f64, side: f64) -> usize {
    if density == 0.0 {
        return 0;
    }
    ((density * side * side).round() as usize).max(1)
}

impl PlacementSpec {
    /// `(K, M)`: explicit counts, or `round(rho * a^2)` with a floor of one.
    pub fn counts(&self) -> (usize, usize) {
        self.explicit_counts.unwrap_or_else(|| {
            (
                density_count(self.user_density, self.side_length),
                density_count(self.bs_density, self.side_length),
            )
        })
    }

    pub fn sigma(&self) -> f64 {
        self.gaussian_sigma.unwrap_or(self.side_length / 6.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_length.is_finite() && self.side_length > 0.0) {
            return Err(Error::Config(format!(
                "side_length must be > 0, got {}",
                self.side_length
            )));
        }
        for (name, v) in [("user_density", self.user_density), ("bs_density", self.bs_density)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.distribution == SpatialDistribution::Gaussian {
            let s = self.sigma();
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("gaussian_sigma must be > 0, got {s}")));
            }
        }
        let (k, m) = self.counts();
        if !self.allow_degenerate && (k == 0 || m == 0) {
            return Err(Error::Config(format!(
                "placement yields K = {k}, M = {m}; both must be at least 1"
            )));
        }
        Ok(())
    }
}

struct Sampler {
    distribution: SpatialDistribution,
    side: f64,
    centered: Normal<f64>,
    complex: Normal<f64>,
}

impl Sampler {
    fn new(spec: &PlacementSpec) -> Result<Self> {
        let bad = |e: rand_distr::NormalError| Error::Config(e.to_string());
        Ok(Sampler {
            distribution: spec.distribution,
            side: spec.side_length,
            centered: Normal::new(spec.side_length / 2.0, spec.sigma()).map_err(bad)?,
            complex: Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).map_err(bad)?,
        })
    }

    fn coordinate(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.distribution {
            SpatialDistribution::Uniform => rng.random_range(0.0..=self.side),
            SpatialDistribution::Gaussian => loop {
                let v = self.centered.sample(rng);
                if (0.0..=self.side).contains(&v) {
                    break v;
                }
            },
            SpatialDistribution::ComplexNormal => self.complex.sample(rng),
        }
    }

    fn points(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Position> {
        (0..n)
            .map(|_| {
                let x = self.coordinate(rng);
                let y = self.coordinate(rng);
                Position::new(x, y)
            })
            .collect()
    }
}

/// Places K users and M base stations i.i.d. according to `spec`.
///
/// Base stations and users draw from separate seed streams, so changing K
/// does not move the base stations.
pub fn generate_network(spec: &PlacementSpec, params: PhysicalParams) -> Result<Network> {
    spec.validate()?;
    let (k, m) = spec.counts();
    let sampler = Sampler::new(spec)?;
    let bs = sampler.points(m, &mut stream_rng(spec.seed, "placement/bs", 0));
    let users = sampler.points(k, &mut stream_rng(spec.seed, "placement/users", 0));
    Network::new(&bs, &users, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_sizing() {
        let spec = PlacementSpec::default();
        let net = generate_network(&spec, PhysicalParams::default()).unwrap();
        assert_eq!(net.num_users(), 400);
        assert_eq!(net.num_bs(), 200);
    }

    #[test]
    fn explicit_counts_override() {
        let spec = PlacementSpec {
            explicit_counts: Some((1, 1)),
            ..Default::default()
        };
        assert_eq!(generate_network(&spec, PhysicalParams::default()).unwrap().len(), 2);
    }

    #[test]
    fn tiny_density_rounds_up_to_one() {
        let spec = PlacementSpec {
            side_length: 10.0,
            user_density: 0.001,
            bs_density: 0.001,
            ..Default::default()
        };
        assert_eq!(spec.counts(), (1, 1));
    }

    #[test]
    fn degenerate_counts_need_flag() {
        let mut spec = PlacementSpec {
            explicit_counts: Some((3, 0)),
            ..Default::default()
        };
        assert!(matches!(
            generate_network(&spec, PhysicalParams::default()),
            Err(Error::Config(_))
        ));
        spec.allow_degenerate = true;
        assert_eq!(generate_network(&spec, PhysicalParams::default()).unwrap().num_bs(), 0);
    }

    #[test]
    fn same_seed_same_coordinates() {
        for distribution in [
            SpatialDistribution::Uniform,
            SpatialDistribution::Gaussian,
            SpatialDistribution::ComplexNormal,
        ] {
            let spec = PlacementSpec {
                distribution,
                seed: 99,
                ..Default::default()
            };
            let a = generate_network(&spec, PhysicalParams::default()).unwrap();
            let b = generate_network(&spec, PhysicalParams::default()).unwrap();
            let bits = |n: &Network| {
                n.positions()
                    .iter()
                    .flat_map(|p| [p.x.to_bits(), p.y.to_bits()])
                    .collect::<Vec<_>>()
            };
            assert_eq!(bits(&a), bits(&b));
            let other = generate_network(&PlacementSpec { seed: 100, ..spec }, PhysicalParams::default()).unwrap();
            assert_ne!(bits(&a), bits(&other));
        }
    }

    #[test]
    fn gaussian_mean_near_center() {
        let spec = PlacementSpec {
            distribution: SpatialDistribution::Gaussian,
            side_length: 120.0,
            explicit_counts: Some((4000, 2000)),
            seed: 3,
            ..Default::default()
        };
        let net = generate_network(&spec, PhysicalParams::default()).unwrap();
        let n = net.len() as f64;
        let (mx, my) = net
            .positions()
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x / n, sy + p.y / n));
        // truncation at +-3 sigma barely changes the standard deviation
        let tol = 3.0 * spec.sigma() / n.sqrt();
        assert!((mx - 60.0).abs() < tol, "mean x {mx}");
        assert!((my - 60.0).abs() < tol, "mean y {my}");
    }

    proptest::proptest! {
        #[test]
        fn positions_inside_square(seed in 0u64..1000, side in 1.0..300.0f64, gaussian in proptest::bool::ANY) {
            let spec = PlacementSpec {
                distribution: if gaussian { SpatialDistribution::Gaussian } else { SpatialDistribution::Uniform },
                side_length: side,
                explicit_counts: Some((30, 15)),
                seed,
                ..Default::default()
            };
            let net = generate_network(&spec, PhysicalParams::default()).unwrap();
            for p in net.positions() {
                proptest::prop_assert!((0.0..=side).contains(&p.x) && (0.0..=side).contains(&p.y));
            }
        }
    }
}
