//! Places base stations and users with each spatial distribution and writes
//! the uniform layout to `nodes.csv` in the given directory (default `.`).
//!
//!     cargo run --example place_network -- /tmp/layout

use std::path::PathBuf;

use cgn::experiments::io::write_nodes;
use cgn::placement::generate_network;
use cgn::{PhysicalParams, PlacementSpec, SpatialDistribution};

fn main() -> cgn::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    for distribution in [SpatialDistribution::Uniform, SpatialDistribution::Gaussian] {
        let spec = PlacementSpec { distribution, seed: 7, ..Default::default() };
        let net = generate_network(&spec, PhysicalParams::default())?;
        let users: Vec<_> = net.user_ids().map(|u| net.position(u)).collect();
        let centre = spec.side_length / 2.0;
        let near = users.iter().filter(|p| (p.x - centre).hypot(p.y - centre) < spec.side_length / 6.0).count();
        println!(
            "{distribution:?}: {} BSs, {} users, {:.0}% of users within a/6 of the centre",
            net.num_bs(),
            net.num_users(),
            100.0 * near as f64 / users.len() as f64
        );
        if distribution == SpatialDistribution::Uniform {
            std::fs::create_dir_all(&out).map_err(|e| cgn::Error::Config(e.to_string()))?;
            write_nodes(&out.join("nodes.csv"), &net)?;
            println!("wrote {}", out.join("nodes.csv").display());
        }
    }
    Ok(())
}
