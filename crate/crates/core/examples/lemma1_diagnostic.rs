//! Shows the interference covariance of a fixed cluster becoming diagonal
//! as users outside it are added: the largest off-diagonal entry relative
//! to the smallest diagonal entry shrinks.
//!
//!     cargo run --release --example lemma1_diagnostic

use cgn::experiments::{run_lemma1, ExperimentConfig, Lemma1Config};

fn main() -> cgn::Result<()> {
    let config = ExperimentConfig {
        lemma1: Lemma1Config {
            cluster_sizes: vec![2, 8],
            outside_user_counts: vec![10, 100, 1000, 10000],
            samples: 20,
        },
        output_dir: Some(std::env::temp_dir().join("cgn-lemma1")),
        ..Default::default()
    };
    println!("M_l  outside users  off-diagonal ratio");
    for row in run_lemma1(&config)? {
        println!("{:>3}  {:>13}  {:.4} +- {:.4}", row.cluster_bs, row.outside_users, row.ratio_mean, row.ratio_stderr);
    }
    Ok(())
}
