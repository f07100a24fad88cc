//! Cross-checks the FFT pipeline against explicit Floquet matrices on
//! small grids.
//!
//! cargo run --release --example dense_oracle

use ptkr::otoc::{dense_oracle_otoc, otoc_point, ForwardTrajectory, StoragePolicy, TrajectoryOptions};
use ptkr::{BasisSpec, ModelParams};

fn main() -> ptkr::Result<()> {
    let mut worst: f64 = 0.0;
    for n in [8, 16] {
        for (k, lambda, hbar) in [(1.0, 0.0, 1.0), (1.0, 0.1, 1.0), (2.0, 0.3, 0.5)] {
            let params = ModelParams::new(k, lambda, hbar)?;
            let basis = BasisSpec::new(n, hbar)?;
            let opts = TrajectoryOptions {
                storage: StoragePolicy::All,
                tail_limit: None,
            };
            let traj = ForwardTrajectory::build(params, basis, 10.0, 5, opts)?;
            for t_n in [1, 2, 3, 5] {
                let fast = otoc_point(&traj, t_n)?;
                let dense = dense_oracle_otoc(&params, n, 10.0, t_n)?;
                let rel = (fast.c - dense.c).abs() / dense.c.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                println!("N={n:2} K={k} lambda={lambda} hbar={hbar} t={t_n}: C={:.6e} rel.err={rel:.1e}", dense.c);
            }
        }
    }
    println!("largest relative error: {worst:.2e}");
    Ok(())
}
