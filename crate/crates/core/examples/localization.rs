//! Exponential localization in momentum below threshold: the state at t_n
//! and the state at the end of the reversal share the decay length.
//!
//! cargo run --release --example localization -- [t_n]

use std::collections::BTreeSet;

use ptkr::fit::fit_localization_length;
use ptkr::otoc::{backward_pass, ForwardTrajectory, Insertion, StoragePolicy, TrajectoryOptions};
use ptkr::{BasisSpec, ModelParams};

fn main() -> ptkr::Result<()> {
    let t_n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2500);
    let params = ModelParams::new(6.0, 1e-5, 0.3)?;
    let basis = BasisSpec::new(16384, 0.3)?;
    let opts = TrajectoryOptions {
        storage: StoragePolicy::At(BTreeSet::from([t_n])),
        ..Default::default()
    };
    let traj = ForwardTrajectory::build(params, basis, 10.0, t_n, opts)?;
    let (psi, _) = traj.states_at(t_n)?;
    let pass = backward_pass(&traj, t_n, Insertion::Momentum)?;

    let fwd = fit_localization_length(&psi.momentum_profile())?;
    let rev = fit_localization_length(&pass.psi_r.momentum_profile())?;
    println!("<p^2>(t_n) = {:.1}", psi.moments().mean_p2);
    println!("<p^2>_R(t_0) = {:.1}", pass.end().mean_p2);
    println!("L at t_n          = {:.2} (r^2 {:.3}, |p| in [{:.0}, {:.0}])", fwd.value, fwd.r_squared, fwd.window.lo, fwd.window.hi);
    println!("L after reversal  = {:.2} (r^2 {:.3})", rev.value, rev.r_squared);
    Ok(())
}
