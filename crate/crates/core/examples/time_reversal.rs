//! Forward evolution followed by the adjoint evolution of the Hermitian
//! rotor returns the initial wavepacket.
//!
//! cargo run --release --example time_reversal

use ptkr::{BasisSpec, Direction, ModelParams, Propagator, WaveState};

fn main() -> ptkr::Result<()> {
    let params = ModelParams::new(6.0, 0.0, 0.3)?;
    let basis = BasisSpec::new(8192, 0.3)?;
    let prop = Propagator::new(params, basis)?;

    let psi0 = WaveState::gaussian(basis, 10.0)?;
    let mut psi = psi0.clone();
    for steps in [50, 200, 500] {
        psi.clone_from(&psi0);
        prop.evolve(&mut psi, Direction::Forward, steps)?;
        let p2 = psi.moments().mean_p2;
        prop.evolve(&mut psi, Direction::Adjoint, steps)?;
        let fidelity = psi.inner(&psi0).norm();
        println!("{steps:4} kicks: <p^2> = {p2:10.3}, fidelity after reversal = {fidelity:.15}");
    }
    Ok(())
}
