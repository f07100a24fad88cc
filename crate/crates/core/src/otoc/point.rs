use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::WaveState;

use super::backward::{backward_pass, BackwardPass, Insertion};
use super::trajectory::ForwardTrajectory;

/// `C(t_n) = C1 + C2 - 2 Re C3` at one kick count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtocPoint {
    pub t_n: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: Complex64,
    pub c: f64,
}

impl OtocPoint {
    pub fn new(t_n: usize, c1: f64, c2: f64, c3: Complex64) -> Self {
        Self {
            t_n,
            c1,
            c2,
            c3,
            c: c1 + c2 - 2.0 * c3.re,
        }
    }

    /// `C1 / C2`.
    pub fn delta_12(&self) -> f64 {
        self.c1 / self.c2
    }

    /// `C1 / |Re C3|`.
    pub fn delta_13(&self) -> f64 {
        self.c1 / self.c3.re.abs()
    }
}

/// An OTOC point together with the factors of `C1 = <p^2(t_0)>_R N_psiR(t_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtocSample {
    pub point: OtocPoint,
    /// `<p^2(t_0)>_R`, the normalized energy at the end of the reversal.
    pub p2_reversed: f64,
    /// `N_psiR(t_0)`, the forced norm of the reversed `psi` branch.
    pub norm_reversed: f64,
}

/// The correlators from the two reversed states.
pub fn correlators(t_n: usize, psi_r: &WaveState, phi_r: &WaveState) -> OtocPoint {
    let basis = *psi_r.basis();
    let psi = psi_r.clone().in_momentum();
    let phi = phi_r.clone().in_momentum();
    let mut c1 = 0.0;
    let mut c3 = Complex64::new(0.0, 0.0);
    for (k, (a, b)) in psi.amplitudes().iter().zip(phi.amplitudes()).enumerate() {
        let p = basis.momentum_of_slot(k);
        c1 += p * p * a.norm_sqr();
        c3 += a.conj() * b * p;
    }
    OtocPoint::new(t_n, c1, phi.norm_sqr(), c3)
}

pub fn sample_from_pass(pass: &BackwardPass) -> OtocSample {
    let point = correlators(pass.t_n, &pass.psi_r, &pass.phi_r);
    OtocSample {
        point,
        p2_reversed: pass.end().mean_p2,
        norm_reversed: pass.psi_norm,
    }
}

pub fn otoc_point(traj: &ForwardTrajectory, t_n: usize) -> Result<OtocPoint> {
    Ok(otoc_sample(traj, t_n)?.point)
}

pub fn otoc_sample(traj: &ForwardTrajectory, t_n: usize) -> Result<OtocSample> {
    let pass = backward_pass(traj, t_n, Insertion::Momentum)?;
    Ok(sample_from_pass(&pass))
}
