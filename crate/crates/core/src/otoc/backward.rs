use crate::error::{Error, Result};
use crate::model::Direction;
use crate::propagator::Propagator;
use crate::state::WaveState;

use super::trajectory::ForwardTrajectory;

/// Operator inserted at the turning point. `Identity` is a diagnostic that
/// turns the protocol into a plain echo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Insertion {
    #[default]
    Momentum,
    Identity,
}

/// Observables of the `psi` branch after `k` adjoint steps, i.e. at physical
/// time `t_n - k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardSample {
    pub time: usize,
    /// Position on the doubled axis that runs `0 -> t_n -> 2 t_n`.
    pub doubled_time: usize,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub norm_sqr: f64,
}

#[derive(Debug, Clone)]
pub struct BackwardPass {
    pub t_n: usize,
    pub psi_r: WaveState,
    pub phi_r: WaveState,
    /// Forced norm of the `psi` branch, `<psi(t_n)|p^2|psi(t_n)>`.
    pub psi_norm: f64,
    /// Forced norm of the `phi` branch, `<phi~(t_n)|phi~(t_n)>`.
    pub phi_norm: f64,
    /// Ordered from `k = 0` (physical time `t_n`) to `k = t_n` (time 0).
    pub series: Vec<BackwardSample>,
}

impl BackwardPass {
    /// Observables of `psi_R(t_0)`.
    pub fn end(&self) -> &BackwardSample {
        self.series.last().expect("series holds at least the turning point")
    }
}

pub fn backward_pass(
    traj: &ForwardTrajectory,
    t_n: usize,
    insertion: Insertion,
) -> Result<BackwardPass> {
    let (psi, phi) = traj.states_at(t_n)?;
    let (psi_t, phi_t) = match insertion {
        Insertion::Momentum => (psi.apply_p()?, phi.apply_p()?),
        Insertion::Identity => (psi, phi),
    };
    let prop = traj.propagator();
    let (psi_leg, phi_leg) = rayon::join(
        || reverse(prop, psi_t, t_n, true),
        || reverse(prop, phi_t, t_n, false),
    );
    let (psi_r, psi_norm, series) = psi_leg?;
    let (phi_r, phi_norm, _) = phi_leg?;
    Ok(BackwardPass {
        t_n,
        psi_r,
        phi_r,
        psi_norm,
        phi_norm,
        series,
    })
}

/// `t_n` adjoint steps, each followed by a rescale to the starting norm.
fn reverse(
    prop: &Propagator,
    mut state: WaveState,
    t_n: usize,
    record: bool,
) -> Result<(WaveState, f64, Vec<BackwardSample>)> {
    let target = state.norm_sqr();
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::ZeroState { norm_sqr: target });
    }
    let sample = |s: &WaveState, k: usize| {
        let m = s.moments();
        BackwardSample {
            time: t_n - k,
            doubled_time: t_n + k,
            mean_p: m.mean_p,
            mean_p2: m.mean_p2,
            norm_sqr: m.norm_sqr,
        }
    };
    let mut series = Vec::new();
    if record {
        series.reserve(t_n + 1);
        series.push(sample(&state, 0));
    }
    for k in 1..=t_n {
        prop.step(&mut state, Direction::Adjoint, k)?;
        state.set_norm_sqr(target);
        if record {
            series.push(sample(&state, k));
        }
    }
    Ok((state, target, series))
}
