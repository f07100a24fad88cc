use std::collections::{BTreeMap, BTreeSet};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::model::{Direction, ModelParams};
use crate::propagator::Propagator;
use crate::state::{Moments, WaveState, TAIL_MASS_LIMIT};

/// Which forward states are kept in memory. Anything not kept is recomputed
/// from the nearest earlier checkpoint; forward renormalization is a
/// per-step scalar rescale, so recomputed states are bit-identical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum StoragePolicy {
    #[default]
    All,
    Every(usize),
    At(BTreeSet<usize>),
}

impl StoragePolicy {
    fn keeps(&self, t: usize) -> bool {
        match self {
            StoragePolicy::All => true,
            StoragePolicy::Every(k) => t % (*k).max(1) == 0,
            StoragePolicy::At(set) => t == 0 || set.contains(&t),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryOptions {
    pub storage: StoragePolicy,
    pub tail_limit: Option<f64>,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            storage: StoragePolicy::All,
            tail_limit: Some(TAIL_MASS_LIMIT),
        }
    }
}

/// Forward leg of the OTOC protocol for both branches: `psi` starting from
/// the Gaussian and `phi = p psi`. After every step each branch is rescaled
/// back to its own initial norm.
#[derive(Debug, Clone)]
pub struct ForwardTrajectory {
    sigma: f64,
    t_max: usize,
    propagator: Propagator,
    checkpoints: BTreeMap<usize, (WaveState, WaveState)>,
    psi_norm0: f64,
    phi_norm0: f64,
    psi_growth: Vec<f64>,
    phi_growth: Vec<f64>,
    psi_moments: Vec<Moments>,
}

impl ForwardTrajectory {
    pub fn build(
        params: ModelParams,
        basis: BasisSpec,
        sigma: f64,
        t_max: usize,
        options: TrajectoryOptions,
    ) -> Result<Self> {
        let propagator = Propagator::new(params, basis)?.with_tail_limit(options.tail_limit);
        let psi0 = WaveState::gaussian(basis, sigma)?;
        let mut phi0 = psi0.apply_p()?;
        let psi_norm0 = psi0.norm_sqr();
        let phi_norm0 = phi0.set_norm_sqr(phi0.norm_sqr());
        assert!(phi_norm0 > 0.0, "p annihilated the initial Gaussian");

        let mut checkpoints = BTreeMap::new();
        let mut psi_moments = Vec::with_capacity(t_max + 1);
        psi_moments.push(psi0.moments());
        let mut psi_growth = Vec::with_capacity(t_max);
        let mut phi_growth = Vec::with_capacity(t_max);

        let (mut psi, mut phi) = (psi0.clone(), phi0.clone());
        checkpoints.insert(0, (psi0, phi0));
        for t in 1..=t_max {
            let (gp, gf) = rayon::join(
                || forced_step(&propagator, &mut psi, psi_norm0, t),
                || forced_step(&propagator, &mut phi, phi_norm0, t),
            );
            psi_growth.push(gp?);
            phi_growth.push(gf?);
            psi_moments.push(psi.moments());
            if options.storage.keeps(t) {
                checkpoints.insert(t, (psi.clone(), phi.clone()));
            }
        }
        Ok(Self {
            sigma,
            t_max,
            propagator,
            checkpoints,
            psi_norm0,
            phi_norm0,
            psi_growth,
            phi_growth,
            psi_moments,
        })
    }

    pub fn params(&self) -> &ModelParams {
        self.propagator.params()
    }

    pub fn basis(&self) -> &BasisSpec {
        self.propagator.basis()
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn psi_norm0(&self) -> f64 {
        self.psi_norm0
    }

    pub fn phi_norm0(&self) -> f64 {
        self.phi_norm0
    }

    /// Raw norm-squared growth factor of each forward step, before rescaling.
    pub fn psi_growth(&self) -> &[f64] {
        &self.psi_growth
    }

    pub fn phi_growth(&self) -> &[f64] {
        &self.phi_growth
    }

    /// Moments of the `psi` branch at `t = 0..=t_max`.
    pub fn psi_moments(&self) -> &[Moments] {
        &self.psi_moments
    }

    pub fn stored_times(&self) -> impl Iterator<Item = usize> + '_ {
        self.checkpoints.keys().copied()
    }

    /// `(psi(t), phi(t))`, recomputed from a checkpoint when not stored.
    pub fn states_at(&self, t: usize) -> Result<(WaveState, WaveState)> {
        if t > self.t_max {
            return Err(Error::TimeOutOfRange {
                requested: t,
                t_max: self.t_max,
            });
        }
        let (&start, states) = self
            .checkpoints
            .range(..=t)
            .next_back()
            .expect("t = 0 is always stored");
        let (mut psi, mut phi) = states.clone();
        for s in start + 1..=t {
            forced_step(&self.propagator, &mut psi, self.psi_norm0, s)?;
            forced_step(&self.propagator, &mut phi, self.phi_norm0, s)?;
        }
        Ok((psi, phi))
    }
}

/// One step followed by a rescale to `target`; returns the norm-squared
/// ratio the step produced.
pub(crate) fn forced_step(
    prop: &Propagator,
    state: &mut WaveState,
    target: f64,
    step: usize,
) -> Result<f64> {
    let before = state.norm_sqr();
    prop.step(state, Direction::Forward, step)?;
    let after = state.set_norm_sqr(target);
    Ok(after / before)
}
