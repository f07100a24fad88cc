//! Wave functions on the rotor grid.

use num_complex::Complex64;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};

/// Tail-mass limit: probability allowed in the outer tenth of the grid.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;

/// Momentum densities below this fraction of the norm are set to zero after
/// each step. Without it, rounding noise on remote modes is amplified by the
/// non-unitary kick and eventually trips the tail guard on large grids.
pub const ROUNDOFF_FLOOR: f64 = 1e-30;

/// Norm-squared below which a state is considered annihilated.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Momentum,
    Angle,
}

/// A state vector on the grid. Amplitudes in momentum representation use
/// FFT storage order (see [`BasisSpec`]); in angle representation entry `j`
/// is the unitary-normalized sample at `theta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    basis: BasisSpec,
    amps: Vec<Complex64>,
    repr: Representation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub norm_sqr: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub mean_p4: f64,
    /// `|psi_n|^2 / norm^2` in storage order.
    pub momentum_density: Vec<f64>,
    /// Probability per angle grid point.
    pub angle_density: Vec<f64>,
}

/// Moments only, without densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub norm_sqr: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub mean_p4: f64,
}

impl WaveState {
    pub fn from_momentum(basis: BasisSpec, amps: Vec<Complex64>) -> Result<Self> {
        Self::from_parts(basis, amps, Representation::Momentum)
    }

    pub fn from_angle(basis: BasisSpec, samples: Vec<Complex64>) -> Result<Self> {
        Self::from_parts(basis, samples, Representation::Angle)
    }

    fn from_parts(basis: BasisSpec, amps: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if amps.len() != basis.n_modes() {
            return Err(Error::InvalidBasis(format!(
                "expected {} amplitudes, got {}",
                basis.n_modes(),
                amps.len()
            )));
        }
        let s = Self { basis, amps, repr };
        let n2 = s.norm_sqr();
        if !n2.is_finite() || n2 <= ZERO_NORM_THRESHOLD {
            return Err(Error::ZeroState { norm_sqr: n2 });
        }
        Ok(s)
    }

    /// Momentum eigenstate `|n>`.
    pub fn momentum_eigenstate(basis: BasisSpec, n: i64) -> Result<Self> {
        let slot = basis.slot_of_index(n).ok_or_else(|| {
            Error::InvalidBasis(format!("index {n} is off the grid"))
        })?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.n_modes()];
        amps[slot] = Complex64::new(1.0, 0.0);
        Self::from_momentum(basis, amps)
    }

    /// Gaussian `exp(-sigma theta^2 / 2)` sampled on `[-pi, pi)`,
    /// renormalized to unit norm, returned in momentum representation.
    pub fn gaussian(basis: BasisSpec, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("must be positive, got {sigma}"),
            });
        }
        let samples: Vec<Complex64> = (0..basis.n_modes())
            .map(|j| {
                let th = basis.angle(j);
                Complex64::new((-sigma * th * th / 2.0).exp(), 0.0)
            })
            .collect();
        let mut s = Self::from_angle(basis, samples)?;
        s.set_norm_sqr(1.0);
        s.clear_below(ROUNDOFF_FLOOR);
        Ok(s)
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitude of momentum index `n`; switches to momentum representation.
    pub fn amplitude(&mut self, n: i64) -> Option<Complex64> {
        self.to_momentum();
        self.basis.slot_of_index(n).map(|k| self.amps[k])
    }

    pub fn to_momentum(&mut self) {
        if self.repr == Representation::Angle {
            self.basis.to_momentum_in_place(&mut self.amps);
            self.repr = Representation::Momentum;
        }
    }

    pub fn to_angle(&mut self) {
        if self.repr == Representation::Momentum {
            self.basis.to_angle_in_place(&mut self.amps);
            self.repr = Representation::Angle;
        }
    }

    pub fn in_momentum(mut self) -> Self {
        self.to_momentum();
        self
    }

    /// Representation-independent (the transform is unitary).
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.amps {
            *z *= factor;
        }
    }

    /// Rescales to the requested norm squared and returns the norm squared
    /// found before rescaling.
    pub fn set_norm_sqr(&mut self, target: f64) -> f64 {
        let current = self.norm_sqr();
        self.scale((target / current).sqrt());
        current
    }

    /// `<self|other>`, both taken in momentum representation.
    pub fn inner(&self, other: &WaveState) -> Complex64 {
        let a = self.momentum_view();
        let b = other.momentum_view();
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    /// Probability fraction in the outer tenth of the momentum grid.
    pub fn tail_mass(&self) -> f64 {
        let amps = self.momentum_view();
        let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let tail: f64 = amps
            .iter()
            .enumerate()
            .filter(|(k, _)| self.basis.is_tail_slot(*k))
            .map(|(_, z)| z.norm_sqr())
            .sum();
        tail / total
    }

    /// Zeros momentum amplitudes whose density is below `floor` times the
    /// norm. Returns the number cleared.
    pub(crate) fn clear_below(&mut self, floor: f64) -> usize {
        self.to_momentum();
        let cut = floor * self.norm_sqr();
        let mut cleared = 0;
        for z in self.amps.iter_mut() {
            if *z != Complex64::new(0.0, 0.0) && z.norm_sqr() < cut {
                *z = Complex64::new(0.0, 0.0);
                cleared += 1;
            }
        }
        cleared
    }

    pub(crate) fn check_tail(&self, step: usize, limit: f64) -> Result<()> {
        let tail = self.tail_mass();
        if tail.is_nan() || tail > limit {
            return Err(Error::GridOverflow {
                step,
                tail_mass: tail,
                limit,
            });
        }
        Ok(())
    }

    fn momentum_view(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.repr {
            Representation::Momentum => std::borrow::Cow::Borrowed(&self.amps),
            Representation::Angle => {
                let mut buf = self.amps.clone();
                self.basis.to_momentum_in_place(&mut buf);
                std::borrow::Cow::Owned(buf)
            }
        }
    }

    fn angle_view(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.repr {
            Representation::Angle => std::borrow::Cow::Borrowed(&self.amps),
            Representation::Momentum => {
                let mut buf = self.amps.clone();
                self.basis.to_angle_in_place(&mut buf);
                std::borrow::Cow::Owned(buf)
            }
        }
    }

    /// Momentum moments on the normalized density.
    pub fn moments(&self) -> Moments {
        let amps = self.momentum_view();
        let (mut n2, mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0, 0.0);
        for (k, z) in amps.iter().enumerate() {
            let w = z.norm_sqr();
            let p = self.basis.momentum_of_slot(k);
            let p2 = p * p;
            n2 += w;
            s1 += w * p;
            s2 += w * p2;
            s4 += w * p2 * p2;
        }
        Moments {
            norm_sqr: n2,
            mean_p: s1 / n2,
            mean_p2: s2 / n2,
            mean_p4: s4 / n2,
        }
    }

    pub fn observables(&self) -> Observables {
        let m = self.moments();
        let momentum_density = self
            .momentum_view()
            .iter()
            .map(|z| z.norm_sqr() / m.norm_sqr)
            .collect();
        let angle_density = self
            .angle_view()
            .iter()
            .map(|z| z.norm_sqr() / m.norm_sqr)
            .collect();
        Observables {
            norm_sqr: m.norm_sqr,
            mean_p: m.mean_p,
            mean_p2: m.mean_p2,
            mean_p4: m.mean_p4,
            momentum_density,
            angle_density,
        }
    }

    /// `(p_n, |psi_n|^2 / norm^2)` sorted by momentum.
    pub fn momentum_profile(&self) -> Vec<(f64, f64)> {
        let amps = self.momentum_view();
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let n = self.basis.n_modes();
        (0..n)
            .map(|i| {
                let slot = (i + n / 2) % n;
                (self.basis.momentum_of_slot(slot), amps[slot].norm_sqr() / n2)
            })
            .collect()
    }

    /// Acts with `p` on the state: `psi_n -> n hbar psi_n`. The result is
    /// not renormalized; its norm squared is `<psi|p^2|psi>`.
    pub fn apply_p(&self) -> Result<WaveState> {
        let mut out = self.clone();
        out.to_momentum();
        for (k, z) in out.amps.iter_mut().enumerate() {
            *z *= self.basis.momentum_of_slot(k);
        }
        let n2 = out.norm_sqr();
        if n2 < ZERO_NORM_THRESHOLD {
            return Err(Error::ZeroState { norm_sqr: n2 });
        }
        Ok(out)
    }
}
