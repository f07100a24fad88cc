//! Split-step Floquet propagator `U = U_f U_K`.
//!
//! The kick `U_K = exp(-i V(theta) / hbar)` is diagonal on the angle grid and
//! the free part `U_f = exp(-i p^2 / (2 hbar))` is diagonal in momentum. The
//! adjoint reverses the operator order and conjugates each factor; since
//! `V` is complex, the kick's gain `exp(K lambda sin(theta) / hbar)` is the
//! same in both directions and only its phase flips.

use num_complex::Complex64;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::model::{Direction, ModelParams};
use crate::state::{WaveState, ROUNDOFF_FLOOR, TAIL_MASS_LIMIT};

/// Forward kick factor at angle `theta`.
pub fn kick_factor(params: &ModelParams, theta: f64) -> Complex64 {
    let k_over_h = params.kick_strength / params.hbar_eff;
    let gain = (k_over_h * params.non_hermiticity * theta.sin()).exp();
    Complex64::from_polar(gain, -k_over_h * theta.cos())
}

/// Forward free-evolution phase for momentum index `n`: `exp(-i n^2 hbar / 2)`.
pub fn free_factor(hbar: f64, n: i64) -> Complex64 {
    // n^2 is exact in f64 up to |n| < 2^26; reduce the phase modulo 2 pi
    // before scaling to keep large-|n| phases accurate.
    let n2 = (n as f64) * (n as f64);
    let phase = (n2 * hbar / 2.0) % std::f64::consts::TAU;
    Complex64::from_polar(1.0, -phase)
}

/// Precomputed diagonal factors for one `(params, basis)` pair.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: ModelParams,
    basis: BasisSpec,
    kick_fwd: Vec<Complex64>,
    kick_adj: Vec<Complex64>,
    free_fwd: Vec<Complex64>,
    free_adj: Vec<Complex64>,
    tail_limit: Option<f64>,
    floor: Option<f64>,
}

impl Propagator {
    pub fn new(params: ModelParams, basis: BasisSpec) -> Result<Self> {
        params.validate()?;
        if params.hbar_eff != basis.hbar_eff() {
            return Err(Error::InvalidParameter {
                name: "hbar_eff",
                reason: format!(
                    "model uses {} but basis uses {}",
                    params.hbar_eff,
                    basis.hbar_eff()
                ),
            });
        }
        let n = basis.n_modes();
        let kick_fwd: Vec<Complex64> = (0..n).map(|j| kick_factor(&params, basis.angle(j))).collect();
        let kick_adj = kick_fwd.iter().map(|z| z.conj()).collect();
        let free_fwd: Vec<Complex64> = (0..n)
            .map(|k| free_factor(basis.hbar_eff(), basis.index_of_slot(k)))
            .collect();
        let free_adj = free_fwd.iter().map(|z| z.conj()).collect();
        Ok(Self {
            params,
            basis,
            kick_fwd,
            kick_adj,
            free_fwd,
            free_adj,
            tail_limit: Some(TAIL_MASS_LIMIT),
            floor: Some(ROUNDOFF_FLOOR),
        })
    }

    /// Replaces the tail-mass limit; `None` disables the guard. Only tiny
    /// verification grids, where any smooth state touches the edge, need it off.
    pub fn with_tail_limit(mut self, limit: Option<f64>) -> Self {
        self.tail_limit = limit;
        self
    }

    /// Replaces the roundoff floor; `None` keeps every amplitude.
    pub fn with_roundoff_floor(mut self, floor: Option<f64>) -> Self {
        self.floor = floor;
        self
    }

    pub fn tail_limit(&self) -> Option<f64> {
        self.tail_limit
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    fn check_basis(&self, state: &WaveState) -> Result<()> {
        let b = state.basis();
        if b != &self.basis {
            return Err(Error::BasisMismatch {
                state: b.n_modes(),
                state_hbar: b.hbar_eff(),
                expected: self.basis.n_modes(),
                expected_hbar: self.basis.hbar_eff(),
            });
        }
        Ok(())
    }

    /// Multiplies by the kick factor on the angle grid. Leaves the state in
    /// angle representation.
    pub fn apply_kick(&self, state: &mut WaveState, dir: Direction) -> Result<()> {
        self.check_basis(state)?;
        state.to_angle();
        let f = match dir {
            Direction::Forward => &self.kick_fwd,
            Direction::Adjoint => &self.kick_adj,
        };
        for (z, m) in state.amplitudes_mut().iter_mut().zip(f) {
            *z *= m;
        }
        Ok(())
    }

    /// Multiplies by the free phase in momentum space. Leaves the state in
    /// momentum representation.
    pub fn apply_free(&self, state: &mut WaveState, dir: Direction) -> Result<()> {
        self.check_basis(state)?;
        state.to_momentum();
        let f = match dir {
            Direction::Forward => &self.free_fwd,
            Direction::Adjoint => &self.free_adj,
        };
        for (z, m) in state.amplitudes_mut().iter_mut().zip(f) {
            *z *= m;
        }
        Ok(())
    }

    /// One period. Forward is `U_f U_K`; adjoint is `U_K^dagger U_f^dagger`.
    /// The state ends in momentum representation, the roundoff floor is
    /// applied and the tail-mass guard is checked; `step` only labels the error.
    pub fn step(&self, state: &mut WaveState, dir: Direction, step: usize) -> Result<()> {
        match dir {
            Direction::Forward => {
                self.apply_kick(state, dir)?;
                self.apply_free(state, dir)?;
            }
            Direction::Adjoint => {
                self.apply_free(state, dir)?;
                self.apply_kick(state, dir)?;
                state.to_momentum();
            }
        }
        if let Some(floor) = self.floor {
            state.clear_below(floor);
        }
        match self.tail_limit {
            Some(limit) => state.check_tail(step, limit),
            None => Ok(()),
        }
    }

    /// `count` periods in one direction without renormalization.
    pub fn evolve(&self, state: &mut WaveState, dir: Direction, count: usize) -> Result<()> {
        for i in 0..count {
            self.step(state, dir, i + 1)?;
        }
        Ok(())
    }
}

/// Single kick with factors computed on the fly.
pub fn apply_kick(state: &WaveState, params: &ModelParams, dir: Direction) -> Result<WaveState> {
    let mut out = state.clone();
    Propagator::new(*params, *state.basis())?.apply_kick(&mut out, dir)?;
    out.to_momentum();
    out.check_tail(0, TAIL_MASS_LIMIT)?;
    Ok(out)
}

pub fn apply_free(state: &WaveState, params: &ModelParams, dir: Direction) -> Result<WaveState> {
    let mut out = state.clone();
    Propagator::new(*params, *state.basis())?.apply_free(&mut out, dir)?;
    Ok(out)
}

pub fn floquet_step(state: &WaveState, params: &ModelParams, dir: Direction) -> Result<WaveState> {
    let mut out = state.clone();
    Propagator::new(*params, *state.basis())?.step(&mut out, dir, 1)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize, k: f64, lambda: f64, hbar: f64) -> (ModelParams, BasisSpec) {
        (
            ModelParams::new(k, lambda, hbar).unwrap(),
            BasisSpec::new(n, hbar).unwrap(),
        )
    }

    fn max_diff(a: &WaveState, b: &WaveState) -> f64 {
        let (a, b) = (a.clone().in_momentum(), b.clone().in_momentum());
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_kick_is_identity() {
        let (p, b) = setup(256, 0.0, 0.7, 1.0);
        let s = WaveState::gaussian(b, 10.0).unwrap();
        let out = apply_kick(&s, &p, Direction::Forward).unwrap();
        assert!(max_diff(&s, &out) < 1e-12);
    }

    #[test]
    fn hermitian_kick_preserves_norm() {
        let (p, b) = setup(1024, 5.0, 0.0, 1.0);
        let s = WaveState::gaussian(b, 10.0).unwrap();
        let out = apply_kick(&s, &p, Direction::Forward).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kick_gain_matches_quadrature() {
        let (p, b) = setup(1024, 5.0, 0.15, 1.0);
        let sigma = 10.0;
        let s = WaveState::gaussian(b, sigma).unwrap();
        let out = apply_kick(&s, &p, Direction::Forward).unwrap();
        // Oracle: int |exp(K lambda sin / hbar) psi|^2 / int |psi|^2 on a
        // refined grid.
        let m = 1 << 16;
        let h = std::f64::consts::TAU / m as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..m {
            let t = -std::f64::consts::PI + j as f64 * h;
            let g = (-sigma * t * t).exp();
            num += g * (2.0 * 5.0 * 0.15 * t.sin()).exp() * h;
            den += g * h;
        }
        assert!((out.norm_sqr() - num / den).abs() < 1e-10);
    }

    #[test]
    fn free_leaves_zero_mode_and_density_alone() {
        let (p, b) = setup(64, 3.0, 0.2, 0.7);
        let s = WaveState::momentum_eigenstate(b, 0).unwrap();
        assert_eq!(apply_free(&s, &p, Direction::Forward).unwrap(), s);

        let g = WaveState::gaussian(b, 10.0).unwrap();
        let f = apply_free(&g, &p, Direction::Forward).unwrap();
        for (x, y) in g.amplitudes().iter().zip(f.amplitudes()) {
            assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-12);
        }
        let back = apply_free(&f, &p, Direction::Adjoint).unwrap();
        assert!(max_diff(&g, &back) < 1e-12);
    }

    #[test]
    fn hermitian_reversal_recovers_state() {
        let (p, b) = setup(8192, 6.0, 0.0, 0.3);
        let prop = Propagator::new(p, b).unwrap();
        let s0 = WaveState::gaussian(b, 10.0).unwrap();
        let mut s = s0.clone();
        prop.evolve(&mut s, Direction::Forward, 50).unwrap();
        prop.evolve(&mut s, Direction::Adjoint, 50).unwrap();
        assert!((s.inner(&s0).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unitary_norm_drift() {
        let (p, b) = setup(256, 2.0, 0.0, 1.0);
        let prop = Propagator::new(p, b).unwrap();
        let mut s = WaveState::gaussian(b, 10.0).unwrap();
        let mut prev = s.norm_sqr();
        for i in 0..10_000 {
            prop.step(&mut s, Direction::Forward, i).unwrap();
            let now = s.norm_sqr();
            assert!((now - prev).abs() < 1e-13);
            prev = now;
        }
        assert!((prev - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gain_favours_upper_half_circle() {
        let (p, b) = setup(128, 2.0, 0.3, 1.0);
        let uniform = WaveState::momentum_eigenstate(b, 0).unwrap();
        let mut s = apply_kick(&uniform, &p, Direction::Forward).unwrap();
        s.to_angle();
        let (mut upper, mut lower) = (0.0, 0.0);
        for (j, z) in s.amplitudes().iter().enumerate() {
            let th = b.angle(j);
            if th > 0.0 && th < std::f64::consts::PI {
                upper += z.norm_sqr();
            } else if th < 0.0 && th > -std::f64::consts::PI {
                lower += z.norm_sqr();
            }
        }
        assert!(upper > lower);
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let (p, b) = setup(64, 1.0, 0.0, 1.0);
        let prop = Propagator::new(p, b).unwrap();
        let mut other = WaveState::gaussian(BasisSpec::new(32, 1.0).unwrap(), 10.0).unwrap();
        assert!(matches!(
            prop.step(&mut other, Direction::Forward, 0),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn overflow_is_detected() {
        let (p, b) = setup(64, 1.0, 0.0, 1.0);
        let prop = Propagator::new(p, b).unwrap();
        let mut s = WaveState::momentum_eigenstate(b, 30).unwrap();
        assert!(matches!(
            prop.step(&mut s, Direction::Forward, 7),
            Err(Error::GridOverflow { step: 7, .. })
        ));
    }
}
