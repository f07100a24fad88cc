//! Momentum grid and the angle/momentum transform pair.
//!
//! Momentum amplitudes are stored in FFT order: slot `k` holds index
//! `n = k` for `k < N/2` and `n = k - N` otherwise. The angle grid is
//! `theta_j = -pi + 2 pi j / N`.
//!
//! With that origin the unitary transform is
//! `a_j = N^{-1/2} sum_n (-1)^n psi_n exp(2 pi i n j / N)`, and because `N`
//! is even the sign `(-1)^n` equals `(-1)^k` for the storage slot.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    n_modes: usize,
    hbar_eff: f64,
}

impl BasisSpec {
    pub fn new(n_modes: usize, hbar_eff: f64) -> Result<Self> {
        if n_modes < 4 || n_modes % 2 != 0 {
            return Err(Error::InvalidBasis(format!(
                "n_modes must be even and at least 4, got {n_modes}"
            )));
        }
        if !(hbar_eff.is_finite() && hbar_eff > 0.0) {
            return Err(Error::InvalidBasis(format!(
                "hbar_eff must be positive and finite, got {hbar_eff}"
            )));
        }
        Ok(Self { n_modes, hbar_eff })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hbar_eff(&self) -> f64 {
        self.hbar_eff
    }

    /// Momentum index `n` stored in `slot`.
    #[inline]
    pub fn index_of_slot(&self, slot: usize) -> i64 {
        let n = self.n_modes as i64;
        let k = slot as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Storage slot of momentum index `n`, if it is on the grid.
    pub fn slot_of_index(&self, n: i64) -> Option<usize> {
        let half = (self.n_modes / 2) as i64;
        if n < -half || n >= half {
            return None;
        }
        Some(n.rem_euclid(self.n_modes as i64) as usize)
    }

    #[inline]
    pub fn momentum_of_slot(&self, slot: usize) -> f64 {
        self.index_of_slot(slot) as f64 * self.hbar_eff
    }

    #[inline]
    pub fn angle(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.n_modes as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_modes).map(|j| self.angle(j)).collect()
    }

    /// Momentum eigenvalues `p_n = n hbar` in storage order.
    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_modes).map(|k| self.momentum_of_slot(k)).collect()
    }

    /// Whether `slot` lies in the outer tenth of the index range on either side.
    pub fn is_tail_slot(&self, slot: usize) -> bool {
        let n = self.index_of_slot(slot);
        let half = (self.n_modes / 2) as i64;
        let band = (self.n_modes / 10).max(1) as i64;
        n < -half + band || n >= half - band
    }

    /// Smallest power-of-two grid whose guard band sits beyond `max_momentum`
    /// with a safety factor of 1.5, never smaller than `floor`.
    pub fn sized_for(max_momentum: f64, hbar_eff: f64, floor: usize) -> Result<Self> {
        let needed = 1.5 * max_momentum.abs() / hbar_eff / 0.4;
        let mut n = floor.max(4).next_power_of_two();
        while (n as f64) < needed {
            n *= 2;
        }
        Self::new(n, hbar_eff)
    }

    /// Momentum to angle, in place.
    pub(crate) fn to_angle_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n_modes);
        let plans = plans_for(self.n_modes);
        let scale = 1.0 / (self.n_modes as f64).sqrt();
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= if k % 2 == 0 { scale } else { -scale };
        }
        run(&*plans.inverse, buf);
    }

    /// Angle to momentum, in place.
    pub(crate) fn to_momentum_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n_modes);
        let plans = plans_for(self.n_modes);
        run(&*plans.forward, buf);
        let scale = 1.0 / (self.n_modes as f64).sqrt();
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= if k % 2 == 0 { scale } else { -scale };
        }
    }
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans_for(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn run(fft: &dyn Fft<f64>, buf: &mut [Complex64]) {
    thread_local! {
        static SCRATCH: std::cell::RefCell<Vec<Complex64>> = const { std::cell::RefCell::new(Vec::new()) };
    }
    SCRATCH.with(|s| {
        let mut scratch = s.borrow_mut();
        let len = fft.get_inplace_scratch_len();
        if scratch.len() < len {
            scratch.resize(len, Complex64::new(0.0, 0.0));
        }
        fft.process_with_scratch(buf, &mut scratch[..len]);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(BasisSpec::new(2, 1.0).is_err());
        assert!(BasisSpec::new(7, 1.0).is_err());
        assert!(BasisSpec::new(8, 0.0).is_err());
        assert!(BasisSpec::new(8, f64::NAN).is_err());
        assert!(BasisSpec::new(8, 0.5).is_ok());
    }

    #[test]
    fn slot_index_round_trip() {
        let b = BasisSpec::new(16, 0.5).unwrap();
        for n in -8..8 {
            let slot = b.slot_of_index(n).unwrap();
            assert_eq!(b.index_of_slot(slot), n);
        }
        assert!(b.slot_of_index(8).is_none());
        assert!(b.slot_of_index(-9).is_none());
        assert_eq!(b.momentum_of_slot(b.slot_of_index(3).unwrap()), 1.5);
    }

    #[test]
    fn angle_grid_starts_at_minus_pi() {
        let b = BasisSpec::new(8, 1.0).unwrap();
        assert_eq!(b.angle(0), -PI);
        assert!((b.angle(4)).abs() < 1e-15);
    }

    #[test]
    fn transform_matches_direct_sum() {
        let b = BasisSpec::new(8, 1.0).unwrap();
        let psi: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(k as f64 * 0.3 - 1.0, (k * k) as f64 * 0.1))
            .collect();
        let mut buf = psi.clone();
        b.to_angle_in_place(&mut buf);
        for j in 0..8 {
            let theta = b.angle(j);
            let direct: Complex64 = (0..8)
                .map(|k| {
                    let n = b.index_of_slot(k) as f64;
                    psi[k] * Complex64::from_polar(1.0, n * theta)
                })
                .sum::<Complex64>()
                / 8f64.sqrt();
            assert!((buf[j] - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn tail_band_is_outer_tenth() {
        let b = BasisSpec::new(100, 1.0).unwrap();
        let tails: Vec<i64> = (0..100)
            .filter(|&k| b.is_tail_slot(k))
            .map(|k| b.index_of_slot(k))
            .collect();
        assert_eq!(tails.len(), 20);
        assert!(tails.contains(&-50) && tails.contains(&-41) && !tails.contains(&-40));
        assert!(tails.contains(&49) && tails.contains(&40) && !tails.contains(&39));
    }

    #[test]
    fn sized_for_covers_excursion() {
        let b = BasisSpec::sized_for(6300.0, 0.3, 8192).unwrap();
        assert!(0.4 * b.n_modes() as f64 * 0.3 > 6300.0);
        assert_eq!(BasisSpec::sized_for(1.0, 1.0, 8192).unwrap().n_modes(), 8192);
    }
}
