//! Dense-matrix reference for small grids.
//!
//! Kick matrix elements come from Fourier coefficients of the kick factor
//! computed by a fine trapezoid rule and then folded modulo `N`, which is
//! the exact momentum-space form of a diagonal operator on an `N`-point
//! angle grid. Nothing here goes through the FFT path.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::propagator::kick_factor;

use super::point::OtocPoint;

pub const DENSE_MAX_MODES: usize = 16;

/// Square complex matrix in row-major order; rows and columns follow the
/// momentum storage order of [`BasisSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Fourier coefficients `c_k = (1/2 pi) int f(theta) e^{-i k theta}` of the
/// forward kick factor for `|k| <= k_max`, by a trapezoid rule with
/// `8 k_max` nodes (spectrally accurate for this entire function).
fn kick_coefficients(params: &ModelParams, k_max: i64) -> Vec<(i64, Complex64)> {
    let m = (8 * k_max) as usize;
    let samples: Vec<(f64, Complex64)> = (0..m)
        .map(|j| {
            let x = -PI + 2.0 * PI * j as f64 / m as f64;
            (x, kick_factor(params, x))
        })
        .collect();
    (-k_max..=k_max)
        .map(|k| {
            let c: Complex64 = samples
                .iter()
                .map(|(x, f)| f * Complex64::from_polar(1.0, -(k as f64) * x))
                .sum();
            (k, c / m as f64)
        })
        .collect()
}

/// Dense forward Floquet matrix `U_f U_K` on `basis`.
pub fn dense_floquet_matrix(params: &ModelParams, basis: &BasisSpec) -> Result<DenseMatrix> {
    let n = basis.n_modes();
    if n > DENSE_MAX_MODES {
        return Err(Error::OracleTooLarge {
            got: n,
            max: DENSE_MAX_MODES,
        });
    }
    let scale = params.kick_strength.abs() * (1.0 + params.non_hermiticity) / params.hbar_eff;
    let k_max = 64 + 4 * scale.ceil() as i64;
    let mut folded = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in kick_coefficients(params, k_max) {
        folded[k.rem_euclid(n as i64) as usize] += c;
    }
    let mut kick = DenseMatrix::zeros(n);
    for row in 0..n {
        for col in 0..n {
            let d = basis.index_of_slot(row) - basis.index_of_slot(col);
            kick[(row, col)] = folded[d.rem_euclid(n as i64) as usize];
        }
    }
    let free: Vec<Complex64> = (0..n)
        .map(|k| {
            let idx = basis.index_of_slot(k) as f64;
            Complex64::from_polar(1.0, -idx * idx * basis.hbar_eff() / 2.0)
        })
        .collect();
    Ok(DenseMatrix::diagonal(&free).matmul(&kick))
}

/// Sampled Gaussian transformed to momentum amplitudes by a direct sum.
pub fn dense_gaussian(basis: &BasisSpec, sigma: f64) -> Vec<Complex64> {
    let n = basis.n_modes();
    let raw: Vec<f64> = (0..n)
        .map(|j| (-sigma * basis.angle(j).powi(2) / 2.0).exp())
        .collect();
    let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
    (0..n)
        .map(|k| {
            let idx = basis.index_of_slot(k) as f64;
            raw.iter()
                .enumerate()
                .map(|(j, a)| Complex64::from_polar(a / norm, -idx * basis.angle(j)))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn rescale(v: &mut [Complex64], target: f64) {
    let s = (target / norm_sqr(v)).sqrt();
    v.iter_mut().for_each(|z| *z *= s);
}

/// The full forced-norm OTOC protocol by explicit matrix-vector algebra.
pub fn dense_oracle_otoc(
    params: &ModelParams,
    n_modes: usize,
    sigma: f64,
    t_n: usize,
) -> Result<OtocPoint> {
    if n_modes > DENSE_MAX_MODES {
        return Err(Error::OracleTooLarge {
            got: n_modes,
            max: DENSE_MAX_MODES,
        });
    }
    let basis = BasisSpec::new(n_modes, params.hbar_eff)?;
    let u = dense_floquet_matrix(params, &basis)?;
    let u_dag = u.adjoint();
    let p: Vec<f64> = (0..n_modes).map(|k| basis.momentum_of_slot(k)).collect();
    let apply_p = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter().zip(&p).map(|(z, pk)| z * pk).collect()
    };

    let mut psi = dense_gaussian(&basis, sigma);
    let mut phi = apply_p(&psi);
    let (n_psi, n_phi) = (norm_sqr(&psi), norm_sqr(&phi));
    for _ in 0..t_n {
        psi = u.apply(&psi);
        rescale(&mut psi, n_psi);
        phi = u.apply(&phi);
        rescale(&mut phi, n_phi);
    }
    let mut psi_r = apply_p(&psi);
    let mut phi_r = apply_p(&phi);
    let (n_psi_r, n_phi_r) = (norm_sqr(&psi_r), norm_sqr(&phi_r));
    for _ in 0..t_n {
        psi_r = u_dag.apply(&psi_r);
        rescale(&mut psi_r, n_psi_r);
        phi_r = u_dag.apply(&phi_r);
        rescale(&mut phi_r, n_phi_r);
    }
    let c1: f64 = psi_r.iter().zip(&p).map(|(z, pk)| pk * pk * z.norm_sqr()).sum();
    let c2 = norm_sqr(&phi_r);
    let c3: Complex64 = psi_r
        .iter()
        .zip(&phi_r)
        .zip(&p)
        .map(|((a, b), pk)| a.conj() * b * pk)
        .sum();
    Ok(OtocPoint::new(t_n, c1, c2, c3))
}
