use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::state::TAIL_MASS_LIMIT;

use super::backward::{backward_pass, BackwardPass, Insertion};
use super::point::{sample_from_pass, OtocSample};
use super::trajectory::{ForwardTrajectory, StoragePolicy, TrajectoryOptions};

/// Default number of log-spaced sample times.
pub const DEFAULT_SAMPLE_COUNT: usize = 40;

/// `0` plus `count` log-spaced integers from 1 to `t_max`, deduplicated.
pub fn log_schedule(t_max: usize, count: usize) -> Vec<usize> {
    let mut set = BTreeSet::from([0]);
    if t_max >= 1 && count >= 1 {
        let top = (t_max as f64).ln();
        for i in 0..count {
            let frac = if count == 1 { 1.0 } else { i as f64 / (count - 1) as f64 };
            let t = (top * frac).exp().round() as usize;
            set.insert(t.clamp(1, t_max));
        }
    }
    set.into_iter().collect()
}

/// `count` evenly spaced integers from `t_max / count` to `t_max`, plus `0`.
pub fn linear_schedule(t_max: usize, count: usize) -> Vec<usize> {
    let mut set = BTreeSet::from([0]);
    for i in 1..=count {
        set.insert((t_max * i) / count.max(1));
    }
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocEntry {
    pub t_n: usize,
    pub outcome: Result<OtocSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocSeries {
    pub params: ModelParams,
    pub sigma: f64,
    pub n_modes: usize,
    pub entries: Vec<OtocEntry>,
}

impl OtocSeries {
    pub fn times(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.t_n).collect()
    }

    /// Successful samples only.
    pub fn samples(&self) -> impl Iterator<Item = &OtocSample> {
        self.entries.iter().filter_map(|e| e.outcome.as_ref().ok())
    }

    /// `(t, f(sample))` for successful samples with `t` inside `[lo, hi]`.
    pub fn column(&self, lo: usize, hi: usize, f: impl Fn(&OtocSample) -> f64) -> Vec<(f64, f64)> {
        self.samples()
            .filter(|s| s.point.t_n >= lo && s.point.t_n <= hi)
            .map(|s| (s.point.t_n as f64, f(s)))
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &Error)> {
        self.entries
            .iter()
            .filter_map(|e| e.outcome.as_ref().err().map(|r| (e.t_n, r)))
    }
}

#[derive(Debug, Clone)]
pub struct SeriesOptions {
    pub tail_limit: Option<f64>,
    /// Keep every forward state instead of only the sample times.
    pub store_all: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tail_limit: Some(TAIL_MASS_LIMIT),
            store_all: false,
        }
    }
}

/// One forward trajectory to the last sample time, then one backward pass
/// per sample (run in parallel, merged in sample order).
pub fn otoc_series(
    params: ModelParams,
    basis: BasisSpec,
    sigma: f64,
    sample_times: &[usize],
    options: &SeriesOptions,
) -> Result<OtocSeries> {
    if sample_times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            name: "sample_times",
            reason: "must be strictly increasing".into(),
        });
    }
    let t_max = sample_times.last().copied().unwrap_or(0);
    let storage = if options.store_all {
        StoragePolicy::All
    } else {
        StoragePolicy::At(sample_times.iter().copied().collect())
    };
    let traj = ForwardTrajectory::build(
        params,
        basis,
        sigma,
        t_max,
        TrajectoryOptions {
            storage,
            tail_limit: options.tail_limit,
        },
    )?;
    Ok(series_from_trajectory(&traj, sample_times))
}

pub fn series_from_trajectory(traj: &ForwardTrajectory, sample_times: &[usize]) -> OtocSeries {
    let entries = sample_times
        .par_iter()
        .map(|&t_n| OtocEntry {
            t_n,
            outcome: backward_pass(traj, t_n, Insertion::Momentum)
                .map(|pass| sample_from_pass(&pass)),
        })
        .collect();
    OtocSeries {
        params: *traj.params(),
        sigma: traj.sigma(),
        n_modes: traj.basis().n_modes(),
        entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversalPoint {
    /// Physical time `t_j` shared by both legs.
    pub time: usize,
    /// Backward-leg position on the doubled axis, `2 t_n - t_j`.
    pub doubled_time: usize,
    pub ratio: f64,
}

/// `R(t_j) = <p^2(2 t_n - t_j)>_R / <p^2(t_j)>` for `0 <= j <= n`, both on
/// normalized densities. Ordered by increasing `t_j`.
pub fn reversal_ratio_series(traj: &ForwardTrajectory, pass: &BackwardPass) -> Vec<ReversalPoint> {
    let fwd = traj.psi_moments();
    let mut out: Vec<ReversalPoint> = pass
        .series
        .iter()
        .map(|b| ReversalPoint {
            time: b.time,
            doubled_time: b.doubled_time,
            ratio: b.mean_p2 / fwd[b.time].mean_p2,
        })
        .collect();
    out.reverse();
    out
}
