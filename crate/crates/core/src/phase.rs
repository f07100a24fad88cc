//! Norm growth without forced normalization, exponential-growth
//! classification of PT-symmetry breaking, `lambda_c` bisection and
//! `(K, lambda)` phase diagrams.
//!
//! The norm `N(t) = <psi(t)|psi(t)>` is tracked in log space: the state is
//! rescaled to unit norm after each kick and the log of each rescale factor
//! is accumulated.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::model::{Direction, ModelParams};
use crate::propagator::Propagator;
use crate::state::WaveState;

pub const DEFAULT_MU_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_MIN_R_SQUARED: f64 = 0.5;
pub const MIN_GROWTH_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub params: ModelParams,
    /// `ln N(t)` for `t = 0..=t_max`.
    pub log_norm: Vec<f64>,
}

impl NormSeries {
    pub fn t_max(&self) -> usize {
        self.log_norm.len() - 1
    }

    /// The default fit window: the last half, `[t_max / 2, t_max]`.
    pub fn last_half(&self) -> (usize, usize) {
        (self.t_max() / 2, self.t_max())
    }
}

pub fn norm_series(
    params: ModelParams,
    basis: BasisSpec,
    sigma: f64,
    t_max: usize,
) -> Result<NormSeries> {
    if t_max < MIN_GROWTH_WINDOW {
        return Err(Error::InvalidParameter {
            name: "t_max",
            reason: format!("norm series needs at least {MIN_GROWTH_WINDOW} kicks"),
        });
    }
    let mut log_norm = Vec::with_capacity(t_max + 1);
    evolve_tracked(params, basis, sigma, t_max, |_, _, ln| log_norm.push(ln))?;
    Ok(NormSeries { params, log_norm })
}

/// Unnormalized forward evolution from the Gaussian. `observe(t, state,
/// ln N(t))` runs for `t = 0..=t_max` with `state` rescaled to unit norm.
pub fn evolve_tracked(
    params: ModelParams,
    basis: BasisSpec,
    sigma: f64,
    t_max: usize,
    mut observe: impl FnMut(usize, &WaveState, f64),
) -> Result<()> {
    let prop = Propagator::new(params, basis)?;
    let mut state = WaveState::gaussian(basis, sigma)?;
    let mut acc = 0.0;
    observe(0, &state, acc);
    for t in 1..=t_max {
        prop.step(&mut state, Direction::Forward, t)?;
        acc += state.set_norm_sqr(1.0).ln();
        observe(t, &state, acc);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Slope of `ln N` per kick.
    pub mu: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
}

/// Least-squares slope of `ln N(t)` on the inclusive window (default: last
/// half). A flat series gives `mu = 0`, `r^2 = 1`.
pub fn fit_growth_rate(series: &NormSeries, window: Option<(usize, usize)>) -> Result<GrowthFit> {
    let (lo, hi) = window.unwrap_or_else(|| series.last_half());
    if hi > series.t_max() || lo > hi {
        return Err(Error::Fit(format!(
            "window {lo}..={hi} outside series 0..={}",
            series.t_max()
        )));
    }
    if hi - lo + 1 < MIN_GROWTH_WINDOW {
        return Err(Error::Fit(format!(
            "growth window needs at least {MIN_GROWTH_WINDOW} samples"
        )));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|t| (t as f64, series.log_norm[t])).collect();
    let line = line_fit(&pts)?;
    Ok(GrowthFit {
        mu: line.slope,
        r_squared: line.r_squared,
        window: (lo, hi),
    })
}

/// `ln` of the arithmetic mean of `N(t)` over the window, by log-sum-exp so
/// that broken-phase norms never overflow.
pub fn mean_log_norm(log_norm: &[f64]) -> Result<f64> {
    if log_norm.is_empty() {
        return Err(Error::Fit("empty window".into()));
    }
    let m = log_norm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = log_norm.iter().map(|l| (l - m).exp()).sum();
    Ok(m + s.ln() - (log_norm.len() as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    Unbroken,
    Broken,
    /// The run hit the grid edge; retry on a larger basis.
    Inconclusive,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::Unbroken => "unbroken",
            PhaseLabel::Broken => "broken",
            PhaseLabel::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: PhaseLabel,
    pub mu: f64,
    pub r_squared: f64,
    /// `ln` of the mean norm over the fit window.
    pub log_norm_bar: f64,
    pub t_max: usize,
    pub n_modes: usize,
    /// Set when the label is [`PhaseLabel::Inconclusive`].
    pub reason: Option<String>,
}

/// Broken iff the fitted rate exceeds `mu_threshold` with `r^2 > 0.5`.
pub fn classify_point(
    params: ModelParams,
    basis: BasisSpec,
    sigma: f64,
    t_max: usize,
    mu_threshold: f64,
) -> Result<Classification> {
    let series = match norm_series(params, basis, sigma, t_max) {
        Ok(s) => s,
        Err(e @ Error::GridOverflow { .. }) => {
            return Ok(Classification {
                label: PhaseLabel::Inconclusive,
                mu: f64::NAN,
                r_squared: f64::NAN,
                log_norm_bar: f64::NAN,
                t_max,
                n_modes: basis.n_modes(),
                reason: Some(e.to_string()),
            })
        }
        Err(e) => return Err(e),
    };
    let fit = fit_growth_rate(&series, None)?;
    let log_norm_bar = mean_log_norm(&series.log_norm[fit.window.0..=fit.window.1])?;
    let label = if fit.mu > mu_threshold && fit.r_squared > DEFAULT_MIN_R_SQUARED {
        PhaseLabel::Broken
    } else {
        PhaseLabel::Unbroken
    };
    Ok(Classification {
        label,
        mu: fit.mu,
        r_squared: fit.r_squared,
        log_norm_bar,
        t_max,
        n_modes: basis.n_modes(),
        reason: None,
    })
}

/// Knobs shared by boundary searches and diagram scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub sigma: f64,
    pub t_max: usize,
    /// Upper limit when `t_max` is doubled for poorly fitted points.
    pub max_t_max: usize,
    pub mu_threshold: f64,
    pub n_modes: usize,
    /// Upper limit when the grid is doubled after an overflow.
    pub max_modes: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            t_max: 1000,
            max_t_max: 8000,
            mu_threshold: DEFAULT_MU_THRESHOLD,
            n_modes: 8192,
            max_modes: 1 << 18,
        }
    }
}

/// Classification that doubles the grid on overflow and doubles `t_max`
/// while `r^2 < 0.5`, within the configured limits.
pub fn classify_adaptive(params: ModelParams, cfg: &ClassifierConfig) -> Result<Classification> {
    let mut n_modes = cfg.n_modes;
    let mut t_max = cfg.t_max;
    loop {
        let basis = BasisSpec::new(n_modes, params.hbar_eff)?;
        let c = classify_point(params, basis, cfg.sigma, t_max, cfg.mu_threshold)?;
        match c.label {
            PhaseLabel::Inconclusive if n_modes * 2 <= cfg.max_modes => n_modes *= 2,
            PhaseLabel::Inconclusive => return Ok(c),
            _ if c.r_squared < DEFAULT_MIN_R_SQUARED && t_max * 2 <= cfg.max_t_max => t_max *= 2,
            _ => return Ok(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCritical {
    pub lambda_c: f64,
    /// Final `(unbroken, broken)` bracket.
    pub bracket: (f64, f64),
    pub evaluations: Vec<(f64, Classification)>,
}

/// Bisection for the onset of norm growth at fixed `(K, hbar)`.
pub fn find_lambda_c(
    kick_strength: f64,
    hbar_eff: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    tol: f64,
    cfg: &ClassifierConfig,
) -> Result<LambdaCritical> {
    if !(tol > 0.0) || !(lambda_lo < lambda_hi) || lambda_lo < 0.0 {
        return Err(Error::InvalidBracket(format!(
            "need 0 <= lo < hi and tol > 0, got lo={lambda_lo}, hi={lambda_hi}, tol={tol}"
        )));
    }
    let mut evaluations = Vec::new();
    let mut eval = |lambda: f64| -> Result<PhaseLabel> {
        let params = ModelParams::new(kick_strength, lambda, hbar_eff)?;
        let c = classify_adaptive(params, cfg)?;
        let label = c.label;
        evaluations.push((lambda, c));
        Ok(label)
    };
    let lo_label = eval(lambda_lo)?;
    if lo_label != PhaseLabel::Unbroken {
        return Err(Error::InvalidBracket(format!(
            "lambda={lambda_lo} classified {}, expected unbroken",
            lo_label.as_str()
        )));
    }
    let hi_label = eval(lambda_hi)?;
    if hi_label != PhaseLabel::Broken {
        return Err(Error::InvalidBracket(format!(
            "lambda={lambda_hi} classified {}, expected broken",
            hi_label.as_str()
        )));
    }
    let (mut lo, mut hi) = (lambda_lo, lambda_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match eval(mid)? {
            PhaseLabel::Broken => hi = mid,
            PhaseLabel::Unbroken => lo = mid,
            PhaseLabel::Inconclusive => {
                return Err(Error::InvalidBracket(format!(
                    "lambda={mid} stayed inconclusive up to {} modes",
                    cfg.max_modes
                )))
            }
        }
    }
    Ok(LambdaCritical {
        lambda_c: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub kick_strength: f64,
    pub non_hermiticity: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub k_axis: Vec<f64>,
    pub lambda_axis: Vec<f64>,
    pub hbar_eff: f64,
    pub mu_threshold: f64,
    /// Row-major: `cells[i * lambda_axis.len() + j]` is `(k_axis[i], lambda_axis[j])`.
    pub cells: Vec<PhaseCell>,
}

impl PhaseDiagram {
    pub fn cell(&self, i_k: usize, i_lambda: usize) -> &PhaseCell {
        &self.cells[i_k * self.lambda_axis.len() + i_lambda]
    }

    /// First broken `lambda` in each `K` column, if any.
    pub fn boundary(&self) -> Vec<Option<f64>> {
        (0..self.k_axis.len())
            .map(|i| {
                (0..self.lambda_axis.len())
                    .find(|&j| self.cell(i, j).classification.label == PhaseLabel::Broken)
                    .map(|j| self.lambda_axis[j])
            })
            .collect()
    }
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() || axis.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter {
            name,
            reason: "axis must be nonempty and strictly increasing".into(),
        });
    }
    Ok(())
}

/// Classifies every `(K, lambda)` cell; cells run in parallel and are
/// assembled by index.
pub fn scan_diagram(
    k_axis: &[f64],
    lambda_axis: &[f64],
    hbar_eff: f64,
    cfg: &ClassifierConfig,
) -> Result<PhaseDiagram> {
    check_axis("k_axis", k_axis)?;
    check_axis("lambda_axis", lambda_axis)?;
    let grid: Vec<(f64, f64)> = k_axis
        .iter()
        .flat_map(|&k| lambda_axis.iter().map(move |&l| (k, l)))
        .collect();
    let cells = grid
        .par_iter()
        .map(|&(k, l)| {
            let params = ModelParams::new(k, l, hbar_eff)?;
            Ok(PhaseCell {
                kick_strength: k,
                non_hermiticity: l,
                classification: classify_adaptive(params, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram {
        k_axis: k_axis.to_vec(),
        lambda_axis: lambda_axis.to_vec(),
        hbar_eff,
        mu_threshold: cfg.mu_threshold,
        cells,
    })
}
