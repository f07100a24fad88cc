//! Least-squares extraction of scaling laws: power-law exponents, ballistic
//! rates, localization lengths and the kick-strength exponent. All fits are
//! unweighted ordinary least squares, in log space where a law is a power
//! or an exponential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of points for a power-law fit.
pub const MIN_POWER_LAW_POINTS: usize = 8;

/// Inclusive range on the abscissa of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const ALL: Window = Window {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// The default power-law window `[t_max / 25, t_max]`.
    pub fn power_law_default(t_max: f64) -> Self {
        Self::new(t_max / 25.0, t_max)
    }

    /// The last half, `[t_max / 2, t_max]`.
    pub fn last_half(t_max: f64) -> Self {
        Self::new(t_max / 2.0, t_max)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn select(&self, series: &[(f64, f64)]) -> Vec<(f64, f64)> {
        series.iter().copied().filter(|(x, _)| self.contains(*x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Exponent, rate or length, depending on the fit.
    pub value: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// Abscissa range actually covered by the fitted points.
    pub window: Window,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// OLS line through `(x, y)`. A constant `y` gives slope 0 and `r^2 = 1`.
pub fn line_fit(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let first = points[0].1;
    let constant = points.iter().all(|p| p.1 == first);
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae are equal".into()));
    }
    if constant {
        return Ok(LineFit {
            slope: 0.0,
            intercept: first,
            r_squared: 1.0,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

fn span(points: &[(f64, f64)]) -> Window {
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Window::new(lo, hi)
}

fn require_positive(points: &[(f64, f64)]) -> Result<()> {
    for (i, (x, y)) in points.iter().enumerate() {
        if !(*x > 0.0) {
            return Err(Error::NonPositiveData { index: i, value: *x });
        }
        if !(*y > 0.0) {
            return Err(Error::NonPositiveData { index: i, value: *y });
        }
    }
    Ok(())
}

/// `y = A t^eta` by a line through `(ln t, ln y)`.
pub fn fit_power_law(series: &[(f64, f64)], window: Window) -> Result<FitResult> {
    let pts = window.select(series);
    if pts.len() < MIN_POWER_LAW_POINTS {
        return Err(Error::Fit(format!(
            "power law needs at least {MIN_POWER_LAW_POINTS} points in window, got {}",
            pts.len()
        )));
    }
    require_positive(&pts)?;
    let logs: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let line = line_fit(&logs)?;
    Ok(FitResult {
        value: line.slope,
        prefactor: line.intercept.exp(),
        r_squared: line.r_squared,
        window: span(&pts),
        points: pts.len(),
    })
}

/// Exponent of the end-of-reversal energy `<p^2(t_0)>_R` against `t_n`.
pub fn backward_growth_exponent(series: &[(f64, f64)], window: Window) -> Result<FitResult> {
    fit_power_law(series, window)
}

/// Log-log slope of the saturated OTOC against kick strength.
pub fn k_scaling_exponent(table: &[(f64, f64)]) -> Result<FitResult> {
    if table.len() < 4 {
        return Err(Error::Fit(format!(
            "K scaling needs at least 4 kick strengths, got {}",
            table.len()
        )));
    }
    require_positive(table)?;
    let logs: Vec<(f64, f64)> = table.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let line = line_fit(&logs)?;
    Ok(FitResult {
        value: line.slope,
        prefactor: line.intercept.exp(),
        r_squared: line.r_squared,
        window: span(table),
        points: table.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallisticMode {
    /// `<p^2> = gamma^2 t^2`.
    Quadratic,
    /// `<p> = gamma t`.
    Linear,
}

pub fn fit_ballistic_rate(
    series: &[(f64, f64)],
    mode: BallisticMode,
    window: Window,
) -> Result<FitResult> {
    let pts = window.select(series);
    require_positive(&pts)?;
    let (line, value) = match mode {
        BallisticMode::Quadratic => {
            let sq: Vec<(f64, f64)> = pts.iter().map(|(t, y)| (t * t, *y)).collect();
            let line = line_fit(&sq)?;
            (line, line.slope.max(0.0).sqrt())
        }
        BallisticMode::Linear => {
            let line = line_fit(&pts)?;
            (line, line.slope)
        }
    };
    Ok(FitResult {
        value,
        prefactor: line.intercept,
        r_squared: line.r_squared,
        window: span(&pts),
        points: pts.len(),
    })
}

/// Arithmetic mean of `y` over the window.
pub fn time_avg(series: &[(f64, f64)], window: Window) -> Result<f64> {
    let pts = window.select(series);
    if pts.is_empty() {
        return Err(Error::Fit("empty averaging window".into()));
    }
    Ok(pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64)
}

/// Densities below this are treated as numerical floor.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Decay length `L` of `|psi(p)|^2 ~ exp(-|p| / L)`.
///
/// `profile` holds `(p, density)` pairs. The core `|p| < 2 L0`, with
/// `L0 = sqrt(<p^2> / 2)` the exponential-profile estimate, and points below
/// [`DENSITY_FLOOR`] are dropped; each side gets its own line through
/// `(|p|, ln density)` and the two lengths are averaged. `prefactor`
/// carries the averaged amplitude and `r_squared` the mean of both sides.
pub fn fit_localization_length(profile: &[(f64, f64)]) -> Result<FitResult> {
    let total: f64 = profile.iter().map(|p| p.1).sum();
    if !(total > 0.0) {
        return Err(Error::Fit("density has no mass".into()));
    }
    let m2 = profile.iter().map(|(p, d)| p * p * d).sum::<f64>() / total;
    let l0 = (m2 / 2.0).sqrt();
    let peak = profile.iter().map(|p| p.1 / total).fold(0.0, f64::max);

    let side = |sign: f64| -> Result<(LineFit, Window, usize)> {
        let pts: Vec<(f64, f64)> = profile
            .iter()
            .filter(|(p, d)| p * sign >= 2.0 * l0 && d / total >= DENSITY_FLOOR)
            .map(|(p, d)| (p.abs(), (d / total).ln()))
            .collect();
        if pts.len() < 3 {
            return Err(Error::InsufficientDecay { decades: 0.0 });
        }
        let lowest = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let decades = (peak.ln() - lowest) / std::f64::consts::LN_10;
        if decades < 3.0 {
            return Err(Error::InsufficientDecay { decades });
        }
        let w = span(&pts);
        Ok((line_fit(&pts)?, w, pts.len()))
    };
    let (pos, wp, np) = side(1.0)?;
    let (neg, wn, nn) = side(-1.0)?;
    if !(pos.slope < 0.0 && neg.slope < 0.0) {
        return Err(Error::Fit("density does not decay on both sides".into()));
    }
    let length = 0.5 * (-1.0 / pos.slope - 1.0 / neg.slope);
    Ok(FitResult {
        value: length,
        prefactor: 0.5 * (pos.intercept.exp() + neg.intercept.exp()),
        r_squared: 0.5 * (pos.r_squared + neg.r_squared),
        window: Window::new(wp.lo.min(wn.lo), wp.hi.max(wn.hi)),
        points: np + nn,
    })
}
