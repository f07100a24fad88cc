//! OTOC growth below, just above and far above the PT-breaking threshold
//! at K=6, hbar=0.3, with fitted exponents.
//!
//! cargo run --release --example otoc_regimes -- [t_max]

use ptkr::fit::{fit_power_law, Window};
use ptkr::otoc::{log_schedule, otoc_series, SeriesOptions};
use ptkr::{BasisSpec, ModelParams};

fn main() -> ptkr::Result<()> {
    let t_max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    let times = log_schedule(t_max, 30);
    for (lambda, n_modes) in [(1e-5, 16384), (0.022, 65536), (0.9, 65536)] {
        let params = ModelParams::new(6.0, lambda, 0.3)?;
        let basis = BasisSpec::new(n_modes, 0.3)?;
        let series = otoc_series(params, basis, 10.0, &times, &SeriesOptions::default())?;
        let c = series.column(1, t_max, |s| s.point.c);
        let eta = fit_power_law(&c, Window::power_law_default(t_max as f64))?;
        let last = series.samples().last().expect("nonempty schedule");
        println!(
            "lambda={lambda:<7} eta={:.3} (r^2 {:.4})  C({t_max})={:.3e}  C1/C={:.4}",
            eta.value,
            eta.r_squared,
            last.point.c,
            last.point.c1 / last.point.c
        );
    }
    Ok(())
}
