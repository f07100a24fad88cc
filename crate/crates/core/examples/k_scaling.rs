//! Saturated OTOC against kick strength in the localized phase.
//!
//! cargo run --release --example k_scaling -- [t_max]

use ptkr::fit::{k_scaling_exponent, time_avg, Window};
use ptkr::otoc::{linear_schedule, otoc_series, SeriesOptions};
use ptkr::{BasisSpec, ModelParams};

fn main() -> ptkr::Result<()> {
    let t_max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000);
    let basis = BasisSpec::new(8192, 1.0)?;
    let times = linear_schedule(t_max, 40);
    let mut table = Vec::new();
    for k in [4.0, 6.0, 8.0, 10.0, 12.0] {
        let params = ModelParams::new(k, 1e-5, 1.0)?;
        let series = otoc_series(params, basis, 10.0, &times, &SeriesOptions::default())?;
        let c = series.column(0, t_max, |s| s.point.c);
        let c_bar = time_avg(&c, Window::last_half(t_max as f64))?;
        println!("K={k:<4} C-bar={c_bar:.4e}");
        table.push((k, c_bar));
    }
    let fit = k_scaling_exponent(&table)?;
    println!("log-log slope {:.2} (r^2 {:.3})", fit.value, fit.r_squared);
    Ok(())
}
