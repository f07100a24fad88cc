//! Norm of the unnormalized state at K=5, hbar=1 for several lambda, with
//! the fitted growth rate.
//!
//! cargo run --release --example norm_growth

use ptkr::phase::{fit_growth_rate, norm_series, DEFAULT_MU_THRESHOLD};
use ptkr::{BasisSpec, ModelParams};

fn main() -> ptkr::Result<()> {
    let basis = BasisSpec::new(16384, 1.0)?;
    println!("lambda      mu          r^2     ln N(1000)");
    for lambda in [0.01, 0.05, 0.15, 0.2, 0.25, 0.3] {
        let params = ModelParams::new(5.0, lambda, 1.0)?;
        let series = norm_series(params, basis, 10.0, 1000)?;
        let fit = fit_growth_rate(&series, None)?;
        let grows = fit.mu > DEFAULT_MU_THRESHOLD && fit.r_squared > 0.5;
        println!(
            "{lambda:<8} {:>10.3e} {:>8.3} {:>12.3}{}",
            fit.mu,
            fit.r_squared,
            series.log_norm[1000],
            if grows { "  growing" } else { "" }
        );
    }
    Ok(())
}
