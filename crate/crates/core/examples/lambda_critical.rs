//! Bisection for the PT-breaking threshold lambda_c.
//!
//! cargo run --release --example lambda_critical -- [K] [hbar] [lambda_hi]

use ptkr::phase::{find_lambda_c, ClassifierConfig};

fn main() -> ptkr::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let k = args.first().copied().unwrap_or(6.0);
    let hbar = args.get(1).copied().unwrap_or(0.3);
    let hi = args.get(2).copied().unwrap_or(0.02);

    let cfg = ClassifierConfig {
        n_modes: 16384,
        ..Default::default()
    };
    let r = find_lambda_c(k, hbar, 0.0, hi, hi / 200.0, &cfg)?;
    for (lambda, c) in &r.evaluations {
        println!(
            "lambda={lambda:.5e}  {:<12} mu={:.3e} r^2={:.3} t_max={} N={}",
            c.label.as_str(),
            c.mu,
            c.r_squared,
            c.t_max,
            c.n_modes
        );
    }
    println!("K={k} hbar={hbar}: lambda_c = {:.4e} in [{:.4e}, {:.4e}]", r.lambda_c, r.bracket.0, r.bracket.1);
    Ok(())
}
