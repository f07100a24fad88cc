//! Coarse (K, lambda) phase diagram at hbar=1, drawn as text.
//!
//! cargo run --release --example phase_diagram

use ptkr::phase::{scan_diagram, ClassifierConfig, PhaseLabel};

fn main() -> ptkr::Result<()> {
    let k_axis = [2.0, 4.0, 6.0, 8.0];
    let lambda_axis = [0.0, 0.05, 0.1, 0.2, 0.3];
    let cfg = ClassifierConfig {
        t_max: 500,
        max_t_max: 2000,
        n_modes: 8192,
        max_modes: 1 << 16,
        ..Default::default()
    };
    let diagram = scan_diagram(&k_axis, &lambda_axis, 1.0, &cfg)?;

    print!("  K \\ lambda");
    for l in &lambda_axis {
        print!("{l:>7}");
    }
    println!();
    for (i, k) in k_axis.iter().enumerate() {
        print!("{k:>12}");
        for j in 0..lambda_axis.len() {
            let mark = match diagram.cell(i, j).classification.label {
                PhaseLabel::Unbroken => ".",
                PhaseLabel::Broken => "#",
                PhaseLabel::Inconclusive => "?",
            };
            print!("{mark:>7}");
        }
        println!();
    }
    println!("first broken lambda per K: {:?}", diagram.boundary());
    Ok(())
}
