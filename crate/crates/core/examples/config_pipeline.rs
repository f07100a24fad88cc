//! Config text to tables on disk to a fit, without the binary.
//!
//! cargo run --release --example config_pipeline -- [out_dir]

use std::path::PathBuf;

use ptkr::io::{parse_config, read_table, run_subcommand, Task};

const CONFIG: &str = "
model.kick_strength = 6
model.non_hermiticity = 0.9
model.hbar_eff = 0.3
basis.n_modes = 16384
schedule.t_max = 200
output.svg = true
";

fn main() -> ptkr::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/pipeline".into()));
    let cfg = parse_config(CONFIG)?;
    for f in run_subcommand(Task::Otoc, &cfg, &out)?.files {
        println!("wrote {}", f.display());
    }

    let mut fit_cfg = cfg.clone();
    fit_cfg.fit.input = Some(out.join("otoc.csv").display().to_string());
    run_subcommand(Task::Fit, &fit_cfg, &out)?;
    let fit = read_table(&out.join("fit.csv"))?;
    println!("eta = {:.3}", fit.numeric("value")?[0]);
    Ok(())
}
