//! Runs a figure preset (or a reduced copy of one) and writes the CSV and
//! manifest consumed by the plotting scripts.
//!
//! cargo run --release --example figure_sweep -- fig3-left /tmp/fig3-left.csv [n]

use std::path::PathBuf;

use pd_truncation::sweep::{figure_preset, run_sweep, write_outputs, PRESET_NAMES};

fn main() -> pd_truncation::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig1-left".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| format!("{name}.csv")));
    let mut cfg =
        figure_preset(&name).inspect_err(|_| eprintln!("presets: {}", PRESET_NAMES.join(", ")))?;
    if let Some(n) = args.next() {
        cfg.n = n.parse().expect("n must be an integer");
    }
    let output = run_sweep(&cfg, 0)?;
    for (row, series) in output
        .rows
        .iter()
        .zip(&output.manifest.points)
        .filter(|(r, _)| r.k == 200)
    {
        println!(
            "k=200 {:<22} ĉ = {:.4}",
            output.manifest.series[series.series].label,
            row.c_hat.unwrap_or(f64::NAN)
        );
    }
    let manifest = write_outputs(&output, &out)?;
    println!("wrote {} and {}", out.display(), manifest.display());
    Ok(())
}
