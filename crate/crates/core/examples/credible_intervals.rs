//! Per-coordinate posterior medians and 95% credible intervals, written as a
//! CSV ready for plotting, for two values of κ.
//!
//! ```text
//! cargo run --release --example credible_intervals -- [out-dir]
//! ```

use std::fs;
use std::path::PathBuf;

use spikeslab::harness::{
    emit_interval_data, generate_data, OutputFormat, PriorSpec, ReplicationKey, SignalSpec, SlabSpec,
};

fn main() -> spikeslab::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    fs::create_dir_all(&dir)?;

    let (theta, x) = generate_data(&SignalSpec::new(500, 100, 5.0)?, ReplicationKey::new(2012, 0, 0))?;
    let input = dir.join("observations.txt");
    let lines: Vec<String> = x.as_slice().iter().map(|v| format!("{v:.17}")).collect();
    fs::write(&input, lines.join("\n"))?;

    for kappa in [0.1, 1.0] {
        let out = dir.join(format!("intervals_kappa_{kappa}.csv"));
        let recs = emit_interval_data(&input, &PriorSpec::betabin(kappa), &SlabSpec::laplace(1.0), &out, OutputFormat::Csv)?;
        let zeros: Vec<_> = recs.iter().filter(|r| theta[r.index] == 0.0).collect();
        let covered = zeros.iter().filter(|r| r.contains(0.0)).count();
        let mut widths: Vec<f64> = recs.iter().map(|r| r.width()).collect();
        widths.sort_by(f64::total_cmp);
        println!(
            "kappa={kappa}: {covered}/{} zero coordinates covered, median width {:.3} -> {}",
            zeros.len(),
            widths[widths.len() / 2],
            out.display()
        );
    }
    Ok(())
}
