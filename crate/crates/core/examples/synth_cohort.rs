//! Writes a synthetic raw cohort CSV: `synth_cohort <out.csv> [rows] [seed]`.

use mortband::synth::{cohort, SynthConfig};
use mortband::tabular::write_csv;

fn main() -> mortband::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let out = args.get(1).map_or("cohort.csv", String::as_str);
    let n_rows = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let seed = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t = cohort(&SynthConfig {
        n_rows,
        seed,
        ..SynthConfig::default()
    })?;
    write_csv(&t, out)
}
