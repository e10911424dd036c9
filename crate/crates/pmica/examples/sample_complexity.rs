//! Estimator dispersion against sample size: the replicate standard
//! deviation of the fourth cumulant decays like 1/sqrt(N).
//!
//! ```text
//! cargo run --release --example sample_complexity
//! ```

use pmica::harness::{run_sample_complexity, ExperimentId, SweepSpec};

fn main() -> pmica::Result<()> {
    let spec = SweepSpec {
        experiment: ExperimentId::SampleComplexity,
        dims: vec![2],
        sample_sizes: vec![1_000, 10_000, 100_000],
        replicates: 12,
        n_inits: 3,
        base_seed: 1,
        ..SweepSpec::default()
    };
    let out = run_sample_complexity(&spec)?;
    println!("{}", out.tables[0].1.to_csv_string());
    println!("{}", out.tables[1].1.to_csv_string());
    println!("(the fitted log-log slope approaches -1/2 as the grid widens)");
    Ok(())
}
