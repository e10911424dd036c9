//! Data ingestion: mix sources, whiten, and estimate moment and cumulant
//! tensors.
//!
//! ```text
//! cargo run --example whiten_and_cumulant
//! ```

use pmica::cumulants::{cumulant_tensor, moment_tensor, whiten};
use pmica::samplers::{mix, SourceSampler, SourceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pmica::Result<()> {
    let sampler = SourceSampler::new(SourceSpec::alpha_mix(0.8), 42)?;
    let s = sampler.sample(300_000)?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = pmica::optim::random_orthogonal(2, &mut rng);
    let x = mix(&s, a.matrix())?;

    let w = whiten(&x)?;
    let cov = w.whitened.covariance();
    println!(
        "whitened covariance:\n  [{:+.6} {:+.6}]\n  [{:+.6} {:+.6}]",
        cov[(0, 0)],
        cov[(0, 1)],
        cov[(1, 0)],
        cov[(1, 1)]
    );

    // For zero-mean data the third cumulant equals the third moment.
    let k3 = cumulant_tensor(&w.whitened, 3)?;
    let m3 = moment_tensor(&w.whitened, 3)?;
    println!(
        "||k3 - mu3|| on centered data: {:.2e}",
        k3.sub(&m3)?.frobenius_norm()
    );

    let k4 = cumulant_tensor(&w.whitened, 4)?;
    println!("k4 of the mixed, whitened data (canonical entries):");
    for (idx, _, value) in k4.iter_canonical() {
        let shown: Vec<usize> = idx.iter().map(|&i| i as usize + 1).collect();
        println!("  {shown:?} {value:+.4}");
    }
    println!(
        "mixing pushes the cumulant off the PMI pattern: residual {:.4}",
        pmica::subspace::ZeroPattern::Pmi
            .project_complement(&k4)
            .frobenius_norm()
    );
    Ok(())
}
