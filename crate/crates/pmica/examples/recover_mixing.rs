//! The full separation pipeline: simulate PMI sources, mix them with a
//! hidden rotation, and recover it by minimizing the distance of the rotated
//! cumulant to the PMI pattern. A diagonal-pattern (fully independent) fit
//! on the same data is shown for contrast.
//!
//! ```text
//! cargo run --example recover_mixing
//! ```

use pmica::cumulants::{cumulant_tensor, whiten};
use pmica::metrics::{scorecard, sp_matched_error};
use pmica::optim::{rgd_fit, FitConfig, OrthoMatrix};
use pmica::samplers::{mix, SourceSampler, SourceSpec};
use pmica::subspace::ZeroPattern;

fn main() -> pmica::Result<()> {
    // sources that are pairwise mean independent but far from independent
    let sampler = SourceSampler::new(SourceSpec::alpha_mix(1.0), 7)?;
    let s = sampler.sample(500_000)?;
    let truth = OrthoMatrix::rotation2(0.5);
    let x = mix(&s, truth.matrix())?;

    let w = whiten(&x)?;
    let k4 = cumulant_tensor(&w.whitened, 4)?;
    let cfg = FitConfig {
        n_inits: 8,
        seed: 3,
        ..FitConfig::default()
    };

    for pattern in [ZeroPattern::Pmi, ZeroPattern::Diag] {
        let fit = rgd_fit(&k4, &pattern, &cfg)?;
        let card = scorecard(&fit.best_q, &k4, Some(&truth))?;
        let (err, _) = sp_matched_error(&fit.best_q, &truth)?;
        println!("pattern {}:", pattern.name());
        println!(
            "  best objective {:.3e} after {} runs, best start #{}",
            fit.best_value,
            fit.per_init.len(),
            fit.best_init
        );
        println!(
            "  distance to PMI {:.4}, distance to independent {:.4}",
            card.distance_to_pmi, card.distance_to_independent
        );
        println!("  rotation error modulo signed permutations: {err:.4}");
    }
    println!("(the diagonal fit chases a pattern the sources do not satisfy,");
    println!(" so its rotation drifts away from the planted one)");
    Ok(())
}
