//! The zero-pattern subspace families, their dimensions, and projections.
//!
//! ```text
//! cargo run --example zero_patterns
//! ```

use pmica::subspace::ZeroPattern;
use pmica::symtensor::{canonical_entry_count, SymTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> pmica::Result<()> {
    let (n, d) = (3usize, 4usize);
    println!("subspace dimensions in S^{d}(R^{n}), ambient {}:", canonical_entry_count(n, d));
    for pattern in [
        ZeroPattern::Diag,
        ZeroPattern::Pmi,
        ZeroPattern::Mi,
        ZeroPattern::Refl,
        ZeroPattern::KIndep(2),
    ] {
        println!(
            "  {:10} dim {:2}, {:2} constrained entries, sandwiched: {}",
            pattern.name(),
            pattern.subspace_dim(n, d)?,
            pattern.constrained_indices(n, d)?.len(),
            pattern.is_sandwiched(n, d)?,
        );
    }

    // The PMI pattern constrains exactly the (i, j, j, j) entries.
    println!("\nPMI-constrained canonical indices (1-based):");
    for idx in ZeroPattern::Pmi.constrained_indices(n, d)? {
        let shown: Vec<usize> = idx.iter().map(|&i| i + 1).collect();
        println!("  {shown:?}");
    }

    // Projection is entry masking: the two parts are orthogonal and sum back.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let entries: Vec<f64> = (0..canonical_entry_count(n, d))
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let t = SymTensor::from_canonical(d, n, entries)?;
    let inside = ZeroPattern::Pmi.project(&t);
    let outside = ZeroPattern::Pmi.project_complement(&t);
    println!(
        "\nrandom T: ||T||^2 = {:.4} = {:.4} + {:.4} (inside + outside), <in, out> = {:.1e}",
        t.frobenius_norm().powi(2),
        inside.frobenius_norm().powi(2),
        outside.frobenius_norm().powi(2),
        inside.frobenius_inner(&outside)?,
    );
    println!(
        "membership: T in V_pmi: {}, proj(T) in V_pmi: {}",
        ZeroPattern::Pmi.contains(&t, 1e-10),
        ZeroPattern::Pmi.contains(&inside, 1e-10),
    );
    Ok(())
}
