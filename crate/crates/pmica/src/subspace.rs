//! Zero-pattern subspaces of symmetric tensors and projections onto them.
//!
//! Each pattern is a predicate on the multiplicity signature of a canonical
//! multi-index: the sorted multiset of occurrence counts of its distinct
//! values. A tensor lies in the subspace when every constrained entry is
//! zero. Because the patterns are axis-aligned in the Frobenius inner
//! product of the full array, orthogonal projection is entry masking.

use std::collections::BTreeSet;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::symtensor::{canonical_count, index_table, SymTensor, MAX_ORDER, MIN_ORDER};

/// Default relative tolerance for [`ZeroPattern::contains`].
pub const CONTAINS_TOL: f64 = 1e-10;

/// A linear subspace of `S^d(R^n)` defined by vanishing of canonical entries.
///
/// - `Diag`: entries with two or more distinct index values vanish
///   (cumulants of independent sources).
/// - `Pmi`: entries of shape `(i, j, .., j)` with `i != j` vanish
///   (pairwise mean independent sources).
/// - `Mi`: entries in which some index value occurs exactly once vanish
///   (mean independent sources).
/// - `Refl`: entries in which some value occurs an odd number of times
///   vanish (reflection-invariant tensors; the zero space for odd order).
/// - `KIndep(k)`: entries with between 2 and `k` distinct values vanish
///   (`k`-wise independent sources).
/// - `CustomSignatures`: explicit set of multiplicity signatures.
/// - `CustomIndices`: explicit set of canonical (sorted, 0-based) indices;
///   unlike the signature families this need not be permutation-invariant,
///   which is what the drop-one-constraint experiments require.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroPattern {
    Diag,
    Pmi,
    Mi,
    Refl,
    KIndep(usize),
    CustomSignatures(BTreeSet<Vec<usize>>),
    CustomIndices(BTreeSet<Vec<usize>>),
}

/// Sorted occurrence counts of the distinct values of a sorted multi-index.
pub fn signature(sorted_idx: &[u8]) -> Vec<usize> {
    let mut counts = Vec::new();
    let mut run = 0usize;
    for (k, &v) in sorted_idx.iter().enumerate() {
        if k == 0 || v == sorted_idx[k - 1] {
            run += 1;
        } else {
            counts.push(run);
            run = 1;
        }
    }
    counts.push(run);
    counts.sort_unstable();
    counts
}

impl ZeroPattern {
    /// Short name accepted by the CLI: `diag`, `pmi`, `mi`, `refl`,
    /// `kindep:<k>`, `custom:@file`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "diag" => Ok(ZeroPattern::Diag),
            "pmi" => Ok(ZeroPattern::Pmi),
            "mi" => Ok(ZeroPattern::Mi),
            "refl" => Ok(ZeroPattern::Refl),
            _ => {
                if let Some(k) = name.strip_prefix("kindep:") {
                    let k: usize = k.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad k in `{name}`"))
                    })?;
                    if k < 2 {
                        return Err(Error::InvalidArgument(
                            "kindep requires k >= 2".into(),
                        ));
                    }
                    Ok(ZeroPattern::KIndep(k))
                } else if let Some(path) = name.strip_prefix("custom:@") {
                    let file = std::fs::File::open(path)?;
                    Self::read_custom_indices(std::io::BufReader::new(file))
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown pattern `{name}`; expected diag|pmi|mi|refl|kindep:<k>|custom:@file"
                    )))
                }
            }
        }
    }

    /// Parse a custom pattern file: one canonical index per line, 1-based,
    /// whitespace-separated. `#` starts a comment.
    pub fn read_custom_indices<R: BufRead>(r: R) -> Result<Self> {
        let mut set = BTreeSet::new();
        for line in r.lines() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut idx = Vec::new();
            for field in line.split_whitespace() {
                let v: usize = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index `{field}`")))?;
                if v == 0 {
                    return Err(Error::Parse(
                        "custom pattern indices are 1-based".into(),
                    ));
                }
                idx.push(v - 1);
            }
            if idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Parse(format!(
                    "custom pattern index must be non-decreasing: `{line}`"
                )));
            }
            set.insert(idx);
        }
        Ok(ZeroPattern::CustomIndices(set))
    }

    pub fn name(&self) -> String {
        match self {
            ZeroPattern::Diag => "diag".into(),
            ZeroPattern::Pmi => "pmi".into(),
            ZeroPattern::Mi => "mi".into(),
            ZeroPattern::Refl => "refl".into(),
            ZeroPattern::KIndep(k) => format!("kindep:{k}"),
            ZeroPattern::CustomSignatures(_) => "custom-signatures".into(),
            ZeroPattern::CustomIndices(_) => "custom-indices".into(),
        }
    }

    /// Whether the canonical (sorted, 0-based) index is required to vanish.
    pub fn is_constrained(&self, sorted_idx: &[u8]) -> bool {
        match self {
            ZeroPattern::Diag => sorted_idx[0] != sorted_idx[sorted_idx.len() - 1],
            ZeroPattern::Pmi => {
                let sig = signature(sorted_idx);
                sig.len() == 2 && sig[0] == 1
            }
            ZeroPattern::Mi => signature(sorted_idx)[0] == 1,
            ZeroPattern::Refl => signature(sorted_idx).iter().any(|c| c % 2 == 1),
            ZeroPattern::KIndep(k) => {
                let distinct = signature(sorted_idx).len();
                (2..=*k).contains(&distinct)
            }
            ZeroPattern::CustomSignatures(set) => set.contains(&signature(sorted_idx)),
            ZeroPattern::CustomIndices(set) => {
                let as_usize: Vec<usize> = sorted_idx.iter().map(|&i| i as usize).collect();
                set.contains(&as_usize)
            }
        }
    }

    /// The canonical indices (0-based, sorted tuples) required to vanish for
    /// membership in the subspace, for shape `(n, d)`.
    pub fn constrained_indices(&self, n: usize, d: usize) -> Result<Vec<Vec<usize>>> {
        check_nd(n, d)?;
        let table = index_table(n, d);
        Ok(table
            .tuples
            .iter()
            .filter(|t| self.is_constrained(t))
            .map(|t| t.iter().map(|&i| i as usize).collect())
            .collect())
    }

    /// Dimension of the subspace in `S^d(R^n)`.
    pub fn subspace_dim(&self, n: usize, d: usize) -> Result<usize> {
        Ok(canonical_count(n, d) - self.constrained_indices(n, d)?.len())
    }

    /// Orthogonal projection onto the complement: keeps constrained entries,
    /// zeroes the rest.
    pub fn project_complement(&self, t: &SymTensor) -> SymTensor {
        let entries: Vec<f64> = t
            .iter_canonical()
            .map(|(tuple, _, v)| if self.is_constrained(tuple) { v } else { 0.0 })
            .collect();
        SymTensor::from_canonical(t.order(), t.dim(), entries).expect("same shape")
    }

    /// Orthogonal projection onto the subspace: `T - project_complement(T)`.
    pub fn project(&self, t: &SymTensor) -> SymTensor {
        let entries: Vec<f64> = t
            .iter_canonical()
            .map(|(tuple, _, v)| if self.is_constrained(tuple) { 0.0 } else { v })
            .collect();
        SymTensor::from_canonical(t.order(), t.dim(), entries).expect("same shape")
    }

    /// Squared Frobenius norm of the complement projection, without
    /// materializing the projected tensor.
    pub(crate) fn residual_norm_sq(&self, t: &SymTensor) -> f64 {
        t.iter_canonical()
            .filter(|(tuple, _, _)| self.is_constrained(tuple))
            .map(|(_, m, v)| m * v * v)
            .sum()
    }

    /// Membership test with the relative criterion
    /// `||proj_complement(T)||_F <= tol * ||T||_F`.
    pub fn contains(&self, t: &SymTensor, tol: f64) -> bool {
        let norm = t.frobenius_norm();
        self.residual_norm_sq(t).sqrt() <= tol * norm
    }

    /// Whether the subspace sits between the diagonal and PMI patterns for
    /// shape `(n, d)`: every PMI constraint is imposed and no diagonal entry
    /// is constrained. Identifiability theory covers exactly these patterns;
    /// fitting does not require it.
    pub fn is_sandwiched(&self, n: usize, d: usize) -> Result<bool> {
        check_nd(n, d)?;
        let table = index_table(n, d);
        Ok(table.tuples.iter().all(|t| {
            let here = self.is_constrained(t);
            let pmi = ZeroPattern::Pmi.is_constrained(t);
            let diag = ZeroPattern::Diag.is_constrained(t);
            (!pmi || here) && (!here || diag)
        }))
    }
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ShapeMismatch("dimension must be >= 1".into()));
    }
    if !(MIN_ORDER..=MAX_ORDER).contains(&d) {
        return Err(Error::UnsupportedOrder {
            order: d,
            min: MIN_ORDER,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symtensor::canonical_count;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut impl Rng, d: usize, n: usize) -> SymTensor {
        let count = canonical_count(n, d);
        let entries: Vec<f64> = (0..count).map(|_| rng.random_range(-1.0..1.0)).collect();
        SymTensor::from_canonical(d, n, entries).unwrap()
    }

    #[test]
    fn pmi_constrained_n2_d3() {
        let got = ZeroPattern::Pmi.constrained_indices(2, 3).unwrap();
        assert_eq!(got, vec![vec![0, 0, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn diag_constrained_n2_d2() {
        let got = ZeroPattern::Diag.constrained_indices(2, 2).unwrap();
        assert_eq!(got, vec![vec![0, 1]]);
    }

    #[test]
    fn pmi_constrained_count_n3_d4() {
        let got = ZeroPattern::Pmi.constrained_indices(3, 4).unwrap();
        // 2 * binomial(3, 2) ordered (i, jjj) patterns
        assert_eq!(got.len(), 6);
        for idx in &got {
            let sig = signature(&idx.iter().map(|&i| i as u8).collect::<Vec<_>>());
            assert_eq!(sig, vec![1, 3]);
        }
    }

    #[test]
    fn pmi_and_diag_agree_for_order_two() {
        for n in 1..=5 {
            assert_eq!(
                ZeroPattern::Pmi.constrained_indices(n, 2).unwrap(),
                ZeroPattern::Diag.constrained_indices(n, 2).unwrap()
            );
        }
    }

    #[test]
    fn subspace_dims_match_closed_forms() {
        // dim V_pmi = binomial(n+d-1, d) - 2 binomial(n, 2) for d >= 3
        for n in 2..=5 {
            for d in 3..=6 {
                let dim = ZeroPattern::Pmi.subspace_dim(n, d).unwrap();
                let expect = canonical_count(n, d) - 2 * n * (n - 1) / 2;
                assert_eq!(dim, expect, "pmi n={n} d={d}");
            }
        }
        assert_eq!(ZeroPattern::Pmi.subspace_dim(3, 4).unwrap(), 9);
        // dim V_diag = n for all d
        for d in 2..=9 {
            assert_eq!(ZeroPattern::Diag.subspace_dim(4, d).unwrap(), 4, "d={d}");
        }
        // codim V_{k-indep} = sum_{j=2}^k binomial(d-1, j-1) binomial(n, j)
        for n in 2..=5 {
            for d in 2..=6 {
                for k in 2..=4 {
                    let codim =
                        canonical_count(n, d) - ZeroPattern::KIndep(k).subspace_dim(n, d).unwrap();
                    let expect: usize = (2..=k)
                        .map(|j| {
                            crate::symtensor::binomial(d - 1, j - 1)
                                * crate::symtensor::binomial(n, j)
                        })
                        .sum();
                    assert_eq!(codim, expect, "kindep n={n} d={d} k={k}");
                }
            }
        }
        assert_eq!(ZeroPattern::KIndep(2).subspace_dim(3, 3).unwrap(), 4);
        // dim V_refl: 0 for odd d, binomial(n+k-1, k) for d = 2k
        for n in 2..=4 {
            for d in 2..=9 {
                let dim = ZeroPattern::Refl.subspace_dim(n, d).unwrap();
                let expect = if d % 2 == 1 {
                    0
                } else {
                    canonical_count(n, d / 2)
                };
                assert_eq!(dim, expect, "refl n={n} d={d}");
            }
        }
    }

    #[test]
    fn nesting_of_constraint_sets() {
        // constrained(PMI) <= constrained(MI) <= constrained(Diag) for d >= 3
        for n in 2..=4 {
            for d in 3..=6 {
                let pmi: BTreeSet<_> = ZeroPattern::Pmi
                    .constrained_indices(n, d)
                    .unwrap()
                    .into_iter()
                    .collect();
                let mi: BTreeSet<_> = ZeroPattern::Mi
                    .constrained_indices(n, d)
                    .unwrap()
                    .into_iter()
                    .collect();
                let diag: BTreeSet<_> = ZeroPattern::Diag
                    .constrained_indices(n, d)
                    .unwrap()
                    .into_iter()
                    .collect();
                assert!(pmi.is_subset(&mi), "n={n} d={d}");
                assert!(mi.is_subset(&diag), "n={n} d={d}");
                let refl: BTreeSet<_> = ZeroPattern::Refl
                    .constrained_indices(n, d)
                    .unwrap()
                    .into_iter()
                    .collect();
                assert!(pmi.is_subset(&refl), "refl contains pmi constraints n={n} d={d}");
            }
        }
    }

    #[test]
    fn member_projects_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_tensor(&mut rng, 4, 3);
        let member = ZeroPattern::Pmi.project(&t);
        assert!(ZeroPattern::Pmi.contains(&member, CONTAINS_TOL));
        let res = ZeroPattern::Pmi.project_complement(&member);
        assert_eq!(res.frobenius_norm(), 0.0);
    }

    #[test]
    fn fully_constrained_tensor_is_its_own_complement() {
        // symmetrized e1 (x) e2 (x) e2 is pure PMI pattern
        let mut t = SymTensor::zeros(3, 2).unwrap();
        t.set_entry(&[0, 1, 1], 1.0);
        let res = ZeroPattern::Pmi.project_complement(&t);
        assert_eq!(res, t);
    }

    #[test]
    fn diagonal_preserved_by_diag_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = random_tensor(&mut rng, 4, 3);
        let p = ZeroPattern::Diag.project(&t);
        assert_eq!(p.diagonal_entries(), t.diagonal_entries());
    }

    #[test]
    fn custom_indices_pattern() {
        let input = "1 2 2 2\n# comment\n1 1 1 2\n";
        let pat = ZeroPattern::read_custom_indices(std::io::Cursor::new(input)).unwrap();
        assert!(pat.is_constrained(&[0, 1, 1, 1]));
        assert!(pat.is_constrained(&[0, 0, 0, 1]));
        assert!(!pat.is_constrained(&[0, 0, 1, 1]));
        // dropping one ordered PMI constraint enlarges the space by one
        let full = ZeroPattern::Pmi.subspace_dim(2, 4).unwrap();
        let dropped: BTreeSet<Vec<usize>> = [vec![0, 1, 1, 1]].into_iter().collect();
        let pat = ZeroPattern::CustomIndices(dropped);
        assert_eq!(pat.subspace_dim(2, 4).unwrap(), full + 1);
    }

    #[test]
    fn sandwich_validation() {
        for n in 2..=3 {
            for d in 3..=5 {
                assert!(ZeroPattern::Diag.is_sandwiched(n, d).unwrap());
                assert!(ZeroPattern::Pmi.is_sandwiched(n, d).unwrap());
                assert!(ZeroPattern::Mi.is_sandwiched(n, d).unwrap());
                assert!(ZeroPattern::KIndep(2).is_sandwiched(n, d).unwrap());
            }
        }
        assert!(ZeroPattern::Refl.is_sandwiched(2, 4).unwrap());
        // dropping a PMI constraint leaves the sandwich
        let dropped: BTreeSet<Vec<usize>> = ZeroPattern::Pmi
            .constrained_indices(2, 4)
            .unwrap()
            .into_iter()
            .skip(1)
            .collect();
        assert!(!ZeroPattern::CustomIndices(dropped).is_sandwiched(2, 4).unwrap());
        // constraining a diagonal entry also leaves it
        let too_big: BTreeSet<Vec<usize>> = ZeroPattern::Pmi
            .constrained_indices(2, 4)
            .unwrap()
            .into_iter()
            .chain([vec![0, 0, 0, 0]])
            .collect();
        assert!(!ZeroPattern::CustomIndices(too_big).is_sandwiched(2, 4).unwrap());
    }

    #[test]
    fn parse_names() {
        assert_eq!(ZeroPattern::parse("diag").unwrap(), ZeroPattern::Diag);
        assert_eq!(ZeroPattern::parse("pmi").unwrap(), ZeroPattern::Pmi);
        assert_eq!(ZeroPattern::parse("kindep:3").unwrap(), ZeroPattern::KIndep(3));
        assert!(ZeroPattern::parse("kindep:1").is_err());
        assert!(ZeroPattern::parse("nope").is_err());
    }

    proptest! {
        #[test]
        fn dim_plus_constrained_is_total(n in 1usize..5, d in 2usize..7) {
            for pattern in [
                ZeroPattern::Diag,
                ZeroPattern::Pmi,
                ZeroPattern::Mi,
                ZeroPattern::Refl,
                ZeroPattern::KIndep(2),
                ZeroPattern::KIndep(3),
            ] {
                let dim = pattern.subspace_dim(n, d).unwrap();
                let constrained = pattern.constrained_indices(n, d).unwrap().len();
                prop_assert_eq!(dim + constrained, canonical_count(n, d));
            }
        }

        #[test]
        fn projectors_are_orthogonal_and_idempotent(seed in 0u64..500, d in 2usize..6, n in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&mut rng, d, n);
            for pattern in [ZeroPattern::Diag, ZeroPattern::Pmi, ZeroPattern::Mi, ZeroPattern::Refl] {
                let inside = pattern.project(&t);
                let outside = pattern.project_complement(&t);
                prop_assert!(inside.frobenius_inner(&outside).unwrap().abs() < 1e-12);
                let twice = pattern.project_complement(&outside);
                prop_assert!(twice.sub(&outside).unwrap().frobenius_norm() < 1e-12);
                let sum = inside.add(&outside).unwrap();
                prop_assert!(sum.sub(&t).unwrap().frobenius_norm() < 1e-12);
            }
        }
    }
}
