//! Fit diagnostics: normalized distances to zero-pattern subspaces, the
//! gap/off-diagonal landscape indicators, and recovery error modulo the
//! signed-permutation ambiguity.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::OrthoMatrix;
use crate::subspace::ZeroPattern;
use crate::symtensor::SymTensor;

/// Summary metrics for a fitted rotation against an order-4 cumulant.
/// `distance_to_pmi <= distance_to_independent` always, since the diagonal
/// pattern constrains a superset of the PMI entries.
#[derive(Clone, Debug, Serialize)]
pub struct Scorecard {
    pub distance_to_independent: f64,
    pub distance_to_pmi: f64,
    pub gap4_min: f64,
    pub offdiag_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sp_error: Option<f64>,
}

/// `|| proj_{V-complement}(Q' . K) ||_F / ||K||_F`, in `[0, 1]`.
pub fn distance_to_subspace(q: &OrthoMatrix, k: &SymTensor, v: &ZeroPattern) -> Result<f64> {
    let norm = k.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "distance_to_subspace is undefined for the zero tensor".into(),
        ));
    }
    let rotated = q.act_transpose(k)?;
    Ok(v.residual_norm_sq(&rotated).sqrt() / norm)
}

/// For an order-4 tensor: the minimum pairwise gap of diagonal entries and
/// the Frobenius norm of the off-diagonal (diagonal-complement) part.
pub fn gap_and_offdiag(k: &SymTensor) -> Result<(f64, f64)> {
    if k.order() != 4 {
        return Err(Error::ShapeMismatch(format!(
            "gap_and_offdiag expects order 4, got {}",
            k.order()
        )));
    }
    let diag = k.diagonal_entries();
    let mut gap = f64::INFINITY;
    for i in 0..diag.len() {
        for j in (i + 1)..diag.len() {
            gap = gap.min((diag[i] - diag[j]).abs());
        }
    }
    if diag.len() < 2 {
        gap = 0.0;
    }
    let offdiag = ZeroPattern::Diag.residual_norm_sq(k).sqrt();
    Ok((gap, offdiag))
}

/// A signed permutation: column `j` of the matrix carries `signs[j]` in row
/// `perm[j]`.
#[derive(Clone, Debug, Serialize)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<f64>,
}

impl SignedPermutation {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.perm.len();
        let mut m = DMatrix::zeros(n, n);
        for (col, (&row, &sign)) in self.perm.iter().zip(self.signs.iter()).enumerate() {
            m[(row, col)] = sign;
        }
        m
    }
}

/// `min over signed permutations R of ||Q_hat - Q_true R||_F`, with the
/// minimizing `R`. The permutation maximizes `sum |M_{i sigma(i)}|` on
/// `M = Q_true' Q_hat` (solved as a linear assignment); signs follow the
/// matched entries, with `+1` on exact zeros.
pub fn sp_matched_error(
    q_hat: &OrthoMatrix,
    q_true: &OrthoMatrix,
) -> Result<(f64, SignedPermutation)> {
    let n = q_hat.dim();
    if q_true.dim() != n {
        return Err(Error::ShapeMismatch(format!(
            "rotations have dimensions {} and {}",
            n,
            q_true.dim()
        )));
    }
    let m = q_true.matrix().transpose() * q_hat.matrix();
    // minimize -|M| over assignments
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| -m[(i, j)].abs()).collect())
        .collect();
    let row_of_col = assignment(&cost);
    let mut perm = vec![0usize; n];
    let mut signs = vec![1.0; n];
    for (col, &row) in row_of_col.iter().enumerate() {
        perm[col] = row;
        signs[col] = if m[(row, col)] < 0.0 { -1.0 } else { 1.0 };
    }
    let sp = SignedPermutation { perm, signs };
    let diff = q_hat.matrix() - q_true.matrix() * sp.to_matrix();
    Ok((diff.norm(), sp))
}

/// Exact O(n^3) shortest-augmenting-path assignment on a square cost matrix;
/// returns for each column the assigned row.
fn assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1]; // p[j]: row matched to column j (1-based, 0 = none)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| p[j] - 1).collect()
}

/// Assemble the standard scorecard for a fitted rotation.
pub fn scorecard(
    q: &OrthoMatrix,
    k: &SymTensor,
    q_true: Option<&OrthoMatrix>,
) -> Result<Scorecard> {
    let distance_to_independent = distance_to_subspace(q, k, &ZeroPattern::Diag)?;
    let distance_to_pmi = distance_to_subspace(q, k, &ZeroPattern::Pmi)?;
    let rotated = q.act_transpose(k)?;
    let (gap4_min, offdiag_norm) = if k.order() == 4 {
        gap_and_offdiag(&rotated)?
    } else {
        (0.0, ZeroPattern::Diag.residual_norm_sq(&rotated).sqrt())
    };
    let sp_error = match q_true {
        Some(qt) => Some(sp_matched_error(q, qt)?.0),
        None => None,
    };
    Ok(Scorecard {
        distance_to_independent,
        distance_to_pmi,
        gap4_min,
        offdiag_norm,
        sp_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::random_orthogonal;
    use crate::symtensor::canonical_count;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut impl Rng, d: usize, n: usize) -> SymTensor {
        let count = canonical_count(n, d);
        let entries: Vec<f64> = (0..count).map(|_| rng.random_range(-1.0..1.0)).collect();
        SymTensor::from_canonical(d, n, entries).unwrap()
    }

    fn brute_force_sp_error(q_hat: &OrthoMatrix, q_true: &OrthoMatrix) -> f64 {
        let n = q_hat.dim();
        let mut perms = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        permute(&mut idx, 0, &mut perms);
        let mut best = f64::INFINITY;
        for perm in &perms {
            for mask in 0..(1usize << n) {
                let mut r = DMatrix::zeros(n, n);
                for (col, &row) in perm.iter().enumerate() {
                    r[(row, col)] = if mask >> col & 1 == 1 { -1.0 } else { 1.0 };
                }
                let err = (q_hat.matrix() - q_true.matrix() * r).norm();
                best = best.min(err);
            }
        }
        best
    }

    fn permute(idx: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == idx.len() {
            out.push(idx.clone());
            return;
        }
        for i in k..idx.len() {
            idx.swap(k, i);
            permute(idx, k + 1, out);
            idx.swap(k, i);
        }
    }

    #[test]
    fn distance_zero_on_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = ZeroPattern::Pmi.project(&random_tensor(&mut rng, 4, 3));
        let q = OrthoMatrix::identity(3);
        assert_eq!(distance_to_subspace(&q, &t, &ZeroPattern::Pmi).unwrap(), 0.0);
        // containment: a diagonal member is also a PMI member
        let d = ZeroPattern::Diag.project(&t);
        assert_eq!(distance_to_subspace(&q, &d, &ZeroPattern::Pmi).unwrap(), 0.0);
        assert!(distance_to_subspace(&q, &SymTensor::zeros(4, 3).unwrap(), &ZeroPattern::Pmi).is_err());
    }

    #[test]
    fn distance_ordering_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let t = random_tensor(&mut rng, 4, 3);
            let q = random_orthogonal(3, &mut rng);
            let pmi = distance_to_subspace(&q, &t, &ZeroPattern::Pmi).unwrap();
            let ind = distance_to_subspace(&q, &t, &ZeroPattern::Diag).unwrap();
            assert!(pmi <= ind + 1e-15);
            assert!((0.0..=1.0 + 1e-12).contains(&pmi));
            assert!((0.0..=1.0 + 1e-12).contains(&ind));
        }
    }

    #[test]
    fn gap_and_offdiag_on_diagonal_tensor() {
        let mut t = SymTensor::zeros(4, 2).unwrap();
        t.set_entry(&[0, 0, 0, 0], 3.0);
        t.set_entry(&[1, 1, 1, 1], 1.0);
        let (gap, off) = gap_and_offdiag(&t).unwrap();
        assert_eq!((gap, off), (2.0, 0.0));
        t.set_entry(&[1, 1, 1, 1], 3.0);
        assert_eq!(gap_and_offdiag(&t).unwrap().0, 0.0);
        assert!(gap_and_offdiag(&SymTensor::zeros(3, 2).unwrap()).is_err());
    }

    #[test]
    fn sp_error_zero_on_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_orthogonal(3, &mut rng);
        let (err, _) = sp_matched_error(&q, &q).unwrap();
        assert!(err < 1e-12);
        // swap two columns and flip one sign
        let mut m = q.matrix().clone();
        m.swap_columns(0, 2);
        for row in 0..3 {
            m[(row, 1)] = -m[(row, 1)];
        }
        let modified = OrthoMatrix::new(m).unwrap();
        let (err, r) = sp_matched_error(&modified, &q).unwrap();
        assert!(err < 1e-12);
        // recovered signed permutation undoes the modification
        let back = q.matrix() * r.to_matrix();
        assert!((modified.matrix() - back).norm() < 1e-12);
    }

    #[test]
    fn sp_error_matches_exhaustive_n2() {
        let q_hat = OrthoMatrix::rotation2(0.1);
        let q_true = OrthoMatrix::identity(2);
        let (err, _) = sp_matched_error(&q_hat, &q_true).unwrap();
        let brute = brute_force_sp_error(&q_hat, &q_true);
        assert_relative_eq!(err, brute, epsilon = 1e-12);
    }

    #[test]
    fn sp_error_matches_exhaustive_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for case in 0..1000 {
            let n = 2 + case % 3;
            let a = random_orthogonal(n, &mut rng);
            let b = random_orthogonal(n, &mut rng);
            let (err, _) = sp_matched_error(&a, &b).unwrap();
            let brute = brute_force_sp_error(&a, &b);
            assert!(
                (err - brute).abs() < 1e-10,
                "n={n} case={case}: {err} vs {brute}"
            );
        }
    }

    #[test]
    fn sp_error_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_orthogonal(3, &mut rng);
            let b = random_orthogonal(3, &mut rng);
            let (ab, _) = sp_matched_error(&a, &b).unwrap();
            let (ba, _) = sp_matched_error(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
        }
    }

    #[test]
    fn scorecard_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = random_tensor(&mut rng, 4, 2);
        let q = random_orthogonal(2, &mut rng);
        let card = scorecard(&q, &t, Some(&q)).unwrap();
        assert!(card.distance_to_pmi <= card.distance_to_independent);
        assert_eq!(card.sp_error, Some(0.0).map(|_| card.sp_error.unwrap()));
        assert!(card.sp_error.unwrap() < 1e-12);
    }
}
