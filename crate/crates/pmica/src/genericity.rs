//! Identifiability certificates for tensors in the diagonal and PMI patterns.
//!
//! A tensor in one of these patterns has a unique orthogonal eigenbasis
//! exactly when certain polynomials in its entries do not vanish. The
//! conditions reduce to pairs of coordinates: every pair `(i, j)` determines
//! a binary slice `t_0, .., t_d` with `t_k` the entry carrying `k` copies of
//! `j` and `d-k` copies of `i`. Conditions are evaluated on slices normalized
//! by their largest absolute entry, since exact polynomial (non)vanishing is
//! meaningless for floats without a scale.
//!
//! For the PMI pattern the defining polynomials are only known in closed
//! form up to order 6; higher orders are rejected. The diagonal pattern is
//! resolved for every order: distinct diagonal entries (even order) or at
//! most one zero diagonal entry (odd order).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subspace::ZeroPattern;
use crate::symtensor::SymTensor;

/// Default tolerance for genericity conditions on scale-normalized slices.
pub const GENERICITY_TOL: f64 = 1e-8;

/// The violated condition of a failed certificate.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// 1-based coordinate pair whose condition fails.
    pub pair: (usize, usize),
    /// The vanishing polynomial or equality.
    pub condition: String,
    /// Scale-normalized value of the condition quantity.
    pub value: f64,
}

/// Certificate outcome. `margin` is the smallest absolute value among all
/// tested condition quantities (scale-normalized); `generic` holds exactly
/// when `margin` exceeds the tolerance. `witness` is present iff not generic.
#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub generic: bool,
    pub order: usize,
    pub witness: Option<Witness>,
    pub margin: f64,
}

/// Binary slice of a tensor for the pair `(i, j)` (0-based, `i != j`):
/// `t_k` is the entry whose multi-index has `d-k` copies of `i` and `k`
/// copies of `j`.
pub fn binary_slice(t: &SymTensor, i: usize, j: usize) -> Result<Vec<f64>> {
    let n = t.dim();
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!(
            "pair ({i}, {j}) out of range 0..{n}"
        )));
    }
    if i == j {
        return Err(Error::InvalidArgument(
            "binary_slice needs two distinct indices".into(),
        ));
    }
    let d = t.order();
    let mut out = Vec::with_capacity(d + 1);
    let mut idx = vec![i; d];
    out.push(t.entry(&idx));
    for k in 0..d {
        idx[k] = j;
        // the entry lookup sorts, so overwriting in place is fine
        out.push(t.entry(&idx));
    }
    Ok(out)
}

struct ConditionTracker {
    margin: f64,
    worst: Option<Witness>,
}

impl ConditionTracker {
    fn new() -> Self {
        ConditionTracker {
            margin: f64::INFINITY,
            worst: None,
        }
    }

    fn record(&mut self, pair: (usize, usize), condition: &str, value: f64) {
        if value.abs() < self.margin {
            self.margin = value.abs();
            self.worst = Some(Witness {
                pair: (pair.0 + 1, pair.1 + 1),
                condition: condition.to_string(),
                value,
            });
        }
    }

    fn finish(self, order: usize, tol: f64) -> GenericityReport {
        let generic = self.margin > tol;
        GenericityReport {
            generic,
            order,
            witness: if generic { None } else { self.worst },
            margin: self.margin,
        }
    }
}

fn normalized(slice: &[f64]) -> Vec<f64> {
    let scale = slice.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        slice.to_vec()
    } else {
        slice.iter().map(|v| v / scale).collect()
    }
}

/// Does a tensor in the PMI pattern have a unique orthogonal eigenbasis?
///
/// Conditions per pair, on the normalized slice:
/// - `d = 2, 4`: `t_0 != t_d` (diagonal entries distinct);
/// - `d = 3`: `(t_0, t_3) != (0, 0)` (at most one zero diagonal entry);
/// - `d = 5`: `t_0^2 - 2 t_0 t_2 - 8 t_2^2 - 8 t_3^2 - 2 t_3 t_5 + t_5^2 != 0`;
/// - `d = 6`: both `t_0 - 5 t_2 - 5 t_4 + t_6` and `t_0 + 5 t_2 - 5 t_4 - t_6`
///   nonzero.
///
/// Orders 7 and above are rejected: the defining polynomials are unresolved.
pub fn is_generic_pmi(t: &SymTensor, tol: f64) -> Result<GenericityReport> {
    let d = t.order();
    if d > 6 {
        return Err(Error::GenericityOrderUnsupported { order: d });
    }
    check_membership(t, &ZeroPattern::Pmi, tol)?;
    let n = t.dim();
    let mut tracker = ConditionTracker::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let slice = normalized(&binary_slice(t, i, j)?);
            match d {
                2 | 4 => tracker.record(
                    (i, j),
                    "diagonal entries coincide: t_0 - t_d = 0",
                    slice[0] - slice[d],
                ),
                3 => tracker.record(
                    (i, j),
                    "both diagonal entries vanish: max(|t_0|, |t_3|) = 0",
                    slice[0].abs().max(slice[3].abs()),
                ),
                5 => {
                    let q = slice[0] * slice[0] - 2.0 * slice[0] * slice[2]
                        - 8.0 * slice[2] * slice[2]
                        - 8.0 * slice[3] * slice[3]
                        - 2.0 * slice[3] * slice[5]
                        + slice[5] * slice[5];
                    tracker.record(
                        (i, j),
                        "t_0^2 - 2 t_0 t_2 - 8 t_2^2 - 8 t_3^2 - 2 t_3 t_5 + t_5^2 = 0",
                        q,
                    );
                }
                6 => {
                    tracker.record(
                        (i, j),
                        "t_0 - 5 t_2 - 5 t_4 + t_6 = 0",
                        slice[0] - 5.0 * slice[2] - 5.0 * slice[4] + slice[6],
                    );
                    tracker.record(
                        (i, j),
                        "t_0 + 5 t_2 - 5 t_4 - t_6 = 0",
                        slice[0] + 5.0 * slice[2] - 5.0 * slice[4] - slice[6],
                    );
                }
                _ => unreachable!("orders below 2 cannot be constructed"),
            }
        }
    }
    Ok(tracker.finish(d, tol))
}

/// Does a diagonal tensor have a unique orthogonal eigenbasis?
/// Even order: diagonal entries pairwise distinct. Odd order: at most one
/// zero diagonal entry. Supported for every constructible order (2..=9).
pub fn is_generic_diag(t: &SymTensor, tol: f64) -> Result<GenericityReport> {
    check_membership(t, &ZeroPattern::Diag, tol)?;
    let d = t.order();
    let diag = normalized(&t.diagonal_entries());
    let n = diag.len();
    let mut tracker = ConditionTracker::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if d.is_multiple_of(2) {
                tracker.record(
                    (i, j),
                    "diagonal entries coincide: lambda_i - lambda_j = 0",
                    diag[i] - diag[j],
                );
            } else {
                tracker.record(
                    (i, j),
                    "both diagonal entries vanish: max(|lambda_i|, |lambda_j|) = 0",
                    diag[i].abs().max(diag[j].abs()),
                );
            }
        }
    }
    Ok(tracker.finish(d, tol))
}

fn check_membership(t: &SymTensor, pattern: &ZeroPattern, tol: f64) -> Result<()> {
    if !pattern.contains(t, tol) {
        let norm = t.frobenius_norm();
        let residual = pattern.project_complement(t).frobenius_norm() / norm.max(f64::MIN_POSITIVE);
        return Err(Error::PatternPrecondition {
            pattern: pattern.name(),
            residual,
            tol,
        });
    }
    Ok(())
}
