//! Minimum-distance estimation over the orthogonal group.
//!
//! Given a symmetric tensor `T` (typically a sample cumulant of whitened
//! data) and a zero pattern `V`, the fitter minimizes
//! `F(Q) = || proj_{V-complement}(Q' . T) ||_F^2` over `Q in O(n)` by
//! multistart Riemannian gradient descent with Armijo backtracking. The
//! Euclidean gradient of the extended objective is
//! `2 d * Q * M` where `M_{ab} = sum_beta U_{a,beta} G_{b,beta}`,
//! `U = Q' . T`, `G = proj_{V-complement}(U)` and `beta` ranges over
//! `(d-1)`-tuples; its projection onto the tangent space `Q skew(Q' grad)`
//! drives the descent, and iterates return to the manifold through the
//! orthogonal-factor retraction with a positive-diagonal sign convention.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspace::ZeroPattern;
use crate::symtensor::{index_table, ortho_deviation, SymTensor, MAX_ORDER};

/// Construction re-orthonormalizes inputs whose deviation exceeds this.
const REORTH_TOL: f64 = 1e-12;
/// Inputs with `||Q'Q - I||_F` above this are rejected outright.
const ACCEPT_TOL: f64 = 1e-6;

/// An element of `O(n)`: validated on construction, deviation kept below 1e-8.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMatrix {
    m: DMatrix<f64>,
}

impl OrthoMatrix {
    /// Accepts matrices with `||Q'Q - I||_F <= 1e-6`, re-orthonormalizing
    /// (sign-fixed orthogonal factor) when the deviation is above 1e-12.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "orthogonal matrix must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = ortho_deviation(&m);
        if dev.is_nan() || dev > ACCEPT_TOL {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        let m = if dev > REORTH_TOL { qf_positive(&m) } else { m };
        Ok(OrthoMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        OrthoMatrix {
            m: DMatrix::identity(n, n),
        }
    }

    /// Planar rotation by `theta` in `O(2)`.
    pub fn rotation2(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        OrthoMatrix {
            m: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn transposed(&self) -> OrthoMatrix {
        OrthoMatrix {
            m: self.m.transpose(),
        }
    }

    /// Group action on a tensor, `Q . T`.
    pub fn act(&self, t: &SymTensor) -> Result<SymTensor> {
        SymTensor::multilinear_action(&self.m, t)
    }

    /// Inverse action, `Q' . T`.
    pub fn act_transpose(&self, t: &SymTensor) -> Result<SymTensor> {
        SymTensor::multilinear_action(&self.m.transpose(), t)
    }
}

/// Orthogonal factor of a square matrix with the sign convention that the
/// triangular factor has non-negative diagonal. Unique for invertible input,
/// and the identity on matrices that are already orthogonal with positive
/// triangular factor.
pub(crate) fn qf_positive(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            for row in 0..n {
                q[(row, i)] = -q[(row, i)];
            }
        }
    }
    q
}

/// Haar-distributed orthogonal matrix: sign-fixed orthogonal factor of a
/// standard Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> OrthoMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    OrthoMatrix { m: qf_positive(&g) }
}

/// Hyperparameters of the multistart fitter. The problem data (tensor,
/// pattern) are passed to [`rgd_fit`] directly.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_iters: usize,
    /// Gradient-norm stopping threshold, relative to `||T||_F^2`.
    pub grad_tol: f64,
    pub step_init: f64,
    pub backtrack_ratio: f64,
    pub armijo_c: f64,
    /// Number of Haar-random starts; the identity is always added as run 0.
    pub n_inits: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iters: 2000,
            grad_tol: 1e-9,
            step_init: 1.0,
            backtrack_ratio: 0.5,
            armijo_c: 1e-4,
            n_inits: 10,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.grad_tol > 0.0
            && self.step_init > 0.0
            && self.backtrack_ratio > 0.0
            && self.backtrack_ratio < 1.0
            && self.armijo_c > 0.0
            && self.armijo_c < 1.0
            && self.n_inits >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "fit config: all parameters positive, ratios in (0,1), n_inits >= 1".into(),
            ))
        }
    }
}

/// Outcome of one initialization.
#[derive(Clone, Debug, Serialize)]
pub struct InitRecord {
    /// 0 is the identity start; `k >= 1` is the Haar draw from stream `k`.
    pub init_index: usize,
    pub final_value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Best rotation over all starts plus per-start diagnostics.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub best_q: OrthoMatrix,
    pub best_value: f64,
    pub best_init: usize,
    pub per_init: Vec<InitRecord>,
    /// Objective values of the best run, one per accepted step.
    pub objective_trace: Vec<f64>,
}

/// `F(Q) = || proj_{V-complement}(Q' . T) ||_F^2` with the
/// multiplicity-weighted (full-array) Frobenius norm. For the PMI pattern
/// this is the sum of squared rotated entries `[Q'.T]_{ijj..j}` over ordered
/// pairs `i != j`, with each canonical entry counted `d` times.
pub fn objective(q: &OrthoMatrix, t: &SymTensor, v: &ZeroPattern) -> Result<f64> {
    if q.dim() != t.dim() {
        return Err(Error::ShapeMismatch(format!(
            "rotation is {}x{}, tensor dimension {}",
            q.dim(),
            q.dim(),
            t.dim()
        )));
    }
    let rotated = q.act_transpose(t)?;
    Ok(v.residual_norm_sq(&rotated))
}

/// Gradient of the objective extended to all of `R^{n x n}` (no tangent
/// projection). Validated against central finite differences in tests.
pub fn euclidean_gradient(
    q: &OrthoMatrix,
    t: &SymTensor,
    v: &ZeroPattern,
) -> Result<DMatrix<f64>> {
    euclidean_gradient_any(q.matrix(), t, v)
}

pub(crate) fn euclidean_gradient_any(
    q: &DMatrix<f64>,
    t: &SymTensor,
    v: &ZeroPattern,
) -> Result<DMatrix<f64>> {
    let n = t.dim();
    let d = t.order();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "rotation is {}x{}, tensor dimension {n}",
            q.nrows(),
            q.ncols()
        )));
    }
    let u = SymTensor::multilinear_action(&q.transpose(), t)?;
    let sub = index_table(n, d - 1);
    let full = u.table();
    let entries = u.canonical_entries();
    let mut m = DMatrix::zeros(n, n);
    let mut vals = vec![0.0; n];
    let mut constrained = vec![false; n];
    let mut buf = [0u8; MAX_ORDER];
    for (beta, &mult) in sub.tuples.iter().zip(sub.mult.iter()) {
        for a in 0..n {
            buf[..d - 1].copy_from_slice(beta);
            buf[d - 1] = a as u8;
            let ext = &mut buf[..d];
            ext.sort_unstable();
            vals[a] = entries[full.rank(ext)];
            constrained[a] = v.is_constrained(ext);
        }
        for b in 0..n {
            if !constrained[b] {
                continue;
            }
            let gb = mult * vals[b];
            for a in 0..n {
                m[(a, b)] += vals[a] * gb;
            }
        }
    }
    Ok(q * m * (2.0 * d as f64))
}

/// A tangent direction at `Q` together with its retraction.
pub struct TangentStep {
    base: OrthoMatrix,
    tangent: DMatrix<f64>,
}

impl TangentStep {
    /// Projection of the Euclidean gradient onto the tangent space at `Q`.
    pub fn tangent(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    pub fn tangent_norm(&self) -> f64 {
        self.tangent.norm()
    }

    /// Move `s` along the negative tangent and retract: the sign-fixed
    /// orthogonal factor of `Q - s * tangent`. Exactly `Q` at `s = 0`.
    pub fn retract(&self, s: f64) -> OrthoMatrix {
        if s == 0.0 {
            return self.base.clone();
        }
        let moved = &self.base.m - &self.tangent * s;
        OrthoMatrix {
            m: qf_positive(&moved),
        }
    }
}

/// Tangent-space projection `Q skew(Q' grad)` with `skew(A) = (A - A')/2`.
pub fn riemannian_step(q: &OrthoMatrix, eucl_grad: &DMatrix<f64>) -> TangentStep {
    let qtg = q.m.transpose() * eucl_grad;
    let skew = (&qtg - qtg.transpose()) * 0.5;
    TangentStep {
        tangent: &q.m * skew,
        base: q.clone(),
    }
}

struct RunOutcome {
    record: InitRecord,
    q: OrthoMatrix,
    trace: Vec<f64>,
}

fn run_descent(
    start: OrthoMatrix,
    t: &SymTensor,
    v: &ZeroPattern,
    cfg: &FitConfig,
    grad_threshold: f64,
    init_index: usize,
) -> Result<RunOutcome> {
    let mut q = start;
    let mut value = objective(&q, t, v)?;
    let mut trace = vec![value];
    let mut iterations = 0;
    for iter in 0..cfg.max_iters {
        let egrad = euclidean_gradient(&q, t, v)?;
        let step = riemannian_step(&q, &egrad);
        let gnorm = step.tangent_norm();
        if gnorm <= grad_threshold {
            break;
        }
        let mut s = cfg.step_init;
        let mut accepted = false;
        while s > cfg.step_init * 1e-20 {
            let candidate = step.retract(s);
            let cand_value = objective(&candidate, t, v)?;
            if cand_value <= value - cfg.armijo_c * s * gnorm * gnorm {
                q = candidate;
                value = cand_value;
                accepted = true;
                break;
            }
            s *= cfg.backtrack_ratio;
        }
        if !accepted {
            // no Armijo step exists at machine precision; treat as converged
            break;
        }
        iterations = iter + 1;
        trace.push(value);
    }
    let egrad = euclidean_gradient(&q, t, v)?;
    let grad_norm = riemannian_step(&q, &egrad).tangent_norm();
    Ok(RunOutcome {
        record: InitRecord {
            init_index,
            final_value: value,
            iterations,
            grad_norm,
        },
        q,
        trace,
    })
}

/// Multistart Riemannian gradient descent. Runs the identity start plus
/// `cfg.n_inits` Haar-random starts (stream `k` of `cfg.seed` for start `k`),
/// each with Armijo backtracking, and returns the best final value, ties
/// broken by lowest start index. Deterministic given the seed, for any
/// thread count.
pub fn rgd_fit(t: &SymTensor, v: &ZeroPattern, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if t.order() < 3 {
        return Err(Error::InvalidArgument(
            "rgd_fit requires tensor order >= 3".into(),
        ));
    }
    let n = t.dim();
    let grad_threshold = cfg.grad_tol * t.frobenius_norm().powi(2);
    let outcomes: Result<Vec<RunOutcome>> = (0..=cfg.n_inits)
        .into_par_iter()
        .map(|idx| {
            let start = if idx == 0 {
                OrthoMatrix::identity(n)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(idx as u64);
                random_orthogonal(n, &mut rng)
            };
            run_descent(start, t, v, cfg, grad_threshold, idx)
        })
        .collect();
    let mut outcomes = outcomes?;
    let best_init = outcomes
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.record
                .final_value
                .partial_cmp(&b.record.final_value)
                .unwrap()
                .then(a.record.init_index.cmp(&b.record.init_index))
        })
        .map(|(pos, _)| pos)
        .expect("at least one run");
    let best = outcomes.swap_remove(best_init);
    let mut per_init: Vec<InitRecord> = outcomes.into_iter().map(|o| o.record).collect();
    per_init.push(best.record.clone());
    per_init.sort_by_key(|r| r.init_index);
    Ok(FitResult {
        best_q: best.q,
        best_value: best.record.final_value,
        best_init: best.record.init_index,
        per_init,
        objective_trace: best.trace,
    })
}
