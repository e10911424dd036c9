//! Blind source separation under pairwise mean independence (PMI).
//!
//! Classical ICA assumes fully independent sources, which makes higher-order
//! cumulant tensors diagonal after unmixing. Requiring only pairwise mean
//! independence, `E(s_i | s_j) = E(s_i)` for `i != j`, relaxes that to a
//! larger zero pattern: every cumulant entry with index `(i, j, .., j)` and
//! `i != j` vanishes. This crate estimates cumulant tensors from data,
//! fits an orthogonal unmixing matrix by minimizing the distance of the
//! rotated tensor to such a zero-pattern subspace (Riemannian gradient
//! descent on `O(n)`), certifies when the fitted basis is unique, and ships
//! deterministic samplers plus an experiment harness for synthetic studies.
//!
//! Modules:
//! - [`symtensor`]: canonical symmetric tensor storage and the orthogonal action;
//! - [`subspace`]: zero-pattern subspaces (diagonal, PMI, mean-independent, ...);
//! - [`cumulants`]: whitening, PCA, sample moment and cumulant tensors;
//! - [`genericity`]: identifiability certificates for tensors in the patterns;
//! - [`optim`]: the multistart Riemannian minimum-distance fitter;
//! - [`samplers`]: seeded source distributions and mixing;
//! - [`metrics`]: fit diagnostics and signed-permutation-matched errors;
//! - [`harness`]: scripted synthetic experiments emitting CSV tables;
//! - [`cli`]: the `pmica` command-line entry point.

pub mod cli;
pub mod cumulants;
pub mod error;
pub mod genericity;
pub mod harness;
pub mod manifest;
pub mod metrics;
pub mod optim;
pub mod samplers;
pub mod subspace;
pub mod symtensor;

pub use error::{Error, Result};
pub use symtensor::SymTensor;
pub use subspace::ZeroPattern;
pub use cumulants::{cumulant_tensor, moment_tensor, pca_reduce, whiten, DataMatrix, WhiteningResult};
pub use genericity::{is_generic_diag, is_generic_pmi, GenericityReport};
pub use optim::{rgd_fit, FitConfig, FitResult, OrthoMatrix};
pub use samplers::{mix, SourceSampler, SourceSpec};
pub use metrics::{distance_to_subspace, gap_and_offdiag, sp_matched_error, Scorecard};
