//! Data ingestion statistics: whitening, PCA reduction, sample moment
//! tensors, and plug-in sample cumulant tensors.
//!
//! Cumulants come from the moment-cumulant relation over the partition
//! lattice: `kappa_d = sum over partitions pi of {1..d} of
//! (-1)^(|pi|-1) (|pi|-1)! prod over blocks of the block moment`. Orders
//! up to 4 use verified closed forms; higher orders enumerate partitions
//! (at most `Bell(9) = 21147` of them). Moment accumulation is a single
//! streaming pass over samples keyed by canonical multi-index, parallelized
//! over fixed-size blocks with a fixed reduction order so that results do
//! not depend on the thread count.

use nalgebra::{DMatrix, DVector};
use once_cell::sync::Lazy;
use rayon::prelude::*;
use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::symtensor::{index_table, IndexTable, SymTensor, MAX_ORDER, MIN_ORDER};

/// Samples in rows: an `N x n` real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    n_samples: usize,
    n_features: usize,
    values: Vec<f64>,
}

/// Covariance rank-deficiency threshold: smallest eigenvalue below
/// `RANK_TOL * largest` makes whitening fail.
pub const RANK_TOL: f64 = 1e-12;

const BLOCK: usize = 1 << 14;

impl DataMatrix {
    pub fn new(n_samples: usize, n_features: usize, values: Vec<f64>) -> Result<Self> {
        if n_samples == 0 || n_features == 0 {
            return Err(Error::ShapeMismatch(
                "data matrix needs at least one sample and one feature".into(),
            ));
        }
        if values.len() != n_samples * n_features {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for {n_samples}x{n_features}, got {}",
                n_samples * n_features,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("data entries must be finite".into()));
        }
        Ok(DataMatrix {
            n_samples,
            n_features,
            values,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_samples = rows.len();
        let n_features = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        DataMatrix::new(n_samples, n_features, rows.into_iter().flatten().collect())
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.n_features..(r + 1) * self.n_features]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_features)
    }

    /// Per-feature sample mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.n_features];
        for row in self.rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= self.n_samples as f64;
        }
        mean
    }

    /// Sample covariance about the sample mean with `1/N` normalization,
    /// matching the plug-in moment estimators used throughout.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.n_features;
        let mean = self.mean();
        let mut cov = DMatrix::zeros(n, n);
        for row in self.rows() {
            for i in 0..n {
                let di = row[i] - mean[i];
                for j in i..n {
                    cov[(i, j)] += di * (row[j] - mean[j]);
                }
            }
        }
        let scale = 1.0 / self.n_samples as f64;
        for i in 0..n {
            for j in i..n {
                cov[(i, j)] *= scale;
                cov[(j, i)] = cov[(i, j)];
            }
        }
        cov
    }

    /// Read comma-separated samples, one row per line. With `has_header`
    /// the first row is skipped.
    pub fn read_csv(path: &Path, has_header: bool) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row: std::result::Result<Vec<f64>, _> =
                record.iter().map(|f| f.parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("bad number in CSV: {e}")))?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("CSV contains no data rows".into()));
        }
        DataMatrix::from_rows(rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().from_path(path)?;
        for row in self.rows() {
            writer.write_record(row.iter().map(|v| format!("{v}")))?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Output of [`whiten`]: centered, decorrelated samples plus the transforms
/// needed to map a fitted rotation back to the original coordinates.
#[derive(Clone, Debug)]
pub struct WhiteningResult {
    pub whitened: DataMatrix,
    pub mean: Vec<f64>,
    /// `W = U diag(lambda^-1/2) U'`, symmetric positive definite.
    pub transform: DMatrix<f64>,
    /// `Sigma^1/2 = U diag(lambda^1/2) U'`; a fitted rotation `Q` yields the
    /// mixing estimate `Sigma^1/2 Q`.
    pub covariance_sqrt: DMatrix<f64>,
}

/// Sorted symmetric eigendecomposition: eigenvalues descending, ties broken
/// by first occurrence.
fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Center the samples and decorrelate them with the symmetric inverse
/// square root of the sample covariance.
pub fn whiten(x: &DataMatrix) -> Result<WhiteningResult> {
    let n = x.n_features;
    let cov = x.covariance();
    let (values, vectors) = sorted_symmetric_eigen(&cov);
    let max_eig = values[0];
    let min_eig = values[n - 1];
    if !(min_eig > RANK_TOL * max_eig && min_eig > 0.0) {
        return Err(Error::RankDeficientCovariance { min_eig, max_eig });
    }
    let inv_sqrt = DVector::from_iterator(n, values.iter().map(|&l| 1.0 / l.sqrt()));
    let sqrt = DVector::from_iterator(n, values.iter().map(|&l| l.sqrt()));
    let transform = &vectors * DMatrix::from_diagonal(&inv_sqrt) * vectors.transpose();
    let covariance_sqrt = &vectors * DMatrix::from_diagonal(&sqrt) * vectors.transpose();
    let mean = x.mean();
    let mut out = vec![0.0; x.values.len()];
    for (r, row) in x.rows().enumerate() {
        let base = r * n;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += transform[(i, j)] * (row[j] - mean[j]);
            }
            out[base + i] = acc;
        }
    }
    Ok(WhiteningResult {
        whitened: DataMatrix::new(x.n_samples, n, out)?,
        mean,
        transform,
        covariance_sqrt,
    })
}

/// Project centered data onto the top-`k` covariance eigenvectors.
/// Returns the reduced data and the explained variance ratio.
pub fn pca_reduce(x: &DataMatrix, k: usize) -> Result<(DataMatrix, f64)> {
    let n = x.n_features;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "pca_reduce: k must be in 1..={n}, got {k}"
        )));
    }
    let cov = x.covariance();
    let (values, vectors) = sorted_symmetric_eigen(&cov);
    let total: f64 = values.iter().sum();
    let kept: f64 = values[..k].iter().sum();
    let ratio = if total > 0.0 { kept / total } else { 1.0 };
    let mean = x.mean();
    let mut out = vec![0.0; x.n_samples * k];
    for (r, row) in x.rows().enumerate() {
        let base = r * k;
        for (c, slot) in out[base..base + k].iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..n {
                acc += vectors[(j, c)] * (row[j] - mean[j]);
            }
            *slot = acc;
        }
    }
    Ok((DataMatrix::new(x.n_samples, k, out)?, ratio))
}

/// All sample moments of orders `1..=d`, keyed by canonical multi-index.
pub(crate) struct MomentSet {
    n: usize,
    d: usize,
    /// `per_order[r - 1]` holds order-`r` moments in canonical index order.
    per_order: Vec<Vec<f64>>,
    tables: Vec<std::sync::Arc<IndexTable>>,
}

impl MomentSet {
    /// Moment of a sorted multi-index of any order `1..=d`.
    pub fn moment(&self, sorted_idx: &[u8]) -> f64 {
        let r = sorted_idx.len();
        self.per_order[r - 1][self.tables[r - 1].rank(sorted_idx)]
    }
}

fn check_order(d: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&d) {
        return Err(Error::UnsupportedOrder {
            order: d,
            min: MIN_ORDER,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Accumulate all monomial moments up to order `d` in one pass.
///
/// Samples are processed in fixed-size blocks; block sums are reduced in
/// block order, so the result is identical for any thread count.
pub(crate) fn accumulate_moments(x: &DataMatrix, d: usize) -> Result<MomentSet> {
    check_order(d)?;
    let n = x.n_features;
    let order_sizes: Vec<usize> = (1..=d).map(|r| index_table(n, r).len()).collect();
    let block_sums: Vec<Vec<Vec<f64>>> = x
        .values
        .par_chunks(BLOCK * n)
        .map(|chunk| {
            let mut acc: Vec<Vec<f64>> = order_sizes.iter().map(|&s| vec![0.0; s]).collect();
            for row in chunk.chunks(n) {
                let mut counters = vec![0usize; d];
                accumulate_row(row, d, &mut acc, &mut counters);
            }
            acc
        })
        .collect();
    let mut totals: Vec<Vec<f64>> = order_sizes.iter().map(|&s| vec![0.0; s]).collect();
    for block in block_sums {
        for (tot, b) in totals.iter_mut().zip(block) {
            for (t, v) in tot.iter_mut().zip(b) {
                *t += v;
            }
        }
    }
    let scale = 1.0 / x.n_samples as f64;
    for tot in &mut totals {
        for v in tot.iter_mut() {
            *v *= scale;
        }
    }
    let tables = (1..=d).map(|r| index_table(n, r)).collect();
    Ok(MomentSet {
        n,
        d,
        per_order: totals,
        tables,
    })
}

/// Depth-first walk over non-decreasing index tuples; visits tuples of each
/// depth in lexicographic order, so per-depth counters index the canonical
/// tables directly.
fn accumulate_row(row: &[f64], d: usize, acc: &mut [Vec<f64>], counters: &mut [usize]) {
    for c in counters.iter_mut() {
        *c = 0;
    }
    fn recurse(
        row: &[f64],
        d: usize,
        start: usize,
        depth: usize,
        prod: f64,
        acc: &mut [Vec<f64>],
        counters: &mut [usize],
    ) {
        for i in start..row.len() {
            let p = prod * row[i];
            acc[depth][counters[depth]] += p;
            counters[depth] += 1;
            if depth + 1 < d {
                recurse(row, d, i, depth + 1, p, acc, counters);
            }
        }
    }
    recurse(row, d, 0, 0, 1.0, acc, counters);
}

/// Sample moment tensor `mu_d = (1/N) sum x_r^(x) d` in canonical form.
pub fn moment_tensor(x: &DataMatrix, d: usize) -> Result<SymTensor> {
    let moments = accumulate_moments(x, d)?;
    SymTensor::from_canonical(d, x.n_features, moments.per_order[d - 1].clone())
}

/// Plug-in sample cumulant tensor of order `d`.
pub fn cumulant_tensor(x: &DataMatrix, d: usize) -> Result<SymTensor> {
    let moments = accumulate_moments(x, d)?;
    cumulant_from_moments(&moments, d)
}

pub(crate) fn cumulant_from_moments(moments: &MomentSet, d: usize) -> Result<SymTensor> {
    assert!(d <= moments.d);
    let n = moments.n;
    let entries = if d <= 4 {
        closed_form_cumulants(moments, d)
    } else {
        partition_formula_cumulants(moments, d)
    };
    SymTensor::from_canonical(d, n, entries)
}

/// Closed forms for orders 2..4 (cross-checked against the partition path).
fn closed_form_cumulants(m: &MomentSet, d: usize) -> Vec<f64> {
    let n = m.n;
    let table = index_table(n, d);
    let mu1 = |i: u8| m.moment(&[i]);
    let mu2 = |i: u8, j: u8| m.moment(&sorted2(i, j));
    let mu3 = |i: u8, j: u8, k: u8| m.moment(&sorted3(i, j, k));
    table
        .tuples
        .iter()
        .map(|t| match d {
            2 => {
                let (i, j) = (t[0], t[1]);
                mu2(i, j) - mu1(i) * mu1(j)
            }
            3 => {
                let (i, j, k) = (t[0], t[1], t[2]);
                mu3(i, j, k) - mu1(i) * mu2(j, k) - mu1(j) * mu2(i, k) - mu1(k) * mu2(i, j)
                    + 2.0 * mu1(i) * mu1(j) * mu1(k)
            }
            4 => {
                let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
                let mu4 = m.moment(t);
                mu4 - mu1(i) * mu3(j, k, l)
                    - mu1(j) * mu3(i, k, l)
                    - mu1(k) * mu3(i, j, l)
                    - mu1(l) * mu3(i, j, k)
                    - mu2(i, j) * mu2(k, l)
                    - mu2(i, k) * mu2(j, l)
                    - mu2(i, l) * mu2(j, k)
                    + 2.0
                        * (mu2(i, j) * mu1(k) * mu1(l)
                            + mu2(i, k) * mu1(j) * mu1(l)
                            + mu2(i, l) * mu1(j) * mu1(k)
                            + mu2(j, k) * mu1(i) * mu1(l)
                            + mu2(j, l) * mu1(i) * mu1(k)
                            + mu2(k, l) * mu1(i) * mu1(j))
                    - 6.0 * mu1(i) * mu1(j) * mu1(k) * mu1(l)
            }
            _ => unreachable!(),
        })
        .collect()
}

fn sorted2(a: u8, b: u8) -> [u8; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

fn sorted3(a: u8, b: u8, c: u8) -> [u8; 3] {
    let mut v = [a, b, c];
    v.sort_unstable();
    v
}

/// Set partitions of `{0..d-1}` with their cumulant coefficients
/// `(-1)^(|pi|-1) (|pi|-1)!`.
pub(crate) struct PartitionList {
    /// `(coefficient, blocks)` per partition.
    pub partitions: Vec<(f64, Vec<Vec<u8>>)>,
}

static PARTITION_CACHE: Lazy<Mutex<HashMap<usize, std::sync::Arc<PartitionList>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

pub(crate) fn partitions_of(d: usize) -> std::sync::Arc<PartitionList> {
    let mut cache = PARTITION_CACHE.lock().unwrap();
    cache
        .entry(d)
        .or_insert_with(|| {
            // enumerate restricted growth strings
            let mut partitions = Vec::new();
            let mut rgs = vec![0u8; d];
            loop {
                let nblocks = *rgs.iter().max().unwrap() as usize + 1;
                let mut blocks = vec![Vec::new(); nblocks];
                for (pos, &b) in rgs.iter().enumerate() {
                    blocks[b as usize].push(pos as u8);
                }
                let mut coeff = if nblocks % 2 == 1 { 1.0 } else { -1.0 };
                for f in 1..nblocks {
                    coeff *= f as f64;
                }
                partitions.push((coeff, blocks));
                // next restricted growth string
                let mut pos = d;
                let advanced = loop {
                    if pos <= 1 {
                        break false;
                    }
                    pos -= 1;
                    let max_prefix = *rgs[..pos].iter().max().unwrap();
                    if rgs[pos] <= max_prefix {
                        rgs[pos] += 1;
                        for slot in rgs.iter_mut().skip(pos + 1) {
                            *slot = 0;
                        }
                        break true;
                    }
                };
                if !advanced {
                    break;
                }
            }
            std::sync::Arc::new(PartitionList { partitions })
        })
        .clone()
}

/// General-order cumulants by direct summation over the partition lattice.
pub(crate) fn partition_formula_cumulants(m: &MomentSet, d: usize) -> Vec<f64> {
    let n = m.n;
    let table = index_table(n, d);
    let parts = partitions_of(d);
    let mut scratch = Vec::with_capacity(d);
    table
        .tuples
        .iter()
        .map(|tuple| {
            let mut acc = 0.0;
            for (coeff, blocks) in &parts.partitions {
                let mut prod = *coeff;
                for block in blocks {
                    scratch.clear();
                    scratch.extend(block.iter().map(|&pos| tuple[pos as usize]));
                    scratch.sort_unstable();
                    prod *= m.moment(&scratch);
                }
                acc += prod;
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(rng: &mut impl Rng, n_samples: usize, n: usize) -> DataMatrix {
        let values = (0..n_samples * n)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        DataMatrix::new(n_samples, n, values).unwrap()
    }

    fn gaussian_data(rng: &mut impl Rng, n_samples: usize, n: usize) -> DataMatrix {
        let values = (0..n_samples * n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        DataMatrix::new(n_samples, n, values).unwrap()
    }

    #[test]
    fn whiten_identity_covariance_is_noop() {
        // orthogonalize columns exactly so the sample covariance is I
        let raw = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let x = DataMatrix::from_rows(raw).unwrap();
        let w = whiten(&x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(w.transform[(i, j)], expect, epsilon = 1e-8);
            }
        }
        for (a, b) in w.whitened.values().iter().zip(x.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn whiten_diagonal_covariance() {
        // +-2 and +-3 columns: zero mean, covariance diag(4, 9)
        let x = DataMatrix::from_rows(vec![
            vec![2.0, 3.0],
            vec![2.0, -3.0],
            vec![-2.0, 3.0],
            vec![-2.0, -3.0],
        ])
        .unwrap();
        let w = whiten(&x).unwrap();
        assert_relative_eq!(w.transform[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(w.transform[(1, 1)], 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.transform[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn whiten_random_data_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = gaussian_data(&mut rng, 10_000, 3);
        // correlate the columns
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, 0.0, 0.0, 0.8, 0.3, 0.2, 0.0, 1.5]);
        let mut values = Vec::with_capacity(base.values().len());
        for row in base.rows() {
            for i in 0..3 {
                values.push((0..3).map(|j| a[(i, j)] * row[j]).sum::<f64>() + 0.5);
            }
        }
        let x = DataMatrix::new(10_000, 3, values).unwrap();
        let w = whiten(&x).unwrap();
        // whitened mean ~ 0, covariance ~ I
        let m = w.whitened.mean();
        for v in m {
            assert!(v.abs() < 1e-10);
        }
        let cov = w.whitened.covariance();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(cov[(i, j)], expect, epsilon = 1e-8);
            }
        }
        // covariance_sqrt * transform = I and sqrt * sqrt = Sigma
        let prod = &w.covariance_sqrt * &w.transform;
        let sigma = &w.covariance_sqrt * &w.covariance_sqrt;
        let cov_x = x.covariance();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(prod[(i, j)], expect, epsilon = 1e-8);
                assert_relative_eq!(sigma[(i, j)], cov_x[(i, j)], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn whiten_rejects_rank_deficient() {
        // second column is a multiple of the first
        let x = DataMatrix::from_rows(vec![
            vec![1.0, 2.0],
            vec![2.0, 4.0],
            vec![-1.5, -3.0],
            vec![0.5, 1.0],
        ])
        .unwrap();
        assert!(matches!(
            whiten(&x),
            Err(Error::RankDeficientCovariance { .. })
        ));
    }

    #[test]
    fn pca_full_rank_keeps_all_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_data(&mut rng, 500, 3);
        let (reduced, ratio) = pca_reduce(&x, 3).unwrap();
        assert_relative_eq!(ratio, 1.0, epsilon = 1e-12);
        assert_eq!(reduced.n_features(), 3);
    }

    #[test]
    fn pca_line_data_explains_everything() {
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|k| {
                let t = k as f64 / 10.0 - 5.0;
                vec![2.0 * t, -t]
            })
            .collect();
        let x = DataMatrix::from_rows(rows).unwrap();
        let (reduced, ratio) = pca_reduce(&x, 1).unwrap();
        assert!((ratio - 1.0).abs() < 1e-10);
        assert_eq!(reduced.n_features(), 1);
    }

    #[test]
    fn pca_ratio_matches_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = gaussian_data(&mut rng, 4000, 2);
        let mut values = Vec::new();
        for row in base.rows() {
            values.push(3.0 * row[0]);
            values.push(0.5 * row[0] + row[1]);
        }
        let x = DataMatrix::new(4000, 2, values).unwrap();
        let (_, ratio) = pca_reduce(&x, 1).unwrap();
        let (eigs, _) = sorted_symmetric_eigen(&x.covariance());
        assert_relative_eq!(ratio, eigs[0] / (eigs[0] + eigs[1]), epsilon = 1e-12);
        assert!(pca_reduce(&x, 0).is_err());
        assert!(pca_reduce(&x, 3).is_err());
    }

    #[test]
    fn moment_tensor_single_sample() {
        let x = DataMatrix::from_rows(vec![vec![1.0, 0.0]]).unwrap();
        let t = moment_tensor(&x, 3).unwrap();
        assert_eq!(t.entry(&[0, 0, 0]), 1.0);
        assert_eq!(t.entry(&[0, 0, 1]), 0.0);
        assert_eq!(t.entry(&[1, 1, 1]), 0.0);
    }

    #[test]
    fn moment_tensor_odd_symmetry_cancels() {
        let x = DataMatrix::from_rows(vec![vec![0.3, -0.7], vec![-0.3, 0.7]]).unwrap();
        let t = moment_tensor(&x, 3).unwrap();
        assert_eq!(t.frobenius_norm(), 0.0);
    }

    #[test]
    fn moment_tensor_matches_dense_averaging_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_data(&mut rng, 100, 2);
        let t = moment_tensor(&x, 4).unwrap();
        for i in 0..2 {
            for j in i..2 {
                for k in j..2 {
                    for l in k..2 {
                        let oracle: f64 = x
                            .rows()
                            .map(|r| r[i] * r[j] * r[k] * r[l])
                            .sum::<f64>()
                            / x.n_samples() as f64;
                        assert_relative_eq!(t.entry(&[i, j, k, l]), oracle, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_partition_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_data(&mut rng, 500, 3);
        for d in 2..=4 {
            let moments = accumulate_moments(&x, d).unwrap();
            let closed = closed_form_cumulants(&moments, d);
            let partition = partition_formula_cumulants(&moments, d);
            for (a, b) in closed.iter().zip(partition.iter()) {
                assert_relative_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn gaussian_fourth_cumulant_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = gaussian_data(&mut rng, 1_000_000, 2);
        let k4 = cumulant_tensor(&x, 4).unwrap();
        // diagonal entries have estimator std ~ sqrt(96/N) ~ 0.01
        for (_, _, v) in k4.iter_canonical() {
            assert!(v.abs() < 0.05, "entry {v}");
        }
    }

    #[test]
    fn uniform_fourth_cumulant_matches_analytic() {
        // Unif(-1,1) scaled to unit variance: kappa_4 = (mu4 - 3 mu2^2) / sigma^4
        //   = (1/5 - 1/3) / (1/9) = -6/5
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let scale = 3.0f64.sqrt();
        let values: Vec<f64> = (0..2_000_000)
            .map(|_| scale * rng.random_range(-1.0..1.0))
            .collect();
        let x = DataMatrix::new(1_000_000, 2, values).unwrap();
        let k4 = cumulant_tensor(&x, 4).unwrap();
        assert!((k4.entry(&[0, 0, 0, 0]) + 1.2).abs() < 0.03);
        assert!((k4.entry(&[1, 1, 1, 1]) + 1.2).abs() < 0.03);
    }

    #[test]
    fn chi_square_pair_cumulant_analytic_values() {
        // s = (s1, (s1^2 - 1)/sqrt(2)): kappa4_2222 = 12, kappa4_1111 = 0,
        // kappa4_1222 = 0
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut values = Vec::with_capacity(2_000_000);
        for _ in 0..1_000_000 {
            let s1: f64 = rng.sample(rand_distr::StandardNormal);
            values.push(s1);
            values.push((s1 * s1 - 1.0) / 2.0f64.sqrt());
        }
        let x = DataMatrix::new(1_000_000, 2, values).unwrap();
        let k4 = cumulant_tensor(&x, 4).unwrap();
        assert!((k4.entry(&[1, 1, 1, 1]) - 12.0).abs() < 0.5);
        assert!(k4.entry(&[0, 0, 0, 0]).abs() < 0.1);
        assert!(k4.entry(&[0, 1, 1, 1]).abs() < 0.1);
    }

    #[test]
    fn cumulants_are_multilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x = random_data(&mut rng, 2000, 3);
        let a = DMatrix::from_row_slice(3, 3, &[1.2, -0.3, 0.0, 0.4, 0.9, 0.1, -0.2, 0.5, 1.1]);
        // y_r = A x_r
        let mut values = Vec::new();
        for row in x.rows() {
            for i in 0..3 {
                values.push((0..3).map(|j| a[(i, j)] * row[j]).sum());
            }
        }
        let y = DataMatrix::new(2000, 3, values).unwrap();
        for d in [3usize, 4] {
            let kx = cumulant_tensor(&x, d).unwrap();
            let ky = cumulant_tensor(&y, d).unwrap();
            let mapped = SymTensor::multilinear_action(&a, &kx).unwrap();
            let err = ky.sub(&mapped).unwrap().frobenius_norm();
            assert!(
                err < 1e-9 * ky.frobenius_norm().max(1.0),
                "d={d} err={err}"
            );
        }
    }

    #[test]
    fn cumulants_are_shift_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let x = random_data(&mut rng, 2000, 2);
        let mut values = Vec::new();
        for row in x.rows() {
            values.push(row[0] + 5.0);
            values.push(row[1] - 3.0);
        }
        let shifted = DataMatrix::new(2000, 2, values).unwrap();
        for d in [2usize, 3, 4, 5] {
            let kx = cumulant_tensor(&x, d).unwrap();
            let ks = cumulant_tensor(&shifted, d).unwrap();
            let err = kx.sub(&ks).unwrap().frobenius_norm();
            assert!(
                err < 1e-9 * kx.frobenius_norm().max(1.0),
                "d={d} err={err}"
            );
        }
    }

    #[test]
    fn centered_low_order_cumulants_equal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x = random_data(&mut rng, 1000, 2);
        let mean = x.mean();
        let centered = DataMatrix::from_rows(
            x.rows()
                .map(|r| r.iter().zip(&mean).map(|(v, m)| v - m).collect())
                .collect(),
        )
        .unwrap();
        for d in [2usize, 3] {
            let k = cumulant_tensor(&centered, d).unwrap();
            let mu = moment_tensor(&centered, d).unwrap();
            let err = k.sub(&mu).unwrap().frobenius_norm();
            assert!(err < 1e-9 * mu.frobenius_norm().max(1.0), "d={d}");
        }
    }

    #[test]
    fn bell_numbers_of_partition_enumeration() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (i, &b) in bell.iter().enumerate() {
            let d = i + 1;
            assert_eq!(partitions_of(d).partitions.len(), b, "d={d}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let x = DataMatrix::from_rows(vec![vec![1.5, -2.25], vec![0.125, 3.0]]).unwrap();
        x.write_csv(&path).unwrap();
        let back = DataMatrix::read_csv(&path, false).unwrap();
        assert_eq!(x, back);
    }
}
