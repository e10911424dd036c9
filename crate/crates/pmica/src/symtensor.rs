//! Canonical storage and multilinear algebra for real symmetric tensors.
//!
//! A symmetric order-`d` tensor on `R^n` is stored by its canonical entries:
//! one value per non-decreasing multi-index, `binomial(n+d-1, d)` values in
//! total instead of `n^d`. Frobenius inner products weight each canonical
//! entry by the number of distinct permutations of its index, so they agree
//! with the inner product of the full `d`-way arrays. The orthogonal group
//! acts by multiplying every mode by the same matrix; the action is computed
//! mode by mode on a dense intermediate and re-canonicalized.
//!
//! Indices are 0-based in the API. The text file format (see
//! [`SymTensor::write_text`]) uses 1-based indices.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Smallest supported tensor order.
pub const MIN_ORDER: usize = 2;
/// Largest supported tensor order.
pub const MAX_ORDER: usize = 9;

/// Relative factor for the default symmetry tolerance of [`SymTensor::from_dense`]:
/// `tol = REL_SYMMETRY_TOL * ||dense||_F`.
pub const REL_SYMMETRY_TOL: f64 = 1e-8;

/// Orthogonality acceptance threshold `||Q'Q - I||_F` for the group action.
pub const ORTHO_TOL: f64 = 1e-6;

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of non-decreasing `d`-tuples over an alphabet of size `n`.
pub(crate) fn canonical_count(n: usize, d: usize) -> usize {
    binomial(n + d - 1, d)
}

/// Number of canonical entries of a symmetric order-`d` tensor on `R^n`,
/// `binomial(n + d - 1, d)`.
pub fn canonical_entry_count(n: usize, d: usize) -> usize {
    canonical_count(n, d)
}

/// Lexicographic rank of a non-decreasing tuple over `{0..n-1}`.
pub(crate) fn rank_of_sorted(idx: &[u8], n: usize) -> usize {
    let d = idx.len();
    let mut rank = 0usize;
    let mut prev = 0usize;
    for (pos, &v) in idx.iter().enumerate() {
        let rem = d - pos - 1;
        for u in prev..(v as usize) {
            rank += canonical_count(n - u, rem);
        }
        prev = v as usize;
    }
    rank
}

/// Number of distinct permutations of a sorted tuple: `d! / prod(run lengths!)`.
pub(crate) fn multiplicity(idx: &[u8]) -> f64 {
    let d = idx.len();
    let mut numer = 1.0;
    for k in 2..=d {
        numer *= k as f64;
    }
    let mut denom = 1.0;
    let mut run = 1usize;
    for i in 1..d {
        if idx[i] == idx[i - 1] {
            run += 1;
            denom *= run as f64;
        } else {
            run = 1;
        }
    }
    numer / denom
}

/// Canonical index tuples of a given `(n, d)` shape, in lexicographic order,
/// together with their permutation multiplicities.
#[derive(Debug)]
pub(crate) struct IndexTable {
    pub n: usize,
    pub tuples: Vec<Vec<u8>>,
    pub mult: Vec<f64>,
}

impl IndexTable {
    fn build(n: usize, d: usize) -> Self {
        let count = canonical_count(n, d);
        let mut tuples = Vec::with_capacity(count);
        let mut cur = vec![0u8; d];
        loop {
            tuples.push(cur.clone());
            // next non-decreasing tuple in lex order
            let mut pos = d;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if (cur[pos] as usize) < n - 1 {
                    let v = cur[pos] + 1;
                    for slot in cur.iter_mut().skip(pos) {
                        *slot = v;
                    }
                    break;
                }
                if pos == 0 {
                    let mult = tuples.iter().map(|t| multiplicity(t)).collect();
                    debug_assert_eq!(tuples.len(), count);
                    return IndexTable { n, tuples, mult };
                }
            }
        }
    }

    pub fn rank(&self, sorted: &[u8]) -> usize {
        rank_of_sorted(sorted, self.n)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }
}

type TableCache = HashMap<(usize, usize), Arc<IndexTable>>;

static TABLE_CACHE: Lazy<Mutex<TableCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

pub(crate) fn index_table(n: usize, d: usize) -> Arc<IndexTable> {
    let mut cache = TABLE_CACHE.lock().unwrap();
    cache
        .entry((n, d))
        .or_insert_with(|| Arc::new(IndexTable::build(n, d)))
        .clone()
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::UnsupportedOrder {
            order,
            min: MIN_ORDER,
            max: MAX_ORDER,
        });
    }
    if dim == 0 {
        return Err(Error::ShapeMismatch("tensor dimension must be >= 1".into()));
    }
    if dim > u8::MAX as usize {
        return Err(Error::ShapeMismatch(format!(
            "tensor dimension {dim} exceeds supported maximum {}",
            u8::MAX
        )));
    }
    Ok(())
}

/// Symmetric tensor in canonical (sorted multi-index) storage.
#[derive(Clone, Debug)]
pub struct SymTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
    table: Arc<IndexTable>,
}

impl PartialEq for SymTensor {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.dim == other.dim && self.entries == other.entries
    }
}

impl SymTensor {
    /// Zero tensor of the given order and dimension.
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        let table = index_table(dim, order);
        Ok(SymTensor {
            order,
            dim,
            entries: vec![0.0; table.len()],
            table,
        })
    }

    /// Build from canonical entries in lexicographic order of sorted multi-indices.
    pub fn from_canonical(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        check_shape(order, dim)?;
        let table = index_table(dim, order);
        if entries.len() != table.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} canonical entries for order {order}, dim {dim}; got {}",
                table.len(),
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "tensor entries must be finite".into(),
            ));
        }
        Ok(SymTensor {
            order,
            dim,
            entries,
            table,
        })
    }

    /// Canonicalize a dense `d`-way array, rejecting input whose permutation
    /// orbits deviate by more than `tol` (absolute). Each canonical entry is
    /// the mean over its orbit. A scale-aware default for `tol` is
    /// [`default_symmetry_tol`].
    pub fn from_dense(shape: &[usize], data: &[f64], tol: f64) -> Result<Self> {
        let (order, dim) = dense_shape(shape, data)?;
        if tol < 0.0 || !tol.is_finite() {
            return Err(Error::InvalidArgument(
                "symmetry tolerance must be finite and >= 0".into(),
            ));
        }
        let table = index_table(dim, order);
        let entries = canonical_means(data, dim, order, &table);
        // second pass: max deviation from the orbit mean
        let mut deviation = 0.0f64;
        let mut idx = vec![0u8; order];
        for (lin, &v) in data.iter().enumerate() {
            decode_dense_index(lin, dim, &mut idx);
            idx.sort_unstable();
            let dev = (v - entries[table.rank(&idx)]).abs();
            if dev > deviation {
                deviation = dev;
            }
        }
        if deviation > tol {
            return Err(Error::NotSymmetric { deviation, tol });
        }
        SymTensor::from_canonical(order, dim, entries)
    }

    /// Canonicalize a dense array by averaging each permutation orbit, with no
    /// symmetry check. Used where symmetry holds by construction up to rounding.
    pub fn symmetrize_dense(shape: &[usize], data: &[f64]) -> Result<Self> {
        let (order, dim) = dense_shape(shape, data)?;
        let table = index_table(dim, order);
        let entries = canonical_means(data, dim, order, &table);
        SymTensor::from_canonical(order, dim, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at an arbitrary (not necessarily sorted) multi-index.
    ///
    /// Panics if the index has the wrong length or an out-of-range value.
    pub fn entry(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.order, "multi-index length != tensor order");
        let mut sorted = [0u8; MAX_ORDER];
        for (k, &i) in idx.iter().enumerate() {
            assert!(i < self.dim, "index value {i} out of range 0..{}", self.dim);
            sorted[k] = i as u8;
        }
        let sorted = &mut sorted[..self.order];
        sorted.sort_unstable();
        self.entries[self.table.rank(sorted)]
    }

    /// Set the entry of the orbit containing `idx`.
    pub fn set_entry(&mut self, idx: &[usize], value: f64) {
        assert_eq!(idx.len(), self.order, "multi-index length != tensor order");
        let mut sorted = [0u8; MAX_ORDER];
        for (k, &i) in idx.iter().enumerate() {
            assert!(i < self.dim, "index value {i} out of range 0..{}", self.dim);
            sorted[k] = i as u8;
        }
        let sorted = &mut sorted[..self.order];
        sorted.sort_unstable();
        let rank = self.table.rank(sorted);
        self.entries[rank] = value;
    }

    /// Canonical entries in lexicographic order of sorted multi-indices.
    pub fn canonical_entries(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn table(&self) -> &IndexTable {
        &self.table
    }

    /// Iterate `(sorted multi-index, permutation multiplicity, value)`.
    pub fn iter_canonical(&self) -> impl Iterator<Item = (&[u8], f64, f64)> + '_ {
        self.table
            .tuples
            .iter()
            .zip(self.table.mult.iter())
            .zip(self.entries.iter())
            .map(|((t, &m), &v)| (t.as_slice(), m, v))
    }

    /// `(T_{1..1}, ..., T_{n..n})`.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.entry(&vec![i; self.order]))
            .collect()
    }

    /// Frobenius inner product of the full `d`-way arrays, computed from
    /// canonical entries with multiplicity weights.
    pub fn frobenius_inner(&self, other: &SymTensor) -> Result<f64> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "frobenius: (d={}, n={}) vs (d={}, n={})",
                self.order, self.dim, other.order, other.dim
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .zip(self.table.mult.iter())
            .map(|((&a, &b), &m)| m * a * b)
            .sum())
    }

    /// Frobenius norm of the full `d`-way array.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .zip(self.table.mult.iter())
            .map(|(&a, &m)| m * a * a)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&self, factor: f64) -> SymTensor {
        let mut out = self.clone();
        for v in &mut out.entries {
            *v *= factor;
        }
        out
    }

    pub fn add(&self, other: &SymTensor) -> Result<SymTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymTensor) -> Result<SymTensor> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &SymTensor, f: impl Fn(f64, f64) -> f64) -> Result<SymTensor> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::ShapeMismatch("tensor shapes differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        SymTensor::from_canonical(self.order, self.dim, entries)
    }

    /// Expand to a dense row-major `d`-way array of length `n^d`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let d = self.order;
        let len = n.pow(d as u32);
        let mut out = vec![0.0; len];
        let mut idx = vec![0u8; d];
        for (lin, slot) in out.iter_mut().enumerate() {
            decode_dense_index(lin, n, &mut idx);
            idx.sort_unstable();
            *slot = self.entries[self.table.rank(&idx)];
        }
        out
    }

    /// Sum of weighted symmetric rank-one terms `sum_k lambda_k v_k^{(x) d}`.
    pub fn rank_one_sum(terms: &[(f64, DVector<f64>)], order: usize) -> Result<Self> {
        let dim = match terms.first() {
            Some((_, v)) => v.len(),
            None => {
                return Err(Error::InvalidArgument(
                    "rank_one_sum needs at least one term".into(),
                ))
            }
        };
        check_shape(order, dim)?;
        if terms.iter().any(|(_, v)| v.len() != dim) {
            return Err(Error::ShapeMismatch(
                "rank_one_sum: vectors have mismatched lengths".into(),
            ));
        }
        let table = index_table(dim, order);
        let mut entries = vec![0.0; table.len()];
        for (rank, tuple) in table.tuples.iter().enumerate() {
            let mut acc = 0.0;
            for (lambda, v) in terms {
                let mut prod = *lambda;
                for &i in tuple {
                    prod *= v[i as usize];
                }
                acc += prod;
            }
            entries[rank] = acc;
        }
        SymTensor::from_canonical(order, dim, entries)
    }

    /// Multilinear action `M . T` of an arbitrary square matrix:
    /// `[M . T]_{i1..id} = sum_j M_{i1 j1} .. M_{id jd} T_{j1..jd}`,
    /// computed as `d` successive one-mode products.
    pub fn multilinear_action(m: &DMatrix<f64>, t: &SymTensor) -> Result<SymTensor> {
        let n = t.dim;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "action matrix is {}x{}, tensor dimension is {n}",
                m.nrows(),
                m.ncols()
            )));
        }
        let d = t.order;
        let mut dense = t.to_dense();
        let mut scratch = vec![0.0; dense.len()];
        for mode in 0..d {
            mode_product(&dense, &mut scratch, m, n, d, mode);
            std::mem::swap(&mut dense, &mut scratch);
        }
        let shape = vec![n; d];
        SymTensor::symmetrize_dense(&shape, &dense)
    }

    /// Orthogonal group action `Q . T`. Rejects `Q` with
    /// `||Q'Q - I||_F > ORTHO_TOL`.
    pub fn orthogonal_action(q: &DMatrix<f64>, t: &SymTensor) -> Result<SymTensor> {
        let dev = ortho_deviation(q);
        if dev > ORTHO_TOL {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        SymTensor::multilinear_action(q, t)
    }

    /// Write the text format: header `symtensor d n`, then one line
    /// `i1 .. id value` per canonical entry, indices 1-based non-decreasing,
    /// values in round-trip scientific notation.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "symtensor {} {}", self.order, self.dim)?;
        for (tuple, _, v) in self.iter_canonical() {
            for &i in tuple {
                write!(w, "{} ", i as usize + 1)?;
            }
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }

    /// Parse the text format written by [`SymTensor::write_text`].
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty tensor file".into()))??;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "symtensor" {
            return Err(Error::Parse(format!(
                "expected header `symtensor d n`, got `{header}`"
            )));
        }
        let order: usize = head[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad order `{}`", head[1])))?;
        let dim: usize = head[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension `{}`", head[2])))?;
        check_shape(order, dim)?;
        let table = index_table(dim, order);
        let mut entries = vec![f64::NAN; table.len()];
        let mut seen = vec![false; table.len()];
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != order + 1 {
                return Err(Error::Parse(format!(
                    "expected {} indices and a value, got `{line}`",
                    order
                )));
            }
            let mut idx = vec![0u8; order];
            for (k, f) in fields[..order].iter().enumerate() {
                let i: usize = f
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index `{f}`")))?;
                if i == 0 || i > dim {
                    return Err(Error::Parse(format!(
                        "index {i} out of range 1..={dim} in `{line}`"
                    )));
                }
                idx[k] = (i - 1) as u8;
            }
            if idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Parse(format!(
                    "indices must be non-decreasing in `{line}`"
                )));
            }
            let value: f64 = fields[order]
                .parse()
                .map_err(|_| Error::Parse(format!("bad value `{}`", fields[order])))?;
            let rank = table.rank(&idx);
            if seen[rank] {
                return Err(Error::Parse(format!("duplicate canonical index `{line}`")));
            }
            seen[rank] = true;
            entries[rank] = value;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            let tuple: Vec<usize> = table.tuples[missing].iter().map(|&i| i as usize + 1).collect();
            return Err(Error::Parse(format!(
                "missing canonical entry for index {tuple:?}"
            )));
        }
        SymTensor::from_canonical(order, dim, entries)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_text(std::io::BufWriter::new(file))?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        SymTensor::read_text(std::io::BufReader::new(file))
    }
}

/// Default symmetry tolerance for [`SymTensor::from_dense`]: `1e-8 * ||dense||_F`.
pub fn default_symmetry_tol(data: &[f64]) -> f64 {
    REL_SYMMETRY_TOL * data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `||Q'Q - I||_F`.
pub(crate) fn ortho_deviation(q: &DMatrix<f64>) -> f64 {
    if q.nrows() != q.ncols() {
        return f64::INFINITY;
    }
    let n = q.nrows();
    let gram = q.transpose() * q;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let diff = gram[(i, j)] - target;
            acc += diff * diff;
        }
    }
    acc.sqrt()
}

fn dense_shape(shape: &[usize], data: &[f64]) -> Result<(usize, usize)> {
    let order = shape.len();
    if order < MIN_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            min: MIN_ORDER,
            max: MAX_ORDER,
        });
    }
    let dim = shape[0];
    if shape.iter().any(|&s| s != dim) {
        return Err(Error::ShapeMismatch(format!(
            "dense array is not cubical: shape {shape:?}"
        )));
    }
    check_shape(order, dim)?;
    let expected = dim.pow(order as u32);
    if data.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "dense array has {} entries, shape {shape:?} needs {expected}"
        , data.len())));
    }
    Ok((order, dim))
}

fn canonical_means(data: &[f64], n: usize, d: usize, table: &IndexTable) -> Vec<f64> {
    let mut sums = vec![0.0; table.len()];
    let mut idx = vec![0u8; d];
    for (lin, &v) in data.iter().enumerate() {
        decode_dense_index(lin, n, &mut idx);
        idx.sort_unstable();
        sums[table.rank(&idx)] += v;
    }
    for (s, &m) in sums.iter_mut().zip(table.mult.iter()) {
        *s /= m;
    }
    sums
}

pub(crate) fn decode_dense_index(mut lin: usize, n: usize, out: &mut [u8]) {
    for slot in out.iter_mut().rev() {
        *slot = (lin % n) as u8;
        lin /= n;
    }
}

/// One-mode product: `out[.., i_mode, ..] = sum_j m[i_mode, j] * input[.., j, ..]`.
fn mode_product(input: &[f64], out: &mut [f64], m: &DMatrix<f64>, n: usize, d: usize, mode: usize) {
    let stride: usize = n.pow((d - 1 - mode) as u32);
    let block = stride * n;
    let nblocks = input.len() / block;
    out.iter_mut().for_each(|v| *v = 0.0);
    for bl in 0..nblocks {
        let base = bl * block;
        for b in 0..n {
            let obase = base + b * stride;
            for a in 0..n {
                let coeff = m[(b, a)];
                if coeff == 0.0 {
                    continue;
                }
                let ibase = base + a * stride;
                for off in 0..stride {
                    out[obase + off] += coeff * input[ibase + off];
                }
            }
        }
    }
}
