//! Seeded samplers for the synthetic source distributions, plus mixing.
//!
//! Raw draw functions (`sample_*`) produce the unstandardized laws.
//! [`SourceSampler`] wraps a [`SourceSpec`] with a seed and, when the spec
//! asks for standardization, rescales each coordinate to unit variance using
//! constants estimated from an internal pilot sample of `10^5` draws on a
//! fixed sub-stream (stream 0 of the seed). Bulk sampling splits the output
//! into fixed-size blocks, one counter-derived RNG stream per block, so
//! results are bit-identical for any thread count and any larger request
//! shares its prefix with a smaller one.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, LogNormal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cumulants::DataMatrix;
use crate::error::{Error, Result};

const PILOT_SIZE: usize = 100_000;
const BLOCK_ROWS: usize = 1 << 16;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Zero-mean, unit-variance noise laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDist {
    Rademacher,
    StdGaussian,
    /// Uniform on `(-sqrt(3), sqrt(3))`.
    UniformUnitVar,
}

impl NoiseDist {
    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            NoiseDist::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseDist::StdGaussian => rng.sample(StandardNormal),
            NoiseDist::UniformUnitVar => rng.random_range(-SQRT3..SQRT3),
        }
    }
}

/// Strictly positive scale laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositiveDist {
    Uniform { lo: f64, hi: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl PositiveDist {
    fn validate(&self) -> Result<()> {
        match self {
            PositiveDist::Uniform { lo, hi } => {
                if !(*lo > 0.0 && hi > lo) {
                    return Err(Error::InvalidSpec(format!(
                        "uniform scale needs 0 < lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            PositiveDist::LogNormal { sigma, .. } => {
                if sigma.is_nan() || *sigma <= 0.0 {
                    return Err(Error::InvalidSpec("lognormal scale needs sigma > 0".into()));
                }
            }
        }
        Ok(())
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            PositiveDist::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            PositiveDist::LogNormal { mu, sigma } => {
                LogNormal::new(*mu, *sigma).unwrap().sample(rng)
            }
        }
    }
}

/// How the scale vector of a correlated-energy source is drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleModel {
    Constant(f64),
    /// One draw shared by every coordinate (maximally correlated energies).
    Shared(PositiveDist),
    /// Independent draws per coordinate (independent coordinates overall).
    Independent(PositiveDist),
}

/// Source `z_i = sigma_i eps_i` with independent unit-variance noises and
/// exogenous positive scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedEnergySpec {
    pub n: usize,
    pub scales: ScaleModel,
    pub noise: NoiseDist,
}

impl CorrelatedEnergySpec {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("energy source needs n >= 1".into()));
        }
        match &self.scales {
            ScaleModel::Constant(c) => {
                if c.is_nan() || *c <= 0.0 {
                    return Err(Error::InvalidSpec("constant scale must be positive".into()));
                }
                Ok(())
            }
            ScaleModel::Shared(d) | ScaleModel::Independent(d) => d.validate(),
        }
    }
}

/// Rooted tree with designated output vertices. `parents[v]` is `None`
/// exactly at the root. Each vertex carries an independent zero-mean factor;
/// output `i` is the product of the factors along the path from the root to
/// `leaves[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub parents: Vec<Option<usize>>,
    pub leaves: Vec<usize>,
    pub dists: Vec<NoiseDist>,
}

impl TreeSpec {
    /// Star tree: a root plus `n` leaf children, all with the same factor law.
    pub fn star(n: usize, dist: NoiseDist) -> Self {
        let mut parents = vec![None];
        parents.extend((0..n).map(|_| Some(0)));
        TreeSpec {
            parents,
            leaves: (1..=n).collect(),
            dists: vec![dist; n + 1],
        }
    }

    fn validate(&self) -> Result<()> {
        let nv = self.parents.len();
        if nv == 0 || self.dists.len() != nv {
            return Err(Error::InvalidSpec(
                "tree needs one factor law per vertex".into(),
            ));
        }
        if self.parents.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(Error::InvalidSpec("tree needs exactly one root".into()));
        }
        if self.leaves.is_empty() {
            return Err(Error::InvalidSpec("tree needs at least one output vertex".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &leaf in &self.leaves {
            if leaf >= nv {
                return Err(Error::InvalidSpec(format!("leaf {leaf} out of range")));
            }
            if !seen.insert(leaf) {
                return Err(Error::InvalidSpec(format!("duplicate leaf {leaf}")));
            }
        }
        for v in 0..nv {
            if let Some(p) = self.parents[v] {
                if p >= nv {
                    return Err(Error::InvalidSpec(format!(
                        "vertex {v} has out-of-range parent {p}"
                    )));
                }
            }
            // walking up must reach the root within nv steps
            let mut cur = v;
            for _ in 0..nv {
                match self.parents[cur] {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            if self.parents[cur].is_some() {
                return Err(Error::InvalidSpec(format!(
                    "cycle detected walking up from vertex {v}"
                )));
            }
        }
        Ok(())
    }

    /// Root-to-vertex path (inclusive) per output vertex.
    fn paths(&self) -> Vec<Vec<usize>> {
        self.leaves
            .iter()
            .map(|&leaf| {
                let mut path = vec![leaf];
                let mut cur = leaf;
                while let Some(p) = self.parents[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                path
            })
            .collect()
    }
}

/// Which law to draw from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Density `(1/2) |z_2|` on the square `[-1, 1]^2`; independent coordinates.
    SquareWeighted,
    /// Density `(3/2) |z_2|` on the unit l1 ball; PMI but not independent.
    L1Weighted,
    /// `(1 - alpha) z^(square) + alpha z^(l1)` with independent draws.
    AlphaMix { alpha: f64 },
    /// `z_i = +-w_i` with `(w, slack) ~ Dirichlet(alphas, 1)`; supported on
    /// the l1 ball, density proportional to `prod |z_i|^(alpha_i - 1)`.
    /// `alphas = None` uses the default `alpha_i = 2^((i-1)/(n-1))`.
    DirichletL1 {
        n: usize,
        alphas: Option<Vec<f64>>,
    },
    CorrelatedEnergy(CorrelatedEnergySpec),
    TreeBroadcast(TreeSpec),
}

/// A source law plus the standardization choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Rescale every coordinate to unit variance using pilot-estimated
    /// standard deviations.
    pub standardize: bool,
}

impl SourceSpec {
    pub fn square() -> Self {
        SourceSpec {
            kind: SourceKind::SquareWeighted,
            standardize: false,
        }
    }

    pub fn l1() -> Self {
        SourceSpec {
            kind: SourceKind::L1Weighted,
            standardize: false,
        }
    }

    /// The standardized interpolation `s^(alpha)`.
    pub fn alpha_mix(alpha: f64) -> Self {
        SourceSpec {
            kind: SourceKind::AlphaMix { alpha },
            standardize: true,
        }
    }

    /// The standardized Dirichlet-type source with default exponents.
    pub fn dirichlet(n: usize) -> Self {
        SourceSpec {
            kind: SourceKind::DirichletL1 { n, alphas: None },
            standardize: true,
        }
    }

    pub fn correlated_energy(spec: CorrelatedEnergySpec) -> Self {
        SourceSpec {
            kind: SourceKind::CorrelatedEnergy(spec),
            standardize: false,
        }
    }

    pub fn tree(tree: TreeSpec) -> Self {
        SourceSpec {
            kind: SourceKind::TreeBroadcast(tree),
            standardize: false,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SourceKind::SquareWeighted | SourceKind::L1Weighted | SourceKind::AlphaMix { .. } => 2,
            SourceKind::DirichletL1 { n, .. } => *n,
            SourceKind::CorrelatedEnergy(spec) => spec.n,
            SourceKind::TreeBroadcast(tree) => tree.leaves.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SourceKind::SquareWeighted | SourceKind::L1Weighted => Ok(()),
            SourceKind::AlphaMix { alpha } => {
                if (0.0..=1.0).contains(alpha) {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "alpha must lie in [0, 1], got {alpha}"
                    )))
                }
            }
            SourceKind::DirichletL1 { n, alphas } => {
                if *n < 2 {
                    return Err(Error::InvalidSpec("dirichlet source needs n >= 2".into()));
                }
                if let Some(a) = alphas {
                    if a.len() != *n {
                        return Err(Error::InvalidSpec(
                            "dirichlet needs one exponent per coordinate".into(),
                        ));
                    }
                    if a.iter().any(|&v| v.is_nan() || v <= 0.0) {
                        return Err(Error::InvalidSpec(
                            "dirichlet exponents must be positive".into(),
                        ));
                    }
                }
                Ok(())
            }
            SourceKind::CorrelatedEnergy(spec) => spec.validate(),
            SourceKind::TreeBroadcast(tree) => tree.validate(),
        }
    }
}

/// Default Dirichlet exponents `alpha_i = 2^((i-1)/(n-1))`.
pub fn dirichlet_default_alphas(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 2f64.powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn draw_square(rng: &mut impl Rng, out: &mut [f64]) {
    out[0] = rng.random_range(-1.0..1.0);
    let u: f64 = rng.random();
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    // |z_2| has density 2z on [0, 1], so |z_2| = sqrt(U)
    out[1] = sign * u.sqrt();
}

fn draw_l1(rng: &mut impl Rng, out: &mut [f64]) {
    // rejection from the square-weighted law; acceptance probability 1/3
    loop {
        draw_square(rng, out);
        if out[0].abs() + out[1].abs() <= 1.0 {
            return;
        }
    }
}

/// One draw from the square-weighted law per row.
pub fn sample_square_weighted(n_samples: usize, rng: &mut impl Rng) -> DataMatrix {
    let mut values = vec![0.0; n_samples * 2];
    for row in values.chunks_mut(2) {
        draw_square(rng, row);
    }
    DataMatrix::new(n_samples, 2, values).expect("valid shape")
}

/// One draw from the l1-ball law per row.
pub fn sample_l1_weighted(n_samples: usize, rng: &mut impl Rng) -> DataMatrix {
    let mut values = vec![0.0; n_samples * 2];
    for row in values.chunks_mut(2) {
        draw_l1(rng, row);
    }
    DataMatrix::new(n_samples, 2, values).expect("valid shape")
}

/// Prepared per-row sampler.
enum Core {
    Square,
    L1,
    AlphaMix { alpha: f64 },
    Dirichlet { gammas: Vec<Gamma<f64>>, slack: Gamma<f64> },
    Energy { spec: CorrelatedEnergySpec },
    Tree { paths: Vec<Vec<usize>>, dists: Vec<NoiseDist>, n_vertices: usize },
}

impl Core {
    fn build(spec: &SourceSpec) -> Result<Core> {
        spec.validate()?;
        Ok(match &spec.kind {
            SourceKind::SquareWeighted => Core::Square,
            SourceKind::L1Weighted => Core::L1,
            SourceKind::AlphaMix { alpha } => Core::AlphaMix { alpha: *alpha },
            SourceKind::DirichletL1 { n, alphas } => {
                let alphas = alphas
                    .clone()
                    .unwrap_or_else(|| dirichlet_default_alphas(*n));
                let gammas = alphas
                    .iter()
                    .map(|&a| {
                        Gamma::new(a, 1.0)
                            .map_err(|e| Error::InvalidSpec(format!("gamma({a}): {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let slack = Gamma::new(1.0, 1.0).expect("unit gamma");
                Core::Dirichlet { gammas, slack }
            }
            SourceKind::CorrelatedEnergy(spec) => Core::Energy { spec: spec.clone() },
            SourceKind::TreeBroadcast(tree) => Core::Tree {
                paths: tree.paths(),
                dists: tree.dists.clone(),
                n_vertices: tree.parents.len(),
            },
        })
    }

    fn draw_into(&self, rng: &mut impl Rng, out: &mut [f64], scratch: &mut Vec<f64>) {
        match self {
            Core::Square => draw_square(rng, out),
            Core::L1 => draw_l1(rng, out),
            Core::AlphaMix { alpha } => {
                let mut z0 = [0.0; 2];
                let mut z1 = [0.0; 2];
                draw_square(rng, &mut z0);
                draw_l1(rng, &mut z1);
                out[0] = (1.0 - alpha) * z0[0] + alpha * z1[0];
                out[1] = (1.0 - alpha) * z0[1] + alpha * z1[1];
            }
            Core::Dirichlet { gammas, slack } => {
                let mut total = slack.sample(rng);
                for (slot, g) in out.iter_mut().zip(gammas) {
                    *slot = g.sample(rng);
                    total += *slot;
                }
                for slot in out.iter_mut() {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *slot = sign * *slot / total;
                }
            }
            Core::Energy { spec } => {
                match &spec.scales {
                    ScaleModel::Constant(c) => out.iter_mut().for_each(|v| *v = *c),
                    ScaleModel::Shared(d) => {
                        let sigma = d.draw(rng);
                        out.iter_mut().for_each(|v| *v = sigma);
                    }
                    ScaleModel::Independent(d) => {
                        out.iter_mut().for_each(|v| *v = d.draw(rng));
                    }
                }
                for slot in out.iter_mut() {
                    *slot *= spec.noise.draw(rng);
                }
            }
            Core::Tree {
                paths,
                dists,
                n_vertices,
            } => {
                scratch.clear();
                scratch.extend(dists[..*n_vertices].iter().map(|d| d.draw(rng)));
                for (slot, path) in out.iter_mut().zip(paths) {
                    *slot = path.iter().map(|&v| scratch[v]).product();
                }
            }
        }
    }
}

/// Deterministic seeded sampler for a [`SourceSpec`].
pub struct SourceSampler {
    spec: SourceSpec,
    seed: u64,
    core: Core,
    scales: Vec<f64>,
}

impl SourceSampler {
    pub fn new(spec: SourceSpec, seed: u64) -> Result<Self> {
        Self::with_seeds(spec, seed, seed)
    }

    /// Like [`SourceSampler::new`] but with the pilot stream seeded
    /// separately. Replicated experiments pass one shared `pilot_seed` per
    /// grid cell so that every replicate samples the identical standardized
    /// law; the per-replicate `data_seed` then only varies the samples.
    pub fn with_seeds(spec: SourceSpec, data_seed: u64, pilot_seed: u64) -> Result<Self> {
        let core = Core::build(&spec)?;
        let dim = spec.dim();
        let scales = if spec.standardize {
            let mut rng = ChaCha8Rng::seed_from_u64(pilot_seed);
            rng.set_stream(0);
            let mut sums = vec![0.0; dim];
            let mut sq = vec![0.0; dim];
            let mut row = vec![0.0; dim];
            let mut scratch = Vec::new();
            for _ in 0..PILOT_SIZE {
                core.draw_into(&mut rng, &mut row, &mut scratch);
                for ((s, q), &v) in sums.iter_mut().zip(sq.iter_mut()).zip(row.iter()) {
                    *s += v;
                    *q += v * v;
                }
            }
            let n = PILOT_SIZE as f64;
            sums.iter()
                .zip(sq.iter())
                .map(|(&s, &q)| {
                    let mean = s / n;
                    let var = q / n - mean * mean;
                    if var <= 0.0 {
                        Err(Error::InvalidSpec(
                            "degenerate coordinate: pilot variance is zero".into(),
                        ))
                    } else {
                        Ok(1.0 / var.sqrt())
                    }
                })
                .collect::<Result<Vec<f64>>>()?
        } else {
            vec![1.0; dim]
        };
        Ok(SourceSampler {
            spec,
            seed: data_seed,
            core,
            scales,
        })
    }

    pub fn spec(&self) -> &SourceSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Per-coordinate multipliers applied to raw draws (`1` when not
    /// standardizing); recorded in run manifests.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Draw `n_samples` rows. Block `b` of `BLOCK_ROWS` rows uses RNG stream
    /// `b + 1` of the seed, so output is independent of thread count and the
    /// prefix agrees across request sizes.
    pub fn sample(&self, n_samples: usize) -> Result<DataMatrix> {
        if n_samples == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let dim = self.dim();
        let mut values = vec![0.0; n_samples * dim];
        values
            .par_chunks_mut(BLOCK_ROWS * dim)
            .enumerate()
            .for_each(|(block, chunk)| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(block as u64 + 1);
                let mut scratch = Vec::new();
                for row in chunk.chunks_mut(dim) {
                    self.core.draw_into(&mut rng, row, &mut scratch);
                    for (v, &s) in row.iter_mut().zip(&self.scales) {
                        *v *= s;
                    }
                }
            });
        DataMatrix::new(n_samples, dim, values)
    }
}

/// Mix sources through an invertible matrix: row `r` of the output is
/// `A s_r`. Rejects matrices with condition number at or above `1e12`.
pub fn mix(s: &DataMatrix, a: &DMatrix<f64>) -> Result<DataMatrix> {
    let n = s.n_features();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "mixing matrix is {}x{}, sources have {n} coordinates",
            a.nrows(),
            a.ncols()
        )));
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin.is_nan() || smin <= 0.0 || smax / smin >= 1e12 {
        return Err(Error::SingularMatrix { max_cond: 1e12 });
    }
    let mut values = vec![0.0; s.n_samples() * n];
    for (r, row) in s.rows().enumerate() {
        let base = r * n;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[(i, j)] * row[j];
            }
            values[base + i] = acc;
        }
    }
    DataMatrix::new(s.n_samples(), n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::cumulant_tensor;
    use crate::subspace::ZeroPattern;

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn column_moment(x: &DataMatrix, col: usize, p: i32) -> f64 {
        x.rows().map(|r| r[col].powi(p)).sum::<f64>() / x.n_samples() as f64
    }

    #[test]
    fn square_weighted_moments() {
        let n = 200_000;
        let x = sample_square_weighted(n, &mut seeded(1));
        // E[z1 z2] = 0 (independence), E[z1^2] = 1/3, E[z2^2] = 1/2
        let cross = x.rows().map(|r| r[0] * r[1]).sum::<f64>() / n as f64;
        assert!(cross.abs() < 5.0 / (n as f64).sqrt());
        assert!((column_moment(&x, 0, 2) - 1.0 / 3.0).abs() < 0.01);
        assert!((column_moment(&x, 1, 2) - 0.5).abs() < 0.01);
    }

    #[test]
    fn l1_weighted_support_and_symmetry() {
        let n = 100_000;
        let x = sample_l1_weighted(n, &mut seeded(2));
        for row in x.rows() {
            assert!(row[0].abs() + row[1].abs() <= 1.0 + 1e-15);
        }
        assert!(column_moment(&x, 0, 1).abs() < 0.01);
        assert!(column_moment(&x, 1, 1).abs() < 0.01);
        // analytic second moments of the l1 law: E[z1^2] = 1/10, E[z2^2] = 3/10
        assert!((column_moment(&x, 0, 2) - 0.1).abs() < 0.01);
        assert!((column_moment(&x, 1, 2) - 0.3).abs() < 0.01);
    }

    /// Two-sample Kolmogorov-Smirnov distance.
    fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (mut i, mut j) = (0usize, 0usize);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            let fa = i as f64 / a.len() as f64;
            let fb = j as f64 / b.len() as f64;
            d = d.max((fa - fb).abs());
        }
        d
    }

    #[test]
    fn alpha_mix_degenerates_to_endpoints() {
        let n = 100_000;
        let zero = SourceSampler::new(
            SourceSpec {
                kind: SourceKind::AlphaMix { alpha: 0.0 },
                standardize: false,
            },
            3,
        )
        .unwrap()
        .sample(n)
        .unwrap();
        let square = sample_square_weighted(n, &mut seeded(33));
        for col in 0..2 {
            let d = ks_distance(
                zero.rows().map(|r| r[col]).collect(),
                square.rows().map(|r| r[col]).collect(),
            );
            assert!(d < 0.01, "alpha=0 col {col}: KS {d}");
        }
        let one = SourceSampler::new(
            SourceSpec {
                kind: SourceKind::AlphaMix { alpha: 1.0 },
                standardize: false,
            },
            4,
        )
        .unwrap()
        .sample(n)
        .unwrap();
        let l1 = sample_l1_weighted(n, &mut seeded(44));
        for col in 0..2 {
            let d = ks_distance(
                one.rows().map(|r| r[col]).collect(),
                l1.rows().map(|r| r[col]).collect(),
            );
            assert!(d < 0.01, "alpha=1 col {col}: KS {d}");
        }
        assert!(SourceSpec::alpha_mix(1.5).validate().is_err());
    }

    #[test]
    fn dirichlet_support_and_mean_abs() {
        let n = 200_000;
        let spec = SourceSpec {
            kind: SourceKind::DirichletL1 { n: 3, alphas: None },
            standardize: false,
        };
        let x = SourceSampler::new(spec, 5).unwrap().sample(n).unwrap();
        let alphas = dirichlet_default_alphas(3);
        let total: f64 = alphas.iter().sum();
        for row in x.rows() {
            assert!(row.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + 1e-12);
        }
        for col in 0..3 {
            assert!(column_moment(&x, col, 1).abs() < 0.01, "odd moment col {col}");
            assert!(column_moment(&x, col, 3).abs() < 0.01, "odd moment col {col}");
            let mean_abs = x.rows().map(|r| r[col].abs()).sum::<f64>() / n as f64;
            let expect = alphas[col] / (total + 1.0);
            assert!(
                (mean_abs - expect).abs() < 5.0 * 0.3 / (n as f64).sqrt() + 0.003,
                "col {col}: {mean_abs} vs {expect}"
            );
        }
    }

    #[test]
    fn dirichlet_n2_matches_l1_law() {
        let n = 100_000;
        let x = SourceSampler::new(
            SourceSpec {
                kind: SourceKind::DirichletL1 { n: 2, alphas: None },
                standardize: false,
            },
            6,
        )
        .unwrap()
        .sample(n)
        .unwrap();
        let l1 = sample_l1_weighted(n, &mut seeded(66));
        for col in 0..2 {
            let d = ks_distance(
                x.rows().map(|r| r[col]).collect(),
                l1.rows().map(|r| r[col]).collect(),
            );
            assert!(d < 0.01, "col {col}: KS {d}");
        }
    }

    #[test]
    fn correlated_energy_constant_scale_is_independent() {
        let n = 400_000;
        let spec = CorrelatedEnergySpec {
            n: 2,
            scales: ScaleModel::Constant(1.0),
            noise: NoiseDist::UniformUnitVar,
        };
        let x = SourceSampler::new(SourceSpec::correlated_energy(spec), 7)
            .unwrap()
            .sample(n)
            .unwrap();
        let k4 = cumulant_tensor(&x, 4).unwrap();
        // independent coordinates: all mixed cumulants vanish
        assert!(k4.entry(&[0, 0, 1, 1]).abs() < 0.02);
        assert!(k4.entry(&[0, 1, 1, 1]).abs() < 0.02);
    }

    #[test]
    fn correlated_energy_shared_scale_cumulant_oracle() {
        // z_i = sigma eps_i, sigma ~ Unif(a, b) shared, eps Rademacher:
        // kappa4_iijj = E[sigma^4] - (E[sigma^2])^2, PMI entries vanish
        let (a, b) = (0.5, 1.5);
        let n = 1_000_000;
        let spec = CorrelatedEnergySpec {
            n: 2,
            scales: ScaleModel::Shared(PositiveDist::Uniform { lo: a, hi: b }),
            noise: NoiseDist::Rademacher,
        };
        let x = SourceSampler::new(SourceSpec::correlated_energy(spec), 8)
            .unwrap()
            .sample(n)
            .unwrap();
        for col in 0..2 {
            assert!(column_moment(&x, col, 1).abs() < 0.01);
        }
        let k4 = cumulant_tensor(&x, 4).unwrap();
        let e2 = (b.powi(3) - a.powi(3)) / (3.0 * (b - a));
        let e4 = (b.powi(5) - a.powi(5)) / (5.0 * (b - a));
        let expect = e4 - e2 * e2;
        assert!(
            (k4.entry(&[0, 0, 1, 1]) - expect).abs() < 0.02,
            "{} vs {expect}",
            k4.entry(&[0, 0, 1, 1])
        );
        assert!(k4.entry(&[0, 1, 1, 1]).abs() < 0.02);
        assert!(k4.entry(&[0, 0, 0, 1]).abs() < 0.02);
    }

    #[test]
    fn tree_broadcast_paths_and_moments() {
        // depth-1 path: single output is tau_root * tau_leaf
        let path = TreeSpec {
            parents: vec![None, Some(0)],
            leaves: vec![1],
            dists: vec![NoiseDist::Rademacher, NoiseDist::UniformUnitVar],
        };
        let x = SourceSampler::new(SourceSpec::tree(path), 9)
            .unwrap()
            .sample(100_000)
            .unwrap();
        // product of a Rademacher and a symmetric uniform: mean 0, variance 1
        assert!(column_moment(&x, 0, 1).abs() < 0.02);
        assert!((column_moment(&x, 0, 2) - 1.0).abs() < 0.02);
        for row in x.rows() {
            assert!(row[0].abs() <= SQRT3 + 1e-12);
        }

        let star = TreeSpec::star(3, NoiseDist::Rademacher);
        let x = SourceSampler::new(SourceSpec::tree(star), 10)
            .unwrap()
            .sample(400_000)
            .unwrap();
        for col in 0..3 {
            assert!(column_moment(&x, col, 1).abs() < 0.01);
        }
        let k4 = cumulant_tensor(&x, 4).unwrap();
        let res = ZeroPattern::Pmi.project_complement(&k4);
        assert!(res.frobenius_norm() < 0.05, "{}", res.frobenius_norm());
    }

    #[test]
    fn tree_validation_rejects_malformed() {
        let cyclic = TreeSpec {
            parents: vec![Some(1), Some(0)],
            leaves: vec![0],
            dists: vec![NoiseDist::Rademacher; 2],
        };
        assert!(cyclic.validate().is_err());
        let two_roots = TreeSpec {
            parents: vec![None, None],
            leaves: vec![1],
            dists: vec![NoiseDist::Rademacher; 2],
        };
        assert!(two_roots.validate().is_err());
        let dup_leaves = TreeSpec {
            parents: vec![None, Some(0)],
            leaves: vec![1, 1],
            dists: vec![NoiseDist::Rademacher; 2],
        };
        assert!(dup_leaves.validate().is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_prefix_stable() {
        let spec = SourceSpec::alpha_mix(0.4);
        let a = SourceSampler::new(spec.clone(), 42).unwrap();
        let b = SourceSampler::new(spec, 42).unwrap();
        let xa = a.sample(70_000).unwrap();
        let xb = b.sample(70_000).unwrap();
        assert_eq!(xa.values(), xb.values());
        // prefix stability across request sizes (block streams)
        let short = a.sample(1000).unwrap();
        assert_eq!(&xa.values()[..2000], short.values());
    }

    #[test]
    fn standardization_yields_unit_variance() {
        for (seed, spec) in [
            (11u64, SourceSpec::alpha_mix(0.6)),
            (12, SourceSpec::dirichlet(3)),
        ] {
            let x = SourceSampler::new(spec, seed).unwrap().sample(1_000_000).unwrap();
            for col in 0..x.n_features() {
                let m1 = column_moment(&x, col, 1);
                let var = column_moment(&x, col, 2) - m1 * m1;
                assert!((var - 1.0).abs() < 0.02, "col {col}: var {var}");
            }
        }
    }

    #[test]
    fn mix_identity_and_covariance() {
        let s = sample_square_weighted(50_000, &mut seeded(13));
        let x = mix(&s, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(x.values(), s.values());
        let theta: f64 = 0.7;
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let x = mix(&s, &a).unwrap();
        let cov_s = s.covariance();
        let cov_x = x.covariance();
        let expect = &a * cov_s * a.transpose();
        for i in 0..2 {
            for j in 0..2 {
                assert!((cov_x[(i, j)] - expect[(i, j)]).abs() < 1e-12);
            }
        }
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            mix(&s, &singular),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn pmi_law_checks_at_scale() {
        // PMI-pattern entries of kappa_3 and kappa_4 at N = 10^6, each within
        // five batch standard errors of zero
        let n_total = 1_000_000usize;
        let n_batches = 100;
        let batch = n_total / n_batches;
        let samplers: Vec<(&str, SourceSampler)> = vec![
            ("l1", SourceSampler::new(SourceSpec::l1(), 21).unwrap()),
            (
                "alpha-0.5",
                SourceSampler::new(SourceSpec::alpha_mix(0.5), 22).unwrap(),
            ),
            (
                "dirichlet-3",
                SourceSampler::new(SourceSpec::dirichlet(3), 23).unwrap(),
            ),
            (
                "energy",
                SourceSampler::new(
                    SourceSpec::correlated_energy(CorrelatedEnergySpec {
                        n: 2,
                        scales: ScaleModel::Shared(PositiveDist::Uniform { lo: 0.5, hi: 1.5 }),
                        noise: NoiseDist::StdGaussian,
                    }),
                    24,
                )
                .unwrap(),
            ),
            (
                "tree",
                SourceSampler::new(SourceSpec::tree(TreeSpec::star(2, NoiseDist::Rademacher)), 25)
                    .unwrap(),
            ),
        ];
        for (name, sampler) in samplers {
            let x = sampler.sample(n_total).unwrap();
            for d in [3usize, 4] {
                let full = cumulant_tensor(&x, d).unwrap();
                let pattern = ZeroPattern::Pmi.constrained_indices(x.n_features(), d).unwrap();
                // batch replicates for the standard error of each entry
                let mut batch_entries: Vec<Vec<f64>> = vec![Vec::new(); pattern.len()];
                for bidx in 0..n_batches {
                    let rows: Vec<Vec<f64>> = (bidx * batch..(bidx + 1) * batch)
                        .map(|r| x.row(r).to_vec())
                        .collect();
                    let xb = DataMatrix::from_rows(rows).unwrap();
                    let kb = cumulant_tensor(&xb, d).unwrap();
                    for (slot, idx) in batch_entries.iter_mut().zip(&pattern) {
                        slot.push(kb.entry(idx));
                    }
                }
                for (idx, entries) in pattern.iter().zip(&batch_entries) {
                    let mean = entries.iter().sum::<f64>() / entries.len() as f64;
                    let var = entries.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        / (entries.len() - 1) as f64;
                    let se = (var / entries.len() as f64).sqrt();
                    let value = full.entry(idx);
                    assert!(
                        value.abs() <= 5.0 * se + 1e-12,
                        "{name} d={d} idx {idx:?}: {value} vs 5se {}",
                        5.0 * se
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_mix_is_pmi_for_all_alpha() {
        for (k, alpha) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
            let x = SourceSampler::new(SourceSpec::alpha_mix(*alpha), 30 + k as u64)
                .unwrap()
                .sample(400_000)
                .unwrap();
            let k4 = cumulant_tensor(&x, 4).unwrap();
            let res = ZeroPattern::Pmi.project_complement(&k4).frobenius_norm();
            assert!(res < 0.02, "alpha={alpha}: residual {res}");
        }
    }
}
