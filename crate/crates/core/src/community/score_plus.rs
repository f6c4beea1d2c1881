use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::graph::Graph;
use super::kmeans::kmeans;
use crate::experiment::{self, ExperimentKind, ExperimentOutput, RunValue};
use crate::measures::{Comparison, Measure, MeasureOptions};
use crate::partition::Labeling;
use crate::rng::RngSeed;
use crate::{Error, Result};

/// Entries of the leading eigenvector below this magnitude are treated as zero.
pub const VANISHING_ENTRY: f64 = 1e-12;
const DEGENERATE_EIGENVALUE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePlusParams {
    pub c: usize,
    pub ridge_delta: f64,
    pub eigengap_threshold: f64,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub seed: RngSeed,
}

impl ScorePlusParams {
    pub fn new(c: usize) -> Self {
        Self {
            c,
            ridge_delta: 0.1,
            eigengap_threshold: 0.1,
            kmeans_restarts: 20,
            kmeans_max_iters: 200,
            seed: RngSeed::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.c < 2 {
            return Err(Error::InvalidParameter(format!(
                "c = {} must be at least 2",
                self.c
            )));
        }
        if !(self.ridge_delta >= 0.0 && self.ridge_delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ridge_delta = {} must be finite and non-negative",
                self.ridge_delta
            )));
        }
        if !(self.eigengap_threshold > 0.0 && self.eigengap_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eigengap_threshold = {} must lie in (0, 1)",
                self.eigengap_threshold
            )));
        }
        if self.kmeans_restarts == 0 || self.kmeans_max_iters == 0 {
            return Err(Error::InvalidParameter(
                "k-means restarts and iterations must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "score_plus ridge_delta={} eigengap_threshold={} kmeans_restarts={} kmeans_max_iters={}",
            self.ridge_delta, self.eigengap_threshold, self.kmeans_restarts, self.kmeans_max_iters
        )
    }
}

/// `D_δ^{-1/2} A D_δ^{-1/2}` with `D_δ = D + δ·d̄·I`.
pub fn regularized_matrix(g: &Graph, ridge_delta: f64) -> Result<DMatrix<f64>> {
    let n = g.num_nodes();
    if n == 0 || g.num_edges() == 0 {
        return Err(Error::InvalidParameter("graph has no edges".into()));
    }
    let degrees = g.degrees();
    let mean_degree = 2.0 * g.num_edges() as f64 / n as f64;
    let mut scale = Vec::with_capacity(n);
    for (i, &d) in degrees.iter().enumerate() {
        let reg = d as f64 + ridge_delta * mean_degree;
        if reg <= 0.0 {
            return Err(Error::DisconnectedGraph { node: i });
        }
        scale.push(1.0 / reg.sqrt());
    }
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        let w = scale[u] * scale[v];
        l[(u, v)] = w;
        l[(v, u)] = w;
    }
    Ok(l)
}

/// Eigendecomposition of the regularized adjacency matrix, ordered by
/// decreasing eigenvalue magnitude. Computed once per graph and shared by
/// every SCORE+ run on it.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    ridge_delta: f64,
    eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    vectors: DMatrix<f64>,
}

impl SpectralEmbedding {
    pub fn new(g: &Graph, ridge_delta: f64) -> Result<Self> {
        let l = regularized_matrix(g, ridge_delta)?;
        let n = l.nrows();
        let eig =
            SymmetricEigen::try_new(l, f64::EPSILON, 10_000 * n.max(10)).ok_or_else(|| {
                Error::Eigensolver("symmetric eigendecomposition did not converge".into())
            })?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (eig.eigenvalues[a], eig.eigenvalues[b]);
            y.abs()
                .total_cmp(&x.abs())
                .then(y.total_cmp(&x))
                .then(a.cmp(&b))
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        align_leading_eigenspace(&eigenvalues, &mut vectors);
        for k in 0..n {
            fix_sign(&mut vectors, k);
        }
        Ok(Self {
            ridge_delta,
            eigenvalues,
            vectors,
        })
    }

    pub fn ridge_delta(&self) -> f64 {
        self.ridge_delta
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// Number of eigenvectors SCORE+ keeps for `c` communities: `c + 1` when
    /// the relative gap `1 - |λ_{c+1}| / |λ_c|` is below the threshold.
    pub fn retained(&self, c: usize, eigengap_threshold: f64) -> usize {
        let n = self.eigenvalues.len();
        if c + 1 > n {
            return c.min(n);
        }
        let lc = self.eigenvalues[c - 1].abs();
        if lc <= 0.0 {
            return c;
        }
        let gap = 1.0 - self.eigenvalues[c].abs() / lc;
        if gap < eigengap_threshold {
            c + 1
        } else {
            c
        }
    }

    /// Rows `R[i][k] = η_{k+1}(i) / η_1(i)` over the retained eigenvectors.
    pub fn ratio_matrix(&self, c: usize, eigengap_threshold: f64) -> Result<Vec<Vec<f64>>> {
        let n = self.eigenvalues.len();
        if c < 2 || c + 1 > n {
            return Err(Error::InvalidParameter(format!(
                "need 2 <= c and c + 1 <= {n} nodes, got c = {c}"
            )));
        }
        let k = self.retained(c, eigengap_threshold);
        let lead = self.vectors.column(0);
        (0..n)
            .map(|i| {
                let d = lead[i];
                if d.abs() < VANISHING_ENTRY {
                    return Err(Error::DisconnectedGraph { node: i });
                }
                Ok((1..k).map(|j| self.vectors[(i, j)] / d).collect())
            })
            .collect()
    }
}

/// When the top eigenvalue is repeated (for example, equal disconnected
/// blocks) the solver may return any basis of its eigenspace. Choose the
/// basis whose first vector is the projection of the all-ones vector, which
/// is non-vanishing on every block.
fn align_leading_eigenspace(eigenvalues: &[f64], vectors: &mut DMatrix<f64>) {
    let n = vectors.nrows();
    let top = eigenvalues[0];
    let s = eigenvalues
        .iter()
        .take_while(|&&l| (l - top).abs() <= DEGENERATE_EIGENVALUE * top.abs().max(1.0))
        .count();
    if s < 2 {
        return;
    }
    let basis = vectors.columns(0, s).into_owned();
    let ones = DVector::from_element(n, 1.0);
    let lead = &basis * (basis.transpose() * &ones);
    let norm = lead.norm();
    if norm < 1e-8 {
        return;
    }
    let mut chosen: Vec<DVector<f64>> = vec![lead / norm];
    for j in 0..s {
        if chosen.len() == s {
            break;
        }
        let mut v = basis.column(j).into_owned();
        for u in &chosen {
            v -= u * u.dot(&v);
        }
        let len = v.norm();
        if len > 1e-8 {
            chosen.push(v / len);
        }
    }
    for (k, v) in chosen.iter().enumerate() {
        vectors.set_column(k, v);
    }
}

/// Makes the largest-magnitude entry (first on ties) positive.
fn fix_sign(vectors: &mut DMatrix<f64>, k: usize) {
    let mut col = vectors.column_mut(k);
    let mut best = 0;
    for i in 1..col.len() {
        if col[i].abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < 0.0 {
        col.neg_mut();
    }
}

/// SCORE+ community detection into exactly `params.c` communities.
pub fn score_plus(g: &Graph, params: &ScorePlusParams) -> Result<Labeling> {
    params.validate()?;
    let embedding = SpectralEmbedding::new(g, params.ridge_delta)?;
    score_plus_with_embedding(&embedding, params)
}

/// SCORE+ using a precomputed decomposition; only k-means depends on the
/// seed.
pub fn score_plus_with_embedding(
    embedding: &SpectralEmbedding,
    params: &ScorePlusParams,
) -> Result<Labeling> {
    params.validate()?;
    if embedding.ridge_delta != params.ridge_delta {
        return Err(Error::InvalidParameter(format!(
            "embedding built with ridge_delta = {}, requested {}",
            embedding.ridge_delta, params.ridge_delta
        )));
    }
    let rows = embedding.ratio_matrix(params.c, params.eigengap_threshold)?;
    let result = kmeans(
        &rows,
        params.c,
        params.kmeans_restarts,
        params.kmeans_max_iters,
        params.seed,
    )?;
    Labeling::from_labels(&result.assignment)
}

/// Seed of run `run` at community count `c`.
pub fn sweep_seed(base: u64, c: usize, run: usize) -> RngSeed {
    RngSeed::new(base, ((c as u64) << 32) | run as u64)
}

/// Compares SCORE+ output against `truth` for every `c` in `c_values`,
/// `runs` times each with distinct k-means seeds.
pub fn sweep_communities(
    g: &Graph,
    truth: &Labeling,
    c_values: &[usize],
    template: &ScorePlusParams,
    runs: usize,
    measures: &[Measure],
    options: &MeasureOptions,
) -> Result<ExperimentOutput> {
    if truth.n() != g.num_nodes() {
        return Err(Error::LengthMismatch {
            left: g.num_nodes(),
            right: truth.n(),
        });
    }
    if runs == 0 || c_values.is_empty() || measures.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one run, one c value and one measure".into(),
        ));
    }
    for &c in c_values {
        ScorePlusParams { c, ..*template }.validate()?;
        if c + 1 > g.num_nodes() {
            return Err(Error::InvalidParameter(format!(
                "c = {c} needs at least {} nodes",
                c + 1
            )));
        }
    }
    let embedding = SpectralEmbedding::new(g, template.ridge_delta)?;
    let cells: Vec<(usize, usize)> = c_values
        .iter()
        .flat_map(|&c| (0..runs).map(move |r| (c, r)))
        .collect();
    let results: Vec<Vec<RunValue>> = cells
        .par_iter()
        .map(|&(c, run)| {
            let params = ScorePlusParams {
                c,
                seed: sweep_seed(template.seed.seed, c, run),
                ..*template
            };
            let fitted = score_plus_with_embedding(&embedding, &params)?;
            let comparison = Comparison::new(truth, &fitted)?;
            measures
                .iter()
                .map(|&measure| {
                    Ok(RunValue {
                        param: c as f64,
                        measure,
                        run,
                        value: comparison.evaluate(measure, options)?.value,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let per_run: Vec<RunValue> = results.into_iter().flatten().collect();

    let mut metadata = vec![
        format!("nodes={} edges={}", g.num_nodes(), g.num_edges()),
        template.describe(),
        format!("seed={}", template.seed.seed),
    ];
    for &c in c_values {
        metadata.push(format!(
            "c={c} retained_eigenvectors={}",
            embedding.retained(c, template.eigengap_threshold)
        ));
    }
    if measures.contains(&Measure::Rmi) {
        metadata.push(experiment::rmi_metadata(truth, options));
    }
    Ok(ExperimentOutput {
        experiment: ExperimentKind::Network,
        records: experiment::aggregate(ExperimentKind::Network, &per_run),
        per_run,
        metadata,
    })
}
