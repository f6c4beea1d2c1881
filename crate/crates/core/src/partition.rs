//! Labelings, contingency tables and pair statistics.
//!
//! A [`Labeling`] is always compacted: its labels are `0..M` in order of first
//! appearance, so no cluster is empty. All counts are exact integers and
//! probabilities are only formed at the last step.

use std::collections::HashMap;
use std::hash::Hash;

use crate::{Error, Result};

/// Assignment of `n` objects to `M` non-empty clusters labeled `0..M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling {
    labels: Vec<usize>,
    num_clusters: usize,
}

/// Canonicalizes arbitrary label values into a [`Labeling`] by first-appearance
/// order.
pub fn make_labeling<T, I>(raw_labels: I) -> Result<Labeling>
where
    T: Hash + Eq,
    I: IntoIterator<Item = T>,
{
    let mut index: HashMap<T, usize> = HashMap::new();
    let labels: Vec<usize> = raw_labels
        .into_iter()
        .map(|value| {
            let next = index.len();
            *index.entry(value).or_insert(next)
        })
        .collect();
    if labels.is_empty() {
        return Err(Error::EmptyLabeling);
    }
    Ok(Labeling {
        labels,
        num_clusters: index.len(),
    })
}

impl Labeling {
    /// Compacts integer labels. Equivalent to [`make_labeling`].
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        make_labeling(labels.iter().copied())
    }

    /// Every object in its own cluster.
    pub fn singletons(n: usize) -> Result<Self> {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// All objects in one cluster.
    pub fn single_cluster(n: usize) -> Result<Self> {
        Self::from_labels(&vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Cluster sizes indexed by label.
    pub fn cluster_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.num_clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Member lists indexed by label, each in increasing object order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Restricts the labeling to the given objects (in the given order) and
    /// recompacts.
    pub fn restrict(&self, objects: &[usize]) -> Result<Self> {
        make_labeling(objects.iter().map(|&i| self.labels[i]))
    }
}

/// Parses the plain-text label format: one token per line, line `i` is the
/// label of object `i`. Blank lines and lines starting with `#` are skipped.
pub fn parse_label_file(text: &str) -> Result<Labeling> {
    let mut tokens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let token = parts.next().unwrap_or_default();
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected a single label token, got {trimmed:?}"),
            });
        }
        tokens.push(token.to_owned());
    }
    make_labeling(tokens)
}

/// Joint count table of two labelings over the same objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

pub fn contingency(f: &Labeling, g: &Labeling) -> Result<ContingencyTable> {
    if f.n() != g.n() {
        return Err(Error::LengthMismatch {
            left: f.n(),
            right: g.n(),
        });
    }
    let rows = f.num_clusters();
    let cols = g.num_clusters();
    let mut counts = vec![0u64; rows * cols];
    for (&a, &b) in f.labels().iter().zip(g.labels()) {
        counts[a * cols + b] += 1;
    }
    Ok(ContingencyTable {
        rows,
        cols,
        counts,
        row_sums: f.cluster_sizes(),
        col_sums: g.cluster_sizes(),
        n: f.n() as u64,
    })
}

impl ContingencyTable {
    /// Builds a table from a dense row-major grid. Rows or columns that sum
    /// to zero are rejected.
    pub fn from_counts(grid: &[Vec<u64>]) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyLabeling);
        }
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged contingency grid".into()));
        }
        let counts: Vec<u64> = grid.iter().flatten().copied().collect();
        let row_sums: Vec<u64> = grid.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..cols).map(|c| grid.iter().map(|r| r[c]).sum()).collect();
        if row_sums.iter().chain(&col_sums).any(|&s| s == 0) {
            return Err(Error::InvalidParameter(
                "contingency table has an empty row or column".into(),
            ));
        }
        let n = row_sums.iter().sum();
        Ok(Self {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            n,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// All cell counts, row-major.
    pub fn cells(&self) -> &[u64] {
        &self.counts
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0u64; self.counts.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                counts[c * self.rows + r] = self.get(r, c);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            counts,
            row_sums: self.col_sums.clone(),
            col_sums: self.row_sums.clone(),
            n: self.n,
        }
    }

    /// True when both labelings describe the same partition, i.e. every row
    /// and every column holds exactly one non-zero cell.
    pub fn is_identity_up_to_relabeling(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let mut col_hits = vec![0usize; self.cols];
        for r in 0..self.rows {
            let mut hits = 0;
            for (c, col_hit) in col_hits.iter_mut().enumerate() {
                if self.get(r, c) > 0 {
                    hits += 1;
                    *col_hit += 1;
                }
            }
            if hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }

    pub fn row_entropy(&self) -> f64 {
        entropy_of_counts(&self.row_sums, self.n)
    }

    pub fn col_entropy(&self) -> f64 {
        entropy_of_counts(&self.col_sums, self.n)
    }

    /// Entropy of the joint distribution over cells.
    pub fn joint_entropy(&self) -> f64 {
        entropy_of_counts(&self.counts, self.n)
    }
}

/// Shannon entropy (nats) of the empirical distribution `sums / total`.
pub fn marginal_entropy(sums: &[u64], total: u64) -> Result<f64> {
    if total == 0 {
        return Err(Error::ZeroTotal);
    }
    let actual: u64 = sums.iter().sum();
    if actual != total {
        return Err(Error::InconsistentMarginals {
            rows: actual,
            cols: total,
        });
    }
    Ok(entropy_of_counts(sums, total))
}

// Summing sorted terms makes the result depend only on the multiset of counts,
// so two tables describing the same partition get bitwise-equal entropies.
fn entropy_of_counts(counts: &[u64], total: u64) -> f64 {
    let mut nonzero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    nonzero.sort_unstable();
    let total = total as f64;
    nonzero
        .into_iter()
        .map(|c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

pub(crate) fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Pair-level agreement counts between two labelings.
///
/// `n11` counts pairs joined by both labelings, `n10` pairs joined by `f`
/// only, `n01` pairs joined by `g` only, and `n00` pairs separated by both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStats {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
    /// Probability that a random pair is joined by `f`.
    pub q_f: f64,
    /// Probability that a random pair is joined by `g`.
    pub q_g: f64,
    /// P(joined by `f` | joined by `g`); `None` when no pair is joined by `g`.
    pub q_f_given_g: Option<f64>,
    /// P(joined by `f` | separated by `g`); `None` when every pair is joined by `g`.
    pub q_f_given_not_g: Option<f64>,
}

impl PairStats {
    pub fn from_counts(n11: u64, n10: u64, n01: u64, n00: u64) -> Result<Self> {
        let total = n11 + n10 + n01 + n00;
        if total == 0 {
            return Err(Error::TooFewObjects);
        }
        let t = total as f64;
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        Ok(Self {
            n11,
            n10,
            n01,
            n00,
            q_f: (n11 + n10) as f64 / t,
            q_g: (n11 + n01) as f64 / t,
            q_f_given_g: ratio(n11, n11 + n01),
            q_f_given_not_g: ratio(n10, n10 + n00),
        })
    }

    pub fn total_pairs(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    /// Pairs joined by `f`.
    pub fn same_f(&self) -> u64 {
        self.n11 + self.n10
    }

    /// Pairs joined by `g`.
    pub fn same_g(&self) -> u64 {
        self.n11 + self.n01
    }

    /// Statistics with the roles of `f` and `g` exchanged.
    pub fn swapped(&self) -> Self {
        Self::from_counts(self.n11, self.n01, self.n10, self.n00)
            .expect("swapping preserves a non-empty pair total")
    }
}

/// Pair statistics from the contingency table in `O(M M')`.
pub fn pair_stats(f: &Labeling, g: &Labeling) -> Result<PairStats> {
    let table = contingency(f, g)?;
    pair_stats_from_table(&table)
}

pub fn pair_stats_from_table(table: &ContingencyTable) -> Result<PairStats> {
    if table.n() < 2 {
        return Err(Error::TooFewObjects);
    }
    let total = choose2(table.n());
    let n11: u64 = table.cells().iter().map(|&c| choose2(c)).sum();
    let same_f: u64 = table.row_sums().iter().map(|&c| choose2(c)).sum();
    let same_g: u64 = table.col_sums().iter().map(|&c| choose2(c)).sum();
    let n10 = same_f - n11;
    let n01 = same_g - n11;
    let n00 = total - n11 - n10 - n01;
    PairStats::from_counts(n11, n10, n01, n00)
}

/// Pair statistics by direct enumeration of all `C(n, 2)` pairs.
///
/// Quadratic; kept as the reference the combinatorial path is checked against.
pub fn pair_stats_bruteforce(f: &Labeling, g: &Labeling) -> Result<PairStats> {
    if f.n() != g.n() {
        return Err(Error::LengthMismatch {
            left: f.n(),
            right: g.n(),
        });
    }
    if f.n() < 2 {
        return Err(Error::TooFewObjects);
    }
    let (mut n11, mut n10, mut n01, mut n00) = (0u64, 0u64, 0u64, 0u64);
    let (fl, gl) = (f.labels(), g.labels());
    for i in 1..f.n() {
        for j in 0..i {
            match (fl[i] == fl[j], gl[i] == gl[j]) {
                (true, true) => n11 += 1,
                (true, false) => n10 += 1,
                (false, true) => n01 += 1,
                (false, false) => n00 += 1,
            }
        }
    }
    PairStats::from_counts(n11, n10, n01, n00)
}
