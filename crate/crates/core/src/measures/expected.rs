//! Expected mutual information under the permutation model.
//!
//! With row and column marginals fixed, each cell count of a uniformly
//! shuffled labeling is hypergeometric. The expectation of the mutual
//! information is the sum over cells and feasible cell values of the cell's
//! MI contribution weighted by its hypergeometric probability. Probabilities
//! are evaluated in the log domain from a log-factorial table.

use std::collections::BTreeMap;

use crate::partition::ContingencyTable;
use crate::{Error, Result};

/// `ln k!` for `k = 0..=n`.
pub(crate) struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub(crate) fn up_to(n: u64) -> Self {
        let mut table = Vec::with_capacity(n as usize + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self(table)
    }

    #[inline]
    pub(crate) fn get(&self, k: u64) -> f64 {
        self.0[k as usize]
    }
}

fn multiplicities(sums: &[u64]) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for &s in sums {
        *out.entry(s).or_insert(0u64) += 1;
    }
    out
}

/// E[I] in nats for a random table with the marginals of `t`.
pub fn expected_mi_permutation(t: &ContingencyTable) -> Result<f64> {
    expected_mi_from_marginals(t.row_sums(), t.col_sums())
}

pub fn expected_mi_from_marginals(row_sums: &[u64], col_sums: &[u64]) -> Result<f64> {
    let n: u64 = row_sums.iter().sum();
    let n_cols: u64 = col_sums.iter().sum();
    if n != n_cols {
        return Err(Error::InconsistentMarginals {
            rows: n,
            cols: n_cols,
        });
    }
    if n == 0 {
        return Err(Error::ZeroTotal);
    }
    let lf = LogFactorials::up_to(n);
    let nf = n as f64;
    let rows = multiplicities(row_sums);
    let cols = multiplicities(col_sums);

    let mut total = 0.0f64;
    for (&a, &ka) in &rows {
        for (&b, &kb) in &cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            // Constant part of the hypergeometric log-probability.
            let base = lf.get(a) + lf.get(b) + lf.get(n - a) + lf.get(n - b) - lf.get(n);
            let mut cell = 0.0f64;
            for nij in lo..=hi {
                let log_p = base
                    - lf.get(nij)
                    - lf.get(a - nij)
                    - lf.get(b - nij)
                    - lf.get(n + nij - a - b);
                let x = nij as f64;
                let contribution = (x / nf) * (nf * x / (a as f64 * b as f64)).ln();
                cell += contribution * log_p.exp();
            }
            total += cell * (ka * kb) as f64;
        }
    }
    if !total.is_finite() {
        return Err(Error::NumericOverflow("expected mutual information"));
    }
    Ok(total.max(0.0))
}
