//! Counting non-negative integer matrices with prescribed margins.
//!
//! `ln Omega(rows, cols)` is the correction term of reduced mutual
//! information. The exact count is a dynamic program over columns whose state
//! is the vector of remaining row capacities; it is only feasible for small
//! tables. Larger instances use the effective-columns estimate, a Dirichlet-
//! multinomial approximation that is exact whenever one side of the table is
//! all ones.

use std::collections::HashMap;

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Largest `n` for which the exact count is attempted.
pub const EXACT_MAX_N: u64 = 20;
/// Largest number of rows or columns for which the exact count is attempted.
pub const EXACT_MAX_DIM: usize = 6;

/// Which route produced a `ln Omega` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OmegaMethod {
    Exact,
    Approximate,
}

impl OmegaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OmegaMethod::Exact => "exact",
            OmegaMethod::Approximate => "approximate",
        }
    }
}

/// How to choose between the exact and approximate count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OmegaPolicy {
    /// Exact when [`exact_feasible`], approximate otherwise.
    #[default]
    Auto,
    /// Always exact; fails on instances that are too large.
    Exact,
    Approximate,
}

fn check_marginals(row_sums: &[u64], col_sums: &[u64]) -> Result<u64> {
    let rows: u64 = row_sums.iter().sum();
    let cols: u64 = col_sums.iter().sum();
    if rows != cols {
        return Err(Error::InconsistentMarginals { rows, cols });
    }
    if rows == 0 {
        return Err(Error::ZeroTotal);
    }
    Ok(rows)
}

pub fn exact_feasible(row_sums: &[u64], col_sums: &[u64]) -> bool {
    let n: u64 = row_sums.iter().sum();
    n <= EXACT_MAX_N && row_sums.len() <= EXACT_MAX_DIM && col_sums.len() <= EXACT_MAX_DIM
}

/// Exact `Omega` as an integer.
pub fn omega_exact(row_sums: &[u64], col_sums: &[u64]) -> Result<u128> {
    let n = check_marginals(row_sums, col_sums)?;
    if !exact_feasible(row_sums, col_sums) {
        return Err(Error::ExactOmegaInfeasible {
            n,
            rows: row_sums.len(),
            cols: col_sums.len(),
        });
    }
    let mut states: HashMap<Vec<u64>, u128> = HashMap::new();
    states.insert(row_sums.to_vec(), 1);
    for &col in col_sums {
        let mut next: HashMap<Vec<u64>, u128> = HashMap::new();
        for (remaining, ways) in &states {
            let mut scratch = remaining.clone();
            fill_column(&mut scratch, 0, col, &mut |state| {
                *next.entry(state.to_vec()).or_insert(0) += ways;
            });
        }
        states = next;
    }
    Ok(states
        .into_iter()
        .filter(|(s, _)| s.iter().all(|&r| r == 0))
        .map(|(_, w)| w)
        .sum())
}

// Distributes `left` units of the current column over rows `row..`, never
// exceeding a row's remaining capacity, and reports each resulting state.
fn fill_column(remaining: &mut [u64], row: usize, left: u64, emit: &mut impl FnMut(&[u64])) {
    if row + 1 == remaining.len() {
        if left <= remaining[row] {
            remaining[row] -= left;
            emit(remaining);
            remaining[row] += left;
        }
        return;
    }
    let capacity_after: u64 = remaining[row + 1..].iter().sum();
    let lo = left.saturating_sub(capacity_after);
    let hi = left.min(remaining[row]);
    for take in lo..=hi {
        remaining[row] -= take;
        fill_column(remaining, row + 1, left - take, emit);
        remaining[row] += take;
    }
}

pub fn log_omega_exact(row_sums: &[u64], col_sums: &[u64]) -> Result<f64> {
    let count = omega_exact(row_sums, col_sums)?;
    Ok((count as f64).ln())
}

fn ln_choose_real(top: f64, bottom: f64) -> f64 {
    ln_gamma(top + 1.0) - ln_gamma(bottom + 1.0) - ln_gamma(top - bottom + 1.0)
}

fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// Effective-columns estimate with `cols` playing the role of the columns.
fn effective_columns(row_sums: &[u64], col_sums: &[u64], n: u64) -> f64 {
    let m = row_sums.len() as f64;
    if row_sums.len() == 1 || col_sums.len() == 1 {
        return 0.0;
    }
    let sum_sq: u64 = col_sums.iter().map(|&c| c * c).sum();
    if sum_sq == n {
        // Every column is a single object: the count is a multinomial.
        return ln_factorial(n) - row_sums.iter().map(|&r| ln_factorial(r)).sum::<f64>();
    }
    let nf = n as f64;
    let k = col_sums.len() as f64;
    let sum_sq = sum_sq as f64;
    let alpha = (nf * nf - nf + (nf * nf - sum_sq) / k) / (sum_sq - nf);
    let rows: f64 = row_sums
        .iter()
        .map(|&r| ln_gamma(r as f64 + alpha) - ln_gamma(alpha) - ln_factorial(r))
        .sum();
    let cols: f64 = col_sums
        .iter()
        .map(|&c| ln_choose_real(c as f64 + m - 1.0, m - 1.0))
        .sum();
    rows + cols - ln_choose_real(nf + m * alpha - 1.0, m * alpha - 1.0)
}

/// Approximate `ln Omega`.
///
/// The effective-columns estimate depends on which side plays the columns
/// and tends to overcount, so both orientations are evaluated and the smaller
/// one is kept. This also makes the value symmetric in its arguments.
pub fn log_omega_approx(row_sums: &[u64], col_sums: &[u64]) -> Result<f64> {
    let n = check_marginals(row_sums, col_sums)?;
    // Sorted margins make the value independent of label order.
    let mut rows = row_sums.to_vec();
    let mut cols = col_sums.to_vec();
    rows.sort_unstable();
    cols.sort_unstable();
    let value = effective_columns(&rows, &cols, n).min(effective_columns(&cols, &rows, n));
    if !value.is_finite() {
        return Err(Error::NumericOverflow("Omega approximation"));
    }
    Ok(value.max(0.0))
}

/// `ln Omega` under `policy`, with the route that was used.
pub fn log_omega(
    row_sums: &[u64],
    col_sums: &[u64],
    policy: OmegaPolicy,
) -> Result<(f64, OmegaMethod)> {
    let exact = match policy {
        OmegaPolicy::Exact => true,
        OmegaPolicy::Approximate => false,
        OmegaPolicy::Auto => exact_feasible(row_sums, col_sums),
    };
    if exact {
        Ok((log_omega_exact(row_sums, col_sums)?, OmegaMethod::Exact))
    } else {
        Ok((
            log_omega_approx(row_sums, col_sums)?,
            OmegaMethod::Approximate,
        ))
    }
}
