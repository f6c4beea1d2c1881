//! Clustering similarity measures.
//!
//! All logarithms are natural. Normalized measures are base-invariant;
//! unnormalized mutual information and RMI are in nats.
//!
//! Degenerate denominators never produce NaN: the result is flagged
//! `defined = false` and carries the conventional value 1 when the two
//! labelings describe the same partition and 0 otherwise.

mod expected;
mod omega;

use std::fmt;
use std::str::FromStr;

pub use expected::{expected_mi_from_marginals, expected_mi_permutation};
pub use omega::{
    exact_feasible, log_omega, log_omega_approx, log_omega_exact, omega_exact, OmegaMethod,
    OmegaPolicy, EXACT_MAX_DIM, EXACT_MAX_N,
};

use crate::partition::{
    contingency, pair_stats_bruteforce, pair_stats_from_table, ContingencyTable, Labeling,
    PairStats,
};
use crate::{Error, Result};

const DEGENERATE: f64 = 1e-12;

/// The similarity measures the toolkit reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Nmi,
    Ami,
    Ri,
    Ari,
    Rmi,
    ResMi,
}

impl Measure {
    /// The five measures compared in the experiments, in report order.
    pub const COMPARED: [Measure; 5] = [
        Measure::Nmi,
        Measure::Ami,
        Measure::Ari,
        Measure::Rmi,
        Measure::ResMi,
    ];

    pub const ALL: [Measure; 6] = [
        Measure::Nmi,
        Measure::Ami,
        Measure::Ri,
        Measure::Ari,
        Measure::Rmi,
        Measure::ResMi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Nmi => "NMI",
            Measure::Ami => "AMI",
            Measure::Ri => "RI",
            Measure::Ari => "ARI",
            Measure::Rmi => "RMI",
            Measure::ResMi => "ResMI",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown measure {s:?}")))
    }
}

/// Denominator used to normalize mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NmiNormalization {
    /// Arithmetic mean of the two entropies.
    #[default]
    Average,
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub measure: Measure,
    pub value: f64,
    /// False when the measure's denominator vanished and `value` is the
    /// conventional fallback.
    pub defined: bool,
    /// For RMI, how `ln Omega` was obtained.
    pub omega: Option<OmegaMethod>,
}

impl MeasureResult {
    fn defined(measure: Measure, value: f64) -> Self {
        Self {
            measure,
            value,
            defined: true,
            omega: None,
        }
    }

    fn fallback(measure: Measure, identical: bool) -> Self {
        Self {
            measure,
            value: if identical { 1.0 } else { 0.0 },
            defined: false,
            omega: None,
        }
    }
}

/// Entropy of a Bernoulli(`q`) variable in nats.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&q) || q.is_nan() {
        return Err(Error::ProbabilityOutOfRange(q));
    }
    let q = q.clamp(0.0, 1.0);
    if q == 0.0 || q == 1.0 {
        return Ok(0.0);
    }
    Ok(-q * q.ln() - (1.0 - q) * (1.0 - q).ln())
}

fn h_b(q: f64) -> f64 {
    binary_entropy(q).expect("pair probabilities lie in [0, 1]")
}

/// Mutual information (nats) of the empirical joint distribution of `t`.
///
/// Evaluated as `H(f) + H(g) - H(f, g)`, which depends only on the multisets
/// of counts; for two labelings of the same partition it returns exactly the
/// common entropy. The result is clamped to `[0, min(H(f), H(g))]`.
pub fn mutual_information(t: &ContingencyTable) -> f64 {
    let hf = t.row_entropy();
    let hg = t.col_entropy();
    let mi = hf + hg - t.joint_entropy();
    mi.clamp(0.0, hf.min(hg))
}

pub fn nmi(t: &ContingencyTable, norm: NmiNormalization) -> MeasureResult {
    let hf = t.row_entropy();
    let hg = t.col_entropy();
    let denominator = match norm {
        NmiNormalization::Average => 0.5 * (hf + hg),
        NmiNormalization::Max => hf.max(hg),
        NmiNormalization::Min => hf.min(hg),
    };
    if denominator <= DEGENERATE {
        return MeasureResult::fallback(Measure::Nmi, t.is_identity_up_to_relabeling());
    }
    let value = (mutual_information(t) / denominator).clamp(0.0, 1.0);
    MeasureResult::defined(Measure::Nmi, value)
}

/// Adjusted mutual information with the arithmetic-mean normalization.
pub fn ami(t: &ContingencyTable) -> Result<MeasureResult> {
    let expected = expected_mi_permutation(t)?;
    let mean_entropy = 0.5 * (t.row_entropy() + t.col_entropy());
    let denominator = mean_entropy - expected;
    if denominator <= DEGENERATE {
        return Ok(MeasureResult::fallback(
            Measure::Ami,
            t.is_identity_up_to_relabeling(),
        ));
    }
    let value = (mutual_information(t) - expected) / denominator;
    Ok(MeasureResult::defined(Measure::Ami, value))
}

pub fn rand_index(p: &PairStats) -> MeasureResult {
    let value = (p.n11 + p.n00) as f64 / p.total_pairs() as f64;
    MeasureResult::defined(Measure::Ri, value)
}

/// Adjusted Rand index, evaluated in exact integer arithmetic up to the final
/// division.
pub fn ari(p: &PairStats) -> MeasureResult {
    let total = p.total_pairs() as i128;
    let same_f = p.same_f() as i128;
    let same_g = p.same_g() as i128;
    let numerator = 2 * (p.n11 as i128 * total - same_f * same_g);
    let denominator = (same_f + same_g) * total - 2 * same_f * same_g;
    if denominator == 0 {
        return MeasureResult::fallback(Measure::Ari, same_f == same_g);
    }
    MeasureResult::defined(Measure::Ari, numerator as f64 / denominator as f64)
}

/// Reduced mutual information `I - ln(Omega) / n` in nats.
pub fn rmi_unnormalized(t: &ContingencyTable, policy: OmegaPolicy) -> Result<(f64, OmegaMethod)> {
    let (log_omega, method) = log_omega(t.row_sums(), t.col_sums(), policy)?;
    Ok((mutual_information(t) - log_omega / t.n() as f64, method))
}

/// RMI of a labeling with itself, from its cluster sizes.
fn rmi_self(sizes: &[u64], n: u64, policy: OmegaPolicy) -> Result<(f64, OmegaMethod)> {
    let (log_omega, method) = log_omega(sizes, sizes, policy)?;
    let entropy = crate::partition::marginal_entropy(sizes, n)?;
    Ok((entropy - log_omega / n as f64, method))
}

/// Reduced mutual information. The normalized form divides by the mean of
/// the two self-similarities, `RMI(f;g) / (RMI(f;f)/2 + RMI(g;g)/2)`.
pub fn rmi(t: &ContingencyTable, normalized: bool, policy: OmegaPolicy) -> Result<MeasureResult> {
    let (value, method) = rmi_unnormalized(t, policy)?;
    if !normalized {
        return Ok(MeasureResult {
            omega: Some(method),
            ..MeasureResult::defined(Measure::Rmi, value)
        });
    }
    let (self_f, method_f) = rmi_self(t.row_sums(), t.n(), policy)?;
    let (self_g, method_g) = rmi_self(t.col_sums(), t.n(), policy)?;
    let combined = if [method, method_f, method_g].contains(&OmegaMethod::Approximate) {
        OmegaMethod::Approximate
    } else {
        OmegaMethod::Exact
    };
    let denominator = 0.5 * (self_f + self_g);
    let result = if denominator <= DEGENERATE {
        MeasureResult::fallback(Measure::Rmi, t.is_identity_up_to_relabeling())
    } else {
        MeasureResult::defined(Measure::Rmi, value / denominator)
    };
    Ok(MeasureResult {
        omega: Some(combined),
        ..result
    })
}

/// Mutual information between the pair indicators of `f` and `g`, via the
/// conditional decomposition
/// `h(q_f) - [q_g h(q_f|G) + (1 - q_g) h(q_f|not G)]`.
pub fn resmi_numerator(p: &PairStats) -> f64 {
    let conditional =
        p.q_g * p.q_f_given_g.map_or(0.0, h_b) + (1.0 - p.q_g) * p.q_f_given_not_g.map_or(0.0, h_b);
    h_b(p.q_f) - conditional
}

/// Resampled mutual information: the normalized mutual information between
/// the indicators "a random pair shares a label under `f`" and "... under `g`".
pub fn resmi(p: &PairStats) -> MeasureResult {
    let denominator = 0.5 * (h_b(p.q_f) + h_b(p.q_g));
    if denominator <= DEGENERATE {
        // Both indicators are constant; they coincide iff both are the same
        // constant.
        return MeasureResult::fallback(Measure::ResMi, p.same_f() == p.same_g());
    }
    let value = (resmi_numerator(p).max(0.0) / denominator).min(1.0);
    MeasureResult::defined(Measure::ResMi, value)
}

/// Reference value for [`resmi_numerator`]: enumerate all pairs, build the
/// 2x2 table of the two indicators and apply the mutual-information sum
/// directly.
pub fn resmi_indicator_oracle(f: &Labeling, g: &Labeling) -> Result<f64> {
    let p = pair_stats_bruteforce(f, g)?;
    let total = p.total_pairs() as f64;
    // joint[f joined?][g joined?], index 0 = joined
    let joint = [[p.n11, p.n10], [p.n01, p.n00]];
    let f_marg = [p.n11 + p.n10, p.n01 + p.n00];
    let g_marg = [p.n11 + p.n01, p.n10 + p.n00];
    let mut mi = 0.0;
    for (fi, row) in joint.iter().enumerate() {
        for (gi, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let pj = count as f64 / total;
            let pf = f_marg[fi] as f64 / total;
            let pg = g_marg[gi] as f64 / total;
            mi += pj * (pj / (pf * pg)).ln();
        }
    }
    Ok(mi)
}

/// Options shared by multi-measure evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeasureOptions {
    pub nmi: NmiNormalization,
    pub omega: OmegaPolicy,
    /// Report RMI unnormalized (nats) instead of normalized.
    pub rmi_unnormalized: bool,
}

/// Contingency table and pair statistics of one labeling pair, from which any
/// measure can be evaluated.
#[derive(Debug, Clone)]
pub struct Comparison {
    table: ContingencyTable,
    pairs: PairStats,
}

impl Comparison {
    pub fn new(f: &Labeling, g: &Labeling) -> Result<Self> {
        let table = contingency(f, g)?;
        let pairs = pair_stats_from_table(&table)?;
        Ok(Self { table, pairs })
    }

    pub fn from_table(table: ContingencyTable) -> Result<Self> {
        let pairs = pair_stats_from_table(&table)?;
        Ok(Self { table, pairs })
    }

    pub fn table(&self) -> &ContingencyTable {
        &self.table
    }

    pub fn pairs(&self) -> &PairStats {
        &self.pairs
    }

    pub fn evaluate(&self, measure: Measure, opts: &MeasureOptions) -> Result<MeasureResult> {
        Ok(match measure {
            Measure::Nmi => nmi(&self.table, opts.nmi),
            Measure::Ami => ami(&self.table)?,
            Measure::Ri => rand_index(&self.pairs),
            Measure::Ari => ari(&self.pairs),
            Measure::Rmi => rmi(&self.table, !opts.rmi_unnormalized, opts.omega)?,
            Measure::ResMi => resmi(&self.pairs),
        })
    }
}

/// Evaluates one measure for a labeling pair.
pub fn compare(
    f: &Labeling,
    g: &Labeling,
    measure: Measure,
    opts: &MeasureOptions,
) -> Result<MeasureResult> {
    Comparison::new(f, g)?.evaluate(measure, opts)
}
