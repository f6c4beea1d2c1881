//! Synthetic experiment runner, result records, CSV and SVG output.
//!
//! A run of an experiment draws one perturbed labeling per (grid point, run)
//! and compares it against the ground truth with every requested measure.
//! Run `r` always uses substream `r` of the configured seed, so results do
//! not depend on thread count or scheduling.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::measures::{Comparison, Measure, MeasureOptions, OmegaPolicy, EXACT_MAX_N};
use crate::partition::Labeling;
use crate::rng::RngSeed;
use crate::synthgen::{self, GroundTruthSpec};
use crate::{Error, Result};

/// CSV header shared by every experiment output.
pub const CSV_HEADER: &str = "experiment,param,measure,mean,std,runs";
/// Header of the per-run debug output.
pub const RUNS_CSV_HEADER: &str = "experiment,param,measure,run,value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    /// Random assignment to `c` clusters.
    A,
    /// Random merging/splitting of the ground truth to `c` clusters.
    B,
    /// Shuffling the labels of a proportion `p` of objects.
    C,
    /// Reassigning a proportion `p` of the objects outside the main cluster
    /// of the asymmetric ground truth.
    D,
    /// Community-count sweep on a network.
    Network,
}

impl ExperimentKind {
    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::A => "a",
            ExperimentKind::B => "b",
            ExperimentKind::C => "c",
            ExperimentKind::D => "d",
            ExperimentKind::Network => "network",
        }
    }

    /// Whether the grid ranges over cluster counts (as opposed to proportions).
    pub fn sweeps_cluster_count(self) -> bool {
        matches!(
            self,
            ExperimentKind::A | ExperimentKind::B | ExperimentKind::Network
        )
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::A => "random assignment to c clusters",
            ExperimentKind::B => "random merging/splitting of ground-truth clusters",
            ExperimentKind::C => "random shuffling of a proportion p of labels",
            ExperimentKind::D => "random reassignment of a proportion p outside the main cluster",
            ExperimentKind::Network => "SCORE+ community detection for varying c",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(ExperimentKind::A),
            "b" => Ok(ExperimentKind::B),
            "c" => Ok(ExperimentKind::C),
            "d" => Ok(ExperimentKind::D),
            "network" => Ok(ExperimentKind::Network),
            other => Err(Error::InvalidParameter(format!(
                "unknown experiment {other:?}"
            ))),
        }
    }
}

/// One aggregated result row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: ExperimentKind,
    pub param: f64,
    pub measure: Measure,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

/// One similarity value from one run, kept for the debug output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunValue {
    pub param: f64,
    pub measure: Measure,
    pub run: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: ExperimentKind,
    pub records: Vec<ExperimentRecord>,
    pub per_run: Vec<RunValue>,
    /// Free-form `key=value` notes written as CSV footer comments.
    pub metadata: Vec<String>,
}

/// Sample mean and sample (n - 1) standard deviation. A single value has
/// standard deviation 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Aggregates per-run values into records sorted by (param, measure).
pub fn aggregate(experiment: ExperimentKind, per_run: &[RunValue]) -> Vec<ExperimentRecord> {
    let mut keys: Vec<(f64, Measure)> = per_run.iter().map(|v| (v.param, v.measure)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(param, measure)| {
            let mut values: Vec<(usize, f64)> = per_run
                .iter()
                .filter(|v| v.param == param && v.measure == measure)
                .map(|v| (v.run, v.value))
                .collect();
            values.sort_by_key(|&(run, _)| run);
            let values: Vec<f64> = values.into_iter().map(|(_, v)| v).collect();
            let (mean, std) = mean_std(&values);
            ExperimentRecord {
                experiment,
                param,
                measure,
                mean,
                std,
                runs: values.len(),
            }
        })
        .collect()
}

/// Configuration of one synthetic experiment.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub runs: usize,
    pub seed: u64,
    pub grid: Vec<f64>,
    pub measures: Vec<Measure>,
    pub options: MeasureOptions,
}

impl SyntheticConfig {
    /// Defaults: n = 1024, 100 runs, seed 0, the default grid and the five
    /// compared measures.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self::with_n(experiment, 1024)
    }

    /// Defaults for `n` objects, including the default grid for that size.
    pub fn with_n(experiment: ExperimentKind, n: usize) -> Self {
        Self {
            experiment,
            n,
            runs: 100,
            seed: 0,
            grid: default_grid(experiment, n),
            measures: Measure::COMPARED.to_vec(),
            options: MeasureOptions::default(),
        }
    }
}

/// Powers of two from 1 to `n` (plus `n` itself) for cluster-count
/// experiments; 0, 0.05, ..., 1 for proportion experiments.
pub fn default_grid(experiment: ExperimentKind, n: usize) -> Vec<f64> {
    if experiment.sweeps_cluster_count() {
        let mut grid = Vec::new();
        let mut c = 1usize;
        while c <= n {
            grid.push(c as f64);
            c *= 2;
        }
        if grid.last() != Some(&(n as f64)) {
            grid.push(n as f64);
        }
        grid
    } else {
        (0..=20).map(|i| i as f64 / 20.0).collect()
    }
}

/// Ground truth used by a synthetic experiment.
pub fn experiment_ground_truth(experiment: ExperimentKind, n: usize) -> Result<Labeling> {
    match experiment {
        ExperimentKind::A | ExperimentKind::B | ExperimentKind::C => {
            synthgen::ground_truth(GroundTruthSpec::equal_32(n))
        }
        ExperimentKind::D => synthgen::ground_truth(GroundTruthSpec::asymmetric(n)),
        ExperimentKind::Network => Err(Error::InvalidParameter(
            "the network sweep has no synthetic ground truth".into(),
        )),
    }
}

fn validate_grid(experiment: ExperimentKind, n: usize, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    for &v in grid {
        let ok = if experiment.sweeps_cluster_count() {
            v.fract() == 0.0 && v >= 1.0 && v <= n as f64
        } else {
            (0.0..=1.0).contains(&v)
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "grid value {v} invalid for experiment {experiment} with n={n}"
            )));
        }
    }
    Ok(())
}

/// Draws the perturbed labeling of one (param, run) cell.
pub fn perturb(
    experiment: ExperimentKind,
    truth: &Labeling,
    param: f64,
    seed: RngSeed,
) -> Result<Labeling> {
    match experiment {
        ExperimentKind::A => synthgen::random_reassign(truth.n(), param as usize, seed),
        ExperimentKind::B => synthgen::merge_split(truth, param as usize, seed),
        ExperimentKind::C => synthgen::shuffle_labels(truth, param, seed),
        ExperimentKind::D => synthgen::shuffle_outside_main(truth, param, truth.label(0), seed),
        ExperimentKind::Network => Err(Error::InvalidParameter(
            "the network sweep is run through community::sweep_communities".into(),
        )),
    }
}

pub fn run_synthetic(cfg: &SyntheticConfig) -> Result<ExperimentOutput> {
    if cfg.runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    if cfg.measures.is_empty() {
        return Err(Error::InvalidParameter("no measures selected".into()));
    }
    validate_grid(cfg.experiment, cfg.n, &cfg.grid)?;
    let truth = experiment_ground_truth(cfg.experiment, cfg.n)?;

    let cells: Vec<(f64, usize)> = cfg
        .grid
        .iter()
        .flat_map(|&p| (0..cfg.runs).map(move |r| (p, r)))
        .collect();
    let results: Vec<Vec<RunValue>> = cells
        .par_iter()
        .map(|&(param, run)| {
            let seed = RngSeed::new(cfg.seed, run as u64);
            let g = perturb(cfg.experiment, &truth, param, seed)?;
            let comparison = Comparison::new(&truth, &g)?;
            cfg.measures
                .iter()
                .map(|&measure| {
                    Ok(RunValue {
                        param,
                        measure,
                        run,
                        value: comparison.evaluate(measure, &cfg.options)?.value,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let per_run: Vec<RunValue> = results.into_iter().flatten().collect();

    let mut metadata = vec![
        format!("n={}", cfg.n),
        format!("seed={}", cfg.seed),
        format!("ground_truth_clusters={}", truth.num_clusters()),
    ];
    if cfg.measures.contains(&Measure::Rmi) {
        metadata.push(rmi_metadata(&truth, &cfg.options));
    }
    Ok(ExperimentOutput {
        experiment: cfg.experiment,
        records: aggregate(cfg.experiment, &per_run),
        per_run,
        metadata,
    })
}

pub(crate) fn rmi_metadata(truth: &Labeling, opts: &MeasureOptions) -> String {
    let route = match opts.omega {
        OmegaPolicy::Exact => "exact",
        OmegaPolicy::Approximate => "approximate",
        OmegaPolicy::Auto if truth.n() as u64 <= EXACT_MAX_N => "auto",
        OmegaPolicy::Auto => "approximate",
    };
    let form = if opts.rmi_unnormalized {
        "unnormalized (nats)"
    } else {
        "normalized"
    };
    format!("rmi_omega={route}; rmi_form={form}")
}

/// Numeric precision of CSV fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Six significant digits.
    #[default]
    Short,
    /// Shortest representation that round-trips.
    Full,
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn format_number(x: f64, precision: Precision) -> String {
    match precision {
        Precision::Short => format_significant(x, 6),
        Precision::Full => {
            if x == 0.0 {
                "0".into()
            } else {
                format!("{x:?}")
            }
        }
    }
}

/// Renders records (and footer comments) in the shared CSV schema.
pub fn write_csv(records: &[ExperimentRecord], footer: &[String], precision: Precision) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.experiment,
            format_number(r.param, precision),
            r.measure,
            format_number(r.mean, precision),
            format_number(r.std, precision),
            r.runs
        );
    }
    for line in footer {
        let _ = writeln!(out, "# {line}");
    }
    out
}

pub fn write_runs_csv(experiment: ExperimentKind, per_run: &[RunValue]) -> String {
    let mut rows: Vec<&RunValue> = per_run.iter().collect();
    rows.sort_by(|a, b| {
        a.param
            .total_cmp(&b.param)
            .then(a.measure.cmp(&b.measure))
            .then(a.run.cmp(&b.run))
    });
    let mut out = String::from(RUNS_CSV_HEADER);
    out.push('\n');
    for v in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            experiment,
            format_number(v.param, Precision::Full),
            v.measure,
            v.run,
            format_number(v.value, Precision::Full)
        );
    }
    out
}

/// Parses the shared CSV schema. Lines starting with `#` are comments.
pub fn parse_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    match lines.next() {
        Some((_, header)) if header.trim() == CSV_HEADER => {}
        Some((i, header)) => {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected header {CSV_HEADER:?}, found {header:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing CSV header".into(),
            })
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", fields.len())));
        }
        let number = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad(format!("not a number: {s:?}")))
        };
        records.push(ExperimentRecord {
            experiment: fields[0].parse().map_err(|e: Error| bad(e.to_string()))?,
            param: number(fields[1])?,
            measure: fields[2].parse().map_err(|e: Error| bad(e.to_string()))?,
            mean: number(fields[3])?,
            std: number(fields[4])?,
            runs: fields[5]
                .parse()
                .map_err(|_| bad(format!("not a run count: {:?}", fields[5])))?,
        });
    }
    if records.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "CSV has no data rows".into(),
        });
    }
    Ok(records)
}

/// Grid value maximizing each measure's mean (first maximum wins).
pub fn argmax_by_measure(records: &[ExperimentRecord]) -> Vec<(Measure, f64, f64)> {
    let mut measures: Vec<Measure> = records.iter().map(|r| r.measure).collect();
    measures.sort();
    measures.dedup();
    measures
        .into_iter()
        .filter_map(|m| {
            records
                .iter()
                .filter(|r| r.measure == m)
                .fold(None, |best: Option<&ExperimentRecord>, r| match best {
                    Some(b) if b.mean >= r.mean => Some(b),
                    _ => Some(r),
                })
                .map(|r| (m, r.param, r.mean))
        })
        .collect()
}

fn measure_color(m: Measure) -> &'static str {
    match m {
        Measure::Nmi => "#1f77b4",
        Measure::Ami => "#ff7f0e",
        Measure::Ri => "#8c564b",
        Measure::Ari => "#2ca02c",
        Measure::Rmi => "#d62728",
        Measure::ResMi => "#9467bd",
    }
}

/// Line chart with one line per measure and one-standard-deviation error
/// bars. Cluster-count experiments of the synthetic suite use a log2 x-axis.
pub fn render_svg(records: &[ExperimentRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    let experiment = records[0].experiment;
    let log_x = matches!(experiment, ExperimentKind::A | ExperimentKind::B)
        && records.iter().all(|r| r.param > 0.0);
    let tx = |p: f64| if log_x { p.log2() } else { p };

    let (width, height) = (720.0, 440.0);
    let (left, right, top, bottom) = (64.0, 130.0, 40.0, 52.0);
    let xs: Vec<f64> = records.iter().map(|r| tx(r.param)).collect();
    let (mut x_min, mut x_max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    let (y_lo, y_hi) = records.iter().fold((0.0f64, 1.0f64), |(lo, hi), r| {
        (lo.min(r.mean - r.std), hi.max(r.mean + r.std))
    });
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let sx = |x: f64| left + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| top + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">experiment {}: {}</text>"#,
        left + plot_w / 2.0,
        experiment,
        experiment.description()
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} V{} H{}" fill="none" stroke="black"/>"#,
        top + plot_h,
        left + plot_w
    );
    for i in 0..=5 {
        let y = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            left + plot_w,
            left - 6.0,
            py + 4.0,
            format_significant(y, 3)
        );
    }
    let mut ticks: Vec<f64> = records.iter().map(|r| r.param).collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    let stride = ticks.len().div_ceil(12).max(1);
    for p in ticks.iter().step_by(stride) {
        let px = sx(tx(*p));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            top + plot_h,
            top + plot_h + 5.0,
            top + plot_h + 18.0,
            format_significant(*p, 4)
        );
    }
    let x_label = if experiment.sweeps_cluster_count() {
        if log_x {
            "number of clusters c (log scale)"
        } else {
            "number of clusters c"
        }
    } else {
        "proportion p"
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        left + plot_w / 2.0,
        height - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">similarity</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );

    let mut measures: Vec<Measure> = records.iter().map(|r| r.measure).collect();
    measures.sort();
    measures.dedup();
    for (k, &m) in measures.iter().enumerate() {
        let color = measure_color(m);
        let mut series: Vec<&ExperimentRecord> =
            records.iter().filter(|r| r.measure == m).collect();
        series.sort_by(|a, b| a.param.total_cmp(&b.param));
        let points: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(tx(r.param)), sy(r.mean)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="measure" data-measure="{m}" points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
            points.join(" ")
        );
        for r in &series {
            let px = sx(tx(r.param));
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}" stroke-width="1"/><circle cx="{px:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sy(r.mean - r.std),
                sy(r.mean + r.std),
                sy(r.mean)
            );
        }
        let ly = top + 14.0 + 20.0 * k as f64;
        let lx = left + plot_w + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{m}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_formatting() {
        assert_eq!(format_significant(1.0, 6), "1");
        assert_eq!(format_significant(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_significant(-0.5, 6), "-0.5");
        assert_eq!(format_significant(1024.0, 6), "1024");
        assert_eq!(format_significant(0.05, 6), "0.05");
        assert_eq!(format_significant(1.234567e-5, 6), "1.23457e-05");
        assert_eq!(format_significant(1234567.0, 6), "1.23457e+06");
        assert_eq!(format_significant(999999.7, 6), "1e+06");
        assert_eq!(format_significant(-0.0, 6), "0");
        assert_eq!(format_significant(0.0001, 6), "0.0001");
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[0.7]), (0.7, 0.0));
    }

    #[test]
    fn default_grids() {
        let a = default_grid(ExperimentKind::A, 1024);
        assert_eq!(a.len(), 11);
        assert_eq!(a[0], 1.0);
        assert_eq!(a[10], 1024.0);
        assert_eq!(default_grid(ExperimentKind::B, 96).last(), Some(&96.0));
        let c = default_grid(ExperimentKind::C, 1024);
        assert_eq!(c.len(), 21);
        assert_eq!(c[1], 0.05);
        assert_eq!(c[20], 1.0);
    }

    #[test]
    fn grid_validation() {
        let mut cfg = SyntheticConfig::new(ExperimentKind::A);
        cfg.n = 64;
        cfg.grid = vec![65.0];
        assert!(run_synthetic(&cfg).is_err());
        cfg.grid = vec![2.5];
        assert!(run_synthetic(&cfg).is_err());
        let mut cfg = SyntheticConfig::new(ExperimentKind::C);
        cfg.grid = vec![1.2];
        assert!(run_synthetic(&cfg).is_err());
    }

    fn small(kind: ExperimentKind) -> SyntheticConfig {
        let mut cfg = SyntheticConfig::new(kind);
        cfg.n = 128;
        cfg.runs = 5;
        cfg.grid = default_grid(kind, 128);
        cfg
    }

    #[test]
    fn identity_points_score_one() {
        let out = run_synthetic(&SyntheticConfig {
            grid: vec![0.0, 0.5],
            ..small(ExperimentKind::C)
        })
        .unwrap();
        for r in out.records.iter().filter(|r| r.param == 0.0) {
            assert_eq!((r.mean, r.std), (1.0, 0.0), "{:?}", r.measure);
        }
        let out = run_synthetic(&SyntheticConfig {
            grid: vec![32.0],
            ..small(ExperimentKind::B)
        })
        .unwrap();
        assert!(out.records.iter().all(|r| r.mean == 1.0));
    }

    #[test]
    fn aggregation_matches_per_run_values() {
        let out = run_synthetic(&small(ExperimentKind::D)).unwrap();
        assert_eq!(out.records.len(), 21 * 5);
        for r in &out.records {
            let values: Vec<f64> = out
                .per_run
                .iter()
                .filter(|v| v.param == r.param && v.measure == r.measure)
                .map(|v| v.value)
                .collect();
            let (m, s) = mean_std(&values);
            assert!((m - r.mean).abs() <= 1e-12 && (s - r.std).abs() <= 1e-12);
            assert_eq!(r.runs, 5);
        }
    }

    #[test]
    fn csv_round_trip() {
        let out = run_synthetic(&small(ExperimentKind::A)).unwrap();
        let text = write_csv(&out.records, &out.metadata, Precision::Full);
        assert!(text.starts_with(CSV_HEADER));
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, out.records);

        let short = parse_csv(&write_csv(&out.records, &[], Precision::Short)).unwrap();
        for (a, b) in short.iter().zip(&out.records) {
            assert!((a.mean - b.mean).abs() <= 1e-5 * b.mean.abs().max(1e-3));
        }
    }

    #[test]
    fn csv_errors() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\n")).is_err());
        assert!(parse_csv("a,b,c\n1,2,3\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\na,1,NMI,0.5,0.1\n")).is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\na,1,XYZ,0.5,0.1,3\n")).is_err());
    }

    #[test]
    fn svg_has_one_line_per_measure() {
        let out = run_synthetic(&small(ExperimentKind::A)).unwrap();
        let svg = render_svg(&out.records).unwrap();
        assert_eq!(svg.matches(r#"class="measure""#).count(), 5);
        assert!(svg.contains("log scale"));

        let single: Vec<ExperimentRecord> = out
            .records
            .iter()
            .filter(|r| r.measure == Measure::ResMi)
            .cloned()
            .collect();
        let svg = render_svg(&single).unwrap();
        assert_eq!(svg.matches(r#"class="measure""#).count(), 1);
        assert!(render_svg(&[]).is_err());
    }

    #[test]
    fn argmax_picks_first_maximum() {
        let rec = |param: f64, mean: f64| ExperimentRecord {
            experiment: ExperimentKind::Network,
            param,
            measure: Measure::Nmi,
            mean,
            std: 0.0,
            runs: 1,
        };
        let best = argmax_by_measure(&[rec(2.0, 0.1), rec(3.0, 0.5), rec(4.0, 0.5)]);
        assert_eq!(best, vec![(Measure::Nmi, 3.0, 0.5)]);
    }

    #[test]
    fn deterministic_output() {
        let cfg = small(ExperimentKind::B);
        let a = write_csv(&run_synthetic(&cfg).unwrap().records, &[], Precision::Short);
        let b = write_csv(&run_synthetic(&cfg).unwrap().records, &[], Precision::Short);
        assert_eq!(a, b);
    }
}
