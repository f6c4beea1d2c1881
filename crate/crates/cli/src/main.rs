//! `resmi` command-line front end.

mod grid;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use resmi::community::{self, ScorePlusParams};
use resmi::experiment::{self, ExperimentKind, ExperimentOutput, Precision, SyntheticConfig};
use resmi::measures::{Comparison, Measure, MeasureOptions, NmiNormalization, OmegaPolicy};
use resmi::partition::parse_label_file;
use resmi::rng::RngSeed;
use resmi::Labeling;

#[derive(Parser)]
#[command(
    name = "resmi",
    version,
    about = "Clustering similarity toolkit: ResMI, NMI, AMI, ARI and RMI"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a synthetic perturbation experiment.
    Experiment(ExperimentArgs),
    /// Compare two label files.
    Compare(CompareArgs),
    /// Sweep the SCORE+ community count on a network against ground truth.
    Network(NetworkArgs),
    /// Render an experiment CSV as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum NmiNorm {
    Average,
    Max,
    Min,
}

#[derive(Args)]
struct MeasureArgs {
    /// Comma-separated measures (NMI, AMI, RI, ARI, RMI, ResMI).
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<String>>,
    /// Count Ω exactly (fails when infeasible).
    #[arg(long)]
    exact_omega: bool,
    /// Report RMI in nats instead of normalized.
    #[arg(long)]
    unnormalized_rmi: bool,
    /// NMI normalizer.
    #[arg(long, value_enum, default_value = "average")]
    nmi_norm: NmiNorm,
}

#[derive(Args)]
struct OutputArgs {
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart, to the given path or next to --out.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    plot: Option<String>,
    /// Print full-precision numbers instead of 6 significant digits.
    #[arg(long)]
    full_precision: bool,
    /// Write every per-run value to this CSV file.
    #[arg(long)]
    runs_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    which: Which,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter grid: comma list of values or ranges `a:b` / `a:b:step`.
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    measures: MeasureArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    file_f: PathBuf,
    file_g: PathBuf,
    #[command(flatten)]
    measures: MeasureArgs,
}

#[derive(Args)]
struct NetworkArgs {
    /// Edge list, two node tokens per line.
    #[arg(long)]
    edges: PathBuf,
    /// Ground-truth labels: one per line in node order, or `id label` pairs.
    #[arg(long)]
    truth: PathBuf,
    /// Community counts to sweep.
    #[arg(long, default_value = "2:8")]
    grid: String,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict the analysis to the largest connected component.
    #[arg(long)]
    largest_component: bool,
    #[arg(long, default_value_t = 0.1)]
    ridge_delta: f64,
    #[arg(long, default_value_t = 0.1)]
    eigengap_threshold: f64,
    #[arg(long, default_value_t = 20)]
    kmeans_restarts: usize,
    #[arg(long, default_value_t = 200)]
    kmeans_max_iters: usize,
    #[command(flatten)]
    measures: MeasureArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PlotArgs {
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// Failure classes mapped to exit codes 1 and 2.
enum Failure {
    Usage(String),
    Data(String),
}

impl From<resmi::Error> for Failure {
    fn from(e: resmi::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Experiment(args) => cmd_experiment(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Network(args) => cmd_network(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

impl MeasureArgs {
    fn selected(&self) -> CliResult<Vec<Measure>> {
        match &self.measures {
            None => Ok(Measure::COMPARED.to_vec()),
            Some(names) => {
                let mut out = Vec::new();
                for name in names.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
                    let m: Measure = name
                        .parse()
                        .map_err(|e: resmi::Error| Failure::Usage(e.to_string()))?;
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
                if out.is_empty() {
                    return Err(Failure::Usage("no measures selected".into()));
                }
                Ok(out)
            }
        }
    }

    fn options(&self) -> MeasureOptions {
        MeasureOptions {
            nmi: match self.nmi_norm {
                NmiNorm::Average => NmiNormalization::Average,
                NmiNorm::Max => NmiNormalization::Max,
                NmiNorm::Min => NmiNormalization::Min,
            },
            omega: if self.exact_omega {
                OmegaPolicy::Exact
            } else {
                OmegaPolicy::Auto
            },
            rmi_unnormalized: self.unnormalized_rmi,
        }
    }
}

impl OutputArgs {
    fn precision(&self) -> Precision {
        if self.full_precision {
            Precision::Full
        } else {
            Precision::Short
        }
    }

    fn plot_path(&self) -> CliResult<Option<PathBuf>> {
        match self.plot.as_deref() {
            None => Ok(None),
            Some("") => match &self.out {
                Some(out) => Ok(Some(out.with_extension("svg"))),
                None => Err(Failure::Usage(
                    "--plot without a path requires --out".into(),
                )),
            },
            Some(path) => Ok(Some(PathBuf::from(path))),
        }
    }

    fn emit(&self, output: &ExperimentOutput, footer: &[String]) -> CliResult<()> {
        let plot = self.plot_path()?;
        let csv = experiment::write_csv(&output.records, footer, self.precision());
        match &self.out {
            Some(path) => write_file(path, &csv)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(csv.as_bytes())
                    .map_err(|e| Failure::Data(format!("writing stdout: {e}")))?;
            }
        }
        if let Some(path) = plot {
            write_file(&path, &experiment::render_svg(&output.records)?)?;
        }
        if let Some(path) = &self.runs_out {
            write_file(
                path,
                &experiment::write_runs_csv(output.experiment, &output.per_run),
            )?;
        }
        Ok(())
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_labels(path: &Path) -> CliResult<Labeling> {
    parse_label_file(&read_file(path)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn cmd_experiment(args: ExperimentArgs) -> CliResult<()> {
    let kind = match args.which {
        Which::A => ExperimentKind::A,
        Which::B => ExperimentKind::B,
        Which::C => ExperimentKind::C,
        Which::D => ExperimentKind::D,
    };
    let grid = match &args.grid {
        Some(text) => grid::parse(text).map_err(Failure::Usage)?,
        None => experiment::default_grid(kind, args.n),
    };
    let cfg = SyntheticConfig {
        experiment: kind,
        n: args.n,
        runs: args.runs,
        seed: args.seed,
        grid,
        measures: args.measures.selected()?,
        options: args.measures.options(),
    };
    let output = experiment::run_synthetic(&cfg)?;
    let mut footer = vec![format!("experiment {kind}: {}", kind.description())];
    footer.extend(output.metadata.iter().cloned());
    args.output.emit(&output, &footer)
}

fn cmd_compare(args: CompareArgs) -> CliResult<()> {
    let f = read_labels(&args.file_f)?;
    let g = read_labels(&args.file_g)?;
    let measures = args.measures.selected()?;
    let opts = args.measures.options();
    let comparison = Comparison::new(&f, &g)?;
    let mut table = String::from("measure\tvalue\tdefined\tnote\n");
    for m in measures {
        let r = comparison.evaluate(m, &opts)?;
        let note = match r.omega {
            Some(method) => format!("omega={}", method.as_str()),
            None => String::new(),
        };
        table.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            m,
            experiment::format_significant(r.value, 6),
            r.defined,
            note
        ));
    }
    print!("{table}");
    Ok(())
}

fn cmd_network(args: NetworkArgs) -> CliResult<()> {
    let c_values: Vec<usize> = grid::parse(&args.grid)
        .map_err(Failure::Usage)?
        .into_iter()
        .map(|c| {
            if c.fract() == 0.0 && c >= 2.0 {
                Ok(c as usize)
            } else {
                Err(Failure::Usage(format!(
                    "community count {c} must be an integer >= 2"
                )))
            }
        })
        .collect::<CliResult<_>>()?;
    let edges = fs::File::open(&args.edges)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.edges.display())))?;
    let (graph, report) = community::load_edge_list(std::io::BufReader::new(edges))
        .map_err(|e| Failure::Data(format!("{}: {e}", args.edges.display())))?;
    if report.self_loops > 0 {
        eprintln!("warning: dropped {} self-loop(s)", report.self_loops);
    }
    if report.duplicate_edges > 0 {
        eprintln!(
            "note: collapsed {} duplicate edge(s)",
            report.duplicate_edges
        );
    }
    let truth = community::load_node_labels(&graph, &read_file(&args.truth)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.truth.display())))?;

    let total_nodes = graph.num_nodes();
    let (graph, truth) = if args.largest_component {
        let (sub, nodes) = graph.largest_component()?;
        let truth = truth.restrict(&nodes)?;
        eprintln!(
            "largest connected component: {} of {} nodes",
            nodes.len(),
            total_nodes
        );
        (sub, truth)
    } else {
        (graph, truth)
    };

    let template = ScorePlusParams {
        c: c_values[0],
        ridge_delta: args.ridge_delta,
        eigengap_threshold: args.eigengap_threshold,
        kmeans_restarts: args.kmeans_restarts,
        kmeans_max_iters: args.kmeans_max_iters,
        seed: RngSeed::new(args.seed, 0),
    };
    let output = community::sweep_communities(
        &graph,
        &truth,
        &c_values,
        &template,
        args.runs,
        &args.measures.selected()?,
        &args.measures.options(),
    )?;
    let mut footer = vec![format!(
        "experiment network: {}",
        ExperimentKind::Network.description()
    )];
    footer.push(format!(
        "node_coverage={}/{}",
        graph.num_nodes(),
        total_nodes
    ));
    footer.extend(output.metadata.iter().cloned());
    for (m, c, mean) in experiment::argmax_by_measure(&output.records) {
        footer.push(format!(
            "argmax {m} c={} mean={}",
            c,
            experiment::format_number(mean, args.output.precision())
        ));
    }
    args.output.emit(&output, &footer)
}

fn cmd_plot(args: PlotArgs) -> CliResult<()> {
    let records = experiment::parse_csv(&read_file(&args.csv)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.csv.display())))?;
    write_file(&args.out, &experiment::render_svg(&records)?)
}
