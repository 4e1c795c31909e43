use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use matchlab::pm::{COUNT_LIMIT, ENUMERATION_CAP};

mod commands;
mod input;
mod output;

use input::GraphArgs;
use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "matchlab", version, about = "Perfect matchings in dense regular graphs: counts, laws and switchings")]
struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteFamily {
    Complete,
    Multipartite,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the graph as an edge list
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Count perfect matchings
    Count {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = COUNT_LIMIT)]
        max_n: usize,
    },
    /// List perfect matchings in lexicographic order
    Enumerate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 20)]
        max_n: usize,
        #[arg(long, default_value_t = ENUMERATION_CAP)]
        cap: u64,
    },
    /// Certify or refute robust expansion
    Expander {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        tau: f64,
        /// Use the bipartite definition (sets from one side, side size as n)
        #[arg(long)]
        bipartite: bool,
        /// Random sets to try when the graph is too large for the exact sweep
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Exact probability that a uniform perfect matching uses each edge
    EdgeProb {
        #[command(flatten)]
        graph: GraphArgs,
        /// Only these edges, e.g. `0-1,2-3`
        #[arg(long)]
        edge: Option<String>,
    },
    /// Exact law of |M ∩ N| against Poisson(e(N)/d)
    Pmf {
        #[command(flatten)]
        graph: GraphArgs,
        /// `pm`, `none`, or an edge list such as `0-1,2-3`
        #[arg(long, default_value = "pm")]
        fixed: String,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Probability that a uniform perfect matching avoids N
    Avoidance {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "pm")]
        fixed: String,
    },
    /// Probability that r independent uniform perfect matchings are pairwise disjoint
    Disjoint {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Estimate by sampling instead of exact enumeration
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Stratum ratio |M_k|/|M_{k-1}| next to the switching prediction
    Switching {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "pm")]
        fixed: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Cycle half-length; defaults to the largest with 2·ell <= n
        #[arg(long)]
        ell: Option<usize>,
        /// Report every ell from 2 to n/2
        #[arg(long, conflicts_with = "ell")]
        sweep_ell: bool,
    },
    /// Walk, sandwich and mixing checks on the symmetric digraph of the graph
    Walks {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        tau: f64,
    },
    /// Avoidance ratios of K_{a×b} against e^{-n/2d}
    SuiteMultipartite {
        #[arg(long, default_value_t = 6)]
        b_max: usize,
        #[arg(long, default_value_t = 20)]
        max_n: usize,
    },
    /// TV distance to Poisson across increasing sizes
    SuiteTv {
        #[arg(long, value_enum, default_value_t = SuiteFamily::Complete)]
        family: SuiteFamily,
        /// Vertex counts (complete) or part counts (multipartite)
        #[arg(long, value_delimiter = ',', default_values_t = [6, 8, 10, 12])]
        sizes: Vec<usize>,
        /// Part size for the multipartite family
        #[arg(short = 'b', default_value_t = 2)]
        part_size: usize,
        #[arg(long, default_value = "pm")]
        fixed: String,
    },
}

enum Outcome {
    Report(Report),
    Text(String),
}

fn run(cli: &Cli) -> matchlab::Result<Outcome> {
    let seed = cli.seed;
    let report = match &cli.command {
        Command::Generate { graph } => return Ok(Outcome::Text(commands::generate_cmd(&graph.load(seed)?))),
        Command::Count { graph, max_n } => commands::count_cmd(&graph.load(seed)?, *max_n)?,
        Command::Enumerate { graph, max_n, cap } => commands::enumerate_cmd(&graph.load(seed)?, *max_n, *cap)?,
        Command::Expander { graph, nu, tau, bipartite, trials } => {
            commands::expander_cmd(&graph.load(seed)?, *nu, *tau, *bipartite, *trials, seed)?
        }
        Command::EdgeProb { graph, edge } => commands::edge_prob_cmd(&graph.load(seed)?, edge.as_deref())?,
        Command::Pmf { graph, fixed, k_max } => commands::pmf_cmd(&graph.load(seed)?, fixed, *k_max)?,
        Command::Avoidance { graph, fixed } => commands::avoidance_cmd(&graph.load(seed)?, fixed)?,
        Command::Disjoint { graph, r, samples } => commands::disjoint_cmd(&graph.load(seed)?, *r, *samples, seed)?,
        Command::Switching { graph, fixed, k, ell, sweep_ell } => {
            commands::switching_cmd(&graph.load(seed)?, fixed, *k, *ell, *sweep_ell)?
        }
        Command::Walks { graph, nu, tau } => commands::walks_cmd(&graph.load(seed)?, *nu, *tau)?,
        Command::SuiteMultipartite { b_max, max_n } => commands::suite_multipartite_cmd(*b_max, *max_n)?,
        Command::SuiteTv { family, sizes, part_size, fixed } => {
            commands::suite_tv_cmd(*family == SuiteFamily::Multipartite, *part_size, sizes, fixed)?
        }
    };
    Ok(Outcome::Report(report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let written = match run(&cli) {
        Ok(Outcome::Report(report)) => report.emit(cli.format, cli.out.as_deref()),
        Ok(Outcome::Text(text)) => match &cli.out {
            Some(path) => std::fs::write(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_size_limit() { 2 } else { 1 });
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            ExitCode::from(1)
        }
    }
}
