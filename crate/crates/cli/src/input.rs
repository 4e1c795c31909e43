//! Building the graph and fixed edge set named on the command line.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use matchlab::graph::{complete, complete_multipartite, io, random_regular};
use matchlab::pm::enumerate_pm_with_cap;
use matchlab::{Bipartition, Error, FixedSet, Graph, Matching, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Family {
    Complete,
    Multipartite,
    RandomRegular,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Generated family; mutually exclusive with --file
    #[arg(long, value_enum, conflicts_with = "file", required_unless_present = "file")]
    pub family: Option<Family>,
    /// Edge-list file (`n m` header, one `u v` per line, optional `A: ...` line)
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Number of parts (multipartite)
    #[arg(short = 'a')]
    pub parts: Option<usize>,
    /// Part size (multipartite)
    #[arg(short = 'b')]
    pub part_size: Option<usize>,
    /// Number of vertices (complete, random_regular)
    #[arg(short = 'n')]
    pub n: Option<usize>,
    /// Degree (random_regular)
    #[arg(short = 'd')]
    pub degree: Option<usize>,
}

pub struct Loaded {
    pub graph: Graph,
    pub bipartition: Option<Bipartition>,
    pub label: String,
}

fn need(value: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    value.ok_or_else(|| Error::InvalidParameter(format!("--family {family} needs {flag}")))
}

impl GraphArgs {
    pub fn load(&self, seed: u64) -> Result<Loaded> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
            let parsed = io::parse(&text)?;
            return Ok(Loaded { graph: parsed.graph, bipartition: parsed.bipartition, label: path.display().to_string() });
        }
        match self.family.expect("clap enforces --family or --file") {
            Family::Complete => {
                let n = need(self.n, "-n", "complete")?;
                Ok(Loaded { graph: complete(n), bipartition: None, label: format!("K_{n}") })
            }
            Family::Multipartite => {
                let a = need(self.parts, "-a", "multipartite")?;
                let b = need(self.part_size, "-b", "multipartite")?;
                let graph = complete_multipartite(a, b)?;
                let bipartition = if a == 2 { Some(Bipartition::new(2 * b, 0..b)?) } else { None };
                Ok(Loaded { graph, bipartition, label: format!("K_{{{a}x{b}}}") })
            }
            Family::RandomRegular => {
                let n = need(self.n, "-n", "random_regular")?;
                let d = need(self.degree, "-d", "random_regular")?;
                let graph = random_regular(n, d, seed)?;
                Ok(Loaded { graph, bipartition: None, label: format!("rr({n},{d};seed={seed})") })
            }
        }
    }
}

/// `pm` (first perfect matching in lexicographic order), `none`, or an
/// explicit list such as `0-1,2-3`.
pub fn fixed_set(g: &Graph, text: &str) -> Result<FixedSet> {
    match text.trim() {
        "pm" => {
            // Only the first matching is taken, so the enumeration cap does not apply.
            let first = enumerate_pm_with_cap(g, u64::MAX)?.next().ok_or(Error::NoPerfectMatching)?;
            Ok(FixedSet::from(first))
        }
        "none" => Ok(FixedSet::from(Matching::empty())),
        list => {
            let edges = parse_edges(list)?;
            let fixed = match Matching::new(edges.iter().copied()) {
                Ok(m) => FixedSet::from(m),
                Err(Error::NotAMatching(_)) => FixedSet::from(Graph::new(g.n(), edges)?),
                Err(e) => return Err(e),
            };
            fixed.check_within(g)?;
            Ok(fixed)
        }
    }
}

pub fn parse_edges(list: &str) -> Result<Vec<(usize, usize)>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let bad = || Error::InvalidParameter(format!("edge {item:?} is not of the form u-v"));
            let (u, v) = item.trim().split_once('-').ok_or_else(bad)?;
            Ok((u.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}
