use serde::{Deserialize, Serialize};

use super::{ordered, Graph};
use crate::error::{Error, Result};

/// A set of pairwise vertex-disjoint edges, stored sorted with `u < v` in each pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<_> = edges.into_iter().map(|(u, v)| ordered(u, v)).collect();
        edges.sort_unstable();
        edges.dedup();
        if let Some(&(u, _)) = edges.iter().find(|(u, v)| u == v) {
            return Err(Error::SelfLoop(u));
        }
        let mut seen: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(Error::NotAMatching(w[0]));
            }
        }
        Ok(Matching { edges })
    }

    pub fn empty() -> Self {
        Matching { edges: Vec::new() }
    }

    pub(crate) fn from_sorted_unchecked(edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Matching { edges }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&ordered(u, v)).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().flat_map(|&(u, v)| [u, v])
    }

    /// `partner[v]` is the vertex matched to `v`, if any.
    pub fn partners(&self, n: usize) -> Vec<Option<usize>> {
        let mut p = vec![None; n];
        for &(u, v) in &self.edges {
            p[u] = Some(v);
            p[v] = Some(u);
        }
        p
    }

    /// True if every edge is in `g` and every vertex of `g` is covered.
    pub fn is_perfect_in(&self, g: &Graph) -> bool {
        2 * self.len() == g.n() && self.is_sub_matching_of(g)
    }

    pub fn is_sub_matching_of(&self, g: &Graph) -> bool {
        self.edges.iter().all(|&(u, v)| g.has_edge(u, v))
    }

    /// Number of shared edges.
    pub fn intersection_size(&self, other: &Matching) -> usize {
        self.edges.iter().filter(|&&(u, v)| other.contains(u, v)).count()
    }

    pub fn is_disjoint_from(&self, other: &Matching) -> bool {
        self.intersection_size(other) == 0
    }
}

impl TryFrom<Vec<(usize, usize)>> for Matching {
    type Error = Error;

    fn try_from(edges: Vec<(usize, usize)>) -> Result<Self> {
        Matching::new(edges)
    }
}

impl From<Matching> for Vec<(usize, usize)> {
    fn from(m: Matching) -> Self {
        m.edges
    }
}

/// A split of `0..n` into two disjoint sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
    in_a: Vec<bool>,
}

impl Bipartition {
    /// `side_a` lists the vertices of the first side; everything else in `0..n` forms the second.
    pub fn new(n: usize, side_a: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut in_a = vec![false; n];
        for v in side_a {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            in_a[v] = true;
        }
        let side_a = (0..n).filter(|&v| in_a[v]).collect();
        let side_b = (0..n).filter(|&v| !in_a[v]).collect();
        Ok(Bipartition { side_a, side_b, in_a })
    }

    /// Find the two sides of a connected-or-not bipartite graph by BFS 2-colouring,
    /// putting the lowest vertex of each component on side A.
    pub fn detect(g: &Graph) -> Option<Self> {
        let n = g.n();
        let mut colour: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(true);
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].unwrap();
                for &v in g.neighbours(u) {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        _ => {}
                    }
                }
            }
        }
        Bipartition::new(n, (0..n).filter(|&v| colour[v] == Some(true))).ok()
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn in_a(&self, v: usize) -> bool {
        self.in_a[v]
    }

    pub fn n(&self) -> usize {
        self.in_a.len()
    }

    /// First edge of `g` with both ends on the same side, if any.
    pub fn violating_edge(&self, g: &Graph) -> Option<(usize, usize)> {
        g.edges().find(|&(u, v)| self.in_a[u] == self.in_a[v])
    }
}

/// The fixed edge set whose overlap with a random perfect matching is studied:
/// either a matching or a spanning subgraph (typically regular).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedSet {
    Matching(Matching),
    Subgraph(Graph),
}

impl FixedSet {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            FixedSet::Matching(m) => m.edges().to_vec(),
            FixedSet::Subgraph(g) => g.edges().collect(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            FixedSet::Matching(m) => m.len(),
            FixedSet::Subgraph(g) => g.edge_count(),
        }
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        match self {
            FixedSet::Matching(m) => m.contains(u, v),
            FixedSet::Subgraph(g) => g.has_edge(u, v),
        }
    }

    pub fn is_matching(&self) -> bool {
        matches!(self, FixedSet::Matching(_))
    }

    /// Largest number of fixed edges at one vertex.
    pub fn max_degree(&self) -> usize {
        match self {
            FixedSet::Matching(m) => usize::from(!m.is_empty()),
            FixedSet::Subgraph(g) => g.max_degree(),
        }
    }

    /// Error unless every fixed edge is an edge of `g`.
    pub fn check_within(&self, g: &Graph) -> Result<()> {
        for (u, v) in self.edges() {
            if !g.has_edge(u, v) {
                return Err(Error::EdgeNotPresent(u, v));
            }
        }
        Ok(())
    }
}

impl From<Matching> for FixedSet {
    fn from(m: Matching) -> Self {
        FixedSet::Matching(m)
    }
}

impl From<Graph> for FixedSet {
    fn from(g: Graph) -> Self {
        FixedSet::Subgraph(g)
    }
}
