//! Simple graphs, digraphs and matchings over dense vertex ids `0..n`.

mod generators;
pub mod io;
mod matching;

pub use generators::{complete, complete_multipartite, cycle, disjoint_union, random_regular};
pub use matching::{Bipartition, FixedSet, Matching};

use crate::error::{Error, Result};

/// Normalise an undirected pair so the smaller endpoint comes first.
#[inline]
pub fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A simple undirected graph. Adjacency lists are sorted and symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Build a simple graph. Duplicate edges collapse; self-loops are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph { adj, edge_count })
    }

    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edge_count: 0 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// The common degree if the graph is regular. The graph on zero vertices is 0-regular.
    pub fn regularity(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Delete the given edges. Every edge must be present.
    pub fn remove_edges(&self, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut out = self.clone();
        for (u, v) in edges {
            if !self.has_edge(u, v) {
                return Err(Error::EdgeNotPresent(u, v));
            }
            if let Ok(i) = out.adj[u].binary_search(&v) {
                out.adj[u].remove(i);
                let j = out.adj[v].binary_search(&u).expect("symmetric adjacency");
                out.adj[v].remove(j);
                out.edge_count -= 1;
            }
        }
        Ok(out)
    }

    /// Add edges, collapsing any that are already present.
    pub fn add_edges(&self, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        Graph::new(self.n(), self.edges().chain(edges))
    }

    /// Neighbourhoods as bitmasks. Only valid for `n <= 64`.
    pub fn neighbour_masks(&self) -> Vec<u64> {
        assert!(self.n() <= 64, "bitmask view needs n <= 64");
        self.adj
            .iter()
            .map(|l| l.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }

    /// The graph induced on `keep`, relabelled to `0..keep.len()` in the given order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges = keep.iter().enumerate().flat_map(|(i, &v)| {
            let index = &index;
            self.adj[v]
                .iter()
                .filter_map(move |&w| (index[w] != usize::MAX && index[w] > i).then(|| (i, index[w])))
        });
        Graph::new(keep.len(), edges.collect::<Vec<_>>()).expect("induced subgraph is simple")
    }

    /// Full scan of the simplicity and symmetry invariants.
    pub fn check_invariants(&self) -> bool {
        self.adj.iter().enumerate().all(|(u, list)| {
            list.windows(2).all(|w| w[0] < w[1])
                && list.iter().all(|&v| v != u && v < self.n() && self.adj[v].binary_search(&u).is_ok())
        }) && self.edge_count * 2 == self.adj.iter().map(Vec::len).sum::<usize>()
    }
}

/// A directed graph without loops. In- and out-lists are sorted and describe the same arcs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (u, v) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Digraph { out_adj, in_adj })
    }

    /// Both orientations of every edge of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        let arcs: Vec<_> = g.edges().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
        Digraph::new(g.n(), arcs).expect("graph is simple")
    }

    /// Every ordered pair of distinct vertices.
    pub fn complete(n: usize) -> Self {
        Digraph::from_graph(&complete(n))
    }

    /// Arcs `i -> i + s (mod n)` for each offset `s`.
    pub fn circulant(n: usize, offsets: &[usize]) -> Result<Self> {
        let arcs: Vec<_> = (0..n)
            .flat_map(|i| offsets.iter().map(move |&s| (i, (i + s) % n)))
            .collect();
        Digraph::new(n, arcs)
    }

    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbours(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.out_adj[u].binary_search(&v).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }

    /// Common in- and out-degree, if every vertex has the same one.
    pub fn regularity(&self) -> Option<usize> {
        let d = self.out_adj.first().map_or(0, Vec::len);
        (self.out_adj.iter().all(|l| l.len() == d) && self.in_adj.iter().all(|l| l.len() == d))
            .then_some(d)
    }

    pub fn min_semidegree(&self) -> usize {
        self.out_adj
            .iter()
            .chain(&self.in_adj)
            .map(Vec::len)
            .min()
            .unwrap_or(0)
    }
}
