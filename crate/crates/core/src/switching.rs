//! The switching argument made concrete: the bipartite graph `H` between
//! strata `M_k` and `M_{k-1}`, the auxiliary digraph whose paths encode
//! alternating paths, and the exact-versus-predicted stratum ratio.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, serialize_exact, serialize_opt_exact, to_f64};
use crate::graph::{Digraph, FixedSet, Graph, Matching};
use crate::pm::{enumerate_strata, stratify};
use crate::{Count, Exact};

/// `f(N, k)`: `e(N) - (k - 1)` when `N` is a matching, `e(N)` otherwise.
/// The matching case saturates at zero once `k > e(N) + 1`.
pub fn f_of(fixed: &FixedSet, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParameter("f(N, k) needs k >= 1".into()));
    }
    Ok(match fixed {
        FixedSet::Matching(m) => m.len().saturating_sub(k - 1),
        FixedSet::Subgraph(g) => g.edge_count(),
    })
}

/// `H`: `M ∈ M_k` and `M' ∈ M_{k-1}` are adjacent when `M △ M'` is one cycle
/// of length `2ℓ` whose only fixed edge lies in `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchGraph {
    pub k: usize,
    pub ell: usize,
    /// All of `M_k`, in canonical order.
    pub left: Vec<Matching>,
    /// All of `M_{k-1}`, in canonical order.
    pub right: Vec<Matching>,
    /// `(left index, right index)`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl SwitchGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.left.len()];
        for &(i, _) in &self.edges {
            deg[i] += 1;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right.len()];
        for &(_, j) in &self.edges {
            deg[j] += 1;
        }
        deg
    }

    /// `Σ_{M ∈ M_k} d_H(M) = e(H) = Σ_{M' ∈ M_{k-1}} d_H(M')`.
    pub fn double_count_holds(&self) -> bool {
        let l: usize = self.left_degrees().iter().sum();
        let r: usize = self.right_degrees().iter().sum();
        l == self.edge_count() && r == self.edge_count()
    }
}

/// Walks `M △ M'` from one of its vertices, alternating `M` and `M'`, and
/// reports whether it closes up as one cycle of length `2ℓ` with exactly one
/// fixed edge, that edge in `M`.
fn is_switch(m: &Matching, mp_partner: &[Option<usize>], m_partner: &[Option<usize>], fixed: &FixedSet, ell: usize) -> bool {
    let diff: Vec<(usize, usize)> = m
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| mp_partner[u] != Some(v))
        .collect();
    if diff.len() != ell {
        return false;
    }
    let start = diff[0].0;
    let mut at = start;
    let mut steps = 0;
    let mut fixed_in_m = 0;
    let mut fixed_in_mp = 0;
    loop {
        let next = m_partner[at].expect("perfect");
        if fixed.contains(at, next) {
            fixed_in_m += 1;
        }
        let back = mp_partner[next].expect("perfect");
        if fixed.contains(next, back) {
            fixed_in_mp += 1;
        }
        steps += 2;
        at = back;
        if at == start || steps > 2 * ell {
            break;
        }
    }
    steps == 2 * ell && at == start && fixed_in_m == 1 && fixed_in_mp == 0
}

pub fn build_switch_graph(g: &Graph, fixed: &FixedSet, k: usize, ell: usize) -> Result<SwitchGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("switch graph needs k >= 1".into()));
    }
    if ell < 2 || 2 * ell > g.n() {
        return Err(Error::InvalidParameter(format!("need 2 <= ell and 2·ell <= n, got ell = {ell}")));
    }
    let mut strata = enumerate_strata(g, fixed)?;
    let take = |strata: &mut Vec<Vec<Matching>>, i: usize| strata.get_mut(i).map(std::mem::take).unwrap_or_default();
    let left = take(&mut strata, k);
    let right = take(&mut strata, k - 1);
    let n = g.n();
    let left_partners: Vec<_> = left.iter().map(|m| m.partners(n)).collect();
    let right_partners: Vec<_> = right.iter().map(|m| m.partners(n)).collect();
    let mut edges = Vec::new();
    for (i, m) in left.iter().enumerate() {
        for (j, mp) in right_partners.iter().enumerate() {
            if is_switch(m, mp, &left_partners[i], fixed, ell) {
                edges.push((i, j));
            }
        }
    }
    Ok(SwitchGraph { k, ell, left, right, edges })
}

/// Independent check of one `H`-edge: materialise `M △ M'` as a graph and
/// test that it is connected, 2-regular with `2ℓ` edges, and meets the fixed
/// set in exactly one edge, which belongs to `M`.
pub fn verify_switch_edge(m: &Matching, mp: &Matching, fixed: &FixedSet, ell: usize) -> bool {
    let in_m: HashSet<(usize, usize)> = m.edges().iter().copied().collect();
    let in_mp: HashSet<(usize, usize)> = mp.edges().iter().copied().collect();
    let diff: Vec<(usize, usize)> = in_m.symmetric_difference(&in_mp).copied().collect();
    if diff.len() != 2 * ell {
        return false;
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(u, v) in &diff {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    if adj.values().any(|nb| nb.len() != 2) {
        return false;
    }
    let start = *adj.keys().next().expect("non-empty");
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[&u] {
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    if seen.len() != adj.len() {
        return false;
    }
    let fixed_edges: Vec<_> = diff.iter().filter(|&&(u, v)| fixed.contains(u, v)).collect();
    fixed_edges.len() == 1 && in_m.contains(fixed_edges[0])
}

/// The auxiliary digraph `D`, relabelled to `0..m` with a map back to `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxDigraph {
    pub digraph: Digraph,
    /// Original id of each vertex of `D`.
    pub vertices: Vec<usize>,
    index: Vec<Option<usize>>,
    /// Edges of `M' \ E(N)` with both ends in `D`, in `D`'s labels.
    constraint: Matching,
}

impl AuxDigraph {
    pub fn local(&self, v: usize) -> Option<usize> {
        self.index.get(v).copied().flatten()
    }

    pub fn original(&self, i: usize) -> usize {
        self.vertices[i]
    }

    /// The matching each `D`-path may meet in at most one endpoint per edge.
    pub fn constraint(&self) -> &Matching {
        &self.constraint
    }
}

/// `D` on `V(G) \ V(E(N) ∩ M')` with `N⁺(x) = N_{M'}(N_{G-N-M'}(x) ∩ V(D))`.
pub fn build_aux_digraph(g: &Graph, fixed: &FixedSet, mp: &Matching) -> Result<AuxDigraph> {
    let all: Vec<usize> = (0..g.n()).collect();
    build_aux_digraph_on(g, fixed, mp, &all)
}

/// Bipartite form: the vertices of `D` are restricted to `side`. A step from
/// `x` goes to a neighbour `y` on the other side that is not covered by
/// `E(N) ∩ M'`, then along `M'` back to `side`.
pub fn build_aux_digraph_on(g: &Graph, fixed: &FixedSet, mp: &Matching, side: &[usize]) -> Result<AuxDigraph> {
    if !mp.is_perfect_in(g) {
        return Err(Error::NotAPerfectMatching);
    }
    let n = g.n();
    let partner = mp.partners(n);
    let mut uncovered = vec![true; n];
    for &(u, v) in mp.edges() {
        if fixed.contains(u, v) {
            uncovered[u] = false;
            uncovered[v] = false;
        }
    }
    let mut index = vec![None; n];
    let mut vertices = Vec::new();
    for &v in side {
        if v < n && uncovered[v] && index[v].is_none() {
            index[v] = Some(vertices.len());
            vertices.push(v);
        }
    }
    let mut arcs = Vec::new();
    for (i, &x) in vertices.iter().enumerate() {
        for &y in g.neighbours(x) {
            if !uncovered[y] || fixed.contains(x, y) || partner[x] == Some(y) {
                continue;
            }
            let z = partner[y].expect("perfect matching");
            if let Some(j) = index[z] {
                arcs.push((i, j));
            }
        }
    }
    let digraph = Digraph::new(vertices.len(), arcs)?;
    let constraint = Matching::new(
        mp.edges()
            .iter()
            .filter(|&&(u, v)| !fixed.contains(u, v))
            .filter_map(|&(u, v)| Some((index[u]?, index[v]?))),
    )?;
    Ok(AuxDigraph { digraph, vertices, index, constraint })
}

/// Simple `(u, v)`-paths of even `length` in `G` whose edges alternate between
/// `E(G) \ (F ∪ M')` (first) and `M' \ F`, where `F` is `forbidden`.
pub fn count_alternating_paths(
    g: &Graph,
    mp: &Matching,
    u: usize,
    v: usize,
    length: usize,
    forbidden: &FixedSet,
) -> Result<Count> {
    let n = g.n();
    for w in [u, v] {
        if w >= n {
            return Err(Error::VertexOutOfRange { vertex: w, n });
        }
    }
    if u == v {
        return Err(Error::InvalidParameter("alternating paths need distinct endpoints".into()));
    }
    if length % 2 == 1 {
        return Err(Error::InvalidParameter("alternating path length must be even".into()));
    }
    if length == 0 {
        return Ok(Count::zero());
    }
    let partner = mp.partners(n);
    let mut on_path = vec![false; n];
    on_path[u] = true;
    let mut found = 0u64;
    alternate(g, &partner, forbidden, v, u, length, &mut on_path, &mut found);
    Ok(Count::from(found))
}

#[allow(clippy::too_many_arguments)]
fn alternate(
    g: &Graph,
    partner: &[Option<usize>],
    forbidden: &FixedSet,
    target: usize,
    at: usize,
    remaining: usize,
    on_path: &mut [bool],
    found: &mut u64,
) {
    for &y in g.neighbours(at) {
        if on_path[y] || partner[at] == Some(y) || forbidden.contains(at, y) {
            continue;
        }
        let Some(z) = partner[y] else { continue };
        if on_path[z] || forbidden.contains(y, z) {
            continue;
        }
        if remaining == 2 {
            if z == target && y != target {
                *found += 1;
            }
            continue;
        }
        if y == target || z == target {
            continue;
        }
        on_path[y] = true;
        on_path[z] = true;
        alternate(g, partner, forbidden, target, z, remaining - 2, on_path, found);
        on_path[y] = false;
        on_path[z] = false;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub mean: Exact,
}

impl DegreeStats {
    fn of(degrees: &[usize]) -> Option<Self> {
        let min = *degrees.iter().min()?;
        let max = *degrees.iter().max()?;
        let sum: usize = degrees.iter().sum();
        let mean = Exact::new(BigInt::from(sum), BigInt::from(degrees.len()));
        Some(DegreeStats { min, max, mean })
    }
}

/// Exact `|M_k| / |M_{k-1}|` next to the switching prediction `f(N,k)/(k d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub k: usize,
    pub ell: usize,
    #[serde(serialize_with = "crate::exact::serialize_count")]
    pub stratum_k: Count,
    #[serde(serialize_with = "crate::exact::serialize_count")]
    pub stratum_k_minus_1: Count,
    #[serde(serialize_with = "serialize_exact")]
    pub exact_ratio: Exact,
    pub exact_ratio_f64: f64,
    pub f: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub predicted: Exact,
    pub predicted_f64: f64,
    pub h_edges: usize,
    pub left_degree_stats: Option<DegreeStats>,
    pub right_degree_stats: Option<DegreeStats>,
    /// Degree each `M ∈ M_k` would have in the asymptotic count: `k δ^ℓ n^{ℓ-1}`.
    pub predicted_left_degree: f64,
    /// Degree each `M' ∈ M_{k-1}` would have: `δ^{ℓ-1} n^{ℓ-2} f(N,k)`.
    pub predicted_right_degree: f64,
    /// Mean right degree over mean left degree; equals the exact ratio when `e(H) > 0`.
    #[serde(serialize_with = "serialize_opt_exact")]
    pub degree_ratio: Option<Exact>,
    pub double_count_holds: bool,
}

pub fn ratio_report(g: &Graph, fixed: &FixedSet, k: usize, ell: usize) -> Result<RatioReport> {
    let d = g.regularity().ok_or(Error::NotRegular)?;
    if k == 0 {
        return Err(Error::InvalidParameter("ratio needs k >= 1".into()));
    }
    if k > fixed.edge_count() {
        return Err(Error::EmptyStratum(k));
    }
    let strata = stratify(g, fixed)?;
    let (top, bottom) = (strata.get(k), strata.get(k - 1));
    if bottom.is_zero() {
        return Err(Error::EmptyStratum(k - 1));
    }
    let exact_ratio = exact::ratio(&top, &bottom);
    let f = f_of(fixed, k)?;
    let predicted = Exact::new(BigInt::from(f), BigInt::from(k * d));
    let h = build_switch_graph(g, fixed, k, ell)?;
    let (left_deg, right_deg) = (h.left_degrees(), h.right_degrees());
    let left_stats = DegreeStats::of(&left_deg);
    let right_stats = DegreeStats::of(&right_deg);
    let degree_ratio = match (&left_stats, &right_stats) {
        (Some(l), Some(r)) if !l.mean.is_zero() => Some(&r.mean / &l.mean),
        _ => None,
    };
    let n = g.n() as f64;
    let delta = d as f64 / n;
    let ell_i = ell as i32;
    Ok(RatioReport {
        k,
        ell,
        exact_ratio_f64: to_f64(&exact_ratio),
        predicted_f64: to_f64(&predicted),
        stratum_k: top,
        stratum_k_minus_1: bottom,
        exact_ratio,
        f,
        predicted,
        h_edges: h.edge_count(),
        left_degree_stats: left_stats,
        right_degree_stats: right_stats,
        predicted_left_degree: k as f64 * delta.powi(ell_i) * n.powi(ell_i - 1),
        predicted_right_degree: delta.powi(ell_i - 1) * n.powi(ell_i - 2) * f as f64,
        degree_ratio,
        double_count_holds: h.double_count_holds(),
    })
}

/// The largest `ℓ` with `2ℓ <= n`, the default cycle half-length at desk scale.
pub fn default_ell(n: usize) -> usize {
    (n / 2).max(2)
}
