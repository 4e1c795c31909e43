use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Restarts allowed before `random_regular` reports `GenerationTimeout`.
pub const MAX_RESTARTS: usize = 10_000;

pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::new(n, edges).expect("complete graph is simple")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).expect("cycle is simple")
}

/// `K_{a×b}`: `a` parts of size `b`, part `i` occupying ids `i*b .. (i+1)*b`.
pub fn complete_multipartite(a: usize, b: usize) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidParameter(format!(
            "complete_multipartite needs a, b >= 1 (got a={a}, b={b})"
        )));
    }
    let n = a * b;
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).filter(move |v| u / b != v / b).map(move |v| (u, v)))
        .collect();
    Graph::new(n, edges)
}

/// Vertex-disjoint union, each graph's ids shifted past the previous ones.
pub fn disjoint_union(parts: &[Graph]) -> Graph {
    let mut offset = 0;
    let mut edges = Vec::new();
    for g in parts {
        edges.extend(g.edges().map(|(u, v)| (u + offset, v + offset)));
        offset += g.n();
    }
    Graph::new(offset, edges).expect("union of simple graphs is simple")
}

/// A simple `d`-regular graph on `n` vertices, deterministic in `seed`.
///
/// Uses the pairing model: each vertex gets `d` points and points are paired
/// one at a time, only accepting pairs that create neither a loop nor a
/// repeated edge. A dead end restarts the whole pairing. Dense requests are
/// served through the complement so the pairing stays sparse.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(Error::InfeasibleDegreeSequence { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n > 0 && 2 * d > n - 1 {
        let sparse = pair_with_restarts(n, n - 1 - d, &mut rng)?;
        return Ok(complement(&sparse));
    }
    pair_with_restarts(n, d, &mut rng)
}

fn complement(g: &Graph) -> Graph {
    let n = g.n();
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    Graph::new(n, edges).expect("complement is simple")
}

fn pair_with_restarts(n: usize, d: usize, rng: &mut impl Rng) -> Result<Graph> {
    for _ in 0..MAX_RESTARTS {
        if let Some(edges) = try_pairing(n, d, rng) {
            return Graph::new(n, edges);
        }
    }
    Err(Error::GenerationTimeout(MAX_RESTARTS))
}

fn try_pairing(n: usize, d: usize, rng: &mut impl Rng) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    points.shuffle(rng);
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::with_capacity(n * d / 2);
    while !points.is_empty() {
        let len = points.len();
        let mut paired = false;
        // A handful of random proposals, then a full scan to tell a dead end from bad luck.
        for _ in 0..8 {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            let (u, v) = (points[i], points[j]);
            if i != j && u != v && !adjacent[u * n + v] {
                take_pair(&mut points, i, j);
                adjacent[u * n + v] = true;
                adjacent[v * n + u] = true;
                edges.push((u, v));
                paired = true;
                break;
            }
        }
        if paired {
            continue;
        }
        let candidates: Vec<(usize, usize)> = (0..len)
            .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let (u, v) = (points[i], points[j]);
                u != v && !adjacent[u * n + v]
            })
            .collect();
        let &(i, j) = candidates.get(rng.gen_range(0..candidates.len().max(1)))?;
        let (u, v) = (points[i], points[j]);
        take_pair(&mut points, i, j);
        adjacent[u * n + v] = true;
        adjacent[v * n + u] = true;
        edges.push((u, v));
    }
    Some(edges)
}

fn take_pair(points: &mut Vec<usize>, i: usize, j: usize) {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    points.swap_remove(hi);
    points.swap_remove(lo);
}
