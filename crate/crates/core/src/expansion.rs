//! Robust neighbourhoods and exact or sampled checks of robust expansion.
//!
//! A set `S` passes when `|RN_ν(S)| >= |S| + νn`, where `RN_ν(S)` holds the
//! vertices with at least `νn` (in-)neighbours in `S`. All comparisons between
//! integer counts and the real bounds `νn`, `τn`, `(1-τ)n` are done on exact
//! rationals, reading `ν` and `τ` as the decimals they were written as.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ceil_int, floor_int, from_decimal};
use crate::graph::{Bipartition, Digraph, Graph};
use crate::Exact;

/// Default vertex limit for the exhaustive subset sweep.
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub nu: f64,
    pub tau: f64,
}

impl ExpansionParams {
    pub fn new(nu: f64, tau: f64) -> Result<Self> {
        for (name, x) in [("nu", nu), ("tau", tau)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {x}")));
            }
        }
        Ok(ExpansionParams { nu, tau })
    }

    fn nu_exact(&self) -> Exact {
        from_decimal(self.nu).expect("validated")
    }

    fn tau_exact(&self) -> Exact {
        from_decimal(self.tau).expect("validated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCertificate {
    pub verdict: Verdict,
    pub nu: f64,
    pub tau: f64,
    pub witness: Option<Vec<usize>>,
    pub sets_checked: u64,
}

/// Integer forms of the real bounds for a given scale `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Thresholds {
    /// Smallest neighbour count that is `>= νn`.
    min_neighbours: usize,
    /// Smallest integer `>= νn`; `|RN| - |S|` must reach it.
    surplus: usize,
    min_size: usize,
    max_size: usize,
}

impl Thresholds {
    fn new(params: &ExpansionParams, n: usize) -> Self {
        let n_exact = Exact::from_integer(BigInt::from(n));
        let nu_n = params.nu_exact() * &n_exact;
        let tau = params.tau_exact();
        let lo = ceil_int(&(&tau * &n_exact));
        let hi = floor_int(&((Exact::from_integer(1.into()) - tau) * n_exact));
        let to_usize = |b: BigInt| b.to_usize().unwrap_or(0);
        let need = to_usize(ceil_int(&nu_n));
        Thresholds { min_neighbours: need, surplus: need, min_size: to_usize(lo), max_size: to_usize(hi) }
    }

    fn window_is_empty(&self) -> bool {
        self.min_size > self.max_size
    }
}

fn min_neighbour_count(nu: f64, n: usize) -> Result<usize> {
    let nu = from_decimal(nu)?;
    let bound = nu * Exact::from_integer(BigInt::from(n));
    Ok(ceil_int(&bound).to_usize().unwrap_or(0))
}

/// Vertices with at least `νn` neighbours in `s`, sorted.
pub fn robust_neighbourhood(g: &Graph, s: &[usize], nu: f64) -> Result<Vec<usize>> {
    let need = min_neighbour_count(nu, g.n())?;
    let member = membership(g.n(), s)?;
    Ok((0..g.n())
        .filter(|&v| g.neighbours(v).iter().filter(|&&w| member[w]).count() >= need)
        .collect())
}

/// Vertices with at least `νn` in-neighbours in `s`, sorted.
pub fn robust_outneighbourhood(d: &Digraph, s: &[usize], nu: f64) -> Result<Vec<usize>> {
    let need = min_neighbour_count(nu, d.n())?;
    let member = membership(d.n(), s)?;
    Ok((0..d.n())
        .filter(|&v| d.in_neighbours(v).iter().filter(|&&w| member[w]).count() >= need)
        .collect())
}

fn membership(n: usize, s: &[usize]) -> Result<Vec<bool>> {
    let mut member = vec![false; n];
    for &v in s {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        member[v] = true;
    }
    Ok(member)
}

/// Graphs and digraphs both expose "who gains a neighbour when `u` joins `S`".
pub trait Expander {
    fn order(&self) -> usize;
    /// Vertices whose (in-)neighbour count in `S` rises when `u` joins `S`.
    fn reach(&self, u: usize) -> &[usize];
    /// The robust (out)neighbourhood of `s`.
    fn robust_set(&self, s: &[usize], nu: f64) -> Result<Vec<usize>>;
}

impl Expander for Graph {
    fn order(&self) -> usize {
        self.n()
    }

    fn reach(&self, u: usize) -> &[usize] {
        self.neighbours(u)
    }

    fn robust_set(&self, s: &[usize], nu: f64) -> Result<Vec<usize>> {
        robust_neighbourhood(self, s, nu)
    }
}

impl Expander for Digraph {
    fn order(&self) -> usize {
        self.n()
    }

    fn reach(&self, u: usize) -> &[usize] {
        self.out_neighbours(u)
    }

    fn robust_set(&self, s: &[usize], nu: f64) -> Result<Vec<usize>> {
        robust_outneighbourhood(self, s, nu)
    }
}

/// Incremental state for walking subsets in lexicographic order.
struct Sweep<'a, E: Expander> {
    target: &'a E,
    candidates: &'a [usize],
    th: Thresholds,
    counts: Vec<usize>,
    robust: usize,
    chosen: Vec<usize>,
    checked: u64,
}

impl<'a, E: Expander> Sweep<'a, E> {
    fn new(target: &'a E, candidates: &'a [usize], th: Thresholds) -> Self {
        Sweep {
            target,
            candidates,
            th,
            counts: vec![0; target.order()],
            robust: 0,
            chosen: Vec::new(),
            checked: 0,
        }
    }

    fn push(&mut self, u: usize) {
        for &w in self.target.reach(u) {
            self.counts[w] += 1;
            if self.counts[w] == self.th.min_neighbours {
                self.robust += 1;
            }
        }
        self.chosen.push(u);
    }

    fn pop(&mut self) {
        let u = self.chosen.pop().expect("non-empty");
        for &w in self.target.reach(u) {
            if self.counts[w] == self.th.min_neighbours {
                self.robust -= 1;
            }
            self.counts[w] -= 1;
        }
    }

    /// Depth-first in lexicographic order; stops with `chosen` holding the first violator.
    fn search(&mut self, start: usize) -> bool {
        for i in start..self.candidates.len() {
            if self.chosen.len() + (self.candidates.len() - i) < self.th.min_size {
                break;
            }
            self.push(self.candidates[i]);
            if self.chosen.len() >= self.th.min_size {
                self.checked += 1;
                if self.robust < self.chosen.len() + self.th.surplus {
                    return true;
                }
            }
            if self.chosen.len() < self.th.max_size && self.search(i + 1) {
                return true;
            }
            self.pop();
        }
        false
    }
}

fn sweep<E: Expander>(
    target: &E,
    candidates: &[usize],
    th: Thresholds,
    params: &ExpansionParams,
) -> ExpansionCertificate {
    let mut state = Sweep::new(target, candidates, th);
    let found = !th.window_is_empty() && state.search(0);
    ExpansionCertificate {
        verdict: if found { Verdict::Fail } else { Verdict::Pass },
        nu: params.nu,
        tau: params.tau,
        witness: found.then(|| state.chosen.clone()),
        sets_checked: state.checked,
    }
}

/// Exhaustive check of every `S` with `τn <= |S| <= (1-τ)n`.
pub fn certify_exact<E: Expander>(target: &E, params: &ExpansionParams) -> Result<ExpansionCertificate> {
    certify_exact_with_limit(target, params, EXHAUSTIVE_LIMIT)
}

pub fn certify_exact_with_limit<E: Expander>(
    target: &E,
    params: &ExpansionParams,
    limit: usize,
) -> Result<ExpansionCertificate> {
    let n = target.order();
    if n > limit {
        return Err(Error::TooLargeForExactSweep { n, limit });
    }
    let candidates: Vec<usize> = (0..n).collect();
    Ok(sweep(target, &candidates, Thresholds::new(params, n), params))
}

/// Random search for a violating set. Never returns `Pass`.
pub fn refute_sampled<E: Expander>(
    target: &E,
    params: &ExpansionParams,
    trials: u64,
    seed: u64,
) -> Result<ExpansionCertificate> {
    let n = target.order();
    let th = Thresholds::new(params, n);
    let mut cert = ExpansionCertificate {
        verdict: Verdict::Inconclusive,
        nu: params.nu,
        tau: params.tau,
        witness: None,
        sets_checked: 0,
    };
    if th.window_is_empty() {
        return Ok(cert);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let size = rng.gen_range(th.min_size..=th.max_size);
        let mut s = index::sample(&mut rng, n, size).into_vec();
        s.sort_unstable();
        cert.sets_checked += 1;
        if target.robust_set(&s, params.nu)?.len() < s.len() + th.surplus {
            cert.verdict = Verdict::Fail;
            cert.witness = Some(s);
            break;
        }
    }
    Ok(cert)
}

/// Bipartite expansion: `S` ranges over side A only and `n` is the side size.
pub fn certify_bipartite(g: &Graph, part: &Bipartition, params: &ExpansionParams) -> Result<ExpansionCertificate> {
    let (a, b) = (part.side_a().len(), part.side_b().len());
    if a != b {
        return Err(Error::UnbalancedBipartition(a, b));
    }
    if part.n() != g.n() {
        return Err(Error::InvalidParameter("bipartition and graph differ in vertex count".into()));
    }
    if let Some((u, v)) = part.violating_edge(g) {
        return Err(Error::NotBipartite(u, v));
    }
    if a > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLargeForExactSweep { n: a, limit: EXHAUSTIVE_LIMIT });
    }
    Ok(sweep(g, part.side_a(), Thresholds::new(params, a), params))
}

/// Recompute a witness from scratch: true if `|RN_ν(S)| < |S| + νn` at scale `n`.
pub fn witness_violates<E: Expander>(target: &E, witness: &[usize], params: &ExpansionParams) -> Result<bool> {
    let rn = target.robust_set(witness, params.nu)?;
    let lhs = Exact::from_integer(BigInt::from(rn.len()));
    let rhs = Exact::from_integer(BigInt::from(witness.len()))
        + params.nu_exact() * Exact::from_integer(BigInt::from(target.order()));
    Ok(lhs < rhs)
}

/// `δ(G) >= (1/2 + eps)·n`: a cheap sufficient condition for robust expansion, not a certificate.
pub fn min_degree_sufficient(g: &Graph, eps: f64) -> Result<bool> {
    let half = Exact::new(1.into(), 2.into());
    let bound = (half + from_decimal(eps)?) * Exact::from_integer(BigInt::from(g.n()));
    Ok(Exact::from_integer(BigInt::from(g.min_degree())) >= bound)
}
