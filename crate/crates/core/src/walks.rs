//! Simple random walks on digraphs: exact transition matrices and their
//! powers, walk and path counts, and the mixing and sandwich bounds for
//! walks on regular robust outexpanders.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, serialize_exact, to_f64};
use crate::graph::{Digraph, Matching};
use crate::{Count, CountMatrix, Exact, ExactMatrix};

/// Largest dimension accepted for exact rational matrices.
pub const EXACT_DIMENSION_LIMIT: usize = 64;
/// Default number of extension steps `count_paths` may take.
pub const PATH_BUDGET: u64 = 100_000_000;

fn int(x: usize) -> Exact {
    Exact::from_integer(BigInt::from(x))
}

/// Square matrix of exact non-negative rationals whose rows each sum to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix {
    inner: ExactMatrix,
}

impl StochasticMatrix {
    pub fn new(m: ExactMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter("stochastic matrix must be square".into()));
        }
        if m.rows() > EXACT_DIMENSION_LIMIT {
            return Err(Error::DimensionTooLarge { n: m.rows(), limit: EXACT_DIMENSION_LIMIT });
        }
        if let Some((i, j, _)) = m.entries().find(|(_, _, x)| x.is_negative()) {
            return Err(Error::InvalidParameter(format!("negative entry at ({i}, {j})")));
        }
        if let Some(i) = m.row_sums().iter().position(|s| !s.is_one()) {
            return Err(Error::InvalidParameter(format!("row {i} does not sum to 1")));
        }
        Ok(StochasticMatrix { inner: m })
    }

    /// `n×n` matrix with every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        let e = Exact::new(1.into(), BigInt::from(n));
        StochasticMatrix { inner: ExactMatrix::from_fn(n, n, |_, _| e.clone()) }
    }

    pub fn n(&self) -> usize {
        self.inner.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &Exact {
        self.inner.get(i, j)
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.inner
    }

    /// Float copy of the entries.
    pub fn to_float(&self) -> crate::FloatMatrix {
        self.inner.map(to_f64)
    }
}

/// `P(u, v) = 1/d⁺(u)` for each arc `uv`.
pub fn transition_matrix(d: &Digraph) -> Result<StochasticMatrix> {
    let n = d.n();
    if n > EXACT_DIMENSION_LIMIT {
        return Err(Error::DimensionTooLarge { n, limit: EXACT_DIMENSION_LIMIT });
    }
    if let Some(v) = (0..n).find(|&v| d.out_degree(v) == 0) {
        return Err(Error::SinkVertex(v));
    }
    let m = ExactMatrix::from_fn(n, n, |u, v| {
        if d.has_arc(u, v) {
            Exact::new(1.into(), BigInt::from(d.out_degree(u)))
        } else {
            Exact::zero()
        }
    });
    Ok(StochasticMatrix { inner: m })
}

/// Exact `P^k`. Rows stay stochastic.
pub fn matrix_power(p: &StochasticMatrix, k: u64) -> StochasticMatrix {
    StochasticMatrix { inner: p.inner.pow(k) }
}

pub fn uniform_distribution(n: usize) -> Vec<Exact> {
    vec![Exact::new(1.into(), BigInt::from(n)); n]
}

/// `σP = σ`, exactly.
pub fn is_stationary(p: &StochasticMatrix, sigma: &[Exact]) -> bool {
    p.inner.left_mul_vec(sigma) == sigma
}

pub fn adjacency_matrix(d: &Digraph) -> CountMatrix {
    CountMatrix::from_fn(d.n(), d.n(), |u, v| if d.has_arc(u, v) { Count::one() } else { Count::zero() })
}

/// Entry `(u, v)` counts directed `(u, v)`-walks of length `ell`.
pub fn walk_count_matrix(d: &Digraph, ell: u64) -> CountMatrix {
    adjacency_matrix(d).pow(ell)
}

pub fn count_walks(d: &Digraph, u: usize, v: usize, ell: u64) -> Count {
    walk_count_matrix(d, ell).get(u, v).clone()
}

/// Directed `(u, v)`-paths of length `ell`; with a constraint matching, only
/// paths meeting each of its edges in at most one endpoint count.
pub fn count_paths(d: &Digraph, u: usize, v: usize, ell: usize, constraint: Option<&Matching>) -> Result<Count> {
    count_paths_with_budget(d, u, v, ell, constraint, PATH_BUDGET)
}

pub fn count_paths_with_budget(
    d: &Digraph,
    u: usize,
    v: usize,
    ell: usize,
    constraint: Option<&Matching>,
    budget: u64,
) -> Result<Count> {
    let n = d.n();
    for w in [u, v] {
        if w >= n {
            return Err(Error::VertexOutOfRange { vertex: w, n });
        }
    }
    if u == v {
        return Err(Error::InvalidParameter("count_paths needs distinct endpoints".into()));
    }
    let partner = constraint.map_or_else(|| vec![None; n], |m| m.partners(n));
    if partner[u] == Some(v) || ell == 0 || ell >= n {
        return Ok(Count::zero());
    }
    let mut search = PathSearch { d, target: v, partner, on_path: vec![false; n], steps: 0, budget, found: 0 };
    search.on_path[u] = true;
    search.extend(u, ell)?;
    Ok(Count::from(search.found))
}

struct PathSearch<'a> {
    d: &'a Digraph,
    target: usize,
    partner: Vec<Option<usize>>,
    on_path: Vec<bool>,
    steps: u64,
    budget: u64,
    found: u64,
}

impl PathSearch<'_> {
    /// Can `x` join the current path?
    fn admissible(&self, x: usize) -> bool {
        !self.on_path[x] && self.partner[x].map_or(true, |p| !self.on_path[p])
    }

    fn extend(&mut self, at: usize, remaining: usize) -> Result<()> {
        if remaining == 1 {
            self.steps += 1;
            if self.d.has_arc(at, self.target) && self.admissible(self.target) {
                self.found += 1;
            }
            return self.charge();
        }
        for &x in self.d.out_neighbours(at) {
            self.steps += 1;
            self.charge()?;
            if x == self.target || !self.admissible(x) {
                continue;
            }
            self.on_path[x] = true;
            self.extend(x, remaining - 1)?;
            self.on_path[x] = false;
        }
        Ok(())
    }

    fn charge(&self) -> Result<()> {
        if self.steps > self.budget {
            Err(Error::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }
}

/// Outcome of the walk lower bound `walks(u, v, ℓ) >= (νn)^{ℓ-1}` over all `u != v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkBoundReport {
    pub ell: u64,
    #[serde(serialize_with = "crate::exact::serialize_count")]
    pub min_walks: Count,
    #[serde(serialize_with = "serialize_exact")]
    pub bound: Exact,
    pub holds: bool,
}

pub fn walk_lower_bound(d: &Digraph, nu: &Exact, ell: u64) -> WalkBoundReport {
    let n = d.n();
    let walks = walk_count_matrix(d, ell);
    let min_walks = walks
        .entries()
        .filter(|&(u, v, _)| u != v)
        .map(|(_, _, c)| c.clone())
        .min()
        .unwrap_or_default();
    let bound = exact::exact_pow(&(nu * int(n)), ell.saturating_sub(1) as usize);
    let holds = exact::from_count(&min_walks) >= bound;
    WalkBoundReport { ell, min_walks, bound, holds }
}

/// Observed path count next to the regular-case estimate `δ^ℓ n^{ℓ-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCountReport {
    pub ell: usize,
    #[serde(serialize_with = "crate::exact::serialize_count")]
    pub paths: Count,
    pub reference: f64,
    pub relative_error: f64,
}

/// `δ` is the mean out-degree over `n`.
pub fn path_count_report(
    d: &Digraph,
    u: usize,
    v: usize,
    ell: usize,
    constraint: Option<&Matching>,
) -> Result<PathCountReport> {
    let paths = count_paths(d, u, v, ell, constraint)?;
    let n = d.n() as f64;
    let delta = d.arc_count() as f64 / (n * n);
    let reference = delta.powi(ell as i32) * n.powi(ell as i32 - 1);
    let observed = exact::count_to_f64(&paths);
    Ok(PathCountReport { ell, paths, reference, relative_error: (observed - reference) / reference })
}

/// `α = min P(i,j)/σ_k`, `β = max P(i,j)/σ_k` and the time `2 + 2α⁻¹ ln β`
/// after which the mixing bound applies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingParams {
    #[serde(serialize_with = "serialize_exact")]
    pub alpha: Exact,
    #[serde(serialize_with = "serialize_exact")]
    pub beta: Exact,
    pub threshold: f64,
}

fn ln_exact(r: &Exact) -> f64 {
    // ln(a/b) = ln a - ln b keeps huge numerators and denominators finite
    let ln_big = |x: &BigInt| {
        let bits = x.bits();
        let shift = bits.saturating_sub(960);
        let top = (x >> shift).to_f64().expect("fits");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(r.numer()) - ln_big(r.denom())
}

fn check_distribution(sigma: &[Exact], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::InvalidParameter(format!("distribution has {} entries, matrix has {n} rows", sigma.len())));
    }
    if sigma.iter().any(|s| !s.is_positive()) {
        return Err(Error::InvalidParameter("distribution entries must be positive".into()));
    }
    Ok(())
}

pub fn mixing_params(p: &StochasticMatrix, sigma: &[Exact]) -> Result<MixingParams> {
    check_distribution(sigma, p.n())?;
    if let Some((i, j, _)) = p.inner.entries().find(|(_, _, x)| x.is_zero()) {
        return Err(Error::ZeroEntry(i, j));
    }
    let min_p = p.inner.entries().map(|(_, _, x)| x).min().expect("non-empty");
    let max_p = p.inner.entries().map(|(_, _, x)| x).max().expect("non-empty");
    let min_s = sigma.iter().min().expect("non-empty");
    let max_s = sigma.iter().max().expect("non-empty");
    let alpha = min_p / max_s;
    let beta = max_p / min_s;
    let threshold = 2.0 + 2.0 / to_f64(&alpha) * ln_exact(&beta);
    Ok(MixingParams { alpha, beta, threshold })
}

/// Check `|P^t(j, i) - σ_i| <= (1 - α/2)^t σ_i` for every start `j` and state `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    pub t: u64,
    pub params: MixingParams,
    /// `t` is below the threshold, so the bound is not guaranteed.
    pub below_threshold: bool,
    /// Largest `|P^t(j, i) - σ_i| / σ_i`, from exact values.
    pub max_relative_deviation: f64,
    /// `(1 - α/2)^t`
    pub bound: f64,
    pub pass: bool,
}

/// Float slack for comparing an exact deviation with the float bound.
pub const MIXING_SLACK: f64 = 1e-12;

pub fn mixing_bound_check(p: &StochasticMatrix, sigma: &[Exact], t: u64) -> Result<MixingReport> {
    let params = mixing_params(p, sigma)?;
    Ok(mixing_report(&params, &p.inner.pow(t), sigma, t))
}

/// `mixing_bound_check` for every `t` in `from..=to`, stepping `P^t` by one
/// multiplication at a time.
pub fn mixing_bound_sweep(p: &StochasticMatrix, sigma: &[Exact], from: u64, to: u64) -> Result<Vec<MixingReport>> {
    let params = mixing_params(p, sigma)?;
    let mut pt = p.inner.pow(from);
    let mut out = Vec::new();
    for t in from..=to {
        if t > from {
            pt = pt.mul(&p.inner);
        }
        out.push(mixing_report(&params, &pt, sigma, t));
    }
    Ok(out)
}

fn mixing_report(params: &MixingParams, pt: &ExactMatrix, sigma: &[Exact], t: u64) -> MixingReport {
    let max_dev = pt
        .entries()
        .map(|(_, i, x)| ((x - &sigma[i]) / &sigma[i]).abs())
        .max()
        .unwrap_or_default();
    let max_relative_deviation = to_f64(&max_dev);
    let contraction = Exact::one() - &params.alpha / int(2);
    let bound = to_f64(&contraction).powf(t as f64);
    MixingReport {
        t,
        below_threshold: (t as f64) < params.threshold,
        max_relative_deviation,
        bound,
        pass: max_relative_deviation <= bound + MIXING_SLACK,
        params: params.clone(),
    }
}

/// Extremes of `n·P^k` against `[ν^{k-1} δ^{-k}, δ^{-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub k: u64,
    #[serde(serialize_with = "serialize_exact")]
    pub lower: Exact,
    #[serde(serialize_with = "serialize_exact")]
    pub upper: Exact,
    #[serde(serialize_with = "serialize_exact")]
    pub min_scaled: Exact,
    #[serde(serialize_with = "serialize_exact")]
    pub max_scaled: Exact,
    pub holds: bool,
}

pub fn sandwich_report(d: &Digraph, k: u64, nu: &Exact, delta: &Exact) -> Result<SandwichReport> {
    if d.regularity().is_none() {
        return Err(Error::NotRegular);
    }
    if !delta.is_positive() {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let pk = transition_matrix(d)?.inner.pow(k);
    let n = int(d.n());
    let min_scaled = pk.entries().map(|(_, _, x)| x).min().cloned().unwrap_or_default() * &n;
    let max_scaled = pk.entries().map(|(_, _, x)| x).max().cloned().unwrap_or_default() * &n;
    let lower = exact::exact_pow(nu, k.saturating_sub(1) as usize) / exact::exact_pow(delta, k as usize);
    let upper = delta.recip();
    let holds = min_scaled >= lower && max_scaled <= upper;
    Ok(SandwichReport { k, lower, upper, min_scaled, max_scaled, holds })
}

/// True iff every entry of `n·P^k` lies in `[ν^{k-1} δ^{-k}, δ^{-1}]`.
pub fn sandwich_check(d: &Digraph, k: u64, nu: &Exact, delta: &Exact) -> Result<bool> {
    Ok(sandwich_report(d, k, nu, delta)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Exact {
        Exact::new(n.into(), d.into())
    }

    #[test]
    fn transition_examples() {
        let p = transition_matrix(&Digraph::complete(4)).unwrap();
        for (i, j, x) in p.matrix().entries() {
            assert_eq!(*x, if i == j { q(0, 1) } else { q(1, 3) });
        }
        let cyc = transition_matrix(&Digraph::circulant(5, &[1]).unwrap()).unwrap();
        assert_eq!(*cyc.get(4, 0), q(1, 1));
        assert_eq!(*cyc.get(0, 2), q(0, 1));
        let sink = Digraph::new(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(transition_matrix(&sink), Err(Error::SinkVertex(2)));
    }

    #[test]
    fn power_examples() {
        let p = transition_matrix(&Digraph::complete(4)).unwrap();
        assert_eq!(matrix_power(&p, 0).matrix(), &ExactMatrix::identity(4));
        let p2 = matrix_power(&p, 2);
        for (i, j, x) in p2.matrix().entries() {
            assert_eq!(*x, if i == j { q(1, 3) } else { q(2, 9) });
        }
        assert!(StochasticMatrix::new(p2.matrix().clone()).is_ok());
    }

    #[test]
    fn stochastic_validation() {
        let bad = ExactMatrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 1), q(0, 1)]]);
        assert!(StochasticMatrix::new(bad).is_err());
        let neg = ExactMatrix::from_rows(vec![vec![q(3, 2), q(-1, 2)], vec![q(1, 1), q(0, 1)]]);
        assert!(StochasticMatrix::new(neg).is_err());
    }

    #[test]
    fn walk_examples() {
        let k4 = Digraph::complete(4);
        assert_eq!(count_walks(&k4, 2, 2, 0), Count::one());
        assert_eq!(count_walks(&k4, 1, 2, 0), Count::zero());
        assert_eq!(count_walks(&k4, 0, 1, 2), Count::from(2u32));
        let total: Count = (0..4).map(|v| count_walks(&k4, 0, v, 5)).sum();
        assert_eq!(total, Count::from(3u32.pow(5)));
    }

    #[test]
    fn path_examples() {
        let k4 = Digraph::complete(4);
        assert_eq!(count_paths(&k4, 0, 1, 2, None).unwrap(), Count::from(2u32));
        assert_eq!(count_paths(&k4, 0, 1, 1, None).unwrap(), Count::one());
        let c = Digraph::circulant(4, &[1]).unwrap();
        assert_eq!(count_paths(&c, 0, 2, 1, None).unwrap(), Count::zero());
        assert_eq!(count_paths(&k4, 0, 1, 0, None).unwrap(), Count::zero());
        assert!(count_paths(&k4, 1, 1, 2, None).is_err());
    }

    #[test]
    fn constrained_paths_match_filtered_enumeration() {
        // Oracle: list every length-3 path 0 -> 1 in the complete digraph on 5
        // vertices and drop those holding both ends of {2, 3}.
        let d = Digraph::complete(5);
        let constraint = Matching::new([(2, 3)]).unwrap();
        let mut all = 0;
        let mut kept = 0;
        for a in 2..5 {
            for b in 2..5 {
                if a != b {
                    all += 1;
                    if !([a, b].contains(&2) && [a, b].contains(&3)) {
                        kept += 1;
                    }
                }
            }
        }
        assert_eq!(count_paths(&d, 0, 1, 3, None).unwrap(), Count::from(all as u32));
        assert_eq!(count_paths(&d, 0, 1, 3, Some(&constraint)).unwrap(), Count::from(kept as u32));
        // Endpoints count too: a constraint edge joining u and v kills every path.
        let ends = Matching::new([(0, 1)]).unwrap();
        assert_eq!(count_paths(&d, 0, 1, 3, Some(&ends)).unwrap(), Count::zero());
    }

    #[test]
    fn path_budget() {
        let d = Digraph::complete(10);
        assert_eq!(count_paths_with_budget(&d, 0, 1, 6, None, 1000), Err(Error::BudgetExceeded(1000)));
    }

    #[test]
    fn mixing_params_examples() {
        let p = StochasticMatrix::uniform(5);
        let mp = mixing_params(&p, &uniform_distribution(5)).unwrap();
        assert_eq!((mp.alpha.clone(), mp.beta.clone(), mp.threshold), (q(1, 1), q(1, 1), 2.0));
        let report = mixing_bound_check(&p, &uniform_distribution(5), 3).unwrap();
        assert!(report.pass && !report.below_threshold);
        assert_eq!(report.max_relative_deviation, 0.0);

        // α = 1/2, β = 2 on a 2-state chain with σ = (1/2, 1/2).
        let m = ExactMatrix::from_rows(vec![vec![q(1, 4), q(3, 4)], vec![q(3, 4), q(1, 4)]]);
        let p = StochasticMatrix::new(m).unwrap();
        let mp = mixing_params(&p, &uniform_distribution(2)).unwrap();
        assert_eq!((mp.alpha, mp.beta), (q(1, 2), q(3, 2)));
        let m = ExactMatrix::from_rows(vec![vec![q(1, 4), q(3, 4)], vec![q(1, 4), q(3, 4)]]);
        let p = StochasticMatrix::new(m).unwrap();
        let sigma = [q(1, 4), q(3, 4)];
        let mp = mixing_params(&p, &sigma).unwrap();
        assert_eq!((mp.alpha.clone(), mp.beta.clone()), (q(1, 3), q(3, 1)));
        assert!((mp.threshold - (2.0 + 6.0 * 3f64.ln())).abs() < 1e-12);

        let zero = transition_matrix(&Digraph::complete(3)).unwrap();
        assert_eq!(mixing_params(&zero, &uniform_distribution(3)), Err(Error::ZeroEntry(0, 0)));
    }

    #[test]
    fn threshold_for_half_and_two() {
        // α = 1/2, β = 2 gives 2 + 4 ln 2.
        let alpha = q(1, 2);
        let beta = q(2, 1);
        let threshold = 2.0 + 2.0 / to_f64(&alpha) * ln_exact(&beta);
        assert!((threshold - 4.772588722239781).abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_single_checks() {
        let p = matrix_power(&transition_matrix(&Digraph::circulant(7, &[1, 3]).unwrap()).unwrap(), 6);
        let sigma = uniform_distribution(7);
        let sweep = mixing_bound_sweep(&p, &sigma, 2, 6).unwrap();
        assert_eq!(sweep.len(), 5);
        for r in sweep {
            assert_eq!(r, mixing_bound_check(&p, &sigma, r.t).unwrap());
        }
    }

    #[test]
    fn stationarity_of_regular_walks() {
        let d = Digraph::circulant(7, &[1, 3]).unwrap();
        let p = transition_matrix(&d).unwrap();
        assert!(is_stationary(&p, &uniform_distribution(7)));
    }

    #[test]
    fn sandwich_examples() {
        // Complete digraph on 6: P² has diagonal 1/5 and off-diagonal 4/25, so
        // n·P² ranges over [24/25, 6/5]; δ = 5/6 gives upper bound 6/5.
        let d = Digraph::complete(6);
        let report = sandwich_report(&d, 2, &q(1, 10), &q(5, 6)).unwrap();
        assert_eq!((report.min_scaled.clone(), report.max_scaled.clone()), (q(24, 25), q(6, 5)));
        assert!(report.holds);
        let skew = Digraph::new(3, [(0, 1), (0, 2), (1, 2), (2, 0)]).unwrap();
        assert_eq!(sandwich_check(&skew, 2, &q(1, 10), &q(1, 2)), Err(Error::NotRegular));
    }
}
