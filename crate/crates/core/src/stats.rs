//! Distributions of `|M ∩ N|`, the Poisson comparison, and disjointness of
//! independent uniform perfect matchings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{self, serialize_opt_exact, RationalJson};
use crate::graph::{FixedSet, Graph, Matching};
use crate::pm::{count_pm, enumerate_pm, stratify, PmCounter};
use crate::{Count, Exact};

/// Beyond this many ordered tuples the `r >= 3` disjointness enumeration gives up.
pub const TUPLE_ENUMERATION_LIMIT: u64 = 10_000_000;

/// A probability mass function on `0..len`, plus the mass lying beyond its
/// support (zero for exact distributions, the truncated tail for Poisson).
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T> {
    probs: Vec<T>,
    tail: T,
}

impl<T: Clone + Zero> Pmf<T> {
    pub fn new(probs: Vec<T>) -> Self {
        Pmf { probs, tail: T::zero() }
    }

    pub fn with_tail(probs: Vec<T>, tail: T) -> Self {
        Pmf { probs, tail }
    }

    pub fn prob(&self, k: usize) -> T {
        self.probs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn tail(&self) -> &T {
        &self.tail
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Largest `k` with non-zero mass.
    pub fn support_max(&self) -> Option<usize> {
        self.probs.iter().rposition(|p| !p.is_zero())
    }

    /// Total mass on the support, tail excluded.
    pub fn total(&self) -> T
    where
        for<'a> T: std::ops::AddAssign<&'a T>,
    {
        let mut sum = T::zero();
        for p in &self.probs {
            sum += p;
        }
        sum
    }
}

impl<T: ToPrimitive + Clone + Zero> Pmf<T> {
    pub fn to_float(&self) -> FloatPmf {
        Pmf {
            probs: self.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect(),
            tail: self.tail.to_f64().unwrap_or(f64::NAN),
        }
    }
}

pub type ExactPmf = Pmf<Exact>;
pub type FloatPmf = Pmf<f64>;

impl ExactPmf {
    pub fn mean(&self) -> Exact {
        let mut sum = Exact::zero();
        for (k, p) in self.probs.iter().enumerate() {
            sum += p * Exact::from_integer(BigInt::from(k));
        }
        sum
    }
}

/// `{"k": {"num", "den"}}` over the non-zero support.
impl Serialize for ExactPmf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (k, p) in self.probs.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            map.serialize_entry(&k.to_string(), &RationalJson::from(p))?;
        }
        map.end()
    }
}

impl Serialize for FloatPmf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (k, p) in self.probs.iter().enumerate() {
            map.serialize_entry(&k.to_string(), p)?;
        }
        map.end()
    }
}

fn regular_degree(g: &Graph) -> Result<usize> {
    match g.regularity() {
        Some(d) if d > 0 => Ok(d),
        _ => Err(Error::NotRegular),
    }
}

fn positive_count(g: &Graph) -> Result<Count> {
    let total = count_pm(g)?;
    if total.is_zero() {
        return Err(Error::NoPerfectMatching);
    }
    Ok(total)
}

/// `P(e ∈ M)` for uniform `M`: `pma(G - u - v) / pma(G)`.
pub fn edge_probability(g: &Graph, u: usize, v: usize) -> Result<Exact> {
    if !g.has_edge(u, v) {
        return Err(Error::EdgeNotPresent(u, v));
    }
    let total = positive_count(g)?;
    let with = crate::pm::count_pm_containing(g, &Matching::new([(u, v)])?)?;
    Ok(exact::ratio(&with, &total))
}

/// Exact law of `|M ∩ N|` for uniform `M`.
pub fn intersection_pmf(g: &Graph, fixed: &FixedSet) -> Result<ExactPmf> {
    fixed.check_within(g)?;
    let strata = stratify(g, fixed)?;
    let total = strata.total();
    if total.is_zero() {
        return Err(Error::NoPerfectMatching);
    }
    let mut probs: Vec<Exact> = strata.counts().iter().map(|c| exact::ratio(c, &total)).collect();
    while probs.len() > 1 && probs.last().is_some_and(Zero::is_zero) {
        probs.pop();
    }
    Ok(Pmf::new(probs))
}

/// `P(M ∩ N = ∅)` next to `e^{-λ}` with `λ = e(N)/d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvoidanceReport {
    #[serde(serialize_with = "crate::exact::serialize_exact")]
    pub exact: Exact,
    pub exact_f64: f64,
    pub lambda: f64,
    pub reference: f64,
    pub abs_error: f64,
}

pub fn avoidance_ratio(g: &Graph, fixed: &FixedSet) -> Result<AvoidanceReport> {
    fixed.check_within(g)?;
    let d = regular_degree(g)?;
    let total = positive_count(g)?;
    let avoiding = count_pm(&g.remove_edges(fixed.edges())?)?;
    let exact = exact::ratio(&avoiding, &total);
    let exact_f64 = exact::to_f64(&exact);
    let lambda = fixed.edge_count() as f64 / d as f64;
    let reference = (-lambda).exp();
    Ok(AvoidanceReport { exact, exact_f64, lambda, reference, abs_error: (exact_f64 - reference).abs() })
}

/// `e^{-λ} λ^k / k!` for `k = 0..=k_max`, computed in log space. The tail
/// records the mass above `k_max`, summed term by term.
pub fn poisson_pmf(lambda: f64, k_max: usize) -> Result<FloatPmf> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("Poisson mean must be finite and >= 0, got {lambda}")));
    }
    let term = |k: usize, ln_fact: f64| {
        if lambda == 0.0 {
            if k == 0 { 1.0 } else { 0.0 }
        } else {
            (-lambda + k as f64 * lambda.ln() - ln_fact).exp()
        }
    };
    let mut ln_fact = 0.0;
    let mut probs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        probs.push(term(k, ln_fact));
    }
    let mut tail = 0.0;
    let mut k = k_max + 1;
    loop {
        ln_fact += (k as f64).ln();
        let t = term(k, ln_fact);
        tail += t;
        if (k as f64 > lambda && t <= tail * 1e-17) || t == 0.0 && k as f64 > lambda || k > k_max + 100_000 {
            break;
        }
        k += 1;
    }
    Ok(Pmf::with_tail(probs, tail))
}

/// `k_max` for a Poisson comparison: the exact support plus `10λ + 20`.
pub fn default_k_max(support_max: usize, lambda: f64) -> usize {
    support_max + (10.0 * lambda).ceil() as usize + 20
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvDistance {
    /// `½ Σ |p(k) - q(k)|` over the union of the supports.
    pub value: f64,
    /// Mass outside the listed supports; the true distance is within `value ± slack`.
    pub slack: f64,
}

pub fn tv_distance<A, B>(p: &Pmf<A>, q: &Pmf<B>) -> TvDistance
where
    A: ToPrimitive + Clone + Zero,
    B: ToPrimitive + Clone + Zero,
{
    let (p, q) = (p.to_float(), q.to_float());
    let len = p.len().max(q.len());
    let sum: f64 = (0..len).map(|k| (p.prob(k) - q.prob(k)).abs()).sum();
    TvDistance { value: sum / 2.0, slack: p.tail + q.tail }
}

/// Exact total variation between two exact distributions.
pub fn tv_distance_exact(p: &ExactPmf, q: &ExactPmf) -> Exact {
    let len = p.len().max(q.len());
    let mut sum = Exact::zero();
    for k in 0..len {
        let diff = p.prob(k) - q.prob(k);
        sum += if diff < Exact::zero() { -diff } else { diff };
    }
    sum / Exact::from_integer(BigInt::from(2))
}

/// TV between the exact `|M ∩ N|` law and Poisson(`e(N)/d`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonComparison {
    pub exact: ExactPmf,
    pub exact_f64: FloatPmf,
    pub lambda: f64,
    pub poisson: FloatPmf,
    pub tv: TvDistance,
}

pub fn poisson_comparison(g: &Graph, fixed: &FixedSet, k_max: Option<usize>) -> Result<PoissonComparison> {
    let d = regular_degree(g)?;
    let exact = intersection_pmf(g, fixed)?;
    let lambda = fixed.edge_count() as f64 / d as f64;
    let k_max = k_max.unwrap_or_else(|| default_k_max(exact.support_max().unwrap_or(0), lambda));
    let poisson = poisson_pmf(lambda, k_max)?;
    let tv = tv_distance(&exact, &poisson);
    Ok(PoissonComparison { exact_f64: exact.to_float(), exact, lambda, poisson, tv })
}

/// Turns successive ratios `|M_k| / |M_{k-1}|`, `k = 1, 2, ...`, into the law of `|M ∩ N|`.
pub fn pmf_from_ratios(ratios: &[Exact]) -> Result<ExactPmf> {
    let mut weights = vec![Exact::one()];
    for r in ratios {
        if *r < Exact::zero() {
            return Err(Error::InvalidParameter("stratum ratios must be non-negative".into()));
        }
        let next = weights.last().expect("non-empty") * r;
        weights.push(next);
    }
    let total: Exact = weights.iter().cloned().sum();
    let mut probs: Vec<Exact> = weights.into_iter().map(|w| w / &total).collect();
    while probs.len() > 1 && probs.last().is_some_and(Zero::is_zero) {
        probs.pop();
    }
    Ok(Pmf::new(probs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisjointMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Probability that `r` independent uniform perfect matchings are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointReport {
    pub r: usize,
    #[serde(serialize_with = "serialize_opt_exact")]
    pub exact: Option<Exact>,
    pub estimate: f64,
    /// Binomial standard error of a Monte Carlo estimate.
    pub std_error: Option<f64>,
    pub samples: Option<u64>,
    /// `e^{-(n / 2d) C(r, 2)}`.
    pub reference: f64,
}

pub fn disjoint_probability(g: &Graph, r: usize, mode: DisjointMode) -> Result<DisjointReport> {
    if r == 0 {
        return Err(Error::InvalidParameter("need r >= 1".into()));
    }
    let d = regular_degree(g)?;
    let pairs = (r * (r - 1) / 2) as f64;
    let reference = (-(g.n() as f64 / (2.0 * d as f64)) * pairs).exp();
    match mode {
        DisjointMode::Exact => {
            let p = disjoint_exact(g, r)?;
            Ok(DisjointReport { r, estimate: exact::to_f64(&p), exact: Some(p), std_error: None, samples: None, reference })
        }
        DisjointMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()));
            }
            let counter = PmCounter::new(g)?;
            if counter.count().is_zero() {
                return Err(Error::NoPerfectMatching);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0u64;
            for _ in 0..samples {
                let mut drawn: Vec<Matching> = Vec::with_capacity(r);
                let mut ok = true;
                for _ in 0..r {
                    let m = counter.sample(&mut rng)?;
                    if ok && drawn.iter().any(|x| !x.is_disjoint_from(&m)) {
                        ok = false;
                    }
                    drawn.push(m);
                }
                hits += u64::from(ok);
            }
            let p = hits as f64 / samples as f64;
            let std_error = (p * (1.0 - p) / samples as f64).sqrt();
            Ok(DisjointReport { r, exact: None, estimate: p, std_error: Some(std_error), samples: Some(samples), reference })
        }
    }
}

fn disjoint_exact(g: &Graph, r: usize) -> Result<Exact> {
    let total = positive_count(g)?;
    if r == 1 {
        return Ok(Exact::one());
    }
    let denominator = num_traits::pow(total.clone(), r);
    if r == 2 {
        // Σ_M pma(G - M) over all M, divided by pma².
        let mut favourable = Count::zero();
        for m in enumerate_pm(g)? {
            favourable += count_pm(&g.remove_edges(m.edges().iter().copied())?)?;
        }
        return Ok(exact::ratio(&favourable, &denominator));
    }
    if denominator > Count::from(TUPLE_ENUMERATION_LIMIT) {
        return Err(Error::ExactInfeasible(format!(
            "{r} disjoint matchings need {denominator} ordered tuples (limit {TUPLE_ENUMERATION_LIMIT})"
        )));
    }
    let all: Vec<Matching> = enumerate_pm(g)?.collect();
    let compatible: Vec<Vec<usize>> = all
        .iter()
        .map(|a| (0..all.len()).filter(|&j| a.is_disjoint_from(&all[j])).collect())
        .collect();
    let candidates: Vec<usize> = (0..all.len()).collect();
    let favourable = ordered_cliques(&compatible, &candidates, r);
    Ok(exact::ratio(&Count::from(favourable), &denominator))
}

/// Ordered `r`-tuples of pairwise compatible indices drawn from `candidates`.
fn ordered_cliques(compatible: &[Vec<usize>], candidates: &[usize], r: usize) -> u64 {
    if r == 0 {
        return 1;
    }
    candidates
        .iter()
        .map(|&i| {
            let next: Vec<usize> = candidates.iter().copied().filter(|j| compatible[i].binary_search(j).is_ok()).collect();
            ordered_cliques(compatible, &next, r - 1)
        })
        .sum()
}

/// Per-edge frequency over `samples` uniform draws.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFrequencies {
    pub samples: u64,
    pub frequencies: BTreeMap<(usize, usize), f64>,
}

impl Serialize for EdgeFrequencies {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.frequencies.len()))?;
        for ((u, v), f) in &self.frequencies {
            map.serialize_entry(&format!("{u}-{v}"), f)?;
        }
        map.end()
    }
}

pub fn empirical_edge_freq(g: &Graph, samples: u64, seed: u64) -> Result<EdgeFrequencies> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let counter = PmCounter::new(g)?;
    if counter.count().is_zero() {
        return Err(Error::NoPerfectMatching);
    }
    let mut hits: BTreeMap<(usize, usize), u64> = g.edges().map(|e| (e, 0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        for e in counter.sample(&mut rng)?.edges() {
            *hits.get_mut(e).expect("sampled edge lies in G") += 1;
        }
    }
    let frequencies = hits.into_iter().map(|(e, h)| (e, h as f64 / samples as f64)).collect();
    Ok(EdgeFrequencies { samples, frequencies })
}

/// Pearson's statistic for observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_multipartite, cycle};

    fn q(n: i64, d: i64) -> Exact {
        Exact::new(n.into(), d.into())
    }

    fn pm(edges: &[(usize, usize)]) -> FixedSet {
        FixedSet::from(Matching::new(edges.iter().copied()).unwrap())
    }

    #[test]
    fn edge_probability_examples() {
        assert_eq!(edge_probability(&complete(4), 0, 1).unwrap(), q(1, 3));
        assert_eq!(edge_probability(&complete(6), 2, 5).unwrap(), q(1, 5));
        assert_eq!(edge_probability(&complete_multipartite(2, 3).unwrap(), 0, 3).unwrap(), q(1, 3));
        assert_eq!(edge_probability(&cycle(6), 0, 1).unwrap(), q(1, 2));
        assert!(matches!(edge_probability(&cycle(6), 0, 2), Err(Error::EdgeNotPresent(..))));
        let two_paths = Graph::new(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        assert_eq!(edge_probability(&two_paths, 0, 1), Err(Error::NoPerfectMatching));
    }

    #[test]
    fn intersection_pmf_examples() {
        let k6 = complete(6);
        let p = intersection_pmf(&k6, &pm(&[(0, 1), (2, 3), (4, 5)])).unwrap();
        assert_eq!(p.probs(), &[q(8, 15), q(6, 15), q(0, 1), q(1, 15)]);
        assert_eq!(p.total(), Exact::one());
        assert_eq!(p.mean(), q(3, 5));
        let none = intersection_pmf(&k6, &FixedSet::from(Matching::empty())).unwrap();
        assert_eq!(none.probs(), &[Exact::one()]);
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["1"]["num"], "2");
        assert_eq!(json["1"]["den"], "5");
        assert!(json.get("2").is_none());
    }

    #[test]
    fn avoidance_examples() {
        let oct = complete_multipartite(3, 2).unwrap();
        let r = avoidance_ratio(&oct, &pm(&[(0, 1)])).unwrap_err();
        assert!(matches!(r, Error::EdgeNotPresent(..)));
        let r = avoidance_ratio(&complete(6), &pm(&[(0, 1), (2, 3), (4, 5)])).unwrap();
        assert_eq!(r.exact, q(8, 15));
        assert!((r.reference - (-0.6f64).exp()).abs() < 1e-15);
        let path = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(avoidance_ratio(&path, &pm(&[(0, 1)])), Err(Error::NotRegular));
    }

    #[test]
    fn poisson_basics() {
        let p = poisson_pmf(0.0, 3).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(*p.tail(), 0.0);
        let p = poisson_pmf(2.0, 2).unwrap();
        assert!((p.prob(2) - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((p.total() + p.tail() - 1.0).abs() < 1e-12);
        assert!(poisson_pmf(-1.0, 3).is_err());
        assert!(poisson_pmf(f64::NAN, 3).is_err());
    }

    #[test]
    fn tv_properties() {
        let a = Pmf::new(vec![0.5, 0.5]);
        let b = Pmf::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(tv_distance(&a, &a).value, 0.0);
        assert_eq!(tv_distance(&a, &b).value, 1.0);
        let e1 = Pmf::new(vec![q(1, 2), q(1, 2)]);
        let e2 = Pmf::new(vec![q(1, 3), q(2, 3)]);
        assert_eq!(tv_distance_exact(&e1, &e2), q(1, 6));
        assert!((tv_distance(&e1, &e2).value - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ratios_round_trip() {
        let p = pmf_from_ratios(&[q(1, 2), q(0, 1)]).unwrap();
        assert_eq!(p.probs(), &[q(2, 3), q(1, 3)]);
        assert_eq!(pmf_from_ratios(&[]).unwrap().probs(), &[Exact::one()]);
        assert!(pmf_from_ratios(&[q(-1, 2)]).is_err());
    }

    #[test]
    fn disjoint_examples() {
        let k6 = complete(6);
        let r = disjoint_probability(&k6, 2, DisjointMode::Exact).unwrap();
        assert_eq!(r.exact, Some(q(8, 15)));
        assert!((r.reference - (-0.6f64).exp()).abs() < 1e-15);
        let one = disjoint_probability(&k6, 1, DisjointMode::Exact).unwrap();
        assert_eq!(one.exact, Some(Exact::one()));
        // K_4: the three perfect matchings are pairwise disjoint, so 3!/27.
        let three = disjoint_probability(&complete(4), 3, DisjointMode::Exact).unwrap();
        assert_eq!(three.exact, Some(q(6, 27)));
        assert!(matches!(
            disjoint_probability(&complete(12), 3, DisjointMode::Exact),
            Err(Error::ExactInfeasible(_))
        ));
        assert!(disjoint_probability(&k6, 0, DisjointMode::Exact).is_err());
        let mc = DisjointMode::MonteCarlo { samples: 0, seed: 1 };
        assert!(disjoint_probability(&k6, 2, mc).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let mode = DisjointMode::MonteCarlo { samples: 500, seed: 9 };
        let a = disjoint_probability(&complete(6), 2, mode).unwrap();
        let b = disjoint_probability(&complete(6), 2, mode).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 8.0 / 15.0).abs() < 4.0 * a.std_error.unwrap());
    }

    #[test]
    fn edge_frequencies() {
        let f = empirical_edge_freq(&complete(4), 3000, 3).unwrap();
        assert_eq!(f.frequencies.len(), 6);
        for p in f.frequencies.values() {
            assert!((p - 1.0 / 3.0).abs() < 0.05);
        }
        assert!(empirical_edge_freq(&complete(4), 0, 3).is_err());
        let json = serde_json::to_value(&f).unwrap();
        assert!(json.get("0-1").is_some());
    }

    #[test]
    fn chi_square_zero_on_exact_fit() {
        assert_eq!(chi_square(&[10, 10, 10], &[1.0 / 3.0; 3]), 0.0);
        assert!((chi_square(&[20, 10], &[0.5, 0.5]) - 10.0 / 3.0).abs() < 1e-12);
    }
}
