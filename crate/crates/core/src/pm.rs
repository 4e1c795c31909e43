//! Exact counting, enumeration, stratification and uniform sampling of
//! perfect matchings.
//!
//! Counting is a dynamic program over vertex bitmasks: the state is the set
//! of unmatched vertices and each step matches the lowest unmatched vertex to
//! one of its unmatched neighbours. The table is filled forward one vertex at
//! a time, so only states whose vertices below the current one are all
//! matched are ever stored.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::RandBigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FixedSet, Graph, Matching};
use crate::Count;

/// Default vertex limit for counting.
pub const COUNT_LIMIT: usize = 26;
/// Default cap on the number of matchings an enumeration may produce.
pub const ENUMERATION_CAP: u64 = 2_000_000;

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

#[inline]
fn lowest(mask: u64) -> usize {
    mask.trailing_zeros() as usize
}

fn all_vertices(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

fn check_size(g: &Graph, limit: usize) -> Result<()> {
    let limit = limit.min(64);
    if g.n() > limit {
        return Err(Error::TooLarge { n: g.n(), limit });
    }
    Ok(())
}

/// Number of perfect matchings of the subgraph induced by `alive`.
fn count_alive(masks: &[u64], alive: u64) -> Count {
    if alive.count_ones() % 2 == 1 {
        return Count::zero();
    }
    // key: vertices above the current one that are already matched
    let mut layer: HashMap<u64, Count> = HashMap::from([(0, Count::one())]);
    let mut rest = alive;
    while rest != 0 {
        let u = lowest(rest);
        rest &= !bit(u);
        let mut next: HashMap<u64, Count> = HashMap::with_capacity(layer.len());
        for (matched, ways) in layer {
            if matched & bit(u) != 0 {
                *next.entry(matched & !bit(u)).or_default() += ways;
                continue;
            }
            let mut options = masks[u] & rest & !matched;
            while options != 0 {
                let v = lowest(options);
                options &= !bit(v);
                *next.entry(matched | bit(v)).or_default() += &ways;
            }
        }
        layer = next;
    }
    layer.remove(&0).unwrap_or_default()
}

/// Counting over one fixed graph, with vertex-deleted subcounts memoised by
/// surviving-vertex bitmask. Safe to share between threads.
#[derive(Debug)]
pub struct PmCounter {
    masks: Vec<u64>,
    cache: RwLock<HashMap<u64, Count>>,
}

impl PmCounter {
    pub fn new(g: &Graph) -> Result<Self> {
        Self::with_limit(g, COUNT_LIMIT)
    }

    pub fn with_limit(g: &Graph, limit: usize) -> Result<Self> {
        check_size(g, limit)?;
        Ok(PmCounter { masks: g.neighbour_masks(), cache: RwLock::new(HashMap::new()) })
    }

    pub fn n(&self) -> usize {
        self.masks.len()
    }

    /// Perfect matchings of the subgraph induced by the vertices in `alive`.
    pub fn count_alive(&self, alive: u64) -> Count {
        if let Some(c) = self.cache.read().expect("cache lock").get(&alive) {
            return c.clone();
        }
        let c = count_alive(&self.masks, alive);
        self.cache.write().expect("cache lock").entry(alive).or_insert(c).clone()
    }

    pub fn count(&self) -> Count {
        self.count_alive(all_vertices(self.n()))
    }

    /// Draw one perfect matching uniformly at random.
    ///
    /// The lowest unmatched vertex `u` is matched to `v` with probability
    /// `pma(G - {u, v} - matched) / pma(G - matched)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Matching> {
        let mut alive = all_vertices(self.n());
        if self.count_alive(alive).is_zero() {
            return Err(Error::NoPerfectMatching);
        }
        let mut edges = Vec::with_capacity(self.n() / 2);
        while alive != 0 {
            let u = lowest(alive);
            let total = self.count_alive(alive);
            let mut ticket = rng.gen_biguint_below(&total);
            let mut options = self.masks[u] & alive & !bit(u);
            loop {
                let v = lowest(options);
                options &= !bit(v);
                let sub = self.count_alive(alive & !bit(u) & !bit(v));
                if ticket < sub {
                    edges.push((u, v));
                    alive &= !(bit(u) | bit(v));
                    break;
                }
                ticket -= sub;
            }
        }
        Ok(Matching::from_sorted_unchecked(edges))
    }
}

/// Exact number of perfect matchings. Zero for odd `n`.
pub fn count_pm(g: &Graph) -> Result<Count> {
    count_pm_with_limit(g, COUNT_LIMIT)
}

pub fn count_pm_with_limit(g: &Graph, limit: usize) -> Result<Count> {
    check_size(g, limit)?;
    Ok(count_alive(&g.neighbour_masks(), all_vertices(g.n())))
}

/// Perfect matchings of `g` that contain every edge of `f`, i.e. `pma(G - V(F))`.
pub fn count_pm_containing(g: &Graph, f: &Matching) -> Result<Count> {
    check_size(g, COUNT_LIMIT)?;
    if !f.is_sub_matching_of(g) {
        return Err(Error::NotASubMatching);
    }
    let alive = f.vertices().fold(all_vertices(g.n()), |m, v| m & !bit(v));
    Ok(count_alive(&g.neighbour_masks(), alive))
}

/// One uniform perfect matching. Builds a fresh counter; reuse a [`PmCounter`]
/// when drawing repeatedly.
pub fn sample_pm<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<Matching> {
    PmCounter::new(g)?.sample(rng)
}

/// Lazily enumerates perfect matchings in lexicographic order of their
/// sorted edge lists.
#[derive(Debug, Clone)]
pub struct PmIter {
    masks: Vec<u64>,
    alive: u64,
    /// (u, v, untried partners of u)
    path: Vec<(usize, usize, u64)>,
    started: bool,
    done: bool,
}

impl PmIter {
    fn new(g: &Graph) -> Self {
        PmIter {
            masks: g.neighbour_masks(),
            alive: all_vertices(g.n()),
            path: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn take(&mut self, u: usize, options: u64) {
        let v = lowest(options);
        self.path.push((u, v, options & !bit(v)));
        self.alive &= !(bit(u) | bit(v));
    }

    /// Undo frames until one has an untried partner, and switch to it.
    fn backtrack(&mut self) -> bool {
        while let Some((u, v, rest)) = self.path.pop() {
            self.alive |= bit(u) | bit(v);
            if rest != 0 {
                self.take(u, rest);
                return true;
            }
        }
        false
    }
}

impl Iterator for PmIter {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        if self.started && !self.backtrack() {
            self.done = true;
            return None;
        }
        self.started = true;
        loop {
            if self.alive == 0 {
                let edges = self.path.iter().map(|&(u, v, _)| (u, v)).collect();
                return Some(Matching::from_sorted_unchecked(edges));
            }
            let u = lowest(self.alive);
            let options = self.masks[u] & self.alive & !bit(u);
            if options != 0 {
                self.take(u, options);
            } else if !self.backtrack() {
                self.done = true;
                return None;
            }
        }
    }
}

/// Every perfect matching exactly once, in canonical order.
pub fn enumerate_pm(g: &Graph) -> Result<PmIter> {
    enumerate_pm_with_cap(g, ENUMERATION_CAP)
}

pub fn enumerate_pm_with_cap(g: &Graph, cap: u64) -> Result<PmIter> {
    let total = count_pm(g)?;
    if total > Count::from(cap) {
        return Err(Error::TooManyMatchings { count: total.to_string(), cap });
    }
    Ok(PmIter::new(g))
}

/// `counts[k]` is the number of perfect matchings sharing exactly `k` edges with `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct StrataCounts {
    #[serde(serialize_with = "crate::exact::serialize_count_map")]
    counts: Vec<Count>,
}

impl StrataCounts {
    pub fn get(&self, k: usize) -> Count {
        self.counts.get(k).cloned().unwrap_or_default()
    }

    /// Counts for `k = 0..=max_k`, where `max_k = min(e(N), n/2)`.
    pub fn counts(&self) -> &[Count] {
        &self.counts
    }

    pub fn max_k(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn total(&self) -> Count {
        self.counts.iter().sum()
    }

    /// Largest `k` with a non-empty stratum.
    pub fn support_max(&self) -> Option<usize> {
        self.counts.iter().rposition(|c| !c.is_zero())
    }
}

/// Sizes of all strata `M_k`, by the counting program with the running
/// intersection size carried in the state.
pub fn stratify(g: &Graph, fixed: &FixedSet) -> Result<StrataCounts> {
    check_size(g, COUNT_LIMIT)?;
    fixed.check_within(g)?;
    let n = g.n();
    let width = fixed.edge_count().min(n / 2) + 1;
    let masks = g.neighbour_masks();
    let mut fixed_masks = vec![0u64; n];
    for (u, v) in fixed.edges() {
        fixed_masks[u] |= bit(v);
        fixed_masks[v] |= bit(u);
    }
    if n % 2 == 1 {
        return Ok(StrataCounts { counts: vec![Count::zero(); width] });
    }

    let mut start = vec![Count::zero(); width];
    start[0] = Count::one();
    let mut layer: HashMap<u64, Vec<Count>> = HashMap::from([(0, start)]);
    let mut rest = all_vertices(n);
    while rest != 0 {
        let u = lowest(rest);
        rest &= !bit(u);
        let mut next: HashMap<u64, Vec<Count>> = HashMap::with_capacity(layer.len());
        for (matched, by_k) in layer {
            if matched & bit(u) != 0 {
                add_into(next.entry(matched & !bit(u)).or_insert_with(|| vec![Count::zero(); width]), &by_k, 0);
                continue;
            }
            let mut options = masks[u] & rest & !matched;
            while options != 0 {
                let v = lowest(options);
                options &= !bit(v);
                let shift = usize::from(fixed_masks[u] & bit(v) != 0);
                add_into(next.entry(matched | bit(v)).or_insert_with(|| vec![Count::zero(); width]), &by_k, shift);
            }
        }
        layer = next;
    }
    let counts = layer.remove(&0).unwrap_or_else(|| vec![Count::zero(); width]);
    Ok(StrataCounts { counts })
}

fn add_into(target: &mut [Count], source: &[Count], shift: usize) {
    for (k, c) in source.iter().enumerate() {
        if !c.is_zero() {
            target[k + shift] += c;
        }
    }
}

/// Perfect matchings grouped by how many fixed edges they contain, in canonical order.
pub fn enumerate_strata(g: &Graph, fixed: &FixedSet) -> Result<Vec<Vec<Matching>>> {
    fixed.check_within(g)?;
    let width = fixed.edge_count().min(g.n() / 2) + 1;
    let mut strata = vec![Vec::new(); width];
    for m in enumerate_pm(g)? {
        let k = m.edges().iter().filter(|&&(u, v)| fixed.contains(u, v)).count();
        strata[k].push(m);
    }
    Ok(strata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_multipartite, cycle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: u64) -> Count {
        Count::from(x)
    }

    fn m(edges: &[(usize, usize)]) -> Matching {
        Matching::new(edges.iter().copied()).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_pm(&complete(4)).unwrap(), c(3));
        assert_eq!(count_pm(&complete(6)).unwrap(), c(15));
        assert_eq!(count_pm(&complete_multipartite(2, 3).unwrap()).unwrap(), c(6));
        assert_eq!(count_pm(&cycle(6)).unwrap(), c(2));
        assert_eq!(count_pm(&complete_multipartite(3, 2).unwrap()).unwrap(), c(8));
        assert_eq!(count_pm(&complete(5)).unwrap(), c(0));
        assert_eq!(count_pm(&Graph::empty(0)).unwrap(), c(1));
    }

    #[test]
    fn count_double_factorial_up_to_limit() {
        let mut expected = 1u64;
        for n in (2..=COUNT_LIMIT).step_by(2) {
            expected *= (n - 1) as u64;
            if n <= 20 {
                assert_eq!(count_pm(&complete(n)).unwrap(), c(expected), "K_{n}");
            }
        }
        assert_eq!(expected, 7_905_853_580_625);
        assert!(matches!(count_pm(&complete(27)), Err(Error::TooLarge { n: 27, limit: 26 })));
    }

    #[test]
    fn enumerate_examples() {
        let k4: Vec<_> = enumerate_pm(&complete(4)).unwrap().collect();
        assert_eq!(k4, vec![m(&[(0, 1), (2, 3)]), m(&[(0, 2), (1, 3)]), m(&[(0, 3), (1, 2)])]);
        let c4: Vec<_> = enumerate_pm(&cycle(4)).unwrap().collect();
        assert_eq!(c4, vec![m(&[(0, 1), (2, 3)]), m(&[(0, 3), (1, 2)])]);
        assert_eq!(enumerate_pm(&complete(5)).unwrap().count(), 0);
        assert_eq!(enumerate_pm(&Graph::empty(3)).unwrap().count(), 0);
    }

    #[test]
    fn enumerate_respects_cap() {
        let err = enumerate_pm_with_cap(&complete(8), 100).unwrap_err();
        assert_eq!(err, Error::TooManyMatchings { count: "105".into(), cap: 100 });
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let g = complete_multipartite(4, 2).unwrap();
        let all: Vec<_> = enumerate_pm(&g).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|pm| pm.is_perfect_in(&g)));
        assert_eq!(Count::from(all.len()), count_pm(&g).unwrap());
    }

    #[test]
    fn containing_examples() {
        assert_eq!(count_pm_containing(&complete(4), &m(&[(0, 1)])).unwrap(), c(1));
        assert_eq!(count_pm_containing(&complete(6), &m(&[(0, 1)])).unwrap(), c(3));
        let oct = complete_multipartite(3, 2).unwrap();
        assert_eq!(count_pm_containing(&oct, &m(&[(0, 2)])).unwrap(), c(2));
        assert_eq!(count_pm_containing(&oct, &m(&[(0, 1)])), Err(Error::NotASubMatching));
    }

    #[test]
    fn sampler_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let unique = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        for _ in 0..20 {
            assert_eq!(sample_pm(&unique, &mut rng).unwrap(), m(&[(0, 1), (2, 3)]));
        }
        assert_eq!(sample_pm(&Graph::new(4, [(0, 1)]).unwrap(), &mut rng), Err(Error::NoPerfectMatching));
        assert_eq!(sample_pm(&complete(3), &mut rng), Err(Error::NoPerfectMatching));
    }

    #[test]
    fn sampler_reaches_every_matching_of_c4() {
        let counter = PmCounter::new(&cycle(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hits = (0..400).filter(|_| counter.sample(&mut rng).unwrap().contains(0, 1)).count();
        // Binomial(400, 1/2): 3σ = 30.
        assert!((170..=230).contains(&hits), "{hits}");
    }

    #[test]
    fn stratify_examples() {
        let k4 = complete(4);
        let one = FixedSet::from(m(&[(0, 1)]));
        assert_eq!(stratify(&k4, &one).unwrap().counts(), &[c(2), c(1)]);
        let pm = FixedSet::from(m(&[(0, 1), (2, 3)]));
        assert_eq!(stratify(&k4, &pm).unwrap().counts(), &[c(2), c(0), c(1)]);
        let none = FixedSet::from(Matching::empty());
        assert_eq!(stratify(&complete(6), &none).unwrap().counts(), &[c(15)]);
        let outside = FixedSet::from(m(&[(0, 1)]));
        assert!(stratify(&cycle(6), &FixedSet::from(m(&[(0, 2)]))).is_err());
        assert_eq!(stratify(&complete(5), &outside).unwrap().total(), c(0));
    }

    #[test]
    fn stratify_regular_subgraph() {
        // N = the 2-factor C_6 inside K_6: strata by enumeration.
        let g = complete(6);
        let fixed = FixedSet::from(cycle(6));
        let strata = stratify(&g, &fixed).unwrap();
        let by_enum = enumerate_strata(&g, &fixed).unwrap();
        let sizes: Vec<Count> = by_enum.iter().map(|s| Count::from(s.len())).collect();
        assert_eq!(strata.counts(), &sizes[..]);
        assert_eq!(strata.total(), c(15));
    }

    #[test]
    fn strata_json() {
        let s = stratify(&complete(4), &FixedSet::from(m(&[(0, 1), (2, 3)]))).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"0":"2","1":"0","2":"1"}"#);
    }
}
