use matchlab::exact::from_count;
use matchlab::expansion::{certify_exact, robust_neighbourhood, ExpansionParams, Verdict};
use matchlab::graph::io;
use matchlab::graph::{complete, complete_multipartite, random_regular};
use matchlab::pm::{count_pm, count_pm_containing, enumerate_pm, sample_pm, stratify};
use matchlab::stats::{avoidance_ratio, edge_probability, intersection_pmf, pmf_from_ratios, tv_distance};
use matchlab::switching::{build_aux_digraph, ratio_report};
use matchlab::walks::{count_paths, count_walks, matrix_power, transition_matrix, uniform_distribution, is_stationary};
use matchlab::{Count, Digraph, Exact, FixedSet, FloatPmf, Graph, Matching, Pmf};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

fn even_graph_with_subgraph(max_half: usize) -> impl Strategy<Value = (Graph, FixedSet)> {
    (1..=max_half, any::<u64>()).prop_map(|(half, seed)| {
        use rand::Rng;
        let n = 2 * half;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.gen_range(0.4..1.0);
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
        let g = Graph::new(n, edges).unwrap();
        let fixed: Vec<_> = g.edges().filter(|_| rng.gen_bool(0.3)).collect();
        let fixed = FixedSet::from(Graph::new(n, fixed).unwrap());
        (g, fixed)
    })
}

fn digraph_strategy() -> impl Strategy<Value = Digraph> {
    (2usize..=7).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let arcs: Vec<_> = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v && bits[u * n + v])
                .collect();
            Digraph::new(n, arcs).unwrap()
        })
    })
}

fn pmf_strategy() -> impl Strategy<Value = FloatPmf> {
    proptest::collection::vec(0.0f64..1.0, 1..6).prop_map(|w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        Pmf::new(w.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graphs_are_simple_and_symmetric(g in graph_strategy(12)) {
        prop_assert!(g.check_invariants());
        let text = io::write(&g, None);
        prop_assert_eq!(io::parse(&text).unwrap().graph, g);
    }

    #[test]
    fn remove_then_add_restores((g, fixed) in even_graph_with_subgraph(5)) {
        let removed = g.remove_edges(fixed.edges()).unwrap();
        prop_assert_eq!(removed.edge_count() + fixed.edge_count(), g.edge_count());
        prop_assert_eq!(removed.add_edges(fixed.edges()).unwrap(), g);
    }

    #[test]
    fn count_matches_enumeration(g in graph_strategy(10)) {
        let listed: Vec<Matching> = enumerate_pm(&g).unwrap().collect();
        prop_assert_eq!(count_pm(&g).unwrap(), Count::from(listed.len()));
        for m in &listed {
            prop_assert!(m.is_perfect_in(&g));
        }
        let mut sorted = listed.clone();
        sorted.sort_by(|a, b| a.edges().cmp(b.edges()));
        sorted.dedup();
        prop_assert_eq!(sorted, listed);
    }

    #[test]
    fn every_vertex_is_matched_once((g, _) in even_graph_with_subgraph(5)) {
        let total = count_pm(&g).unwrap();
        for u in 0..g.n() {
            let mut sum = Count::zero();
            for &v in g.neighbours(u) {
                sum += count_pm_containing(&g, &Matching::new([(u, v)]).unwrap()).unwrap();
            }
            prop_assert_eq!(&sum, &total);
        }
    }

    #[test]
    fn strata_double_count((g, fixed) in even_graph_with_subgraph(5)) {
        let strata = stratify(&g, &fixed).unwrap();
        prop_assert_eq!(strata.total(), count_pm(&g).unwrap());
        let weighted: Count = strata.counts().iter().enumerate().map(|(k, c)| c * Count::from(k)).sum();
        let mut per_edge = Count::zero();
        for (u, v) in fixed.edges() {
            per_edge += count_pm_containing(&g, &Matching::new([(u, v)]).unwrap()).unwrap();
        }
        prop_assert_eq!(weighted, per_edge);
    }

    #[test]
    fn pmf_mean_is_sum_of_edge_probabilities((g, fixed) in even_graph_with_subgraph(5)) {
        prop_assume!(!count_pm(&g).unwrap().is_zero());
        let pmf = intersection_pmf(&g, &fixed).unwrap();
        prop_assert_eq!(pmf.total(), Exact::one());
        let mut mean = Exact::zero();
        for (u, v) in fixed.edges() {
            mean += edge_probability(&g, u, v).unwrap();
        }
        prop_assert_eq!(pmf.mean(), mean);
    }

    #[test]
    fn robust_neighbourhood_is_monotone(g in graph_strategy(10), mask in any::<u16>(), extra in any::<u16>()) {
        let n = g.n();
        let small: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let large: Vec<usize> = (0..n).filter(|&v| (mask | extra) >> v & 1 == 1).collect();
        let a = robust_neighbourhood(&g, &small, 0.2).unwrap();
        let b = robust_neighbourhood(&g, &large, 0.2).unwrap();
        prop_assert!(a.iter().all(|v| b.contains(v)));
    }

    #[test]
    fn certification_is_monotone_in_nu(g in graph_strategy(9)) {
        let grid = [0.05, 0.1, 0.15, 0.2, 0.25];
        let verdicts: Vec<Verdict> = grid
            .iter()
            .map(|&nu| certify_exact(&g, &ExpansionParams::new(nu, 0.3).unwrap()).unwrap().verdict)
            .collect();
        if let Some(first_pass) = verdicts.iter().rposition(|v| *v == Verdict::Pass) {
            prop_assert!(verdicts[..first_pass].iter().all(|v| *v == Verdict::Pass), "{:?}", verdicts);
        }
    }

    #[test]
    fn walks_dominate_paths(d in digraph_strategy(), ell in 1usize..5) {
        let n = d.n();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let walks = count_walks(&d, u, v, ell as u64);
                    let paths = count_paths(&d, u, v, ell, None).unwrap();
                    prop_assert!(walks >= paths);
                }
            }
        }
    }

    #[test]
    fn powers_stay_stochastic(d in digraph_strategy(), k in 0u64..5) {
        prop_assume!((0..d.n()).all(|v| d.out_degree(v) > 0));
        let p = matrix_power(&transition_matrix(&d).unwrap(), k);
        prop_assert!(p.matrix().row_sums().iter().all(One::is_one));
    }

    #[test]
    fn tv_is_a_metric(p in pmf_strategy(), q in pmf_strategy(), r in pmf_strategy()) {
        let pq = tv_distance(&p, &q).value;
        prop_assert!((pq - tv_distance(&q, &p).value).abs() < 1e-12);
        prop_assert!(pq <= tv_distance(&p, &r).value + tv_distance(&r, &q).value + 1e-12);
        prop_assert!(tv_distance(&p, &p).value.abs() < 1e-12);
    }
}

#[test]
fn regular_walk_counts_are_scaled_transitions() {
    for d in [Digraph::complete(5), Digraph::circulant(7, &[1, 2, 5]).unwrap()] {
        let deg = d.regularity().unwrap();
        let p = transition_matrix(&d).unwrap();
        assert!(is_stationary(&p, &uniform_distribution(d.n())));
        for ell in 1..5u64 {
            let pl = matrix_power(&p, ell);
            let scale = Exact::from_integer(num_traits::pow(deg, ell as usize).into());
            for (u, v, x) in pl.matrix().entries() {
                assert_eq!(from_count(&count_walks(&d, u, v, ell)), x * &scale);
            }
        }
    }
}

#[test]
fn complete_graphs_pass_for_small_nu() {
    for n in 4..=9 {
        let nu = 1.0 / n as f64;
        for tau in [0.2, 0.25, 0.3, 0.4, 0.45] {
            if tau * (n as f64) < 2.0 {
                continue;
            }
            let cert = certify_exact(&complete(n), &ExpansionParams::new(nu, tau).unwrap()).unwrap();
            assert_eq!(cert.verdict, Verdict::Pass, "K_{n}, tau {tau}");
        }
    }
}

#[test]
fn avoidance_is_the_zero_stratum() {
    let g = complete_multipartite(4, 2).unwrap();
    let pm = FixedSet::from(Matching::new([(0, 2), (1, 4), (3, 6), (5, 7)]).unwrap());
    let pmf = intersection_pmf(&g, &pm).unwrap();
    assert_eq!(avoidance_ratio(&g, &pm).unwrap().exact, pmf.prob(0));
}

#[test]
fn ratios_rebuild_the_intersection_law() {
    // A full perfect matching leaves stratum n/2 - 1 empty, which breaks the
    // chain of ratios, so the fixed matchings here are partial.
    let cases = [
        (complete(8), FixedSet::from(Matching::new([(0, 1), (2, 3), (4, 5)]).unwrap())),
        (complete_multipartite(3, 2).unwrap(), FixedSet::from(Matching::new([(0, 2), (1, 4)]).unwrap())),
        (random_regular(8, 5, 3).unwrap(), FixedSet::from(random_regular(8, 2, 4).unwrap())),
    ];
    for (g, fixed) in cases {
        let fixed = match fixed {
            FixedSet::Subgraph(h) => {
                let common: Vec<_> = h.edges().filter(|&(u, v)| g.has_edge(u, v)).collect();
                FixedSet::from(Graph::new(g.n(), common).unwrap())
            }
            m => m,
        };
        let pmf = intersection_pmf(&g, &fixed).unwrap();
        let mut ratios = Vec::new();
        for k in 1..pmf.len() {
            ratios.push(ratio_report(&g, &fixed, k, 2).unwrap().exact_ratio);
        }
        assert_eq!(pmf_from_ratios(&ratios).unwrap(), pmf);
    }
}

#[test]
fn ratio_report_degree_identity() {
    let g = complete(8);
    let fixed = FixedSet::from(Matching::new([(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap());
    for k in 1..=3 {
        for ell in 2..=4 {
            let r = ratio_report(&g, &fixed, k, ell).unwrap();
            assert!(r.double_count_holds);
            if r.h_edges > 0 {
                assert_eq!(r.degree_ratio.as_ref(), Some(&r.exact_ratio));
            }
        }
    }
}

#[test]
fn aux_digraph_degree_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, d) in [(8, 3), (8, 5), (10, 4), (10, 7), (12, 5)] {
        for seed in 0..4 {
            let g = random_regular(n, d, seed).unwrap();
            let mp = sample_pm(&g, &mut rng).unwrap();
            let fixed_graph = random_regular(n, 2, seed + 100).unwrap();
            let common: Vec<_> = fixed_graph.edges().filter(|&(u, v)| g.has_edge(u, v)).chain(mp.edges()[..1].iter().copied()).collect();
            let fixed = FixedSet::from(Graph::new(n, common).unwrap());
            let r = fixed.max_degree();
            let k = mp.edges().iter().filter(|&&(u, v)| fixed.contains(u, v)).count();
            let aux = build_aux_digraph(&g, &fixed, &mp).unwrap();
            let lo = d.saturating_sub(2 * k + r + 1);
            for x in 0..aux.digraph.n() {
                for deg in [aux.digraph.out_degree(x), aux.digraph.in_degree(x)] {
                    assert!(deg >= lo && deg < d, "n={n} d={d} k={k} r={r}: degree {deg}");
                }
            }
        }
    }
}

#[test]
fn sampler_tracks_edge_probabilities() {
    let g = random_regular(10, 4, 2).unwrap();
    let freq = matchlab::stats::empirical_edge_freq(&g, 4000, 5).unwrap();
    for ((u, v), f) in &freq.frequencies {
        let exact = matchlab::exact::to_f64(&edge_probability(&g, *u, *v).unwrap());
        let sd = (exact * (1.0 - exact) / 4000.0).sqrt();
        assert!((f - exact).abs() <= 5.0 * sd + 1e-9, "edge {u}{v}: {f} vs {exact}");
    }
}

#[test]
fn frozen_counts() {
    // Values from direct enumeration of all perfect matchings.
    let cases: [(Graph, u64); 4] = [
        (complete(10), 945),
        (complete_multipartite(2, 5).unwrap(), 120),
        (complete_multipartite(3, 2).unwrap(), 8),
        (complete_multipartite(4, 2).unwrap(), 60),
    ];
    for (g, expected) in cases {
        assert_eq!(count_pm(&g).unwrap(), Count::from(expected));
    }
}
