//! One function per subcommand, each producing a `Report`.

use matchlab::exact::{from_decimal, to_f64};
use matchlab::expansion::{
    certify_bipartite, certify_exact, refute_sampled, ExpansionParams, Verdict, EXHAUSTIVE_LIMIT,
};
use matchlab::graph::{complete, complete_multipartite};
use matchlab::pm::{count_pm_with_limit, enumerate_pm_with_cap};
use matchlab::stats::{
    avoidance_ratio, disjoint_probability, edge_probability, poisson_comparison, DisjointMode, PoissonComparison,
};
use matchlab::switching::{default_ell, ratio_report, RatioReport};
use matchlab::walks::{
    matrix_power, mixing_bound_sweep, mixing_params, sandwich_report, transition_matrix, uniform_distribution,
    walk_lower_bound,
};
use matchlab::{Bipartition, Digraph, Error, Exact, Graph, Result};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::input::{fixed_set, parse_edges, Loaded};
use crate::output::{count, edges, float, rational, rational_json, Report};

fn regular(g: &Graph) -> Result<usize> {
    g.regularity().filter(|&d| d > 0).ok_or(Error::NotRegular)
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialise")
}

pub fn count_cmd(input: &Loaded, max_n: usize) -> Result<Report> {
    let g = &input.graph;
    let c = count_pm_with_limit(g, max_n)?;
    let json = json!({ "graph": input.label, "n": g.n(), "edges": g.edge_count(), "count": c.to_string() });
    let row = vec![input.label.clone(), g.n().to_string(), g.edge_count().to_string(), count(&c)];
    Ok(Report::new(json, &["graph", "n", "edges", "count"], vec![row]))
}

pub fn enumerate_cmd(input: &Loaded, max_n: usize, cap: u64) -> Result<Report> {
    let g = &input.graph;
    if g.n() > max_n {
        return Err(Error::TooLarge { n: g.n(), limit: max_n });
    }
    let all: Vec<_> = enumerate_pm_with_cap(g, cap)?.collect();
    let rows = all.iter().enumerate().map(|(i, m)| vec![i.to_string(), edges(m.edges())]).collect();
    let json = json!({ "graph": input.label, "n": g.n(), "count": all.len(), "matchings": to_json(&all) });
    Ok(Report::new(json, &["index", "edges"], rows))
}

pub fn generate_cmd(input: &Loaded) -> String {
    matchlab::graph::io::write(&input.graph, input.bipartition.as_ref())
}

pub fn expander_cmd(input: &Loaded, nu: f64, tau: f64, bipartite: bool, trials: Option<u64>, seed: u64) -> Result<Report> {
    let params = ExpansionParams::new(nu, tau)?;
    if nu > tau {
        eprintln!("warning: nu = {nu} exceeds tau = {tau}; the walk and mixing results assume nu <= tau");
    }
    let g = &input.graph;
    let (mode, cert) = if bipartite {
        let part = match &input.bipartition {
            Some(p) => p.clone(),
            None => Bipartition::detect(g).ok_or_else(|| Error::InvalidParameter("graph is not bipartite".into()))?,
        };
        ("bipartite", certify_bipartite(g, &part, &params)?)
    } else if g.n() > EXHAUSTIVE_LIMIT && trials.is_some() {
        ("sampled", refute_sampled(g, &params, trials.unwrap_or(0), seed)?)
    } else {
        ("exact", certify_exact(g, &params)?)
    };
    let mut json = to_json(&cert);
    json["graph"] = json!(input.label);
    json["mode"] = json!(mode);
    let witness = cert.witness.as_ref().map(|w| w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
    let row = vec![
        input.label.clone(),
        g.n().to_string(),
        mode.into(),
        float(nu),
        float(tau),
        format!("{:?}", cert.verdict),
        witness.unwrap_or_default(),
        cert.sets_checked.to_string(),
    ];
    Ok(Report::new(json, &["graph", "n", "mode", "nu", "tau", "verdict", "witness", "sets_checked"], vec![row]))
}

pub fn edge_prob_cmd(input: &Loaded, edge: Option<&str>) -> Result<Report> {
    let g = &input.graph;
    let d = regular(g)?;
    let reference = Exact::new(1.into(), d.into());
    let targets = match edge {
        Some(list) => parse_edges(list)?,
        None => g.edges().collect(),
    };
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut all_equal = true;
    for (u, v) in targets {
        let p = edge_probability(g, u, v)?;
        all_equal &= p == reference;
        items.push(json!({ "edge": [u, v], "exact": rational_json(&p), "float": to_f64(&p) }));
        rows.push(vec![
            u.to_string(),
            v.to_string(),
            rational(&p),
            float(to_f64(&p)),
            rational(&reference),
            float(to_f64(&reference)),
        ]);
    }
    let json = json!({
        "graph": input.label,
        "d": d,
        "reference": rational_json(&reference),
        "all_equal_reference": all_equal,
        "edges": items,
    });
    Ok(Report::new(json, &["u", "v", "exact", "exact_f64", "reference", "reference_f64"], rows))
}

fn pmf_string(c: &PoissonComparison) -> String {
    c.exact
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| format!("{k}:{}", rational(p)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn pmf_cmd(input: &Loaded, fixed: &str, k_max: Option<usize>) -> Result<Report> {
    let g = &input.graph;
    let n_set = fixed_set(g, fixed)?;
    let c = poisson_comparison(g, &n_set, k_max)?;
    let mut json = to_json(&c);
    json["graph"] = json!(input.label);
    json["fixed"] = to_json(&n_set.edges());
    let row = vec![
        input.label.clone(),
        g.n().to_string(),
        n_set.edge_count().to_string(),
        float(c.lambda),
        pmf_string(&c),
        float(c.tv.value),
        float(c.tv.slack),
    ];
    Ok(Report::new(json, &["graph", "n", "fixed_edges", "lambda", "pmf", "tv", "tv_slack"], vec![row]))
}

pub fn avoidance_cmd(input: &Loaded, fixed: &str) -> Result<Report> {
    let g = &input.graph;
    let n_set = fixed_set(g, fixed)?;
    let r = avoidance_ratio(g, &n_set)?;
    let mut json = to_json(&r);
    json["graph"] = json!(input.label);
    json["exact_text"] = json!(rational(&r.exact));
    json["fixed"] = to_json(&n_set.edges());
    let row = vec![
        input.label.clone(),
        g.n().to_string(),
        n_set.edge_count().to_string(),
        rational(&r.exact),
        float(r.exact_f64),
        float(r.lambda),
        float(r.reference),
        float(r.abs_error),
    ];
    Ok(Report::new(json, &["graph", "n", "fixed_edges", "exact", "exact_f64", "lambda", "reference", "abs_error"], vec![row]))
}

pub fn disjoint_cmd(input: &Loaded, r: usize, samples: Option<u64>, seed: u64) -> Result<Report> {
    let g = &input.graph;
    let mode = match samples {
        Some(samples) => DisjointMode::MonteCarlo { samples, seed },
        None => DisjointMode::Exact,
    };
    let rep = disjoint_probability(g, r, mode)?;
    let mut json = to_json(&rep);
    json["graph"] = json!(input.label);
    let row = vec![
        input.label.clone(),
        g.n().to_string(),
        r.to_string(),
        if samples.is_some() { "montecarlo" } else { "exact" }.into(),
        rep.exact.as_ref().map(rational).unwrap_or_default(),
        float(rep.estimate),
        rep.std_error.map(float).unwrap_or_default(),
        rep.samples.map(|s| s.to_string()).unwrap_or_default(),
        float(rep.reference),
    ];
    Ok(Report::new(
        json,
        &["graph", "n", "r", "mode", "exact", "estimate", "std_error", "samples", "reference"],
        vec![row],
    ))
}

fn ratio_row(label: &str, r: &RatioReport) -> Vec<String> {
    let mean = |s: &Option<matchlab::switching::DegreeStats>| s.as_ref().map(|s| rational(&s.mean)).unwrap_or_default();
    vec![
        label.into(),
        r.k.to_string(),
        r.ell.to_string(),
        count(&r.stratum_k),
        count(&r.stratum_k_minus_1),
        rational(&r.exact_ratio),
        float(r.exact_ratio_f64),
        r.f.to_string(),
        rational(&r.predicted),
        float(r.predicted_f64),
        r.h_edges.to_string(),
        mean(&r.left_degree_stats),
        mean(&r.right_degree_stats),
        r.double_count_holds.to_string(),
    ]
}

pub fn switching_cmd(input: &Loaded, fixed: &str, k: usize, ell: Option<usize>, sweep: bool) -> Result<Report> {
    let g = &input.graph;
    let n_set = fixed_set(g, fixed)?;
    let ells: Vec<usize> = match (ell, sweep) {
        (_, true) => (2..=g.n() / 2).collect(),
        (Some(l), false) => vec![l],
        (None, false) => vec![default_ell(g.n())],
    };
    let mut reports = Vec::new();
    for l in ells {
        reports.push(ratio_report(g, &n_set, k, l)?);
    }
    let rows = reports.iter().map(|r| ratio_row(&input.label, r)).collect();
    let json = json!({ "graph": input.label, "fixed": to_json(&n_set.edges()), "reports": to_json(&reports) });
    Ok(Report::new(
        json,
        &[
            "graph",
            "k",
            "ell",
            "stratum_k",
            "stratum_k_minus_1",
            "exact_ratio",
            "exact_ratio_f64",
            "f",
            "predicted",
            "predicted_f64",
            "h_edges",
            "left_mean_degree",
            "right_mean_degree",
            "double_count_holds",
        ],
        rows,
    ))
}

pub fn walks_cmd(input: &Loaded, nu: f64, tau: f64) -> Result<Report> {
    let params = ExpansionParams::new(nu, tau)?;
    if nu > tau {
        eprintln!("warning: nu = {nu} exceeds tau = {tau}; the walk and mixing results assume nu <= tau");
    }
    let d = Digraph::from_graph(&input.graph);
    let n = d.n();
    let cert = certify_exact(&d, &params)?;
    if cert.verdict != Verdict::Pass {
        eprintln!("warning: not a robust ({nu}, {tau})-outexpander; the bounds below are not guaranteed");
    }
    let nu_exact = from_decimal(nu)?;
    let inv = 1.0 / nu;
    let first = inv.ceil() as u64 + 1;

    let last_ell = (n as f64).min(inv + 4.0).floor() as u64;
    let walk_reports: Vec<_> = (first..=last_ell).map(|ell| walk_lower_bound(&d, &nu_exact, ell)).collect();
    let walks_hold = walk_reports.iter().all(|r| r.holds);

    let mut sandwich = Vec::new();
    let mut mixing = Value::Null;
    let mut mixing_pass = None;
    if let Some(deg) = d.regularity().filter(|&x| x > 0) {
        let delta = Exact::new(deg.into(), n.into());
        for k in first..=(2.0 / nu).floor() as u64 {
            sandwich.push(sandwich_report(&d, k, &nu_exact, &delta)?);
        }
        let q = transition_matrix(&d)?;
        let positive = (first..first + 20).find(|&k| matrix_power(&q, k).matrix().entries().all(|(_, _, x)| !x.is_zero()));
        if let Some(k) = positive {
            let p = matrix_power(&q, k);
            let sigma = uniform_distribution(n);
            let mp = mixing_params(&p, &sigma)?;
            let start = mp.threshold.ceil().max(0.0) as u64;
            let sweep = mixing_bound_sweep(&p, &sigma, start, start + 10)?;
            mixing_pass = Some(sweep.iter().all(|r| r.pass));
            mixing = json!({ "k": k, "params": to_json(&mp), "checks": to_json(&sweep) });
        }
    } else {
        eprintln!("warning: digraph is not regular; sandwich and mixing checks skipped");
    }
    let sandwich_hold = (!sandwich.is_empty()).then(|| sandwich.iter().all(|r| r.holds));
    let json = json!({
        "graph": input.label,
        "certificate": to_json(&cert),
        "walk_bounds": to_json(&walk_reports),
        "sandwich": to_json(&sandwich),
        "mixing": mixing,
    });
    let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    let row = vec![
        input.label.clone(),
        n.to_string(),
        float(nu),
        float(tau),
        format!("{:?}", cert.verdict),
        walks_hold.to_string(),
        opt(sandwich_hold),
        opt(mixing_pass),
    ];
    Ok(Report::new(
        json,
        &["graph", "n", "nu", "tau", "verdict", "walk_bounds_hold", "sandwich_holds", "mixing_passes"],
        vec![row],
    ))
}

pub fn suite_multipartite_cmd(b_max: usize, max_n: usize) -> Result<Report> {
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for parts in 2..=max_n {
        for b in 1..=b_max {
            let n = parts * b;
            if n > max_n || n % 2 == 1 {
                continue;
            }
            let g = complete_multipartite(parts, b)?;
            let fixed = fixed_set(&g, "pm")?;
            let r = avoidance_ratio(&g, &fixed)?;
            let d = g.regularity().expect("multipartite graphs are regular");
            items.push(json!({
                "parts": parts,
                "part_size": b,
                "n": n,
                "d": d,
                "exact": rational_json(&r.exact),
                "exact_text": rational(&r.exact),
                "exact_f64": r.exact_f64,
                "reference": r.reference,
                "abs_error": r.abs_error,
            }));
            rows.push(vec![
                parts.to_string(),
                b.to_string(),
                n.to_string(),
                d.to_string(),
                rational(&r.exact),
                float(r.exact_f64),
                float(r.lambda),
                float(r.reference),
                float(r.abs_error),
            ]);
        }
    }
    Ok(Report::new(
        json!({ "rows": items }),
        &["parts", "part_size", "n", "d", "exact", "exact_f64", "lambda", "reference", "abs_error"],
        rows,
    ))
}

pub fn suite_tv_cmd(multipartite: bool, part_size: usize, sizes: &[usize], fixed: &str) -> Result<Report> {
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut values = Vec::new();
    for &size in sizes {
        let (label, g) = if multipartite {
            (format!("K_{{{size}x{part_size}}}"), complete_multipartite(size, part_size)?)
        } else {
            (format!("K_{size}"), complete(size))
        };
        let n_set = fixed_set(&g, fixed)?;
        let c = poisson_comparison(&g, &n_set, None)?;
        let d = regular(&g)?;
        // A single edge, or a degree-one graph, has no room for the Poisson regime.
        let out_of_regime = g.n() <= 2 || d <= 1;
        values.push(c.tv.value);
        items.push(json!({
            "graph": label,
            "n": g.n(),
            "d": d,
            "fixed_edges": n_set.edge_count(),
            "lambda": c.lambda,
            "pmf": to_json(&c.exact),
            "tv": c.tv.value,
            "tv_slack": c.tv.slack,
            "out_of_regime": out_of_regime,
        }));
        rows.push(vec![
            label,
            g.n().to_string(),
            d.to_string(),
            n_set.edge_count().to_string(),
            float(c.lambda),
            pmf_string(&c),
            float(c.tv.value),
            float(c.tv.slack),
            out_of_regime.to_string(),
        ]);
    }
    let shrinking = values.windows(2).all(|w| w[1] < w[0]);
    Ok(Report::new(
        json!({ "rows": items, "strictly_decreasing": shrinking }),
        &["graph", "n", "d", "fixed_edges", "lambda", "pmf", "tv", "tv_slack", "out_of_regime"],
        rows,
    ))
}
