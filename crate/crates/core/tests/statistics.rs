//! Statistical and oracle checks that are too slow or too large for unit tests.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use ust_graphon::decompose::{expander_decompose, good_vertices, verify_decomposition, ExpanderDecomposition, GoodnessConstants};
use ust_graphon::electric::edge_ust_probability;
use ust_graphon::freq::{freq_graph, freq_graphon, freq_minus};
use ust_graphon::graphon::sample_w_random_graph;
use ust_graphon::rng::stream;
use ust_graphon::trees::{enumerate_rooted_trees, local_census, merge_census, RootedTree};
use ust_graphon::ust::{enumerate_spanning_trees, sample_many, Conditioned, Sampler};
use ust_graphon::walk::{hitting_before_return_exact, hitting_before_return_mc};
use ust_graphon::{Edge, MultiGraph, SpanningTree, StepGraphon};

fn random_connected(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize, p: f64) -> MultiGraph {
    loop {
        let n = rng.random_range(n_min..=n_max);
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    pairs.push((a, b));
                }
            }
        }
        let g = MultiGraph::from_pairs(n, &pairs).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

fn key(t: &SpanningTree) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = t.edges().iter().map(|e| e.pair()).collect();
    e.sort_unstable();
    e
}

#[test]
fn edge_frequencies_match_kirchhoff() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = 20_000;
    for round in 0..10u64 {
        let g = random_connected(&mut rng, 3, 6, 0.6);
        let trees = sample_many(&g, samples, 100 + round, Sampler::Wilson).unwrap();
        for ((u, v), _) in g.edges() {
            let e = Edge::new(u, v);
            let p = edge_ust_probability(&g, e).unwrap();
            let hits = trees.iter().filter(|t| t.contains(&e)).count() as f64 / samples as f64;
            let sigma = (p * (1.0 - p) / samples as f64).sqrt().max(1e-9);
            assert!((hits - p).abs() <= 4.0 * sigma, "edge ({u},{v}): {hits} vs {p}");
        }
    }
}

#[test]
fn conditional_law_matches_filtered_enumeration() {
    let g = MultiGraph::complete(5);
    let include = [Edge::new(0, 1)];
    let exclude = [Edge::new(1, 2), Edge::new(3, 4)];
    let allowed: Vec<_> = enumerate_spanning_trees(&g)
        .unwrap()
        .into_iter()
        .filter(|t| include.iter().all(|e| t.contains(e)) && exclude.iter().all(|e| !t.contains(e)))
        .map(|t| key(&t))
        .collect();
    let cond = Conditioned::new(&g, &include, &exclude).unwrap();
    let samples = 60_000;
    let mut counts: BTreeMap<Vec<(usize, usize)>, usize> = allowed.iter().map(|k| (k.clone(), 0)).collect();
    for i in 0..samples {
        let t = cond.sample_with_rng(&mut stream(77, i)).unwrap();
        *counts.get_mut(&key(&t)).expect("sample outside the conditional support") += 1;
    }
    let expected = samples as f64 / allowed.len() as f64;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = ChiSquared::new((allowed.len() - 1) as f64).unwrap().sf(chi2);
    assert!(p > 1e-3, "chi² = {chi2}, p = {p}");
}

#[test]
fn vertex_degree_in_complete_graph_follows_pruefer_law() {
    let n = 50;
    let samples = 4000;
    let trees = sample_many(&MultiGraph::complete(n), samples, 55, Sampler::Wilson).unwrap();
    let law = Binomial::new(1.0 / n as f64, (n - 2) as u64).unwrap();
    let mut hist = vec![0usize; n];
    for t in &trees {
        hist[t.degree(0)] += 1;
    }
    let mut cum = 0usize;
    let mut ks = 0.0f64;
    for (d, &h) in hist.iter().enumerate().skip(1) {
        cum += h;
        let empirical = cum as f64 / samples as f64;
        ks = ks.max((empirical - law.cdf(d as u64 - 1)).abs());
    }
    // 0.1% critical value of the one-sample KS statistic
    assert!(ks < 1.95 / (samples as f64).sqrt(), "KS = {ks}");
}

#[test]
fn star_census_on_complete_graph() {
    let n = 300;
    let samples = 50;
    let trees = sample_many(&MultiGraph::complete(n), samples, 3, Sampler::Wilson).unwrap();
    let mut census = BTreeMap::new();
    for t in &trees {
        merge_census(&mut census, &local_census(t, 1));
    }
    for k in 1..=4usize {
        let code = RootedTree::star(k).canonical_code();
        let emp = *census.get(&code).unwrap_or(&0) as f64 / (n * samples) as f64;
        let target = (-1.0f64).exp() / (1..k).map(|x| x as f64).product::<f64>();
        assert!((emp - target).abs() <= 0.02, "star with {k} leaves: {emp} vs {target}");
    }
}

#[test]
fn hitting_monte_carlo_tracks_exact_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for round in 0..12u64 {
        let g = random_connected(&mut rng, 3, 12, 0.5);
        let n = g.n();
        let (w, u, v) = (round as usize % n, (round as usize + 1) % n, (round as usize + 2) % n);
        let exact = hitting_before_return_exact(&g, w, u, v).unwrap();
        let (p, _) = hitting_before_return_mc(&g, w, u, v, 20_000, round).unwrap();
        let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt().max(1e-9);
        assert!((p - exact).abs() <= 4.0 * sigma, "{p} vs {exact}");
    }
}

#[test]
fn removing_edges_at_one_vertex_keeps_half_expansion() {
    // m ≥ 8ℓ²/γ² with ℓ = 1 needs γ ≥ √(8/m); dense graphs on 20 vertices qualify
    let m = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut checked = 0;
    while checked < 20 {
        let g = random_connected(&mut rng, m, m, 0.95);
        let gamma = g.exact_expansion(20).unwrap().unwrap();
        if (m as f64) < 8.0 / (gamma * gamma) {
            continue;
        }
        assert!(g.is_gamma_expander(gamma).unwrap());
        let x = rng.random_range(0..m);
        let mut nbrs: Vec<usize> = g.neighbors(x).iter().map(|&(y, _)| y).collect();
        let floor = (gamma * m as f64).ceil() as usize;
        if nbrs.len() < floor {
            continue;
        }
        let removable = nbrs.len() - floor;
        let count = rng.random_range(0..=removable);
        for i in (1..nbrs.len()).rev() {
            nbrs.swap(i, rng.random_range(0..=i));
        }
        let cut: Vec<_> = nbrs[..count].iter().map(|&y| (x.min(y), x.max(y))).collect();
        let h = g.delete(&cut).unwrap();
        assert!(h.degree(x) as f64 >= gamma * m as f64);
        assert!(h.is_gamma_expander(gamma / 2.0).unwrap(), "removing {count} edges at {x} broke γ/2 = {}", gamma / 2.0);
        checked += 1;
    }
}

#[test]
fn discrete_frequency_approaches_graphon_value_on_complete_graph() {
    let w = StepGraphon::constant(1.0);
    let check = |n: usize, t: &RootedTree| {
        let g = MultiGraph::complete(n);
        let dec = ExpanderDecomposition::from_labels(&g, vec![1; n], 0.5, 0.1, 0.1).unwrap();
        let discrete = freq_graph(t, &g, &dec, 0.01, 0.1).unwrap().value;
        assert_eq!(discrete, freq_minus(t, &g, &[], &[]).unwrap().value);
        let limit = freq_graphon(t, &w).unwrap().value;
        assert!((discrete - limit).abs() <= 0.01, "{}: {discrete} vs {limit}", t.canonical_code());
    };
    for t in enumerate_rooted_trees(3) {
        check(200, &t);
    }
    // four-vertex patterns need n⁴ embeddings, so they run at n = 100
    for t in enumerate_rooted_trees(4).into_iter().filter(|t| t.len() == 4) {
        check(100, &t);
    }
}

#[test]
fn planted_blocks_are_recovered_and_big() {
    let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![0.9, 0.0], vec![0.0, 0.8]]).unwrap();
    let (g, types) = sample_w_random_graph(&w, 400, 31).unwrap();
    let dec = expander_decompose(&g, 0.1, 0.01, 0.1).unwrap();
    let again = verify_decomposition(&g, &dec).unwrap();
    assert!(again.verified);
    assert_eq!(Some(&again), dec.verified.as_ref());

    let mut agree: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for v in 0..g.n() {
        *agree.entry((types[v], dec.label(v))).or_insert(0) += 1;
    }
    let best: usize = (0..2).map(|b| (1..=dec.k()).map(|l| *agree.get(&(b, l)).unwrap_or(&0)).max().unwrap()).sum();
    assert!(best as f64 >= 0.95 * g.n() as f64, "agreement {best}/400");

    let constants = GoodnessConstants::default();
    let report = good_vertices(&g, &dec, 1e-4, 0.1, &constants).unwrap();
    let covered: usize = report.big.iter().map(|&i| dec.part(i).len()).sum();
    assert!(covered as f64 >= 0.95 * g.n() as f64, "big parts cover {covered}");
}
