//! Step-function graphons: a symmetric `k × k` kernel with block measures.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::rng;

const MEASURE_TOL: f64 = 1e-12;

/// Largest block count accepted by the exact cut norm.
pub const CUT_NORM_MAX_BLOCKS: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepGraphon {
    mu: Vec<f64>,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub nondegenerate: bool,
    pub d: Vec<f64>,
    pub b: Vec<f64>,
    pub avg_b: f64,
}

impl StepGraphon {
    /// Validates measures (positive, summing to 1), symmetry and entry range.
    pub fn new(mu: Vec<f64>, w: Vec<Vec<f64>>) -> Result<Self> {
        let g = StepGraphon { mu, w };
        g.check()?;
        Ok(g)
    }

    pub fn constant(p: f64) -> Self {
        StepGraphon { mu: vec![1.0], w: vec![vec![p]] }
    }

    fn check(&self) -> Result<()> {
        let k = self.mu.len();
        if k == 0 {
            return Err(Error::MeasuresDontSumToOne(0.0));
        }
        let total: f64 = self.mu.iter().sum();
        if (total - 1.0).abs() > MEASURE_TOL || self.mu.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::MeasuresDontSumToOne(total));
        }
        if self.w.len() != k || self.w.iter().any(|row| row.len() != k) {
            return Err(Error::Parse(format!("kernel must be {k}x{k}")));
        }
        for i in 0..k {
            for j in 0..k {
                let x = self.w[i][j];
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::EntryOutOfRange { i, j, value: x });
                }
                if x != self.w[j][i] {
                    return Err(Error::AsymmetricKernel(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: StepGraphon = serde_json::from_str(text)?;
        g.check()?;
        Ok(g)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.w[i][j]
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.w
    }

    /// Block degrees `d_i = Σ_j W_ij μ_j`.
    pub fn degrees(&self) -> Vec<f64> {
        self.w
            .iter()
            .map(|row| row.iter().zip(&self.mu).map(|(w, m)| w * m).sum())
            .collect()
    }

    /// `b_i = Σ_j W_ij μ_j / d_j`, with zero-degree blocks contributing nothing
    /// (their column of `W` vanishes).
    pub fn b_values(&self) -> Vec<f64> {
        let d = self.degrees();
        self.w
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.mu)
                    .zip(&d)
                    .filter(|(_, &dj)| dj > 0.0)
                    .map(|((w, m), dj)| w * m / dj)
                    .sum()
            })
            .collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degrees().iter().all(|&d| d > 0.0)
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::DegenerateGraphon)
        }
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        self.check()?;
        let d = self.degrees();
        let b = self.b_values();
        let avg_b = self.mu.iter().zip(&b).map(|(m, b)| m * b).sum();
        Ok(ValidationReport { nondegenerate: d.iter().all(|&x| x > 0.0), d, b, avg_b })
    }
}

/// Exact cut norm `max_{S,T} |Σ_{i∈S, j∈T} μ_i μ_j U_ij|` of a signed step kernel.
///
/// For a fixed row set `S` the optimal column set takes every column whose
/// weighted row sum is positive (for the maximum) or negative (for the
/// minimum), so only the `2^k` row sets need enumerating.
pub fn cut_norm_step(u: &[Vec<f64>], mu: &[f64]) -> Result<f64> {
    let k = mu.len();
    if k > CUT_NORM_MAX_BLOCKS {
        return Err(Error::TooManyBlocks(k));
    }
    if u.len() != k || u.iter().any(|r| r.len() != k) {
        return Err(Error::Parse(format!("kernel must be {k}x{k}")));
    }
    for i in 0..k {
        for j in 0..k {
            let x = u[i][j];
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::EntryOutOfRange { i, j, value: x });
            }
            if x != u[j][i] {
                return Err(Error::AsymmetricKernel(i, j));
            }
        }
    }
    let mut col = vec![0.0; k];
    let mut best: f64 = 0.0;
    for s in 0u32..(1 << k) {
        col.iter_mut().for_each(|c| *c = 0.0);
        for i in (0..k).filter(|i| s >> i & 1 == 1) {
            for j in 0..k {
                col[j] += mu[i] * mu[j] * u[i][j];
            }
        }
        let pos: f64 = col.iter().filter(|&&c| c > 0.0).sum();
        let neg: f64 = col.iter().filter(|&&c| c < 0.0).sum();
        best = best.max(pos).max(-neg);
    }
    Ok(best)
}

/// Samples a W-random simple graph on `n` vertices and returns the block label of each vertex.
pub fn sample_w_random_graph(w: &StepGraphon, n: usize, seed: u64) -> Result<(MultiGraph, Vec<usize>)> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange { name: "n", value: 0.0 });
    }
    let mut rng = rng::stream(seed, 0);
    let labels: Vec<usize> = (0..n).map(|_| categorical(&mut rng, w.mu())).collect();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = w.w(labels[u], labels[v]);
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Ok((MultiGraph::from_pairs(n, &pairs)?, labels))
}

/// Draws an index with probability proportional to `weights`.
pub(crate) fn categorical<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, &wt) in weights.iter().enumerate() {
        if x < wt {
            return i;
        }
        x -= wt;
    }
    // rounding: fall back to the last positive weight
    weights.iter().rposition(|&wt| wt > 0.0).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeProfileReport {
    pub bins: usize,
    pub graph: Vec<f64>,
    pub graphon: Vec<f64>,
    pub max_discrepancy: f64,
}

/// Histogram of `deg_G(v)/n` against the graphon degree law. Each block
/// contributes mass `μ_i` spread as a normal around `d_i` with the binomial
/// width `sqrt(d_i(1 − d_i)/n)`.
pub fn degree_profile_compare(g: &MultiGraph, w: &StepGraphon, bins: usize) -> Result<DegreeProfileReport> {
    if bins == 0 {
        return Err(Error::ParameterOutOfRange { name: "bins", value: 0.0 });
    }
    let n = g.n().max(1) as f64;
    let bin_of = |x: f64| ((x * bins as f64).floor().max(0.0) as usize).min(bins - 1);
    let mut counts = vec![0usize; bins];
    for &d in g.degrees() {
        counts[bin_of(d as f64 / n)] += 1;
    }
    let graph: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let mut graphon = vec![0.0; bins];
    for (&m, &d) in w.mu().iter().zip(&w.degrees()) {
        let sd = (d * (1.0 - d) / n).max(0.0).sqrt();
        if sd == 0.0 {
            graphon[bin_of(d)] += m;
            continue;
        }
        let normal = Normal::new(d, sd).map_err(|e| Error::Numerical(e.to_string()))?;
        let mut prev = 0.0;
        for (j, slot) in graphon.iter_mut().enumerate() {
            let upper = if j + 1 == bins { 1.0 } else { normal.cdf((j + 1) as f64 / bins as f64) };
            *slot += m * (upper - prev);
            prev = upper;
        }
    }
    let max_discrepancy = graph.iter().zip(&graphon).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(DegreeProfileReport { bins, graph, graphon, max_discrepancy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn validate_examples() {
        let r = StepGraphon::constant(1.0).validate().unwrap();
        assert_eq!((r.d.clone(), r.b.clone(), r.avg_b), (vec![1.0], vec![1.0], 1.0));
        let two = StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = two.validate().unwrap();
        assert_eq!(r.d, vec![0.5, 0.5]);
        assert_eq!(r.b, vec![1.0, 1.0]);
        assert!((r.avg_b - 1.0).abs() < 1e-12);
        let degenerate = StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(!degenerate.validate().unwrap().nondegenerate);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(StepGraphon::new(vec![0.5, 0.4], vec![vec![1.0; 2]; 2]), Err(Error::MeasuresDontSumToOne(_))));
        assert!(matches!(
            StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0, 0.2], vec![0.3, 1.0]]),
            Err(Error::AsymmetricKernel(..))
        ));
        assert!(matches!(StepGraphon::new(vec![1.0], vec![vec![1.5]]), Err(Error::EntryOutOfRange { .. })));
        assert!(matches!(StepGraphon::from_json(r#"{"mu":[1.0],"W":[[-0.1]]}"#), Err(Error::EntryOutOfRange { .. })));
        let g = StepGraphon::from_json(r#"{"mu":[0.25,0.75],"W":[[0.9,0.2],[0.2,0.6]]}"#).unwrap();
        assert_eq!(g.k(), 2);
    }

    #[test]
    fn cut_norm_examples() {
        assert_eq!(cut_norm_step(&[vec![0.0]], &[1.0]).unwrap(), 0.0);
        assert_eq!(cut_norm_step(&[vec![1.0]], &[1.0]).unwrap(), 1.0);
        let u = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        assert!((cut_norm_step(&u, &[0.5, 0.5]).unwrap() - 0.25).abs() < 1e-15);
        let big = vec![vec![0.0; 16]; 16];
        assert!(matches!(cut_norm_step(&big, &[1.0 / 16.0; 16]), Err(Error::TooManyBlocks(16))));
    }

    fn brute_cut_norm(u: &[Vec<f64>], mu: &[f64]) -> f64 {
        let k = mu.len();
        let mut best: f64 = 0.0;
        for s in 0..1u32 << k {
            for t in 0..1u32 << k {
                let mut acc = 0.0;
                for i in (0..k).filter(|i| s >> i & 1 == 1) {
                    for j in (0..k).filter(|j| t >> j & 1 == 1) {
                        acc += mu[i] * mu[j] * u[i][j];
                    }
                }
                best = best.max(acc.abs());
            }
        }
        best
    }

    fn bilinear(u: &[Vec<f64>], mu: &[f64], x: &[f64], y: &[f64]) -> f64 {
        let k = mu.len();
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                acc += x[i] * y[j] * mu[i] * mu[j] * u[i][j];
            }
        }
        acc
    }

    pub(crate) fn arb_signed(k: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (
            prop::collection::vec(-1.0f64..=1.0, k * k),
            prop::collection::vec(0.05f64..1.0, k),
        )
            .prop_map(move |(raw, m)| {
                let mut u = vec![vec![0.0; k]; k];
                for i in 0..k {
                    for j in i..k {
                        u[i][j] = raw[i * k + j];
                        u[j][i] = raw[i * k + j];
                    }
                }
                let total: f64 = m.iter().sum();
                (u, m.iter().map(|x| x / total).collect())
            })
    }

    proptest! {
        #[test]
        fn cut_norm_matches_pair_enumeration((u, mu) in (1usize..=5).prop_flat_map(arb_signed)) {
            let fast = cut_norm_step(&u, &mu).unwrap();
            prop_assert!((fast - brute_cut_norm(&u, &mu)).abs() < 1e-12);
            let neg: Vec<Vec<f64>> = u.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
            prop_assert!((fast - cut_norm_step(&neg, &mu).unwrap()).abs() < 1e-12);
            prop_assert!(fast >= 0.0);
        }

        #[test]
        fn cut_norm_triangle(((a, mu), raw) in (1usize..=5).prop_flat_map(|k| (arb_signed(k), prop::collection::vec(-1.0f64..=1.0, k * k)))) {
            let k = mu.len();
            let mut b = vec![vec![0.0; k]; k];
            for i in 0..k { for j in i..k { b[i][j] = raw[i * k + j]; b[j][i] = raw[i * k + j]; } }
            let half = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> { m.iter().map(|r| r.iter().map(|x| x / 2.0).collect()).collect() };
            let (ha, hb) = (half(&a), half(&b));
            let sum: Vec<Vec<f64>> = ha.iter().zip(&hb).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect();
            let lhs = cut_norm_step(&sum, &mu).unwrap();
            let rhs = cut_norm_step(&ha, &mu).unwrap() + cut_norm_step(&hb, &mu).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn fractional_points_never_beat_the_cut_norm() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for k in 1..=6 {
            let mut u = vec![vec![0.0; k]; k];
            for i in 0..k {
                for j in i..k {
                    let x = rng.random_range(-1.0..=1.0);
                    u[i][j] = x;
                    u[j][i] = x;
                }
            }
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mu: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let norm = cut_norm_step(&u, &mu).unwrap();
            for _ in 0..10_000 / 6 {
                let x: Vec<f64> = (0..k).map(|_| rng.random()).collect();
                let y: Vec<f64> = (0..k).map(|_| rng.random()).collect();
                assert!(bilinear(&u, &mu, &x, &y).abs() <= norm + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn average_b_is_one(k in 1usize..6, seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mu: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mut w = vec![vec![0.0; k]; k];
            for i in 0..k { for j in i..k { let x = rng.random_range(0.0..=1.0); w[i][j] = x; w[j][i] = x; } }
            let r = StepGraphon::new(mu, w).unwrap().validate().unwrap();
            if r.nondegenerate {
                prop_assert!((r.avg_b - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn w_random_graph_examples() {
        let (g, labels) = sample_w_random_graph(&StepGraphon::constant(1.0), 30, 1).unwrap();
        assert_eq!(g, MultiGraph::complete(30));
        assert!(labels.iter().all(|&l| l == 0));

        let n = 400;
        let (g, _) = sample_w_random_graph(&StepGraphon::constant(0.5), n, 2).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let density = g.edge_count() as f64 / pairs;
        assert!((density - 0.5).abs() <= 4.0 * (0.25 / pairs).sqrt());
        assert!(g.is_simple());

        let blocks = StepGraphon::new(vec![0.5, 0.5], vec![vec![0.8, 0.0], vec![0.0, 0.8]]).unwrap();
        let (g, labels) = sample_w_random_graph(&blocks, 200, 3).unwrap();
        assert!(g.edges().all(|((u, v), _)| labels[u] == labels[v]));

        let again = sample_w_random_graph(&blocks, 200, 3).unwrap();
        assert_eq!(again.0, g);
    }

    #[test]
    fn degree_concentration_by_type() {
        let w = StepGraphon::new(vec![0.3, 0.7], vec![vec![0.9, 0.3], vec![0.3, 0.5]]).unwrap();
        let n = 500;
        let (g, labels) = sample_w_random_graph(&w, n, 5).unwrap();
        let d = w.degrees();
        for v in 0..n {
            let p = d[labels[v]];
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            // the block proportions themselves fluctuate, so allow a generous band
            assert!((g.degree(v) as f64 / n as f64 - p).abs() <= 6.0 * sd + 0.05);
        }
    }

    #[test]
    fn degree_profile_examples() {
        let r = degree_profile_compare(&MultiGraph::complete(50), &StepGraphon::constant(1.0), 10).unwrap();
        assert_eq!(r.graph[9], 1.0);
        assert_eq!(r.graphon[9], 1.0);
        assert_eq!(r.max_discrepancy, 0.0);

        // block degrees 0.45 and 0.25 sit mid-bin
        let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![0.7, 0.2], vec![0.2, 0.3]]).unwrap();
        let (g, _) = sample_w_random_graph(&w, 500, 9).unwrap();
        let r = degree_profile_compare(&g, &w, 10).unwrap();
        assert!(r.max_discrepancy <= 0.05, "{r:?}");

        let r = degree_profile_compare(&g, &StepGraphon::constant(1.0), 10).unwrap();
        assert!(r.max_discrepancy > 0.4);
    }
}
