//! Random walks: hitting probabilities and spectral diagnostics of the lazy walk.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{check_vertex, for_each_cut, MultiGraph};
use crate::rng;

/// Default vertex limit for the exact Cheeger constant.
pub const EXACT_CHEEGER_LIMIT: usize = 18;

/// Spectral summary of the lazy simple random walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkProfile {
    /// Bottleneck ratio `Φ_*`; exact when `exact` is set, otherwise a sweep-cut upper bound.
    pub phi_star: f64,
    pub exact: bool,
    pub lambda2: f64,
    pub gap: f64,
    pub min_pi: f64,
}

impl WalkProfile {
    /// `gap⁻¹ (½ log(1/min π) + log(1/2ε))`.
    pub fn mixing_bound(&self, eps: f64) -> f64 {
        (0.5 * (1.0 / self.min_pi).ln() + (1.0 / (2.0 * eps)).ln()) / self.gap
    }

    /// Checks `Φ²/2 ≤ gap ≤ 2Φ` up to `tol`. Only meaningful when `exact`.
    pub fn cheeger_sandwich_holds(&self, tol: f64) -> bool {
        let phi = self.phi_star;
        phi * phi / 2.0 <= self.gap + tol && self.gap <= 2.0 * phi + tol
    }
}

fn check_triple(g: &MultiGraph, w: usize, u: usize, v: usize) -> Result<()> {
    for x in [w, u, v] {
        check_vertex(x, g.n()).map_err(|_| Error::InvalidVertices(format!("vertex {x} out of range")))?;
    }
    if u == v {
        return Err(Error::InvalidVertices("u and v must differ".into()));
    }
    if w == v {
        return Err(Error::InvalidVertices("w must differ from v".into()));
    }
    if !g.is_connected() {
        return Err(Error::GraphDisconnected);
    }
    Ok(())
}

/// Exact `P_w[τ_v < τ_u^+]` for the simple random walk.
///
/// Solves the harmonic system with `h(u) = 0`, `h(v) = 1`; when `w = u` the
/// answer averages `h` over the first step.
pub fn hitting_before_return_exact(g: &MultiGraph, w: usize, u: usize, v: usize) -> Result<f64> {
    check_triple(g, w, u, v)?;
    let n = g.n();
    let interior: Vec<usize> = (0..n).filter(|&x| x != u && x != v).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &x) in interior.iter().enumerate() {
        index[x] = i;
    }
    let m = interior.len();
    let mut h = vec![0.0; n];
    h[v] = 1.0;
    if m > 0 {
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (i, &x) in interior.iter().enumerate() {
            a[(i, i)] = g.degree(x) as f64;
            for &(y, c) in g.neighbors(x) {
                if y == v {
                    b[i] += c as f64;
                } else if y != u {
                    a[(i, index[y])] -= c as f64;
                }
            }
        }
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numerical("singular hitting system".into()))?;
        for (i, &x) in interior.iter().enumerate() {
            h[x] = sol[i];
        }
    }
    if w != u {
        return Ok(h[w]);
    }
    let du = g.degree(u) as f64;
    Ok(g.neighbors(u).iter().map(|&(y, c)| c as f64 * h[y]).sum::<f64>() / du)
}

/// Monte Carlo estimate of `P_w[τ_v < τ_u^+]` with its binomial standard error.
/// Walk `i` draws from stream `(seed, i)`.
pub fn hitting_before_return_mc(
    g: &MultiGraph,
    w: usize,
    u: usize,
    v: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    check_triple(g, w, u, v)?;
    let hits: usize = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let mut x = w;
            // one forced step, so returning to u counts only at times ≥ 1
            loop {
                let (targets, _) = g.walk_slots(x);
                x = targets[rng.random_range(0..targets.len())] as usize;
                if x == v {
                    return 1usize;
                }
                if x == u {
                    return 0;
                }
            }
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// Eigen-decomposition of `D^{-1/2} A D^{-1/2}`, eigenvalues sorted descending.
/// Returns the eigenvalues and the second eigenvector mapped back by `D^{-1/2}`.
pub(crate) fn normalized_spectrum(g: &MultiGraph) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|&d| if d > 0 { 1.0 / (d as f64).sqrt() } else { 0.0 }).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for ((a, b), c) in g.edges() {
        let x = c as f64 * inv_sqrt[a] * inv_sqrt[b];
        m[(a, b)] = x;
        m[(b, a)] = x;
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let second = if n >= 2 {
        let col = eig.eigenvectors.column(order[1]);
        (0..n).map(|x| col[x] * inv_sqrt[x]).collect()
    } else {
        vec![0.0; n]
    };
    (values, second)
}

/// Vertex order by the second eigenvector, ties broken by index.
pub(crate) fn spectral_order(g: &MultiGraph) -> Vec<usize> {
    let (_, f) = normalized_spectrum(g);
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    order
}

/// Smallest bottleneck ratio over sweep prefixes (and their complements) of `order`.
fn sweep_bottleneck(g: &MultiGraph, order: &[usize]) -> f64 {
    let n = g.n();
    let total_vol = 2 * g.edge_count();
    let mut inside = vec![false; n];
    let (mut cut, mut vol) = (0usize, 0usize);
    let mut best = f64::INFINITY;
    for &x in &order[..n - 1] {
        let into = g.degree_into(x, &inside);
        cut = cut + g.degree(x) - 2 * into;
        vol += g.degree(x);
        inside[x] = true;
        for side_vol in [vol, total_vol - vol] {
            if side_vol > 0 && 2 * side_vol <= total_vol {
                best = best.min(cut as f64 / (2.0 * side_vol as f64));
            }
        }
    }
    best
}

/// Cheeger constant, lazy-walk `λ2` and spectral gap of a connected graph.
pub fn spectral_profile(g: &MultiGraph, exact_cheeger_limit: usize) -> Result<WalkProfile> {
    if !g.is_connected() {
        return Err(Error::GraphDisconnected);
    }
    if g.n() < 2 {
        return Err(Error::Precondition("spectral profile needs at least two vertices".into()));
    }
    let (values, _) = normalized_spectrum(g);
    let lambda2 = ((1.0 + values[1]) / 2.0).clamp(0.0, 1.0);
    let total_vol = 2 * g.edge_count();
    let min_pi = g.min_degree() as f64 / total_vol as f64;
    let exact = g.n() <= exact_cheeger_limit.min(63);
    let phi_star = if exact {
        let mut best = f64::INFINITY;
        for_each_cut(g, |_, _, cut, vol| {
            for side_vol in [vol, total_vol - vol] {
                if side_vol > 0 && 2 * side_vol <= total_vol {
                    best = best.min(cut as f64 / (2.0 * side_vol as f64));
                }
            }
        });
        best
    } else {
        sweep_bottleneck(g, &spectral_order(g))
    };
    Ok(WalkProfile { phi_star, exact, lambda2, gap: 1.0 - lambda2, min_pi })
}
