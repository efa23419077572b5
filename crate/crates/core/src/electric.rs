//! Electrical-network quantities from the graph Laplacian: effective
//! resistance, Kirchhoff edge probabilities and spanning-tree counts.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::graph::{check_vertex, Edge, MultiGraph};
use crate::graphon::StepGraphon;

/// Grounded Laplacian of a connected multigraph with a cached Cholesky factor.
///
/// The last vertex is grounded; the factor covers the remaining `n − 1` rows.
pub struct LaplacianSystem {
    n: usize,
    factor: Option<Cholesky<f64, Dyn>>,
}

impl LaplacianSystem {
    pub fn new(g: &MultiGraph) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::GraphDisconnected);
        }
        let n = g.n();
        if n == 1 {
            return Ok(LaplacianSystem { n, factor: None });
        }
        let m = n - 1;
        let mut l = DMatrix::<f64>::zeros(m, m);
        for v in 0..m {
            l[(v, v)] = g.degree(v) as f64;
        }
        for ((u, v), c) in g.edges() {
            if u < m && v < m {
                l[(u, v)] -= c as f64;
                l[(v, u)] -= c as f64;
            }
        }
        let factor = Cholesky::new(l)
            .ok_or_else(|| Error::Numerical("grounded Laplacian is not positive definite".into()))?;
        Ok(LaplacianSystem { n, factor: Some(factor) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Potentials `x` with `L x = b`, `x[n−1] = 0`. `b` must sum to zero.
    pub fn potentials(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        if let Some(f) = &self.factor {
            let rhs = DVector::from_column_slice(&b[..self.n - 1]);
            let sol = f.solve(&rhs);
            x[..self.n - 1].copy_from_slice(sol.as_slice());
        }
        x
    }

    pub fn resistance(&self, u: usize, v: usize) -> Result<f64> {
        check_vertex(u, self.n)?;
        check_vertex(v, self.n)?;
        if u == v {
            return Err(Error::SameVertex(u));
        }
        let mut b = vec![0.0; self.n];
        b[u] = 1.0;
        b[v] = -1.0;
        let x = self.potentials(&b);
        Ok(x[u] - x[v])
    }

    /// `log det` of the grounded Laplacian, i.e. `log t(G)` by the matrix-tree theorem.
    pub fn log_det(&self) -> f64 {
        match &self.factor {
            None => 0.0,
            Some(f) => 2.0 * f.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>(),
        }
    }
}

/// `R_eff(u ↔ v)`; `+∞` when `u` and `v` lie in different components.
pub fn effective_resistance(g: &MultiGraph, u: usize, v: usize) -> Result<f64> {
    check_vertex(u, g.n())?;
    check_vertex(v, g.n())?;
    if u == v {
        return Err(Error::SameVertex(u));
    }
    let (count, label) = g.components();
    if label[u] != label[v] {
        return Ok(f64::INFINITY);
    }
    if count == 1 {
        return LaplacianSystem::new(g)?.resistance(u, v);
    }
    let part: Vec<usize> = (0..g.n()).filter(|&x| label[x] == label[u]).collect();
    let (sub, map) = g.induced_subgraph(&part)?;
    let iu = map.iter().position(|&x| x == u).unwrap();
    let iv = map.iter().position(|&x| x == v).unwrap();
    LaplacianSystem::new(&sub)?.resistance(iu, iv)
}

/// Probability that a given copy of edge `e` lies in the UST (Kirchhoff).
/// Every parallel copy of a pair has the same probability `R_eff(x ↔ y)`.
pub fn edge_ust_probability(g: &MultiGraph, e: Edge) -> Result<f64> {
    if !g.contains(&e) {
        return Err(Error::EdgeNotInGraph(e.u, e.v));
    }
    LaplacianSystem::new(g)?.resistance(e.u, e.v)
}

/// Natural log of the number of spanning trees.
pub fn log_spanning_tree_count(g: &MultiGraph) -> Result<f64> {
    Ok(LaplacianSystem::new(g)?.log_det())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TreeCountComparison {
    pub log_t: f64,
    /// `t(G)^{1/n} / n`.
    pub lhs: f64,
    /// `exp(Σ_i μ_i log d_i)`.
    pub rhs: f64,
}

/// Compares the normalized tree count of `g` against the graphon prediction.
pub fn normalized_tree_count_vs_graphon(g: &MultiGraph, w: &StepGraphon) -> Result<TreeCountComparison> {
    let log_t = log_spanning_tree_count(g)?;
    let rhs = graphon_tree_rate(w)?;
    Ok(TreeCountComparison { log_t, lhs: normalized_tree_count(log_t, g.n()), rhs })
}

pub fn normalized_tree_count(log_t: f64, n: usize) -> f64 {
    (log_t / n as f64 - (n as f64).ln()).exp()
}

/// `exp(∫ log deg_W)` for a step graphon.
pub fn graphon_tree_rate(w: &StepGraphon) -> Result<f64> {
    let d = w.degrees();
    if d.iter().any(|&x| x <= 0.0) {
        return Err(Error::DegenerateGraphon);
    }
    Ok(w.mu().iter().zip(&d).map(|(m, x)| m * x.ln()).sum::<f64>().exp())
}

/// `log(Π_i d_i / (n − 1))`, the log of the upper bound on `t(G)`.
pub fn kostochka_log_upper(g: &MultiGraph) -> f64 {
    g.degrees().iter().map(|&d| (d as f64).ln()).sum::<f64>() - ((g.n() - 1) as f64).ln()
}

/// Checks `t(G) ≤ Π_i d_i / (n − 1)` in log space.
pub fn kostochka_upper_check(g: &MultiGraph) -> Result<bool> {
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    if !g.is_connected() {
        return Err(Error::GraphDisconnected);
    }
    if g.min_degree() <= 1 {
        return Err(Error::Precondition("minimum degree must exceed 1".into()));
    }
    let log_t = log_spanning_tree_count(g)?;
    Ok(log_t <= kostochka_log_upper(g) + 1e-9 * log_t.abs().max(1.0))
}
