//! Expander decompositions of dense graphs: a spectral splitting phase, the
//! cleaning loop that moves sparse pieces into the residual part `V_0`, a
//! verifier for (G1)–(G3), and the good-vertex / big-part classification.
//!
//! All implicit constants are explicit inputs ([`GoodnessConstants`]); the
//! defaults are 1 except `c_f = 0.4`, which lets a complete graph count as big.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{for_each_cut, membership, MultiGraph, EXHAUSTIVE_LIMIT};
use crate::walk::spectral_order;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderDecomposition {
    labels: Vec<usize>,
    pub gamma: f64,
    pub eta: f64,
    pub eps: f64,
    #[serde(default)]
    pub verified: Option<VerificationReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionMethod {
    /// Minimum over all cuts of the part.
    Exact,
    /// `λ2(L) / |V_i|` from the Laplacian of the part; a lower bound on the expansion.
    CertifiedLowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartReport {
    pub part: usize,
    pub size: usize,
    /// `e(V_i, V∖V_i)`.
    pub boundary_edges: usize,
    pub g2: bool,
    /// `None` for parts with fewer than two vertices (no proper cut).
    pub expansion: Option<f64>,
    pub method: ExpansionMethod,
    pub g3: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual: usize,
    pub g1: bool,
    pub g2: bool,
    pub g3: bool,
    pub verified: bool,
    pub parts: Vec<PartReport>,
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, value })
    }
}

impl ExpanderDecomposition {
    /// Wraps a labeling (`0` is the residual part) without verifying it.
    pub fn from_labels(g: &MultiGraph, labels: Vec<usize>, gamma: f64, eta: f64, eps: f64) -> Result<Self> {
        if labels.len() != g.n() {
            return Err(Error::PartitionMismatch { labels: labels.len(), n: g.n() });
        }
        check_unit("gamma", gamma)?;
        check_unit("eta", eta)?;
        check_unit("eps", eps)?;
        Ok(ExpanderDecomposition { labels, gamma, eta, eps, verified: None })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dec: Self = serde_json::from_str(text)?;
        check_unit("gamma", dec.gamma)?;
        check_unit("eta", dec.eta)?;
        check_unit("eps", dec.eps)?;
        Ok(dec)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    /// Number of parts excluding `V_0`.
    pub fn k(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// `V_i` as a sorted vertex list; `part(0)` is the residual set.
    pub fn part(&self, i: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == i).collect()
    }

    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.k() + 1];
        for (v, &l) in self.labels.iter().enumerate() {
            parts[l].push(v);
        }
        parts
    }

    pub fn is_verified(&self) -> bool {
        self.verified.as_ref().is_some_and(|r| r.verified)
    }

    fn require_graph(&self, g: &MultiGraph) -> Result<()> {
        if self.labels.len() != g.n() {
            return Err(Error::PartitionMismatch { labels: self.labels.len(), n: g.n() });
        }
        Ok(())
    }
}

/// Second-smallest eigenvalue of the combinatorial Laplacian.
fn fiedler_value(g: &MultiGraph) -> f64 {
    let n = g.n();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        l[(v, v)] = g.degree(v) as f64;
    }
    for ((a, b), c) in g.edges() {
        l[(a, b)] -= c as f64;
        l[(b, a)] -= c as f64;
    }
    let mut values: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values[1]
}

/// Checks (G1) and (G2) exactly and (G3) exactly for parts of at most 20
/// vertices; larger parts get the one-sided bound `e(U, V_i∖U) ≥ λ2 |U||V_i∖U| / |V_i|`.
pub fn verify_decomposition(g: &MultiGraph, dec: &ExpanderDecomposition) -> Result<VerificationReport> {
    dec.require_graph(g)?;
    let n = g.n();
    let parts = dec.parts();
    let residual = parts[0].len();
    let g1 = residual as f64 <= dec.eps * n as f64;
    let reports = parts
        .par_iter()
        .enumerate()
        .skip(1)
        .map(|(i, part)| -> Result<PartReport> {
            let mask = membership(n, part);
            let boundary_edges: usize = part.iter().map(|&v| g.degree(v) - g.degree_into(v, &mask)).sum();
            let g2 = boundary_edges as f64 <= dec.eta * (part.len() * n) as f64;
            let (sub, _) = g.induced_subgraph(part)?;
            let (expansion, method) = if part.len() <= EXHAUSTIVE_LIMIT {
                (sub.exact_expansion(EXHAUSTIVE_LIMIT)?, ExpansionMethod::Exact)
            } else {
                (Some(fiedler_value(&sub) / part.len() as f64), ExpansionMethod::CertifiedLowerBound)
            };
            let g3 = expansion.is_none_or(|x| x >= dec.gamma * (1.0 - 1e-12));
            Ok(PartReport { part: i, size: part.len(), boundary_edges, g2, expansion, method, g3 })
        })
        .collect::<Result<Vec<_>>>()?;
    let g2 = reports.iter().all(|r| r.g2);
    let g3 = reports.iter().all(|r| r.g3);
    Ok(VerificationReport { residual, g1, g2, g3, verified: g1 && g2 && g3, parts: reports })
}

/// Sweep prefix of `order` minimizing `e(S, S^c) / min(|S|, |S^c|)`; returns `(size, cut)`.
fn best_balanced_sweep(g: &MultiGraph, order: &[usize]) -> (usize, usize) {
    let m = g.n();
    let mut inside = vec![false; m];
    let mut cut = 0usize;
    let mut best = (0, 0, f64::INFINITY);
    for (s, &x) in order[..m - 1].iter().enumerate() {
        cut = cut + g.degree(x) - 2 * g.degree_into(x, &inside);
        inside[x] = true;
        let size = s + 1;
        let ratio = cut as f64 / size.min(m - size) as f64;
        if ratio < best.2 {
            best = (size, cut, ratio);
        }
    }
    (best.0, best.1)
}

fn connected_pieces(g: &MultiGraph, cluster: &[usize]) -> Result<Vec<Vec<usize>>> {
    let (sub, map) = g.induced_subgraph(cluster)?;
    let (count, label) = sub.components();
    let mut pieces = vec![Vec::new(); count];
    for (x, &l) in label.iter().enumerate() {
        pieces[l].push(map[x]);
    }
    Ok(pieces)
}

/// Recursive spectral splitting while a sweep cut with
/// `e(S, C∖S) < (η/2)·min(|S|, |C∖S|)·n` exists.
fn split_phase(g: &MultiGraph, eta: f64) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let mut stack = connected_pieces(g, &all)?;
    let mut done = Vec::new();
    while let Some(cluster) = stack.pop() {
        if cluster.len() < 2 {
            done.push(cluster);
            continue;
        }
        let pieces = connected_pieces(g, &cluster)?;
        if pieces.len() > 1 {
            stack.extend(pieces);
            continue;
        }
        let (sub, map) = g.induced_subgraph(&cluster)?;
        let order = spectral_order(&sub);
        let (size, cut) = best_balanced_sweep(&sub, &order);
        let smaller = size.min(cluster.len() - size);
        if (cut as f64) < eta / 2.0 * (smaller * n) as f64 {
            stack.push(order[..size].iter().map(|&x| map[x]).collect());
            stack.push(order[size..].iter().map(|&x| map[x]).collect());
        } else {
            done.push(cluster);
        }
    }
    for c in &mut done {
        c.sort_unstable();
    }
    done.sort();
    Ok(done)
}

/// Finds `X ⊂ P`, `|X| ≤ 3/5 |P|`, with `e(X, P∖X) < γ|X|n` (local indices of `sub`).
fn find_sparse_set(sub: &MultiGraph, gamma: f64, n: usize) -> Result<Option<Vec<usize>>> {
    let m = sub.n();
    let max_size = 3 * m / 5;
    if max_size == 0 {
        return Ok(None);
    }
    let threshold = |size: usize| gamma * (size * n) as f64;
    if m <= EXHAUSTIVE_LIMIT {
        let mut best: Option<(f64, u64)> = None;
        let full = (1u64 << m) - 1;
        for_each_cut(sub, |mask, size, cut, _| {
            for (set, s) in [(mask, size), (full & !mask, m - size)] {
                if s >= 1 && s <= max_size && (cut as f64) < threshold(s) {
                    let ratio = cut as f64 / s as f64;
                    if best.is_none_or(|(r, _)| ratio < r) {
                        best = Some((ratio, set));
                    }
                }
            }
        });
        return Ok(best.map(|(_, set)| (0..m).filter(|&x| set >> x & 1 == 1).collect()));
    }
    let (count, label) = sub.components();
    if count > 1 {
        let mut sizes = vec![0usize; count];
        label.iter().for_each(|&l| sizes[l] += 1);
        let smallest = (0..count).min_by_key(|&c| (sizes[c], c)).unwrap();
        return Ok(Some((0..m).filter(|&x| label[x] == smallest).collect()));
    }
    if let Some(v) = (0..m).filter(|&v| (sub.degree(v) as f64) < threshold(1)).min_by_key(|&v| (sub.degree(v), v)) {
        return Ok(Some(vec![v]));
    }
    let order = spectral_order(sub);
    let total_order: Vec<usize> = order.iter().rev().copied().collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for ord in [&order, &total_order] {
        let mut inside = vec![false; m];
        let mut cut = 0usize;
        for (s, &x) in ord[..max_size].iter().enumerate() {
            cut = cut + sub.degree(x) - 2 * sub.degree_into(x, &inside);
            inside[x] = true;
            let size = s + 1;
            if (cut as f64) < threshold(size) {
                let ratio = cut as f64 / size as f64;
                if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
                    best = Some((ratio, ord[..size].to_vec()));
                }
            }
        }
    }
    Ok(best.map(|(_, x)| x))
}

/// Cleaning loop for one cluster; returns the surviving vertices.
fn clean(g: &MultiGraph, cluster: Vec<usize>, gamma: f64) -> Result<Vec<usize>> {
    let n = g.n();
    let mut p = cluster;
    loop {
        let (sub, map) = g.induced_subgraph(&p)?;
        let Some(x) = find_sparse_set(&sub, gamma, n)? else {
            return Ok(p);
        };
        let drop = membership(p.len(), &x);
        p = map.iter().enumerate().filter(|(i, _)| !drop[*i]).map(|(_, &v)| v).collect();
    }
}

/// Spectral splitting followed by the cleaning loop; the attached
/// verification report, not the construction, is the contract.
pub fn expander_decompose(g: &MultiGraph, gamma: f64, eta: f64, eps: f64) -> Result<ExpanderDecomposition> {
    check_unit("gamma", gamma)?;
    check_unit("eta", eta)?;
    check_unit("eps", eps)?;
    let clusters = split_phase(g, eta)?;
    let cleaned = clusters.into_par_iter().map(|c| clean(g, c, gamma)).collect::<Result<Vec<_>>>()?;
    let mut labels = vec![0; g.n()];
    for (i, part) in cleaned.iter().filter(|p| !p.is_empty()).enumerate() {
        for &v in part {
            labels[v] = i + 1;
        }
    }
    let mut dec = ExpanderDecomposition::from_labels(g, labels, gamma, eta, eps)?;
    dec.verified = Some(verify_decomposition(g, &dec)?);
    Ok(dec)
}

/// Explicit values for the implicit constants in the goodness and bigness conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessConstants {
    pub c_a: f64,
    pub c_b: f64,
    pub c_c: f64,
    pub c_d: f64,
    pub c_e: f64,
    pub c_f: f64,
}

impl Default for GoodnessConstants {
    fn default() -> Self {
        GoodnessConstants { c_a: 1.0, c_b: 1.0, c_c: 1.0, c_d: 1.0, c_e: 1.0, c_f: 0.4 }
    }
}

impl GoodnessConstants {
    fn check(&self) -> Result<()> {
        for (name, value) in [
            ("c_a", self.c_a),
            ("c_b", self.c_b),
            ("c_c", self.c_c),
            ("c_d", self.c_d),
            ("c_e", self.c_e),
            ("c_f", self.c_f),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::ParameterOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodnessReport {
    pub alpha: f64,
    pub eps: f64,
    pub constants: GoodnessConstants,
    /// Conditions (a)–(d) per vertex; all false on `V_0`.
    pub flags: Vec<[bool; 4]>,
    pub good: Vec<usize>,
    pub big: Vec<usize>,
}

impl GoodnessReport {
    pub fn is_good(&self, v: usize) -> bool {
        self.flags[v].iter().all(|&f| f)
    }
}

/// Flags `(α, ε)`-good vertices and the resulting big parts.
pub fn good_vertices(
    g: &MultiGraph,
    dec: &ExpanderDecomposition,
    alpha: f64,
    eps: f64,
    constants: &GoodnessConstants,
) -> Result<GoodnessReport> {
    dec.require_graph(g)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterOutOfRange { name: "alpha", value: alpha });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParameterOutOfRange { name: "eps", value: eps });
    }
    constants.check()?;
    let n = g.n();
    let labels = dec.labels();
    // deg(u; V_{i(u)})
    let own: Vec<usize> = (0..n)
        .map(|u| g.neighbors(u).iter().filter(|(w, _)| labels[*w] == labels[u]).map(|(_, m)| m).sum())
        .collect();
    let flags: Vec<[bool; 4]> = (0..n)
        .map(|v| {
            if labels[v] == 0 {
                return [false; 4];
            }
            let deg = g.degree(v) as f64;
            let (mut excess, mut inverse) = (0.0, 0.0);
            for &(u, m) in g.neighbors(v) {
                if labels[u] == labels[v] {
                    excess += m as f64 * (1.0 / own[u] as f64 - 1.0 / g.degree(u) as f64);
                    inverse += m as f64 / own[u] as f64;
                }
            }
            [
                deg >= constants.c_a * eps * n as f64,
                own[v] as f64 >= (1.0 - constants.c_b * eps * eps) * deg,
                excess <= constants.c_c * alpha.sqrt(),
                inverse <= constants.c_d * alpha.powf(-0.25),
            ]
        })
        .collect();
    let good = (0..n).filter(|&v| flags[v].iter().all(|&f| f)).collect();
    let mut report = GoodnessReport { alpha, eps, constants: *constants, flags, good, big: Vec::new() };
    report.big = big_parts(g, dec, &report, constants);
    Ok(report)
}

/// Parts whose good fraction is at least `1 − c_e α^{1/8}` and with
/// `e(G[V_i]) ≥ c_f α^{1/9} |V_i| n`.
pub fn big_parts(g: &MultiGraph, dec: &ExpanderDecomposition, report: &GoodnessReport, constants: &GoodnessConstants) -> Vec<usize> {
    let n = g.n();
    let alpha = report.alpha;
    let parts = dec.parts();
    (1..parts.len())
        .filter(|&i| {
            let part = &parts[i];
            if part.is_empty() {
                return false;
            }
            let good = part.iter().filter(|&&v| report.is_good(v)).count() as f64;
            let mask = membership(n, part);
            let inner = part.iter().map(|&v| g.degree_into(v, &mask)).sum::<usize>() as f64 / 2.0;
            good >= (1.0 - constants.c_e * alpha.powf(0.125)) * part.len() as f64
                && inner >= constants.c_f * alpha.powf(1.0 / 9.0) * (part.len() * n) as f64
        })
        .collect()
}
