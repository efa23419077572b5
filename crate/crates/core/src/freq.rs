//! Frequency functionals of rooted-tree patterns: the graphon value as an
//! exact sum over block assignments, and the discrete versions as sums over
//! injective embeddings of the pattern into a graph.
//!
//! Patterns are relabeled internally so the root comes first and the
//! vertices at maximal height come last; callers may pass any rooted tree.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{good_vertices, ExpanderDecomposition, GoodnessConstants};
use crate::error::{Error, Result};
use crate::graph::{check_vertex, membership, MultiGraph};
use crate::graphon::StepGraphon;
use crate::trees::RootedTree;

/// Default cap on partial extensions explored by the embedding enumerator.
pub const DEFAULT_EMBEDDING_BUDGET: u64 = 1_000_000_000;

/// Cap on `k^ℓ` block assignments for the graphon sum.
pub const MAX_BLOCK_ASSIGNMENTS: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreqReport {
    pub value: f64,
    /// `(index, contribution)`: root block for graphons, part for [`freq_graph`],
    /// a single entry for one part or for `Freq⁻`.
    pub terms: Vec<(usize, f64)>,
    /// Embeddings enumerated (0 for graphons).
    pub tuple_count: u64,
}

/// Pattern in normalized order: parents precede children, height-`r` vertices occupy `p..ℓ`.
struct Pattern {
    parent: Vec<usize>,
    p: usize,
    stab: f64,
}

impl Pattern {
    fn new(t: &RootedTree) -> Self {
        let t = t.normalized();
        let parent = (0..t.len()).map(|v| t.parent(v).unwrap_or(usize::MAX)).collect();
        Pattern { parent, p: t.p_index(), stab: t.stab_size() as f64 }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }
}

/// `Freq(T; W)` on a step graphon.
pub fn freq_graphon(t: &RootedTree, w: &StepGraphon) -> Result<FreqReport> {
    w.require_nondegenerate()?;
    let pat = Pattern::new(t);
    let k = w.k();
    let ell = pat.len();
    let assignments = (k as f64).powi(ell as i32);
    if assignments > MAX_BLOCK_ASSIGNMENTS {
        return Err(Error::PatternTooLarge(assignments));
    }
    let d = w.degrees();
    let b = w.b_values();
    let mu = w.mu();
    // factor contributed by placing pattern vertex j in block c, excluding the tree-edge term
    let factor = |j: usize, c: usize| {
        let e = if j < pat.p { (-b[c]).exp() } else { 1.0 };
        mu[c] * e / d[c]
    };
    let mut terms = Vec::with_capacity(k);
    let mut blocks = vec![0usize; ell];
    for root in 0..k {
        blocks[0] = root;
        let mut sum = 0.0;
        graphon_rec(&pat, w, &d, &factor, &mut blocks, 1, factor(0, root), if pat.p == 0 { d[root] } else { 0.0 }, &mut sum);
        terms.push((root, sum / pat.stab));
    }
    let value = terms.iter().map(|(_, v)| v).sum();
    Ok(FreqReport { value, terms, tuple_count: 0 })
}

#[allow(clippy::too_many_arguments)]
fn graphon_rec(
    pat: &Pattern,
    w: &StepGraphon,
    d: &[f64],
    factor: &impl Fn(usize, usize) -> f64,
    blocks: &mut [usize],
    j: usize,
    weight: f64,
    tail_degree: f64,
    sum: &mut f64,
) {
    if j == pat.len() {
        *sum += weight * tail_degree;
        return;
    }
    let up = blocks[pat.parent[j]];
    for c in 0..w.k() {
        let edge = w.w(up, c);
        if edge == 0.0 {
            continue;
        }
        blocks[j] = c;
        let tail = if j >= pat.p { tail_degree + d[c] } else { tail_degree };
        graphon_rec(pat, w, d, factor, blocks, j + 1, weight * edge * factor(j, c), tail, sum);
    }
}

/// Inputs shared by every discrete frequency sum.
struct Embedding<'a> {
    g: &'a MultiGraph,
    allowed: &'a [bool],
    b: &'a [f64],
    /// Copies of a pair that may not be used; a pair is usable while copies remain.
    removed: &'a BTreeMap<(usize, usize), usize>,
    budget: u64,
    steps: AtomicU64,
}

impl Embedding<'_> {
    fn usable(&self, x: usize, y: usize, mult: usize) -> bool {
        let removed = self.removed.get(&(x.min(y), x.max(y))).copied().unwrap_or(0);
        mult > removed
    }

    fn tick(&self) -> Result<()> {
        if self.steps.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::EmbeddingBudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Σ over compatible injective tuples of
    /// `exp(−Σ_{j<p} b(v_j)) · Σ_{j≥p} deg(v_j) / Π_j deg(v_j)`, by root image.
    fn sum(&self, pat: &Pattern) -> Result<(Vec<(usize, f64)>, u64)> {
        let roots: Vec<usize> = (0..self.g.n()).filter(|&v| self.allowed[v]).collect();
        let per_root = roots
            .par_iter()
            .map(|&v| -> Result<(usize, f64, u64)> {
                self.tick()?;
                let mut images = vec![v];
                let (mut sum, mut count) = (0.0, 0u64);
                let deg = self.g.degree(v) as f64;
                let weight = if pat.p == 0 { 1.0 / deg } else { (-self.b[v]).exp() / deg };
                let tail = if pat.p == 0 { deg } else { 0.0 };
                self.rec(pat, &mut images, weight, tail, &mut sum, &mut count)?;
                Ok((v, sum, count))
            })
            .collect::<Result<Vec<_>>>()?;
        let tuples = per_root.iter().map(|r| r.2).sum();
        Ok((per_root.into_iter().map(|(v, s, _)| (v, s)).collect(), tuples))
    }

    fn rec(&self, pat: &Pattern, images: &mut Vec<usize>, weight: f64, tail: f64, sum: &mut f64, count: &mut u64) -> Result<()> {
        let j = images.len();
        if j == pat.len() {
            *sum += weight * tail;
            *count += 1;
            return Ok(());
        }
        let up = images[pat.parent[j]];
        for &(u, mult) in self.g.neighbors(up) {
            if !self.allowed[u] || images.contains(&u) || !self.usable(up, u, mult) {
                continue;
            }
            self.tick()?;
            let deg = self.g.degree(u) as f64;
            let (factor, next_tail) = if j < pat.p { ((-self.b[u]).exp() / deg, tail) } else { (1.0 / deg, tail + deg) };
            images.push(u);
            self.rec(pat, images, weight * factor, next_tail, sum, count)?;
            images.pop();
        }
        Ok(())
    }
}

fn check_part(dec: &ExpanderDecomposition, g: &MultiGraph, i: usize) -> Result<()> {
    if dec.labels().len() != g.n() {
        return Err(Error::PartitionMismatch { labels: dec.labels().len(), n: g.n() });
    }
    if i == 0 || i > dec.k() {
        return Err(Error::PartIndexOutOfRange(i));
    }
    Ok(())
}

/// `Freq(T; G, i)` over `i`-pure tuples drawn from `good ⊆ V_i`.
pub fn freq_graph_component(
    t: &RootedTree,
    g: &MultiGraph,
    dec: &ExpanderDecomposition,
    i: usize,
    good: &[usize],
) -> Result<FreqReport> {
    freq_graph_component_with_budget(t, g, dec, i, good, DEFAULT_EMBEDDING_BUDGET)
}

pub fn freq_graph_component_with_budget(
    t: &RootedTree,
    g: &MultiGraph,
    dec: &ExpanderDecomposition,
    i: usize,
    good: &[usize],
    budget: u64,
) -> Result<FreqReport> {
    check_part(dec, g, i)?;
    for &v in good {
        check_vertex(v, g.n())?;
        if dec.label(v) != i {
            return Err(Error::Precondition(format!("good vertex {v} is not in part {i}")));
        }
    }
    let n = g.n();
    let part = dec.part(i);
    let in_part = membership(n, &part);
    // b(v) = Σ_{u ∈ V_i, u ∼ v} 1/deg(u)
    let b: Vec<f64> = (0..n)
        .map(|v| {
            if !in_part[v] {
                return 0.0;
            }
            g.neighbors(v).iter().filter(|(u, _)| in_part[*u]).map(|&(u, m)| m as f64 / g.degree(u) as f64).sum()
        })
        .collect();
    let allowed = membership(n, good);
    let pat = Pattern::new(t);
    let removed = BTreeMap::new();
    let emb = Embedding { g, allowed: &allowed, b: &b, removed: &removed, budget, steps: AtomicU64::new(0) };
    let (per_root, tuples) = emb.sum(&pat)?;
    let total: f64 = per_root.iter().map(|(_, s)| s).sum();
    let value = total / (part.len() as f64 * pat.stab);
    Ok(FreqReport { value, terms: vec![(i, value)], tuple_count: tuples })
}

/// `Freq(T; G)`: big parts weighted by `|V_i| / n`, goodness under default constants.
pub fn freq_graph(t: &RootedTree, g: &MultiGraph, dec: &ExpanderDecomposition, alpha: f64, eps: f64) -> Result<FreqReport> {
    freq_graph_with_constants(t, g, dec, alpha, eps, &GoodnessConstants::default())
}

pub fn freq_graph_with_constants(
    t: &RootedTree,
    g: &MultiGraph,
    dec: &ExpanderDecomposition,
    alpha: f64,
    eps: f64,
    constants: &GoodnessConstants,
) -> Result<FreqReport> {
    let report = good_vertices(g, dec, alpha, eps, constants)?;
    let n = g.n() as f64;
    let mut terms = Vec::new();
    let mut tuples = 0;
    for &i in &report.big {
        let good: Vec<usize> = report.good.iter().copied().filter(|&v| dec.label(v) == i).collect();
        let c = freq_graph_component(t, g, dec, i, &good)?;
        terms.push((i, dec.part(i).len() as f64 / n * c.value));
        tuples += c.tuple_count;
    }
    let value = terms.iter().map(|(_, v)| v).sum();
    Ok(FreqReport { value, terms, tuple_count: tuples })
}

/// `Freq⁻(T; G, V_0, E_0)` with whole-graph degrees and `b_G(v) = Σ_{u∼v} 1/deg(u)`.
/// Each entry of `e0` removes one copy of that pair.
pub fn freq_minus(t: &RootedTree, g: &MultiGraph, v0: &[usize], e0: &[(usize, usize)]) -> Result<FreqReport> {
    freq_minus_with_budget(t, g, v0, e0, DEFAULT_EMBEDDING_BUDGET)
}

pub fn freq_minus_with_budget(
    t: &RootedTree,
    g: &MultiGraph,
    v0: &[usize],
    e0: &[(usize, usize)],
    budget: u64,
) -> Result<FreqReport> {
    let n = g.n();
    let mut removed = BTreeMap::new();
    for &(a, b) in e0 {
        check_vertex(a, n)?;
        check_vertex(b, n)?;
        if g.multiplicity(a, b) == 0 {
            return Err(Error::EdgeNotInGraph(a, b));
        }
        *removed.entry((a.min(b), a.max(b))).or_insert(0) += 1;
    }
    for &v in v0 {
        check_vertex(v, n)?;
    }
    let excluded = membership(n, v0);
    let allowed: Vec<bool> = excluded.iter().map(|&x| !x).collect();
    if let Some(v) = (0..n).find(|&v| allowed[v] && g.degree(v) == 0) {
        return Err(Error::Precondition(format!("vertex {v} outside V_0 has degree zero")));
    }
    let b: Vec<f64> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&(u, m)| m as f64 / g.degree(u) as f64).sum())
        .collect();
    let pat = Pattern::new(t);
    let emb = Embedding { g, allowed: &allowed, b: &b, removed: &removed, budget, steps: AtomicU64::new(0) };
    let (per_root, tuples) = emb.sum(&pat)?;
    let total: f64 = per_root.iter().map(|(_, s)| s).sum();
    let value = total / (n as f64 * pat.stab);
    Ok(FreqReport { value, terms: vec![(0, value)], tuple_count: tuples })
}

/// Number of injective maps of `t` into `g` sending tree edges to graph edges.
#[cfg(test)]
pub(crate) fn count_embeddings(t: &RootedTree, g: &MultiGraph) -> u64 {
    let allowed = vec![true; g.n()];
    let b = vec![0.0; g.n()];
    let removed = BTreeMap::new();
    let emb = Embedding { g, allowed: &allowed, b: &b, removed: &removed, budget: u64::MAX, steps: AtomicU64::new(0) };
    emb.sum(&Pattern::new(t)).unwrap().1
}
