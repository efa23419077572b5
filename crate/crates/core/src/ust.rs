//! Uniform spanning trees: Wilson and Aldous–Broder samplers, conditioning by
//! contraction/deletion, and exhaustive enumeration for small graphs.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use rayon::prelude::*;

use crate::electric::log_spanning_tree_count;
use crate::error::{Error, Result};
use crate::graph::{Dsu, Edge, MultiGraph};
use crate::rng::{self, StreamRng};

/// Default cap on the number of enumerated trees.
pub const ENUMERATION_CAP: usize = 1_000_000;
/// Largest vertex count accepted by the enumerator.
pub const ENUMERATION_MAX_VERTICES: usize = 12;

/// A spanning tree as a set of host edge copies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl SpanningTree {
    /// Checks that `edges` forms a tree on `0..n`.
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if n == 0 || edges.len() != n - 1 {
            return Err(Error::Precondition(format!("a spanning tree on {n} vertices needs {} edges", n.saturating_sub(1))));
        }
        let mut dsu = Dsu::new(n);
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            if e.v >= n || e.u == e.v {
                return Err(Error::VertexOutOfRange { vertex: e.v, n });
            }
            if !dsu.union(e.u, e.v) {
                return Err(Error::Precondition("edge set contains a cycle".into()));
            }
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        edges.sort_unstable();
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(SpanningTree { n, edges, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in sorted order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// True if every edge copy is present in `g`.
    pub fn spans(&self, g: &MultiGraph) -> bool {
        g.n() == self.n && self.edges.iter().all(|e| g.contains(e))
    }
}

/// Which exact sampler to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    #[default]
    Wilson,
    AldousBroder,
}

fn require_connected(g: &MultiGraph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::GraphDisconnected)
    }
}

fn step(g: &MultiGraph, x: usize, rng: &mut StreamRng) -> (usize, usize) {
    let (targets, copies) = g.walk_slots(x);
    let i = rng.random_range(0..targets.len());
    (targets[i] as usize, copies[i] as usize)
}

/// Wilson's loop-erased random walk algorithm rooted at vertex 0.
pub fn wilson_with_rng(g: &MultiGraph, rng: &mut StreamRng) -> Result<SpanningTree> {
    require_connected(g)?;
    let n = g.n();
    let mut in_tree = vec![false; n];
    let mut next = vec![(0usize, 0usize); n];
    in_tree[0] = true;
    let mut edges = Vec::with_capacity(n - 1);
    for start in 1..n {
        let mut u = start;
        while !in_tree[u] {
            next[u] = step(g, u, rng);
            u = next[u].0;
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            let (w, copy) = next[u];
            edges.push(Edge::with_copy(u, w, copy));
            u = w;
        }
    }
    SpanningTree::new(n, edges)
}

/// Aldous–Broder: first-entrance edges of a random walk from vertex 0.
pub fn aldous_broder_with_rng(g: &MultiGraph, rng: &mut StreamRng) -> Result<SpanningTree> {
    require_connected(g)?;
    let n = g.n();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut remaining = n - 1;
    let mut edges = Vec::with_capacity(n - 1);
    let mut x = 0;
    while remaining > 0 {
        let (y, copy) = step(g, x, rng);
        if !seen[y] {
            seen[y] = true;
            remaining -= 1;
            edges.push(Edge::with_copy(x, y, copy));
        }
        x = y;
    }
    SpanningTree::new(n, edges)
}

/// Exactly uniform spanning tree; deterministic given `seed`.
pub fn wilson_sample(g: &MultiGraph, seed: u64) -> Result<SpanningTree> {
    wilson_with_rng(g, &mut rng::stream(seed, 0))
}

/// `samples` independent trees; tree `i` uses stream `(seed, i)`.
pub fn sample_many(g: &MultiGraph, samples: usize, seed: u64, sampler: Sampler) -> Result<Vec<SpanningTree>> {
    require_connected(g)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            match sampler {
                Sampler::Wilson => wilson_with_rng(g, &mut rng),
                Sampler::AldousBroder => aldous_broder_with_rng(g, &mut rng),
            }
        })
        .collect()
}

/// Prepared conditioning `include ⊆ 𝒯`, `exclude ∩ 𝒯 = ∅`: the contracted and
/// pruned graph plus the map back to original edge copies.
pub struct Conditioned {
    n: usize,
    include: Vec<Edge>,
    graph: MultiGraph,
    origin: BTreeMap<(usize, usize), Vec<Edge>>,
}

impl Conditioned {
    pub fn new(g: &MultiGraph, include: &[Edge], exclude: &[Edge]) -> Result<Self> {
        for e in include.iter().chain(exclude) {
            if !g.contains(e) {
                return Err(Error::EdgeNotInGraph(e.u, e.v));
            }
        }
        let excluded: HashSet<Edge> = exclude.iter().copied().collect();
        if include.iter().any(|e| excluded.contains(e)) {
            return Err(Error::Precondition("an edge is both included and excluded".into()));
        }
        let mut dsu = Dsu::new(g.n());
        for e in include {
            if !dsu.union(e.u, e.v) {
                return Err(Error::IncludeHasCycle);
            }
        }
        let pairs: Vec<(usize, usize)> = include.iter().map(Edge::pair).collect();
        let contraction = g.contract(&pairs)?;
        let mut origin = BTreeMap::new();
        let mut list = Vec::new();
        for (pair, copies) in contraction.edge_origin {
            let kept: Vec<Edge> = copies.into_iter().filter(|e| !excluded.contains(e)).collect();
            if !kept.is_empty() {
                list.push((pair.0, pair.1, kept.len()));
                origin.insert(pair, kept);
            }
        }
        let graph = MultiGraph::build(contraction.graph.n(), &list)?;
        if !graph.is_connected() {
            return Err(Error::ConditioningDisconnects);
        }
        Ok(Conditioned { n: g.n(), include: include.to_vec(), graph, origin })
    }

    pub fn sample_with_rng(&self, rng: &mut StreamRng) -> Result<SpanningTree> {
        let small = wilson_with_rng(&self.graph, rng)?;
        let mut edges = self.include.clone();
        edges.extend(small.edges().iter().map(|e| self.origin[&e.pair()][e.copy]));
        SpanningTree::new(self.n, edges)
    }
}

/// UST of `g` conditioned on containing `include` and avoiding `exclude`.
pub fn conditional_sample(g: &MultiGraph, include: &[Edge], exclude: &[Edge], seed: u64) -> Result<SpanningTree> {
    Conditioned::new(g, include, exclude)?.sample_with_rng(&mut rng::stream(seed, 0))
}

/// All spanning trees, parallel copies counted separately.
pub fn enumerate_spanning_trees(g: &MultiGraph) -> Result<Vec<SpanningTree>> {
    enumerate_spanning_trees_capped(g, ENUMERATION_CAP)
}

pub fn enumerate_spanning_trees_capped(g: &MultiGraph, cap: usize) -> Result<Vec<SpanningTree>> {
    let n = g.n();
    if n > ENUMERATION_MAX_VERTICES {
        return Err(Error::TooManyTrees { trees: f64::NAN, n });
    }
    if !g.is_connected() {
        return Ok(Vec::new());
    }
    let expected = log_spanning_tree_count(g)?.exp();
    if expected > cap as f64 + 0.5 {
        return Err(Error::TooManyTrees { trees: expected, n });
    }
    let edges: Vec<Edge> = g.edge_copies().collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n - 1);
    extend(n, &edges, 0, &mut Dsu::new(n), &mut chosen, &mut out)?;
    Ok(out)
}

fn connectable(n: usize, dsu: &Dsu, rest: &[Edge]) -> bool {
    let mut d = dsu.clone();
    let mut parts = (0..n).filter(|&v| d.find(v) == v).count();
    for e in rest {
        if d.union(e.u, e.v) {
            parts -= 1;
        }
    }
    parts == 1
}

fn extend(
    n: usize,
    edges: &[Edge],
    idx: usize,
    dsu: &mut Dsu,
    chosen: &mut Vec<Edge>,
    out: &mut Vec<SpanningTree>,
) -> Result<()> {
    if chosen.len() == n - 1 {
        out.push(SpanningTree::new(n, chosen.clone())?);
        return Ok(());
    }
    if idx == edges.len() || chosen.len() + (edges.len() - idx) < n - 1 {
        return Ok(());
    }
    let e = edges[idx];
    let mut with = dsu.clone();
    if with.union(e.u, e.v) {
        chosen.push(e);
        extend(n, edges, idx + 1, &mut with, chosen, out)?;
        chosen.pop();
    }
    if connectable(n, dsu, &edges[idx + 1..]) {
        extend(n, edges, idx + 1, dsu, chosen, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_input_returns_itself() {
        let g = MultiGraph::from_pairs(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let t = wilson_sample(&g, 9).unwrap();
        let expect: Vec<Edge> = g.edge_copies().collect();
        assert_eq!(t.edges(), expect.as_slice());
    }

    #[test]
    fn samplers_are_deterministic_and_valid() {
        let g = MultiGraph::build(5, &[(0, 1, 2), (1, 2, 1), (2, 3, 3), (3, 4, 1), (4, 0, 1), (1, 3, 1)]).unwrap();
        for s in 0..20 {
            let a = wilson_sample(&g, s).unwrap();
            assert!(a.spans(&g));
            assert_eq!(a, wilson_sample(&g, s).unwrap());
            let b = aldous_broder_with_rng(&g, &mut rng::stream(s, 0)).unwrap();
            assert!(b.spans(&g));
        }
        let two = MultiGraph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(wilson_sample(&two, 0), Err(Error::GraphDisconnected)));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_spanning_trees(&MultiGraph::cycle(4)).unwrap().len(), 4);
        let k4 = enumerate_spanning_trees(&MultiGraph::complete(4)).unwrap();
        assert_eq!(k4.len(), 16);
        assert_eq!(k4.iter().collect::<HashSet<_>>().len(), 16);
        let d = enumerate_spanning_trees(&MultiGraph::build(2, &[(0, 1, 2)]).unwrap()).unwrap();
        assert_eq!(d.len(), 2);
        assert_ne!(d[0], d[1]);
        assert!(matches!(
            enumerate_spanning_trees_capped(&MultiGraph::complete(6), 100),
            Err(Error::TooManyTrees { .. })
        ));
        assert!(matches!(enumerate_spanning_trees(&MultiGraph::path(13)), Err(Error::TooManyTrees { .. })));
    }

    #[test]
    fn conditioning_examples() {
        let k3 = MultiGraph::complete(3);
        let mut seen = HashSet::new();
        for s in 0..200 {
            let t = conditional_sample(&k3, &[Edge::new(0, 1)], &[], s).unwrap();
            assert!(t.contains(&Edge::new(0, 1)));
            seen.insert(t);
        }
        assert_eq!(seen.len(), 2);

        let t = conditional_sample(&k3, &[], &[Edge::new(0, 1)], 1).unwrap();
        assert_eq!(t.edges(), &[Edge::new(0, 2), Edge::new(1, 2)]);

        let g = MultiGraph::from_pairs(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert!(matches!(conditional_sample(&g, &[], &[Edge::new(2, 3)], 0), Err(Error::ConditioningDisconnects)));
        assert!(matches!(
            conditional_sample(&k3, &[Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2)], &[], 0),
            Err(Error::IncludeHasCycle)
        ));
        let d = MultiGraph::build(3, &[(0, 1, 2), (1, 2, 1)]).unwrap();
        assert!(matches!(
            conditional_sample(&d, &[Edge::with_copy(0, 1, 0), Edge::with_copy(0, 1, 1)], &[], 0),
            Err(Error::IncludeHasCycle)
        ));
        let t = conditional_sample(&d, &[], &[Edge::with_copy(0, 1, 0)], 4).unwrap();
        assert!(t.contains(&Edge::with_copy(0, 1, 1)));
    }
}
