//! Loopless multigraphs.
//!
//! Edge counting follows the ordered-pair convention: `e(A, B)` counts pairs
//! `(a, b)` with `a ∈ A`, `b ∈ B` forming an edge, with multiplicity, so an
//! edge with both ends in `A ∩ B` is counted twice.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Default vertex limit for exhaustive cut enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// One copy of a (possibly parallel) edge. Endpoints are normalized so `u < v`;
/// `copy` distinguishes parallel edges between the same pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub copy: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        Self::with_copy(a, b, 0)
    }

    pub fn with_copy(a: usize, b: usize, copy: usize) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        Edge { u, v, copy }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

fn normalize(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), usize>,
    degree: Vec<usize>,
    neighbors: Vec<Vec<(usize, usize)>>,
    // Walk table: one slot per edge copy at each endpoint, so a uniform slot
    // is a neighbor drawn proportionally to multiplicity plus a uniform copy.
    slot_offsets: Vec<usize>,
    slot_target: Vec<u32>,
    slot_copy: Vec<u32>,
}

/// Result of contracting an edge set.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: MultiGraph,
    /// `vertex_map[old] = new`, surjective onto `0..graph.n()`.
    pub vertex_map: Vec<usize>,
    /// For every pair of the contracted graph, the original edge copies it
    /// carries, in copy order.
    pub edge_origin: BTreeMap<(usize, usize), Vec<Edge>>,
}

impl MultiGraph {
    /// Builds a multigraph from `(u, v, multiplicity)` triples; repeated pairs accumulate.
    pub fn build(n: usize, edge_list: &[(usize, usize, usize)]) -> Result<Self> {
        let mut edges = BTreeMap::new();
        for &(u, v, m) in edge_list {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            if m == 0 {
                return Err(Error::ZeroMultiplicity(u, v));
            }
            *edges.entry(normalize(u, v)).or_insert(0) += m;
        }
        Ok(Self::from_map(n, edges))
    }

    /// Simple graph from a list of pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let list: Vec<_> = pairs.iter().map(|&(u, v)| (u, v, 1)).collect();
        Self::build(n, &list)
    }

    fn from_map(n: usize, edges: BTreeMap<(usize, usize), usize>) -> Self {
        let mut degree = vec![0; n];
        let mut neighbors = vec![Vec::new(); n];
        for (&(u, v), &m) in &edges {
            degree[u] += m;
            degree[v] += m;
            neighbors[u].push((v, m));
            neighbors[v].push((u, m));
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let mut slot_offsets = Vec::with_capacity(n + 1);
        let total: usize = degree.iter().sum();
        let mut slot_target = Vec::with_capacity(total);
        let mut slot_copy = Vec::with_capacity(total);
        slot_offsets.push(0);
        for list in &neighbors {
            for &(w, m) in list {
                for c in 0..m {
                    slot_target.push(w as u32);
                    slot_copy.push(c as u32);
                }
            }
            slot_offsets.push(slot_target.len());
        }
        MultiGraph { n, edges, degree, neighbors, slot_offsets, slot_target, slot_copy }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = BTreeMap::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.insert((u, v), 1);
            }
        }
        Self::from_map(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges = BTreeMap::new();
        if n >= 3 {
            for u in 0..n {
                *edges.entry(normalize(u, (u + 1) % n)).or_insert(0) += 1;
            }
        } else if n == 2 {
            edges.insert((0, 1), 2);
        }
        Self::from_map(n, edges)
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|v| ((v - 1, v), 1)).collect();
        Self::from_map(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of edge copies.
    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    /// Number of distinct adjacent pairs.
    pub fn pair_len(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges.get(&normalize(u, v)).copied().unwrap_or(0)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn min_degree(&self) -> usize {
        self.degree.iter().copied().min().unwrap_or(0)
    }

    /// Distinct neighbors of `v` with multiplicities, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.neighbors[v]
    }

    /// `f`: largest number of parallel edges between a pair (0 for an edgeless graph).
    pub fn max_multiplicity(&self) -> usize {
        self.edges.values().copied().max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.max_multiplicity() <= 1
    }

    /// Adjacent pairs with multiplicities in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.edges.iter().map(|(&p, &m)| (p, m))
    }

    /// Every edge copy in sorted order.
    pub fn edge_copies(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges
            .iter()
            .flat_map(|(&(u, v), &m)| (0..m).map(move |copy| Edge { u, v, copy }))
    }

    pub fn contains(&self, e: &Edge) -> bool {
        e.u != e.v && e.copy < self.multiplicity(e.u, e.v)
    }

    pub(crate) fn walk_slots(&self, v: usize) -> (&[u32], &[u32]) {
        let (a, b) = (self.slot_offsets[v], self.slot_offsets[v + 1]);
        (&self.slot_target[a..b], &self.slot_copy[a..b])
    }

    /// Dense multiplicity matrix, row-major.
    pub fn dense_multiplicities(&self) -> Vec<usize> {
        let n = self.n;
        let mut m = vec![0; n * n];
        for (&(u, v), &c) in &self.edges {
            m[u * n + v] = c;
            m[v * n + u] = c;
        }
        m
    }

    /// `e(A, B)` in the ordered-pair convention.
    pub fn pair_count(&self, a: &[usize], b: &[usize]) -> Result<usize> {
        for &x in a.iter().chain(b) {
            check_vertex(x, self.n)?;
        }
        let in_b = membership(self.n, b);
        let mut seen = vec![false; self.n];
        let mut total = 0;
        for &x in a {
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            total += self.neighbors[x].iter().filter(|(w, _)| in_b[*w]).map(|(_, m)| m).sum::<usize>();
        }
        Ok(total)
    }

    /// `deg(v, A)` given a membership mask for `A`.
    pub fn degree_into(&self, v: usize, mask: &[bool]) -> usize {
        self.neighbors[v].iter().filter(|(w, _)| mask[*w]).map(|(_, m)| m).sum()
    }

    /// Merges the endpoints of every edge in `s`, dropping the loops this creates.
    pub fn contract(&self, s: &[(usize, usize)]) -> Result<Contraction> {
        let mut dsu = Dsu::new(self.n);
        for &(u, v) in s {
            if u >= self.n || v >= self.n || self.multiplicity(u, v) == 0 {
                return Err(Error::EdgeNotInGraph(u, v));
            }
            dsu.union(u, v);
        }
        let mut new_index = vec![usize::MAX; self.n];
        let mut vertex_map = vec![0; self.n];
        let mut next = 0;
        for v in 0..self.n {
            let r = dsu.find(v);
            if new_index[r] == usize::MAX {
                new_index[r] = next;
                next += 1;
            }
            vertex_map[v] = new_index[r];
        }
        let mut edge_origin: BTreeMap<(usize, usize), Vec<Edge>> = BTreeMap::new();
        for e in self.edge_copies() {
            let (a, b) = (vertex_map[e.u], vertex_map[e.v]);
            if a != b {
                edge_origin.entry(normalize(a, b)).or_default().push(e);
            }
        }
        let edges = edge_origin.iter().map(|(&p, list)| (p, list.len())).collect();
        Ok(Contraction { graph: Self::from_map(next, edges), vertex_map, edge_origin })
    }

    /// Removes one copy of each listed pair (repeat a pair to remove more copies).
    pub fn delete(&self, s: &[(usize, usize)]) -> Result<Self> {
        let mut edges = self.edges.clone();
        for &(u, v) in s {
            let key = normalize(u, v);
            match edges.get_mut(&key) {
                Some(m) if *m > 0 => *m -= 1,
                _ => return Err(Error::EdgeNotInGraph(u, v)),
            }
        }
        edges.retain(|_, m| *m > 0);
        Ok(Self::from_map(self.n, edges))
    }

    /// Subgraph induced by `a`, relabeled `0..|a|` in the given order; returns the new→old map.
    pub fn induced_subgraph(&self, a: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut index = vec![usize::MAX; self.n];
        let mut map = Vec::with_capacity(a.len());
        for &v in a {
            check_vertex(v, self.n)?;
            if index[v] == usize::MAX {
                index[v] = map.len();
                map.push(v);
            }
        }
        let mut edges = BTreeMap::new();
        for (&(u, v), &m) in &self.edges {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                edges.insert(normalize(index[u], index[v]), m);
            }
        }
        Ok((Self::from_map(map.len(), edges), map))
    }

    /// Connected component label for every vertex, labels in order of first vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(w, _) in &self.neighbors[x] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().0 == 1
    }

    /// Exact `min_U e(U, V∖U) / (|U|(n−|U|))` over proper nonempty `U`.
    /// `None` for graphs with fewer than two vertices (no proper cut exists).
    pub fn exact_expansion(&self, limit: usize) -> Result<Option<f64>> {
        if self.n > limit || self.n > 63 {
            return Err(Error::TooLargeForExactCheck(self.n, limit));
        }
        if self.n < 2 {
            return Ok(None);
        }
        let n = self.n;
        let mut best = f64::INFINITY;
        for_each_cut(self, |_, size, cut, _| {
            let ratio = cut as f64 / (size * (n - size)) as f64;
            if ratio < best {
                best = ratio;
            }
        });
        Ok(Some(best))
    }

    /// Exact γ-expansion check by enumerating every vertex subset (`n ≤ 20`).
    pub fn is_gamma_expander(&self, gamma: f64) -> Result<bool> {
        self.is_gamma_expander_with_limit(gamma, EXHAUSTIVE_LIMIT)
    }

    pub fn is_gamma_expander_with_limit(&self, gamma: f64, limit: usize) -> Result<bool> {
        if self.n > limit || self.n > 63 {
            return Err(Error::TooLargeForExactCheck(self.n, limit));
        }
        let n = self.n;
        let mut ok = true;
        for_each_cut(self, |_, size, cut, _| {
            if (cut as f64) < gamma * (size * (n - size)) as f64 {
                ok = false;
            }
        });
        Ok(ok)
    }

    /// Parses the text edge-list format: `n m` then `m` lines `u v [mult]`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let head: Vec<usize> = parse_fields(header)?;
        if head.len() != 2 {
            return Err(Error::Parse(format!("header must be `n m`, got `{header}`")));
        }
        let (n, m) = (head[0], head[1]);
        let mut list = Vec::with_capacity(m);
        for line in lines.by_ref().take(m) {
            let f: Vec<usize> = parse_fields(line)?;
            match f.as_slice() {
                [u, v] => list.push((*u, *v, 1)),
                [u, v, c] => list.push((*u, *v, *c)),
                _ => return Err(Error::Parse(format!("bad edge line `{line}`"))),
            }
        }
        if list.len() != m {
            return Err(Error::Parse(format!("expected {m} edge lines, found {}", list.len())));
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after edge list".into()));
        }
        Self::build(n, &list)
    }

    pub fn read_edge_list(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for (&(u, v), &m) in &self.edges {
            if m == 1 {
                let _ = writeln!(out, "{u} {v}");
            } else {
                let _ = writeln!(out, "{u} {v} {m}");
            }
        }
        out
    }
}

fn parse_fields(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad integer `{t}`"))))
        .collect()
}

pub(crate) fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v < n {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange { vertex: v, n })
    }
}

pub(crate) fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in set {
        if v < n {
            mask[v] = true;
        }
    }
    mask
}

/// Visits every cut `(U, V∖U)` once, with `U` ranging over nonempty subsets
/// that avoid the last vertex. The callback receives the bitmask of `U`,
/// `|U|`, `e(U, V∖U)` and `vol(U) = Σ_{u∈U} deg(u)`. Gray-code order keeps
/// each step `O(n)`. Requires `2 ≤ n ≤ 63`.
pub(crate) fn for_each_cut(g: &MultiGraph, mut visit: impl FnMut(u64, usize, usize, usize)) {
    let n = g.n();
    assert!((2..=63).contains(&n));
    let dense = g.dense_multiplicities();
    // inside[x] = deg(x, U)
    let mut inside = vec![0usize; n];
    let mut mask = 0u64;
    let (mut size, mut cut, mut vol) = (0usize, 0usize, 0usize);
    let steps = 1u64 << (n - 1);
    for i in 1..steps {
        let y = i.trailing_zeros() as usize;
        let d = g.degree(y);
        if mask & (1 << y) == 0 {
            cut = cut + d - 2 * inside[y];
            mask |= 1 << y;
            size += 1;
            vol += d;
            for x in 0..n {
                inside[x] += dense[x * n + y];
            }
        } else {
            cut = cut + 2 * inside[y] - d;
            mask &= !(1 << y);
            size -= 1;
            vol -= d;
            for x in 0..n {
                inside[x] -= dense[x * n + y];
            }
        }
        visit(mask, size, cut, vol);
    }
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
