//! Rooted trees, canonical codes and local statistics of spanning trees.
//!
//! Canonical codes are AHU nested parentheses over sorted child codes, with the
//! vertex count prefixed at the top level: the single edge is `2:(())`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::decompose::ExpanderDecomposition;
use crate::error::{Error, Result};
use crate::graph::check_vertex;
use crate::ust::SpanningTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    root: usize,
}

#[derive(Serialize, Deserialize)]
struct ParentJson {
    parent: Vec<i64>,
}

impl RootedTree {
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!("expected exactly one root, found {}", roots.len())));
        }
        let root = roots[0];
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n || p == v {
                    return Err(Error::InvalidTree(format!("bad parent {p} for vertex {v}")));
                }
                children[p].push(v);
            }
        }
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &c in &children[x] {
                depth[c] = depth[x] + 1;
                reached += 1;
                queue.push_back(c);
            }
        }
        if reached != n {
            return Err(Error::InvalidTree("parent array contains a cycle".into()));
        }
        Ok(RootedTree { parent, children, depth, root })
    }

    /// Parent array with `-1` marking the root.
    pub fn from_parent_array(parent: &[i64]) -> Result<Self> {
        let n = parent.len() as i64;
        let conv = parent
            .iter()
            .map(|&p| match p {
                -1 => Ok(None),
                p if (0..n).contains(&p) => Ok(Some(p as usize)),
                p => Err(Error::InvalidTree(format!("parent index {p} out of range"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(conv)
    }

    pub fn single_vertex() -> Self {
        Self::new(vec![None]).unwrap()
    }

    /// Root with `k` leaf children.
    pub fn star(k: usize) -> Self {
        let mut parent = vec![None];
        parent.extend(std::iter::repeat_n(Some(0), k));
        Self::new(parent).unwrap()
    }

    /// Path on `len` vertices rooted at an end.
    pub fn path(len: usize) -> Self {
        let parent = (0..len).map(|v| v.checked_sub(1)).collect();
        Self::new(parent).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: ParentJson = serde_json::from_str(text)?;
        Self::from_parent_array(&p.parent)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let parent = self.parent.iter().map(|p| p.map_or(-1, |p| p as i64)).collect();
        serde_json::to_string(&ParentJson { parent }).expect("serializable")
    }

    /// Parses a canonical code (with or without the size prefix).
    pub fn from_code(code: &str) -> Result<Self> {
        let body = code.split_once(':').map_or(code, |(_, b)| b);
        let mut parent = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for ch in body.chars() {
            match ch {
                '(' => {
                    parent.push(stack.last().copied());
                    stack.push(parent.len() - 1);
                }
                ')' => {
                    stack.pop().ok_or_else(|| Error::InvalidTree(format!("unbalanced code `{code}`")))?;
                }
                _ => return Err(Error::InvalidTree(format!("bad character in code `{code}`"))),
            }
        }
        if !stack.is_empty() || parent.is_empty() {
            return Err(Error::InvalidTree(format!("unbalanced code `{code}`")));
        }
        let tree = Self::new(parent)?;
        if tree.canonical_code_body() != body {
            return Err(Error::InvalidTree(format!("`{code}` is not in canonical form")));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    fn subtree_codes(&self) -> Vec<String> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.depth[v]));
        let mut codes = vec![String::new(); self.len()];
        for v in order {
            let mut kids: Vec<&str> = self.children[v].iter().map(|&c| codes[c].as_str()).collect();
            kids.sort_unstable();
            let mut s = String::with_capacity(2 + kids.iter().map(|k| k.len()).sum::<usize>());
            s.push('(');
            kids.iter().for_each(|k| s.push_str(k));
            s.push(')');
            codes[v] = s;
        }
        codes
    }

    fn canonical_code_body(&self) -> String {
        std::mem::take(&mut self.subtree_codes()[self.root])
    }

    /// Canonical code: equal iff the trees are isomorphic as rooted trees.
    pub fn canonical_code(&self) -> String {
        format!("{}:{}", self.len(), self.canonical_code_body())
    }

    /// Number of root-preserving automorphisms.
    pub fn stab_size(&self) -> u128 {
        let codes = self.subtree_codes();
        let mut total: u128 = 1;
        for v in 0..self.len() {
            let mut counts: BTreeMap<&str, u128> = BTreeMap::new();
            for &c in &self.children[v] {
                *counts.entry(codes[c].as_str()).or_insert(0) += 1;
            }
            for &m in counts.values() {
                total = (2..=m).fold(total, |acc, x| acc.saturating_mul(x));
            }
        }
        total
    }

    /// Relabels vertices by height, ties broken by subtree code then original
    /// index, so the root is 0 and the height-`r` vertices come last.
    pub fn normalized(&self) -> RootedTree {
        let codes = self.subtree_codes();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.depth[a]
                .cmp(&self.depth[b])
                .then_with(|| codes[a].cmp(&codes[b]))
                .then(a.cmp(&b))
        });
        let mut index = vec![0; self.len()];
        for (new, &old) in order.iter().enumerate() {
            index[old] = new;
        }
        let parent = order.iter().map(|&old| self.parent[old].map(|p| index[p])).collect();
        RootedTree::new(parent).expect("relabeling preserves validity")
    }

    /// First position at maximal height in [`normalized`](Self::normalized) order.
    pub fn p_index(&self) -> usize {
        let r = self.height();
        self.depth.iter().filter(|&&d| d < r).count()
    }

    /// True if `self` equals the ball of radius `depth` of `other` (same root).
    pub fn is_truncation_of(&self, other: &RootedTree) -> bool {
        other.truncate(self.height()).canonical_code() == self.canonical_code()
    }

    /// Keeps vertices of depth ≤ `r`.
    pub fn truncate(&self, r: usize) -> RootedTree {
        let keep: Vec<usize> = (0..self.len()).filter(|&v| self.depth[v] <= r).collect();
        let mut index = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let parent = keep.iter().map(|&v| self.parent[v].map(|p| index[p])).collect();
        RootedTree::new(parent).expect("truncation preserves validity")
    }
}

/// Root-preserving isomorphism test via canonical codes.
pub fn rooted_isomorphic(a: &RootedTree, b: &RootedTree) -> bool {
    a.len() == b.len() && a.canonical_code() == b.canonical_code()
}

/// Every rooted tree with at most `max_vertices` vertices up to isomorphism,
/// sorted by size then code.
pub fn enumerate_rooted_trees(max_vertices: usize) -> Vec<RootedTree> {
    let mut out = Vec::new();
    if max_vertices == 0 {
        return out;
    }
    let mut level: BTreeSet<String> = BTreeSet::from([RootedTree::single_vertex().canonical_code()]);
    for size in 1..=max_vertices {
        let trees: Vec<RootedTree> = level.iter().map(|c| RootedTree::from_code(c).expect("canonical")).collect();
        if size == max_vertices {
            out.extend(trees);
            break;
        }
        let mut next = BTreeSet::new();
        for t in &trees {
            for v in 0..t.len() {
                let mut parent = t.parent.clone();
                parent.push(Some(v));
                next.insert(RootedTree::new(parent).expect("leaf extension").canonical_code());
            }
        }
        out.extend(trees);
        level = next;
    }
    out
}

/// Ball of radius `r` around `v` in the tree, rooted at `v`, in BFS order.
pub fn ball(tree: &SpanningTree, v: usize, r: usize) -> Result<RootedTree> {
    check_vertex(v, tree.n())?;
    let mut parent = vec![None];
    let mut local = vec![v];
    let mut depth = vec![0];
    let mut head = 0;
    while head < local.len() {
        let (x, d) = (local[head], depth[head]);
        if d < r {
            let from = parent[head].map(|p: usize| local[p]);
            for &y in tree.neighbors(x) {
                if Some(y) != from {
                    parent.push(Some(head));
                    local.push(y);
                    depth.push(d + 1);
                }
            }
        }
        head += 1;
    }
    RootedTree::new(parent)
}

/// Counts of canonical codes of `B(v, r)` over all roots `v`.
pub fn local_census(tree: &SpanningTree, r: usize) -> BTreeMap<String, usize> {
    let mut census = BTreeMap::new();
    for v in 0..tree.n() {
        let code = ball(tree, v, r).expect("vertex in range").canonical_code();
        *census.entry(code).or_insert(0) += 1;
    }
    census
}

/// Merges `other` into `into` (commutative).
pub fn merge_census(into: &mut BTreeMap<String, usize>, other: &BTreeMap<String, usize>) {
    for (k, v) in other {
        *into.entry(k.clone()).or_insert(0) += v;
    }
}

/// `L_k`: number of vertices of tree degree `k`.
pub fn degree_counts(tree: &SpanningTree) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for v in 0..tree.n() {
        *counts.entry(tree.degree(v)).or_insert(0) += 1;
    }
    counts
}

/// Tree edges joining different parts or touching the residual part `V_0`.
pub fn cross_edge_count(tree: &SpanningTree, dec: &ExpanderDecomposition) -> Result<usize> {
    let labels = dec.labels();
    if labels.len() != tree.n() {
        return Err(Error::PartitionMismatch { labels: labels.len(), n: tree.n() });
    }
    Ok(tree
        .edges()
        .iter()
        .filter(|e| {
            let (a, b) = (labels[e.u], labels[e.v]);
            a != b || a == 0
        })
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, MultiGraph};

    fn tree_of(n: usize, pairs: &[(usize, usize)]) -> SpanningTree {
        SpanningTree::new(n, pairs.iter().map(|&(a, b)| Edge::new(a, b)).collect()).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn edge_set(t: &RootedTree) -> BTreeSet<(usize, usize)> {
        t.edges().map(|(a, b)| (a.min(b), a.max(b))).collect()
    }

    fn brute_automorphisms(t: &RootedTree) -> u128 {
        let edges = edge_set(t);
        permutations(t.len())
            .into_iter()
            .filter(|p| p[t.root()] == t.root())
            .filter(|p| edges.iter().all(|&(a, b)| edges.contains(&(p[a].min(p[b]), p[a].max(p[b])))))
            .count() as u128
    }

    fn brute_isomorphic(a: &RootedTree, b: &RootedTree) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let eb = edge_set(b);
        permutations(a.len()).into_iter().any(|p| {
            p[a.root()] == b.root() && a.edges().all(|(x, y)| eb.contains(&(p[x].min(p[y]), p[x].max(p[y]))))
        })
    }

    #[test]
    fn codes_examples() {
        let s1 = RootedTree::new(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        let s2 = RootedTree::new(vec![Some(3), Some(3), Some(3), None]).unwrap();
        assert_eq!(s1.canonical_code(), s2.canonical_code());
        assert!(rooted_isomorphic(&s1, &s2));
        let end = RootedTree::path(3);
        let center = RootedTree::star(2);
        assert_ne!(end.canonical_code(), center.canonical_code());
        assert_eq!(RootedTree::single_vertex().canonical_code(), "1:()");
        assert_eq!(RootedTree::path(2).canonical_code(), "2:(())");
    }

    #[test]
    fn small_rooted_trees_are_pairwise_distinguished() {
        let all = enumerate_rooted_trees(4);
        let four: Vec<_> = all.iter().filter(|t| t.len() == 4).collect();
        assert_eq!(four.len(), 4);
        for (i, a) in four.iter().enumerate() {
            for (j, b) in four.iter().enumerate() {
                assert_eq!(rooted_isomorphic(a, b), i == j);
                assert_eq!(brute_isomorphic(a, b), i == j);
            }
        }
        let three: Vec<_> = all.iter().filter(|t| t.len() == 3).collect();
        assert_eq!(three.len(), 2);
    }

    #[test]
    fn rooted_tree_counts() {
        let counts: Vec<usize> = {
            let all = enumerate_rooted_trees(9);
            (1..=9).map(|s| all.iter().filter(|t| t.len() == s).count()).collect()
        };
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48, 115, 286]);
    }

    #[test]
    fn stab_examples() {
        assert_eq!(RootedTree::star(3).stab_size(), 6);
        assert_eq!(brute_automorphisms(&RootedTree::star(3)), 6);
        assert_eq!(RootedTree::path(4).stab_size(), 1);
        let forks = RootedTree::new(vec![None, Some(0), Some(1), Some(0), Some(3)]).unwrap();
        assert_eq!(forks.stab_size(), 2);
        assert_eq!(brute_automorphisms(&forks), 2);
    }

    #[test]
    fn stab_matches_brute_force_up_to_seven() {
        for t in enumerate_rooted_trees(7) {
            assert_eq!(t.stab_size(), brute_automorphisms(&t), "{}", t.canonical_code());
        }
    }

    #[test]
    fn code_roundtrip_and_normalization() {
        for t in enumerate_rooted_trees(7) {
            let code = t.canonical_code();
            assert_eq!(RootedTree::from_code(&code).unwrap().canonical_code(), code);
            let norm = t.normalized();
            assert_eq!(norm.canonical_code(), code);
            assert_eq!(norm.root(), 0);
            let p = norm.p_index();
            let r = norm.height();
            assert!((0..norm.len()).all(|v| (norm.depth(v) == r) == (v >= p)));
            assert!((1..norm.len()).all(|v| norm.parent(v).unwrap() < v));
        }
        assert!(RootedTree::from_code("3:(()").is_err());
        assert!(RootedTree::from_code("x").is_err());
        let json = RootedTree::star(2).to_json();
        assert_eq!(json, r#"{"parent":[-1,0,0]}"#);
        assert_eq!(RootedTree::from_json(&json).unwrap(), RootedTree::star(2));
        assert!(RootedTree::from_json(r#"{"parent":[-1,-1]}"#).is_err());
        assert!(RootedTree::from_json(r#"{"parent":[1,0]}"#).is_err());
    }

    #[test]
    fn ball_examples() {
        let p = tree_of(3, &[(0, 1), (1, 2)]);
        assert!(rooted_isomorphic(&ball(&p, 1, 1).unwrap(), &RootedTree::star(2)));
        assert!(rooted_isomorphic(&ball(&p, 0, 1).unwrap(), &RootedTree::path(2)));
        assert!(rooted_isomorphic(&ball(&p, 0, 5).unwrap(), &RootedTree::path(3)));
        assert!(ball(&p, 3, 1).is_err());
    }

    #[test]
    fn ball_monotone_in_radius() {
        let t = tree_of(8, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (0, 6), (6, 7)]);
        for v in 0..8 {
            for r in 0..5 {
                let small = ball(&t, v, r).unwrap();
                let large = ball(&t, v, r + 1).unwrap();
                assert_eq!(large.truncate(r).canonical_code(), small.canonical_code());
            }
        }
    }

    #[test]
    fn census_examples() {
        let p5 = tree_of(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let c = local_census(&p5, 1);
        assert_eq!(c[&RootedTree::path(2).canonical_code()], 2);
        assert_eq!(c[&RootedTree::star(2).canonical_code()], 3);
        let star = tree_of(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let c = local_census(&star, 1);
        assert_eq!(c[&RootedTree::star(4).canonical_code()], 1);
        assert_eq!(c[&RootedTree::path(2).canonical_code()], 4);
        let c = local_census(&star, 0);
        assert_eq!(c.len(), 1);
        assert_eq!(c["1:()"], 5);
        for r in 0..4 {
            assert_eq!(local_census(&p5, r).values().sum::<usize>(), 5);
        }
    }

    #[test]
    fn degree_count_examples() {
        let p = tree_of(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        assert_eq!(degree_counts(&p), BTreeMap::from([(1, 2), (2, 4)]));
        let star = tree_of(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let d = degree_counts(&star);
        assert_eq!(d, BTreeMap::from([(1, 4), (4, 1)]));
        assert_eq!(d.iter().map(|(k, c)| k * c).sum::<usize>(), 2 * 4);
    }

    #[test]
    fn cross_edge_examples() {
        let g = MultiGraph::complete(4);
        let t = tree_of(4, &[(0, 1), (1, 2), (2, 3)]);
        let one = ExpanderDecomposition::from_labels(&g, vec![1; 4], 0.1, 0.1, 0.1).unwrap();
        assert_eq!(cross_edge_count(&t, &one).unwrap(), 0);
        let zero = ExpanderDecomposition::from_labels(&g, vec![0; 4], 0.1, 0.1, 0.1).unwrap();
        assert_eq!(cross_edge_count(&t, &zero).unwrap(), 3);
        let split = ExpanderDecomposition::from_labels(&g, vec![1, 1, 2, 2], 0.1, 0.1, 0.1).unwrap();
        assert_eq!(cross_edge_count(&t, &split).unwrap(), 1);
        let other = ExpanderDecomposition::from_labels(&MultiGraph::complete(3), vec![1; 3], 0.1, 0.1, 0.1).unwrap();
        assert!(matches!(cross_edge_count(&t, &other), Err(Error::PartitionMismatch { .. })));
    }
}
