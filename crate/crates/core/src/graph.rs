//! Undirected graphs over `0..n` and the Gaifman graph of a structure.

use std::collections::{BTreeSet, VecDeque};

use crate::structure::ValuedStructure;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
    loops: BTreeSet<usize>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
            loops: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            self.loops.insert(u);
        } else {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            self.loops.contains(&u)
        } else {
            self.adj[u].contains(&v)
        }
    }

    /// Neighbours, excluding `v` itself even when it carries a loop.
    pub fn neighbours(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn loops(&self) -> &BTreeSet<usize> {
        &self.loops
    }

    /// Undirected edges `u < v`, loops excluded.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            out.extend(ns.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Induced subgraph on `keep`, relabelled to `0..keep.len()` in `keep`'s order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            if self.loops.contains(&v) {
                g.loops.insert(i);
            }
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX {
                    g.adj[i].insert(pos[w]);
                }
            }
        }
        g
    }

    /// Connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// BFS distances from `root`; unreachable vertices get `None`.
    pub fn bfs(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut q = VecDeque::new();
        dist[root] = Some(0);
        q.push_back(root);
        while let Some(v) = q.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Adjacency as bitmasks; only for graphs with at most 64 vertices.
    pub fn masks(&self) -> Vec<u64> {
        assert!(self.len() <= 64);
        self.adj
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect()
    }
}

/// Gaifman graph: `u ~ v` when both occur in a tuple of positive weight.
pub fn gaifman(a: &ValuedStructure) -> Graph {
    let mut g = Graph::new(a.size());
    for (_, args, _) in a.positive_tuples() {
        add_clique(&mut g, &args);
    }
    g
}

/// Make the entries of `scope` pairwise adjacent (repeated entries give loops).
pub fn add_clique(g: &mut Graph, scope: &[usize]) {
    for (i, &u) in scope.iter().enumerate() {
        for &v in &scope[i + 1..] {
            g.add_edge(u, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::Signature;
    use crate::value::{rat, ExtRat};
    use proptest::prelude::*;

    #[test]
    fn weight_zero_tuple_gives_no_edge() {
        let sig = Signature::of(&[("f", 2)]);
        let mut a = ValuedStructure::empty_left(sig, vec!["v1".into(), "v2".into()]).unwrap();
        assert_eq!(gaifman(&a).edge_count(), 0);
        a.set_named("f", &["v1", "v2"], ExtRat::zero()).unwrap();
        assert_eq!(gaifman(&a).edge_count(), 0);
        a.set_named("f", &["v1", "v2"], ExtRat::one()).unwrap();
        assert_eq!(gaifman(&a).edges(), vec![(0, 1)]);
    }

    #[test]
    fn ternary_tuple_gives_triangle() {
        let sig = Signature::of(&[("g", 3)]);
        let mut a = ValuedStructure::empty_left(sig, ValuedStructure::numbered_domain(3)).unwrap();
        a.set(0, vec![0, 1, 2], ExtRat::one()).unwrap();
        assert_eq!(gaifman(&a).edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn loops_are_recorded_separately() {
        let a = fixtures::loop_clique(3);
        let g = gaifman(&a);
        assert_eq!(g.loops().len(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(!g.neighbours(0).contains(&0));
    }

    #[test]
    fn bfs_on_path() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let d: Vec<usize> = g.bfs(0).into_iter().map(Option::unwrap).collect();
        assert_eq!(d, vec![0, 1, 2, 3, 4]);
    }

    proptest! {
        #[test]
        fn restriction_induces_subgraph(seed in 0u64..500, keep_mask in 0u32..(1 << 7)) {
            let a = fixtures::random_left(7, 0.4, seed, &[("f", 2), ("u", 1)]);
            let keep: Vec<usize> = (0..7).filter(|i| keep_mask & (1 << i) != 0).collect();
            let lhs = gaifman(&a.restrict(&keep).unwrap());
            let rhs = gaifman(&a).induced(&keep);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn components_of_disjoint_union() {
        let a = fixtures::path_left(2, &rat(1, 1), None);
        let u = ValuedStructure::disjoint_union(&[a.clone(), a]).unwrap();
        let g = gaifman(&u);
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3]]);
    }
}
