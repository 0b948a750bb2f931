//! Elimination orders and nice tree decompositions.

use std::collections::BTreeSet;

use crate::error::{Result, VcspError};
use crate::graph::Graph;

/// How hard to look for a narrow decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Effort {
    /// Min-fill elimination.
    #[default]
    Heuristic,
    /// Minimum width, by dynamic programming over vertex subsets.
    ExactSmall,
}

pub const EXACT_SMALL_MAX: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    /// Sorted.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted nice decomposition with empty root and leaf bags and binary joins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<Node>,
    root: usize,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// `max |bag| - 1`, and 0 for a decomposition with only empty bags.
    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Children before parents.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in self.nodes[t].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Rename vertex `v` to `map[v]`; bags stay sorted.
    pub fn relabel(&self, map: &[usize]) -> NiceTreeDecomposition {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let kind = match n.kind {
                    NodeKind::Introduce(v) => NodeKind::Introduce(map[v]),
                    NodeKind::Forget(v) => NodeKind::Forget(map[v]),
                    ref k => k.clone(),
                };
                let mut bag: Vec<usize> = n.bag.iter().map(|&v| map[v]).collect();
                bag.sort_unstable();
                Node {
                    kind,
                    bag,
                    children: n.children.clone(),
                }
            })
            .collect();
        NiceTreeDecomposition {
            nodes,
            root: self.root,
        }
    }

    /// Checks the nice-decomposition axioms, that the bags cover exactly `vertices`,
    /// every edge of `g` between them, and that each vertex's bags are connected.
    pub fn validate(&self, g: &Graph, vertices: &[usize]) -> Result<()> {
        let bad = |m: String| Err(VcspError::Input(format!("invalid tree decomposition: {m}")));
        if !self.nodes[self.root].bag.is_empty() {
            return bad("root bag not empty".into());
        }
        let mut parent = vec![usize::MAX; self.nodes.len()];
        let mut reached = 0;
        for t in self.post_order() {
            reached += 1;
            let n = &self.nodes[t];
            for &c in &n.children {
                parent[c] = t;
            }
            let child = |i: usize| &self.nodes[n.children[i]].bag;
            let ok = match &n.kind {
                NodeKind::Leaf => n.children.is_empty() && n.bag.is_empty(),
                NodeKind::Introduce(v) => {
                    n.children.len() == 1 && !child(0).contains(v) && {
                        let mut b = child(0).clone();
                        b.push(*v);
                        b.sort_unstable();
                        b == n.bag
                    }
                }
                NodeKind::Forget(v) => {
                    n.children.len() == 1 && child(0).contains(v) && {
                        let b: Vec<usize> = child(0).iter().copied().filter(|x| x != v).collect();
                        b == n.bag
                    }
                }
                NodeKind::Join => n.children.len() == 2 && child(0) == &n.bag && child(1) == &n.bag,
            };
            if !ok {
                return bad(format!("node {t} ({:?}) breaks the nice axioms", n.kind));
            }
        }
        if reached != self.nodes.len() {
            return bad("unreachable nodes".into());
        }
        let wanted: BTreeSet<usize> = vertices.iter().copied().collect();
        let mut seen = BTreeSet::new();
        // each vertex must have exactly one topmost bag
        let mut tops = std::collections::BTreeMap::<usize, usize>::new();
        for (t, n) in self.nodes.iter().enumerate() {
            for &v in &n.bag {
                seen.insert(v);
                let p = parent[t];
                if p == usize::MAX || !self.nodes[p].bag.contains(&v) {
                    *tops.entry(v).or_default() += 1;
                }
            }
        }
        if seen != wanted {
            return bad("bags do not cover exactly the requested vertices".into());
        }
        if let Some((v, _)) = tops.iter().find(|(_, &c)| c != 1) {
            return bad(format!("bags containing {v} are not connected"));
        }
        for (u, v) in g.edges() {
            if wanted.contains(&u)
                && wanted.contains(&v)
                && !self.nodes.iter().any(|n| n.bag.contains(&u) && n.bag.contains(&v))
            {
                return bad(format!("edge {{{u},{v}}} in no bag"));
            }
        }
        Ok(())
    }
}

/// Width of the decomposition induced by eliminating in `order`.
pub fn order_width(g: &Graph, order: &[usize]) -> usize {
    let (bags, _) = eliminate(g, order);
    bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
}

fn eliminate(g: &Graph, order: &[usize]) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let n = g.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbours(v).clone()).collect();
    let mut bags = vec![Vec::new(); n];
    let mut parent = vec![None; n];
    for &v in order {
        let higher: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect();
        for (i, &a) in higher.iter().enumerate() {
            for &b in &higher[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        parent[v] = higher.iter().copied().min_by_key(|&u| pos[u]);
        let mut bag = higher;
        bag.push(v);
        bag.sort_unstable();
        bags[v] = bag;
    }
    (bags, parent)
}

/// Greedy min-fill order; ties by degree, then by index.
pub fn min_fill_order(g: &Graph) -> Vec<usize> {
    let n = g.len();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbours(v).clone()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let ns: Vec<usize> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for (i, &a) in ns.iter().enumerate() {
                for &b in &ns[i + 1..] {
                    if !adj[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, ns.len(), v);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let v = best.unwrap().2;
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &ns {
            adj[a].remove(&v);
        }
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Minimum-width elimination order, via
/// `tw(S) = min_{v in S} max(tw(S - v), |Q(S - v, v)|)` where `Q(S, v)` is the set of
/// vertices outside `S + v` reachable from `v` through `S`.
pub fn exact_order(g: &Graph) -> Result<(usize, Vec<usize>)> {
    let n = g.len();
    if n > EXACT_SMALL_MAX {
        return Err(VcspError::SizeCap(format!(
            "exact treewidth needs at most {EXACT_SMALL_MAX} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let q_size = |s: u32, v: usize| -> u8 {
        let mut reach = 1u32 << v;
        loop {
            let mut nb = 0;
            let mut r = reach;
            while r != 0 {
                nb |= adj[r.trailing_zeros() as usize];
                r &= r - 1;
            }
            let next = reach | (nb & s);
            if next == reach {
                return (nb & !s & !(1 << v)).count_ones() as u8;
            }
            reach = next;
        }
    };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut tw = vec![0u8; 1 << n];
    let mut arg = vec![0u8; 1 << n];
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut r = s;
        while r != 0 {
            let v = r.trailing_zeros() as usize;
            r &= r - 1;
            let rest = s & !(1 << v);
            let w = tw[rest as usize].max(q_size(rest, v));
            if w < best {
                best = w;
                arg[s as usize] = v as u8;
            }
        }
        tw[s as usize] = best;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = arg[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((tw[full as usize] as usize, order))
}

pub fn treewidth_exact(g: &Graph) -> Result<usize> {
    exact_order(g).map(|(w, _)| w)
}

pub fn treewidth_upper(g: &Graph) -> usize {
    order_width(g, &min_fill_order(g))
}

pub fn build_tree_decomposition(g: &Graph, effort: Effort) -> Result<NiceTreeDecomposition> {
    let order = match effort {
        Effort::Heuristic => min_fill_order(g),
        Effort::ExactSmall => exact_order(g)?.1,
    };
    Ok(from_elimination_order(g, &order))
}

/// Decomposition of the subgraph induced on `vertices`, labelled by the original indices.
pub fn decompose_induced(g: &Graph, vertices: &[usize], effort: Effort) -> Result<NiceTreeDecomposition> {
    let sub = g.induced(vertices);
    Ok(build_tree_decomposition(&sub, effort)?.relabel(vertices))
}

pub fn from_elimination_order(g: &Graph, order: &[usize]) -> NiceTreeDecomposition {
    let (bags, parent) = eliminate(g, order);
    let n = g.len();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for &v in order {
        match parent[v] {
            Some(p) => children[p].push(v),
            None => roots.push(v),
        }
    }
    let mut b = Builder { nodes: Vec::new() };
    let mut tops = Vec::new();
    for &r in &roots {
        let mut x = b.build(r, &bags, &children);
        for &v in &bags[r] {
            x = b.forget(x, v);
        }
        tops.push(x);
    }
    let root = if tops.is_empty() {
        b.push(NodeKind::Leaf, Vec::new(), Vec::new())
    } else {
        b.join_all(tops)
    };
    NiceTreeDecomposition { nodes: b.nodes, root }
}

struct Builder {
    nodes: Vec<Node>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(Node { kind, bag, children });
        self.nodes.len() - 1
    }

    fn introduce(&mut self, x: usize, v: usize) -> usize {
        let mut bag = self.nodes[x].bag.clone();
        let at = bag.binary_search(&v).unwrap_err();
        bag.insert(at, v);
        self.push(NodeKind::Introduce(v), bag, vec![x])
    }

    fn forget(&mut self, x: usize, v: usize) -> usize {
        let bag = self.nodes[x].bag.iter().copied().filter(|&u| u != v).collect();
        self.push(NodeKind::Forget(v), bag, vec![x])
    }

    fn join_all(&mut self, mut xs: Vec<usize>) -> usize {
        let mut acc = xs.remove(0);
        for x in xs {
            let bag = self.nodes[acc].bag.clone();
            acc = self.push(NodeKind::Join, bag, vec![acc, x]);
        }
        acc
    }

    /// Nice subtree whose top bag equals `bags[t]`.
    fn build(&mut self, t: usize, bags: &[Vec<usize>], children: &[Vec<usize>]) -> usize {
        let bag = &bags[t];
        let mut subs = Vec::new();
        for &c in &children[t] {
            let mut x = self.build(c, bags, children);
            for &v in &bags[c] {
                if !bag.contains(&v) {
                    x = self.forget(x, v);
                }
            }
            for &v in bag {
                if !bags[c].contains(&v) {
                    x = self.introduce(x, v);
                }
            }
            subs.push(x);
        }
        if subs.is_empty() {
            let mut x = self.push(NodeKind::Leaf, Vec::new(), Vec::new());
            for &v in bag {
                x = self.introduce(x, v);
            }
            x
        } else {
            self.join_all(subs)
        }
    }
}
