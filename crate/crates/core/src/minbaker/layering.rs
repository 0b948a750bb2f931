//! BFS layerings and the block/overlap plan built on top of them.

use std::collections::BTreeMap;

use crate::error::{Result, VcspError};
use crate::graph::Graph;

/// Layer index per vertex; `None` for vertices outside the layered subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    levels: Vec<Option<i64>>,
}

impl Layering {
    pub fn new(levels: Vec<Option<i64>>) -> Self {
        Layering { levels }
    }

    pub fn get(&self, v: usize) -> Option<i64> {
        self.levels[v]
    }

    pub fn levels(&self) -> &[Option<i64>] {
        &self.levels
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.levels.len()).filter(|&v| self.levels[v].is_some()).collect()
    }

    /// Adjacent layered vertices differ by at most one level; every vertex in
    /// `vertices` is layered.
    pub fn check(&self, g: &Graph, vertices: &[usize]) -> Result<()> {
        if let Some(&v) = vertices.iter().find(|&&v| self.levels.get(v).copied().flatten().is_none()) {
            return Err(VcspError::Strategy(format!("vertex {v} has no layer")));
        }
        for (u, v) in g.edges() {
            if let (Some(a), Some(b)) = (self.levels[u], self.levels[v]) {
                if (a - b).abs() > 1 {
                    return Err(VcspError::Strategy(format!(
                        "edge {{{u},{v}}} spans layers {a} and {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// BFS distance layering of the subgraph induced on `vertices`, one BFS per component,
/// rooted at `root` for its component and at the least vertex for the others.
pub fn bfs_layering(g: &Graph, vertices: &[usize], root: Option<usize>) -> Layering {
    let sub = g.induced(vertices);
    let mut levels = vec![None; g.len()];
    for comp in sub.components() {
        let r = root
            .and_then(|r| comp.iter().copied().find(|&c| vertices[c] == r))
            .unwrap_or(comp[0]);
        for (v, d) in sub.bfs(r).into_iter().enumerate() {
            if let Some(d) = d {
                levels[vertices[v]] = Some(d as i64);
            }
        }
    }
    Layering { levels }
}

/// Where a vertex sits for a given shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Only in block `j`.
    Single(i64),
    /// In `B_j ∩ B_{j+1}`, at offset `s ∈ 1..=ell` inside the overlap group.
    Overlap { j: i64, s: usize },
}

/// Layer groups `L_n = {n*ell+1, ..., n*ell+ell}` and blocks
/// `B_j = L_{jk-i} ∪ ... ∪ L_{jk-i+k}` for shift `i`.
#[derive(Clone, Debug)]
pub struct BlockPlan {
    pub ell: usize,
    pub k: usize,
    pub shift: usize,
    membership: Vec<Option<Membership>>,
    blocks: BTreeMap<i64, Vec<usize>>,
}

impl BlockPlan {
    pub fn membership(&self, v: usize) -> Option<Membership> {
        self.membership[v]
    }

    /// Vertices of each block, sorted, keyed by block index.
    pub fn blocks(&self) -> &BTreeMap<i64, Vec<usize>> {
        &self.blocks
    }

    pub fn in_overlap(&self, v: usize) -> bool {
        matches!(self.membership[v], Some(Membership::Overlap { .. }))
    }

    pub fn overlap(&self) -> Vec<usize> {
        (0..self.membership.len()).filter(|&v| self.in_overlap(v)).collect()
    }

    /// Blocks containing `v` (one or two consecutive indices).
    pub fn blocks_of(&self, v: usize) -> Vec<i64> {
        match self.membership[v] {
            Some(Membership::Single(j)) => vec![j],
            Some(Membership::Overlap { j, .. }) => vec![j, j + 1],
            None => Vec::new(),
        }
    }
}

/// Layer group of a layer index: `div_euclid(level - 1, ell)`, so level 0 is in `L_{-1}`.
pub fn group_of(level: i64, ell: usize) -> i64 {
    (level - 1).div_euclid(ell as i64)
}

pub fn plan_blocks(layering: &Layering, ell: usize, k: usize, shift: usize) -> Result<BlockPlan> {
    if ell == 0 || k == 0 || shift == 0 || shift > k {
        return Err(VcspError::Input(format!(
            "block plan needs ell >= 1, k >= 1 and 1 <= i <= k (got ell={ell}, k={k}, i={shift})"
        )));
    }
    let (l, kk, i) = (ell as i64, k as i64, shift as i64);
    let mut membership = vec![None; layering.levels.len()];
    let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (v, lvl) in layering.levels.iter().enumerate() {
        let Some(lvl) = *lvl else { continue };
        let g = group_of(lvl, ell);
        let m = g + i;
        let mem = if m.rem_euclid(kk) == 0 {
            Membership::Overlap {
                j: m.div_euclid(kk) - 1,
                s: (lvl - g * l) as usize,
            }
        } else {
            Membership::Single(m.div_euclid(kk))
        };
        membership[v] = Some(mem);
        match mem {
            Membership::Single(j) => blocks.entry(j).or_default().push(v),
            Membership::Overlap { j, .. } => {
                blocks.entry(j).or_default().push(v);
                blocks.entry(j + 1).or_default().push(v);
            }
        }
    }
    Ok(BlockPlan {
        ell,
        k,
        shift,
        membership,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn path_layers() {
        let g = fixtures::path_graph(5);
        let all: Vec<usize> = (0..5).collect();
        let l = bfs_layering(&g, &all, None);
        assert_eq!(l.levels(), &[Some(0), Some(1), Some(2), Some(3), Some(4)]);
    }

    #[test]
    fn grid_layers_are_antidiagonals() {
        let g = fixtures::grid_graph(3, 4);
        let all: Vec<usize> = (0..12).collect();
        let l = bfs_layering(&g, &all, None);
        for r in 0..3 {
            for c in 0..4 {
                assert_eq!(l.get(r * 4 + c), Some((r + c) as i64));
            }
        }
        l.check(&g, &all).unwrap();
    }

    #[test]
    fn clique_layers() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let l = bfs_layering(&g, &[0, 1, 2, 3], Some(2));
        assert_eq!(l.levels(), &[Some(1), Some(1), Some(0), Some(1)]);
    }

    #[test]
    fn components_are_layered_separately() {
        let g = Graph::from_edges(5, &[(0, 1), (3, 4)]);
        let l = bfs_layering(&g, &[0, 1, 2, 3, 4], None);
        assert_eq!(l.levels(), &[Some(0), Some(1), Some(0), Some(0), Some(1)]);
    }

    #[test]
    fn overlap_pattern_unit_groups() {
        let g = fixtures::path_graph(10);
        let all: Vec<usize> = (0..10).collect();
        let l = bfs_layering(&g, &all, None);
        let plans: Vec<BlockPlan> = (1..=3).map(|i| plan_blocks(&l, 1, 3, i).unwrap()).collect();
        assert_eq!(plans[0].overlap(), vec![0, 3, 6, 9]);
        for v in 0..10 {
            assert_eq!(plans.iter().filter(|p| p.in_overlap(v)).count(), 1);
        }
    }

    #[test]
    fn single_layer_is_one_block_away_from_the_boundary() {
        let g = Graph::new(3);
        let l = bfs_layering(&g, &[0, 1, 2], None);
        let p = plan_blocks(&l, 1, 3, 2).unwrap();
        assert_eq!(p.blocks().len(), 1);
        assert!(p.overlap().is_empty());
    }

    #[test]
    fn few_layers_with_long_groups() {
        let g = fixtures::path_graph(3);
        let l = bfs_layering(&g, &[0, 1, 2], None);
        // levels 1, 2 form L_0; level 0 is L_{-1}
        let p = plan_blocks(&l, 3, 4, 2).unwrap();
        assert_eq!(p.blocks().len(), 1);
        assert!(p.overlap().is_empty());
    }

    #[test]
    fn parameters_are_checked() {
        let l = Layering::new(vec![Some(0)]);
        assert!(plan_blocks(&l, 0, 2, 1).is_err());
        assert!(plan_blocks(&l, 1, 2, 3).is_err());
        assert!(plan_blocks(&l, 1, 2, 0).is_err());
    }

    proptest! {
        #[test]
        fn plan_invariants(levels in proptest::collection::vec(0i64..40, 1..60), ell in 1usize..4, k in 1usize..5) {
            let l = Layering::new(levels.iter().map(|&x| Some(x)).collect());
            let plans: Vec<BlockPlan> = (1..=k).map(|i| plan_blocks(&l, ell, k, i).unwrap()).collect();
            for v in 0..levels.len() {
                // overlaps are disjoint across shifts
                prop_assert!(plans.iter().filter(|p| p.in_overlap(v)).count() <= 1);
                for p in &plans {
                    let bs = p.blocks_of(v);
                    prop_assert!(bs.len() == 1 || (bs.len() == 2 && bs[1] == bs[0] + 1));
                    let lvl = levels[v];
                    let g = group_of(lvl, ell);
                    for &j in &bs {
                        let lo = j * k as i64 - p.shift as i64;
                        prop_assert!(lo <= g && g <= lo + k as i64);
                    }
                    if let Some(Membership::Overlap { j, s }) = p.membership(v) {
                        let base = ((j + 1) * k as i64 - p.shift as i64) * ell as i64;
                        prop_assert_eq!(lvl, base + s as i64);
                        prop_assert!(s >= 1 && s <= ell);
                    }
                }
            }
        }

        #[test]
        fn bfs_is_a_layering(seed in 0u64..200, n in 1usize..20) {
            let g = fixtures::random_graph(n, 0.2, seed);
            let all: Vec<usize> = (0..n).collect();
            prop_assert!(bfs_layering(&g, &all, None).check(&g, &all).is_ok());
        }
    }
}
