//! Player-I strategies for the deletion/layering game and the recursive
//! minimisation scheme driven by them.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::diagonal::{hom_path, HomPath};
use crate::error::{Result, VcspError};
use crate::exact::treedec::decompose_induced;
use crate::exact::{solve_subproblem, Effort, Subproblem, DEFAULT_DP_BUDGET};
use crate::graph::Graph;
use crate::instance::{eval_tuples, weighted_tuples, Assignment, DenseRight, PartialAssignment, WeightedTuple};
use crate::minbaker::blend::{run_shift, BlendStats};
use crate::minbaker::layering::{bfs_layering, plan_blocks, Layering};
use crate::minbaker::planar::check_eps;
use crate::structure::{Mode, Side, ValuedStructure};
use crate::value::{ceil_to_i64, ExtRat, Rational};

pub enum Action {
    /// Remove a vertex; it must come first in the strategy's ordering among those left.
    Delete(usize),
    Layering(Layering),
}

/// Position in the game: the current vertex set (in the labels of `graph`), the
/// round counter and the number of layerings played on this branch.
pub struct GameState<'a> {
    pub graph: &'a Graph,
    pub vertices: &'a [usize],
    pub t: usize,
    pub layerings: usize,
}

pub trait BakerStrategy: Send + Sync {
    /// Fixed vertex ordering on a left domain of size `n`.
    fn ordering(&self, n: usize) -> Vec<usize>;
    /// Declared bound on rounds, counting the final base-case round.
    fn t_max(&self) -> usize;
    /// Next move, or `None` to hand the position to the exact base case.
    fn act(&self, st: &GameState) -> Option<Action>;
    fn check(&self, _n: usize) -> Result<()> {
        Ok(())
    }
    fn name(&self) -> String;
}

/// One BFS layering, then the base case on every interval.
pub struct PlanarBfs {
    pub root: Option<usize>,
}

pub fn planar_bfs(root: Option<usize>) -> PlanarBfs {
    PlanarBfs { root }
}

impl BakerStrategy for PlanarBfs {
    fn ordering(&self, n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    fn t_max(&self) -> usize {
        2
    }

    fn act(&self, st: &GameState) -> Option<Action> {
        (st.layerings == 0 && !st.vertices.is_empty())
            .then(|| Action::Layering(bfs_layering(st.graph, st.vertices, self.root)))
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.root {
            Some(r) if r >= n => Err(VcspError::Strategy(format!("root {r} not in the domain"))),
            _ => Ok(()),
        }
    }

    fn name(&self) -> String {
        "planar-bfs".into()
    }
}

/// Delete the apex vertices in the given order, then play `inner`.
pub struct ApexThen {
    pub inner: Box<dyn BakerStrategy>,
    pub apex: Vec<usize>,
}

pub fn apex_then(inner: Box<dyn BakerStrategy>, apex: Vec<usize>) -> ApexThen {
    ApexThen { inner, apex }
}

impl BakerStrategy for ApexThen {
    fn ordering(&self, n: usize) -> Vec<usize> {
        let mut out = self.apex.clone();
        out.extend(self.inner.ordering(n).into_iter().filter(|v| !self.apex.contains(v)));
        out
    }

    fn t_max(&self) -> usize {
        self.apex.len() + self.inner.t_max()
    }

    fn act(&self, st: &GameState) -> Option<Action> {
        match self.apex.iter().find(|a| st.vertices.contains(a)) {
            Some(&a) => Some(Action::Delete(a)),
            None => self.inner.act(st),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let mut seen = HashSet::new();
        for &a in &self.apex {
            if a >= n {
                return Err(VcspError::Strategy(format!("apex {a} not in the domain")));
            }
            if !seen.insert(a) {
                return Err(VcspError::Strategy(format!("apex {a} listed twice")));
            }
        }
        self.inner.check(n)
    }

    fn name(&self) -> String {
        format!("apex-then-{}", self.inner.name())
    }
}

/// Never moves: everything goes to the exact base case.
pub struct BoundedTwBase;

pub fn bounded_tw_base() -> BoundedTwBase {
    BoundedTwBase
}

impl BakerStrategy for BoundedTwBase {
    fn ordering(&self, n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    fn t_max(&self) -> usize {
        1
    }

    fn act(&self, _st: &GameState) -> Option<Action> {
        None
    }

    fn name(&self) -> String {
        "bounded-tw".into()
    }
}

/// `r(t) = 2M·ell·ceil(1/eps)·2^t`.
pub fn interval_bound(m: &Rational, ell: usize, eps: &Rational, t: usize) -> usize {
    let inv = ceil_to_i64(&eps.recip()) as u128;
    let m2 = ceil_to_i64(&(m * Rational::from_integer(2.into()))) as u128;
    let r = m2 * ell as u128 * inv * (1u128 << t.min(64));
    r.min(usize::MAX as u128) as usize
}

/// `k = (2M-1)·ceil(1/eps)·2^t`, rounded up.
pub fn game_k(m: &Rational, eps: &Rational, t: usize) -> usize {
    let inv = Rational::from_integer(ceil_to_i64(&eps.recip()).into());
    let two_m = m * Rational::from_integer(2.into());
    let k = (two_m - Rational::from_integer(1.into())) * inv * Rational::from_integer((1i64 << t.min(40)).into());
    ceil_to_i64(&k).max(1) as usize
}

fn first_in_order(order_pos: &[usize], vertices: &[usize]) -> Option<usize> {
    vertices.iter().copied().min_by_key(|&v| order_pos[v])
}

fn order_positions(strategy: &dyn BakerStrategy, n: usize) -> Result<Vec<usize>> {
    let order = strategy.ordering(n);
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v < n && pos[v] == usize::MAX {
            pos[v] = i;
        }
    }
    if pos.contains(&usize::MAX) {
        return Err(VcspError::Strategy("ordering does not cover the domain".into()));
    }
    Ok(pos)
}

/// Rounds the strategy needs on `g` when Player II always picks the worst interval of
/// length `r(t)`. The base-case hand-off counts as one round; the empty graph takes none.
pub fn play_game<R: Fn(usize) -> usize>(g: &Graph, strategy: &dyn BakerStrategy, r: R) -> Result<usize> {
    strategy.check(g.len())?;
    let pos = order_positions(strategy, g.len())?;
    let all: Vec<usize> = (0..g.len()).collect();
    play(g, strategy, &r, &pos, &all, 0, 0)
}

fn play<R: Fn(usize) -> usize>(
    g: &Graph,
    strategy: &dyn BakerStrategy,
    r: &R,
    pos: &[usize],
    verts: &[usize],
    t: usize,
    layerings: usize,
) -> Result<usize> {
    if verts.is_empty() {
        return Ok(t);
    }
    let st = GameState {
        graph: g,
        vertices: verts,
        t,
        layerings,
    };
    match strategy.act(&st) {
        None => Ok(t + 1),
        Some(Action::Delete(v)) => {
            check_delete(pos, verts, v)?;
            let rest: Vec<usize> = verts.iter().copied().filter(|&x| x != v).collect();
            play(g, strategy, r, pos, &rest, t + 1, layerings)
        }
        Some(Action::Layering(l)) => {
            l.check(g, verts)?;
            let levels: Vec<i64> = verts.iter().map(|&v| l.get(v).expect("checked")).collect();
            let (lo, hi) = (*levels.iter().min().unwrap(), *levels.iter().max().unwrap());
            let w = r(t).max(1) as i64;
            let mut seen = HashSet::new();
            let mut worst = t + 1;
            for start in (lo - w + 1)..=hi {
                let sub: Vec<usize> = verts
                    .iter()
                    .copied()
                    .filter(|&v| (start..start + w).contains(&l.get(v).unwrap()))
                    .collect();
                if seen.insert(sub.clone()) {
                    worst = worst.max(play(g, strategy, r, pos, &sub, t + 1, layerings + 1)?);
                }
            }
            Ok(worst)
        }
    }
}

fn check_delete(pos: &[usize], verts: &[usize], v: usize) -> Result<()> {
    if first_in_order(pos, verts) != Some(v) {
        return Err(VcspError::Strategy(format!(
            "vertex {v} is not the first remaining vertex in the ordering"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct BakerOptions {
    /// Positions whose residual graph has a decomposition this narrow are solved exactly.
    pub base_width: usize,
    /// DP work cap per base case.
    pub budget: u64,
    /// Cap on recursion nodes.
    pub node_budget: u64,
    pub effort: Effort,
}

impl Default for BakerOptions {
    fn default() -> Self {
        BakerOptions {
            base_width: 8,
            budget: DEFAULT_DP_BUDGET,
            node_budget: 1_000_000,
            effort: Effort::Heuristic,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BakerOutcome {
    pub assignment: Assignment,
    pub value: ExtRat,
    pub feasible: bool,
    pub ell: usize,
    pub m: Rational,
    /// Most rounds used on any explored branch, base case included.
    pub rounds: usize,
    /// Exact base-case solves.
    pub leaves: u64,
    pub stats: BlendStats,
}

struct Engine<'a> {
    strategy: &'a dyn BakerStrategy,
    pos: Vec<usize>,
    right: DenseRight,
    path: HomPath,
    eps: Rational,
    opts: &'a BakerOptions,
    nodes: AtomicU64,
    leaves: AtomicU64,
    rounds: AtomicUsize,
    stats: Mutex<BlendStats>,
}

impl Engine<'_> {
    fn round(&self, used: usize) -> Result<()> {
        if used > self.strategy.t_max() {
            return Err(VcspError::Strategy(format!(
                "strategy {} exceeds its declared {} rounds",
                self.strategy.name(),
                self.strategy.t_max()
            )));
        }
        self.rounds.fetch_max(used, Ordering::Relaxed);
        Ok(())
    }

    fn value(&self, tuples: &[WeightedTuple], h: &PartialAssignment) -> Result<ExtRat> {
        eval_tuples(tuples, &self.right, |a| h.get(a).expect("assigned"))
    }

    /// Assignment on `verts ∪ dom(rho)` extending `rho`.
    fn solve(
        &self,
        tuples: &[WeightedTuple],
        rho: &PartialAssignment,
        verts: &[usize],
        t: usize,
        layerings: usize,
    ) -> Result<PartialAssignment> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.opts.node_budget {
            return Err(VcspError::budget("game recursion", n as f64, self.opts.node_budget as f64));
        }
        if verts.is_empty() {
            self.round(t)?;
            return Ok(rho.clone());
        }
        let sp = Subproblem {
            tuples,
            right: &self.right,
            rho,
            free: verts,
        };
        let g = sp.graph();
        let td = decompose_induced(&g, verts, self.opts.effort)?;
        let base = |td| -> Result<PartialAssignment> {
            self.round(t + 1)?;
            self.leaves.fetch_add(1, Ordering::Relaxed);
            Ok(solve_subproblem(&sp, &td, Mode::Min, self.opts.budget)?.1)
        };
        if td.width() <= self.opts.base_width {
            return base(td);
        }
        let st = GameState {
            graph: &g,
            vertices: verts,
            t,
            layerings,
        };
        match self.strategy.act(&st) {
            None => base(td),
            Some(Action::Delete(v)) => {
                check_delete(&self.pos, verts, v)?;
                self.round(t + 1)?;
                let rest: Vec<usize> = verts.iter().copied().filter(|&x| x != v).collect();
                let branches: Vec<(ExtRat, PartialAssignment)> = (0..self.right.domain_size())
                    .into_par_iter()
                    .map(|c| {
                        let mut r = rho.clone();
                        r.set(v, c);
                        let h = self.solve(tuples, &r, &rest, t + 1, layerings)?;
                        Ok((self.value(tuples, &h)?, h))
                    })
                    .collect::<Result<_>>()?;
                Ok(best_of(branches))
            }
            Some(Action::Layering(l)) => {
                l.check(&g, verts)?;
                self.round(t + 1)?;
                let k = game_k(&self.path.m, &self.eps, t);
                let ell = self.path.len();
                let runs: Vec<(ExtRat, PartialAssignment)> = (1..=k)
                    .into_par_iter()
                    .map(|i| {
                        let restricted = restrict_layering(&l, verts);
                        let plan = plan_blocks(&restricted, ell, k, i)?;
                        let run = run_shift(tuples, &self.right, &self.path, &plan, rho, |tj, vj| {
                            let h = self.solve(tj, rho, vj, t + 1, layerings + 1)?;
                            Ok((self.value(tj, &h)?, h))
                        })?;
                        self.stats.lock().expect("stats").add(&run.stats);
                        Ok((run.value, run.assignment))
                    })
                    .collect::<Result<_>>()?;
                Ok(best_of(runs))
            }
        }
    }
}

fn restrict_layering(l: &Layering, verts: &[usize]) -> Layering {
    let mut levels = vec![None; l.levels().len()];
    for &v in verts {
        levels[v] = l.get(v);
    }
    Layering::new(levels)
}

/// Least value, ties to the earliest branch.
fn best_of(branches: Vec<(ExtRat, PartialAssignment)>) -> PartialAssignment {
    let mut best: Option<(ExtRat, PartialAssignment)> = None;
    for (v, h) in branches {
        if best.as_ref().map_or(true, |(b, _)| Mode::Min.better(&v, b)) {
            best = Some((v, h));
        }
    }
    best.expect("at least one branch").1
}

/// Recursive scheme driven by `strategy`, with exact solving on narrow positions.
pub fn baker_minimise(
    a: &ValuedStructure,
    c: &ValuedStructure,
    eps: &Rational,
    strategy: &dyn BakerStrategy,
    opts: &BakerOptions,
) -> Result<BakerOutcome> {
    let path = hom_path(c)?;
    baker_minimise_with(a, c, eps, strategy, opts, &PartialAssignment::empty(a.size()), path)
}

/// As [`baker_minimise`], starting from a fixed partial assignment and a given path.
pub fn baker_minimise_with(
    a: &ValuedStructure,
    c: &ValuedStructure,
    eps: &Rational,
    strategy: &dyn BakerStrategy,
    opts: &BakerOptions,
    rho: &PartialAssignment,
    path: HomPath,
) -> Result<BakerOutcome> {
    a.same_signature(c)?;
    a.validate(Side::Left)?;
    c.validate(Side::RightMin)?;
    check_eps(eps)?;
    if !path.idempotent {
        return Err(VcspError::Strategy(
            "the game recursion needs a path of idempotent maps".into(),
        ));
    }
    let n = a.size();
    if rho.len() != n || rho.as_slice().iter().flatten().any(|&x| x >= c.size()) {
        return Err(VcspError::Input("fixed partial assignment does not fit the instance".into()));
    }
    strategy.check(n)?;
    let engine = Engine {
        strategy,
        pos: order_positions(strategy, n)?,
        right: DenseRight::new(c),
        path,
        eps: eps.clone(),
        opts,
        nodes: AtomicU64::new(0),
        leaves: AtomicU64::new(0),
        rounds: AtomicUsize::new(0),
        stats: Mutex::new(BlendStats::default()),
    };
    let tuples = weighted_tuples(a);
    let verts: Vec<usize> = (0..n).filter(|&v| !rho.contains(v)).collect();
    let h = engine.solve(&tuples, rho, &verts, 0, 0)?;
    let mut stats = engine.stats.into_inner().expect("stats");
    for v in rho.dom() {
        stats.checked += 1;
        if h.get(v) != rho.get(v) {
            stats.rho += 1;
        }
    }
    let assignment = h
        .to_total()
        .ok_or_else(|| VcspError::Bug("game returned a partial assignment".into()))?;
    let value = eval_tuples(&tuples, &engine.right, |v| assignment[v])?;
    Ok(BakerOutcome {
        feasible: value.is_finite(),
        value,
        assignment,
        ell: engine.path.len(),
        m: engine.path.m.clone(),
        rounds: engine.rounds.load(Ordering::Relaxed),
        leaves: engine.leaves.load(Ordering::Relaxed),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_exact;
    use crate::fixtures;
    use crate::instance::value;
    use crate::value::{int, rat};
    use proptest::prelude::*;

    fn opt(a: &ValuedStructure, c: &ValuedStructure) -> ExtRat {
        solve_exact(a, c, Mode::Min, &PartialAssignment::empty(a.size())).unwrap().value
    }

    fn apex_strategy(apex: usize) -> ApexThen {
        apex_then(Box::new(planar_bfs(None)), vec![apex])
    }

    #[test]
    fn apex_grid_within_factor_two() {
        let a = fixtures::apex_grid_left(4, 8, Some(&int(1)));
        let c = fixtures::vc_structure();
        let o = opt(&a, &c);
        for base_width in [8, 3] {
            let opts = BakerOptions {
                base_width,
                ..Default::default()
            };
            let out = baker_minimise(&a, &c, &int(1), &apex_strategy(32), &opts).unwrap();
            assert!(out.value <= o.scale(&int(2)), "{} vs {}", out.value, o);
            assert_eq!(value(&a, &c, &out.assignment).unwrap(), out.value);
            assert_eq!(out.stats.violations(), 0);
        }
    }

    #[test]
    fn narrow_graph_is_solved_exactly() {
        let a = fixtures::path_left(12, &int(1), Some(&int(1)));
        let c = fixtures::vc_structure();
        let out = baker_minimise(&a, &c, &int(1), &planar_bfs(None), &BakerOptions::default()).unwrap();
        assert_eq!(out.value, opt(&a, &c));
        assert_eq!(out.rounds, 1);
        assert_eq!(out.leaves, 1);
    }

    #[test]
    fn fully_fixed_is_returned_unchanged() {
        let a = fixtures::path_left(4, &int(1), Some(&int(1)));
        let c = fixtures::vc_structure();
        let rho = PartialAssignment::from_total(&[1, 0, 1, 1]);
        let path = hom_path(&c).unwrap();
        let out = baker_minimise_with(&a, &c, &int(1), &bounded_tw_base(), &BakerOptions::default(), &rho, path)
            .unwrap();
        assert_eq!(out.assignment, vec![1, 0, 1, 1]);
        assert_eq!(out.value, value(&a, &c, &[1, 0, 1, 1]).unwrap());
        assert_eq!(out.rounds, 0);
    }

    #[test]
    fn rho_is_preserved() {
        let a = fixtures::grid_left(4, 6, Some(&int(1)));
        let c = fixtures::three_element_minsol();
        let mut rho = PartialAssignment::empty(24);
        rho.set(0, 2);
        rho.set(13, 1);
        let opts = BakerOptions {
            base_width: 2,
            ..Default::default()
        };
        let path = hom_path(&c).unwrap();
        let out = baker_minimise_with(&a, &c, &rat(1, 2), &planar_bfs(None), &opts, &rho, path).unwrap();
        assert_eq!(out.assignment[0], 2);
        assert_eq!(out.assignment[13], 1);
        assert_eq!(out.stats.violations(), 0);
        assert_eq!(out.stats.rho, 0);
    }

    #[test]
    fn apex_outside_domain() {
        let a = fixtures::path_left(3, &int(1), None);
        let err = baker_minimise(&a, &fixtures::vc_structure(), &int(1), &apex_strategy(7), &BakerOptions::default());
        assert!(matches!(err, Err(VcspError::Strategy(_))));
    }

    #[test]
    fn non_idempotent_path_is_refused() {
        let a = fixtures::path_left(3, &int(1), None);
        let c = fixtures::vc_structure();
        let mut path = hom_path(&c).unwrap();
        path.idempotent = false;
        let err = baker_minimise_with(
            &a,
            &c,
            &int(1),
            &bounded_tw_base(),
            &BakerOptions::default(),
            &PartialAssignment::empty(3),
            path,
        );
        assert!(matches!(err, Err(VcspError::Strategy(_))));
    }

    struct Stubborn;
    impl BakerStrategy for Stubborn {
        fn ordering(&self, n: usize) -> Vec<usize> {
            (0..n).collect()
        }
        fn t_max(&self) -> usize {
            1
        }
        fn act(&self, st: &GameState) -> Option<Action> {
            st.vertices.first().map(|&v| Action::Delete(v))
        }
        fn name(&self) -> String {
            "stubborn".into()
        }
    }

    #[test]
    fn exceeding_the_round_bound_is_an_error() {
        let a = fixtures::grid_left(4, 4, None);
        let opts = BakerOptions {
            base_width: 0,
            ..Default::default()
        };
        let err = baker_minimise(&a, &fixtures::vc_structure(), &int(1), &Stubborn, &opts);
        assert!(matches!(err, Err(VcspError::Strategy(_))));
    }

    #[test]
    fn wrong_deletion_order_is_an_error() {
        let g = fixtures::path_graph(3);
        let s = apex_then(Box::new(bounded_tw_base()), vec![2]);
        // ordering puts 2 first, so deleting it is legal
        assert_eq!(play_game(&g, &s, |_| 4).unwrap(), 2);
        struct Bad;
        impl BakerStrategy for Bad {
            fn ordering(&self, n: usize) -> Vec<usize> {
                (0..n).collect()
            }
            fn t_max(&self) -> usize {
                3
            }
            fn act(&self, st: &GameState) -> Option<Action> {
                st.vertices.last().map(|&v| Action::Delete(v))
            }
            fn name(&self) -> String {
                "bad".into()
            }
        }
        assert!(play_game(&g, &Bad, |_| 4).is_err());
    }

    #[test]
    fn game_rounds() {
        let c = fixtures::vc_structure();
        let path = hom_path(&c).unwrap();
        let eps = int(1);
        let r = |t| interval_bound(&path.m, path.len(), &eps, t);
        let g = fixtures::apex_grid_graph(4, 8);
        let s = apex_strategy(32);
        assert!(play_game(&g, &s, r).unwrap() <= 1 + 2);
        assert_eq!(play_game(&fixtures::path_graph(6), &planar_bfs(None), r).unwrap(), 2);
        assert_eq!(play_game(&Graph::new(0), &planar_bfs(None), r).unwrap(), 0);
    }

    #[test]
    fn block_length_fits_interval() {
        for (m, e) in [(int(1), int(1)), (int(2), rat(1, 3)), (rat(3, 2), rat(1, 2))] {
            for t in 0..4 {
                let ell = 3;
                let k = game_k(&m, &e, t);
                assert!((k + 1) * ell <= interval_bound(&m, ell, &e, t) || (k == 1 && t == 0));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn guarantee_on_random_apex_grids(seed in 0u64..1000, cols in 3usize..6) {
            let g = fixtures::apex_grid_graph(3, cols);
            let a = fixtures::random_weights_on(&g, seed, true);
            let c = fixtures::random_min_sol(3, &[("f", 2), ("u", 1)], seed);
            let apex = g.len() - 1;
            let opts = BakerOptions { base_width: 2, ..Default::default() };
            let eps = rat(1, 2);
            let out = baker_minimise(&a, &c, &eps, &apex_strategy(apex), &opts).unwrap();
            let o = opt(&a, &c);
            // e^{eps} < 1 + 2 eps for eps <= 1/2
            if let (ExtRat::Finite(v), ExtRat::Finite(o)) = (&out.value, &o) {
                prop_assert!(*v <= o * int(2));
            } else {
                prop_assert_eq!(out.value.is_finite(), o.is_finite());
            }
            prop_assert_eq!(out.stats.violations(), 0);
        }
    }
}
