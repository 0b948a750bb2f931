//! Dynamic programming over nice tree decompositions.
//!
//! Each tuple is charged at the forget node of its free scope vertex that lies
//! deepest in the tree; at that node every other free scope vertex is still in the
//! bag, and no tuple is counted twice, so join nodes simply add.

use crate::error::{Result, VcspError};
use crate::exact::treedec::{decompose_induced, Effort, NiceTreeDecomposition, NodeKind};
use crate::exact::{Solution, DEFAULT_DP_BUDGET};
use crate::graph::{add_clique, Graph};
use crate::instance::{weighted_tuples, DenseRight, PartialAssignment, WeightedTuple};
use crate::structure::{Mode, ValuedStructure};
use crate::value::ExtRat;

/// Weighted tuples over vertices `0..rho.len()`, to be optimised over `free`
/// with the vertices of `dom(rho)` fixed. Every scope must lie in `free ∪ dom(rho)`.
#[derive(Clone, Copy)]
pub struct Subproblem<'a> {
    pub tuples: &'a [WeightedTuple],
    pub right: &'a DenseRight,
    pub rho: &'a PartialAssignment,
    pub free: &'a [usize],
}

impl Subproblem<'_> {
    /// Gaifman graph of the tuples restricted to free vertices, on all `rho.len()` labels.
    pub fn graph(&self) -> Graph {
        let mut is_free = vec![false; self.rho.len()];
        for &v in self.free {
            is_free[v] = true;
        }
        let mut g = Graph::new(self.rho.len());
        for t in self.tuples {
            let scope: Vec<usize> = t.scope().into_iter().filter(|&v| is_free[v]).collect();
            add_clique(&mut g, &scope);
        }
        g
    }

    pub fn decompose(&self, effort: Effort) -> Result<NiceTreeDecomposition> {
        decompose_induced(&self.graph(), self.free, effort)
    }
}

enum Source {
    Fixed(usize),
    Bag(usize),
}

struct Charged<'a> {
    tuple: &'a WeightedTuple,
    sources: Vec<Source>,
}

fn radix_index(digits: &[usize], q: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * q + d)
}

fn decode(mut idx: usize, len: usize, q: usize, out: &mut [usize]) {
    for i in (0..len).rev() {
        out[i] = idx % q;
        idx /= q;
    }
}

/// Total work estimate: table cells plus forget-node candidate evaluations.
pub fn dp_cost(td: &NiceTreeDecomposition, q: usize) -> f64 {
    td.nodes()
        .iter()
        .map(|n| {
            let cells = (q as f64).powi(n.bag.len() as i32);
            match n.kind {
                NodeKind::Forget(_) => cells * q as f64,
                _ => cells,
            }
        })
        .sum()
}

/// Exact optimum of a subproblem; the returned partial assignment is defined on
/// `free ∪ dom(rho)` and agrees with `rho`.
pub fn solve_subproblem(
    sp: &Subproblem,
    td: &NiceTreeDecomposition,
    mode: Mode,
    budget: u64,
) -> Result<(ExtRat, PartialAssignment)> {
    let n = sp.rho.len();
    let q = sp.right.domain_size();
    let cost = dp_cost(td, q);
    if cost > budget as f64 {
        return Err(VcspError::budget(
            format!("tree-decomposition DP of width {}", td.width()),
            cost,
            budget as f64,
        ));
    }
    let nodes = td.nodes();
    let mut is_free = vec![false; n];
    for &v in sp.free {
        if sp.rho.contains(v) {
            return Err(VcspError::Input(format!("vertex {v} is both free and fixed")));
        }
        is_free[v] = true;
    }
    if q == 0 && !sp.free.is_empty() {
        return Err(VcspError::Input("right domain is empty".into()));
    }

    // depth and forget node of every vertex
    let mut depth = vec![0usize; nodes.len()];
    let mut forget_at = vec![usize::MAX; n];
    let mut stack = vec![td.root()];
    while let Some(t) = stack.pop() {
        if let NodeKind::Forget(v) = nodes[t].kind {
            if v >= n || !is_free[v] || forget_at[v] != usize::MAX {
                return Err(VcspError::Input(format!("decomposition forgets {v} unexpectedly")));
            }
            forget_at[v] = t;
        }
        for &c in &nodes[t].children {
            depth[c] = depth[t] + 1;
            stack.push(c);
        }
    }
    if let Some(&v) = sp.free.iter().find(|&&v| forget_at[v] == usize::MAX) {
        return Err(VcspError::Input(format!("decomposition never forgets vertex {v}")));
    }

    let mut constant = ExtRat::zero();
    let mut charged: Vec<Vec<Charged>> = (0..nodes.len()).map(|_| Vec::new()).collect();
    for t in sp.tuples {
        if let Some(&x) = t.args.iter().find(|&&x| !is_free[x] && !sp.rho.contains(x)) {
            return Err(VcspError::Input(format!("tuple touches vertex {x} outside the subproblem")));
        }
        let node = t
            .args
            .iter()
            .filter(|&&x| is_free[x])
            .map(|&x| forget_at[x])
            .max_by_key(|&f| depth[f]);
        match node {
            None => {
                let idx = sp.right.index(t.args.iter().map(|&x| sp.rho.get(x).unwrap()));
                constant = constant.checked_add(&sp.right.get_at(t.sym, idx).scale(&t.weight))?;
            }
            Some(f) => {
                let bag = &nodes[nodes[f].children[0]].bag;
                let sources = t
                    .args
                    .iter()
                    .map(|&x| match sp.rho.get(x) {
                        Some(c) => Ok(Source::Fixed(c)),
                        None => bag
                            .binary_search(&x)
                            .map(Source::Bag)
                            .map_err(|_| VcspError::Input(format!("scope of a tuple not inside a bag (vertex {x})"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                charged[f].push(Charged { tuple: t, sources });
            }
        }
    }

    let mut tables: Vec<Option<Vec<ExtRat>>> = vec![None; nodes.len()];
    let mut choice: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut digits = vec![0usize; td.width() + 2];
    let mut child_digits = vec![0usize; td.width() + 2];
    for t in td.post_order() {
        let node = &nodes[t];
        let size = q.pow(node.bag.len() as u32);
        let table = match node.kind {
            NodeKind::Leaf => vec![ExtRat::zero(); size],
            NodeKind::Introduce(v) => {
                let child = tables[node.children[0]].take().unwrap();
                let at = node.bag.binary_search(&v).unwrap();
                let len = node.bag.len();
                (0..size)
                    .map(|idx| {
                        decode(idx, len, q, &mut digits);
                        let mut k = 0;
                        for (i, &d) in digits[..len].iter().enumerate() {
                            if i != at {
                                k = k * q + d;
                            }
                        }
                        child[k].clone()
                    })
                    .collect()
            }
            NodeKind::Forget(v) => {
                let c = node.children[0];
                let child = tables[c].take().unwrap();
                let cbag = &nodes[c].bag;
                let at = cbag.binary_search(&v).unwrap();
                let len = node.bag.len();
                let mut table = Vec::with_capacity(size);
                let mut pick = Vec::with_capacity(size);
                for idx in 0..size {
                    decode(idx, len, q, &mut digits);
                    let mut best: Option<(ExtRat, usize)> = None;
                    for val in 0..q {
                        child_digits[..at].copy_from_slice(&digits[..at]);
                        child_digits[at] = val;
                        child_digits[at + 1..=len].copy_from_slice(&digits[at..len]);
                        let mut total = child[radix_index(&child_digits[..=len], q)].clone();
                        for ch in &charged[t] {
                            let args = ch.sources.iter().map(|s| match *s {
                                Source::Fixed(c) => c,
                                Source::Bag(p) => child_digits[p],
                            });
                            let f = sp.right.get_at(ch.tuple.sym, sp.right.index(args));
                            total = total.checked_add(&f.scale(&ch.tuple.weight))?;
                        }
                        if best.as_ref().map_or(true, |(b, _)| mode.better(&total, b)) {
                            best = Some((total, val));
                        }
                    }
                    let (b, val) = best.unwrap_or((mode.worst(), 0));
                    table.push(b);
                    pick.push(val);
                }
                choice[t] = pick;
                table
            }
            NodeKind::Join => {
                let l = tables[node.children[0]].take().unwrap();
                let r = tables[node.children[1]].take().unwrap();
                l.iter()
                    .zip(&r)
                    .map(|(x, y)| x.checked_add(y))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        tables[t] = Some(table);
    }
    let value = tables[td.root()].take().unwrap()[0].checked_add(&constant)?;

    let mut h = sp.rho.clone();
    let mut stack = vec![(td.root(), Vec::<usize>::new())];
    while let Some((t, assign)) = stack.pop() {
        let node = &nodes[t];
        match node.kind {
            NodeKind::Leaf => {}
            NodeKind::Introduce(v) => {
                let at = node.bag.binary_search(&v).unwrap();
                let mut a = assign;
                a.remove(at);
                stack.push((node.children[0], a));
            }
            NodeKind::Forget(v) => {
                let c = node.children[0];
                let val = choice[t][radix_index(&assign, q)];
                h.set(v, val);
                let at = nodes[c].bag.binary_search(&v).unwrap();
                let mut a = assign;
                a.insert(at, val);
                stack.push((c, a));
            }
            NodeKind::Join => {
                stack.push((node.children[0], assign.clone()));
                stack.push((node.children[1], assign));
            }
        }
    }
    Ok((value, h))
}

fn check_rho(a: &ValuedStructure, c: &ValuedStructure, rho: &PartialAssignment) -> Result<()> {
    if rho.len() != a.size() {
        return Err(VcspError::Input(format!(
            "partial assignment has {} slots, left domain has {}",
            rho.len(),
            a.size()
        )));
    }
    if rho.as_slice().iter().flatten().any(|&x| x >= c.size()) {
        return Err(VcspError::Input("partial assignment maps outside the right domain".into()));
    }
    Ok(())
}

/// Exact optimum over extensions of `rho` using the given decomposition of the
/// Gaifman graph restricted to the unfixed vertices.
pub fn td_solve(
    a: &ValuedStructure,
    c: &ValuedStructure,
    td: &NiceTreeDecomposition,
    mode: Mode,
    rho: &PartialAssignment,
    budget: u64,
) -> Result<Solution> {
    a.same_signature(c)?;
    c.validate(mode.right_side())?;
    check_rho(a, c, rho)?;
    let tuples = weighted_tuples(a);
    let right = DenseRight::new(c);
    let free: Vec<usize> = (0..a.size()).filter(|&v| !rho.contains(v)).collect();
    let sp = Subproblem {
        tuples: &tuples,
        right: &right,
        rho,
        free: &free,
    };
    td.validate(&sp.graph(), &free)?;
    let (value, h) = solve_subproblem(&sp, td, mode, budget)?;
    Ok(Solution {
        value,
        assignment: h.to_total().expect("every vertex is free or fixed"),
    })
}

/// [`td_solve`] with a min-fill decomposition and the default budget.
pub fn solve_exact(a: &ValuedStructure, c: &ValuedStructure, mode: Mode, rho: &PartialAssignment) -> Result<Solution> {
    a.same_signature(c)?;
    check_rho(a, c, rho)?;
    let td = decompose_free(a, rho, Effort::Heuristic)?;
    td_solve(a, c, &td, mode, rho, DEFAULT_DP_BUDGET)
}

/// Decomposition of the Gaifman graph of `a` restricted to vertices outside `dom(rho)`.
pub fn decompose_free(a: &ValuedStructure, rho: &PartialAssignment, effort: Effort) -> Result<NiceTreeDecomposition> {
    let free: Vec<usize> = (0..a.size()).filter(|&v| !rho.contains(v)).collect();
    decompose_induced(&crate::graph::gaifman(a), &free, effort)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_naive, DEFAULT_NAIVE_BUDGET};
    use crate::fixtures;
    use crate::value::int;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn empty(a: &ValuedStructure) -> PartialAssignment {
        PartialAssignment::empty(a.size())
    }

    #[test]
    fn vc_on_path() {
        let a = fixtures::path_left(3, &int(1), Some(&int(1)));
        let s = solve_exact(&a, &fixtures::vc_structure(), Mode::Min, &empty(&a)).unwrap();
        assert_eq!(s.value, ExtRat::int(1));
        assert_eq!(crate::instance::value(&a, &fixtures::vc_structure(), &s.assignment).unwrap(), s.value);
    }

    #[test]
    fn is_on_grid() {
        let a = fixtures::grid_left(3, 3, Some(&int(1)));
        let c = fixtures::is_structure();
        let s = solve_exact(&a, &c, Mode::Max, &empty(&a)).unwrap();
        assert_eq!(s.value, ExtRat::int(5));
        let oracle = solve_naive(&a, &c, Mode::Max, &empty(&a), DEFAULT_NAIVE_BUDGET).unwrap();
        assert_eq!(oracle.value, s.value);
    }

    #[test]
    fn always_infinite_symbol() {
        let sig = fixtures::sig_f();
        let mut a = ValuedStructure::empty_left(sig.clone(), vec!["p".into(), "q".into()]).unwrap();
        a.set(0, vec![0, 1], ExtRat::one()).unwrap();
        let c = ValuedStructure::new(sig, ValuedStructure::numbered_domain(2), ExtRat::PosInf).unwrap();
        let s = solve_exact(&a, &c, Mode::Min, &empty(&a)).unwrap();
        assert_eq!(s.value, ExtRat::PosInf);
        assert!(!s.is_feasible());
    }

    #[test]
    fn empty_instance() {
        let a = ValuedStructure::empty_left(fixtures::sig_f(), vec![]).unwrap();
        let s = solve_exact(&a, &fixtures::vc_structure().restrict(&[0, 1]).unwrap(), Mode::Min, &empty(&a));
        assert!(s.is_err(), "signature differs");
        let c = ValuedStructure::new(fixtures::sig_f(), ValuedStructure::numbered_domain(2), ExtRat::zero()).unwrap();
        let s = solve_exact(&a, &c, Mode::Min, &empty(&a)).unwrap();
        assert_eq!(s.value, ExtRat::zero());
    }

    #[test]
    fn fully_fixed_rho() {
        let a = fixtures::grid_left(2, 3, Some(&int(1)));
        let c = fixtures::vc_structure();
        let h = vec![1, 0, 1, 0, 1, 0];
        let rho = PartialAssignment::from_total(&h);
        let s = solve_exact(&a, &c, Mode::Min, &rho).unwrap();
        assert_eq!(s.assignment, h);
        assert_eq!(s.value, crate::instance::value(&a, &c, &h).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let a = fixtures::grid_left(4, 4, Some(&int(1)));
        let td = decompose_free(&a, &empty(&a), Effort::Heuristic).unwrap();
        let r = td_solve(&a, &fixtures::vc_structure(), &td, Mode::Min, &empty(&a), 10);
        assert!(matches!(r, Err(VcspError::Budget { .. })));
    }

    #[test]
    fn wrong_decomposition_is_rejected() {
        let a = fixtures::path_left(3, &int(1), None);
        let td = crate::exact::treedec::build_tree_decomposition(&Graph::new(3), Effort::Heuristic).unwrap();
        assert!(td_solve(&a, &fixtures::vc_structure(), &td, Mode::Min, &empty(&a), 1000).is_err());
    }

    fn random_right(q: usize, mode: Mode, seed: u64) -> ValuedStructure {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = fixtures::sig_fu();
        let mut c = ValuedStructure::new(sig, ValuedStructure::numbered_domain(q), ExtRat::zero()).unwrap();
        for s in 0..2 {
            for t in c.all_tuples(s).collect::<Vec<_>>() {
                let v = match rng.gen_range(0..5) {
                    0 => mode.worst(),
                    1 => ExtRat::zero(),
                    k => ExtRat::ratio(k as i64, rng.gen_range(1..4)),
                };
                c.set(s, t, v).unwrap();
            }
        }
        c
    }

    fn random_rho(n: usize, q: usize, seed: u64) -> PartialAssignment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut rho = PartialAssignment::empty(n);
        for v in 0..n {
            if rng.gen_bool(0.2) {
                rho.set(v, rng.gen_range(0..q));
            }
        }
        rho
    }

    proptest! {
        #[test]
        fn agrees_with_naive(seed in 0u64..400, n in 1usize..8, q in 1usize..4, max in any::<bool>(), fix in any::<bool>()) {
            let mode = if max { Mode::Max } else { Mode::Min };
            let a = fixtures::random_left(n, 0.4, seed, &[("f", 2), ("u", 1)]);
            let c = random_right(q, mode, seed);
            let rho = if fix { random_rho(n, q, seed) } else { empty(&a) };
            let naive = solve_naive(&a, &c, mode, &rho, DEFAULT_NAIVE_BUDGET).unwrap();
            for effort in [Effort::Heuristic, Effort::ExactSmall] {
                let td = decompose_free(&a, &rho, effort).unwrap();
                let s = td_solve(&a, &c, &td, mode, &rho, DEFAULT_DP_BUDGET).unwrap();
                prop_assert_eq!(&s.value, &naive.value);
                if s.is_feasible() {
                    prop_assert_eq!(crate::instance::value(&a, &c, &s.assignment).unwrap(), s.value.clone());
                }
                for v in rho.dom() {
                    prop_assert_eq!(Some(s.assignment[v]), rho.get(v));
                }
            }
        }

        #[test]
        fn monotone_in_constraints_and_fixing(seed in 0u64..200, n in 2usize..8) {
            let a = fixtures::random_left(n, 0.3, seed, &[("f", 2), ("u", 1)]);
            let c = random_right(3, Mode::Min, seed);
            let base = solve_exact(&a, &c, Mode::Min, &empty(&a)).unwrap().value;
            let mut more = a.clone();
            more.add_weight(0, vec![0, 1], &int(1)).unwrap();
            prop_assert!(solve_exact(&more, &c, Mode::Min, &empty(&a)).unwrap().value >= base);
            let rho = random_rho(n, 3, seed);
            prop_assert!(solve_exact(&a, &c, Mode::Min, &rho).unwrap().value >= base);
            let cm = random_right(3, Mode::Max, seed);
            let top = solve_exact(&a, &cm, Mode::Max, &empty(&a)).unwrap().value;
            prop_assert!(solve_exact(&a, &cm, Mode::Max, &rho).unwrap().value <= top);
        }
    }
}
