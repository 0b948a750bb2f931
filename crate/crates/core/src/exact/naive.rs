//! Exhaustive search over extensions of a partial assignment.

use crate::error::{Result, VcspError};
use crate::exact::Solution;
use crate::instance::{weighted_tuples, DenseRight, PartialAssignment, WeightedTuple};
use crate::structure::{Mode, ValuedStructure};
use crate::value::ExtRat;

/// Optimum over all total extensions of `rho`, with the lexicographically least optimal
/// assignment. Depth-first in element order; branches that are already infeasible, or
/// (when minimising) no better than the incumbent, are cut. `budget` caps the number
/// of search nodes.
pub fn solve_naive(
    a: &ValuedStructure,
    c: &ValuedStructure,
    mode: Mode,
    rho: &PartialAssignment,
    budget: u64,
) -> Result<Solution> {
    a.same_signature(c)?;
    c.validate(mode.right_side())?;
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
    let free: Vec<usize> = (0..a.size()).filter(|&v| !rho.contains(v)).collect();
    if c.size() == 0 && !free.is_empty() {
        return Err(VcspError::Input("right domain is empty".into()));
    }
    let tuples = weighted_tuples(a);
    let right = DenseRight::new(c);

    let mut depth_of = vec![None; a.size()];
    for (d, &v) in free.iter().enumerate() {
        depth_of[v] = Some(d);
    }
    let mut at_depth: Vec<Vec<&WeightedTuple>> = vec![Vec::new(); free.len()];
    let mut fixed = ExtRat::zero();
    for t in &tuples {
        match t.args.iter().filter_map(|&x| depth_of[x]).max() {
            Some(d) => at_depth[d].push(t),
            None => {
                let v = right.get(t.sym, &t.args.iter().map(|&x| rho.get(x).unwrap()).collect::<Vec<_>>());
                fixed = fixed.checked_add(&v.scale(&t.weight))?;
            }
        }
    }

    let mut h: Vec<usize> = (0..a.size()).map(|v| rho.get(v).unwrap_or(0)).collect();
    let mut search = Search {
        free: &free,
        at_depth: &at_depth,
        right: &right,
        mode,
        best: None,
        nodes: 0,
        budget,
    };
    if !search.cut(&fixed) {
        search.go(0, fixed, &mut h)?;
    }
    Ok(match search.best {
        Some((value, assignment)) => Solution { value, assignment },
        None => Solution {
            value: mode.worst(),
            assignment: h,
        },
    })
}

struct Search<'a> {
    free: &'a [usize],
    at_depth: &'a [Vec<&'a WeightedTuple>],
    right: &'a DenseRight,
    mode: Mode,
    best: Option<(ExtRat, Vec<usize>)>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn cut(&self, partial: &ExtRat) -> bool {
        match self.mode {
            Mode::Min => {
                partial.is_pos_inf() || self.best.as_ref().is_some_and(|(b, _)| partial >= b)
            }
            Mode::Max => partial.is_neg_inf(),
        }
    }

    fn go(&mut self, d: usize, acc: ExtRat, h: &mut Vec<usize>) -> Result<()> {
        if d == self.free.len() {
            if self.best.as_ref().map_or(true, |(b, _)| self.mode.better(&acc, b)) {
                self.best = Some((acc, h.clone()));
            }
            return Ok(());
        }
        let q = self.right.domain_size();
        for c in 0..q {
            self.nodes += 1;
            if self.nodes > self.budget {
                let required = (q as f64).powi(self.free.len() as i32);
                return Err(VcspError::budget("exhaustive search", required, self.budget as f64));
            }
            h[self.free[d]] = c;
            let mut v = acc.clone();
            for t in &self.at_depth[d] {
                let idx = self.right.index(t.args.iter().map(|&x| h[x]));
                v = v.checked_add(&self.right.get_at(t.sym, idx).scale(&t.weight))?;
            }
            if !self.cut(&v) {
                self.go(d + 1, v, h)?;
            }
        }
        h[self.free[d]] = 0;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::DEFAULT_NAIVE_BUDGET;
    use crate::fixtures;
    use crate::instance::value;
    use crate::structure::TupleIter;
    use crate::value::int;

    fn run(a: &ValuedStructure, c: &ValuedStructure, mode: Mode) -> Solution {
        solve_naive(a, c, mode, &PartialAssignment::empty(a.size()), DEFAULT_NAIVE_BUDGET).unwrap()
    }

    #[test]
    fn independent_set_on_triangle() {
        let a = fixtures::from_graph(&fixtures::cycle_graph(3), fixtures::grid_ids(1, 3), &int(1), Some(&int(1)));
        let s = run(&a, &fixtures::is_structure(), Mode::Max);
        assert_eq!(s.value, ExtRat::int(1));
        assert_eq!(s.assignment, vec![0, 0, 1]);
    }

    #[test]
    fn vertex_cover_on_edge() {
        let a = fixtures::path_left(2, &int(1), Some(&int(1)));
        let s = run(&a, &fixtures::vc_structure(), Mode::Min);
        assert_eq!(s.value, ExtRat::int(1));
        assert_eq!(s.assignment, vec![0, 1]);
    }

    #[test]
    fn fully_fixed() {
        let a = fixtures::path_left(3, &int(1), Some(&int(1)));
        let c = fixtures::vc_structure();
        let rho = PartialAssignment::from_total(&[1, 0, 0]);
        let s = solve_naive(&a, &c, Mode::Min, &rho, 10).unwrap();
        assert_eq!(s.value, ExtRat::PosInf);
        assert_eq!(s.assignment, vec![1, 0, 0]);
        let rho = PartialAssignment::from_total(&[1, 0, 1]);
        let s = solve_naive(&a, &c, Mode::Min, &rho, 10).unwrap();
        assert_eq!(s.value, value(&a, &c, &[1, 0, 1]).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let a = fixtures::path_left(30, &int(1), Some(&int(1)));
        let err = solve_naive(&a, &fixtures::is_structure(), Mode::Max, &PartialAssignment::empty(30), 1000);
        assert!(matches!(err, Err(VcspError::Budget { .. })));
    }

    #[test]
    fn infeasible_reports_worst() {
        let sig = fixtures::sig_f();
        let mut a = ValuedStructure::empty_left(sig.clone(), vec!["p".into(), "q".into()]).unwrap();
        a.set(0, vec![0, 1], ExtRat::one()).unwrap();
        let c = ValuedStructure::new(sig, vec!["x".into()], ExtRat::PosInf).unwrap();
        assert_eq!(run(&a, &c, Mode::Min).value, ExtRat::PosInf);
    }

    #[test]
    fn agrees_with_plain_enumeration() {
        for seed in 0..40 {
            let a = fixtures::random_left(5, 0.4, seed, &[("f", 2), ("u", 1)]);
            for (c, mode) in [(fixtures::vc_structure(), Mode::Min), (fixtures::is_structure(), Mode::Max)] {
                let s = run(&a, &c, mode);
                let mut best: Option<(ExtRat, Vec<usize>)> = None;
                for h in TupleIter::new(2, 5) {
                    let v = value(&a, &c, &h).unwrap();
                    if best.as_ref().map_or(true, |(b, _)| mode.better(&v, b)) {
                        best = Some((v, h));
                    }
                }
                let (bv, bh) = best.unwrap();
                assert_eq!(s.value, bv, "seed {seed}");
                if bv.is_finite() {
                    assert_eq!(s.assignment, bh, "seed {seed}");
                }
            }
        }
    }
}
