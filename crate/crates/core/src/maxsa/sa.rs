//! The level-k Sherali-Adams relaxation: one variable `λ(X, s)` per set `X` of at
//! most `k` left elements and assignment `s: X -> C`.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Result, VcspError};
use crate::graph::gaifman;
use crate::lp::{self, Cmp, Constraint, LinearProgram, LpStatus, Method, SolveMode};
use crate::structure::{Side, TupleIter, ValuedStructure};
use crate::value::{ExtRat, Rational};

/// Default cap on the number of LP variables.
pub const DEFAULT_SA_VARIABLES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MarginalFamily {
    /// `X ⊂ X ∪ {a}` only, plus normalisation of the empty set; implies the rest.
    #[default]
    Covers,
    /// Every pair `X ⊂ Y` and normalisation of every `X`, for cross-checking.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct SaOptions {
    pub family: MarginalFamily,
    /// Solve each connected component of the Gaifman graph separately and add up.
    pub split_components: bool,
    pub max_variables: usize,
    pub iteration_cap: u64,
}

impl Default for SaOptions {
    fn default() -> Self {
        SaOptions {
            family: MarginalFamily::Covers,
            split_components: true,
            max_variables: DEFAULT_SA_VARIABLES,
            iteration_cap: lp::DEFAULT_ITERATION_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SALinearProgram {
    pub level: usize,
    pub left_size: usize,
    pub right_size: usize,
    /// Subsets of size `<= level`, by size then lexicographically.
    pub sets: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    set_index: HashMap<Vec<usize>, usize>,
    pub lp: LinearProgram,
    pub marginal_rows: usize,
    pub normalisation_rows: usize,
    /// Variables forced to zero because some positive tuple maps to `-inf`.
    pub forbidden: Vec<usize>,
}

impl SALinearProgram {
    pub fn num_vars(&self) -> usize {
        self.lp.num_vars
    }

    fn code(&self, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &v| acc * self.right_size + v)
    }

    pub fn var(&self, set: &[usize], s: &[usize]) -> Option<usize> {
        let i = *self.set_index.get(set)?;
        (s.len() == set.len() && s.iter().all(|&v| v < self.right_size)).then(|| self.offsets[i] + self.code(s))
    }

    /// `(X, s)` of a variable.
    pub fn decode(&self, var: usize) -> (Vec<usize>, Vec<usize>) {
        let i = self.offsets.partition_point(|&o| o <= var) - 1;
        let set = self.sets[i].clone();
        let mut code = var - self.offsets[i];
        let mut s = vec![0; set.len()];
        for slot in s.iter_mut().rev() {
            *slot = code % self.right_size;
            code /= self.right_size;
        }
        (set, s)
    }

    /// The point `λ(X, s) = [s = h|X]` of a total assignment.
    pub fn integral_point(&self, h: &[usize]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_vars()];
        for set in &self.sets {
            let s: Vec<usize> = set.iter().map(|&v| h[v]).collect();
            x[self.var(set, &s).expect("set is indexed")] = Rational::one();
        }
        x
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn sa_variable_count(n: usize, q: usize, k: usize) -> f64 {
    (0..=k.min(n)).map(|i| binom(n, i) * (q as f64).powi(i as i32)).sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=k.min(n) {
        let mut cur: Vec<usize> = (0..size).collect();
        loop {
            out.push(cur.clone());
            let Some(i) = (0..size).rev().find(|&i| cur[i] < n - size + i) else { break };
            cur[i] += 1;
            for j in i + 1..size {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
    out
}

pub fn build_sa(a: &ValuedStructure, c: &ValuedStructure, k: usize) -> Result<SALinearProgram> {
    build_sa_with(a, c, k, &SaOptions::default())
}

pub fn build_sa_with(a: &ValuedStructure, c: &ValuedStructure, k: usize, opts: &SaOptions) -> Result<SALinearProgram> {
    a.same_signature(c)?;
    a.validate(Side::Left)?;
    c.validate(Side::RightMax)?;
    let r = a.signature().max_arity();
    if k < r {
        return Err(VcspError::Input(format!("level {k} is below the maximum arity {r}")));
    }
    let (n, q) = (a.size(), c.size());
    let estimate = sa_variable_count(n, q, k);
    if estimate > opts.max_variables as f64 {
        return Err(VcspError::budget("Sherali-Adams variables", estimate, opts.max_variables as f64));
    }
    let sets = subsets(n, k);
    let mut offsets = Vec::with_capacity(sets.len());
    let mut total = 0;
    for s in &sets {
        offsets.push(total);
        total += q.pow(s.len() as u32);
    }
    let set_index = sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let mut sa = SALinearProgram {
        level: k,
        left_size: n,
        right_size: q,
        sets,
        offsets,
        set_index,
        lp: LinearProgram::new(total),
        marginal_rows: 0,
        normalisation_rows: 0,
        forbidden: Vec::new(),
    };

    // normalisation
    let norm: Vec<usize> = match opts.family {
        MarginalFamily::Covers => vec![0],
        MarginalFamily::Exhaustive => (0..sa.sets.len()).collect(),
    };
    for i in norm {
        let first = sa.offsets[i];
        let cnt = q.pow(sa.sets[i].len() as u32);
        sa.lp.add((first..first + cnt).map(|v| (v, Rational::one())).collect(), Cmp::Eq, Rational::one());
        sa.normalisation_rows += 1;
    }

    // marginalisation λ(X, s) = Σ_{r|X = s} λ(Y, r)
    let pairs: Vec<(usize, Vec<usize>)> = sa
        .sets
        .iter()
        .enumerate()
        .filter(|(_, y)| !y.is_empty())
        .flat_map(|(yi, y)| {
            let m = y.len();
            let drops: Vec<Vec<usize>> = match opts.family {
                MarginalFamily::Covers => (0..m).map(|p| vec![p]).collect(),
                MarginalFamily::Exhaustive => (1u64..(1 << m)).map(|mask| (0..m).filter(|&p| mask & (1 << p) != 0).collect()).collect(),
            };
            drops.into_iter().map(move |d| (yi, d))
        })
        .collect();
    let rows: Vec<Vec<Constraint>> = pairs
        .par_iter()
        .map(|(yi, drop)| {
            let y = &sa.sets[*yi];
            let x: Vec<usize> = (0..y.len()).filter(|p| !drop.contains(p)).map(|p| y[p]).collect();
            let xi = sa.set_index[&x];
            let mut out = Vec::new();
            for s in TupleIter::new(q, x.len()) {
                let mut coeffs = vec![(sa.offsets[xi] + sa.code(&s), Rational::one())];
                for fill in TupleIter::new(q, drop.len()) {
                    let mut full = Vec::with_capacity(y.len());
                    let (mut si, mut fi) = (0, 0);
                    for p in 0..y.len() {
                        if drop.contains(&p) {
                            full.push(fill[fi]);
                            fi += 1;
                        } else {
                            full.push(s[si]);
                            si += 1;
                        }
                    }
                    coeffs.push((sa.offsets[*yi] + sa.code(&full), -Rational::one()));
                }
                out.push(Constraint {
                    coeffs,
                    cmp: Cmp::Eq,
                    rhs: Rational::zero(),
                });
            }
            out
        })
        .collect();
    for r in rows.into_iter().flatten() {
        sa.marginal_rows += 1;
        sa.lp.constraints.push(r);
    }

    // objective and forbidden assignments
    let mut obj: HashMap<usize, Rational> = HashMap::new();
    let mut forbidden = BTreeSet::new();
    for (sym, x, w) in a.positive_tuples() {
        let scope: Vec<usize> = x.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        for s in TupleIter::new(q, scope.len()) {
            let img: Vec<usize> = x.iter().map(|v| s[scope.binary_search(v).unwrap()]).collect();
            let var = sa.var(&scope, &s).expect("scope within level");
            match c.get(sym, &img) {
                ExtRat::NegInf => {
                    forbidden.insert(var);
                }
                ExtRat::Finite(v) if !v.is_zero() => *obj.entry(var).or_insert_with(Rational::zero) += &w * v,
                _ => {}
            }
        }
    }
    for &v in &forbidden {
        sa.lp.add(vec![(v, Rational::one())], Cmp::Eq, Rational::zero());
    }
    sa.forbidden = forbidden.into_iter().collect();
    let mut obj: Vec<(usize, Rational)> = obj.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    obj.sort_by_key(|(v, _)| *v);
    sa.lp.objective = obj;
    Ok(sa)
}

#[derive(Clone, Debug)]
pub struct ComponentSolve {
    pub vertices: Vec<usize>,
    pub status: LpStatus,
    pub value: ExtRat,
    pub num_vars: usize,
    pub certified: bool,
    pub method: Method,
}

#[derive(Clone, Debug)]
pub struct SaSolution {
    pub status: LpStatus,
    /// `maxval_k`; `-inf` when the relaxation is infeasible.
    pub value: ExtRat,
    pub certified: bool,
    pub num_vars: usize,
    pub components: Vec<ComponentSolve>,
    /// `λ` when the structure was solved as a single LP.
    pub x: Option<Vec<Rational>>,
}

/// `maxval_k(A, C)`.
pub fn solve_sa(a: &ValuedStructure, c: &ValuedStructure, k: usize, mode: SolveMode) -> Result<SaSolution> {
    solve_sa_with(a, c, k, mode, &SaOptions::default())
}

fn solve_one(a: &ValuedStructure, c: &ValuedStructure, k: usize, mode: SolveMode, opts: &SaOptions) -> Result<(ComponentSolve, Vec<Rational>)> {
    let sa = build_sa_with(a, c, k, opts)?;
    let sol = lp::solve(&sa.lp, mode, opts.iteration_cap)?;
    let value = match sol.status {
        LpStatus::Optimal => ExtRat::Finite(sol.value.clone().unwrap_or_default()),
        LpStatus::Infeasible => ExtRat::NegInf,
        LpStatus::Unbounded => return Err(VcspError::Bug("Sherali-Adams LP unbounded".into())),
    };
    Ok((
        ComponentSolve {
            vertices: (0..a.size()).collect(),
            status: sol.status,
            value,
            num_vars: sa.num_vars(),
            certified: sol.certified,
            method: sol.method,
        },
        sol.x,
    ))
}

pub fn solve_sa_with(a: &ValuedStructure, c: &ValuedStructure, k: usize, mode: SolveMode, opts: &SaOptions) -> Result<SaSolution> {
    a.same_signature(c)?;
    let r = a.signature().max_arity();
    if k < r {
        return Err(VcspError::Input(format!("level {k} is below the maximum arity {r}")));
    }
    if !opts.split_components {
        let (comp, x) = solve_one(a, c, k, mode, opts)?;
        return Ok(SaSolution {
            status: comp.status,
            value: comp.value.clone(),
            certified: comp.certified,
            num_vars: comp.num_vars,
            components: vec![comp],
            x: Some(x),
        });
    }
    // elements outside every positive tuple are unconstrained and contribute nothing
    let g = gaifman(a);
    let mut used = vec![false; a.size()];
    for (_, x, _) in a.positive_tuples() {
        for v in x {
            used[v] = true;
        }
    }
    let comps: Vec<Vec<usize>> = g.components().into_iter().filter(|cc| used[cc[0]]).collect();
    let parts: Vec<ComponentSolve> = comps
        .par_iter()
        .map(|cc| {
            let sub = a.restrict(cc)?;
            let (mut comp, _) = solve_one(&sub, c, k, mode, opts)?;
            comp.vertices = cc.clone();
            Ok(comp)
        })
        .collect::<Result<_>>()?;
    let mut value = ExtRat::zero();
    for p in &parts {
        value = value.checked_add(&p.value)?;
    }
    let status = if value.is_neg_inf() { LpStatus::Infeasible } else { LpStatus::Optimal };
    Ok(SaSolution {
        status,
        value,
        certified: parts.iter().all(|p| p.certified),
        num_vars: parts.iter().map(|p| p.num_vars).sum(),
        components: parts,
        x: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_exact, solve_naive};
    use crate::fixtures;
    use crate::instance::PartialAssignment;
    use crate::structure::Mode;
    use crate::value::{int, rat};
    use proptest::prelude::*;

    fn unit_edge() -> ValuedStructure {
        let mut a = ValuedStructure::empty_left(fixtures::sig_f(), vec!["a".into(), "b".into()]).unwrap();
        a.set(0, vec![0, 1], ExtRat::one()).unwrap();
        a
    }

    fn maxval(a: &ValuedStructure, c: &ValuedStructure) -> ExtRat {
        solve_naive(a, c, Mode::Max, &PartialAssignment::empty(a.size()), u64::MAX).unwrap().value
    }

    #[test]
    fn variable_count_unit_edge() {
        let sa = build_sa(&unit_edge(), &fixtures::cut_structure(), 2).unwrap();
        assert_eq!(sa.num_vars(), 9);
        assert_eq!(sa.sets.len(), 4);
        let (set, s) = sa.decode(8);
        assert_eq!((set, s), (vec![0, 1], vec![1, 1]));
        assert_eq!(sa.var(&[0, 1], &[1, 1]), Some(8));
    }

    #[test]
    fn level_below_arity_rejected() {
        assert!(build_sa(&unit_edge(), &fixtures::cut_structure(), 1).is_err());
    }

    #[test]
    fn budget_reports_count() {
        let opts = SaOptions {
            max_variables: 5,
            ..Default::default()
        };
        match build_sa_with(&unit_edge(), &fixtures::cut_structure(), 2, &opts) {
            Err(VcspError::Budget { required, .. }) => assert_eq!(required, 9.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn triangle_levels() {
        let a = fixtures::cycle_left(3, &int(1), Some(&int(1)));
        let c = fixtures::is_structure();
        for mode in [SolveMode::Rational, SolveMode::Float] {
            assert_eq!(solve_sa(&a, &c, 2, mode).unwrap().value, ExtRat::ratio(3, 2));
            assert_eq!(solve_sa(&a, &c, 3, mode).unwrap().value, ExtRat::one());
        }
        assert_eq!(maxval(&a, &c), ExtRat::one());
        let a2 = a.rescale(&int(2)).unwrap();
        assert_eq!(solve_sa(&a2, &c, 2, SolveMode::Rational).unwrap().value, ExtRat::int(3));
    }

    #[test]
    fn infeasible_is_neg_inf() {
        let mut c = fixtures::cut_structure();
        for x in 0..2 {
            for y in 0..2 {
                c.set(0, vec![x, y], ExtRat::NegInf).unwrap();
            }
        }
        let s = solve_sa(&unit_edge(), &c, 2, SolveMode::Rational).unwrap();
        assert_eq!(s.value, ExtRat::NegInf);
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn families_agree() {
        let a = fixtures::random_left(4, 0.6, 3, &[("f", 2), ("u", 1)]);
        let c = fixtures::random_max_sol(3, &[("f", 2), ("u", 1)], 3);
        let mut opts = SaOptions {
            split_components: false,
            ..Default::default()
        };
        let v1 = solve_sa_with(&a, &c, 2, SolveMode::Rational, &opts).unwrap().value;
        opts.family = MarginalFamily::Exhaustive;
        let v2 = solve_sa_with(&a, &c, 2, SolveMode::Rational, &opts).unwrap().value;
        assert_eq!(v1, v2);
    }

    #[test]
    fn integral_points_are_feasible() {
        let a = fixtures::random_left(4, 0.6, 8, &[("f", 2), ("u", 1)]);
        let c = fixtures::random_max_sol(3, &[("f", 2), ("u", 1)], 8);
        let sa = build_sa(&a, &c, 3).unwrap();
        for h in TupleIter::new(3, 4) {
            let v = crate::instance::value(&a, &c, &h).unwrap();
            let x = sa.integral_point(&h);
            assert_eq!(sa.lp.is_feasible(&x), v.is_finite());
            if let ExtRat::Finite(v) = v {
                assert_eq!(sa.lp.objective_at(&x), v);
            }
        }
    }

    #[test]
    fn split_matches_whole() {
        let one = fixtures::path_left(3, &int(1), Some(&int(1)));
        let two = ValuedStructure::disjoint_union(&[one.clone(), one.rescale(&rat(1, 2)).unwrap()]).unwrap();
        let c = fixtures::is_structure();
        let whole = SaOptions {
            split_components: false,
            ..Default::default()
        };
        let v1 = solve_sa_with(&two, &c, 2, SolveMode::Rational, &whole).unwrap();
        let v2 = solve_sa(&two, &c, 2, SolveMode::Rational).unwrap();
        assert_eq!(v1.value, v2.value);
        assert_eq!(v2.components.len(), 2);
        assert_eq!(v2.value, ExtRat::int(3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn relaxation_bounds(seed in 0u64..5000, n in 2usize..6) {
            let sig = [("f", 2), ("u", 1)];
            let a = fixtures::random_left(n, 0.5, seed, &sig);
            let c = fixtures::random_max_sol(3, &sig, seed);
            let exact = solve_exact(&a, &c, Mode::Max, &PartialAssignment::empty(n)).unwrap().value;
            let v2 = solve_sa(&a, &c, 2, SolveMode::Rational).unwrap().value;
            let v3 = solve_sa(&a, &c, 3, SolveMode::Rational).unwrap().value;
            prop_assert!(v2 >= v3);
            prop_assert!(v3 >= exact);
            let lam = rat(3, 2);
            let scaled = solve_sa(&a.rescale(&lam).unwrap(), &c, 2, SolveMode::Rational).unwrap().value;
            prop_assert_eq!(scaled, v2.scale(&lam));
        }
    }
}
