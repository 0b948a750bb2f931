//! Overcasts: distributions of partial homomorphisms certifying that one left
//! structure dominates another against every Max-Sol right structure, and the
//! separating structures that witness their absence.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Result, VcspError};
use crate::exact::solve_naive;
use crate::instance::PartialAssignment;
use crate::lp::{self, Cmp, LinearProgram, LpStatus, SolveMode};
use crate::structure::{Mode, Side, TupleIter, ValuedStructure};
use crate::value::{exp_neg_lower, ExtRat, Rational};

pub use crate::fixtures::{clique_left as clique_structure, coloring_structure, loop_clique, max_clique_reduction};

/// Cap on the number of partial maps `(|B|+1)^|A|` enumerated by the LP search.
pub const DEFAULT_MAP_BUDGET: u64 = 1_000_000;

/// Partial map `A -> B`; `None` marks an undefined element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialHom {
    map: Vec<Option<usize>>,
    verified: bool,
}

impl PartialHom {
    /// Checks the partial-homomorphism condition and records the result.
    pub fn new(a: &ValuedStructure, b: &ValuedStructure, map: Vec<Option<usize>>) -> Self {
        let verified = is_partial_hom(a, b, &map);
        PartialHom { map, verified }
    }

    pub fn identity(n: usize) -> Self {
        PartialHom {
            map: (0..n).map(Some).collect(),
            verified: false,
        }
    }

    pub fn unchecked(map: Vec<Option<usize>>) -> Self {
        PartialHom { map, verified: false }
    }

    pub fn map(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.map[x]
    }

    pub fn defined(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&x| self.map[x].is_some()).collect()
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    pub fn verified(&self) -> bool {
        self.verified
    }
}

#[derive(Clone, Debug)]
pub enum OvercastDistribution {
    /// Weighted partial homomorphisms; weights positive and summing to 1.
    Explicit(Vec<(PartialHom, Rational)>),
    /// Every total map `A -> B` with probability `|B|^-|A|`, kept implicit.
    UniformTotal { source: usize, target: usize },
}

impl OvercastDistribution {
    pub fn support_size(&self) -> Option<usize> {
        match self {
            OvercastDistribution::Explicit(v) => Some(v.len()),
            OvercastDistribution::UniformTotal { source, target } => {
                (*target).checked_pow(u32::try_from(*source).ok()?)
            }
        }
    }
}

/// Positive tuples of `B`, indexed.
struct Targets {
    tuples: Vec<(usize, Vec<usize>, Rational)>,
    index: HashMap<(usize, Vec<usize>), usize>,
    by_sym: Vec<Vec<usize>>,
}

impl Targets {
    fn new(b: &ValuedStructure) -> Self {
        let tuples = b.positive_tuples();
        let mut by_sym = vec![Vec::new(); b.signature().len()];
        let mut index = HashMap::new();
        for (i, (s, y, _)) in tuples.iter().enumerate() {
            by_sym[*s].push(i);
            index.insert((*s, y.clone()), i);
        }
        Targets { tuples, index, by_sym }
    }

    fn matches(&self, sym: usize, x: &[usize], g: &[Option<usize>]) -> bool {
        self.by_sym[sym].iter().any(|&i| {
            let y = &self.tuples[i].1;
            x.iter().zip(y).all(|(&xi, &yi)| g[xi].map_or(true, |v| v == yi))
        })
    }
}

fn check_map(a: &ValuedStructure, b: &ValuedStructure, g: &[Option<usize>]) -> bool {
    g.len() == a.size() && g.iter().flatten().all(|&v| v < b.size())
}

/// Every positive tuple of `A` extends, through the defined part of `g`, to a
/// positive tuple of `B` with the same symbol.
pub fn is_partial_hom(a: &ValuedStructure, b: &ValuedStructure, g: &[Option<usize>]) -> bool {
    if a.same_signature(b).is_err() || !check_map(a, b, g) {
        return false;
    }
    let t = Targets::new(b);
    a.positive_tuples().iter().all(|(s, x, _)| t.matches(*s, x, g))
}

fn compatible(x: &[usize], y: &[usize]) -> bool {
    (0..x.len()).all(|i| (i + 1..x.len()).all(|j| x[i] != x[j] || y[i] == y[j]))
}

fn distinct(x: &[usize]) -> usize {
    let mut v = x.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// `E_{g~w} f^A(g^{-1}(y))` for each positive tuple `(f, y)` of `B`, in the order of
/// `B.positive_tuples()`.
pub fn expectations(
    a: &ValuedStructure,
    b: &ValuedStructure,
    w: &OvercastDistribution,
) -> Vec<((usize, Vec<usize>), Rational)> {
    let t = Targets::new(b);
    let mut e = vec![Rational::zero(); t.tuples.len()];
    let pos_a = a.positive_tuples();
    match w {
        OvercastDistribution::Explicit(list) => {
            for (g, p) in list {
                add_column(&pos_a, &t, g.map(), p, &mut e);
            }
        }
        OvercastDistribution::UniformTotal { target, .. } => {
            let q = Rational::from_integer((*target as i64).into());
            for (s, x, fx) in &pos_a {
                let pr = Rational::one() / q.pow(distinct(x) as i32);
                for &i in &t.by_sym[*s] {
                    if compatible(x, &t.tuples[i].1) {
                        e[i] += fx * &pr;
                    }
                }
            }
        }
    }
    t.tuples.into_iter().zip(e).map(|((s, y, _), v)| ((s, y), v)).collect()
}

fn add_column(
    pos_a: &[(usize, Vec<usize>, Rational)],
    t: &Targets,
    g: &[Option<usize>],
    p: &Rational,
    out: &mut [Rational],
) {
    for (s, x, fx) in pos_a {
        let y: Option<Vec<usize>> = x.iter().map(|&v| g[v]).collect();
        if let Some(i) = y.and_then(|y| t.index.get(&(*s, y))) {
            out[*i] += fx * p;
        }
    }
}

/// Exact check: every map is a partial homomorphism, weights are positive and sum
/// to 1, and every positive tuple of `B` is covered in expectation.
pub fn verify_overcast(a: &ValuedStructure, b: &ValuedStructure, w: &OvercastDistribution) -> bool {
    if a.same_signature(b).is_err() {
        return false;
    }
    match w {
        OvercastDistribution::Explicit(list) => {
            if list.is_empty() || list.iter().any(|(_, p)| !p.is_positive()) {
                return false;
            }
            if list.iter().map(|(_, p)| p.clone()).sum::<Rational>() != Rational::one() {
                return false;
            }
            let t = Targets::new(b);
            let pos_a = a.positive_tuples();
            if !list.iter().all(|(g, _)| {
                check_map(a, b, g.map()) && pos_a.iter().all(|(s, x, _)| t.matches(*s, x, g.map()))
            }) {
                return false;
            }
        }
        OvercastDistribution::UniformTotal { source, target } => {
            if *source != a.size() || *target != b.size() || (*target == 0 && *source > 0) {
                return false;
            }
            // every total map is a homomorphism: each pattern-compatible image is positive
            for (s, x, _) in a.positive_tuples() {
                for y in TupleIter::new(*target, x.len()) {
                    if compatible(&x, &y) && !b.get(s, &y).is_positive() {
                        return false;
                    }
                }
            }
        }
    }
    expectations(a, b, w).iter().all(|((s, y), e)| match b.get(*s, y) {
        ExtRat::Finite(v) => *e >= *v,
        _ => false,
    })
}

/// Farkas multipliers `c(f, y) >= 0` on the positive tuples of `B` with
/// `sum c·a(g) < sum c·b` for every partial homomorphism `g`.
#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub weights: Vec<((usize, Vec<usize>), Rational)>,
}

#[derive(Clone, Debug)]
pub enum OvercastSearch {
    Found(OvercastDistribution),
    Separated(FarkasCertificate),
}

#[derive(Clone, Debug)]
pub struct SearchStats {
    pub maps: u64,
    pub partial_homs: u64,
    /// Distinct coverage vectors, i.e. LP columns.
    pub columns: usize,
}

pub fn find_overcast(a: &ValuedStructure, b: &ValuedStructure) -> Result<Option<OvercastDistribution>> {
    find_overcast_with(a, b, DEFAULT_MAP_BUDGET)
}

pub fn find_overcast_with(
    a: &ValuedStructure,
    b: &ValuedStructure,
    budget: u64,
) -> Result<Option<OvercastDistribution>> {
    Ok(match search_overcast(a, b, budget)? {
        OvercastSearch::Found(w) => Some(w),
        OvercastSearch::Separated(_) => None,
    })
}

/// Identity and uniform random maps first, then the LP over all partial homomorphisms.
pub fn search_overcast(a: &ValuedStructure, b: &ValuedStructure, budget: u64) -> Result<OvercastSearch> {
    a.same_signature(b)?;
    a.validate(Side::Left)?;
    b.validate(Side::Left)?;
    if a.size() == b.size() {
        let w = OvercastDistribution::Explicit(vec![(PartialHom::new(a, b, (0..a.size()).map(Some).collect()), Rational::one())]);
        if verify_overcast(a, b, &w) {
            return Ok(OvercastSearch::Found(w));
        }
    }
    let w = OvercastDistribution::UniformTotal {
        source: a.size(),
        target: b.size(),
    };
    if verify_overcast(a, b, &w) {
        return Ok(OvercastSearch::Found(w));
    }
    Ok(lp_search(a, b, budget)?.0)
}

fn map_count(a: &ValuedStructure, b: &ValuedStructure) -> Option<u64> {
    (b.size() as u64 + 1).checked_pow(u32::try_from(a.size()).ok()?)
}

/// Maximise `t` subject to `E_w a(y) >= t·b(y)` for every positive `(f, y)` of `B`,
/// `w` a distribution over partial homomorphisms and `t <= 1`. An overcast exists
/// iff the optimum is 1; otherwise the row duals give a Farkas certificate.
pub fn lp_search(a: &ValuedStructure, b: &ValuedStructure, budget: u64) -> Result<(OvercastSearch, SearchStats)> {
    a.same_signature(b)?;
    let total = map_count(a, b).filter(|&m| m <= budget).ok_or_else(|| {
        let req = (b.size() as f64 + 1.0).powi(a.size() as i32);
        VcspError::budget("partial-map enumeration", req, budget as f64)
    })?;
    let t = Targets::new(b);
    let pos_a = a.positive_tuples();
    let nb = b.size() as u64;
    let na = a.size();
    let decode = |mut code: u64| -> Vec<Option<usize>> {
        (0..na)
            .map(|_| {
                let d = code % (nb + 1);
                code /= nb + 1;
                (d < nb).then_some(d as usize)
            })
            .collect()
    };

    // one LP column per distinct coverage vector; the first map attaining it is kept
    let mut columns: Vec<(Vec<Option<usize>>, Vec<Rational>)> = Vec::new();
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut partial_homs = 0u64;
    const CHUNK: u64 = 1 << 16;
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let found: Vec<(Vec<Option<usize>>, Vec<Rational>)> = (start..end)
            .into_par_iter()
            .filter_map(|code| {
                let g = decode(code);
                if !pos_a.iter().all(|(s, x, _)| t.matches(*s, x, &g)) {
                    return None;
                }
                let mut col = vec![Rational::zero(); t.tuples.len()];
                add_column(&pos_a, &t, &g, &Rational::one(), &mut col);
                Some((g, col))
            })
            .collect();
        for (g, col) in found {
            partial_homs += 1;
            if !seen.contains_key(&col) {
                seen.insert(col.clone(), columns.len());
                columns.push((g, col));
            }
        }
        start = end;
    }
    let stats = SearchStats {
        maps: total,
        partial_homs,
        columns: columns.len(),
    };

    let ncols = columns.len();
    let tvar = ncols;
    let mut prog = LinearProgram::new(ncols + 1);
    prog.objective = vec![(tvar, Rational::one())];
    for (i, (_, _, by)) in t.tuples.iter().enumerate() {
        let mut coeffs: Vec<(usize, Rational)> = columns
            .iter()
            .enumerate()
            .filter(|(_, (_, col))| !col[i].is_zero())
            .map(|(j, (_, col))| (j, col[i].clone()))
            .collect();
        coeffs.push((tvar, -by.clone()));
        prog.add(coeffs, Cmp::Ge, Rational::zero());
    }
    prog.add((0..ncols).map(|j| (j, Rational::one())).collect(), Cmp::Eq, Rational::one());
    prog.add(vec![(tvar, Rational::one())], Cmp::Le, Rational::one());
    let sol = lp::solve(&prog, SolveMode::Auto, lp::DEFAULT_ITERATION_CAP)?;

    let keys = || t.tuples.iter().map(|(s, y, _)| (*s, y.clone()));
    let out = match sol.status {
        // no partial homomorphism at all: the zero certificate separates
        LpStatus::Infeasible => OvercastSearch::Separated(FarkasCertificate {
            weights: keys().map(|k| (k, Rational::zero())).collect(),
        }),
        LpStatus::Unbounded => return Err(VcspError::Bug("overcast LP unbounded".into())),
        LpStatus::Optimal => {
            let v = sol.value.clone().unwrap_or_default();
            if v >= Rational::one() {
                let list: Vec<(PartialHom, Rational)> = columns
                    .iter()
                    .zip(&sol.x)
                    .filter(|(_, p)| p.is_positive())
                    .map(|((g, _), p)| (PartialHom::new(a, b, g.clone()), p.clone()))
                    .collect();
                let w = OvercastDistribution::Explicit(list);
                if !verify_overcast(a, b, &w) {
                    return Err(VcspError::Bug("overcast from LP fails verification".into()));
                }
                OvercastSearch::Found(w)
            } else {
                if !sol.certified {
                    return Err(VcspError::Lp("overcast LP optimum below 1 without a certified dual".into()));
                }
                let c: Vec<Rational> = sol.duals[..t.tuples.len()].iter().map(|y| -y.clone()).collect();
                let rhs: Rational = c.iter().zip(&t.tuples).map(|(c, (_, _, b))| c * b).sum();
                let ok = c.iter().all(|v| !v.is_negative())
                    && columns
                        .iter()
                        .all(|(_, col)| c.iter().zip(col).map(|(c, a)| c * a).sum::<Rational>() < rhs);
                if !ok {
                    return Err(VcspError::Bug("Farkas certificate fails its inequalities".into()));
                }
                OvercastSearch::Separated(FarkasCertificate {
                    weights: keys().zip(c).collect(),
                })
            }
        }
    };
    Ok((out, stats))
}

#[derive(Clone, Debug)]
pub struct Separator {
    /// Max-Sol structure on `B` plus a bottom element (last).
    pub structure: ValuedStructure,
    pub certificate: FarkasCertificate,
    pub left_value: ExtRat,
    pub right_value: ExtRat,
}

/// Max-Sol structure `C` with `maxval(A, C) < maxval(B, C)`, confirmed by brute force.
/// Errors when `A` overcasts `B`.
pub fn separate(a: &ValuedStructure, b: &ValuedStructure) -> Result<Separator> {
    separate_with(a, b, DEFAULT_MAP_BUDGET, crate::exact::DEFAULT_NAIVE_BUDGET)
}

pub fn separate_with(a: &ValuedStructure, b: &ValuedStructure, map_budget: u64, naive_budget: u64) -> Result<Separator> {
    let certificate = match lp_search(a, b, map_budget)?.0 {
        OvercastSearch::Found(_) => {
            return Err(VcspError::Input("the left structure overcasts the right one; no separator exists".into()))
        }
        OvercastSearch::Separated(c) => c,
    };
    let structure = separator_structure(b, &certificate)?;
    let solve = |x: &ValuedStructure| -> Result<ExtRat> {
        Ok(solve_naive(x, &structure, Mode::Max, &PartialAssignment::empty(x.size()), naive_budget)?.value)
    };
    let left_value = solve(a)?;
    let right_value = solve(b)?;
    if !(left_value < right_value) {
        return Err(VcspError::Bug(format!(
            "separator does not separate: {left_value} vs {right_value}"
        )));
    }
    Ok(Separator {
        structure,
        certificate,
        left_value,
        right_value,
    })
}

/// `f(y) = -inf` when no completion of `y` (bottom entries replaced by elements of
/// `B`) is positive in `B`; `c(f, y)` on positive tuples of `B`; 0 otherwise.
pub fn separator_structure(b: &ValuedStructure, cert: &FarkasCertificate) -> Result<ValuedStructure> {
    let nb = b.size();
    let mut ids = b.domain().to_vec();
    let mut bot = "bot".to_string();
    while ids.contains(&bot) {
        bot.push('\'');
    }
    ids.push(bot);
    let weights: HashMap<&(usize, Vec<usize>), &Rational> = cert.weights.iter().map(|(k, v)| (k, v)).collect();
    let mut c = ValuedStructure::new(b.signature().clone(), ids, ExtRat::zero())?;
    for s in 0..b.signature().len() {
        let ar = b.signature().arity(s);
        for y in TupleIter::new(nb + 1, ar) {
            let free: Vec<usize> = (0..ar).filter(|&i| y[i] == nb).collect();
            let some_positive = TupleIter::new(nb, free.len()).any(|fill| {
                let mut z = y.clone();
                for (i, v) in free.iter().zip(fill) {
                    z[*i] = v;
                }
                b.get(s, &z).is_positive()
            });
            let v = if !some_positive {
                ExtRat::NegInf
            } else if free.is_empty() && b.get(s, &y).is_positive() {
                ExtRat::Finite(weights.get(&(s, y.clone())).map_or_else(Rational::zero, |w| (*w).clone()))
            } else {
                ExtRat::zero()
            };
            if !v.is_zero() {
                c.set(s, y, v)?;
            }
        }
    }
    Ok(c)
}

/// True when `A >= q·B` and `B >= q·A` are both certified by overcasts, `q` a
/// rational lower bound on `e^-eps`; this bounds the opt-distance by `eps`.
pub fn certify_dopt(a: &ValuedStructure, b: &ValuedStructure, eps: &Rational) -> Result<bool> {
    if eps.is_negative() {
        return Err(VcspError::Input(format!("epsilon must be non-negative, got {eps}")));
    }
    let q = exp_neg_lower(eps);
    Ok(find_overcast(a, &b.rescale(&q)?)?.is_some() && find_overcast(b, &a.rescale(&q)?)?.is_some())
}

/// `w` reweighted for `lambda·A >= lambda·B`; the same distribution works.
pub fn rescaled(w: &OvercastDistribution) -> OvercastDistribution {
    w.clone()
}
