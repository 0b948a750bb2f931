//! One shift of the layered scheme: split into blocks, amplify the overlaps, solve,
//! and blend neighbouring block solutions along the path of homomorphisms.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::diagonal::HomPath;
use crate::error::{Result, VcspError};
use crate::instance::{eval_tuples, DenseRight, PartialAssignment, WeightedTuple};
use crate::minbaker::layering::{BlockPlan, Membership};
use crate::value::{ExtRat, Rational};

static CHECKS: AtomicU64 = AtomicU64::new(0);
static VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Process-wide totals of blend checks performed and violated.
pub fn blend_counters() -> (u64, u64) {
    (CHECKS.load(Ordering::Relaxed), VIOLATIONS.load(Ordering::Relaxed))
}

/// Outcome of the runtime checks on a blended assignment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BlendStats {
    pub checked: u64,
    /// Tuple off the overlap whose value changed under blending.
    pub case1: u64,
    /// Overlap tuple exceeding `M·(f(h_j x) + f(h_{j+1} x))`.
    pub case2: u64,
    /// Blended value above the sum of amplified block optima.
    pub sum: u64,
    /// Fixed vertex not kept at its fixed value.
    pub rho: u64,
}

impl BlendStats {
    pub fn violations(&self) -> u64 {
        self.case1 + self.case2 + self.sum + self.rho
    }

    pub fn add(&mut self, o: &BlendStats) {
        self.checked += o.checked;
        self.case1 += o.case1;
        self.case2 += o.case2;
        self.sum += o.sum;
        self.rho += o.rho;
    }

    fn publish(&self) {
        CHECKS.fetch_add(self.checked, Ordering::Relaxed);
        VIOLATIONS.fetch_add(self.violations(), Ordering::Relaxed);
    }
}

/// Where a tuple lands for a given plan.
enum Placement {
    /// Scope inside `dom(rho)`: a constant, present in every block.
    Fixed,
    /// Free part inside the overlap `B_j ∩ B_{j+1}`.
    Overlap(i64),
    /// Free part inside block `j` only.
    Block(i64),
}

fn place(t: &WeightedTuple, plan: &BlockPlan, rho: &PartialAssignment) -> Result<Placement> {
    let mut common: Option<Vec<i64>> = None;
    let mut overlap_j: Option<Option<i64>> = None;
    for v in t.scope() {
        if rho.contains(v) {
            continue;
        }
        let bs = plan.blocks_of(v);
        if bs.is_empty() {
            return Err(VcspError::Bug(format!("vertex {v} is neither layered nor fixed")));
        }
        let oj = match plan.membership(v) {
            Some(Membership::Overlap { j, .. }) => Some(j),
            _ => None,
        };
        overlap_j = Some(match overlap_j {
            None => oj,
            Some(prev) if prev == oj => prev,
            Some(_) => None,
        });
        common = Some(match common {
            None => bs,
            Some(c) => c.into_iter().filter(|j| bs.contains(j)).collect(),
        });
    }
    match (common, overlap_j) {
        (None, _) => Ok(Placement::Fixed),
        (Some(_), Some(Some(j))) => Ok(Placement::Overlap(j)),
        (Some(c), _) => match c.first() {
            Some(&j) => Ok(Placement::Block(j)),
            None => Err(VcspError::Bug(format!(
                "tuple over {:?} spans non-adjacent layers",
                t.scope()
            ))),
        },
    }
}

/// Tuples of `A⁺[B_j] ∪ dom(rho)` for every block: the block's own tuples, with those
/// whose free part lies in the overlap multiplied by `m`.
pub fn block_tuples(
    tuples: &[WeightedTuple],
    plan: &BlockPlan,
    rho: &PartialAssignment,
    m: &Rational,
) -> Result<BTreeMap<i64, Vec<WeightedTuple>>> {
    let mut out: BTreeMap<i64, Vec<WeightedTuple>> =
        plan.blocks().keys().map(|&j| (j, Vec::new())).collect();
    let amplify = |t: &WeightedTuple| WeightedTuple {
        sym: t.sym,
        args: t.args.clone(),
        weight: &t.weight * m,
    };
    for t in tuples {
        match place(t, plan, rho)? {
            Placement::Fixed => {
                for list in out.values_mut() {
                    list.push(amplify(t));
                }
            }
            Placement::Overlap(j) => {
                for jj in [j, j + 1] {
                    out.get_mut(&jj).expect("overlap block").push(amplify(t));
                }
            }
            Placement::Block(j) => out.get_mut(&j).expect("block").push(t.clone()),
        }
    }
    Ok(out)
}

/// `h'(x) = h_j(x)` off the overlaps, `psi_s(h_j(x), h_{j+1}(x))` on overlap offset `s`,
/// and `rho` on its domain.
pub fn blend(
    plan: &BlockPlan,
    path: &HomPath,
    rho: &PartialAssignment,
    sols: &BTreeMap<i64, PartialAssignment>,
) -> Result<PartialAssignment> {
    let mut h = rho.clone();
    let missing = |v: usize, j: i64| VcspError::Bug(format!("block {j} has no value for {v}"));
    for v in 0..rho.len() {
        if rho.contains(v) {
            continue;
        }
        match plan.membership(v) {
            None => {}
            Some(Membership::Single(j)) => {
                h.set(v, sols[&j].get(v).ok_or_else(|| missing(v, j))?);
            }
            Some(Membership::Overlap { j, s }) => {
                let a = sols[&j].get(v).ok_or_else(|| missing(v, j))?;
                let b = sols[&(j + 1)].get(v).ok_or_else(|| missing(v, j + 1))?;
                h.set(v, path.apply(s, a, b));
            }
        }
    }
    Ok(h)
}

fn eval_one(t: &WeightedTuple, right: &DenseRight, h: &PartialAssignment) -> ExtRat {
    let idx = right.index(t.args.iter().map(|&a| h.get(a).expect("assigned")));
    right.get_at(t.sym, idx).clone()
}

/// Per-tuple checks of the two blending cases, fixed-vertex preservation, and the
/// bound `val(h') <= sum_j val_{A⁺[B_j]}(h_j)`.
#[allow(clippy::too_many_arguments)]
pub fn check_blend(
    tuples: &[WeightedTuple],
    right: &DenseRight,
    plan: &BlockPlan,
    m: &Rational,
    rho: &PartialAssignment,
    sols: &BTreeMap<i64, PartialAssignment>,
    block_values: &BTreeMap<i64, ExtRat>,
    h: &PartialAssignment,
) -> Result<BlendStats> {
    let mut st = BlendStats::default();
    for t in tuples {
        st.checked += 1;
        let hv = eval_one(t, right, h);
        match place(t, plan, rho)? {
            Placement::Fixed => {}
            Placement::Block(j) => {
                if hv != eval_one(t, right, &sols[&j]) {
                    st.case1 += 1;
                }
            }
            Placement::Overlap(j) => {
                let bound = eval_one(t, right, &sols[&j])
                    .checked_add(&eval_one(t, right, &sols[&(j + 1)]))?
                    .scale(m);
                if hv > bound {
                    st.case2 += 1;
                }
            }
        }
    }
    for sol in sols.values() {
        for v in rho.dom() {
            st.checked += 1;
            if sol.get(v) != rho.get(v) || h.get(v) != rho.get(v) {
                st.rho += 1;
            }
        }
    }
    let mut total = ExtRat::zero();
    for v in block_values.values() {
        total = total.checked_add(v)?;
    }
    st.checked += 1;
    if eval_tuples(tuples, right, |a| h.get(a).expect("assigned"))? > total {
        st.sum += 1;
    }
    Ok(st)
}

/// Result of one shift.
#[derive(Clone, Debug)]
pub struct ShiftRun {
    pub shift: usize,
    pub assignment: PartialAssignment,
    /// `val_{A'}` of the blended assignment.
    pub value: ExtRat,
    pub stats: BlendStats,
}

/// Solve every block of `plan` with `solve_block(block tuples, block vertices)`,
/// then blend and check. Block solutions must extend `rho`.
pub fn run_shift<F>(
    tuples: &[WeightedTuple],
    right: &DenseRight,
    path: &HomPath,
    plan: &BlockPlan,
    rho: &PartialAssignment,
    solve_block: F,
) -> Result<ShiftRun>
where
    F: Fn(&[WeightedTuple], &[usize]) -> Result<(ExtRat, PartialAssignment)> + Sync,
{
    let per_block = block_tuples(tuples, plan, rho, &path.m)?;
    let solved: Vec<(i64, ExtRat, PartialAssignment)> = plan
        .blocks()
        .par_iter()
        .map(|(&j, verts)| {
            let (v, h) = solve_block(&per_block[&j], verts)?;
            Ok((j, v, h))
        })
        .collect::<Result<_>>()?;
    let mut sols = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (j, v, h) in solved {
        values.insert(j, v);
        sols.insert(j, h);
    }
    let h = blend(plan, path, rho, &sols)?;
    let stats = check_blend(tuples, right, plan, &path.m, rho, &sols, &values, &h)?;
    stats.publish();
    let value = eval_tuples(tuples, right, |a| h.get(a).expect("assigned"))?;
    Ok(ShiftRun {
        shift: plan.shift,
        assignment: h,
        value,
        stats,
    })
}

/// `(sum_j val_{A⁺[B_j]}(h), val(h) + (2M-1)·val_{A[O]}(h))` for a total assignment `h`;
/// the two agree whenever `k >= 2`.
pub fn shift_accounting(
    tuples: &[WeightedTuple],
    right: &DenseRight,
    plan: &BlockPlan,
    m: &Rational,
    h: &[usize],
) -> Result<(ExtRat, ExtRat)> {
    let rho = PartialAssignment::empty(h.len());
    let per_block = block_tuples(tuples, plan, &rho, m)?;
    let mut lhs = ExtRat::zero();
    for list in per_block.values() {
        lhs = lhs.checked_add(&eval_tuples(list, right, |a| h[a])?)?;
    }
    let inside: Vec<&WeightedTuple> = tuples
        .iter()
        .filter(|t| t.args.iter().all(|&v| plan.in_overlap(v)))
        .collect();
    let val_o = eval_tuples(inside, right, |a| h[a])?;
    let two_m_minus_one = m * Rational::from_integer(2.into()) - Rational::from_integer(1.into());
    let rhs = eval_tuples(tuples, right, |a| h[a])?.checked_add(&val_o.scale(&two_m_minus_one))?;
    Ok((lhs, rhs))
}
