//! Layered minimisation scheme for planar left structures.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::diagonal::{hom_path_with, HomPath};
use crate::error::{Result, VcspError};
use crate::exact::{solve_subproblem, Effort, Subproblem, DEFAULT_DP_BUDGET};
use crate::graph::gaifman;
use crate::instance::{weighted_tuples, Assignment, DenseRight, PartialAssignment};
use crate::minbaker::blend::{run_shift, BlendStats, ShiftRun};
use crate::minbaker::layering::{bfs_layering, plan_blocks};
use crate::structure::{Mode, Side, ValuedStructure};
use crate::value::{ceil_to_i64, ExtRat, Rational};

#[derive(Clone, Debug)]
pub struct PtasOptions {
    /// BFS root; the least vertex of each component by default.
    pub root: Option<usize>,
    /// DP work cap per block.
    pub budget: u64,
    pub effort: Effort,
}

impl Default for PtasOptions {
    fn default() -> Self {
        PtasOptions {
            root: None,
            budget: DEFAULT_DP_BUDGET,
            effort: Effort::Heuristic,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PtasOutcome {
    pub assignment: Assignment,
    pub value: ExtRat,
    /// False when the returned value is `+inf`.
    pub feasible: bool,
    pub ell: usize,
    pub k: usize,
    pub m: Rational,
    /// Shift that produced the returned assignment.
    pub best_shift: usize,
    pub max_block_width: usize,
    pub stats: BlendStats,
}

/// `ceil(2M / eps)`.
pub fn planar_k(m: &Rational, eps: &Rational) -> usize {
    ceil_to_i64(&(m * Rational::from_integer(2.into()) / eps)).max(1) as usize
}

pub(crate) fn check_eps(eps: &Rational) -> Result<()> {
    if *eps <= Rational::from_integer(0.into()) {
        return Err(VcspError::Input(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// Best blended assignment over all shifts; within a factor `1 + eps` of the optimum
/// when the Gaifman graph of `a` is planar.
pub fn min_ptas_planar(
    a: &ValuedStructure,
    c: &ValuedStructure,
    eps: &Rational,
    opts: &PtasOptions,
) -> Result<PtasOutcome> {
    a.same_signature(c)?;
    a.validate(Side::Left)?;
    c.validate(Side::RightMin)?;
    check_eps(eps)?;
    let path = hom_path_with(c, true)?;
    let k = planar_k(&path.m, eps);
    min_ptas_planar_with(a, c, &path, k, opts)
}

/// As [`min_ptas_planar`] with an explicit path and block parameter.
pub fn min_ptas_planar_with(
    a: &ValuedStructure,
    c: &ValuedStructure,
    path: &HomPath,
    k: usize,
    opts: &PtasOptions,
) -> Result<PtasOutcome> {
    let n = a.size();
    if let Some(r) = opts.root {
        if r >= n {
            return Err(VcspError::Input(format!("root {r} outside the left domain")));
        }
    }
    let ell = path.len();
    if n == 0 {
        return Ok(PtasOutcome {
            assignment: Vec::new(),
            value: ExtRat::zero(),
            feasible: true,
            ell,
            k,
            m: path.m.clone(),
            best_shift: 1,
            max_block_width: 0,
            stats: BlendStats::default(),
        });
    }
    let tuples = weighted_tuples(a);
    let right = DenseRight::new(c);
    let all: Vec<usize> = (0..n).collect();
    let layering = bfs_layering(&gaifman(a), &all, opts.root);
    let rho = PartialAssignment::empty(n);
    let width = AtomicUsize::new(0);

    let runs: Vec<ShiftRun> = (1..=k)
        .into_par_iter()
        .map(|i| {
            let plan = plan_blocks(&layering, ell, k, i)?;
            run_shift(&tuples, &right, path, &plan, &rho, |tj, vj| {
                let sp = Subproblem {
                    tuples: tj,
                    right: &right,
                    rho: &rho,
                    free: vj,
                };
                let td = sp.decompose(opts.effort)?;
                width.fetch_max(td.width(), Ordering::Relaxed);
                solve_subproblem(&sp, &td, Mode::Min, opts.budget)
            })
        })
        .collect::<Result<_>>()?;

    let mut stats = BlendStats::default();
    let mut best: Option<&ShiftRun> = None;
    for r in &runs {
        stats.add(&r.stats);
        if best.map_or(true, |b| Mode::Min.better(&r.value, &b.value)) {
            best = Some(r);
        }
    }
    let best = best.expect("k >= 1");
    Ok(PtasOutcome {
        assignment: best
            .assignment
            .to_total()
            .ok_or_else(|| VcspError::Bug("blended assignment is partial".into()))?,
        value: best.value.clone(),
        feasible: best.value.is_finite(),
        ell,
        k,
        m: path.m.clone(),
        best_shift: best.shift,
        max_block_width: width.load(Ordering::Relaxed),
        stats,
    })
}
