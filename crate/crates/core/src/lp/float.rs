//! HiGHS in double precision, followed by exact verification of the rounded
//! primal and dual solutions.

use highs::{HighsModelStatus, RowProblem, Sense};
use num_traits::Zero;

use crate::error::Result;
use crate::lp::{Cmp, LinearProgram, LpSolution, LpStatus, Method};
use crate::value::{rational_near, to_f64, Rational};

const TOL: f64 = 1e-7;
const MAX_DENOM: i64 = 1_000_000;

fn rationalise(v: &[f64]) -> Option<Vec<Rational>> {
    v.iter().map(|&x| rational_near(x, TOL, MAX_DENOM)).collect()
}

/// `None` when HiGHS reports optimal but the rounded primal is not exactly feasible.
/// An optimal result is `certified` only when a rounded dual also checks out with
/// the same objective value.
pub(crate) fn solve_float(lp: &LinearProgram) -> Result<Option<LpSolution>> {
    let mut pb = RowProblem::default();
    let mut obj = vec![0.0; lp.num_vars];
    for (j, c) in &lp.objective {
        obj[*j] += to_f64(c);
    }
    let cols: Vec<_> = obj.iter().map(|&c| pb.add_column(c, 0.0..)).collect();
    for c in &lp.constraints {
        let terms: Vec<_> = c.coeffs.iter().map(|(j, a)| (cols[*j], to_f64(a))).collect();
        let r = to_f64(&c.rhs);
        match c.cmp {
            Cmp::Le => pb.add_row(..=r, terms),
            Cmp::Ge => pb.add_row(r.., terms),
            Cmp::Eq => pb.add_row(r..=r, terms),
        }
    }
    let mut model = pb.optimise(Sense::Maximise);
    model.make_quiet();
    model.set_option("primal_feasibility_tolerance", 1e-9);
    model.set_option("dual_feasibility_tolerance", 1e-9);
    let solved = model.solve();
    let iterations = solved.simplex_iteration_count().max(0) as u64;
    let empty = |status| LpSolution {
        status,
        value: None,
        x: vec![Rational::zero(); lp.num_vars],
        duals: vec![Rational::zero(); lp.num_rows()],
        certified: false,
        method: Method::Float,
        iterations,
    };
    match solved.status() {
        HighsModelStatus::Optimal | HighsModelStatus::ModelEmpty => {}
        HighsModelStatus::Infeasible => return Ok(Some(empty(LpStatus::Infeasible))),
        HighsModelStatus::Unbounded => return Ok(Some(empty(LpStatus::Unbounded))),
        _ => return Ok(None),
    }
    let sol = solved.get_solution();
    let Some(x) = rationalise(sol.columns()) else { return Ok(None) };
    if !lp.is_feasible(&x) {
        return Ok(None);
    }
    let value = lp.objective_at(&x);
    // the sign convention of the reported row duals is checked rather than assumed
    let mut duals = vec![Rational::zero(); lp.num_rows()];
    let mut certified = lp.num_rows() == 0 && lp.dual_value(&[]).is_some_and(|v| v == value);
    if let Some(y) = rationalise(sol.dual_rows()) {
        for cand in [y.clone(), y.iter().map(|v| -v.clone()).collect()] {
            if lp.dual_value(&cand).is_some_and(|v| v == value) {
                duals = cand;
                certified = true;
                break;
            }
        }
    }
    Ok(Some(LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        x,
        duals,
        certified,
        method: Method::Float,
        iterations,
    }))
}
