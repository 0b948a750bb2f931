//! Linear programs over the rationals: `maximise c·x` subject to row constraints and
//! `x >= 0`. Solved exactly by simplex, or with HiGHS followed by an exact certificate check.

mod float;
mod simplex;

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Result, VcspError};
use crate::value::{fmt_rational, Rational};

pub use simplex::solve_exact;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Sparse objective, maximised.
    pub objective: Vec<(usize, Rational)>,
    pub constraints: Vec<Constraint>,
    pub var_names: Vec<String>,
    pub row_names: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Exact simplex always.
    Rational,
    /// HiGHS, then an exact check of the rounded primal and dual solutions.
    Float,
    /// Exact when the tableau is small, float otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Exact,
    Float,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal value when `Optimal`.
    pub value: Option<Rational>,
    pub x: Vec<Rational>,
    /// Row duals `y` with `A^T y >= c`, `y >= 0` on `<=` rows and `y <= 0` on `>=` rows.
    /// For an infeasible exact solve, the phase-one multipliers.
    pub duals: Vec<Rational>,
    /// Optimality (or infeasibility) established in exact arithmetic.
    pub certified: bool,
    pub method: Method,
    pub iterations: u64,
}

/// Dense tableau size up to which `Auto` uses the exact solver.
pub const EXACT_CELLS: usize = 60_000;
pub const DEFAULT_ITERATION_CAP: u64 = 200_000;

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            ..Default::default()
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) -> usize {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
        self.constraints.len() - 1
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn tableau_cells(&self) -> usize {
        self.num_rows().saturating_mul(self.num_vars + 2 * self.num_rows() + 1)
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    /// Exact primal feasibility.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
                match c.cmp {
                    Cmp::Le => lhs <= c.rhs,
                    Cmp::Eq => lhs == c.rhs,
                    Cmp::Ge => lhs >= c.rhs,
                }
            })
    }

    /// Exact dual feasibility; returns the dual objective `b·y`.
    pub fn dual_value(&self, y: &[Rational]) -> Option<Rational> {
        if y.len() != self.num_rows() {
            return None;
        }
        let mut col = vec![Rational::zero(); self.num_vars];
        for (c, yi) in self.constraints.iter().zip(y) {
            let ok = match c.cmp {
                Cmp::Le => !yi.is_negative(),
                Cmp::Ge => !yi.is_positive(),
                Cmp::Eq => true,
            };
            if !ok {
                return None;
            }
            if yi.is_zero() {
                continue;
            }
            for (j, a) in &c.coeffs {
                col[*j] += a * yi;
            }
        }
        for (j, cj) in &self.objective {
            col[*j] -= cj;
        }
        if col.iter().any(|v| v.is_negative()) {
            return None;
        }
        Some(self.constraints.iter().zip(y).map(|(c, yi)| &c.rhs * yi).sum())
    }

    fn var_name(&self, j: usize) -> String {
        self.var_names.get(j).cloned().unwrap_or_else(|| format!("x{j}"))
    }

    /// One line per constraint, rational coefficients:
    ///
    /// ```text
    /// maximize
    ///   obj: 3/2 x0 + 1 x4
    /// subject to
    ///   c0: 1 x0 - 1 x1 = 0
    /// bounds
    ///   all variables >= 0
    /// end
    /// ```
    pub fn to_text(&self) -> String {
        let term_list = |terms: &[(usize, Rational)]| -> String {
            if terms.is_empty() {
                return "0".into();
            }
            let mut s = String::new();
            for (i, (j, a)) in terms.iter().enumerate() {
                let (sign, mag) = if a.is_negative() { ("-", -a.clone()) } else { ("+", a.clone()) };
                if i == 0 {
                    if sign == "-" {
                        s.push('-');
                    }
                } else {
                    let _ = write!(s, " {sign} ");
                }
                let _ = write!(s, "{} {}", fmt_rational(&mag), self.var_name(*j));
            }
            s
        };
        let mut out = String::from("maximize\n");
        let _ = writeln!(out, "  obj: {}", term_list(&self.objective));
        out.push_str("subject to\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let name = self.row_names.get(i).cloned().unwrap_or_else(|| format!("c{i}"));
            let op = match c.cmp {
                Cmp::Le => "<=",
                Cmp::Eq => "=",
                Cmp::Ge => ">=",
            };
            let _ = writeln!(out, "  {name}: {} {op} {}", term_list(&c.coeffs), fmt_rational(&c.rhs));
        }
        out.push_str("bounds\n  all variables >= 0\nend\n");
        out
    }

    fn check_indices(&self) -> Result<()> {
        let bad = self
            .objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| c.coeffs.iter()))
            .find(|(j, _)| *j >= self.num_vars);
        match bad {
            Some((j, _)) => Err(VcspError::Lp(format!("variable index {j} out of range"))),
            None => Ok(()),
        }
    }
}

pub fn solve(lp: &LinearProgram, mode: SolveMode, iteration_cap: u64) -> Result<LpSolution> {
    lp.check_indices()?;
    let small = lp.tableau_cells() <= EXACT_CELLS;
    match mode {
        SolveMode::Rational => solve_exact(lp, iteration_cap),
        SolveMode::Auto if small => solve_exact(lp, iteration_cap),
        SolveMode::Float | SolveMode::Auto => {
            let sol = float::solve_float(lp)?;
            if sol.as_ref().is_some_and(|s| s.certified) {
                return Ok(sol.unwrap());
            }
            if small || mode == SolveMode::Float && lp.tableau_cells() <= 4 * EXACT_CELLS {
                return solve_exact(lp, iteration_cap);
            }
            sol.ok_or_else(|| {
                VcspError::Lp(format!(
                    "float solution failed exact verification and the LP ({} x {}) is too large for the exact solver",
                    lp.num_rows(),
                    lp.num_vars
                ))
            })
        }
    }
}
