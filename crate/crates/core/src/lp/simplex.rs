//! Two-phase dense tableau simplex in exact arithmetic with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::error::{Result, VcspError};
use crate::lp::{Cmp, LinearProgram, LpSolution, LpStatus, Method};
use crate::value::Rational;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced costs `d_j`; the current basis is optimal when all allowed `d_j >= 0`.
    obj: Vec<Rational>,
    obj_val: Rational,
    basis: Vec<usize>,
    iterations: u64,
    cap: u64,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.obj[j] -= d;
            }
            self.obj_val -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Set the objective row for costs `cost` (maximised) relative to the current basis.
    fn price(&mut self, cost: &[Rational]) {
        let n = cost.len();
        self.obj = cost.iter().map(|c| -c.clone()).collect();
        self.obj_val = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..n {
                if !self.rows[i][j].is_zero() {
                    let d = cb * &self.rows[i][j];
                    self.obj[j] += d;
                }
            }
            self.obj_val += cb * &self.rhs[i];
        }
    }

    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<Outcome> {
        loop {
            let Some(c) = (0..self.obj.len()).find(|&j| allowed(j) && self.obj[j].is_negative()) else {
                return Ok(Outcome::Optimal);
            };
            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(VcspError::Lp(format!("simplex iteration cap {} reached", self.cap)));
            }
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Ok(Outcome::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn solve_exact(lp: &LinearProgram, iteration_cap: u64) -> Result<LpSolution> {
    let n = lp.num_vars;
    let m = lp.num_rows();
    // normalise to rhs >= 0
    let mut sign = vec![Rational::one(); m];
    let mut cmps = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut cmp = c.cmp;
        if c.rhs.is_negative() {
            sign[i] = -Rational::one();
            cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        cmps.push(cmp);
    }
    // columns: originals, then one slack/surplus per inequality, then one artificial per >=/= row
    let mut ncols = n;
    let mut slack = vec![None; m];
    for i in 0..m {
        if cmps[i] != Cmp::Eq {
            slack[i] = Some(ncols);
            ncols += 1;
        }
    }
    let art_start = ncols;
    let mut art = vec![None; m];
    for i in 0..m {
        if cmps[i] != Cmp::Le {
            art[i] = Some(ncols);
            ncols += 1;
        }
    }
    let mut rows = vec![vec![Rational::zero(); ncols]; m];
    let mut rhs = vec![Rational::zero(); m];
    let mut basis = vec![0; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        for (j, a) in &c.coeffs {
            rows[i][*j] += a * &sign[i];
        }
        rhs[i] = &c.rhs * &sign[i];
        if let Some(s) = slack[i] {
            rows[i][s] = if cmps[i] == Cmp::Le { Rational::one() } else { -Rational::one() };
        }
        if let Some(a) = art[i] {
            rows[i][a] = Rational::one();
        }
        basis[i] = art[i].or(slack[i]).expect("every row has a basic column");
    }
    // column initially holding e_i, for reading multipliers
    let unit_col: Vec<usize> = (0..m).map(|i| art[i].or(slack[i]).unwrap()).collect();

    let mut t = Tableau {
        rows,
        rhs,
        obj: Vec::new(),
        obj_val: Rational::zero(),
        basis,
        iterations: 0,
        cap: iteration_cap,
    };

    // phase one: maximise -sum(artificials)
    let mut cost1 = vec![Rational::zero(); ncols];
    for a in art.iter().flatten() {
        cost1[*a] = -Rational::one();
    }
    t.price(&cost1);
    t.run(&|_| true)?;
    if t.obj_val.is_negative() {
        let duals = (0..m).map(|i| (&t.obj[unit_col[i]] + &cost1[unit_col[i]]) * &sign[i]).collect();
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            x: vec![Rational::zero(); n],
            duals,
            certified: true,
            method: Method::Exact,
            iterations: t.iterations,
        });
    }
    // drive artificials out of the basis; drop rows that are redundant
    let mut keep = vec![true; t.rows.len()];
    for i in 0..t.rows.len() {
        if t.basis[i] >= art_start {
            match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => keep[i] = false,
            }
        }
    }
    {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut basis = Vec::new();
        for i in 0..m {
            if keep[i] {
                rows.push(std::mem::take(&mut t.rows[i]));
                rhs.push(t.rhs[i].clone());
                basis.push(t.basis[i]);
            }
        }
        t.rows = rows;
        t.rhs = rhs;
        t.basis = basis;
    }

    // phase two
    let mut cost2 = vec![Rational::zero(); ncols];
    for (j, c) in &lp.objective {
        cost2[*j] += c;
    }
    t.price(&cost2);
    let outcome = t.run(&|j| j < art_start)?;
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].clone();
        }
    }
    // the unit column of row i holds column i of the row-combination matrix, even for
    // dropped rows, so its reduced cost is that row's multiplier
    let duals: Vec<Rational> = (0..m).map(|i| &t.obj[unit_col[i]] * &sign[i]).collect();
    Ok(match outcome {
        Outcome::Unbounded => LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            x,
            duals: vec![Rational::zero(); m],
            certified: true,
            method: Method::Exact,
            iterations: t.iterations,
        },
        Outcome::Optimal => LpSolution {
            status: LpStatus::Optimal,
            value: Some(t.obj_val.clone()),
            x,
            duals,
            certified: true,
            method: Method::Exact,
            iterations: t.iterations,
        },
    })
}
