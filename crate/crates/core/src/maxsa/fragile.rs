//! Rounding through fractional modulators: pin a random set to the bottom element
//! and solve the remaining bounded-width instance exactly.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::classify::{classify_max_sol, is_max_sol_bottom};
use crate::error::{Result, VcspError};
use crate::exact::{decompose_free, td_solve, Effort, DEFAULT_DP_BUDGET};
use crate::exact::treedec::decompose_induced;
use crate::graph::{gaifman, Graph};
use crate::instance::{Assignment, PartialAssignment};
use crate::structure::{Mode, Side, ValuedStructure};
use crate::value::{int, ExtRat, Rational};

/// Distribution over vertex sets `X` whose removal leaves width at most `width`.
#[derive(Clone, Debug)]
pub struct FractionalModulator {
    pub parts: Vec<(Vec<usize>, Rational)>,
    pub width: usize,
}

impl FractionalModulator {
    pub fn new(parts: Vec<(Vec<usize>, Rational)>, width: usize) -> Result<Self> {
        let parts = parts
            .into_iter()
            .map(|(mut x, p)| {
                x.sort_unstable();
                x.dedup();
                (x, p)
            })
            .collect();
        let m = FractionalModulator { parts, width };
        m.check_probabilities()?;
        Ok(m)
    }

    pub fn check_probabilities(&self) -> Result<()> {
        if self.parts.is_empty() || self.parts.iter().any(|(_, p)| !p.is_positive()) {
            return Err(VcspError::Input("modulator probabilities must be positive".into()));
        }
        let total: Rational = self.parts.iter().map(|(_, p)| p.clone()).sum();
        if total != Rational::one() {
            return Err(VcspError::Input(format!("modulator probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `max_v Pr[v ∈ X]`.
    pub fn thinness(&self, n: usize) -> Rational {
        let mut pr = vec![Rational::zero(); n];
        for (x, p) in &self.parts {
            for &v in x {
                if v < n {
                    pr[v] += p;
                }
            }
        }
        pr.into_iter().max().unwrap_or_else(Rational::zero)
    }

    /// Width upper bound of `G - X` for each part; an error when one exceeds `width`.
    pub fn verify_widths(&self, g: &Graph) -> Result<Vec<usize>> {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, (x, _))| {
                if let Some(&v) = x.iter().find(|&&v| v >= g.len()) {
                    return Err(VcspError::Input(format!("modulator part {i} names vertex {v} outside the domain")));
                }
                let rest: Vec<usize> = (0..g.len()).filter(|v| x.binary_search(v).is_err()).collect();
                let w = decompose_induced(g, &rest, Effort::Heuristic)?.width();
                if w > self.width {
                    return Err(VcspError::Input(format!(
                        "modulator part {i} leaves width {w} > {}",
                        self.width
                    )));
                }
                Ok(w)
            })
            .collect()
    }
}

/// Columns of a `rows x cols` grid (vertex `r*cols + c`) in residue classes mod
/// `period`, one class removed uniformly at random. Thinness `1/period`.
pub fn column_modulator(rows: usize, cols: usize, period: usize) -> FractionalModulator {
    assert!(period >= 1);
    let parts = (0..period)
        .map(|c| {
            let x = (0..rows)
                .flat_map(|r| (0..cols).filter(move |col| col % period == c).map(move |col| r * cols + col))
                .collect();
            (x, Rational::new(1.into(), (period as i64).into()))
        })
        .collect();
    let width = if period == 1 { 0 } else { rows.min(period - 1) };
    FractionalModulator { parts, width }
}

#[derive(Clone, Debug)]
pub struct FragileOutcome {
    pub assignment: Assignment,
    pub value: ExtRat,
    pub best_part: usize,
    pub part_values: Vec<ExtRat>,
    pub bottom: usize,
}

/// Best over the modulator's parts of the exact optimum with the part pinned to the
/// bottom element; at least `(1 - r·eps)·maxval` for an `eps`-thin modulator.
pub fn fragile_solve(
    a: &ValuedStructure,
    c: &ValuedStructure,
    modulator: &FractionalModulator,
    bottom: Option<usize>,
) -> Result<FragileOutcome> {
    a.same_signature(c)?;
    a.validate(Side::Left)?;
    c.validate(Side::RightMax)?;
    modulator.check_probabilities()?;
    let bottom = match bottom {
        Some(b) if b < c.size() && is_max_sol_bottom(c, b) => b,
        Some(b) => return Err(VcspError::Input(format!("element {b} is not a Max-Sol bottom"))),
        None => classify_max_sol(c).ok_or_else(|| VcspError::Input("right structure is not Max-Sol".into()))?,
    };
    modulator.verify_widths(&gaifman(a))?;
    let runs: Vec<(ExtRat, Assignment)> = modulator
        .parts
        .par_iter()
        .map(|(x, _)| {
            let mut rho = PartialAssignment::empty(a.size());
            for &v in x {
                rho.set(v, bottom);
            }
            let td = decompose_free(a, &rho, Effort::Heuristic)?;
            let s = td_solve(a, c, &td, Mode::Max, &rho, DEFAULT_DP_BUDGET)?;
            Ok((s.value, s.assignment))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if Mode::Max.better(&r.0, &runs[best].0) {
            best = i;
        }
    }
    Ok(FragileOutcome {
        assignment: runs[best].1.clone(),
        value: runs[best].0.clone(),
        best_part: best,
        part_values: runs.into_iter().map(|r| r.0).collect(),
        bottom,
    })
}

/// `(1 - r·eps)·opt`, clamped at 0.
pub fn fragile_bound(opt: &Rational, r: usize, eps: &Rational) -> Rational {
    let f = Rational::one() - int(r as i64) * eps;
    if f.is_negative() {
        Rational::zero()
    } else {
        f * opt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_exact;
    use crate::fixtures;
    use crate::instance::value;
    use crate::value::rat;
    use proptest::prelude::*;

    #[test]
    fn grid_is_two_columns() {
        let a = fixtures::grid_left(4, 4, Some(&int(1)));
        let c = fixtures::is_structure();
        let pi = column_modulator(4, 4, 2);
        assert_eq!(pi.thinness(16), rat(1, 2));
        assert_eq!(pi.verify_widths(&gaifman(&a)).unwrap(), vec![1, 1]);
        let out = fragile_solve(&a, &c, &pi, None).unwrap();
        assert!(out.value >= ExtRat::int(4));
        assert_eq!(value(&a, &c, &out.assignment).unwrap(), out.value);
        let opt = solve_exact(&a, &c, Mode::Max, &PartialAssignment::empty(16)).unwrap().value;
        assert_eq!(opt, ExtRat::int(8));
    }

    #[test]
    fn empty_part_is_exact() {
        let a = fixtures::cycle_left(7, &int(1), Some(&int(1)));
        let c = fixtures::is_structure();
        let pi = FractionalModulator::new(vec![(vec![], Rational::one())], 2).unwrap();
        let out = fragile_solve(&a, &c, &pi, Some(0)).unwrap();
        assert_eq!(out.value, ExtRat::int(3));
    }

    #[test]
    fn width_violation_is_reported() {
        let a = fixtures::grid_left(4, 4, None);
        let pi = FractionalModulator::new(vec![(vec![], Rational::one())], 1).unwrap();
        assert!(fragile_solve(&a, &fixtures::is_structure(), &pi, None).is_err());
        assert!(FractionalModulator::new(vec![(vec![0], rat(9, 10))], 1).is_err());
    }

    #[test]
    fn wrong_bottom_is_rejected() {
        let a = fixtures::path_left(3, &int(1), None);
        let pi = FractionalModulator::new(vec![(vec![], Rational::one())], 1).unwrap();
        assert!(fragile_solve(&a, &fixtures::is_structure(), &pi, Some(1)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn union_bound_guarantee(seed in 0u64..5000, rows in 2usize..4, cols in 3usize..6, period in 2usize..4) {
            let g = fixtures::grid_graph(rows, cols);
            let a = fixtures::random_weights_on(&g, seed, true);
            let c = fixtures::random_max_sol(3, &[("f", 2), ("u", 1)], seed);
            let pi = column_modulator(rows, cols, period);
            let out = fragile_solve(&a, &c, &pi, None).unwrap();
            let opt = solve_exact(&a, &c, Mode::Max, &PartialAssignment::empty(a.size())).unwrap().value;
            if let ExtRat::Finite(o) = &opt {
                let bound = fragile_bound(o, 2, &pi.thinness(a.size()));
                prop_assert!(out.value >= ExtRat::Finite(bound));
            }
            prop_assert!(out.value <= opt);
        }
    }
}
