//! Instances, assignments and objective evaluation.

use num_traits::Zero;

use crate::error::{Result, VcspError};
use crate::structure::{Mode, Side, ValuedStructure};
use crate::value::{ExtRat, Rational};

/// Total map from the left domain to the right domain, by element index.
pub type Assignment = Vec<usize>;

/// Partial map from the left domain to the right domain.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PartialAssignment {
    map: Vec<Option<usize>>,
}

impl PartialAssignment {
    pub fn empty(n: usize) -> Self {
        PartialAssignment { map: vec![None; n] }
    }

    pub fn from_total(h: &[usize]) -> Self {
        PartialAssignment {
            map: h.iter().map(|&c| Some(c)).collect(),
        }
    }

    pub fn from_map(map: Vec<Option<usize>>) -> Self {
        PartialAssignment { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.iter().all(Option::is_none)
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.map[v]
    }

    pub fn set(&mut self, v: usize, c: usize) {
        self.map[v] = Some(c);
    }

    pub fn unset(&mut self, v: usize) {
        self.map[v] = None;
    }

    pub fn contains(&self, v: usize) -> bool {
        self.map[v].is_some()
    }

    pub fn dom(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&v| self.map[v].is_some()).collect()
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    pub fn to_total(&self) -> Option<Assignment> {
        self.map.iter().copied().collect()
    }
}

/// A left structure and a right structure over the same signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub left: ValuedStructure,
    pub right: ValuedStructure,
}

impl Instance {
    pub fn new(left: ValuedStructure, right: ValuedStructure) -> Result<Self> {
        left.same_signature(&right)?;
        left.validate(Side::Left)?;
        Ok(Instance { left, right })
    }

    pub fn validate(&self, mode: Mode) -> Result<()> {
        self.left.same_signature(&self.right)?;
        self.left.validate(Side::Left)?;
        self.right.validate(mode.right_side())
    }

    /// Which mode the right side admits; a finite right side admits both.
    pub fn admissible_modes(&self) -> Vec<Mode> {
        [Mode::Min, Mode::Max]
            .into_iter()
            .filter(|m| self.right.validate(m.right_side()).is_ok())
            .collect()
    }
}

/// Right-hand tables stored densely, indexed mixed-radix with the first argument most significant.
#[derive(Clone, Debug)]
pub struct DenseRight {
    n: usize,
    arities: Vec<usize>,
    tables: Vec<Vec<ExtRat>>,
}

impl DenseRight {
    pub fn new(c: &ValuedStructure) -> Self {
        let n = c.size();
        let mut arities = Vec::new();
        let mut tables = Vec::new();
        for s in 0..c.signature().len() {
            arities.push(c.signature().arity(s));
            tables.push(c.all_tuples(s).map(|x| c.get(s, &x).clone()).collect());
        }
        DenseRight { n, arities, tables }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.arities[sym]
    }

    pub fn index<I: IntoIterator<Item = usize>>(&self, args: I) -> usize {
        args.into_iter().fold(0, |acc, a| acc * self.n + a)
    }

    pub fn get(&self, sym: usize, args: &[usize]) -> &ExtRat {
        &self.tables[sym][self.index(args.iter().copied())]
    }

    pub fn get_at(&self, sym: usize, idx: usize) -> &ExtRat {
        &self.tables[sym][idx]
    }

    pub fn table(&self, sym: usize) -> &[ExtRat] {
        &self.tables[sym]
    }
}

/// A left tuple with positive weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTuple {
    pub sym: usize,
    pub args: Vec<usize>,
    pub weight: Rational,
}

impl WeightedTuple {
    /// Distinct elements of the scope, sorted.
    pub fn scope(&self) -> Vec<usize> {
        let mut s = self.args.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

pub fn weighted_tuples(a: &ValuedStructure) -> Vec<WeightedTuple> {
    a.positive_tuples()
        .into_iter()
        .map(|(sym, args, weight)| WeightedTuple { sym, args, weight })
        .collect()
}

/// `sum w * f(h(x))` over the given tuples; `h` maps left indices to right indices.
pub fn eval_tuples<'a, I, H>(tuples: I, right: &DenseRight, h: H) -> Result<ExtRat>
where
    I: IntoIterator<Item = &'a WeightedTuple>,
    H: Fn(usize) -> usize,
{
    let mut total = ExtRat::zero();
    for t in tuples {
        let v = right.get_at(t.sym, right.index(t.args.iter().map(|&a| h(a))));
        total = total.checked_add(&v.scale(&t.weight))?;
    }
    Ok(total)
}

/// `val(h) = sum over tup(A) of f^A(x) * f^C(h(x))`.
pub fn value(a: &ValuedStructure, c: &ValuedStructure, h: &[usize]) -> Result<ExtRat> {
    a.same_signature(c)?;
    if h.len() != a.size() {
        return Err(VcspError::Input(format!(
            "assignment has {} entries, left domain has {}",
            h.len(),
            a.size()
        )));
    }
    if let Some(bad) = h.iter().find(|&&x| x >= c.size()) {
        return Err(VcspError::Input(format!("image {bad} outside the right domain")));
    }
    let mut total = ExtRat::zero();
    for (sym, args, w) in a.positive_tuples() {
        let img: Vec<usize> = args.iter().map(|&x| h[x]).collect();
        let v = c.get(sym, &img).scale(&w);
        total = total.checked_add(&v).map_err(|_| {
            let ids: Vec<&str> = args.iter().map(|&x| a.domain()[x].as_str()).collect();
            VcspError::MixedInfinities(format!(
                "tuple {}({}) adds {} to a running total of {}",
                a.signature().symbols()[sym].name,
                ids.join(","),
                v,
                total
            ))
        })?;
    }
    Ok(total)
}

/// `val(rho)`: the contribution of tuples whose scope lies inside `dom(rho)`.
pub fn value_of_partial(
    tuples: &[WeightedTuple],
    right: &DenseRight,
    rho: &PartialAssignment,
) -> Result<ExtRat> {
    let inside = tuples
        .iter()
        .filter(|t| t.args.iter().all(|&a| rho.contains(a)));
    eval_tuples(inside, right, |a| rho.get(a).unwrap())
}

/// Ratio `value / oracle` when both are finite and the oracle is positive.
pub fn ratio(value: &ExtRat, oracle: &ExtRat) -> Option<Rational> {
    match (value, oracle) {
        (ExtRat::Finite(v), ExtRat::Finite(o)) if !o.is_zero() && o > &Rational::zero() => {
            Some(v / o)
        }
        _ => None,
    }
}
