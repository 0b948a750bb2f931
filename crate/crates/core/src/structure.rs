//! Signatures, valued structures and the operations on them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use crate::error::{Result, VcspError};
use crate::value::{ExtRat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(symbols.len());
        for (name, arity) in symbols {
            if arity == 0 {
                return Err(VcspError::Input(format!("symbol {name} has arity 0")));
            }
            if !seen.insert(name.clone()) {
                return Err(VcspError::Input(format!("duplicate symbol {name}")));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Signature { symbols: out })
    }

    /// Convenience constructor for literals in tests and fixtures.
    pub fn of(symbols: &[(&str, usize)]) -> Self {
        Signature::new(symbols.iter().map(|(n, a)| (n.to_string(), *a)).collect())
            .expect("valid signature literal")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.symbols[sym].arity
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

/// Which role a structure plays in an instance, and hence which values it may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Finite, non-negative weights.
    Left,
    /// Non-negative rationals and `+inf`.
    RightMin,
    /// Non-negative rationals and `-inf`.
    RightMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Min,
    Max,
}

impl Mode {
    pub fn right_side(self) -> Side {
        match self {
            Mode::Min => Side::RightMin,
            Mode::Max => Side::RightMax,
        }
    }

    /// Is `a` strictly better than `b` in this mode?
    pub fn better(self, a: &ExtRat, b: &ExtRat) -> bool {
        match self {
            Mode::Min => a < b,
            Mode::Max => a > b,
        }
    }

    pub fn worst(self) -> ExtRat {
        match self {
            Mode::Min => ExtRat::PosInf,
            Mode::Max => ExtRat::NegInf,
        }
    }
}

/// Sparse table for one symbol: explicit entries plus a default value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub default: ExtRat,
    pub entries: BTreeMap<Vec<usize>, ExtRat>,
}

impl Table {
    pub fn new(default: ExtRat) -> Self {
        Table {
            default,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, args: &[usize]) -> &ExtRat {
        self.entries.get(args).unwrap_or(&self.default)
    }
}

/// A valued structure: domain of named elements and one cost table per symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedStructure {
    signature: Signature,
    domain: Vec<String>,
    tables: Vec<Table>,
}

pub type Tuple = Vec<usize>;

impl ValuedStructure {
    /// Empty tables with the given default for every symbol.
    pub fn new(signature: Signature, domain: Vec<String>, default: ExtRat) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for d in &domain {
            if !seen.insert(d) {
                return Err(VcspError::Input(format!("duplicate domain element {d}")));
            }
        }
        let tables = vec![Table::new(default); signature.len()];
        Ok(ValuedStructure {
            signature,
            domain,
            tables,
        })
    }

    /// Left-hand structure with all weights zero.
    pub fn empty_left(signature: Signature, domain: Vec<String>) -> Result<Self> {
        Self::new(signature, domain, ExtRat::zero())
    }

    /// Domain element ids `0..n` as strings, handy for fixtures.
    pub fn numbered_domain(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, sym: usize) -> &Table {
        &self.tables[sym]
    }

    pub fn element(&self, id: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == id)
    }

    pub fn element_index(&self) -> HashMap<&str, usize> {
        self.domain
            .iter()
            .enumerate()
            .map(|(i, d)| (d.as_str(), i))
            .collect()
    }

    pub fn set_default(&mut self, sym: usize, v: ExtRat) {
        self.tables[sym].default = v;
    }

    pub fn set(&mut self, sym: usize, args: Tuple, v: ExtRat) -> Result<()> {
        let arity = self.signature.arity(sym);
        if args.len() != arity {
            return Err(VcspError::Input(format!(
                "tuple for {} has length {}, expected {}",
                self.signature.symbols()[sym].name,
                args.len(),
                arity
            )));
        }
        if let Some(bad) = args.iter().find(|&&a| a >= self.domain.len()) {
            return Err(VcspError::Input(format!("element index {bad} out of domain")));
        }
        self.tables[sym].entries.insert(args, v);
        Ok(())
    }

    /// Set by symbol name and element ids.
    pub fn set_named(&mut self, sym: &str, args: &[&str], v: ExtRat) -> Result<()> {
        let s = self
            .signature
            .index_of(sym)
            .ok_or_else(|| VcspError::Input(format!("unknown symbol {sym}")))?;
        let idx = args
            .iter()
            .map(|a| {
                self.element(a)
                    .ok_or_else(|| VcspError::Input(format!("unknown element {a}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.set(s, idx, v)
    }

    /// Add to the weight of a tuple (left structures).
    pub fn add_weight(&mut self, sym: usize, args: Tuple, w: &Rational) -> Result<()> {
        let cur = self.get(sym, &args).clone();
        let next = cur.checked_add(&ExtRat::Finite(w.clone()))?;
        self.set(sym, args, next)
    }

    pub fn get(&self, sym: usize, args: &[usize]) -> &ExtRat {
        self.tables[sym].get(args)
    }

    /// Every tuple of the symbol's arity over the domain, in lexicographic order.
    pub fn all_tuples(&self, sym: usize) -> TupleIter {
        TupleIter::new(self.domain.len(), self.signature.arity(sym))
    }

    /// All `(symbol, tuple, value)` with value `> 0`, in symbol then tuple order.
    pub fn positive_tuples(&self) -> Vec<(usize, Tuple, Rational)> {
        let mut out = Vec::new();
        for (s, t) in self.tables.iter().enumerate() {
            if t.default.is_zero() || !t.default.is_finite() && !t.default.is_positive() {
                for (args, v) in &t.entries {
                    if let ExtRat::Finite(w) = v {
                        if w.is_positive() {
                            out.push((s, args.clone(), w.clone()));
                        }
                    }
                }
            } else {
                for args in self.all_tuples(s) {
                    if let ExtRat::Finite(w) = t.get(&args) {
                        if w.is_positive() {
                            out.push((s, args.clone(), w.clone()));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self, side: Side) -> Result<()> {
        for (s, t) in self.tables.iter().enumerate() {
            let name = &self.signature.symbols()[s].name;
            let check = |v: &ExtRat, where_: &str| -> Result<()> {
                let ok = match side {
                    Side::Left => v.is_finite() && v.is_nonnegative(),
                    Side::RightMin => v.is_nonnegative(),
                    Side::RightMax => v.is_neg_inf() || (v.is_finite() && v.is_nonnegative()),
                };
                if ok {
                    Ok(())
                } else {
                    let msg = format!("value {v} for {name}{where_} not allowed in a {side:?} structure");
                    if matches!(v, ExtRat::PosInf | ExtRat::NegInf) && side != Side::Left {
                        Err(VcspError::MixedInfinities(msg))
                    } else {
                        Err(VcspError::Input(msg))
                    }
                }
            };
            check(&t.default, " (default)")?;
            for (args, v) in &t.entries {
                let ids: Vec<&str> = args.iter().map(|&a| self.domain[a].as_str()).collect();
                check(v, &format!("({})", ids.join(",")))?;
            }
        }
        Ok(())
    }

    pub fn same_signature(&self, other: &ValuedStructure) -> Result<()> {
        if self.signature != other.signature {
            return Err(VcspError::SignatureMismatch(format!(
                "{:?} vs {:?}",
                self.signature.symbols(),
                other.signature.symbols()
            )));
        }
        Ok(())
    }

    /// `A[X]`: keep only the elements of `X`, renumbered in `X`'s order.
    pub fn restrict(&self, keep: &[usize]) -> Result<ValuedStructure> {
        let mut pos = vec![usize::MAX; self.domain.len()];
        for (i, &x) in keep.iter().enumerate() {
            if x >= self.domain.len() {
                return Err(VcspError::Input(format!("element {x} not in domain")));
            }
            if pos[x] != usize::MAX {
                return Err(VcspError::Input(format!("element {x} repeated")));
            }
            pos[x] = i;
        }
        let domain = keep.iter().map(|&x| self.domain[x].clone()).collect();
        let mut out = ValuedStructure {
            signature: self.signature.clone(),
            domain,
            tables: Vec::with_capacity(self.tables.len()),
        };
        for t in &self.tables {
            let mut nt = Table::new(t.default.clone());
            for (args, v) in &t.entries {
                if args.iter().all(|&a| pos[a] != usize::MAX) {
                    nt.entries
                        .insert(args.iter().map(|&a| pos[a]).collect(), v.clone());
                }
            }
            out.tables.push(nt);
        }
        Ok(out)
    }

    /// Restrict by element ids.
    pub fn restrict_ids(&self, ids: &[&str]) -> Result<ValuedStructure> {
        let idx = ids
            .iter()
            .map(|a| {
                self.element(a)
                    .ok_or_else(|| VcspError::Input(format!("{a} is not a domain element")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.restrict(&idx)
    }

    /// `lambda * A`.
    pub fn rescale(&self, lambda: &Rational) -> Result<ValuedStructure> {
        if lambda.is_negative() {
            return Err(VcspError::Input(format!("negative rescaling factor {lambda}")));
        }
        let mut out = self.clone();
        for t in &mut out.tables {
            t.default = t.default.scale(lambda);
            for v in t.entries.values_mut() {
                *v = v.scale(lambda);
            }
        }
        Ok(out)
    }

    /// `C x D` with values summed; element `(c, d)` has index `c * |D| + d`
    /// and id `"(c,d)"`.
    pub fn product(&self, other: &ValuedStructure) -> Result<ValuedStructure> {
        self.same_signature(other)?;
        let nd = other.size();
        let domain = self
            .domain
            .iter()
            .flat_map(|c| other.domain.iter().map(move |d| format!("({c},{d})")))
            .collect();
        let mut out = ValuedStructure {
            signature: self.signature.clone(),
            domain,
            tables: Vec::with_capacity(self.tables.len()),
        };
        for s in 0..self.signature.len() {
            let default = self.tables[s].default.checked_add(&other.tables[s].default)?;
            let mut nt = Table::new(default.clone());
            for x in self.all_tuples(s) {
                let vx = self.get(s, &x);
                for y in other.all_tuples(s) {
                    let v = vx.checked_add(other.get(s, &y))?;
                    if v != default {
                        let t: Tuple = x.iter().zip(&y).map(|(&a, &b)| a * nd + b).collect();
                        nt.entries.insert(t, v);
                    }
                }
            }
            out.tables.push(nt);
        }
        Ok(out)
    }

    /// Disjoint union. Element ids are tagged `"<i>:<id>"` with the component index.
    /// Cross-component tuples have value 0.
    pub fn disjoint_union(parts: &[ValuedStructure]) -> Result<ValuedStructure> {
        let Some(first) = parts.first() else {
            return Err(VcspError::Input("disjoint union of no structures".into()));
        };
        let signature = first.signature.clone();
        let mut domain = Vec::new();
        let mut offsets = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            first.same_signature(p)?;
            offsets.push(domain.len());
            domain.extend(p.domain.iter().map(|d| format!("{i}:{d}")));
        }
        let mut out = ValuedStructure::empty_left(signature, domain)?;
        for (p, off) in parts.iter().zip(offsets) {
            for s in 0..p.signature.len() {
                let t = &p.tables[s];
                if t.default.is_zero() {
                    for (args, v) in &t.entries {
                        if !v.is_zero() {
                            out.set(s, args.iter().map(|a| a + off).collect(), v.clone())?;
                        }
                    }
                } else {
                    for args in p.all_tuples(s) {
                        let v = t.get(&args);
                        if !v.is_zero() {
                            out.set(s, args.iter().map(|a| a + off).collect(), v.clone())?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Relational view of a minimisation structure: for each symbol `f` two
    /// `{0, inf}`-valued symbols, `f_feas` (finite tuples) and `f_opt` (zero tuples).
    pub fn rel_structure(&self) -> Result<ValuedStructure> {
        self.validate(Side::RightMin)?;
        let mut syms = Vec::new();
        for s in self.signature.symbols() {
            syms.push((format!("{}_feas", s.name), s.arity));
            syms.push((format!("{}_opt", s.name), s.arity));
        }
        let sig = Signature::new(syms)?;
        let mut out = ValuedStructure::new(sig, self.domain.clone(), ExtRat::PosInf)?;
        for s in 0..self.signature.len() {
            for x in self.all_tuples(s) {
                let v = self.get(s, &x);
                if v.is_finite() {
                    out.set(2 * s, x.clone(), ExtRat::zero())?;
                }
                if v.is_zero() {
                    out.set(2 * s + 1, x, ExtRat::zero())?;
                }
            }
        }
        Ok(out)
    }

    /// Tuples of symbol `sym` with value zero (finite values for `feasible = true`).
    pub fn relation(&self, sym: usize, feasible: bool) -> BTreeSet<Tuple> {
        self.all_tuples(sym)
            .filter(|x| {
                let v = self.get(sym, x);
                if feasible {
                    v.is_finite()
                } else {
                    v.is_zero()
                }
            })
            .collect()
    }

    /// Sum of all left weights.
    pub fn total_weight(&self) -> Rational {
        self.positive_tuples()
            .into_iter()
            .fold(Rational::zero(), |acc, (_, _, w)| acc + w)
    }
}

/// Lexicographic iteration over `{0..n}^arity`.
pub struct TupleIter {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl TupleIter {
    pub fn new(n: usize, arity: usize) -> Self {
        TupleIter {
            n,
            cur: vec![0; arity],
            done: n == 0 && arity > 0,
        }
    }
}

impl Iterator for TupleIter {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.cur.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.n {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}
