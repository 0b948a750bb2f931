//! Domination, dismantling of `C²` to its diagonal, and paths of adjacent
//! idempotent maps `C² → C`.
//!
//! Elements of `C²` are indexed `c * |C| + d`, matching [`ValuedStructure::product`].

use std::collections::{HashSet, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use crate::classify::classify_min_sol;
use crate::error::{Result, VcspError};
use crate::instance::DenseRight;
use crate::structure::{Side, TupleIter, ValuedStructure};
use crate::value::{fmt_rational, int, ExtRat, Rational};

/// Largest `|C|` for which `C²` is dismantled.
pub const MAX_DIAGONAL_DOMAIN: usize = 8;
/// Largest `|C|` for which dismantling falls back to exhaustive search.
pub const BACKTRACK_DOMAIN: usize = 4;

/// A map `C² → C` as a table indexed by pair index.
pub type PairMap = Vec<usize>;

const ZERO: u8 = 0;
const FINITE: u8 = 1;
const INF: u8 = 2;

fn class(v: &ExtRat) -> u8 {
    match v {
        ExtRat::PosInf => INF,
        v if v.is_zero() => ZERO,
        _ => FINITE,
    }
}

/// `y <= M x` for some `M > 0`, by value class alone.
fn bounded(y: u8, x: u8) -> bool {
    y <= x
}

/// `M = max(1, y/x)` contribution for one finite positive `x`.
fn ratio(y: &ExtRat, x: &ExtRat) -> Option<Rational> {
    match (y, x) {
        (ExtRat::Finite(y), ExtRat::Finite(x)) if !x.is_zero() => Some(y / x),
        _ => None,
    }
}

/// Dense view of a minimisation structure and its square.
struct Square {
    n: usize,
    arities: Vec<usize>,
    dense: DenseRight,
    classes: Vec<Vec<u8>>,
}

impl Square {
    fn new(c: &ValuedStructure) -> Result<Self> {
        c.validate(Side::RightMin)?;
        let dense = DenseRight::new(c);
        let arities = (0..c.signature().len()).map(|s| c.signature().arity(s)).collect();
        let classes = (0..c.signature().len())
            .map(|s| dense.table(s).iter().map(class).collect())
            .collect();
        Ok(Square {
            n: c.size(),
            arities,
            dense,
            classes,
        })
    }

    fn idx<I: IntoIterator<Item = usize>>(&self, it: I) -> usize {
        self.dense.index(it)
    }

    fn class_c(&self, s: usize, xs: &[usize]) -> u8 {
        self.classes[s][self.idx(xs.iter().copied())]
    }

    /// Class of `f^{C²}` at a tuple of pair indices.
    fn class_sq(&self, s: usize, pairs: &[usize]) -> u8 {
        let a = self.classes[s][self.idx(pairs.iter().map(|&p| p / self.n))];
        let b = self.classes[s][self.idx(pairs.iter().map(|&p| p % self.n))];
        a.max(b)
    }

    fn value_c(&self, s: usize, xs: &[usize]) -> &ExtRat {
        self.dense.get(s, xs)
    }

    fn value_sq(&self, s: usize, pairs: &[usize]) -> ExtRat {
        let a = self.dense.get_at(s, self.idx(pairs.iter().map(|&p| p / self.n)));
        let b = self.dense.get_at(s, self.idx(pairs.iter().map(|&p| p % self.n)));
        a.checked_add(b).expect("minimisation values never mix infinities")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominationWitness {
    pub dominated: usize,
    pub dominator: usize,
    #[serde(serialize_with = "ser_rational")]
    pub m: Rational,
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(v))
}

/// Single-position substitution check of `a` by `b` over tuples of `elems`.
/// Returns the least `M >= 1`, or `None` if some substitution turns a finite value
/// infinite or a zero value positive.
fn dominated_in<V, K>(arities: &[usize], elems: &[usize], a: usize, b: usize, class_of: K, value_of: V) -> Option<Rational>
where
    K: Fn(usize, &[usize]) -> u8,
    V: Fn(usize, &[usize]) -> ExtRat,
{
    let mut m = int(1);
    for (s, &ar) in arities.iter().enumerate() {
        for i in 0..ar {
            for rest in TupleIter::new(elems.len(), ar - 1) {
                let mut x: Vec<usize> = rest.iter().map(|&r| elems[r]).collect();
                x.insert(i, a);
                let mut y = x.clone();
                y[i] = b;
                let (cx, cy) = (class_of(s, &x), class_of(s, &y));
                if !bounded(cy, cx) {
                    return None;
                }
                if cx == FINITE {
                    if let Some(r) = ratio(&value_of(s, &y), &value_of(s, &x)) {
                        if r > m {
                            m = r;
                        }
                    }
                }
            }
        }
    }
    Some(m)
}

/// Whether `a` is dominated by `b` in `c`.
pub fn check_dominated(c: &ValuedStructure, a: usize, b: usize) -> Result<Option<DominationWitness>> {
    let sq = Square::new(c)?;
    let elems: Vec<usize> = (0..c.size()).collect();
    Ok(dominated_in(
        &sq.arities,
        &elems,
        a,
        b,
        |s, x| sq.class_c(s, x),
        |s, x| sq.value_c(s, x).clone(),
    )
    .map(|m| DominationWitness {
        dominated: a,
        dominator: b,
        m,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DismantlingSequence {
    /// `|C|`; the sequence acts on `C²`.
    pub base_size: usize,
    pub steps: Vec<DominationWitness>,
    /// Pair indices left at the end, sorted.
    pub remaining: Vec<usize>,
}

struct Dismantler<'a> {
    sq: &'a Square,
    allow_subdiagonal: bool,
}

impl Dismantler<'_> {
    fn is_diag(&self, p: usize) -> bool {
        p / self.sq.n == p % self.sq.n
    }

    fn done(&self, alive: &[usize]) -> bool {
        if self.allow_subdiagonal {
            alive.iter().all(|&p| self.is_diag(p))
        } else {
            alive.len() == self.sq.n && alive.iter().all(|&p| self.is_diag(p))
        }
    }

    /// Removal candidates: non-diagonal elements first, then (sub-diagonal mode) diagonal ones.
    fn candidates(&self, alive: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = alive.iter().copied().filter(|&p| !self.is_diag(p)).collect();
        if self.allow_subdiagonal && alive.len() > 1 {
            out.extend(alive.iter().copied().filter(|&p| self.is_diag(p)));
        }
        out
    }

    fn dominator(&self, alive: &[usize], a: usize) -> Option<DominationWitness> {
        let sq = self.sq;
        alive.iter().filter(|&&b| b != a).find_map(|&b| {
            dominated_in(
                &sq.arities,
                alive,
                a,
                b,
                |s, x| sq.class_sq(s, x),
                |s, x| sq.value_sq(s, x),
            )
            .map(|m| DominationWitness {
                dominated: a,
                dominator: b,
                m,
            })
        })
    }

    fn greedy(&self) -> Option<Vec<DominationWitness>> {
        let mut alive: Vec<usize> = (0..self.sq.n * self.sq.n).collect();
        let mut steps = Vec::new();
        while !self.done(&alive) {
            let step = self
                .candidates(&alive)
                .into_iter()
                .find_map(|a| self.dominator(&alive, a))?;
            alive.retain(|&p| p != step.dominated);
            steps.push(step);
        }
        Some(steps)
    }

    fn backtrack(&self, alive: &mut Vec<usize>, failed: &mut HashSet<Vec<usize>>, steps: &mut Vec<DominationWitness>) -> bool {
        if self.done(alive) {
            return true;
        }
        if failed.contains(alive) {
            return false;
        }
        for a in self.candidates(alive) {
            if let Some(w) = self.dominator(alive, a) {
                let pos = alive.iter().position(|&p| p == a).unwrap();
                alive.remove(pos);
                steps.push(w);
                if self.backtrack(alive, failed, steps) {
                    return true;
                }
                steps.pop();
                alive.insert(pos, a);
            }
        }
        failed.insert(alive.clone());
        false
    }
}

/// Dismantling sequence of `C²` down to its diagonal (or, with `allow_subdiagonal`,
/// to some subset of it). Greedy first; exhaustive search for `|C| <= 4`.
pub fn dismantle_to_diagonal(c: &ValuedStructure, allow_subdiagonal: bool) -> Result<Option<DismantlingSequence>> {
    let n = c.size();
    if n > MAX_DIAGONAL_DOMAIN {
        return Err(VcspError::SizeCap(format!(
            "dismantling needs |C| <= {MAX_DIAGONAL_DOMAIN}, got {n}"
        )));
    }
    let sq = Square::new(c)?;
    let d = Dismantler {
        sq: &sq,
        allow_subdiagonal,
    };
    let steps = d.greedy().or_else(|| {
        if n > BACKTRACK_DOMAIN {
            return None;
        }
        let mut alive: Vec<usize> = (0..n * n).collect();
        let mut steps = Vec::new();
        d.backtrack(&mut alive, &mut HashSet::new(), &mut steps)
            .then_some(steps)
    });
    Ok(steps.map(|steps| {
        let mut remaining: Vec<usize> = (0..n * n).collect();
        remaining.retain(|p| !steps.iter().any(|s| s.dominated == *p));
        DismantlingSequence {
            base_size: n,
            steps,
            remaining,
        }
    }))
}

pub fn is_diagonalisable(c: &ValuedStructure) -> Result<bool> {
    Ok(dismantle_to_diagonal(c, false)?.is_some())
}

fn adjacency_with(sq: &Square, psi: &[usize], phi: &[usize]) -> Option<Rational> {
    let n2 = sq.n * sq.n;
    let mut m = int(1);
    let mut y = Vec::new();
    for (s, &ar) in sq.arities.iter().enumerate() {
        for x in TupleIter::new(n2, ar) {
            let cx = sq.class_sq(s, &x);
            if cx == INF {
                continue;
            }
            let vx = if cx == FINITE { Some(sq.value_sq(s, &x)) } else { None };
            for mask in 0u32..(1 << ar) {
                y.clear();
                y.extend(x.iter().enumerate().map(|(i, &p)| if mask & (1 << i) != 0 { phi[p] } else { psi[p] }));
                if !bounded(sq.class_c(s, &y), cx) {
                    return None;
                }
                if let Some(vx) = &vx {
                    if let Some(r) = ratio(sq.value_c(s, &y), vx) {
                        if r > m {
                            m = r;
                        }
                    }
                }
            }
        }
    }
    Some(m)
}

fn adjacent_fast(sq: &Square, psi: &[usize], phi: &[usize]) -> bool {
    let n2 = sq.n * sq.n;
    let mut y = Vec::new();
    for (s, &ar) in sq.arities.iter().enumerate() {
        for x in TupleIter::new(n2, ar) {
            let cx = sq.class_sq(s, &x);
            if cx == INF {
                continue;
            }
            for mask in 0u32..(1 << ar) {
                y.clear();
                y.extend(x.iter().enumerate().map(|(i, &p)| if mask & (1 << i) != 0 { phi[p] } else { psi[p] }));
                if !bounded(sq.class_c(s, &y), cx) {
                    return false;
                }
            }
        }
    }
    true
}

/// Least `M >= 1` with `f^C(y) <= M f^{C²}(x)` for every tuple `x` of `C²` and every
/// mixture `y_i ∈ {psi(x_i), phi(x_i)}`; `None` if no `M` works.
pub fn adjacency_constant(c: &ValuedStructure, psi: &[usize], phi: &[usize]) -> Result<Option<Rational>> {
    let sq = Square::new(c)?;
    let n2 = c.size() * c.size();
    if psi.len() != n2 || phi.len() != n2 || psi.iter().chain(phi).any(|&v| v >= c.size()) {
        return Err(VcspError::Input("maps must send C² into C".into()));
    }
    Ok(adjacency_with(&sq, psi, phi))
}

pub fn projection(n: usize, which: usize) -> PairMap {
    (0..n * n).map(|p| if which == 1 { p / n } else { p % n }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomPath {
    pub base_size: usize,
    /// `psi_1 = pi_1, ..., psi_l = pi_2`.
    pub maps: Vec<PairMap>,
    /// Adjacency constant of each consecutive pair.
    #[serde(serialize_with = "ser_rationals")]
    pub constants: Vec<Rational>,
    /// `max(1, constants)`.
    #[serde(serialize_with = "ser_rational")]
    pub m: Rational,
    pub idempotent: bool,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&fmt_rational(r))?;
    }
    seq.end()
}

impl HomPath {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `psi_s(c, d)` with `s` counted from 1.
    pub fn apply(&self, s: usize, c: usize, d: usize) -> usize {
        self.maps[s - 1][c * self.base_size + d]
    }

    /// Endpoints, idempotence (when claimed) and adjacency of consecutive maps,
    /// rechecked from scratch.
    pub fn validate(&self, c: &ValuedStructure) -> Result<()> {
        let n = c.size();
        let bug = |m: &str| Err(VcspError::Bug(format!("hom path: {m}")));
        if self.base_size != n || self.maps.is_empty() {
            return bug("wrong base or empty");
        }
        if self.maps[0] != projection(n, 1) || *self.maps.last().unwrap() != projection(n, 2) {
            return bug("endpoints are not the projections");
        }
        let idem = self.maps.iter().all(|f| (0..n).all(|x| f[x * n + x] == x));
        if self.idempotent && !idem {
            return bug("map not idempotent");
        }
        if self.constants.len() + 1 != self.maps.len() {
            return bug("constant count");
        }
        for (i, w) in self.maps.windows(2).enumerate() {
            match adjacency_constant(c, &w[0], &w[1])? {
                Some(m) if m == self.constants[i] => {}
                Some(_) => return bug("adjacency constant mismatch"),
                None => return bug("consecutive maps not adjacent"),
            }
        }
        if self.maps.len() == 1 && adjacency_constant(c, &self.maps[0], &self.maps[0])?.is_none() {
            return bug("single map is not a homomorphism");
        }
        let m = self.constants.iter().fold(int(1), |a, b| if *b > a { b.clone() } else { a });
        if m != self.m {
            return bug("global constant");
        }
        Ok(())
    }
}

fn finish_path(c: &ValuedStructure, mut maps: Vec<PairMap>, idempotent: bool) -> Result<Option<HomPath>> {
    maps.dedup();
    let mut constants = Vec::new();
    for w in maps.windows(2) {
        match adjacency_constant(c, &w[0], &w[1])? {
            Some(m) => constants.push(m),
            None => return Ok(None),
        }
    }
    let m = constants.iter().fold(int(1), |a, b| if *b > a { b.clone() } else { a });
    let path = HomPath {
        base_size: c.size(),
        maps,
        constants,
        m,
        idempotent,
    };
    Ok(path.validate(c).ok().map(|_| path))
}

/// `pi_1∘F_0, ..., pi_1∘F_m, pi_2∘F_m, ..., pi_2∘F_0` for the fold maps `F_i` of a
/// dismantling sequence.
pub fn path_from_dismantling(c: &ValuedStructure, seq: &DismantlingSequence, idempotent: bool) -> Result<Option<HomPath>> {
    let n = c.size();
    let mut f: Vec<usize> = (0..n * n).collect();
    let mut folds = vec![f.clone()];
    for step in &seq.steps {
        for p in f.iter_mut() {
            if *p == step.dominated {
                *p = step.dominator;
            }
        }
        folds.push(f.clone());
    }
    let mut maps: Vec<PairMap> = folds.iter().map(|f| f.iter().map(|&p| p / n).collect()).collect();
    maps.extend(folds.iter().rev().map(|f| f.iter().map(|&p| p % n).collect()));
    finish_path(c, maps, idempotent)
}

/// Path of adjacent idempotent maps from `pi_1` to `pi_2`: `(pi_1, max, pi_2)` for
/// Min-Sol structures, otherwise from the fold maps of a dismantling sequence.
pub fn hom_path(c: &ValuedStructure) -> Result<HomPath> {
    hom_path_with(c, false)
}

/// As [`hom_path`]; with `allow_subdiagonal`, dismantling may end on part of the
/// diagonal, and the resulting maps need not be idempotent.
pub fn hom_path_with(c: &ValuedStructure, allow_subdiagonal: bool) -> Result<HomPath> {
    let n = c.size();
    Square::new(c)?;
    if let Some(order) = classify_min_sol(c)? {
        let mut rank = vec![0; n];
        for (r, &e) in order.iter().enumerate() {
            rank[e] = r;
        }
        let mu: PairMap = (0..n * n)
            .map(|p| {
                let (x, y) = (p / n, p % n);
                if rank[x] >= rank[y] {
                    x
                } else {
                    y
                }
            })
            .collect();
        if let Some(p) = finish_path(c, vec![projection(n, 1), mu, projection(n, 2)], true)? {
            return Ok(p);
        }
    }
    if let Some(seq) = dismantle_to_diagonal(c, false)? {
        return path_from_dismantling(c, &seq, true)?
            .ok_or_else(|| VcspError::Bug("fold-map path failed validation".into()));
    }
    if allow_subdiagonal {
        if let Some(seq) = dismantle_to_diagonal(c, true)? {
            return path_from_dismantling(c, &seq, false)?
                .ok_or_else(|| VcspError::Bug("fold-map path failed validation".into()));
        }
    }
    Err(VcspError::NotDiagonalisable)
}

/// Reference decision procedure for `|C| <= 3`: breadth-first search from `pi_1` to
/// `pi_2` in the graph of idempotent homomorphisms `C² → C` under adjacency.
pub fn link_graph_connected(c: &ValuedStructure) -> Result<bool> {
    let n = c.size();
    if n > 3 {
        return Err(VcspError::SizeCap(format!("link-graph search needs |C| <= 3, got {n}")));
    }
    let sq = Square::new(c)?;
    let off: Vec<usize> = (0..n * n).filter(|p| p / n != p % n).collect();
    let total = n.pow(off.len() as u32);
    let decode = |mut code: usize| -> PairMap {
        let mut f: PairMap = (0..n * n).map(|p| p / n).collect();
        for &p in &off {
            f[p] = code % n;
            code /= n;
        }
        f
    };
    let homs: Vec<PairMap> = (0..total)
        .map(decode)
        .filter(|f| adjacent_fast(&sq, f, f))
        .collect();
    let start = homs.iter().position(|f| *f == projection(n, 1));
    let goal = homs.iter().position(|f| *f == projection(n, 2));
    let (Some(start), Some(goal)) = (start, goal) else {
        return Ok(false);
    };
    let mut seen = vec![false; homs.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if u == goal {
            return Ok(true);
        }
        for v in 0..homs.len() {
            if !seen[v] && adjacent_fast(&sq, &homs[u], &homs[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::Signature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(c: &ValuedStructure, x: usize, y: usize) -> usize {
        x * c.size() + y
    }

    #[test]
    fn domination_is_reflexive() {
        let c = fixtures::three_element_minsol();
        for a in 0..3 {
            assert_eq!(check_dominated(&c, a, a).unwrap().unwrap().m, int(1));
        }
    }

    #[test]
    fn vc_square_domination() {
        let c = fixtures::vc_structure();
        let sq = c.product(&c).unwrap();
        let w = check_dominated(&sq, pair(&c, 0, 1), pair(&c, 1, 1)).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn k3_square_has_no_diagonal_dominator() {
        let c = fixtures::crisp_k3();
        let sq = c.product(&c).unwrap();
        for d in 0..3 {
            assert!(check_dominated(&sq, pair(&c, 0, 1), pair(&c, d, d)).unwrap().is_none());
        }
    }

    #[test]
    fn dismantling_examples() {
        let one = fixtures::vc_structure().restrict(&[0]).unwrap();
        let s = dismantle_to_diagonal(&one, false).unwrap().unwrap();
        assert!(s.steps.is_empty());
        let vc = fixtures::vc_structure();
        let s = dismantle_to_diagonal(&vc, false).unwrap().unwrap();
        let removed: Vec<usize> = s.steps.iter().map(|w| w.dominated).collect();
        assert_eq!(removed, vec![1, 2]);
        assert_eq!(s.remaining, vec![0, 3]);
        assert!(dismantle_to_diagonal(&fixtures::crisp_k3(), false).unwrap().is_none());
        assert!(is_diagonalisable(&vc).unwrap());
        assert!(!is_diagonalisable(&fixtures::crisp_k3()).unwrap());
        assert!(is_diagonalisable(&one).unwrap());
    }

    #[test]
    fn oversized_domain_is_refused() {
        let c = ValuedStructure::new(fixtures::sig_f(), ValuedStructure::numbered_domain(9), ExtRat::zero()).unwrap();
        assert!(dismantle_to_diagonal(&c, false).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let vc = fixtures::vc_structure();
        let p1 = projection(2, 1);
        assert_eq!(adjacency_constant(&vc, &p1, &p1).unwrap(), Some(int(1)));
        let mu: PairMap = (0..4).map(|p| (p / 2).max(p % 2)).collect();
        assert!(adjacency_constant(&vc, &p1, &mu).unwrap().is_some());
        let k3 = fixtures::crisp_k3();
        assert_eq!(adjacency_constant(&k3, &projection(3, 1), &projection(3, 2)).unwrap(), None);
    }

    #[test]
    fn vc_path_has_three_maps() {
        let vc = fixtures::vc_structure();
        let p = hom_path(&vc).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.idempotent);
        p.validate(&vc).unwrap();
        // mixing pi_1 with max on unary u: u(max(x,y)) <= 1 * (u(x) + u(y))
        assert_eq!(p.m, int(1));
    }

    #[test]
    fn singleton_path() {
        let one = fixtures::vc_structure().restrict(&[1]).unwrap();
        let p = hom_path(&one).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn three_element_min_sol_path() {
        let c = fixtures::three_element_minsol();
        let p = hom_path(&c).unwrap();
        assert_eq!(p.len(), 3);
        p.validate(&c).unwrap();
        for (i, w) in p.maps.windows(2).enumerate() {
            assert_eq!(adjacency_constant(&c, &w[0], &w[1]).unwrap().as_ref(), Some(&p.constants[i]));
        }
    }

    #[test]
    fn k3_has_no_path() {
        assert!(matches!(hom_path(&fixtures::crisp_k3()), Err(VcspError::NotDiagonalisable)));
        assert!(!link_graph_connected(&fixtures::crisp_k3()).unwrap());
    }

    #[test]
    fn four_colouring_is_not_diagonalisable() {
        assert!(!is_diagonalisable(&fixtures::four_coloring_structure()).unwrap());
    }

    #[test]
    fn fold_path_validates_for_non_min_sol() {
        // diagonalisable but not Min-Sol: f(0,1) = f(1,0) = inf on a 3-element domain
        // with a universal element 2
        let mut c = ValuedStructure::new(fixtures::sig_f(), ValuedStructure::numbered_domain(3), ExtRat::zero()).unwrap();
        c.set(0, vec![0, 1], ExtRat::PosInf).unwrap();
        c.set(0, vec![1, 0], ExtRat::PosInf).unwrap();
        let diag = is_diagonalisable(&c).unwrap();
        assert_eq!(diag, link_graph_connected(&c).unwrap());
        if diag {
            let seq = dismantle_to_diagonal(&c, false).unwrap().unwrap();
            let p = path_from_dismantling(&c, &seq, true).unwrap().unwrap();
            p.validate(&c).unwrap();
        }
    }

    fn random_structure(size: usize, seed: u64) -> ValuedStructure {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::of(&[("f", 2), ("u", 1)]);
        let mut c = ValuedStructure::new(sig, ValuedStructure::numbered_domain(size), ExtRat::zero()).unwrap();
        for s in 0..2 {
            for t in c.all_tuples(s).collect::<Vec<_>>() {
                let v = match rng.gen_range(0..6) {
                    0 => ExtRat::PosInf,
                    1 | 2 => ExtRat::one(),
                    _ => ExtRat::zero(),
                };
                c.set(s, t, v).unwrap();
            }
        }
        c
    }

    #[test]
    fn decision_matches_link_graph_oracle() {
        let mut yes = 0;
        for seed in 0..60 {
            let size = 1 + seed as usize % 3;
            let c = random_structure(size, seed);
            let d = is_diagonalisable(&c).unwrap();
            assert_eq!(d, link_graph_connected(&c).unwrap(), "seed {seed}");
            if d {
                yes += 1;
                hom_path(&c).unwrap().validate(&c).unwrap();
            }
        }
        assert!(yes > 0);
    }

    #[test]
    fn random_min_sol_structures_are_diagonalisable() {
        for seed in 0..40 {
            let c = fixtures::random_min_sol(2 + seed as usize % 3, &[("f", 2), ("u", 1)], seed);
            let p = hom_path(&c).unwrap();
            assert_eq!(p.len().max(3), 3);
            assert!(is_diagonalisable(&c).unwrap());
        }
    }
}
