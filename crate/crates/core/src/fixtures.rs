//! Standard left- and right-hand structures: the vertex cover and independent set
//! encodings, colouring and clique families, grids, and seeded random generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::structure::{Signature, TupleIter, ValuedStructure};
use crate::value::{int, rat, ExtRat, Rational};

/// Binary `f` plus unary `u`.
pub fn sig_fu() -> Signature {
    Signature::of(&[("f", 2), ("u", 1)])
}

/// A single binary symbol `f`.
pub fn sig_f() -> Signature {
    Signature::of(&[("f", 2)])
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Left structure over `sig_fu` with `f(u, v) = edge_w` for each edge `u < v`
/// and, when given, `u(v) = unary_w` everywhere.
pub fn from_graph(
    g: &Graph,
    ids: Vec<String>,
    edge_w: &Rational,
    unary_w: Option<&Rational>,
) -> ValuedStructure {
    let mut a = ValuedStructure::empty_left(sig_fu(), ids).expect("distinct ids");
    for (u, v) in g.edges() {
        a.set(0, vec![u, v], ExtRat::Finite(edge_w.clone())).unwrap();
    }
    for &v in g.loops() {
        a.set(0, vec![v, v], ExtRat::Finite(edge_w.clone())).unwrap();
    }
    if let Some(w) = unary_w {
        for v in 0..g.len() {
            a.set(1, vec![v], ExtRat::Finite(w.clone())).unwrap();
        }
    }
    a
}

/// Like [`from_graph`] but over the single-symbol signature `sig_f`.
pub fn edges_only(g: &Graph, ids: Vec<String>, edge_w: &Rational) -> ValuedStructure {
    let mut a = ValuedStructure::empty_left(sig_f(), ids).expect("distinct ids");
    for (u, v) in g.edges() {
        a.set(0, vec![u, v], ExtRat::Finite(edge_w.clone())).unwrap();
    }
    a
}

pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle_graph(n: usize) -> Graph {
    let mut g = path_graph(n);
    if n > 2 {
        g.add_edge(n - 1, 0);
    }
    g
}

/// `rows x cols` grid; vertex `(r, c)` has index `r * cols + c`.
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let mut g = Graph::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                g.add_edge(v, v + 1);
            }
            if r + 1 < rows {
                g.add_edge(v, v + cols);
            }
        }
    }
    g
}

pub fn grid_ids(rows: usize, cols: usize) -> Vec<String> {
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| format!("r{r}c{c}")))
        .collect()
}

/// Path `v1 - v2 - ... - vn`.
pub fn path_left(n: usize, edge_w: &Rational, unary_w: Option<&Rational>) -> ValuedStructure {
    from_graph(&path_graph(n), names("v", n), edge_w, unary_w)
}

pub fn cycle_left(n: usize, edge_w: &Rational, unary_w: Option<&Rational>) -> ValuedStructure {
    from_graph(&cycle_graph(n), names("v", n), edge_w, unary_w)
}

/// Grid with unit edges and optional unary weights.
pub fn grid_left(rows: usize, cols: usize, unary_w: Option<&Rational>) -> ValuedStructure {
    from_graph(&grid_graph(rows, cols), grid_ids(rows, cols), &int(1), unary_w)
}

/// Grid plus one vertex adjacent to every grid vertex; the apex is the last element.
pub fn apex_grid_graph(rows: usize, cols: usize) -> Graph {
    let n = rows * cols;
    let mut g = Graph::from_edges(n + 1, &grid_graph(rows, cols).edges());
    for v in 0..n {
        g.add_edge(v, n);
    }
    g
}

pub fn apex_grid_left(rows: usize, cols: usize, unary_w: Option<&Rational>) -> ValuedStructure {
    let mut ids = grid_ids(rows, cols);
    ids.push("apex".into());
    from_graph(&apex_grid_graph(rows, cols), ids, &int(1), unary_w)
}

/// `K_n`: `f(x, y) = 1` for every ordered pair `x != y`.
pub fn clique_left(n: usize) -> ValuedStructure {
    let mut a = ValuedStructure::empty_left(sig_f(), names("v", n)).unwrap();
    for x in 0..n {
        for y in 0..n {
            if x != y {
                a.set(0, vec![x, y], ExtRat::one()).unwrap();
            }
        }
    }
    a
}

/// Clique with loops: loops weigh 1 and ordered pairs `x != y` weigh `1/n`.
pub fn loop_clique(n: usize) -> ValuedStructure {
    let ids = (1..=n).map(|i| i.to_string()).collect();
    let mut a = ValuedStructure::empty_left(sig_f(), ids).unwrap();
    let edge = ExtRat::ratio(1, n as i64);
    for x in 0..n {
        for y in 0..n {
            let w = if x == y { ExtRat::one() } else { edge.clone() };
            a.set(0, vec![x, y], w).unwrap();
        }
    }
    a
}

/// Vertex cover: `f(0,0) = inf`, `u(1) = 1`, all else 0.
pub fn vc_structure() -> ValuedStructure {
    let mut c = ValuedStructure::new(sig_fu(), vec!["0".into(), "1".into()], ExtRat::zero()).unwrap();
    c.set(0, vec![0, 0], ExtRat::PosInf).unwrap();
    c.set(1, vec![1], ExtRat::one()).unwrap();
    c
}

/// Independent set: `f(1,1) = -inf`, `u(1) = 1`, all else 0.
pub fn is_structure() -> ValuedStructure {
    let mut c = ValuedStructure::new(sig_fu(), vec!["0".into(), "1".into()], ExtRat::zero()).unwrap();
    c.set(0, vec![1, 1], ExtRat::NegInf).unwrap();
    c.set(1, vec![1], ExtRat::one()).unwrap();
    c
}

/// Three colours plus an avoided fourth colour `T` that may form monochromatic edges.
pub fn four_coloring_structure() -> ValuedStructure {
    let ids = ["R", "G", "B", "T"].iter().map(|s| s.to_string()).collect();
    let mut c = ValuedStructure::new(sig_fu(), ids, ExtRat::zero()).unwrap();
    for x in 0..3 {
        c.set(0, vec![x, x], ExtRat::PosInf).unwrap();
    }
    c.set(1, vec![3], ExtRat::one()).unwrap();
    c
}

/// Crisp 3-colouring: `f(x, x) = inf`, else 0.
pub fn crisp_k3() -> ValuedStructure {
    let ids = ["r", "g", "b"].iter().map(|s| s.to_string()).collect();
    let mut c = ValuedStructure::new(sig_f(), ids, ExtRat::zero()).unwrap();
    for x in 0..3 {
        c.set(0, vec![x, x], ExtRat::PosInf).unwrap();
    }
    c
}

/// Min-Sol structure on `a < b < c`: `f` infeasible only at `(a, a)`, zero when
/// either side is `c`, 1 otherwise; `u = (0, 1, 3)`.
pub fn three_element_minsol() -> ValuedStructure {
    let ids = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let mut c = ValuedStructure::new(sig_fu(), ids, ExtRat::one()).unwrap();
    c.set(0, vec![0, 0], ExtRat::PosInf).unwrap();
    for x in 0..3 {
        c.set(0, vec![x, 2], ExtRat::zero()).unwrap();
        c.set(0, vec![2, x], ExtRat::zero()).unwrap();
    }
    c.set(1, vec![0], ExtRat::zero()).unwrap();
    c.set(1, vec![1], ExtRat::one()).unwrap();
    c.set(1, vec![2], ExtRat::int(3)).unwrap();
    c
}

/// Colouring with `i` colours `1..=i` and an uncoloured label `bot` (the last element):
/// `-inf` on equal colours, 0 on `(bot, bot)`, 1 otherwise.
pub fn coloring_structure(i: usize) -> ValuedStructure {
    let mut ids: Vec<String> = (1..=i).map(|c| c.to_string()).collect();
    ids.push("bot".into());
    let mut c = ValuedStructure::new(sig_f(), ids, ExtRat::one()).unwrap();
    for x in 0..i {
        c.set(0, vec![x, x], ExtRat::NegInf).unwrap();
    }
    c.set(0, vec![i, i], ExtRat::zero()).unwrap();
    c
}

/// Max-Cut style structure: `f(x, y) = 1` if `x != y`.
pub fn cut_structure() -> ValuedStructure {
    let mut c = ValuedStructure::new(sig_f(), vec!["0".into(), "1".into()], ExtRat::zero()).unwrap();
    c.set(0, vec![0, 1], ExtRat::one()).unwrap();
    c.set(0, vec![1, 0], ExtRat::one()).unwrap();
    c
}

/// Edge-only independent set: `f(1,1) = -inf`, an edge with one endpoint chosen scores 1.
pub fn edge_is_structure() -> ValuedStructure {
    let mut c = cut_structure();
    c.set(0, vec![1, 1], ExtRat::NegInf).unwrap();
    c
}

/// Right structure whose max value on `K_{n+1}` is the clique number of `g`.
/// Domain: the vertices of `g` (`g0`, `g1`, ...), then `star`, then `bot`.
pub fn max_clique_reduction(g: &Graph) -> ValuedStructure {
    let n = g.len();
    let mut ids: Vec<String> = (0..n).map(|v| format!("g{v}")).collect();
    ids.push("star".into());
    ids.push("bot".into());
    let star = n;
    let mut c = ValuedStructure::new(sig_f(), ids, ExtRat::zero()).unwrap();
    for x in 0..n {
        for y in 0..n {
            if x == y || !g.has_edge(x, y) {
                c.set(0, vec![x, y], ExtRat::NegInf).unwrap();
            }
        }
        c.set(0, vec![star, x], ExtRat::one()).unwrap();
    }
    c.set(0, vec![star, star], ExtRat::NegInf).unwrap();
    c
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

fn random_weight(rng: &mut ChaCha8Rng) -> Rational {
    const W: [(i64, i64); 5] = [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2)];
    let (p, q) = W[rng.gen_range(0..W.len())];
    rat(p, q)
}

/// Random left structure on `n` elements. Each possible scope of a symbol
/// (unordered, distinct elements) is present with probability `p` for arity >= 2
/// and 1/2 for unary symbols; argument order and weights are random.
pub fn random_left(n: usize, p: f64, seed: u64, sig: &[(&str, usize)]) -> ValuedStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signature = Signature::of(sig);
    let mut a = ValuedStructure::empty_left(signature.clone(), names("x", n)).unwrap();
    for s in 0..signature.len() {
        let ar = signature.arity(s);
        let prob = if ar == 1 { 0.5 } else { p };
        for scope in TupleIter::new(n, ar).filter(|t| t.windows(2).all(|w| w[0] < w[1])) {
            if rng.gen_bool(prob) {
                let mut args = scope.clone();
                args.shuffle(&mut rng);
                let w = random_weight(&mut rng);
                a.set(s, args, ExtRat::Finite(w)).unwrap();
            }
        }
    }
    a
}

/// Random left structure over all tuples (repeated entries allowed), each positive
/// with probability `p`.
pub fn random_dense(n: usize, p: f64, seed: u64, sig: &[(&str, usize)]) -> ValuedStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signature = Signature::of(sig);
    let mut a = ValuedStructure::empty_left(signature.clone(), names("x", n)).unwrap();
    for s in 0..signature.len() {
        for args in TupleIter::new(n, signature.arity(s)) {
            if rng.gen_bool(p) {
                let w = random_weight(&mut rng);
                a.set(s, args, ExtRat::Finite(w)).unwrap();
            }
        }
    }
    a
}

/// Random left structure over `sig_fu` whose Gaifman graph has treewidth between 1 and
/// `max_tw`, on 4 to `max_n` elements, with a random Max-Sol right structure of size
/// 2 or 3. Returns the structures and the exact treewidth.
pub fn bounded_tw_max_instance(seed: u64, max_n: usize, max_tw: usize) -> (ValuedStructure, ValuedStructure, usize) {
    assert!(max_n >= 4 && max_tw >= 1);
    let sig = [("f", 2), ("u", 1)];
    let n = 4 + (seed as usize) % (max_n - 3);
    let q = 2 + (seed as usize / 7) % 2;
    for attempt in 0u64.. {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let a = random_left(n, 0.45, s, &sig);
        let tw = crate::exact::treedec::treewidth_exact(&crate::graph::gaifman(&a)).expect("small graph");
        if (1..=max_tw).contains(&tw) {
            return (a, random_max_sol(q, &sig, s), tw);
        }
    }
    unreachable!()
}

/// Pair of small random left structures over a common signature, with at most
/// 4 elements each and arity at most 2.
pub fn random_overcast_pair(seed: u64) -> (ValuedStructure, ValuedStructure) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigs: [&[(&str, usize)]; 3] = [&[("f", 2)], &[("f", 2), ("u", 1)], &[("u", 1), ("v", 1)]];
    let sig = sigs[rng.gen_range(0..3)];
    let na = rng.gen_range(1..=4);
    let nb = rng.gen_range(1..=4);
    let p = rng.gen_range(0.2..0.7);
    let a = random_dense(na, p, rng.gen(), sig);
    let b = random_dense(nb, p, rng.gen(), sig);
    (a, b)
}

/// Random instance over `sig_fu` on 1 to `max_n` elements with a random Min-Sol or
/// Max-Sol right structure of size 2 or 3, and the matching mode (`true` = min).
pub fn random_instance(seed: u64, max_n: usize) -> (ValuedStructure, ValuedStructure, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = [("f", 2), ("u", 1)];
    let n = rng.gen_range(1..=max_n);
    let q = rng.gen_range(2..=3);
    let p = rng.gen_range(0.2..0.8);
    let a = random_left(n, p, rng.gen(), &sig);
    let min = rng.gen_bool(0.5);
    let c = if min {
        random_min_sol(q, &sig, rng.gen())
    } else {
        random_max_sol(q, &sig, rng.gen())
    };
    (a, c, min)
}

/// Random left structure over a fixed graph, weights random.
pub fn random_weights_on(g: &Graph, seed: u64, with_unary: bool) -> ValuedStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = ValuedStructure::empty_left(sig_fu(), names("x", g.len())).unwrap();
    for (u, v) in g.edges() {
        let (x, y) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
        a.set(0, vec![x, y], ExtRat::Finite(random_weight(&mut rng))).unwrap();
    }
    if with_unary {
        for v in 0..g.len() {
            if rng.gen_bool(0.7) {
                a.set(1, vec![v], ExtRat::Finite(random_weight(&mut rng))).unwrap();
            }
        }
    }
    a
}

/// Random Min-Sol structure: a hidden random order, feasible and zero sets of
/// every symbol of arity > 1 upward closed in it, unary tables unrestricted.
pub fn random_min_sol(size: usize, sig: &[(&str, usize)], seed: u64) -> ValuedStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signature = Signature::of(sig);
    let mut rank: Vec<usize> = (0..size).collect();
    rank.shuffle(&mut rng);
    let ids = (0..size).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut c = ValuedStructure::new(signature.clone(), ids, ExtRat::zero()).unwrap();
    for s in 0..signature.len() {
        let ar = signature.arity(s);
        let tuples: Vec<Vec<usize>> = TupleIter::new(size, ar).collect();
        if ar == 1 {
            for t in tuples {
                let v = match rng.gen_range(0..6) {
                    0 => ExtRat::PosInf,
                    1 | 2 => ExtRat::zero(),
                    _ => ExtRat::Finite(random_weight(&mut rng)),
                };
                c.set(s, t, v).unwrap();
            }
            continue;
        }
        let le = |x: &[usize], y: &[usize]| x.iter().zip(y).all(|(&a, &b)| rank[a] <= rank[b]);
        let feas_gen: Vec<&Vec<usize>> = tuples.iter().filter(|_| rng.gen_bool(0.3)).collect();
        let opt_gen: Vec<&Vec<usize>> = tuples.iter().filter(|_| rng.gen_bool(0.15)).collect();
        for t in &tuples {
            let feasible = feas_gen.iter().any(|g| le(g, t)) || opt_gen.iter().any(|g| le(g, t));
            let zero = opt_gen.iter().any(|g| le(g, t));
            let v = if zero {
                ExtRat::zero()
            } else if feasible {
                ExtRat::Finite(random_weight(&mut rng))
            } else {
                ExtRat::PosInf
            };
            c.set(s, t.clone(), v).unwrap();
        }
    }
    c
}

/// Random Max-Sol structure with bottom element `bot` (the last element):
/// the `-inf` set of every symbol is closed upward under raising `bot` entries.
pub fn random_max_sol(size: usize, sig: &[(&str, usize)], seed: u64) -> ValuedStructure {
    assert!(size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signature = Signature::of(sig);
    let mut ids: Vec<String> = (0..size - 1).map(|i| format!("c{i}")).collect();
    ids.push("bot".into());
    let bot = size - 1;
    let mut c = ValuedStructure::new(signature.clone(), ids, ExtRat::zero()).unwrap();
    for s in 0..signature.len() {
        let ar = signature.arity(s);
        let tuples: Vec<Vec<usize>> = TupleIter::new(size, ar).collect();
        let bad_gen: Vec<&Vec<usize>> = tuples
            .iter()
            .filter(|t| !t.iter().all(|&x| x == bot) && rng.gen_bool(0.2))
            .collect();
        // x below y: x is y with some entries replaced by bot
        let below = |x: &[usize], y: &[usize]| x.iter().zip(y).all(|(&a, &b)| a == b || a == bot);
        for t in &tuples {
            let v = if bad_gen.iter().any(|g| below(g, t)) {
                ExtRat::NegInf
            } else if rng.gen_bool(0.3) {
                ExtRat::zero()
            } else {
                ExtRat::Finite(random_weight(&mut rng))
            };
            c.set(s, t.clone(), v).unwrap();
        }
    }
    c
}

/// Brute-force clique number, for small graphs.
pub fn max_clique_size(g: &Graph) -> usize {
    let n = g.len();
    assert!(n <= 20);
    let masks = g.masks();
    let mut best = 0;
    for set in 0u64..(1 << n) {
        let k = set.count_ones() as usize;
        if k <= best {
            continue;
        }
        let ok = (0..n)
            .filter(|&v| set & (1 << v) != 0)
            .all(|v| (set & !(1 << v)) & !masks[v] == 0);
        if ok {
            best = k;
        }
    }
    best
}
