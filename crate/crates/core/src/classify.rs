//! Max-Sol and Min-Sol recognition.

use crate::error::{Result, VcspError};
use crate::structure::{Side, TupleIter, ValuedStructure};
use crate::value::ExtRat;

/// Largest domain for which all total orders are searched.
pub const MIN_SOL_MAX_DOMAIN: usize = 8;

/// Least element `c` such that for every symbol, replacing any coordinates of a
/// non-negative tuple by `c` keeps it non-negative. `None` if there is none or the
/// structure is not `Q>=0 u {-inf}`-valued.
pub fn classify_max_sol(c: &ValuedStructure) -> Option<usize> {
    if c.validate(Side::RightMax).is_err() {
        return None;
    }
    (0..c.size()).find(|&bot| is_max_sol_bottom(c, bot))
}

pub fn is_max_sol_bottom(c: &ValuedStructure, bot: usize) -> bool {
    for s in 0..c.signature().len() {
        let ar = c.signature().arity(s);
        for y in c.all_tuples(s) {
            if c.get(s, &y).is_neg_inf() {
                continue;
            }
            for mask in 1u32..(1 << ar) {
                let x: Vec<usize> = (0..ar)
                    .map(|i| if mask & (1 << i) != 0 { bot } else { y[i] })
                    .collect();
                if c.get(s, &x).is_neg_inf() {
                    return false;
                }
            }
        }
    }
    true
}

/// First total order, listed from least to greatest, in lexicographic order of
/// permutations, under which every symbol of arity > 1 has upward-closed feasible
/// and zero sets. Unary symbols are unconstrained.
pub fn classify_min_sol(c: &ValuedStructure) -> Result<Option<Vec<usize>>> {
    let n = c.size();
    if n > MIN_SOL_MAX_DOMAIN {
        return Err(VcspError::SizeCap(format!(
            "Min-Sol order search needs |C| <= {MIN_SOL_MAX_DOMAIN}, got {n}"
        )));
    }
    if c.validate(Side::RightMin).is_err() {
        return Ok(None);
    }
    // Per symbol, the pairs (x, y) differing in one coordinate; checking those suffices
    // because the order on tuples is generated by single-coordinate steps.
    let tables: Vec<(usize, Vec<Vec<usize>>)> = (0..c.signature().len())
        .filter(|&s| c.signature().arity(s) > 1)
        .map(|s| (s, c.all_tuples(s).collect()))
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut rank = vec![0; n];
        for (r, &e) in perm.iter().enumerate() {
            rank[e] = r;
        }
        if tables.iter().all(|(s, ts)| monotone_in(c, *s, ts, &rank)) {
            return Ok(Some(perm));
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn monotone_in(c: &ValuedStructure, s: usize, tuples: &[Vec<usize>], rank: &[usize]) -> bool {
    let n = c.size();
    let mut by_rank = vec![0; n];
    for (e, &r) in rank.iter().enumerate() {
        by_rank[r] = e;
    }
    for x in tuples {
        let vx = c.get(s, x);
        if vx.is_pos_inf() {
            continue;
        }
        for i in 0..x.len() {
            // one step up in coordinate i
            let r = rank[x[i]];
            if r + 1 == n {
                continue;
            }
            let mut y = x.clone();
            y[i] = by_rank[r + 1];
            let vy = c.get(s, &y);
            if vy.is_pos_inf() || (vx.is_zero() && !vy.is_zero()) {
                return false;
            }
        }
    }
    true
}

/// Re-check the two Min-Sol implications over all comparable pairs, without the
/// single-step shortcut. Exponential; for tests on small structures.
pub fn check_min_sol_order(c: &ValuedStructure, order: &[usize]) -> bool {
    let n = c.size();
    let mut rank = vec![0; n];
    for (r, &e) in order.iter().enumerate() {
        rank[e] = r;
    }
    for s in 0..c.signature().len() {
        let ar = c.signature().arity(s);
        if ar <= 1 {
            continue;
        }
        for x in TupleIter::new(n, ar) {
            for y in TupleIter::new(n, ar) {
                if !x.iter().zip(&y).all(|(&a, &b)| rank[a] <= rank[b]) {
                    continue;
                }
                let (vx, vy) = (c.get(s, &x), c.get(s, &y));
                if vx != &ExtRat::PosInf && vy == &ExtRat::PosInf {
                    return false;
                }
                if vx.is_zero() && !vy.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
