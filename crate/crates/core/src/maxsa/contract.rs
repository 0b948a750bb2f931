//! Contraction of a vertex set to a single element, and the overcast witnesses
//! it yields for a fractional modulator.

use num_traits::{One, Signed, Zero};

use crate::duality::{verify_overcast, OvercastDistribution, PartialHom};
use crate::error::{Result, VcspError};
use crate::maxsa::fragile::FractionalModulator;
use crate::structure::{Side, ValuedStructure};
use crate::value::{int, Rational};

#[derive(Clone, Debug)]
pub struct Contraction {
    pub structure: ValuedStructure,
    /// `g_X`: element of `A` to element of the contraction.
    pub map: Vec<usize>,
    /// Index of the contracted element, always last.
    pub star: usize,
}

/// `A/X`: elements outside `X` keep their order, `X` becomes one new element and
/// tuple values are summed over preimages.
pub fn contract(a: &ValuedStructure, x: &[usize]) -> Result<Contraction> {
    a.validate(Side::Left)?;
    let n = a.size();
    let mut in_x = vec![false; n];
    for &v in x {
        if v >= n {
            return Err(VcspError::Input(format!("element {v} outside the domain")));
        }
        in_x[v] = true;
    }
    let mut ids = Vec::new();
    let mut map = vec![0; n];
    for v in 0..n {
        if !in_x[v] {
            map[v] = ids.len();
            ids.push(a.domain()[v].clone());
        }
    }
    let star = ids.len();
    let mut star_id = "*".to_string();
    while ids.contains(&star_id) {
        star_id.push('*');
    }
    ids.push(star_id);
    for v in 0..n {
        if in_x[v] {
            map[v] = star;
        }
    }
    let mut out = ValuedStructure::empty_left(a.signature().clone(), ids)?;
    for (s, args, w) in a.positive_tuples() {
        out.add_weight(s, args.iter().map(|&v| map[v]).collect(), &w)?;
    }
    Ok(Contraction {
        structure: out,
        map,
        star,
    })
}

#[derive(Clone, Debug)]
pub struct PliabilityWitness {
    /// Disjoint union of the contractions `A/X`, each scaled by `π(X)`.
    pub b: ValuedStructure,
    /// `A ⪰ B`: `g_X` with probability `π(X)`.
    pub forward: OvercastDistribution,
    /// `B ⪰ factor·A`: undo every contraction, undefined on the contracted elements.
    /// `None` when the factor is zero.
    pub backward: Option<OvercastDistribution>,
    pub eps: Rational,
    pub arity: usize,
    /// `max(0, 1 - r·eps)`.
    pub factor: Rational,
    /// Offset of each part in `b`.
    pub offsets: Vec<usize>,
}

pub fn pliability_witness(a: &ValuedStructure, pi: &FractionalModulator) -> Result<PliabilityWitness> {
    pi.check_probabilities()?;
    let n = a.size();
    let eps = pi.thinness(n);
    let mut parts = Vec::new();
    let mut maps = Vec::new();
    for (x, p) in &pi.parts {
        let c = contract(a, x)?;
        parts.push(c.structure.rescale(p)?);
        maps.push(c);
    }
    let b = ValuedStructure::disjoint_union(&parts)?;
    let mut offsets = Vec::new();
    let mut off = 0;
    for c in &maps {
        offsets.push(off);
        off += c.structure.size();
    }

    let forward = OvercastDistribution::Explicit(
        maps.iter()
            .zip(&offsets)
            .zip(&pi.parts)
            .map(|((c, off), (_, p))| {
                let g = c.map.iter().map(|&v| Some(off + v)).collect();
                (PartialHom::new(a, &b, g), p.clone())
            })
            .collect(),
    );
    let mut back = vec![None; b.size()];
    for (c, off) in maps.iter().zip(&offsets) {
        for v in 0..n {
            if c.map[v] != c.star {
                back[off + c.map[v]] = Some(v);
            }
        }
    }
    let arity = a.signature().max_arity();
    let factor = Rational::one() - int(arity as i64) * &eps;
    let factor = if factor.is_negative() { Rational::zero() } else { factor };
    let scaled = a.rescale(&factor)?;
    // with a zero factor the claim is vacuous, and no partial homomorphism into a
    // structure without positive tuples exists
    let backward = (!factor.is_zero())
        .then(|| OvercastDistribution::Explicit(vec![(PartialHom::new(&b, &scaled, back), Rational::one())]));
    if !verify_overcast(a, &b, &forward) {
        return Err(VcspError::Bug("forward contraction overcast fails verification".into()));
    }
    if backward.as_ref().is_some_and(|w| !verify_overcast(&b, &scaled, w)) {
        return Err(VcspError::Bug("backward un-contraction overcast fails verification".into()));
    }
    Ok(PliabilityWitness {
        b,
        forward,
        backward,
        eps,
        arity,
        factor,
        offsets,
    })
}
