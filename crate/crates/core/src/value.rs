//! Exact rational values extended with `+inf` and `-inf`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, VcspError};

pub type Rational = BigRational;

/// A cost value: a reduced rational or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Finite(Rational),
    PosInf,
    NegInf,
}

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtRat::Finite(Rational::one())
    }

    pub fn int(v: i64) -> Self {
        ExtRat::Finite(Rational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        ExtRat::Finite(rat(p, q))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRat::Finite(v) if v.is_zero())
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, ExtRat::PosInf)
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, ExtRat::NegInf)
    }

    /// Strictly positive, including `+inf`.
    pub fn is_positive(&self) -> bool {
        match self {
            ExtRat::Finite(v) => v.is_positive(),
            ExtRat::PosInf => true,
            ExtRat::NegInf => false,
        }
    }

    /// `>= 0`, including `+inf`.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            ExtRat::Finite(v) => !v.is_negative(),
            ExtRat::PosInf => true,
            ExtRat::NegInf => false,
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRat::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Extended addition. `+inf + -inf` is an error.
    pub fn checked_add(&self, other: &ExtRat) -> Result<ExtRat> {
        use ExtRat::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => {
                return Err(VcspError::MixedInfinities(
                    "+inf + -inf is undefined".to_string(),
                ))
            }
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        })
    }

    /// Multiplication by a non-negative finite weight, with `0 * (+-inf) = 0`.
    pub fn scale(&self, w: &Rational) -> ExtRat {
        debug_assert!(!w.is_negative());
        if w.is_zero() {
            return ExtRat::zero();
        }
        match self {
            ExtRat::Finite(v) => ExtRat::Finite(v * w),
            other => other.clone(),
        }
    }

    /// `self / other` for finite `other > 0`.
    pub fn div_finite(&self, other: &Rational) -> ExtRat {
        match self {
            ExtRat::Finite(v) => ExtRat::Finite(v / other),
            x => x.clone(),
        }
    }

    /// Parse the string form used in instance files: `p/q`, `p`, `inf`, `-inf`.
    pub fn parse(s: &str) -> Result<ExtRat> {
        let t = s.trim();
        match t {
            "inf" | "+inf" => return Ok(ExtRat::PosInf),
            "-inf" => return Ok(ExtRat::NegInf),
            _ => {}
        }
        parse_rational(t).map(ExtRat::Finite)
    }
}

impl Default for ExtRat {
    fn default() -> Self {
        ExtRat::zero()
    }
}

impl From<Rational> for ExtRat {
    fn from(v: Rational) -> Self {
        ExtRat::Finite(v)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRat::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(v) => write!(f, "{}", fmt_rational(v)),
            ExtRat::PosInf => write!(f, "inf"),
            ExtRat::NegInf => write!(f, "-inf"),
        }
    }
}

impl FromStr for ExtRat {
    type Err = VcspError;

    fn from_str(s: &str) -> Result<Self> {
        ExtRat::parse(s)
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// `p` or `p/q`, always reduced (BigRational normalises on construction).
pub fn fmt_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || VcspError::Input(format!("malformed rational value {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// Smallest-denominator rational in the closed interval `[lo, hi]`
/// (Stern-Brocot descent). Requires `0 <= lo <= hi`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(!lo.is_negative() && lo <= hi);
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + Rational::one() <= *hi {
        return fl + Rational::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of the fractional parts.
    let lo_f = lo - &fl;
    let hi_f = hi - &fl;
    let inner = simplest_between(&hi_f.recip(), &lo_f.recip());
    fl + inner.recip()
}

/// Nearest "simple" rational to a float, if one lies within `tol`.
/// Used to reconstruct exact values from floating point LP solutions.
pub fn rational_near(x: f64, tol: f64, max_denom: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() <= tol {
        return Some(Rational::zero());
    }
    // continued fraction convergents
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_denom as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1 as f64 / k1 as f64;
        if (approx - x.abs()).abs() <= tol {
            let r = Rational::new(BigInt::from(h1), BigInt::from(k1));
            return Some(if neg { -r } else { r });
        }
        let frac = v - v.floor();
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    None
}

/// A rational `q <= e^{-eps}` with `e^{-eps} - q <= 10^-9`, for rational `eps >= 0`.
pub fn exp_neg_lower(eps: &Rational) -> Rational {
    assert!(!eps.is_negative());
    let tol = rat(1, 1_000_000_000);
    // Upper bound on e^eps: partial sum plus geometric tail bound.
    let mut term = Rational::one();
    let mut sum = Rational::one();
    let mut n: i64 = 0;
    loop {
        n += 1;
        term = term * eps / int(n);
        sum += &term;
        // tail after term n: term * eps/(n+1) / (1 - eps/(n+2))
        let ratio = eps / int(n + 2);
        if ratio < Rational::one() {
            let next = &term * eps / int(n + 1);
            let tail = next / (Rational::one() - ratio);
            let upper = &sum + &tail;
            let q = upper.recip();
            // e^{-eps} in [q, 1/sum]
            let gap = sum.recip() - &q;
            if gap <= &tol / int(4) {
                let lo = &q - rat(1, 4_000_000_000);
                let lo = if lo.is_negative() { Rational::zero() } else { lo };
                return simplest_between(&lo, &q);
            }
        }
        if n > 10_000 {
            return Rational::zero();
        }
    }
}

pub fn ceil_to_i64(v: &Rational) -> i64 {
    let c = v.ceil().to_integer();
    i64::try_from(c).unwrap_or(i64::MAX)
}

pub fn to_f64(v: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-3/4", "inf", "-inf"] {
            assert_eq!(ExtRat::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(ExtRat::parse("6/4").unwrap().to_string(), "3/2");
        assert!(ExtRat::parse("1/0").is_err());
        assert!(ExtRat::parse("x").is_err());
    }

    #[test]
    fn infinity_arithmetic() {
        let inf = ExtRat::PosInf;
        let one = ExtRat::one();
        assert_eq!(one.checked_add(&inf).unwrap(), ExtRat::PosInf);
        assert_eq!(ExtRat::NegInf.checked_add(&one).unwrap(), ExtRat::NegInf);
        assert!(inf.checked_add(&ExtRat::NegInf).is_err());
        assert_eq!(inf.scale(&Rational::zero()), ExtRat::zero());
        assert_eq!(ExtRat::NegInf.scale(&rat(1, 3)), ExtRat::NegInf);
        assert_eq!(ExtRat::int(2).scale(&rat(3, 2)), ExtRat::int(3));
    }

    #[test]
    fn ordering() {
        let mut v = vec![ExtRat::PosInf, ExtRat::int(1), ExtRat::NegInf, ExtRat::ratio(-1, 2)];
        v.sort();
        assert_eq!(
            v,
            vec![ExtRat::NegInf, ExtRat::ratio(-1, 2), ExtRat::int(1), ExtRat::PosInf]
        );
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_between(&rat(3, 10), &rat(34, 100)), rat(1, 3));
        assert_eq!(simplest_between(&rat(5, 2), &rat(5, 2)), rat(5, 2));
    }

    #[test]
    fn reconstruct_float() {
        assert_eq!(rational_near(0.5, 1e-9, 1000), Some(rat(1, 2)));
        assert_eq!(rational_near(-1.0 / 3.0, 1e-9, 1000), Some(rat(-1, 3)));
        assert_eq!(rational_near(1e-12, 1e-9, 1000), Some(Rational::zero()));
    }

    #[test]
    fn exp_lower_bound_is_sound() {
        for (p, q) in [(0, 1), (1, 10), (2, 3), (1, 1), (3, 1)] {
            let e = rat(p, q);
            let lb = exp_neg_lower(&e);
            let f = (-(p as f64) / q as f64).exp();
            let lbf = to_f64(&lb);
            assert!(lbf <= f + 1e-15, "{lbf} > {f}");
            assert!(f - lbf <= 1e-9, "{lbf} too loose vs {f}");
        }
    }
}
