use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::norms::NormValue;
use crate::scalar::{fmt_float, pow_enclosure, q, q_to_f64, Enclosure, Q};

/// `Σ c_r √r` over distinct integer radicands with their square factors removed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurdSum {
    terms: BTreeMap<BigInt, Q>,
}

fn split_square(m: &BigInt) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    let mut rest = m.clone();
    let mut p = 2u32;
    while p < 1000 {
        let pp = BigInt::from(p * p);
        if pp > rest {
            break;
        }
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            outside *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        return (outside * r, BigInt::one());
    }
    (outside, rest)
}

impl SurdSum {
    pub fn zero() -> Self {
        SurdSum::default()
    }

    pub fn rational(x: Q) -> Self {
        let mut s = SurdSum::zero();
        s.push(BigInt::one(), x);
        s
    }

    /// `√x` for `x ≥ 0`.
    pub fn sqrt(x: &Q) -> Self {
        assert!(!x.is_negative(), "square root of a negative number");
        let m = x.numer() * x.denom();
        let (outside, inside) = split_square(&m);
        let mut s = SurdSum::zero();
        s.push(inside, Q::new(outside, x.denom().clone()));
        s
    }

    pub fn from_norm(v: &NormValue) -> Option<Self> {
        match v {
            NormValue::Exact(x) => Some(SurdSum::rational(x.clone())),
            NormValue::Squared(s) => Some(SurdSum::sqrt(s)),
            NormValue::Float(_) => None,
        }
    }

    fn push(&mut self, r: BigInt, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(r.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&r);
        }
    }

    pub fn add(&self, other: &SurdSum) -> SurdSum {
        let mut s = self.clone();
        for (r, c) in &other.terms {
            s.push(r.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &SurdSum) -> SurdSum {
        self.add(&other.scale(&q(-1, 1)))
    }

    pub fn scale(&self, k: &Q) -> SurdSum {
        let mut s = SurdSum::zero();
        for (r, c) in &self.terms {
            s.push(r.clone(), c * k);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| q_to_f64(c) * r.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .sum()
    }

    pub fn enclosure(&self, bits: u32) -> Enclosure {
        self.terms.iter().fold(Enclosure::zero(), |acc, (r, c)| {
            let root = pow_enclosure(&Q::from_integer(r.clone()), &q(1, 2), bits);
            acc.add(&root.scale(c))
        })
    }

    /// Sign of the value, refining enclosures until they exclude zero.
    pub fn signum(&self) -> Option<Ordering> {
        if self.is_zero() {
            return Some(Ordering::Equal);
        }
        let mut bits = 64;
        while bits <= 4096 {
            let e = self.enclosure(bits);
            if e.lo.is_positive() {
                return Some(Ordering::Greater);
            }
            if e.hi.is_negative() {
                return Some(Ordering::Less);
            }
            bits *= 2;
        }
        None
    }

    pub fn cmp_exact(&self, other: &SurdSum) -> Option<Ordering> {
        self.sub(other).signum()
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(x) => write!(f, "{x}"),
            None => write!(f, "{}", fmt_float(self.to_f64())),
        }
    }
}

/// A path length: exact as a surd sum for rational and Euclidean norms, a float
/// otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Length {
    Exact(SurdSum),
    Float(f64),
}

impl Length {
    pub fn zero() -> Self {
        Length::Exact(SurdSum::zero())
    }

    pub fn from_norm(v: &NormValue) -> Self {
        SurdSum::from_norm(v).map_or_else(|| Length::Float(v.to_f64()), Length::Exact)
    }

    pub fn add(&self, other: &Length) -> Length {
        match (self, other) {
            (Length::Exact(a), Length::Exact(b)) => Length::Exact(a.add(b)),
            _ => Length::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn scale(&self, k: &Q) -> Length {
        match self {
            Length::Exact(a) => Length::Exact(a.scale(k)),
            Length::Float(x) => Length::Float(x * q_to_f64(k)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Length::Exact(a) => a.to_f64(),
            Length::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Length::Exact(_))
    }

    pub fn as_rational(&self) -> Option<Q> {
        match self {
            Length::Exact(a) => a.as_rational(),
            Length::Float(_) => None,
        }
    }

    /// Exact comparison when both sides are exact, otherwise within the tolerance.
    pub fn le(&self, other: &Length) -> bool {
        match (self, other) {
            (Length::Exact(a), Length::Exact(b)) => a.cmp_exact(b) != Some(Ordering::Greater),
            _ => self.to_f64() <= other.to_f64() + crate::scalar::tolerance(),
        }
    }

    pub fn exact_eq(&self, other: &Length) -> bool {
        matches!((self, other), (Length::Exact(a), Length::Exact(b)) if a == b)
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Exact(a) => write!(f, "{a}"),
            Length::Float(x) => write!(f, "{}", fmt_float(*x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn reduction_and_cancellation() {
        let a = SurdSum::sqrt(&qi(8));
        let b = SurdSum::sqrt(&qi(2)).scale(&qi(2));
        assert_eq!(a, b);
        assert_eq!(SurdSum::sqrt(&q(9, 4)).as_rational(), Some(q(3, 2)));
        assert!(a.sub(&b).is_zero());
        assert_eq!(SurdSum::sqrt(&q(1, 2)), SurdSum::sqrt(&qi(2)).scale(&q(1, 2)));
    }

    #[test]
    fn ordering() {
        let s2 = SurdSum::sqrt(&qi(2));
        let s3 = SurdSum::sqrt(&qi(3));
        assert_eq!(s2.add(&s3).cmp_exact(&SurdSum::rational(q(314, 100))), Some(Ordering::Greater));
        assert_eq!(s2.cmp_exact(&SurdSum::rational(q(141, 100))), Some(Ordering::Greater));
        assert_eq!(s2.cmp_exact(&s2), Some(Ordering::Equal));
        assert!(Length::Exact(s2).le(&Length::Exact(s3)));
    }
}
