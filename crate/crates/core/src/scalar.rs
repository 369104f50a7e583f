//! Dual-mode scalars: exact rationals where an operation is closed over
//! the rationals, binary64 with a module-wide tolerance elsewhere.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num::{BigInt, BigRational, Complex, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;
pub type ComplexQ = Complex<Q>;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Absolute tolerance used by every float-mode comparison.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

pub fn set_tolerance(tau: f64) {
    assert!(tau.is_finite() && tau >= 0.0, "tolerance must be finite and nonnegative");
    TOLERANCE_BITS.store(tau.to_bits(), AtomicOrdering::Relaxed);
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down to a representable range.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (x.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Exact rational representation of a finite float.
pub fn f64_to_q(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Exact square root when `x` is the square of a rational.
pub fn sqrt_exact(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

pub fn modulus_sq(z: &ComplexQ) -> Q {
    &z.re * &z.re + &z.im * &z.im
}

/// Render a float with 12 significant digits in its shortest form.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}

/// Parses `p/q`, integers, decimals and scientific notation into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad number {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad number {s:?}")));
    }
    let all: BigInt = format!("{int_part}{frac_part}0")
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad number {s:?}")))?
        / BigInt::from(10);
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Q::from_integer(all * num::pow(ten, scale as usize))
    } else {
        Q::new(all, num::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Q),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Q::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            Scalar::Exact(x) => Some(x),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(x) => q_to_f64(x),
            Scalar::Float(x) => *x,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// `self <= other`, exactly when both are exact, within the tolerance otherwise.
    pub fn le_tol(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            _ => self.to_f64() <= other.to_f64() + tolerance(),
        }
    }

    pub fn lt_strict(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a < b,
            _ => self.to_f64() < other.to_f64(),
        }
    }

    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tolerance(),
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        match (&self, &other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if a >= b {
                    self
                } else {
                    other
                }
            }
            _ => Scalar::Float(self.to_f64().max(other.to_f64())),
        }
    }

    /// Nonnegative real power; exact for integer exponents of exact values.
    pub fn powf(&self, p: f64) -> Scalar {
        match self {
            Scalar::Exact(x) if p.fract() == 0.0 && (0.0..=4096.0).contains(&p) => {
                Scalar::Exact(num::pow(x.clone(), p as usize))
            }
            _ => Scalar::Float(self.to_f64().powf(p)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(x) => write!(f, "{x}"),
            Scalar::Float(x) => write!(f, "{}", fmt_float(*x)),
        }
    }
}

impl From<Q> for Scalar {
    fn from(x: Q) -> Self {
        Scalar::Exact(x)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }
}

/// An `ℓ^p` exponent in `(0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Q),
    Infinity,
}

impl Exponent {
    pub fn finite(p: Q) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::Domain(format!("exponent must be positive, got {p}")));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn int(p: i64) -> Self {
        Exponent::finite(qi(p)).expect("positive integer exponent")
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Exponent::finite(q(n, d)).expect("positive rational exponent")
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "Inf" => Ok(Exponent::Infinity),
            other => Exponent::finite(parse_rational(other)?),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => q_to_f64(p),
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Q {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinity => Q::zero(),
        }
    }

    pub fn from_reciprocal(r: &Q) -> Result<Self> {
        if r.is_zero() {
            Ok(Exponent::Infinity)
        } else {
            Exponent::finite(r.recip())
        }
    }

    /// Hölder conjugate, defined for `p >= 1`.
    pub fn conjugate(&self) -> Result<Self> {
        let r = self.reciprocal();
        if r > Q::one() {
            return Err(Error::Domain(format!("no conjugate for exponent {self}")));
        }
        Exponent::from_reciprocal(&(Q::one() - r))
    }

    pub fn as_integer(&self) -> Option<u32> {
        match self {
            Exponent::Finite(p) if p.is_integer() => p.to_integer().to_u32(),
            _ => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        // Larger exponent has the smaller reciprocal.
        Some(other.reciprocal().cmp(&self.reciprocal()))
    }
}

/// A rational interval `[lo, hi]` known to contain an irrational quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: Q,
    pub hi: Q,
}

impl Enclosure {
    pub fn exact(x: Q) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Enclosure::exact(Q::zero())
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Product of two enclosures of nonnegative quantities.
    pub fn mul_nonneg(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn scale(&self, c: &Q) -> Enclosure {
        if c.is_negative() {
            Enclosure {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Enclosure {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        q_to_f64(&((&self.lo + &self.hi) / qi(2)))
    }
}

fn floor_nth_root(m: &BigInt, n: u32) -> BigInt {
    num::integer::Roots::nth_root(m, n)
}

/// Encloses `x^p` for `x >= 0` and rational `p > 0` using `bits` of binary precision.
pub fn pow_enclosure(x: &Q, p: &Q, bits: u32) -> Enclosure {
    assert!(!x.is_negative(), "pow_enclosure needs x >= 0");
    assert!(p.is_positive(), "pow_enclosure needs p > 0");
    if x.is_zero() {
        return Enclosure::zero();
    }
    let a = p.numer().to_usize().expect("exponent numerator fits usize");
    let b = p.denom().to_u32().expect("exponent denominator fits u32");
    let y = num::pow(x.clone(), a);
    if b == 1 {
        return Enclosure::exact(y);
    }
    // y^(1/b) = (n d^(b-1))^(1/b) / d
    let n = y.numer();
    let d = y.denom();
    let scale = BigInt::one() << bits as usize;
    let m = n * num::pow(d.clone(), (b - 1) as usize) * num::pow(scale.clone(), b as usize);
    let r = floor_nth_root(&m, b);
    let den = d * &scale;
    if num::pow(r.clone(), b as usize) == m {
        Enclosure::exact(Q::new(r, den))
    } else {
        Enclosure {
            lo: Q::new(r.clone(), den.clone()),
            hi: Q::new(r + 1, den),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certified {
    True,
    False,
    Undecided,
}

impl Certified {
    pub fn holds(self) -> bool {
        matches!(self, Certified::True)
    }
}

/// Decides `lhs <= rhs` where both sides are produced as enclosures at a requested
/// precision. Precision doubles until the enclosures separate.
pub fn certify_le<F>(mut at_precision: F) -> Certified
where
    F: FnMut(u32) -> (Enclosure, Enclosure),
{
    let mut bits = 64;
    while bits <= 1024 {
        let (l, r) = at_precision(bits);
        if l.hi <= r.lo {
            return Certified::True;
        }
        if l.lo > r.hi {
            return Certified::False;
        }
        if l.is_point() && r.is_point() {
            return if l.lo <= r.lo {
                Certified::True
            } else {
                Certified::False
            };
        }
        bits *= 2;
    }
    Certified::Undecided
}

pub(crate) fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
