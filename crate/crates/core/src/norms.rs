//! Finite sequences, `ℓ^p` norms and the inequality toolkit built on them.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::scalar::{
    certify_le, modulus_sq, pow_enclosure, q_to_f64, qi, sqrt_exact, tolerance, Certified,
    ComplexQ, Enclosure, Exponent, Scalar, Q,
};

/// A finite sequence whose entries share one mode.
#[derive(Clone, Debug, PartialEq)]
pub enum SeqVector {
    Exact(Vec<Q>),
    Float(Vec<f64>),
    Complex(Vec<ComplexQ>),
}

impl SeqVector {
    pub fn from_ints(xs: &[i64]) -> Self {
        SeqVector::Exact(xs.iter().map(|&x| qi(x)).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            SeqVector::Exact(v) => v.len(),
            SeqVector::Float(v) => v.len(),
            SeqVector::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moduli as floats.
    pub fn abs_f64(&self) -> Vec<f64> {
        match self {
            SeqVector::Exact(v) => v.iter().map(|x| q_to_f64(&x.abs())).collect(),
            SeqVector::Float(v) => v.iter().map(|x| x.abs()).collect(),
            SeqVector::Complex(v) => v.iter().map(|z| q_to_f64(&modulus_sq(z)).sqrt()).collect(),
        }
    }

    /// Moduli as exact rationals, when every modulus is rational.
    pub fn abs_exact(&self) -> Option<Vec<Q>> {
        match self {
            SeqVector::Exact(v) => Some(v.iter().map(|x| x.abs()).collect()),
            SeqVector::Float(_) => None,
            SeqVector::Complex(v) => v.iter().map(|z| sqrt_exact(&modulus_sq(z))).collect(),
        }
    }

    /// Squared moduli, exact for exact and complex entries.
    pub fn abs_sq_exact(&self) -> Option<Vec<Q>> {
        match self {
            SeqVector::Exact(v) => Some(v.iter().map(|x| x * x).collect()),
            SeqVector::Float(_) => None,
            SeqVector::Complex(v) => Some(v.iter().map(modulus_sq).collect()),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SeqVector) -> Result<SeqVector> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(match (self, other) {
            (SeqVector::Exact(a), SeqVector::Exact(b)) => {
                SeqVector::Exact(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (SeqVector::Complex(a), SeqVector::Complex(b)) => {
                SeqVector::Complex(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (SeqVector::Complex(a), SeqVector::Exact(b))
            | (SeqVector::Exact(b), SeqVector::Complex(a)) => SeqVector::Complex(
                a.iter()
                    .zip(b)
                    .map(|(z, y)| ComplexQ::new(&z.re * y, &z.im * y))
                    .collect(),
            ),
            _ => {
                // Only moduli matter downstream, so mixed float products keep |f||g|.
                let a = self.abs_f64();
                let b = other.abs_f64();
                SeqVector::Float(a.iter().zip(&b).map(|(x, y)| x * y).collect())
            }
        })
    }
}

/// `x^(1/n)` when it is rational.
pub fn exact_root(x: &Q, n: u32) -> Option<Q> {
    if x.is_negative() || n == 0 {
        return None;
    }
    if n == 1 {
        return Some(x.clone());
    }
    let r = |m: &BigInt| {
        let c = num::integer::Roots::nth_root(m, n);
        (num::pow(c.clone(), n as usize) == *m).then_some(c)
    };
    Some(Q::new(r(x.numer())?, r(x.denom())?))
}

fn sum_pow_exact(abs: &[Q], p: u32) -> Q {
    abs.iter().map(|x| num::pow(x.clone(), p as usize)).sum()
}

/// `Σ|v_i|^p`, exact for integer `p` on exact or complex entries with rational moduli
/// (complex entries need even `p`).
pub fn lp_sum_pow(v: &SeqVector, p: &Exponent) -> Result<Scalar> {
    let pf = match p {
        Exponent::Infinity => return domain("no p-th power sum at p = inf"),
        Exponent::Finite(_) => p.to_f64(),
    };
    if let Some(k) = p.as_integer() {
        if k % 2 == 0 {
            if let Some(sq) = v.abs_sq_exact() {
                return Ok(Scalar::Exact(sum_pow_exact(&sq, k / 2)));
            }
        }
        if let Some(abs) = v.abs_exact() {
            return Ok(Scalar::Exact(sum_pow_exact(&abs, k)));
        }
    }
    Ok(Scalar::Float(v.abs_f64().iter().map(|x| x.powf(pf)).sum()))
}

/// `‖v‖_p`; exact at `p ∈ {1, ∞}` for exact input and whenever the root is rational.
pub fn lp_norm(v: &SeqVector, p: &Exponent) -> Result<Scalar> {
    match p {
        Exponent::Infinity => {
            if let Some(sq) = v.abs_sq_exact() {
                let m = sq.into_iter().max().unwrap_or_else(Q::zero);
                return Ok(match sqrt_exact(&m) {
                    Some(r) => Scalar::Exact(r),
                    None => Scalar::Float(q_to_f64(&m).sqrt()),
                });
            }
            Ok(Scalar::Float(v.abs_f64().into_iter().fold(0.0, f64::max)))
        }
        Exponent::Finite(pq) => {
            let s = lp_sum_pow(v, p)?;
            if let (Scalar::Exact(s), true) = (&s, pq.is_integer()) {
                let k = p.as_integer().expect("integer exponent");
                if let Some(r) = exact_root(s, k) {
                    return Ok(Scalar::Exact(r));
                }
            }
            Ok(Scalar::Float(s.to_f64().powf(1.0 / p.to_f64())))
        }
    }
}

/// Rational enclosure of `‖v‖_p` for exact real input and a modest rational `p`.
pub fn lp_norm_enclosure(v: &[Q], p: &Exponent, bits: u32) -> Option<Enclosure> {
    match p {
        Exponent::Infinity => Some(Enclosure::exact(
            v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero),
        )),
        Exponent::Finite(pq) => {
            if pq.numer().bits() > 8 || pq.denom().bits() > 8 {
                return None;
            }
            let s = v.iter().fold(Enclosure::zero(), |acc, x| {
                acc.add(&pow_enclosure(&x.abs(), pq, bits))
            });
            let inv = pq.recip();
            Some(Enclosure {
                lo: pow_enclosure(&s.lo, &inv, bits).lo,
                hi: pow_enclosure(&s.hi, &inv, bits).hi,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub holds: bool,
    pub equality: bool,
    /// Exact verdict on `lhs <= rhs` when the inputs allow one.
    pub certified: Option<Certified>,
}

/// Checks `‖fg‖₁ ≤ ‖f‖_p ‖g‖_q` for conjugate exponents.
pub fn holder_verify(f: &SeqVector, g: &SeqVector, p: &Exponent, q: &Exponent) -> Result<HolderReport> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let one = Q::one();
    if p.reciprocal() > one || q.reciprocal() > one || p.reciprocal() + q.reciprocal() != one {
        return domain(format!("exponents {p} and {q} are not conjugate"));
    }
    let lhs = lp_norm(&f.mul(g)?, &Exponent::int(1))?;
    let rhs = &lp_norm(f, p)? * &lp_norm(g, q)?;
    let certified = match (f, g, &lhs) {
        (SeqVector::Exact(a), SeqVector::Exact(b), Scalar::Exact(l))
            if lp_norm_enclosure(a, p, 8).is_some() && lp_norm_enclosure(b, q, 8).is_some() =>
        {
            Some(certify_le(|bits| {
                let ea = lp_norm_enclosure(a, p, bits).expect("enclosure available");
                let eb = lp_norm_enclosure(b, q, bits).expect("enclosure available");
                (Enclosure::exact(l.clone()), ea.mul_nonneg(&eb))
            }))
        }
        _ => None,
    };
    let holds = match certified {
        Some(Certified::True) => true,
        _ => lhs.le_tol(&rhs),
    };
    let equality = lhs.approx_eq(&rhs);
    Ok(HolderReport {
        lhs,
        rhs,
        holds,
        equality,
        certified,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationReport {
    pub t: Q,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub holds: bool,
}

/// Log-convexity of `p ↦ ‖f‖_p` in `1/p`: `‖f‖_r ≤ ‖f‖_p^t ‖f‖_q^{1-t}`.
pub fn lp_interpolate(f: &SeqVector, p: &Exponent, q: &Exponent, r: &Exponent) -> Result<InterpolationReport> {
    let (ip, iq, ir) = (p.reciprocal(), q.reciprocal(), r.reciprocal());
    if !(ip > ir && ir > iq) {
        return domain(format!("need p < r < q, got p={p}, r={r}, q={q}"));
    }
    let t = (&ir - &iq) / (&ip - &iq);
    let lhs = lp_norm(f, r)?;
    let np = lp_norm(f, p)?;
    let nq = lp_norm(f, q)?;
    let tf = q_to_f64(&t);
    let rhs = match (&np, &nq) {
        (Scalar::Exact(a), Scalar::Exact(b)) if t == Q::new(1.into(), 2.into()) => {
            match sqrt_exact(&(a * b)) {
                Some(s) => Scalar::Exact(s),
                None => Scalar::Float(q_to_f64(&(a * b)).sqrt()),
            }
        }
        _ => Scalar::Float(np.to_f64().powf(tf) * nq.to_f64().powf(1.0 - tf)),
    };
    let holds = lhs.le_tol(&rhs);
    Ok(InterpolationReport { t, lhs, rhs, holds })
}

/// `(a+b)^p ≤ a^p + b^p` for `0 < p ≤ 1`, within the tolerance.
pub fn p_subadditivity_check(a: &Scalar, b: &Scalar, p: &Exponent) -> Result<bool> {
    let one = Exponent::int(1);
    if p.is_infinite() || *p > one {
        return domain(format!("p-subadditivity needs 0 < p <= 1, got {p}"));
    }
    let (af, bf) = (a.to_f64(), b.to_f64());
    if af < 0.0 || bf < 0.0 {
        return domain("p-subadditivity needs nonnegative arguments");
    }
    let pf = p.to_f64();
    Ok((af + bf).powf(pf) <= af.powf(pf) + bf.powf(pf) + tolerance())
}

/// How values in `ℚ^d` are read: reals are `d = 1` under `|·|`, complex numbers are
/// `d = 2` under the Euclidean norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Real,
    Complex,
    Vector,
}

/// A norm value kept in the most exact form available.
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(Q),
    /// The square of the norm, exact.
    Squared(Q),
    Float(f64),
}

impl NormValue {
    /// Normalizes an exact square into `Exact` when its root is rational.
    pub fn from_squared(s: Q) -> NormValue {
        match sqrt_exact(&s) {
            Some(r) => NormValue::Exact(r),
            None => NormValue::Squared(s),
        }
    }

    /// Sum of norm values; exact only when every summand is.
    pub fn sum<'a>(values: impl IntoIterator<Item = &'a NormValue>) -> NormValue {
        let mut exact = Q::zero();
        let mut float = 0.0;
        let mut all_exact = true;
        for v in values {
            float += v.to_f64();
            match v {
                NormValue::Exact(x) => exact += x,
                NormValue::Squared(s) if s.is_zero() => {}
                _ => all_exact = false,
            }
        }
        if all_exact {
            NormValue::Exact(exact)
        } else {
            NormValue::Float(float)
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(x) => q_to_f64(x),
            NormValue::Squared(s) => q_to_f64(s).sqrt(),
            NormValue::Float(x) => *x,
        }
    }

    pub fn to_scalar(&self) -> Scalar {
        match self {
            NormValue::Exact(x) => Scalar::Exact(x.clone()),
            NormValue::Squared(s) => match sqrt_exact(s) {
                Some(r) => Scalar::Exact(r),
                None => Scalar::Float(q_to_f64(s).sqrt()),
            },
            NormValue::Float(x) => Scalar::Float(*x),
        }
    }

    fn squared(&self) -> Option<Q> {
        match self {
            NormValue::Exact(x) => Some(x * x),
            NormValue::Squared(s) => Some(s.clone()),
            NormValue::Float(_) => None,
        }
    }

    /// Exact comparison of `self` against `c · other` for `c >= 0`; `None` in float mode.
    pub fn cmp_scaled(&self, c: &Q, other: &NormValue) -> Option<Ordering> {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => Some(a.cmp(&(c * b))),
            (NormValue::Float(_), _) | (_, NormValue::Float(_)) => None,
            _ => {
                let a = self.squared()?;
                let b = other.squared()?;
                Some(a.cmp(&(c * c * b)))
            }
        }
    }

    /// `self <= c · other`, exact when possible, within the tolerance otherwise.
    pub fn le_scaled(&self, c: &Q, other: &NormValue) -> bool {
        match self.cmp_scaled(c, other) {
            Some(o) => o != Ordering::Greater,
            None => self.to_f64() <= q_to_f64(c) * other.to_f64() + tolerance(),
        }
    }

    pub fn le(&self, other: &NormValue) -> bool {
        self.le_scaled(&Q::one(), other)
    }

    pub fn cmp_value(&self, other: &NormValue) -> Ordering {
        self.cmp_scaled(&Q::one(), other).unwrap_or_else(|| {
            self.to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal)
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NormValue::Exact(x) | NormValue::Squared(x) => x.is_zero(),
            NormValue::Float(x) => *x == 0.0,
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_scalar())
    }
}

/// A norm on `ℚ^d`.
#[derive(Clone, Debug, PartialEq)]
pub enum NormDescriptor {
    Lp(Exponent),
    /// `(Σ w_i |v_i|^p)^{1/p}` with positive weights.
    WeightedLp { p: Exponent, weights: Vec<Q> },
    /// Planar gauge whose unit sphere is the polygon through `±vertices`; the vertices
    /// are listed counterclockwise and span a half turn.
    Table { vertices: Vec<[Q; 2]> },
}

const TABLE_TRIALS: usize = 2000;

impl NormDescriptor {
    pub fn l1() -> Self {
        NormDescriptor::Lp(Exponent::int(1))
    }

    pub fn l2() -> Self {
        NormDescriptor::Lp(Exponent::int(2))
    }

    pub fn linf() -> Self {
        NormDescriptor::Lp(Exponent::Infinity)
    }

    /// Parses `l1`, `l2`, `linf`, `l1.5`, `l3/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('l')
            .or_else(|| s.trim().strip_prefix('L'))
            .ok_or_else(|| Error::Parse(format!("unknown norm {s:?}")))?;
        let p = Exponent::parse(body)?;
        NormDescriptor::lp(p)
    }

    pub fn lp(p: Exponent) -> Result<Self> {
        if p < Exponent::int(1) {
            return domain(format!("l^{p} is not a norm for p < 1"));
        }
        Ok(NormDescriptor::Lp(p))
    }

    pub fn weighted(p: Exponent, weights: Vec<Q>) -> Result<Self> {
        if p < Exponent::int(1) {
            return domain(format!("l^{p} is not a norm for p < 1"));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return domain("weights of a weighted norm must be positive");
        }
        Ok(NormDescriptor::WeightedLp { p, weights })
    }

    /// Builds a table norm, rejecting it when the gauge fails a triangle-inequality trial.
    pub fn table(vertices: Vec<[Q; 2]>) -> Result<Self> {
        if vertices.len() < 2 {
            return domain("a table norm needs at least two vertices");
        }
        let d = NormDescriptor::Table { vertices };
        let ring = d.table_ring();
        for i in 0..ring.len() {
            let (a, b) = (&ring[i], &ring[(i + 1) % ring.len()]);
            if !cross(a, b).is_positive() {
                return domain("table vertices must turn counterclockwise through a half turn");
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e);
        for _ in 0..TABLE_TRIALS {
            let mut draw = || -> [Q; 2] {
                [
                    Q::new(rng.gen_range(-64i64..=64).into(), 16.into()),
                    Q::new(rng.gen_range(-64i64..=64).into(), 16.into()),
                ]
            };
            let (x, y) = (draw(), draw());
            let s = [&x[0] + &y[0], &x[1] + &y[1]];
            let (gx, gy, gs) = (d.table_gauge(&x), d.table_gauge(&y), d.table_gauge(&s));
            if gs > gx.clone() + gy.clone() {
                return Err(Error::Domain(format!(
                    "table gauge violates the triangle inequality at ({}, {}) + ({}, {})",
                    x[0], x[1], y[0], y[1]
                )));
            }
        }
        Ok(d)
    }

    fn table_ring(&self) -> Vec<[Q; 2]> {
        match self {
            NormDescriptor::Table { vertices } => vertices
                .iter()
                .cloned()
                .chain(vertices.iter().map(|v| [-v[0].clone(), -v[1].clone()]))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn table_gauge(&self, x: &[Q]) -> Q {
        if x.iter().all(Zero::is_zero) {
            return Q::zero();
        }
        let ring = self.table_ring();
        let x2 = [x[0].clone(), x[1].clone()];
        for i in 0..ring.len() {
            let (a, b) = (&ring[i], &ring[(i + 1) % ring.len()]);
            if !cross(a, &x2).is_negative() && !cross(&x2, b).is_negative() {
                let det = cross(a, b);
                let n0 = (&b[1] - &a[1]) / &det;
                let n1 = (&a[0] - &b[0]) / &det;
                return n0 * &x2[0] + n1 * &x2[1];
            }
        }
        unreachable!("table ring covers every direction")
    }

    /// Required dimension, if the descriptor fixes one.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            NormDescriptor::Lp(_) => None,
            NormDescriptor::WeightedLp { weights, .. } => Some(weights.len()),
            NormDescriptor::Table { .. } => Some(2),
        }
    }

    pub fn check_dimension(&self, d: usize) -> Result<()> {
        match self.dimension() {
            Some(k) if k != d => Err(Error::LengthMismatch { left: d, right: k }),
            _ => Ok(()),
        }
    }

    /// Whether norms of rational vectors are exact or exactly squared.
    pub fn is_exact(&self) -> bool {
        match self {
            NormDescriptor::Lp(p) | NormDescriptor::WeightedLp { p, .. } => {
                matches!(p.as_integer(), Some(1) | Some(2)) || p.is_infinite()
            }
            NormDescriptor::Table { .. } => true,
        }
    }

    pub fn value(&self, v: &[Q]) -> NormValue {
        let ones;
        let (p, w): (&Exponent, &[Q]) = match self {
            NormDescriptor::Table { .. } => return NormValue::Exact(self.table_gauge(v)),
            NormDescriptor::Lp(p) => {
                ones = vec![Q::one(); v.len()];
                (p, &ones)
            }
            NormDescriptor::WeightedLp { p, weights } => (p, weights),
        };
        match (p, p.as_integer()) {
            (Exponent::Infinity, _) => NormValue::Exact(
                v.iter()
                    .zip(w)
                    .map(|(x, w)| x.abs() * w)
                    .max()
                    .unwrap_or_else(Q::zero),
            ),
            (_, Some(1)) => NormValue::Exact(v.iter().zip(w).map(|(x, w)| x.abs() * w).sum()),
            (_, Some(2)) => NormValue::from_squared(v.iter().zip(w).map(|(x, w)| x * x * w).sum()),
            _ => {
                let vf: Vec<f64> = v.iter().map(q_to_f64).collect();
                NormValue::Float(self.value_f64(&vf))
            }
        }
    }

    pub fn value_f64(&self, v: &[f64]) -> f64 {
        match self {
            NormDescriptor::Table { .. } => {
                // Rational conversion is exact for finite floats.
                let xq: Vec<Q> = v.iter().map(|x| Q::from_float(*x).unwrap_or_else(Q::zero)).collect();
                q_to_f64(&self.table_gauge(&xq))
            }
            NormDescriptor::Lp(p) => float_lp(v, None, p),
            NormDescriptor::WeightedLp { p, weights } => {
                let w: Vec<f64> = weights.iter().map(q_to_f64).collect();
                float_lp(v, Some(&w), p)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            NormDescriptor::Lp(p) => format!("l{p}"),
            NormDescriptor::WeightedLp { p, .. } => format!("weighted-l{p}"),
            NormDescriptor::Table { vertices } => format!("table[{}]", vertices.len()),
        }
    }
}

fn float_lp(v: &[f64], w: Option<&[f64]>, p: &Exponent) -> f64 {
    let wt = |i: usize| w.map_or(1.0, |w| w[i]);
    match p {
        Exponent::Infinity => v
            .iter()
            .enumerate()
            .map(|(i, x)| x.abs() * wt(i))
            .fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let pf = p.to_f64();
            // Scale by the max entry to avoid overflow in |x|^p.
            let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if m == 0.0 {
                return 0.0;
            }
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(i, x)| wt(i) * (x.abs() / m).powf(pf))
                .sum();
            m * s.powf(1.0 / pf)
        }
    }
}

fn cross(a: &[Q; 2], b: &[Q; 2]) -> Q {
    &a[0] * &b[1] - &a[1] * &b[0]
}
