use std::collections::BTreeSet;
use std::fmt;

use num::{Signed, Zero};

use super::surd::Length;
use crate::error::{domain, Error, Result};
use crate::norms::NormDescriptor;
use crate::scalar::{parse_rational, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interp {
    /// Straight segments between knots.
    Linear,
    /// Left-continuous steps: `F = f(t_{i+1})` on `(t_i, t_{i+1}]`.
    JumpLeft,
    /// Right-continuous steps: `F = f(t_i)` on `[t_i, t_{i+1})`.
    JumpRight,
}

impl Interp {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Interp::Linear),
            "jump-left" => Ok(Interp::JumpLeft),
            "jump-right" => Ok(Interp::JumpRight),
            _ => Err(Error::Parse(format!("unknown interpolation {s:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Interp::Linear => "linear",
            Interp::JumpLeft => "jump-left",
            Interp::JumpRight => "jump-right",
        }
    }
}

/// A path `[a,b] → ℚ^d` determined by its values at finitely many knots.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    knots: Vec<Q>,
    points: Vec<Vec<Q>>,
    interp: Interp,
}

impl Polyline {
    pub fn new(knots: Vec<Q>, points: Vec<Vec<Q>>, interp: Interp) -> Result<Self> {
        if knots.len() < 2 {
            return domain("a path needs at least two knots");
        }
        if knots.len() != points.len() {
            return Err(Error::LengthMismatch {
                left: knots.len(),
                right: points.len(),
            });
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return domain("knots must be strictly increasing");
        }
        let d = points[0].len();
        if d == 0 {
            return domain("path values need at least one coordinate");
        }
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::LengthMismatch { left: p.len(), right: d });
        }
        Ok(Polyline { knots, points, interp })
    }

    pub fn scalar(knots: Vec<Q>, values: Vec<Q>, interp: Interp) -> Result<Self> {
        Polyline::new(knots, values.into_iter().map(|v| vec![v]).collect(), interp)
    }

    pub fn knots(&self) -> &[Q] {
        &self.knots
    }

    pub fn points(&self) -> &[Vec<Q>] {
        &self.points
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn start(&self) -> &Q {
        &self.knots[0]
    }

    pub fn end(&self) -> &Q {
        self.knots.last().expect("at least two knots")
    }

    fn check_in_range(&self, t: &Q) -> Result<()> {
        if t < self.start() || t > self.end() {
            return domain(format!("{t} is outside [{}, {}]", self.start(), self.end()));
        }
        Ok(())
    }

    fn knot_index(&self, t: &Q) -> Option<usize> {
        self.knots.binary_search(t).ok()
    }

    /// Index `i` with `t_i ≤ t < t_{i+1}`, clamped to the last segment.
    fn segment(&self, t: &Q) -> usize {
        match self.knots.binary_search(t) {
            Ok(i) => i.min(self.knots.len() - 2),
            Err(i) => i - 1,
        }
    }

    pub fn value_at(&self, t: &Q) -> Result<Vec<Q>> {
        self.check_in_range(t)?;
        if let Some(i) = self.knot_index(t) {
            return Ok(self.points[i].clone());
        }
        let i = self.segment(t);
        Ok(match self.interp {
            Interp::Linear => {
                let s = (t - &self.knots[i]) / (&self.knots[i + 1] - &self.knots[i]);
                self.points[i]
                    .iter()
                    .zip(&self.points[i + 1])
                    .map(|(x, y)| x + &s * (y - x))
                    .collect()
            }
            Interp::JumpRight => self.points[i].clone(),
            Interp::JumpLeft => self.points[i + 1].clone(),
        })
    }

    /// `F(t−)`, with `F(a−) = F(a)`.
    pub fn left_limit(&self, t: &Q) -> Result<Vec<Q>> {
        self.check_in_range(t)?;
        match (self.interp, self.knot_index(t)) {
            (Interp::JumpRight, Some(i)) if i > 0 => Ok(self.points[i - 1].clone()),
            _ => self.value_at(t),
        }
    }

    /// `F(t+)`, with `F(b+) = F(b)`.
    pub fn right_limit(&self, t: &Q) -> Result<Vec<Q>> {
        self.check_in_range(t)?;
        match (self.interp, self.knot_index(t)) {
            (Interp::JumpLeft, Some(i)) if i + 1 < self.knots.len() => Ok(self.points[i + 1].clone()),
            _ => self.value_at(t),
        }
    }

    /// The same path with extra knots inserted.
    pub fn refine(&self, extra: &[Q]) -> Result<Polyline> {
        let mut all: BTreeSet<Q> = self.knots.iter().cloned().collect();
        for t in extra {
            self.check_in_range(t)?;
            all.insert(t.clone());
        }
        let knots: Vec<Q> = all.into_iter().collect();
        let points = knots.iter().map(|t| self.value_at(t)).collect::<Result<_>>()?;
        Polyline::new(knots, points, self.interp)
    }

    /// The path on `[t_i, t_j]` for knot indices `i < j`.
    pub fn between(&self, i: usize, j: usize) -> Result<Polyline> {
        if i >= j || j >= self.knots.len() {
            return domain(format!("knot range {i}..{j} is empty or out of range"));
        }
        Polyline::new(
            self.knots[i..=j].to_vec(),
            self.points[i..=j].to_vec(),
            self.interp,
        )
    }

    /// Applies `g` to every knot value.
    pub fn map_points(&self, g: impl Fn(&[Q]) -> Vec<Q>) -> Result<Polyline> {
        Polyline::new(
            self.knots.clone(),
            self.points.iter().map(|p| g(p)).collect(),
            self.interp,
        )
    }

    fn increments(&self) -> impl Iterator<Item = Vec<Q>> + '_ {
        self.points
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(x, y)| x - y).collect())
    }
}

fn diff(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// `Λ_a^b`, the sum of knot-increment norms.
pub fn path_length(f: &Polyline, norm: &NormDescriptor) -> Result<Length> {
    norm.check_dimension(f.dim())?;
    Ok(f.increments()
        .fold(Length::zero(), |acc, d| acc.add(&Length::from_norm(&norm.value(&d)))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variation {
    pub positive: Q,
    pub negative: Q,
    pub total: Q,
}

/// Positive and negative variation of a scalar path.
pub fn pos_neg_variation(f: &Polyline) -> Result<Variation> {
    if f.dim() != 1 {
        return domain("positive and negative variation need a scalar path");
    }
    let (mut positive, mut negative) = (Q::zero(), Q::zero());
    for d in f.increments() {
        if d[0].is_positive() {
            positive += &d[0];
        } else {
            negative -= &d[0];
        }
    }
    let total = &positive + &negative;
    Ok(Variation {
        positive,
        negative,
        total,
    })
}

/// A subinterval of `[a,b]` with each endpoint open or closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Q, hi: Q, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn closed(lo: Q, hi: Q) -> Self {
        Interval::new(lo, hi, true, true)
    }

    pub fn point(c: Q) -> Self {
        Interval::closed(c.clone(), c)
    }

    /// Parses `[r,t)`, `(r,t]`, `[r,t]` or `(r,t)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad interval {s:?}"));
        let lo_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        Ok(Interval::new(parse_rational(lo)?, parse_rational(hi)?, lo_closed, hi_closed))
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn contains_point(&self, c: &Q) -> bool {
        (c > &self.lo || (c == &self.lo && self.lo_closed)) && (c < &self.hi || (c == &self.hi && self.hi_closed))
    }

    fn contains_gap(&self, p: &Q, q: &Q) -> bool {
        &self.lo <= p && q <= &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// The finitely additive measure `ν` on the interval algebra of `[a,b]` induced by a
/// path through its one-sided limits.
#[derive(Clone, Debug, PartialEq)]
pub struct PathMeasure {
    path: Polyline,
}

enum Piece {
    Point(Q),
    Gap(Q, Q),
}

impl PathMeasure {
    pub fn new(path: Polyline) -> Self {
        PathMeasure { path }
    }

    pub fn path(&self) -> &Polyline {
        &self.path
    }

    /// Splits a finite union of intervals into disjoint points and open gaps between
    /// consecutive endpoints.
    fn pieces(&self, set: &[Interval]) -> Result<Vec<Piece>> {
        let mut cuts: BTreeSet<Q> = BTreeSet::new();
        for iv in set {
            self.path.check_in_range(&iv.lo)?;
            self.path.check_in_range(&iv.hi)?;
            if !iv.is_empty() {
                cuts.insert(iv.lo.clone());
                cuts.insert(iv.hi.clone());
            }
        }
        let cuts: Vec<Q> = cuts.into_iter().collect();
        let live: Vec<&Interval> = set.iter().filter(|iv| !iv.is_empty()).collect();
        let mut out = Vec::new();
        for (k, c) in cuts.iter().enumerate() {
            if live.iter().any(|iv| iv.contains_point(c)) {
                out.push(Piece::Point(c.clone()));
            }
            if let Some(next) = cuts.get(k + 1) {
                if live.iter().any(|iv| iv.contains_gap(c, next)) {
                    out.push(Piece::Gap(c.clone(), next.clone()));
                }
            }
        }
        Ok(out)
    }

    /// `ν` of a finite union of intervals.
    pub fn measure(&self, set: &[Interval]) -> Result<Vec<Q>> {
        let mut acc = vec![Q::zero(); self.path.dim()];
        for piece in self.pieces(set)? {
            let (hi, lo) = match &piece {
                Piece::Point(c) => (self.path.right_limit(c)?, self.path.left_limit(c)?),
                Piece::Gap(p, q) => (self.path.left_limit(q)?, self.path.right_limit(p)?),
            };
            for ((x, h), l) in acc.iter_mut().zip(&hi).zip(&lo) {
                *x += h - l;
            }
        }
        Ok(acc)
    }

    /// The length measure `λ` of the same set: the variation of `F` on each piece.
    pub fn length_measure(&self, set: &[Interval], norm: &NormDescriptor) -> Result<Length> {
        norm.check_dimension(self.path.dim())?;
        let mut total = Length::zero();
        for piece in self.pieces(set)? {
            let chain: Vec<Vec<Q>> = match &piece {
                Piece::Point(c) => vec![self.path.left_limit(c)?, self.path.right_limit(c)?],
                Piece::Gap(p, q) => {
                    let mut chain = vec![self.path.right_limit(p)?];
                    for t in self.path.knots.iter().filter(|t| *t > p && *t < q) {
                        chain.push(self.path.left_limit(t)?);
                        chain.push(self.path.right_limit(t)?);
                    }
                    chain.push(self.path.left_limit(q)?);
                    chain
                }
            };
            for w in chain.windows(2) {
                total = total.add(&Length::from_norm(&norm.value(&diff(&w[1], &w[0]))));
            }
        }
        Ok(total)
    }

    /// `‖ν(A)‖ ≤ λ(A)`.
    pub fn dominated(&self, set: &[Interval], norm: &NormDescriptor) -> Result<bool> {
        let nu = Length::from_norm(&norm.value(&self.measure(set)?));
        Ok(nu.le(&self.length_measure(set, norm)?))
    }
}

pub fn path_measure(f: &Polyline) -> PathMeasure {
    PathMeasure::new(f.clone())
}
