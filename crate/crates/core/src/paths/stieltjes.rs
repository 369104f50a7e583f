use num::{Signed, Zero};

use super::polyline::Polyline;
use super::surd::Length;
use crate::error::{domain, Error, Result};
use crate::norms::NormDescriptor;
use crate::scalar::{parse_rational, qi, Q};

/// A polynomial with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    pub fn eval(&self, t: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
    }

    /// Upper bound for `sup |p'|` on `[lo, hi]`.
    fn derivative_bound(&self, lo: &Q, hi: &Q) -> Q {
        let m = lo.abs().max(hi.abs());
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.abs() * qi(k as i64) * num::pow(m.clone(), k - 1))
            .sum()
    }

    /// Parses sums of terms like `3/2*t^2`, `-t`, `1/4`.
    pub fn parse(s: &str) -> Result<Poly> {
        let bad = |why: &str| Error::Parse(format!("bad polynomial {s:?}: {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            let prev = bytes[i - 1];
            if (bytes[i] == b'+' || bytes[i] == b'-') && prev != b'e' && prev != b'E' && prev != b'^' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut coeffs: Vec<Q> = Vec::new();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (qi(-1), rest),
                None => (qi(1), term.strip_prefix('+').unwrap_or(term)),
            };
            let (coef, power) = match body.find('t') {
                None => (parse_rational(body)?, 0usize),
                Some(pos) => {
                    let head = body[..pos].trim_end_matches('*');
                    let coef = if head.is_empty() { qi(1) } else { parse_rational(head)? };
                    let tail = &body[pos + 1..];
                    let power = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .ok_or_else(|| bad("expected ^ after t"))?
                            .parse::<usize>()
                            .map_err(|_| bad("exponent must be a nonnegative integer"))?
                    };
                    (coef, power)
                }
            };
            if power > 32 {
                return Err(bad("degree above 32"));
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Q::zero());
            }
            coeffs[power] += sign * coef;
        }
        Ok(Poly(coeffs))
    }
}

/// A continuous piecewise polynomial: `pieces[i]` applies up to `breaks[i]`, the last
/// piece thereafter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise {
    breaks: Vec<Q>,
    pieces: Vec<Poly>,
}

impl Piecewise {
    pub fn new(breaks: Vec<Q>, pieces: Vec<Poly>) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::LengthMismatch {
                left: pieces.len(),
                right: breaks.len() + 1,
            });
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return domain("break points must be strictly increasing");
        }
        for (i, b) in breaks.iter().enumerate() {
            if pieces[i].eval(b) != pieces[i + 1].eval(b) {
                return domain(format!("the integrand is discontinuous at {b}"));
            }
        }
        Ok(Piecewise { breaks, pieces })
    }

    pub fn polynomial(p: Poly) -> Self {
        Piecewise {
            breaks: Vec::new(),
            pieces: vec![p],
        }
    }

    /// `"t^2"` or `"t <1/2; 1 - t"`: pieces separated by `;`, each but the last ending
    /// in `<b` to give its right break point.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').collect();
        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            match part.split_once('<') {
                Some((poly, b)) if !last => {
                    pieces.push(Poly::parse(poly)?);
                    breaks.push(parse_rational(b)?);
                }
                None if last => pieces.push(Poly::parse(part)?),
                _ => return Err(Error::Parse(format!("bad piecewise function {s:?}"))),
            }
        }
        Piecewise::new(breaks, pieces)
    }

    fn piece_index(&self, t: &Q) -> usize {
        self.breaks.iter().take_while(|b| t > *b).count()
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.pieces[self.piece_index(t)].eval(t)
    }

    /// Upper bound for the oscillation on `[lo, hi]`.
    pub fn oscillation_bound(&self, lo: &Q, hi: &Q) -> Q {
        let mut cuts = vec![lo.clone()];
        cuts.extend(self.breaks.iter().filter(|b| *b > lo && *b < hi).cloned());
        cuts.push(hi.clone());
        cuts.windows(2)
            .map(|w| {
                let p = &self.pieces[self.piece_index(&((&w[0] + &w[1]) / qi(2)))];
                p.derivative_bound(&w[0], &w[1]) * (&w[1] - &w[0])
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StieltjesSum {
    pub value: Vec<Q>,
    /// `ω_φ(δ)` bound over the mesh cells.
    pub modulus: Q,
    pub length: Length,
    /// `ω_φ(δ) · Λ`.
    pub error_bound: Length,
    pub cells: usize,
    pub sup_phi: Q,
}

/// `Σ φ(r_j) (F(s_j) − F(s_{j−1}))` on a mesh of width at most `δ` that contains every
/// knot, tagged at cell midpoints.
pub fn riemann_stieltjes(phi: &Piecewise, f: &Polyline, mesh: &Q, norm: &NormDescriptor) -> Result<StieltjesSum> {
    if !mesh.is_positive() {
        return domain("mesh must be positive");
    }
    let mut grid: Vec<Q> = vec![f.start().clone()];
    for w in f.knots().windows(2) {
        let span = &w[1] - &w[0];
        let k = (&span / mesh).ceil().to_integer();
        let k: usize = k.try_into().map_err(|_| Error::Guard {
            size: usize::MAX,
            limit: 1 << 20,
            hint: "mesh too fine".into(),
        })?;
        if grid.len() + k > 1 << 20 {
            return Err(Error::Guard {
                size: grid.len() + k,
                limit: 1 << 20,
                hint: "mesh too fine for the path".into(),
            });
        }
        let h = span / qi(k as i64);
        for i in 1..=k {
            grid.push(&w[0] + &h * qi(i as i64));
        }
    }
    let values: Vec<Vec<Q>> = grid.iter().map(|t| f.value_at(t)).collect::<Result<_>>()?;
    let mut value = vec![Q::zero(); f.dim()];
    let mut modulus = Q::zero();
    let mut sup_phi = Q::zero();
    for (w, v) in grid.windows(2).zip(values.windows(2)) {
        let mid = (&w[0] + &w[1]) / qi(2);
        let p = phi.eval(&mid);
        sup_phi = sup_phi.max(p.abs());
        for ((x, a), b) in value.iter_mut().zip(&v[1]).zip(&v[0]) {
            *x += &p * (a - b);
        }
        modulus = modulus.max(phi.oscillation_bound(&w[0], &w[1]));
    }
    let length = super::polyline::path_length(f, norm)?;
    Ok(StieltjesSum {
        value,
        error_bound: length.scale(&modulus),
        modulus,
        length,
        cells: grid.len() - 1,
        sup_phi,
    })
}
