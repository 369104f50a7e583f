use std::collections::BTreeSet;

use num::{BigInt, One, Signed, Zero};

use super::step::DyadicStep;
use crate::error::{domain, Error, Result};
use crate::scalar::{lcm_of_denominators, q_to_f64, qi, tolerance, Exponent, Scalar, Q};

pub const SIGN_ENUMERATION_GUARD: usize = 20;

/// `r_l` at level `L`: `+1` on `[j 2^{-l}, (j+1) 2^{-l})` for even `j`, `-1` for odd `j`.
pub fn rademacher(l: u32, level: u32) -> Result<DyadicStep> {
    if l == 0 {
        return domain("Rademacher functions are indexed from 1");
    }
    if level < l {
        return domain(format!("level {level} is coarser than r_{l}"));
    }
    let shift = level - l;
    DyadicStep::new(
        level,
        (0..1usize << level)
            .map(|i| if (i >> shift).is_multiple_of(2) { qi(1) } else { qi(-1) })
            .collect(),
    )
}

/// `w_I = Π_{l∈I} r_l` at level `L`; `w_∅ ≡ 1`.
pub fn walsh(set: &[u32], level: u32) -> Result<DyadicStep> {
    let unique: BTreeSet<u32> = set.iter().copied().collect();
    if unique.len() != set.len() {
        return Err(Error::Invalid("Walsh index set has repeated entries".into()));
    }
    let mut w = DyadicStep::constant(qi(1)).relevel(level)?;
    for &l in &unique {
        w = w.mul(&rademacher(l, level)?);
    }
    Ok(w)
}

/// Whether the `2^n` Walsh functions with `I ⊆ {1..n}` have identity Gram matrix.
pub fn walsh_gram_is_identity(n: u32) -> Result<bool> {
    let basis: Vec<DyadicStep> = (0u32..1 << n)
        .map(|mask| {
            let set: Vec<u32> = (1..=n).filter(|l| mask >> (l - 1) & 1 == 1).collect();
            walsh(&set, n)
        })
        .collect::<Result<_>>()?;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let expect = if i == j { qi(1) } else { qi(0) };
            if a.inner(b) != expect {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `∫ r_{l_1} ⋯ r_{l_m}` for levels that may repeat, by summing over the binary
/// digits at the distinct levels, each digit pattern having measure `2^{-k}`.
pub fn product_integral(levels: &[u32]) -> Result<Q> {
    if levels.contains(&0) {
        return domain("Rademacher functions are indexed from 1");
    }
    let mut odd: Vec<u32> = Vec::new();
    let distinct: BTreeSet<u32> = levels.iter().copied().collect();
    for l in &distinct {
        if levels.iter().filter(|&&m| m == *l).count() % 2 == 1 {
            odd.push(*l);
        }
    }
    let k = distinct.len();
    if k > SIGN_ENUMERATION_GUARD {
        return Err(Error::Guard {
            size: k,
            limit: SIGN_ENUMERATION_GUARD,
            hint: "digit patterns are enumerated".into(),
        });
    }
    let positions: Vec<usize> = odd
        .iter()
        .map(|l| distinct.iter().position(|m| m == l).expect("present"))
        .collect();
    let total: i64 = (0u64..1 << k)
        .map(|digits| {
            let ones = positions.iter().filter(|&&i| digits >> i & 1 == 1).count();
            if ones % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .sum();
    Ok(Q::new(total.into(), BigInt::one() << k))
}

/// `Σ_l a_l r_l` at level `max(n, L)`.
pub fn rademacher_sum(a: &[Q], level: u32) -> Result<DyadicStep> {
    let level = level.max(a.len() as u32);
    let mut acc = DyadicStep::constant(Q::zero()).relevel(level)?;
    for (l, c) in a.iter().enumerate() {
        acc = acc.add(&rademacher(l as u32 + 1, level)?.scale(c));
    }
    Ok(acc)
}

/// `Σ_ε |Σ ε_j a_j|^p` over all sign patterns, in integers scaled by a common
/// denominator `D`; returns the sum and `D`.
fn signed_power_sum(a: &[Q], p: u32) -> (BigInt, BigInt) {
    let den = lcm_of_denominators(a);
    let ints: Vec<BigInt> = a.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let n = ints.len();
    if n == 0 {
        return (if p == 0 { BigInt::one() } else { BigInt::zero() }, den);
    }
    let mut s: BigInt = ints.iter().sum();
    let mut positive = vec![true; n];
    let mut total = num::pow(s.abs(), p as usize);
    // Fix the last sign; the pattern and its negation give the same |S|.
    for i in 1u64..(1u64 << (n - 1)) {
        let j = i.trailing_zeros() as usize;
        let two = &ints[j] * 2;
        if positive[j] {
            s -= two;
        } else {
            s += two;
        }
        positive[j] = !positive[j];
        total += num::pow(s.abs(), p as usize);
    }
    (total * 2, den)
}

fn enumerated_moment(a: &[Q], p: u32) -> Q {
    let (sum, den) = signed_power_sum(a, p);
    let patterns = BigInt::one() << a.len();
    Q::new(sum, patterns * num::pow(den, p as usize))
}

/// `E(Σ ε_j a_j)^p` for even `p`, keeping the multinomial terms in which every index
/// occurs an even number of times.
fn multinomial_moment(a: &[Q], p: u32) -> Q {
    let half = (p / 2) as usize;
    // dp[d] = Σ Π a_j^{2k_j} / (2k_j)! over assignments of total degree 2d.
    let mut dp = vec![Q::zero(); half + 1];
    dp[0] = Q::one();
    let mut inv_fact = vec![Q::one(); p as usize + 1];
    for k in 1..=p as usize {
        inv_fact[k] = &inv_fact[k - 1] / qi(k as i64);
    }
    for x in a {
        let sq = x * x;
        let powers: Vec<Q> = (0..=half).scan(Q::one(), |acc, k| {
            let cur = acc.clone();
            *acc *= &sq;
            Some(cur * &inv_fact[2 * k])
        })
        .collect();
        let mut next = vec![Q::zero(); half + 1];
        for (d, v) in dp.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for k in 0..=half - d {
                next[d + k] += v * &powers[k];
            }
        }
        dp = next;
    }
    let fact: Q = (1..=p as i64).map(qi).product();
    fact * &dp[half]
}

/// `3 (Σa²)² − 2 Σa⁴`, the fourth moment in closed form.
pub fn fourth_moment_closed_form(a: &[Q]) -> Q {
    let s2: Q = a.iter().map(|x| x * x).sum();
    let s4: Q = a.iter().map(|x| num::pow(x.clone(), 4)).sum();
    qi(3) * &s2 * &s2 - qi(2) * s4
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub p: u32,
    pub value: Q,
    pub enumeration: Option<Q>,
    pub multinomial: Option<Q>,
    pub agree: bool,
    pub warning: Option<String>,
}

/// `E|Σ ε_j a_j|^p` over uniform random signs, exactly.
pub fn rademacher_moment(a: &[Q], p: u32) -> Result<MomentReport> {
    if p == 0 {
        return domain("moment exponent must be positive");
    }
    let even = p.is_multiple_of(2);
    let enumeration = (a.len() <= SIGN_ENUMERATION_GUARD).then(|| enumerated_moment(a, p));
    let multinomial = even.then(|| multinomial_moment(a, p));
    let value = match (&enumeration, &multinomial) {
        (Some(e), _) => e.clone(),
        (None, Some(m)) => m.clone(),
        (None, None) => {
            return Err(Error::Guard {
                size: a.len(),
                limit: SIGN_ENUMERATION_GUARD,
                hint: "odd moments need sign enumeration".into(),
            })
        }
    };
    let agree = match (&enumeration, &multinomial) {
        (Some(e), Some(m)) => e == m,
        _ => true,
    };
    let warning = (!even).then(|| format!("odd exponent {p}: no multinomial identity, value from enumeration"));
    Ok(MomentReport {
        p,
        value,
        enumeration,
        multinomial,
        agree,
        warning,
    })
}

/// `(p − 1)!!`, the sharp even-moment constant: `E|S|^p ≤ (p−1)!! (Σa²)^{p/2}`.
pub fn even_moment_constant(p: u32) -> Q {
    (1..p as i64).step_by(2).map(qi).product()
}

/// Lower Khintchine constant for `0 < p < 2` from interpolating between `p` and `4`:
/// `(Σa²)^{1/2} ≤ 3^{(2−p)/(2p)} ‖Σ a_l r_l‖_p`.
pub fn lower_constant(p: f64) -> Option<f64> {
    (p > 0.0 && p < 2.0).then(|| 3f64.powf((2.0 - p) / (2.0 * p)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignAverageReport {
    pub n: usize,
    pub p: Exponent,
    /// `E|S|^p`, or `‖S‖_∞` at `p = ∞`.
    pub moment: Scalar,
    /// `(Σa²)^{p/2}`, or `(Σa²)^{1/2}` at `p = ∞`.
    pub comparison: Scalar,
    pub ratio: Scalar,
    pub even_bound: Option<Q>,
    pub within_even_bound: Option<bool>,
    pub lower_constant: Option<f64>,
    pub lower_holds: Option<bool>,
    /// Whether `q ↦ ‖S‖_q` is nondecreasing over the integer exponents up to `p`.
    pub monotone: bool,
}

fn sign_pattern_values(a: &[Q]) -> Vec<Q> {
    let n = a.len();
    (0u64..1u64 << n)
        .map(|mask| {
            a.iter()
                .enumerate()
                .map(|(j, x)| if mask >> j & 1 == 1 { -x.clone() } else { x.clone() })
                .sum()
        })
        .collect()
}

fn float_moment(values: &[f64], p: f64) -> f64 {
    values.iter().map(|s| s.abs().powf(p)).sum::<f64>() / values.len() as f64
}

/// Compares the Rademacher moment with `(Σa²)^{p/2}`.
pub fn khintchine_report(a: &[Q], p: &Exponent) -> Result<SignAverageReport> {
    let n = a.len();
    let s2: Q = a.iter().map(|x| x * x).sum();
    if let Exponent::Infinity = p {
        let sup: Q = a.iter().map(|x| x.abs()).sum();
        let comparison = match crate::scalar::sqrt_exact(&s2) {
            Some(r) => Scalar::Exact(r),
            None => Scalar::Float(q_to_f64(&s2).sqrt()),
        };
        let ratio = match &comparison {
            Scalar::Exact(c) if !c.is_zero() => Scalar::Exact(&sup / c),
            _ => Scalar::Float(q_to_f64(&sup) / comparison.to_f64()),
        };
        return Ok(SignAverageReport {
            n,
            p: p.clone(),
            moment: Scalar::Exact(sup),
            comparison,
            ratio,
            even_bound: None,
            within_even_bound: None,
            lower_constant: None,
            lower_holds: None,
            monotone: true,
        });
    }
    if n > SIGN_ENUMERATION_GUARD {
        return Err(Error::Guard {
            size: n,
            limit: SIGN_ENUMERATION_GUARD,
            hint: "Khintchine reports enumerate sign patterns".into(),
        });
    }
    let pf = p.to_f64();
    let (moment, comparison, even_bound) = match p.as_integer() {
        Some(k) => {
            let m = rademacher_moment(a, k)?.value;
            let (comp, bound) = if k % 2 == 0 {
                let c = num::pow(s2.clone(), (k / 2) as usize);
                (Scalar::Exact(c), Some(even_moment_constant(k)))
            } else {
                (Scalar::Float(q_to_f64(&s2).powf(pf / 2.0)), None)
            };
            (Scalar::Exact(m), comp, bound)
        }
        None => {
            let vals: Vec<f64> = sign_pattern_values(a).iter().map(q_to_f64).collect();
            (
                Scalar::Float(float_moment(&vals, pf)),
                Scalar::Float(q_to_f64(&s2).powf(pf / 2.0)),
                None,
            )
        }
    };
    let ratio = match (&moment, &comparison) {
        (Scalar::Exact(m), Scalar::Exact(c)) if !c.is_zero() => Scalar::Exact(m / c),
        _ if comparison.to_f64() == 0.0 => Scalar::Float(0.0),
        _ => Scalar::Float(moment.to_f64() / comparison.to_f64()),
    };
    let within_even_bound = match (&even_bound, &moment, &comparison) {
        (Some(b), Scalar::Exact(m), Scalar::Exact(c)) => Some(m <= &(b * c)),
        _ => None,
    };
    let lc = lower_constant(pf);
    let lower_holds = lc.map(|c| q_to_f64(&s2).sqrt() <= c * moment.to_f64().powf(1.0 / pf) + tolerance());
    let vals: Vec<f64> = sign_pattern_values(a).iter().map(q_to_f64).collect();
    let mut grid: Vec<f64> = (1..=pf.ceil() as u32).map(f64::from).collect();
    grid.push(pf);
    grid.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let norms: Vec<f64> = grid.iter().map(|&q| float_moment(&vals, q).powf(1.0 / q)).collect();
    let monotone = norms.windows(2).all(|w| w[0] <= w[1] + tolerance());
    Ok(SignAverageReport {
        n,
        p: p.clone(),
        moment,
        comparison,
        ratio,
        even_bound,
        within_even_bound,
        lower_constant: lc,
        lower_holds,
        monotone,
    })
}

/// `‖Σ a_l r_l‖_∞` read off the step function itself.
pub fn sup_of_sum(a: &[Q]) -> Result<Q> {
    Ok(rademacher_sum(a, 0)?.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::dyadic_average;
    use crate::scalar::q;

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher(1, 1).unwrap(), DyadicStep::from_ints(1, &[1, -1]).unwrap());
        assert_eq!(rademacher(2, 2).unwrap(), DyadicStep::from_ints(2, &[1, -1, 1, -1]).unwrap());
        for l in 1..6 {
            assert_eq!(rademacher(l, 6).unwrap().integral(), qi(0));
        }
        assert!(rademacher(3, 2).is_err());
    }

    #[test]
    fn walsh_examples() {
        assert_eq!(walsh(&[], 0).unwrap(), DyadicStep::constant(qi(1)));
        assert_eq!(walsh(&[1, 2], 2).unwrap(), DyadicStep::from_ints(2, &[1, -1, -1, 1]).unwrap());
        assert!(walsh_gram_is_identity(4).unwrap());
        assert!(walsh(&[1, 1], 2).is_err());
    }

    #[test]
    fn moment_examples() {
        let r = rademacher_moment(&[qi(1), qi(1)], 4).unwrap();
        assert_eq!(r.value, qi(8));
        assert!(r.agree);
        for p in 1..6 {
            assert_eq!(rademacher_moment(&[qi(1)], p).unwrap().value, qi(1));
        }
        assert_eq!(rademacher_moment(&[qi(3), qi(4)], 2).unwrap().value, qi(25));
        let odd = rademacher_moment(&[qi(1), qi(2)], 3).unwrap();
        assert_eq!(odd.value, q(28, 2));
        assert!(odd.warning.is_some() && odd.multinomial.is_none());
        let a: Vec<Q> = (1..=25).map(|i| q(i, 7)).collect();
        let big = rademacher_moment(&a, 4).unwrap();
        assert_eq!(big.value, fourth_moment_closed_form(&a));
        assert!(big.enumeration.is_none());
    }

    #[test]
    fn khintchine_examples() {
        let r = khintchine_report(&[qi(1), qi(2)], &Exponent::Infinity).unwrap();
        assert_eq!(r.moment, Scalar::Exact(qi(3)));
        let r = khintchine_report(&vec![qi(1); 4], &Exponent::int(2)).unwrap();
        assert_eq!(r.ratio, Scalar::Exact(qi(1)));
        let r = khintchine_report(&[qi(1), qi(1)], &Exponent::int(4)).unwrap();
        assert_eq!(r.moment, Scalar::Exact(qi(8)));
        assert_eq!(r.comparison, Scalar::Exact(qi(4)));
        assert_eq!(r.ratio, Scalar::Exact(qi(2)));
        assert_eq!(r.even_bound, Some(qi(3)));
        assert_eq!(r.within_even_bound, Some(true));
        assert!(r.monotone);
        let r = khintchine_report(&[qi(1), qi(2), qi(3)], &Exponent::ratio(1, 2)).unwrap();
        assert_eq!(r.lower_holds, Some(true));
    }

    #[test]
    fn averages_truncate_rademacher_sums() {
        let a = [qi(3), q(-1, 2), qi(2), q(5, 3)];
        let f = rademacher_sum(&a, 4).unwrap();
        for n in 0..=4u32 {
            let expect = rademacher_sum(&a[..n as usize], 4).unwrap();
            assert_eq!(dyadic_average(&f, n).unwrap().relevel(4).unwrap(), expect);
        }
    }

    #[test]
    fn product_integrals_match_steps() {
        for a in 1..=4u32 {
            for b in 1..=4u32 {
                let step = rademacher(a, 4).unwrap().mul(&rademacher(b, 4).unwrap()).integral();
                assert_eq!(product_integral(&[a, b]).unwrap(), step);
            }
        }
        assert_eq!(product_integral(&[1, 64]).unwrap(), qi(0));
        assert_eq!(product_integral(&[64, 64]).unwrap(), qi(1));
        assert_eq!(product_integral(&[]).unwrap(), qi(1));
    }

    #[test]
    fn sup_norm_is_sum_of_moduli() {
        let a = [qi(3), q(-1, 2), qi(2)];
        assert_eq!(sup_of_sum(&a).unwrap(), q(11, 2));
    }
}
