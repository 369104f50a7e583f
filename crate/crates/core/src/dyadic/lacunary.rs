use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use crate::error::{domain, Error, Result};
use crate::scalar::{modulus_sq, ComplexQ, Q};

pub const LACUNARY_TERM_GUARD: usize = 12;
pub const LACUNARY_K_GUARD: u32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct LacunaryMoment {
    pub k: u32,
    /// `(1/2π) ∫_T |f|^{2^k}`.
    pub value: Q,
    /// `min n_{j+1}/n_j`, or `None` for a single frequency.
    pub gap_ratio: Option<f64>,
    /// Whether distinct frequency multisets of size `2^{k−1}` have distinct sums, so
    /// that only matching multisets contribute.
    pub collapse: bool,
}

fn check_inputs(freqs: &[u64], coeffs: &[ComplexQ], k: u32) -> Result<()> {
    if freqs.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            left: freqs.len(),
            right: coeffs.len(),
        });
    }
    if freqs.len() > LACUNARY_TERM_GUARD {
        return Err(Error::Guard {
            size: freqs.len(),
            limit: LACUNARY_TERM_GUARD,
            hint: "lacunary expansion is exponential in the number of terms".into(),
        });
    }
    if k == 0 || k > LACUNARY_K_GUARD {
        return Err(Error::Guard {
            size: k as usize,
            limit: LACUNARY_K_GUARD as usize,
            hint: "k must lie in 1..=3".into(),
        });
    }
    if freqs.first() == Some(&0) {
        return domain("frequencies must be positive");
    }
    if freqs.windows(2).any(|w| w[0] >= w[1]) {
        return domain("frequencies must be strictly increasing");
    }
    Ok(())
}

/// Coefficients of `f^m` for `f = Σ a_j z^{n_j}`, keyed by exponent.
fn power_coefficients(freqs: &[u64], coeffs: &[ComplexQ], m: u32) -> BTreeMap<u64, ComplexQ> {
    let mut acc: BTreeMap<u64, ComplexQ> = BTreeMap::new();
    acc.insert(0, ComplexQ::new(Q::from_integer(1.into()), Q::zero()));
    for _ in 0..m {
        let mut next: BTreeMap<u64, ComplexQ> = BTreeMap::new();
        for (e, c) in &acc {
            for (n, a) in freqs.iter().zip(coeffs) {
                *next.entry(e + n).or_insert_with(ComplexQ::zero) += c * a;
            }
        }
        acc = next;
    }
    acc
}

fn multisets_have_distinct_sums(freqs: &[u64], m: u32) -> bool {
    let mut sums: BTreeSet<u64> = BTreeSet::new();
    let mut count = 0usize;
    fn walk(freqs: &[u64], start: usize, left: u32, acc: u64, sums: &mut BTreeSet<u64>, count: &mut usize) {
        if left == 0 {
            sums.insert(acc);
            *count += 1;
            return;
        }
        for i in start..freqs.len() {
            walk(freqs, i, left - 1, acc + freqs[i], sums, count);
        }
    }
    walk(freqs, 0, m, 0, &mut sums, &mut count);
    sums.len() == count
}

/// `‖Σ a_j z^{n_j}‖_{2^k}^{2^k}` on the circle, exactly: the squared coefficient norm
/// of `f^{2^{k−1}}`.
pub fn lacunary_moment(freqs: &[u64], coeffs: &[ComplexQ], k: u32) -> Result<LacunaryMoment> {
    check_inputs(freqs, coeffs, k)?;
    let m = 1u32 << (k - 1);
    let value = power_coefficients(freqs, coeffs, m)
        .values()
        .map(modulus_sq)
        .sum();
    let gap_ratio = freqs
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .reduce(f64::min);
    Ok(LacunaryMoment {
        k,
        value,
        gap_ratio,
        collapse: multisets_have_distinct_sums(freqs, m),
    })
}

/// `Σ |a_j|²`.
pub fn coefficient_energy(coeffs: &[ComplexQ]) -> Q {
    coeffs.iter().map(modulus_sq).sum()
}

/// When the frequency multisets collapse, the moment equals
/// `Σ_{multisets M} (m!/Π mult!)² Π |a|^{2·mult}`; returns that value.
pub fn collapsed_moment(coeffs: &[ComplexQ], k: u32) -> Q {
    let m = 1u32 << (k - 1);
    let fact = |n: u32| -> Q { (1..=n as i64).map(crate::scalar::qi).product() };
    let weights: Vec<Q> = coeffs.iter().map(modulus_sq).collect();
    fn walk(w: &[Q], start: usize, left: u32, mults: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(mults.clone());
            return;
        }
        for i in start..w.len() {
            mults[i] += 1;
            walk(w, i, left - 1, mults, out);
            mults[i] -= 1;
        }
    }
    let mut all = Vec::new();
    walk(&weights, 0, m, &mut vec![0; weights.len()], &mut all);
    all.iter()
        .map(|mults| {
            let mut coef = fact(m);
            let mut prod = Q::from_integer(1.into());
            for (i, &c) in mults.iter().enumerate() {
                coef /= fact(c);
                prod *= num::pow(weights[i].clone(), c as usize);
            }
            &coef * &coef * prod
        })
        .sum()
}
