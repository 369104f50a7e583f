//! Unordered sums over finite and streamed index families.
//!
//! Family indices are positive integers: a finite family of length `m` is indexed by
//! `1..=m`, and a streamed family by `1, 2, …` up to its horizon.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::norms::{NormDescriptor, NormValue};
use crate::scalar::{lcm_of_denominators, modulus_sq, q_to_f64, qi, ComplexQ, Exponent, Q};

pub const DEFAULT_SUBSET_GUARD: usize = 24;
pub const SIGN_WINDOW_GUARD: usize = 20;
pub const W_NORM_GUARD: usize = 12;
const WITNESS_SAMPLES: usize = 512;
const WITNESS_SEED: u64 = 0x5eed_5a3e;

static SUBSET_GUARD: AtomicUsize = AtomicUsize::new(DEFAULT_SUBSET_GUARD);

pub fn subset_guard() -> usize {
    SUBSET_GUARD.load(AtomicOrdering::Relaxed)
}

pub fn set_subset_guard(n: usize) {
    SUBSET_GUARD.store(n, AtomicOrdering::Relaxed);
}

pub use crate::norms::ValueKind as TermKind;

/// A finite family of terms in `ℚ^d`; reals are `d = 1` under `|·|`, complex numbers
/// are `d = 2` under the Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFamily {
    kind: TermKind,
    norm: NormDescriptor,
    dim: usize,
    terms: Vec<Vec<Q>>,
}

impl FiniteFamily {
    pub fn real(xs: Vec<Q>) -> Self {
        FiniteFamily {
            kind: TermKind::Real,
            norm: NormDescriptor::l1(),
            dim: 1,
            terms: xs.into_iter().map(|x| vec![x]).collect(),
        }
    }

    pub fn real_ints(xs: &[i64]) -> Self {
        FiniteFamily::real(xs.iter().map(|&x| qi(x)).collect())
    }

    pub fn complex(zs: Vec<ComplexQ>) -> Self {
        FiniteFamily {
            kind: TermKind::Complex,
            norm: NormDescriptor::l2(),
            dim: 2,
            terms: zs.into_iter().map(|z| vec![z.re, z.im]).collect(),
        }
    }

    pub fn vectors(terms: Vec<Vec<Q>>, norm: NormDescriptor) -> Result<Self> {
        let dim = terms.first().map_or(0, Vec::len);
        if let Some(bad) = terms.iter().find(|t| t.len() != dim) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: dim,
            });
        }
        if !terms.is_empty() {
            norm.check_dimension(dim)?;
        }
        Ok(FiniteFamily {
            kind: TermKind::Vector,
            norm,
            dim,
            terms,
        })
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Vec<Q>] {
        &self.terms
    }

    pub fn norm_of(&self, v: &[Q]) -> NormValue {
        self.norm.value(v)
    }

    fn with_terms(&self, terms: Vec<Vec<Q>>) -> FiniteFamily {
        FiniteFamily {
            kind: self.kind,
            norm: self.norm.clone(),
            dim: self.dim,
            terms,
        }
    }

    /// Sub-family of the 1-based index window `(lo, hi]`.
    pub fn window(&self, lo: usize, hi: usize) -> FiniteFamily {
        self.with_terms(self.terms[lo..hi].to_vec())
    }

    /// Termwise product with scalar multipliers.
    pub fn scaled_by(&self, a: &[Q]) -> Result<FiniteFamily> {
        if a.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: self.len(),
            });
        }
        Ok(self.with_terms(
            self.terms
                .iter()
                .zip(a)
                .map(|(t, c)| t.iter().map(|x| x * c).collect())
                .collect(),
        ))
    }

    pub fn zero_vector(&self) -> Vec<Q> {
        vec![Q::zero(); self.dim]
    }

    pub fn total(&self) -> Vec<Q> {
        let mut acc = self.zero_vector();
        for t in &self.terms {
            add_into(&mut acc, t);
        }
        acc
    }
}

fn add_into(acc: &mut [Q], t: &[Q]) {
    for (a, x) in acc.iter_mut().zip(t) {
        *a += x;
    }
}

fn sub_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Analytic generators for countable families.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `scale · ratio^j`.
    Geometric { ratio: Q, scale: Q },
    /// `(-1)^j / j`.
    AlternatingHarmonic,
    /// `1 / j`.
    Harmonic,
    /// `1 / j^s`.
    Power { s: u32 },
    Zero { dim: usize },
    /// `ratio^j · e₁` in `ℚ^dim` under an `ℓ^p` norm.
    VectorGeometric { ratio: Q, dim: usize, p: Exponent },
    /// `(1/j) · e_j` in `ℓ²`, truncated to the horizon.
    HarmonicBasis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamedFamily {
    generator: Generator,
    horizon: usize,
}

impl StreamedFamily {
    pub fn new(generator: Generator, horizon: usize) -> Result<Self> {
        match &generator {
            Generator::Power { s } if *s == 0 => return domain("power family needs s >= 1"),
            Generator::VectorGeometric { dim, .. } if *dim == 0 => {
                return domain("vector family needs dim >= 1")
            }
            _ => {}
        }
        Ok(StreamedFamily { generator, horizon })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn kind(&self) -> TermKind {
        match self.generator {
            Generator::Zero { .. } | Generator::VectorGeometric { .. } | Generator::HarmonicBasis => {
                TermKind::Vector
            }
            _ => TermKind::Real,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.generator {
            Generator::Zero { dim } | Generator::VectorGeometric { dim, .. } => *dim,
            Generator::HarmonicBasis => self.horizon,
            _ => 1,
        }
    }

    pub fn norm(&self) -> NormDescriptor {
        match &self.generator {
            Generator::VectorGeometric { p, .. } => NormDescriptor::Lp(p.clone()),
            Generator::HarmonicBasis => NormDescriptor::l2(),
            _ => NormDescriptor::l1(),
        }
    }

    /// The `j`-th term, `j >= 1`.
    pub fn term(&self, j: usize) -> Vec<Q> {
        assert!(j >= 1, "streamed families are indexed from 1");
        let jq = qi(j as i64);
        match &self.generator {
            Generator::Geometric { ratio, scale } => vec![scale * num::pow(ratio.clone(), j)],
            Generator::AlternatingHarmonic => {
                let sign = if j.is_multiple_of(2) { qi(1) } else { qi(-1) };
                vec![sign / jq]
            }
            Generator::Harmonic => vec![jq.recip()],
            Generator::Power { s } => vec![num::pow(jq, *s as usize).recip()],
            Generator::Zero { dim } => vec![Q::zero(); *dim],
            Generator::VectorGeometric { ratio, dim, .. } => {
                let mut v = vec![Q::zero(); *dim];
                v[0] = num::pow(ratio.clone(), j);
                v
            }
            Generator::HarmonicBasis => {
                let mut v = vec![Q::zero(); self.horizon];
                if j <= self.horizon {
                    v[j - 1] = jq.recip();
                }
                v
            }
        }
    }

    /// The first `n` terms as a finite family.
    pub fn prefix(&self, n: usize) -> FiniteFamily {
        let terms = (1..=n).map(|j| self.term(j)).collect();
        FiniteFamily {
            kind: self.kind(),
            norm: self.norm(),
            dim: self.dim(),
            terms,
        }
    }

    /// `Σ_{j>k} ‖f_j‖` over the whole countable family, when finite.
    pub fn norm_tail(&self, k: usize) -> Option<Q> {
        let geometric_tail = |r: &Q| {
            let r = r.abs();
            (r < Q::one()).then(|| num::pow(r.clone(), k + 1) / (Q::one() - r))
        };
        match &self.generator {
            Generator::Geometric { ratio, scale } => geometric_tail(ratio).map(|t| t * scale.abs()),
            Generator::VectorGeometric { ratio, .. } => geometric_tail(ratio),
            Generator::Zero { .. } => Some(Q::zero()),
            Generator::Power { s } if *s >= 2 => {
                // Σ_{j>k} j^{-s} <= ∫_k^∞ x^{-s} dx, plus the first term when k = 0.
                let s1 = qi(*s as i64 - 1);
                Some(if k == 0 {
                    Q::one() + s1.recip()
                } else {
                    (s1 * num::pow(qi(k as i64), *s as usize - 1)).recip()
                })
            }
            _ => None,
        }
    }

    /// Upper bound on `‖Σ_{j∈B} ±f_j‖` over finite `B ⊆ (k, ∞)`.
    pub fn signed_tail(&self, k: usize) -> Option<NormValue> {
        match &self.generator {
            // Orthogonal terms: ‖Σ ±e_j/j‖² = Σ 1/j² <= 1/k for k >= 1.
            Generator::HarmonicBasis => Some(NormValue::from_squared(if k == 0 {
                qi(2)
            } else {
                qi(k as i64).recip()
            })),
            _ => self.norm_tail(k).map(NormValue::Exact),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndexedFamily {
    Finite(FiniteFamily),
    Streamed(StreamedFamily),
}

impl IndexedFamily {
    pub fn kind(&self) -> TermKind {
        match self {
            IndexedFamily::Finite(f) => f.kind(),
            IndexedFamily::Streamed(s) => s.kind(),
        }
    }

    /// Number of available terms: the length, or the horizon.
    pub fn horizon(&self) -> usize {
        match self {
            IndexedFamily::Finite(f) => f.len(),
            IndexedFamily::Streamed(s) => s.horizon(),
        }
    }

    pub fn prefix(&self, n: usize) -> FiniteFamily {
        match self {
            IndexedFamily::Finite(f) => f.window(0, n.min(f.len())),
            IndexedFamily::Streamed(s) => s.prefix(n),
        }
    }

    pub fn norm(&self) -> NormDescriptor {
        match self {
            IndexedFamily::Finite(f) => f.norm().clone(),
            IndexedFamily::Streamed(s) => s.norm(),
        }
    }
}

/// Sum of the terms indexed by `b ⊆ {1..m}`.
pub fn subset_sum(f: &FiniteFamily, b: &[usize]) -> Result<Vec<Q>> {
    let mut seen = BTreeSet::new();
    let mut acc = f.zero_vector();
    for &i in b {
        if i == 0 || i > f.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: f.len(),
            });
        }
        if !seen.insert(i) {
            return Err(Error::Invalid(format!("index {i} repeated in subset")));
        }
        add_into(&mut acc, &f.terms[i - 1]);
    }
    Ok(acc)
}

/// A maximizing subset or sign pattern together with its norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Extremal {
    pub value: NormValue,
    /// 1-based indices of the selected terms.
    pub indices: Vec<usize>,
    /// Sign attached to each selected index.
    pub signs: Vec<i8>,
}

#[derive(Clone, Copy)]
enum FastKey {
    L1,
    L2,
    LInf,
}

fn fast_key(norm: &NormDescriptor) -> Option<FastKey> {
    match norm {
        NormDescriptor::Lp(p) => match (p, p.as_integer()) {
            (Exponent::Infinity, _) => Some(FastKey::LInf),
            (_, Some(1)) => Some(FastKey::L1),
            (_, Some(2)) => Some(FastKey::L2),
            _ => None,
        },
        _ => None,
    }
}

fn key_of(kind: FastKey, s: &[BigInt]) -> BigInt {
    match kind {
        FastKey::L1 => s.iter().map(|x| x.abs()).sum(),
        FastKey::L2 => s.iter().map(|x| x * x).sum(),
        FastKey::LInf => s.iter().map(|x| x.abs()).max().unwrap_or_default(),
    }
}

fn key_value(kind: FastKey, key: BigInt, den: &BigInt) -> NormValue {
    match kind {
        FastKey::L1 | FastKey::LInf => NormValue::Exact(Q::new(key, den.clone())),
        FastKey::L2 => NormValue::from_squared(Q::new(key, den * den)),
    }
}

/// Maximizes `‖Σ c_j f_j‖` over `c ∈ {0,1}^m` (`signed = false`) or `c ∈ {±1}^m`
/// (`signed = true`) by Gray-code enumeration on integer-scaled terms.
fn enumerate_max(f: &FiniteFamily, signed: bool) -> Extremal {
    let m = f.len();
    if m == 0 {
        return Extremal {
            value: NormValue::Exact(Q::zero()),
            indices: Vec::new(),
            signs: Vec::new(),
        };
    }
    let den = lcm_of_denominators(f.terms.iter().flatten());
    let step: Vec<Vec<BigInt>> = f
        .terms
        .iter()
        .map(|t| {
            t.iter()
                .map(|x| {
                    let v = x.numer() * (&den / x.denom());
                    if signed {
                        v * 2
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut state = vec![signed; m];
    let mut sum: Vec<BigInt> = vec![BigInt::zero(); f.dim];
    if signed {
        for t in &step {
            for (a, x) in sum.iter_mut().zip(t) {
                *a += x / 2;
            }
        }
    }
    let fast = fast_key(&f.norm);
    let general_value = |s: &[BigInt]| -> NormValue {
        let v: Vec<Q> = s.iter().map(|x| Q::new(x.clone(), den.clone())).collect();
        f.norm.value(&v)
    };

    enum Best {
        Key(BigInt),
        Value(NormValue),
    }
    // The all-zero subset has norm zero, so it is a valid starting point for `y`.
    let mut best = match fast {
        Some(k) => Best::Key(key_of(k, &sum)),
        None => Best::Value(general_value(&sum)),
    };
    let mut best_state = state.clone();
    let bits = if signed { m - 1 } else { m };
    for i in 1u64..(1u64 << bits) {
        let j = i.trailing_zeros() as usize;
        if state[j] {
            for (a, x) in sum.iter_mut().zip(&step[j]) {
                *a -= x;
            }
        } else {
            for (a, x) in sum.iter_mut().zip(&step[j]) {
                *a += x;
            }
        }
        state[j] = !state[j];
        let better = match (&mut best, fast) {
            (Best::Key(b), Some(k)) => {
                let key = key_of(k, &sum);
                if key > *b {
                    *b = key;
                    true
                } else {
                    false
                }
            }
            (Best::Value(b), _) => {
                let v = general_value(&sum);
                if v.cmp_value(b) == std::cmp::Ordering::Greater {
                    *b = v;
                    true
                } else {
                    false
                }
            }
            _ => unreachable!(),
        };
        if better {
            best_state.clone_from(&state);
        }
    }
    let value = match (best, fast) {
        (Best::Key(k), Some(kind)) => key_value(kind, k, &den),
        (Best::Value(v), _) => v,
        _ => unreachable!(),
    };
    let (indices, signs) = if signed {
        (
            (1..=m).collect(),
            best_state.iter().map(|&s| if s { 1 } else { -1 }).collect(),
        )
    } else {
        let idx: Vec<usize> = (1..=m).filter(|&i| best_state[i - 1]).collect();
        let signs = vec![1; idx.len()];
        (idx, signs)
    };
    Extremal {
        value,
        indices,
        signs,
    }
}

fn guard_check(m: usize, limit: usize) -> Result<()> {
    if m > limit {
        return Err(Error::Guard {
            size: m,
            limit,
            hint: "use sampling mode for a lower bound".into(),
        });
    }
    Ok(())
}

/// `max_B ‖Σ_B f‖` over nonempty subsets.
pub fn y_norm(f: &FiniteFamily) -> Result<Extremal> {
    guard_check(f.len(), subset_guard())?;
    Ok(enumerate_max(f, false))
}

/// `max_{B, β} ‖Σ_B β f‖` with `β ∈ {±1}`. The maximum of a convex function over
/// `[-1,1]^m` sits at a vertex, so full sign patterns suffice.
pub fn z_norm(f: &FiniteFamily) -> Result<Extremal> {
    guard_check(f.len(), subset_guard())?;
    Ok(enumerate_max(f, true))
}

/// Random subsets (`signed = false`) or sign patterns; a lower bound for `y` or `z`.
pub fn sampled_max(f: &FiniteFamily, signed: bool, samples: usize, rng: &mut impl Rng) -> Extremal {
    let m = f.len();
    let mut best = Extremal {
        value: NormValue::Exact(Q::zero()),
        indices: Vec::new(),
        signs: Vec::new(),
    };
    for _ in 0..samples {
        let mut acc = f.zero_vector();
        let mut indices = Vec::new();
        let mut signs = Vec::new();
        for i in 0..m {
            let pick: u8 = rng.gen_range(0..2);
            if signed {
                let s: i8 = if pick == 0 { 1 } else { -1 };
                for (a, x) in acc.iter_mut().zip(&f.terms[i]) {
                    if s > 0 {
                        *a += x;
                    } else {
                        *a -= x;
                    }
                }
                indices.push(i + 1);
                signs.push(s);
            } else if pick == 1 {
                add_into(&mut acc, &f.terms[i]);
                indices.push(i + 1);
                signs.push(1);
            }
        }
        let v = f.norm_of(&acc);
        if v.cmp_value(&best.value) == std::cmp::Ordering::Greater {
            best = Extremal {
                value: v,
                indices,
                signs,
            };
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct WNorm {
    pub value: NormValue,
    pub k: usize,
    /// Root index `r` (coefficient `e^{2πir/K}`) chosen for each term, or `None` when
    /// the term is left out.
    pub coefficients: Vec<Option<usize>>,
}

/// `max |Σ β_j f_j|` over `β_j ∈ {0} ∪ {K-th roots of unity}`.
///
/// For a fixed direction `u` the best `β` is chosen termwise, and the optimum is the
/// greedy choice for its own direction, so scanning one direction per arc of the
/// breakpoint arrangement covers every candidate.
pub fn w_norm(f: &FiniteFamily, k: usize) -> Result<WNorm> {
    if f.kind() == TermKind::Vector {
        return Err(Error::Invalid("w_norm needs scalar terms".into()));
    }
    if k == 0 {
        return domain("w_norm needs K >= 1");
    }
    guard_check(f.len(), W_NORM_GUARD)?;
    let zs: Vec<ComplexQ> = f
        .terms
        .iter()
        .map(|t| ComplexQ::new(t[0].clone(), t.get(1).cloned().unwrap_or_else(Q::zero)))
        .collect();
    let tau = std::f64::consts::TAU;
    let phi = |r: usize| tau * r as f64 / k as f64;
    let polar: Vec<(f64, f64)> = zs
        .iter()
        .map(|z| {
            let (re, im) = (q_to_f64(&z.re), q_to_f64(&z.im));
            (re.hypot(im), im.atan2(re))
        })
        .collect();
    let mut breaks = Vec::new();
    for &(r, theta) in &polar {
        if r == 0.0 {
            continue;
        }
        for s in 0..k {
            let base = theta + phi(s);
            for off in [std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2, tau / (2.0 * k as f64)] {
                breaks.push((base + off).rem_euclid(tau));
            }
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    breaks.dedup();
    let directions: Vec<f64> = if breaks.is_empty() {
        vec![0.0]
    } else {
        (0..breaks.len())
            .map(|i| {
                let a = breaks[i];
                let b = if i + 1 < breaks.len() { breaks[i + 1] } else { breaks[0] + tau };
                (a + b) / 2.0
            })
            .collect()
    };
    let mut assignments = BTreeSet::new();
    for psi in directions {
        let beta: Vec<Option<usize>> = polar
            .iter()
            .map(|&(r, theta)| {
                let (best, gain) = (0..k)
                    .map(|s| (s, r * (theta + phi(s) - psi).cos()))
                    .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
                (gain > 0.0).then_some(best)
            })
            .collect();
        assignments.insert(beta);
    }
    let exact_roots = matches!(k, 1 | 2 | 4);
    let root_q = |r: usize| -> ComplexQ {
        match (k, r) {
            (_, 0) => ComplexQ::new(qi(1), qi(0)),
            (2, 1) | (4, 2) => ComplexQ::new(qi(-1), qi(0)),
            (4, 1) => ComplexQ::new(qi(0), qi(1)),
            (4, 3) => ComplexQ::new(qi(0), qi(-1)),
            _ => unreachable!("rational root requested for K = {k}"),
        }
    };
    let mut best: Option<(NormValue, Vec<Option<usize>>)> = None;
    for beta in assignments {
        let value = if exact_roots {
            let mut acc = ComplexQ::new(Q::zero(), Q::zero());
            for (z, b) in zs.iter().zip(&beta) {
                if let Some(r) = b {
                    acc += z * root_q(*r);
                }
            }
            NormValue::from_squared(modulus_sq(&acc))
        } else {
            let (mut re, mut im) = (0.0, 0.0);
            for (&(r, theta), b) in polar.iter().zip(&beta) {
                if let Some(s) = b {
                    re += r * (theta + phi(*s)).cos();
                    im += r * (theta + phi(*s)).sin();
                }
            }
            NormValue::Float(re.hypot(im))
        };
        if best
            .as_ref()
            .is_none_or(|(b, _)| value.cmp_value(b) == std::cmp::Ordering::Greater)
        {
            best = Some((value, beta));
        }
    }
    let (value, coefficients) = best.unwrap_or((NormValue::Exact(Q::zero()), Vec::new()));
    let coefficients = if coefficients.is_empty() { vec![None; f.len()] } else { coefficients };
    Ok(WNorm {
        value,
        k,
        coefficients,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CauchyVerdict {
    /// Every finite `B` disjoint from `A = {1..prefix}` has `‖Σ_B f‖ <= bound < ε`.
    Pass { prefix: usize, bound: NormValue },
    /// `witness ⊆ (prefix, N]` has `‖Σ_witness f‖ = value >= ε`, and no larger prefix
    /// inside the horizon escapes a witness.
    Fail {
        prefix: usize,
        witness: Vec<usize>,
        value: NormValue,
    },
    Inconclusive { reason: String },
}

impl CauchyVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CauchyVerdict::Pass { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            CauchyVerdict::Pass { .. } => "pass",
            CauchyVerdict::Fail { .. } => "fail",
            CauchyVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn check_eps(eps: &Q) -> Result<()> {
    if !eps.is_positive() {
        return domain(format!("epsilon must be positive, got {eps}"));
    }
    Ok(())
}

fn below(v: &NormValue, eps: &Q) -> bool {
    v.cmp_scaled(&Q::one(), &NormValue::Exact(eps.clone()))
        .map_or_else(|| v.to_f64() < q_to_f64(eps), |o| o == std::cmp::Ordering::Less)
}

/// Upper bound on the subset sums of the window `(k, m]` of a finite family.
fn finite_tail_bound(f: &FiniteFamily, k: usize) -> NormValue {
    let m = f.len();
    if f.kind() == TermKind::Real {
        return NormValue::Exact(f.terms[k..].iter().map(|t| t[0].abs()).sum());
    }
    if m - k <= SIGN_WINDOW_GUARD {
        enumerate_max(&f.window(k, m), false).value
    } else {
        let norms: Vec<NormValue> = f.terms[k..].iter().map(|t| f.norm_of(t)).collect();
        NormValue::sum(&norms)
    }
}

/// Generalized Cauchy criterion at `ε` within the horizon `N`.
pub fn generalized_cauchy_check(f: &IndexedFamily, eps: &Q, horizon: Option<usize>) -> Result<CauchyVerdict> {
    check_eps(eps)?;
    match f {
        IndexedFamily::Finite(fam) => {
            let m = fam.len();
            // Tail bounds shrink with k; walk down from the empty tail.
            let mut k = m;
            let mut bound = NormValue::Exact(Q::zero());
            while k > 0 {
                let b = finite_tail_bound(fam, k - 1);
                if !below(&b, eps) {
                    break;
                }
                bound = b;
                k -= 1;
            }
            Ok(CauchyVerdict::Pass { prefix: k, bound })
        }
        IndexedFamily::Streamed(s) => {
            let n = horizon.unwrap_or(s.horizon());
            if s.signed_tail(0).is_some() {
                for k in 0..=n {
                    let b = s.signed_tail(k).expect("bound available");
                    if below(&b, eps) {
                        return Ok(CauchyVerdict::Pass { prefix: k, bound: b });
                    }
                }
                return Ok(CauchyVerdict::Inconclusive {
                    reason: format!("analytic tail bound stays >= {eps} up to horizon {n}"),
                });
            }
            let fam = s.prefix(n);
            Ok(match fam.kind() {
                TermKind::Real => scalar_witness(&fam, eps),
                _ => vector_witness(&fam, eps),
            })
        }
    }
}

/// Largest `k` such that the positive or the negative terms of `(k, N]` sum to `≥ ε`.
fn scalar_witness(f: &FiniteFamily, eps: &Q) -> CauchyVerdict {
    let n = f.len();
    let (mut pos, mut neg) = (Q::zero(), Q::zero());
    for k in (0..n).rev() {
        let x = &f.terms[k][0];
        if x.is_positive() {
            pos += x;
        } else {
            neg -= x;
        }
        let (total, want_pos) = if &pos >= eps {
            (pos.clone(), true)
        } else if &neg >= eps {
            (neg.clone(), false)
        } else {
            continue;
        };
        let witness = (k + 1..=n)
            .filter(|&j| {
                let y = &f.terms[j - 1][0];
                if want_pos {
                    y.is_positive()
                } else {
                    y.is_negative()
                }
            })
            .collect();
        return CauchyVerdict::Fail {
            prefix: k,
            witness,
            value: NormValue::Exact(total),
        };
    }
    CauchyVerdict::Inconclusive {
        reason: format!("no block of same-sign terms reaches {eps} within the horizon"),
    }
}

fn vector_witness(f: &FiniteFamily, eps: &Q) -> CauchyVerdict {
    let n = f.len();
    let eps_v = NormValue::Exact(eps.clone());
    if n <= SIGN_WINDOW_GUARD {
        for k in (0..n).rev() {
            let ex = enumerate_max(&f.window(k, n), false);
            if ex.value.cmp_value(&eps_v) != std::cmp::Ordering::Less {
                return CauchyVerdict::Fail {
                    prefix: k,
                    witness: ex.indices.iter().map(|i| i + k).collect(),
                    value: ex.value,
                };
            }
        }
        return CauchyVerdict::Inconclusive {
            reason: "exhaustive search found no witness".into(),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    let step = (n / 16).max(1);
    let mut k = n - 1;
    loop {
        let ex = sampled_max(&f.window(k, n), false, WITNESS_SAMPLES, &mut rng);
        if ex.value.cmp_value(&eps_v) != std::cmp::Ordering::Less {
            return CauchyVerdict::Fail {
                prefix: k,
                witness: ex.indices.iter().map(|i| i + k).collect(),
                value: ex.value,
            };
        }
        if k == 0 {
            break;
        }
        k = k.saturating_sub(step);
    }
    CauchyVerdict::Inconclusive {
        reason: "no witness found by sampling".into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumEstimate {
    pub value: Vec<Q>,
    pub prefix: usize,
    /// Bound on the distance from `value` to the unordered sum.
    pub error_bound: NormValue,
}

/// The unordered sum, certified to within `ε`.
pub fn unordered_sum_eval(f: &IndexedFamily, eps: &Q) -> Result<SumEstimate> {
    match generalized_cauchy_check(f, eps, None)? {
        CauchyVerdict::Pass { prefix, bound } => Ok(SumEstimate {
            value: f.prefix(prefix).total(),
            prefix,
            error_bound: bound,
        }),
        other => Err(Error::Refused(format!(
            "generalized Cauchy check is {} at epsilon {eps}",
            other.label()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub indices: Vec<usize>,
    pub sum: Q,
}

/// A rearrangement whose partial sums jump by at least `ε` once per block.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergentRearrangement {
    pub order: Vec<usize>,
    pub blocks: Vec<Block>,
}

/// Builds a rearrangement of a real family's first `n` terms that interleaves the
/// initial segments `A_k` with disjoint same-sign blocks `B_k`, `|Σ B_k| >= ε`.
/// Blocks are chosen first-fit by index.
pub fn divergent_rearrangement(f: &IndexedFamily, eps: &Q, n: usize) -> Result<Option<DivergentRearrangement>> {
    check_eps(eps)?;
    if f.kind() != TermKind::Real {
        return Ok(None);
    }
    let fam = f.prefix(n);
    let n = fam.len();
    let x = |j: usize| &fam.terms[j - 1][0];
    let mut used = vec![false; n + 1];
    let mut order = Vec::new();
    let mut blocks = Vec::new();
    let mut reach = 0;
    loop {
        let mut found = None;
        for want_pos in [true, false] {
            let mut acc = Q::zero();
            let mut idx = Vec::new();
            for j in reach + 1..=n {
                let y = x(j);
                if (want_pos && y.is_positive()) || (!want_pos && y.is_negative()) {
                    acc += y;
                    idx.push(j);
                    if &acc.abs() >= eps {
                        found = Some(Block { indices: idx, sum: acc });
                        break;
                    }
                }
            }
            if found.is_some() {
                break;
            }
        }
        let Some(block) = found else { break };
        for j in 1..=reach {
            if !used[j] {
                used[j] = true;
                order.push(j);
            }
        }
        for &j in &block.indices {
            used[j] = true;
            order.push(j);
        }
        reach = *block.indices.last().expect("nonempty block");
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Ok(None);
    }
    order.extend((1..=n).filter(|&j| !used[j]));
    Ok(Some(DivergentRearrangement { order, blocks }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementReport {
    pub sum: Option<Vec<Q>>,
    pub permuted_sum: Option<Vec<Q>>,
    pub difference: Option<NormValue>,
    pub agree: bool,
    pub witness: Option<DivergentRearrangement>,
}

fn validate_permutation(pi: &[usize]) -> Result<Vec<usize>> {
    let n = pi.len();
    let mut inverse = vec![0; n + 1];
    for (i, &p) in pi.iter().enumerate() {
        if p == 0 || p > n || inverse[p] != 0 {
            return Err(Error::Invalid(format!("not a bijection of 1..{n}")));
        }
        inverse[p] = i + 1;
    }
    Ok(inverse)
}

/// Compares the unordered sum with the sum of `f_{π(1)}, f_{π(2)}, …`, where `π` acts
/// on `1..=len(π)` and fixes larger indices.
pub fn rearrangement_test(f: &IndexedFamily, pi: &[usize], eps: &Q) -> Result<RearrangementReport> {
    check_eps(eps)?;
    let inverse = validate_permutation(pi)?;
    let image = |i: usize| if i <= pi.len() { pi[i - 1] } else { i };
    match f {
        IndexedFamily::Finite(fam) => {
            if pi.len() != fam.len() {
                return Err(Error::LengthMismatch {
                    left: pi.len(),
                    right: fam.len(),
                });
            }
            let sum = fam.total();
            let mut permuted = fam.zero_vector();
            for i in 1..=fam.len() {
                add_into(&mut permuted, &fam.terms[image(i) - 1]);
            }
            let difference = fam.norm_of(&sub_vec(&sum, &permuted));
            Ok(RearrangementReport {
                agree: sum == permuted,
                sum: Some(sum),
                permuted_sum: Some(permuted),
                difference: Some(difference),
                witness: None,
            })
        }
        IndexedFamily::Streamed(s) => {
            if pi.len() > s.horizon() {
                return Err(Error::Invalid(format!(
                    "permutation length {} exceeds horizon {}",
                    pi.len(),
                    s.horizon()
                )));
            }
            match generalized_cauchy_check(f, eps, None)? {
                CauchyVerdict::Pass { prefix: k, .. } => {
                    // Smallest permuted prefix that covers {1..k}.
                    let cover = (1..=k)
                        .map(|j| if j <= pi.len() { inverse[j] } else { j })
                        .max()
                        .unwrap_or(0);
                    let sum = s.prefix(k).total();
                    let mut permuted = vec![Q::zero(); s.dim()];
                    for i in 1..=cover {
                        add_into(&mut permuted, &s.term(image(i)));
                    }
                    let difference = s.norm().value(&sub_vec(&sum, &permuted));
                    let agree = difference.le_scaled(&qi(2), &NormValue::Exact(eps.clone()));
                    Ok(RearrangementReport {
                        sum: Some(sum),
                        permuted_sum: Some(permuted),
                        difference: Some(difference),
                        agree,
                        witness: None,
                    })
                }
                _ => Ok(RearrangementReport {
                    sum: None,
                    permuted_sum: None,
                    difference: None,
                    agree: false,
                    witness: divergent_rearrangement(f, eps, s.horizon())?,
                }),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformMethod {
    Exhaustive,
    NormSum,
    TailBound,
    Sampled,
}

impl UniformMethod {
    pub fn label(self) -> &'static str {
        match self {
            UniformMethod::Exhaustive => "exhaustive",
            UniformMethod::NormSum => "norm-sum",
            UniformMethod::TailBound => "tail-bound",
            UniformMethod::Sampled => "sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformReport {
    pub l_eps: usize,
    /// Largest signed window sum found, or an upper bound for it.
    pub sup: NormValue,
    pub bound: Q,
    pub method: UniformMethod,
    pub holds: bool,
}

/// Checks `sup_ε ‖Σ_{j=l+1}^n ε_j v_j‖ < 2ε` for `n > l >= L_ε` within the horizon.
/// Signed sums over sub-windows are convex combinations of full-window sign patterns,
/// so the widest window decides.
pub fn sign_uniform_convergence_check(
    f: &IndexedFamily,
    eps: &Q,
    horizon: Option<usize>,
    allow_sampling: bool,
) -> Result<UniformReport> {
    let l = match generalized_cauchy_check(f, eps, horizon)? {
        CauchyVerdict::Pass { prefix, .. } => prefix,
        other => {
            return Err(Error::Refused(format!(
                "generalized Cauchy check is {} at epsilon {eps}",
                other.label()
            )))
        }
    };
    let n = horizon.unwrap_or(f.horizon()).max(l);
    let bound = qi(2) * eps;
    let finish = |sup: NormValue, method| {
        let holds = below(&sup, &bound);
        Ok(UniformReport {
            l_eps: l,
            sup,
            bound: bound.clone(),
            method,
            holds,
        })
    };
    let window = || f.prefix(n).window(l, n);
    if n - l <= SIGN_WINDOW_GUARD {
        return finish(enumerate_max(&window(), true).value, UniformMethod::Exhaustive);
    }
    let norm_tail = match f {
        IndexedFamily::Finite(fam) => {
            let norms: Vec<NormValue> = fam.terms[l..].iter().map(|t| fam.norm_of(t)).collect();
            Some(NormValue::sum(&norms))
        }
        IndexedFamily::Streamed(s) => s.norm_tail(l).map(NormValue::Exact),
    };
    if let Some(t) = norm_tail {
        return finish(t, UniformMethod::NormSum);
    }
    if let IndexedFamily::Streamed(s) = f {
        if let Some(t) = s.signed_tail(l) {
            return finish(t, UniformMethod::TailBound);
        }
    }
    if allow_sampling {
        let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
        return finish(sampled_max(&window(), true, WITNESS_SAMPLES, &mut rng).value, UniformMethod::Sampled);
    }
    Err(Error::Guard {
        size: n - l,
        limit: SIGN_WINDOW_GUARD,
        hint: "sign window too large for exhaustive mode; enable sampling".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn geometric(h: usize) -> IndexedFamily {
        IndexedFamily::Streamed(
            StreamedFamily::new(Generator::Geometric { ratio: q(1, 2), scale: qi(1) }, h).unwrap(),
        )
    }

    #[test]
    fn subset_sum_examples() {
        let f = FiniteFamily::real_ints(&[1, -2, 3]);
        assert_eq!(subset_sum(&f, &[1, 3]).unwrap(), vec![qi(4)]);
        assert_eq!(subset_sum(&f, &[]).unwrap(), vec![qi(0)]);
        assert!(matches!(subset_sum(&f, &[4]), Err(Error::IndexOutOfRange { .. })));
        let v = FiniteFamily::vectors(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]], NormDescriptor::l2()).unwrap();
        assert_eq!(subset_sum(&v, &[1, 2]).unwrap(), vec![qi(1), qi(1)]);
    }

    #[test]
    fn y_and_z_examples() {
        let f = FiniteFamily::real_ints(&[1, -2, 3]);
        let y = y_norm(&f).unwrap();
        assert_eq!(y.value, NormValue::Exact(qi(4)));
        assert_eq!(y.indices, vec![1, 3]);
        assert_eq!(z_norm(&f).unwrap().value, NormValue::Exact(qi(6)));
        assert_eq!(y_norm(&FiniteFamily::real_ints(&[-7])).unwrap().value, NormValue::Exact(qi(7)));
        assert_eq!(y_norm(&FiniteFamily::real_ints(&[1, 1, 1])).unwrap().value, NormValue::Exact(qi(3)));
        let v = FiniteFamily::vectors(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]], NormDescriptor::linf()).unwrap();
        assert_eq!(z_norm(&v).unwrap().value, NormValue::Exact(qi(1)));
    }

    #[test]
    fn guard_is_enforced() {
        let f = FiniteFamily::real(vec![qi(1); DEFAULT_SUBSET_GUARD + 1]);
        assert!(matches!(y_norm(&f), Err(Error::Guard { .. })));
    }

    #[test]
    fn w_norm_examples() {
        let f = FiniteFamily::complex(vec![ComplexQ::new(qi(1), qi(0)), ComplexQ::new(qi(0), qi(1))]);
        assert_eq!(w_norm(&f, 4).unwrap().value, NormValue::Exact(qi(2)));
        let single = FiniteFamily::complex(vec![ComplexQ::new(qi(3), qi(4))]);
        for k in [1, 4, 8, 16] {
            assert!((w_norm(&single, k).unwrap().value.to_f64() - 5.0).abs() < 1e-12);
        }
        let pm = FiniteFamily::real_ints(&[1, -1]);
        assert_eq!(w_norm(&pm, 2).unwrap().value, NormValue::Exact(qi(2)));
    }

    #[test]
    fn cauchy_examples() {
        let v = generalized_cauchy_check(&geometric(64), &q(1, 10), None).unwrap();
        assert_eq!(v, CauchyVerdict::Pass { prefix: 4, bound: NormValue::Exact(q(1, 16)) });

        let alt = IndexedFamily::Streamed(StreamedFamily::new(Generator::AlternatingHarmonic, 200).unwrap());
        match generalized_cauchy_check(&alt, &q(1, 2), None).unwrap() {
            CauchyVerdict::Fail { prefix, witness, value } => {
                assert!(value.le_scaled(&qi(1), &NormValue::Exact(qi(10))));
                assert!(!value.le_scaled(&qi(1), &NormValue::Exact(q(499, 1000))));
                assert!(witness.iter().all(|&j| j > prefix && j % 2 == 0));
                let s: Q = witness.iter().map(|&j| qi(j as i64).recip()).sum();
                assert!(s >= q(1, 2));
            }
            other => panic!("expected failure, got {other:?}"),
        }

        let zeros = IndexedFamily::Finite(FiniteFamily::real_ints(&[0, 0, 0]));
        assert_eq!(
            generalized_cauchy_check(&zeros, &q(1, 10), None).unwrap(),
            CauchyVerdict::Pass { prefix: 0, bound: NormValue::Exact(qi(0)) }
        );
    }

    #[test]
    fn eval_examples() {
        let s = unordered_sum_eval(&geometric(64), &q(1, 1_000_000)).unwrap();
        assert_eq!(s.prefix, 20);
        let err = (qi(1) - &s.value[0]).abs();
        assert!(err < q(1, 1_000_000));
        let single = IndexedFamily::Finite(FiniteFamily::real_ints(&[5]));
        assert_eq!(unordered_sum_eval(&single, &q(1, 10)).unwrap().value, vec![qi(5)]);
        let alt = IndexedFamily::Streamed(StreamedFamily::new(Generator::Harmonic, 100).unwrap());
        assert!(matches!(unordered_sum_eval(&alt, &q(1, 10)), Err(Error::Refused(_))));
    }

    #[test]
    fn rearrangement_examples() {
        let f = IndexedFamily::Finite(FiniteFamily::real_ints(&[1, -2, 3]));
        let r = rearrangement_test(&f, &[3, 1, 2], &q(1, 10)).unwrap();
        assert!(r.agree);
        assert_eq!(r.sum, Some(vec![qi(2)]));
        let swap: Vec<usize> = (1..=40).map(|i| if i % 2 == 1 { i + 1 } else { i - 1 }).collect();
        let r = rearrangement_test(&geometric(40), &swap, &q(1, 1_000_000)).unwrap();
        assert!(r.agree);
        assert!(rearrangement_test(&f, &[1, 1, 2], &q(1, 10)).is_err());
    }

    #[test]
    fn divergent_rearrangement_for_alternating_harmonic() {
        let alt = IndexedFamily::Streamed(StreamedFamily::new(Generator::AlternatingHarmonic, 400).unwrap());
        let r = rearrangement_test(&alt, &[1, 2], &q(1, 2)).unwrap();
        assert!(!r.agree);
        let w = r.witness.expect("witness");
        assert!(w.blocks.len() >= 3);
        let mut sorted = w.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=400).collect::<Vec<_>>());
        for b in &w.blocks {
            assert!(b.sum.abs() >= q(1, 2));
        }
    }

    #[test]
    fn uniform_examples() {
        let vg = IndexedFamily::Streamed(
            StreamedFamily::new(
                Generator::VectorGeometric { ratio: q(1, 2), dim: 2, p: Exponent::int(2) },
                64,
            )
            .unwrap(),
        );
        let r = sign_uniform_convergence_check(&vg, &q(1, 10), None, false).unwrap();
        assert_eq!(r.l_eps, 4);
        assert!(r.holds);

        let hb = IndexedFamily::Streamed(StreamedFamily::new(Generator::HarmonicBasis, 48).unwrap());
        for eps in [q(1, 2), q(1, 4)] {
            let r = sign_uniform_convergence_check(&hb, &eps, None, false).unwrap();
            assert!(r.holds, "eps {eps}");
        }

        let zero = IndexedFamily::Streamed(StreamedFamily::new(Generator::Zero { dim: 3 }, 30).unwrap());
        let r = sign_uniform_convergence_check(&zero, &q(1, 10), None, false).unwrap();
        assert_eq!(r.l_eps, 0);
        assert!(r.holds);
    }
}
