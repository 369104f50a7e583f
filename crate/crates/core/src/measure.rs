//! Finite atomic measure spaces, partition algebras and signed/vector measures.
//!
//! Atoms are addressed by their 0-based position.

use std::collections::{BTreeSet, HashSet};

use num::{One, Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::norms::{NormDescriptor, NormValue, ValueKind};
use crate::scalar::{sqrt_exact, ComplexQ, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct AtomSpace {
    labels: Vec<String>,
    base: Option<Vec<Q>>,
}

impl AtomSpace {
    pub fn new(labels: Vec<String>, base: Option<Vec<Q>>) -> Result<Self> {
        if labels.is_empty() {
            return domain("an atom space needs at least one atom");
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Invalid(format!("duplicate atom label {dup:?}")));
        }
        if let Some(w) = &base {
            if w.len() != labels.len() {
                return Err(Error::LengthMismatch {
                    left: w.len(),
                    right: labels.len(),
                });
            }
            if w.iter().any(Signed::is_negative) {
                return domain("base weights must be nonnegative");
            }
            if w.iter().sum::<Q>() != Q::one() {
                return domain("base weights must sum to exactly 1");
            }
        }
        Ok(AtomSpace { labels, base })
    }

    /// Atoms labelled `0..n` without base weights.
    pub fn indexed(n: usize) -> Result<Self> {
        AtomSpace::new((0..n).map(|i| i.to_string()).collect(), None)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let w = vec![Q::new(1.into(), (n.max(1) as i64).into()); n];
        AtomSpace::new((0..n).map(|i| i.to_string()).collect(), Some(w))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn base(&self) -> Option<&[Q]> {
        self.base.as_deref()
    }
}

/// The σ-algebra generated by a partition of the atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    cells: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates an exact cover by disjoint nonempty cells and sorts it canonically.
    pub fn new(n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![false; n];
        let mut cells: Vec<Vec<usize>> = cells
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        for c in &cells {
            if c.is_empty() {
                return Err(Error::Invalid("empty cell in partition".into()));
            }
            for &a in c {
                if a >= n {
                    return Err(Error::IndexOutOfRange { index: a, len: n });
                }
                if owner[a] {
                    return Err(Error::Invalid(format!("atom {a} lies in two cells")));
                }
                owner[a] = true;
            }
        }
        if let Some(a) = owner.iter().position(|&o| !o) {
            return Err(Error::Invalid(format!("atom {a} is not covered")));
        }
        cells.sort_unstable_by_key(|c| c[0]);
        Ok(Partition { n, cells })
    }

    pub fn discrete(n: usize) -> Self {
        Partition {
            n,
            cells: (0..n).map(|a| vec![a]).collect(),
        }
    }

    pub fn trivial(n: usize) -> Self {
        Partition {
            n,
            cells: vec![(0..n).collect()],
        }
    }

    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Cell index of every atom.
    pub fn labeling(&self) -> Vec<usize> {
        let mut lab = vec![0; self.n];
        for (i, c) in self.cells.iter().enumerate() {
            for &a in c {
                lab[a] = i;
            }
        }
        lab
    }

    /// Whether every cell of `self` is a union of cells of `finer`.
    pub fn is_refined_by(&self, finer: &Partition) -> bool {
        if self.n != finer.n {
            return false;
        }
        let lab = self.labeling();
        finer
            .cells
            .iter()
            .all(|c| c.iter().all(|&a| lab[a] == lab[c[0]]))
    }

    /// Whether `set` is a union of cells.
    pub fn is_measurable(&self, set: &[usize]) -> bool {
        let s: HashSet<usize> = set.iter().copied().collect();
        self.cells
            .iter()
            .all(|c| c.iter().all(|a| s.contains(a)) || c.iter().all(|a| !s.contains(a)))
    }

    /// Cells contained in `set`, failing when `set` is not measurable.
    pub fn cells_within(&self, set: &[usize]) -> Result<Vec<&Vec<usize>>> {
        if let Some(&a) = set.iter().find(|&&a| a >= self.n) {
            return Err(Error::IndexOutOfRange { index: a, len: self.n });
        }
        if !self.is_measurable(set) {
            return Err(Error::NotMeasurable(format!("{set:?} is not a union of cells")));
        }
        let s: HashSet<usize> = set.iter().copied().collect();
        Ok(self.cells.iter().filter(|c| s.contains(&c[0])).collect())
    }
}

/// A measure on a finite atom space with values in `ℚ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure {
    kind: ValueKind,
    norm: NormDescriptor,
    weights: Vec<Vec<Q>>,
}

impl SignedMeasure {
    pub fn real(weights: Vec<Q>) -> Self {
        SignedMeasure {
            kind: ValueKind::Real,
            norm: NormDescriptor::l1(),
            weights: weights.into_iter().map(|w| vec![w]).collect(),
        }
    }

    pub fn real_ints(weights: &[i64]) -> Self {
        SignedMeasure::real(weights.iter().map(|&w| Q::from_integer(w.into())).collect())
    }

    pub fn complex(weights: Vec<ComplexQ>) -> Self {
        SignedMeasure {
            kind: ValueKind::Complex,
            norm: NormDescriptor::l2(),
            weights: weights.into_iter().map(|z| vec![z.re, z.im]).collect(),
        }
    }

    pub fn vector(weights: Vec<Vec<Q>>, norm: NormDescriptor) -> Result<Self> {
        let d = weights.first().map_or(0, Vec::len);
        if let Some(w) = weights.iter().find(|w| w.len() != d) {
            return Err(Error::LengthMismatch { left: w.len(), right: d });
        }
        norm.check_dimension(d)?;
        Ok(SignedMeasure {
            kind: ValueKind::Vector,
            norm,
            weights,
        })
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ValueKind::Real => 1,
            ValueKind::Complex => 2,
            ValueKind::Vector => self.weights.first().map_or(0, Vec::len),
        }
    }

    pub fn weights(&self) -> &[Vec<Q>] {
        &self.weights
    }

    /// Real weights, when the measure is real.
    pub fn real_weights(&self) -> Option<Vec<Q>> {
        (self.kind == ValueKind::Real).then(|| self.weights.iter().map(|w| w[0].clone()).collect())
    }

    fn with_weights(&self, weights: Vec<Vec<Q>>) -> SignedMeasure {
        SignedMeasure {
            kind: self.kind,
            norm: self.norm.clone(),
            weights,
        }
    }

    /// `μ(A)` for an atom set.
    pub fn measure_of(&self, set: &[usize]) -> Result<Vec<Q>> {
        let mut acc = vec![Q::zero(); self.dim()];
        for &a in set {
            let w = self.weights.get(a).ok_or(Error::IndexOutOfRange {
                index: a,
                len: self.atoms(),
            })?;
            for (x, y) in acc.iter_mut().zip(w) {
                *x += y;
            }
        }
        Ok(acc)
    }

    pub fn norm_of(&self, v: &[Q]) -> NormValue {
        self.norm.value(v)
    }

    /// Atomwise `|μ|` on the discrete algebra.
    pub fn variation_weights(&self) -> Vec<NormValue> {
        self.weights.iter().map(|w| self.norm.value(w)).collect()
    }

    pub fn is_nonnegative_real(&self) -> bool {
        self.kind == ValueKind::Real && self.weights.iter().all(|w| !w[0].is_negative())
    }

    pub fn negate(&self) -> SignedMeasure {
        self.with_weights(
            self.weights
                .iter()
                .map(|w| w.iter().map(|x| -x).collect())
                .collect(),
        )
    }

    /// `μ` restricted to the atoms of `set`.
    pub fn restrict(&self, set: &[usize]) -> SignedMeasure {
        let keep: HashSet<usize> = set.iter().copied().collect();
        self.with_weights(
            self.weights
                .iter()
                .enumerate()
                .map(|(a, w)| {
                    if keep.contains(&a) {
                        w.clone()
                    } else {
                        vec![Q::zero(); w.len()]
                    }
                })
                .collect(),
        )
    }
}

/// `|μ|(A) = Σ_{cells C ⊆ A} ‖μ(C)‖` on the algebra generated by `p`.
pub fn total_variation(mu: &SignedMeasure, p: &Partition, set: &[usize]) -> Result<NormValue> {
    if p.atoms() != mu.atoms() {
        return Err(Error::LengthMismatch {
            left: p.atoms(),
            right: mu.atoms(),
        });
    }
    let cells = p.cells_within(set)?;
    let values: Vec<NormValue> = cells
        .into_iter()
        .map(|c| mu.measure_of(c).map(|v| mu.norm_of(&v)))
        .collect::<Result<_>>()?;
    Ok(NormValue::sum(&values))
}

/// `max ‖μ(B)‖ + ‖μ(C)‖` over splits `A = B ⊔ C`, by enumeration.
pub fn two_set_variation(mu: &SignedMeasure, set: &[usize]) -> Result<NormValue> {
    let set: Vec<usize> = set.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let guard = crate::sums::subset_guard();
    if set.len() > guard {
        return Err(Error::Guard {
            size: set.len(),
            limit: guard,
            hint: "two-set splits are enumerated exhaustively".into(),
        });
    }
    let total = mu.measure_of(&set)?;
    let mut best = NormValue::Exact(Q::zero());
    let mut b = vec![Q::zero(); mu.dim()];
    let mut inside = vec![false; set.len()];
    // Gray code over B; C = A \ B.
    let mut consider = |b: &[Q]| {
        let c: Vec<Q> = total.iter().zip(b).map(|(t, x)| t - x).collect();
        let v = NormValue::sum(&[mu.norm_of(b), mu.norm_of(&c)]);
        if v.cmp_value(&best) == std::cmp::Ordering::Greater {
            best = v;
        }
    };
    consider(&b);
    for i in 1u64..(1u64 << set.len()) {
        let j = i.trailing_zeros() as usize;
        let w = &mu.weights[set[j]];
        for (x, y) in b.iter_mut().zip(w) {
            if inside[j] {
                *x -= y;
            } else {
                *x += y;
            }
        }
        inside[j] = !inside[j];
        consider(&b);
    }
    Ok(best)
}

fn require_real(mu: &SignedMeasure, what: &str) -> Result<Vec<Q>> {
    mu.real_weights()
        .ok_or_else(|| Error::Invalid(format!("{what} needs a real measure")))
}

/// Jordan decomposition `μ = μ⁺ − μ⁻`, computed atomwise.
pub fn jordan_decompose(mu: &SignedMeasure) -> Result<(SignedMeasure, SignedMeasure)> {
    let w = require_real(mu, "Jordan decomposition")?;
    let zero = Q::zero();
    let pos = w.iter().map(|x| x.clone().max(zero.clone())).collect();
    let neg = w.iter().map(|x| (-x).max(zero.clone())).collect();
    Ok((SignedMeasure::real(pos), SignedMeasure::real(neg)))
}

/// Hahn decomposition `X = P ⊔ Q`; zero-weight atoms go to `P`.
pub fn hahn_decompose(mu: &SignedMeasure) -> Result<(Vec<usize>, Vec<usize>)> {
    let w = require_real(mu, "Hahn decomposition")?;
    Ok((0..w.len()).partition(|&a| !w[a].is_negative()))
}

fn nonnegative_base(nu: &SignedMeasure, mu: &SignedMeasure) -> Result<Vec<Q>> {
    if nu.atoms() != mu.atoms() {
        return Err(Error::LengthMismatch {
            left: mu.atoms(),
            right: nu.atoms(),
        });
    }
    if !nu.is_nonnegative_real() {
        return domain("the reference measure must be real and nonnegative");
    }
    Ok(nu.real_weights().expect("real"))
}

/// Density `h = dμ/dν` per atom, zero on `ν`-null atoms.
pub fn radon_nikodym(mu: &SignedMeasure, nu: &SignedMeasure) -> Result<Vec<Vec<Q>>> {
    let base = nonnegative_base(nu, mu)?;
    mu.weights
        .iter()
        .zip(&base)
        .enumerate()
        .map(|(a, (w, v))| {
            if v.is_zero() {
                if w.iter().any(|x| !x.is_zero()) {
                    return Err(Error::NotAbsolutelyContinuous { atom: a });
                }
                Ok(vec![Q::zero(); w.len()])
            } else {
                Ok(w.iter().map(|x| x / v).collect())
            }
        })
        .collect()
}

/// `∫_A h dν` for a density `h`.
pub fn reconstruct(h: &[Vec<Q>], nu: &SignedMeasure, set: &[usize]) -> Result<Vec<Q>> {
    let base = nu
        .real_weights()
        .ok_or_else(|| Error::Invalid("reference measure must be real".into()))?;
    let d = h.first().map_or(0, Vec::len);
    let mut acc = vec![Q::zero(); d];
    for &a in set {
        if a >= h.len() {
            return Err(Error::IndexOutOfRange { index: a, len: h.len() });
        }
        for (x, y) in acc.iter_mut().zip(&h[a]) {
            *x += y * &base[a];
        }
    }
    Ok(acc)
}

/// `d|μ|` as a real measure, when every atomic variation is rational.
pub fn variation_measure(mu: &SignedMeasure) -> Result<SignedMeasure> {
    let w = mu
        .variation_weights()
        .into_iter()
        .map(|v| match v {
            NormValue::Exact(x) => Ok(x),
            NormValue::Squared(s) => sqrt_exact(&s).ok_or(()),
            NormValue::Float(_) => Err(()),
        })
        .collect::<std::result::Result<Vec<Q>, ()>>()
        .map_err(|_| Error::Invalid("atomic variations are not all rational".into()))?;
    Ok(SignedMeasure::real(w))
}

/// `h = dμ/d|μ|`, with `‖h‖ = 1` on the support of `|μ|` and `h = 0` elsewhere.
pub fn polar_density(mu: &SignedMeasure) -> Result<Vec<Vec<Q>>> {
    radon_nikodym(mu, &variation_measure(mu)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LebesgueDecomposition {
    pub absolutely_continuous: SignedMeasure,
    pub singular: SignedMeasure,
    pub density: Vec<Vec<Q>>,
}

/// `μ = μ_ac + μ_sing` with `μ_sing` carried by the `ν`-null atoms.
pub fn lebesgue_decompose(mu: &SignedMeasure, nu: &SignedMeasure) -> Result<LebesgueDecomposition> {
    let base = nonnegative_base(nu, mu)?;
    let null: Vec<usize> = (0..base.len()).filter(|&a| base[a].is_zero()).collect();
    let support: Vec<usize> = (0..base.len()).filter(|&a| !base[a].is_zero()).collect();
    let singular = mu.restrict(&null);
    let absolutely_continuous = mu.restrict(&support);
    let density = radon_nikodym(&absolutely_continuous, nu)?;
    Ok(LebesgueDecomposition {
        absolutely_continuous,
        singular,
        density,
    })
}

/// `μ(A △ B)` for a nonnegative measure.
pub fn symdiff_distance(mu: &SignedMeasure, a: &[usize], b: &[usize]) -> Result<Q> {
    if !mu.is_nonnegative_real() {
        return domain("symmetric-difference distance needs a nonnegative measure");
    }
    let sa: BTreeSet<usize> = a.iter().copied().collect();
    let sb: BTreeSet<usize> = b.iter().copied().collect();
    let diff: Vec<usize> = sa.symmetric_difference(&sb).copied().collect();
    Ok(mu.measure_of(&diff)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn all(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn total_variation_examples() {
        let mu = SignedMeasure::real_ints(&[2, -3, 1]);
        assert_eq!(
            total_variation(&mu, &Partition::discrete(3), &all(3)).unwrap(),
            NormValue::Exact(qi(6))
        );
        let coarse = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(total_variation(&mu, &coarse, &all(3)).unwrap(), NormValue::Exact(qi(2)));
        assert!(matches!(
            total_variation(&mu, &coarse, &[0]),
            Err(Error::NotMeasurable(_))
        ));
        let zero = SignedMeasure::real_ints(&[0, 0]);
        assert_eq!(total_variation(&zero, &Partition::discrete(2), &[1]).unwrap(), NormValue::Exact(qi(0)));
    }

    #[test]
    fn partitions_validate_and_sort() {
        let p = Partition::new(4, vec![vec![3, 2], vec![1, 0]]).unwrap();
        assert_eq!(p.cells(), &[vec![0, 1], vec![2, 3]]);
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(p.is_refined_by(&Partition::discrete(4)));
        assert!(!Partition::discrete(4).is_refined_by(&p));
        assert!(Partition::trivial(4).is_refined_by(&p));
    }

    #[test]
    fn jordan_and_hahn_examples() {
        let mu = SignedMeasure::real_ints(&[2, -3, 1]);
        let (pos, neg) = jordan_decompose(&mu).unwrap();
        assert_eq!(pos, SignedMeasure::real_ints(&[2, 0, 1]));
        assert_eq!(neg, SignedMeasure::real_ints(&[0, 3, 0]));
        let (sw_pos, sw_neg) = jordan_decompose(&mu.negate()).unwrap();
        assert_eq!((sw_pos, sw_neg), (neg, pos));
        assert_eq!(hahn_decompose(&mu).unwrap(), (vec![0, 2], vec![1]));
        assert_eq!(hahn_decompose(&SignedMeasure::real_ints(&[0, 0])).unwrap(), (vec![0, 1], vec![]));
        assert_eq!(hahn_decompose(&SignedMeasure::real_ints(&[-1, -2])).unwrap(), (vec![], vec![0, 1]));
        let z = SignedMeasure::complex(vec![ComplexQ::new(qi(1), qi(1))]);
        assert!(jordan_decompose(&z).is_err());
    }

    #[test]
    fn radon_nikodym_examples() {
        let mu = SignedMeasure::real_ints(&[1, 2]);
        let nu = SignedMeasure::real(vec![q(1, 2), q(1, 2)]);
        assert_eq!(radon_nikodym(&mu, &nu).unwrap(), vec![vec![qi(2)], vec![qi(4)]]);
        assert_eq!(radon_nikodym(&nu, &nu).unwrap(), vec![vec![qi(1)], vec![qi(1)]]);
        let singular = radon_nikodym(&SignedMeasure::real_ints(&[1, 0]), &SignedMeasure::real_ints(&[0, 1]));
        assert_eq!(singular, Err(Error::NotAbsolutelyContinuous { atom: 0 }));
    }

    #[test]
    fn lebesgue_examples() {
        let d = lebesgue_decompose(&SignedMeasure::real_ints(&[1, 1]), &SignedMeasure::real_ints(&[1, 0])).unwrap();
        assert_eq!(d.absolutely_continuous, SignedMeasure::real_ints(&[1, 0]));
        assert_eq!(d.singular, SignedMeasure::real_ints(&[0, 1]));
        assert_eq!(d.density, vec![vec![qi(1)], vec![qi(0)]]);
        let d = lebesgue_decompose(&SignedMeasure::real_ints(&[3, -1]), &SignedMeasure::real_ints(&[1, 2])).unwrap();
        assert_eq!(d.singular, SignedMeasure::real_ints(&[0, 0]));
    }

    #[test]
    fn polar_density_has_unit_modulus() {
        let mu = SignedMeasure::complex(vec![
            ComplexQ::new(qi(3), qi(4)),
            ComplexQ::new(qi(0), qi(0)),
            ComplexQ::new(qi(-2), qi(0)),
        ]);
        let h = polar_density(&mu).unwrap();
        assert_eq!(h[0], vec![q(3, 5), q(4, 5)]);
        assert_eq!(h[1], vec![qi(0), qi(0)]);
        assert_eq!(h[2], vec![qi(-1), qi(0)]);
        let irrational = SignedMeasure::complex(vec![ComplexQ::new(qi(1), qi(1))]);
        assert!(polar_density(&irrational).is_err());
    }

    #[test]
    fn symdiff_examples() {
        let mu = SignedMeasure::real(vec![q(1, 4); 4]);
        assert_eq!(symdiff_distance(&mu, &[0, 1], &[1, 2]).unwrap(), q(1, 2));
        assert_eq!(symdiff_distance(&mu, &[0, 1], &[0, 1]).unwrap(), qi(0));
        assert_eq!(symdiff_distance(&mu, &[], &all(4)).unwrap(), qi(1));
        assert!(symdiff_distance(&SignedMeasure::real_ints(&[-1]), &[], &[0]).is_err());
    }

    #[test]
    fn two_set_matches_discrete_variation() {
        let mu = SignedMeasure::real_ints(&[2, -3, 1, -5, 0]);
        assert_eq!(two_set_variation(&mu, &all(5)).unwrap(), NormValue::Exact(qi(11)));
    }

    #[test]
    fn atom_space_validation() {
        assert!(AtomSpace::new(vec!["a".into(), "a".into()], None).is_err());
        assert!(AtomSpace::new(vec!["a".into()], Some(vec![q(1, 2)])).is_err());
        assert!(AtomSpace::uniform(3).is_ok());
    }
}
