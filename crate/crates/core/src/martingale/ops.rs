use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::filtration::AdaptedSequence;
use crate::error::{domain, Result};
use crate::norms::{NormValue, ValueKind};
use crate::scalar::{certify_le, pow_enclosure, q_to_f64, qi, Certified, Enclosure, Scalar, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqClass {
    Martingale,
    Submartingale,
    Supermartingale,
    None,
}

impl SeqClass {
    pub fn label(self) -> &'static str {
        match self {
            SeqClass::Martingale => "martingale",
            SeqClass::Submartingale => "submartingale",
            SeqClass::Supermartingale => "supermartingale",
            SeqClass::None => "none",
        }
    }
}

/// A cell where `f_j` differs from `E(f_{j+1} | B_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub stage: usize,
    pub cell: usize,
    pub value: Vec<Q>,
    pub expected: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: SeqClass,
    pub witness: Option<Witness>,
}

/// Compares `f_j` with `E(f_{j+1} | B_j)` on every cell. Vector sequences are either
/// martingales or nothing.
pub fn classify(seq: &AdaptedSequence) -> Classification {
    let filt = seq.filtration();
    let real = seq.kind() == ValueKind::Real;
    let (mut sub, mut sup) = (real, real);
    let mut witness = None;
    for j in 0..seq.len().saturating_sub(1) {
        let next = filt.average(seq.stage_values(j + 1), j).expect("stage exists");
        for (c, cell) in filt.stage(j).expect("stage exists").cells().iter().enumerate() {
            let a = cell[0];
            let (v, e) = (&seq.stage_values(j)[a], &next[a]);
            if v == e {
                continue;
            }
            if real {
                match v[0].cmp(&e[0]) {
                    Ordering::Less => sup = false,
                    _ => sub = false,
                }
            }
            if witness.is_none() {
                witness = Some(Witness {
                    stage: j,
                    cell: c,
                    value: v.clone(),
                    expected: e.clone(),
                });
            }
        }
    }
    let class = match (&witness, sub, sup) {
        (None, _, _) => SeqClass::Martingale,
        (Some(_), true, _) => SeqClass::Submartingale,
        (Some(_), _, true) => SeqClass::Supermartingale,
        _ => SeqClass::None,
    };
    Classification { class, witness }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoobDecomposition {
    pub martingale: AdaptedSequence,
    /// Predictable, nondecreasing, starting at 0.
    pub compensator: AdaptedSequence,
}

/// `f_l = m_l + A_l` with `A_l = Σ_{j<l} E(f_{j+1} − f_j | B_j)`.
pub fn doob_decompose(seq: &AdaptedSequence) -> Result<DoobDecomposition> {
    let class = classify(seq).class;
    if !matches!(class, SeqClass::Martingale | SeqClass::Submartingale) {
        return domain(format!("Doob decomposition needs a submartingale, found {}", class.label()));
    }
    let filt = seq.filtration();
    let n = filt.atoms();
    let mut comp: Vec<Vec<Vec<Q>>> = vec![vec![vec![Q::zero()]; n]];
    for j in 0..seq.len() - 1 {
        let next = filt.average(seq.stage_values(j + 1), j)?;
        let step: Vec<Vec<Q>> = (0..n)
            .map(|a| vec![&comp[j][a][0] + &next[a][0] - &seq.stage_values(j)[a][0]])
            .collect();
        comp.push(step);
    }
    let mart: Vec<Vec<Vec<Q>>> = seq
        .values()
        .iter()
        .zip(&comp)
        .map(|(f, a)| f.iter().zip(a).map(|(x, y)| vec![&x[0] - &y[0]]).collect())
        .collect();
    // A_j is stage-(j−1) measurable, so it is also adapted at stage j.
    Ok(DoobDecomposition {
        martingale: seq.with_values(mart)?,
        compensator: seq.with_values(comp)?,
    })
}

/// `f_n^*(a) = max_{j ≤ n} ‖f_j(a)‖`.
pub fn maximal_function(seq: &AdaptedSequence, n: usize) -> Result<Vec<NormValue>> {
    if n >= seq.len() {
        return Err(crate::Error::IndexOutOfRange {
            index: n,
            len: seq.len(),
        });
    }
    let mut best = seq.norms(0);
    for j in 1..=n {
        for (b, v) in best.iter_mut().zip(seq.norms(j)) {
            if v.cmp_value(b) == Ordering::Greater {
                *b = v;
            }
        }
    }
    Ok(best)
}

/// `∫ g dμ` for per-atom norm values, exact when every value is rational.
pub fn integrate_norms(weights: &[Q], values: &[NormValue]) -> Scalar {
    let mut exact = Q::zero();
    for (w, v) in weights.iter().zip(values) {
        match v {
            NormValue::Exact(x) => exact += w * x,
            NormValue::Squared(s) if s.is_zero() => {}
            _ => {
                return Scalar::Float(
                    weights
                        .iter()
                        .zip(values)
                        .map(|(w, v)| q_to_f64(w) * v.to_f64())
                        .sum(),
                )
            }
        }
    }
    Scalar::Exact(exact)
}

/// `sup_n ∫ ‖f_n‖ dμ` over the stored stages.
pub fn l1_bound(seq: &AdaptedSequence) -> Scalar {
    let w = seq.filtration().weights();
    (0..seq.len())
        .map(|j| integrate_norms(w, &seq.norms(j)))
        .reduce(Scalar::max)
        .unwrap_or_else(Scalar::zero)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakTypeReport {
    pub t: Q,
    /// `μ{f* > t}`.
    pub level_mass: Q,
    pub lhs: Q,
    pub bound: Scalar,
    pub holds: bool,
}

/// `t · μ{f* > t} ≤ sup_n ∫ ‖f_n‖`.
pub fn weak_type_check(seq: &AdaptedSequence, t: &Q) -> Result<WeakTypeReport> {
    if !t.is_positive() {
        return domain("threshold must be positive");
    }
    let star = maximal_function(seq, seq.len() - 1)?;
    let tv = NormValue::Exact(t.clone());
    let level_mass: Q = seq
        .filtration()
        .weights()
        .iter()
        .zip(&star)
        .filter(|(_, v)| v.cmp_value(&tv) == Ordering::Greater)
        .map(|(w, _)| w)
        .sum();
    let lhs = t * &level_mass;
    let bound = l1_bound(seq);
    let holds = Scalar::Exact(lhs.clone()).le_tol(&bound);
    Ok(WeakTypeReport {
        t: t.clone(),
        level_mass,
        lhs,
        bound,
        holds,
    })
}

/// `p · 2^{p−1} / (p − 1)`.
pub fn doob_constant(p: &Q, bits: u32) -> Enclosure {
    let one = Q::one();
    let factor = p / (p - &one);
    if p == &one {
        return Enclosure::exact(factor);
    }
    pow_enclosure(&qi(2), &(p - &one), bits).scale(&factor)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoobLpReport {
    pub p: Q,
    pub stage: usize,
    /// `∫ (f_n^*)^p`.
    pub lhs: Scalar,
    pub constant: Scalar,
    /// `constant · ∫ f_n^p`.
    pub rhs: Scalar,
    pub ratio: f64,
    pub holds: bool,
    pub certified: Certified,
}

fn grouped(weights: &[Q], values: &[Q]) -> BTreeMap<Q, Q> {
    let mut m: BTreeMap<Q, Q> = BTreeMap::new();
    for (w, v) in weights.iter().zip(values) {
        *m.entry(v.clone()).or_insert_with(Q::zero) += w;
    }
    m
}

fn power_integral(groups: &BTreeMap<Q, Q>, p: &Q, bits: u32) -> Enclosure {
    groups
        .iter()
        .fold(Enclosure::zero(), |acc, (v, w)| acc.add(&pow_enclosure(v, p, bits).scale(w)))
}

fn enclosure_scalar(e: &Enclosure) -> Scalar {
    if e.is_point() {
        Scalar::Exact(e.lo.clone())
    } else {
        Scalar::Float(e.midpoint_f64())
    }
}

/// `∫ (f_n^*)^p ≤ (p 2^{p−1}/(p−1)) ∫ f_n^p` for a nonnegative submartingale, decided
/// with rational enclosures of the irrational powers.
pub fn doob_lp_check(seq: &AdaptedSequence, p: &Q) -> Result<DoobLpReport> {
    if p <= &Q::one() {
        return domain("the Doob inequality needs p > 1");
    }
    if !seq.is_real() {
        return domain("the Doob inequality is checked for real sequences");
    }
    let n = seq.len() - 1;
    let last = seq.real_stage(n).expect("real");
    if (0..=n).any(|j| seq.stage_values(j).iter().any(|v| v[0].is_negative())) {
        return domain("the sequence must be nonnegative");
    }
    let class = classify(seq).class;
    if !matches!(class, SeqClass::Martingale | SeqClass::Submartingale) {
        return domain(format!("expected a submartingale, found {}", class.label()));
    }
    let star: Vec<Q> = maximal_function(seq, n)?
        .into_iter()
        .map(|v| match v {
            NormValue::Exact(x) => x,
            _ => unreachable!("real norms are exact"),
        })
        .collect();
    let w = seq.filtration().weights();
    let star_groups = grouped(w, &star);
    let last_groups = grouped(w, &last);
    let sides = |bits: u32| {
        let lhs = power_integral(&star_groups, p, bits);
        let rhs = doob_constant(p, bits).mul_nonneg(&power_integral(&last_groups, p, bits));
        (lhs, rhs)
    };
    let certified = certify_le(sides);
    let (lhs, rhs) = sides(64);
    let constant = doob_constant(p, 64);
    let ratio = if rhs.hi.is_zero() {
        0.0
    } else {
        lhs.midpoint_f64() / power_integral(&last_groups, p, 64).midpoint_f64()
    };
    Ok(DoobLpReport {
        p: p.clone(),
        stage: n,
        lhs: enclosure_scalar(&lhs),
        constant: enclosure_scalar(&constant),
        rhs: enclosure_scalar(&rhs),
        ratio,
        holds: certified.holds(),
        certified,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityRow {
    pub t: Q,
    /// `max_n ∫_{‖f_n‖ > t} ‖f_n‖ dμ`.
    pub tail: Scalar,
}

/// Tail integrals on a threshold grid. There is no verdict: finitely many stages
/// cannot decide uniform integrability.
pub fn uniform_integrability(seq: &AdaptedSequence, ts: &[Q]) -> Vec<IntegrabilityRow> {
    let w = seq.filtration().weights();
    ts.iter()
        .map(|t| {
            let tv = NormValue::Exact(t.clone());
            let tail = (0..seq.len())
                .map(|j| {
                    let norms: Vec<NormValue> = seq
                        .norms(j)
                        .into_iter()
                        .map(|v| {
                            if v.cmp_value(&tv) == Ordering::Greater {
                                v
                            } else {
                                NormValue::Exact(Q::zero())
                            }
                        })
                        .collect();
                    integrate_norms(w, &norms)
                })
                .reduce(Scalar::max)
                .unwrap_or_else(Scalar::zero);
            IntegrabilityRow { t: t.clone(), tail }
        })
        .collect()
}

/// `Σ_j ‖f_{j+1} − f_j‖_p` and `max_j ‖f_j‖_p`, the finite-stage versions of the two
/// hypotheses of the increment convergence criterion.
pub fn increment_surrogates(seq: &AdaptedSequence, p: f64) -> (f64, f64) {
    let w: Vec<f64> = seq.filtration().weights().iter().map(q_to_f64).collect();
    let lp = |f: &dyn Fn(usize) -> f64| -> f64 {
        (0..w.len()).map(|a| w[a] * f(a).powf(p)).sum::<f64>().powf(1.0 / p)
    };
    let norm_of = |v: Vec<Q>| seq.norm().value(&v).to_f64();
    let increments = (0..seq.len().saturating_sub(1))
        .map(|j| {
            lp(&|a| {
                norm_of(
                    seq.stage_values(j + 1)[a]
                        .iter()
                        .zip(&seq.stage_values(j)[a])
                        .map(|(x, y)| x - y)
                        .collect(),
                )
            })
        })
        .sum();
    let bound = (0..seq.len())
        .map(|j| lp(&|a| norm_of(seq.stage_values(j)[a].clone())))
        .fold(0.0, f64::max);
    (increments, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::Filtration;
    use crate::scalar::q;

    fn density_four() -> AdaptedSequence {
        let filt = Filtration::dyadic_standard(2).unwrap();
        AdaptedSequence::real_closed_by(filt, &[qi(4), qi(0), qi(0), qi(0)]).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&density_four()).class, SeqClass::Martingale);
        let filt = Filtration::dyadic_standard(1).unwrap();
        let up = AdaptedSequence::real(filt.clone(), vec![vec![qi(0); 2], vec![qi(1); 2]]).unwrap();
        let c = classify(&up);
        assert_eq!(c.class, SeqClass::Submartingale);
        assert_eq!(c.witness.unwrap().stage, 0);
        let down = AdaptedSequence::real(filt.clone(), vec![vec![qi(1); 2], vec![qi(0); 2]]).unwrap();
        assert_eq!(classify(&down).class, SeqClass::Supermartingale);
        let norm = density_four().norm_sequence().unwrap();
        assert_eq!(classify(&norm).class, SeqClass::Martingale);
        let signed = AdaptedSequence::real_closed_by(filt, &[qi(1), qi(-3)]).unwrap();
        assert_eq!(classify(&signed.norm_sequence().unwrap()).class, SeqClass::Submartingale);
    }

    #[test]
    fn doob_examples() {
        let filt = Filtration::dyadic_standard(2).unwrap();
        let up = AdaptedSequence::real(filt, (0..3).map(|j| vec![qi(j); 4]).collect()).unwrap();
        let d = doob_decompose(&up).unwrap();
        assert_eq!(d.compensator.real_stage(2).unwrap(), vec![qi(2); 4]);
        assert_eq!(classify(&d.martingale).class, SeqClass::Martingale);
        let m = doob_decompose(&density_four()).unwrap();
        assert!(m.compensator.values().iter().flatten().all(|v| v[0].is_zero()));
    }

    #[test]
    fn maximal_and_weak_type() {
        let seq = density_four();
        let star = maximal_function(&seq, 2).unwrap();
        let vals: Vec<f64> = star.iter().map(NormValue::to_f64).collect();
        assert_eq!(vals, vec![4.0, 2.0, 1.0, 1.0]);
        let r = weak_type_check(&seq, &qi(1)).unwrap();
        assert_eq!(r.level_mass, q(1, 2));
        assert_eq!(r.bound, Scalar::Exact(qi(1)));
        assert!(r.holds);
    }

    #[test]
    fn doob_lp_examples() {
        let r = doob_lp_check(&density_four(), &qi(2)).unwrap();
        assert_eq!(r.lhs, Scalar::Exact(q(11, 2)));
        assert_eq!(r.rhs, Scalar::Exact(qi(16)));
        assert!(r.holds);
        let r = doob_lp_check(&density_four(), &q(3, 2)).unwrap();
        assert_eq!(r.certified, Certified::True);
        let filt = Filtration::dyadic_standard(1).unwrap();
        let c = AdaptedSequence::real(filt, vec![vec![qi(3); 2]; 2]).unwrap();
        let r = doob_lp_check(&c, &q(3, 2)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        assert!(doob_lp_check(&density_four(), &qi(1)).is_err());
    }

    #[test]
    fn integrability_rows() {
        let rows = uniform_integrability(&density_four(), &[qi(0), qi(3)]);
        assert_eq!(rows[0].tail, Scalar::Exact(qi(1)));
        assert_eq!(rows[1].tail, Scalar::Exact(qi(1)));
        let (inc, bound) = increment_surrogates(&density_four(), 1.0);
        assert!((inc - 2.0).abs() < 1e-12);
        assert!((bound - 1.0).abs() < 1e-12);
    }
}
