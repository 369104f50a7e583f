//! Seeded generators of random filtrations, adapted sequences and stopping times.

use num::Signed;
use rand::seq::SliceRandom;
use rand::Rng;

use super::filtration::{AdaptedSequence, Filtration};
use super::stopping::StoppingTime;
use crate::error::Result;
use crate::measure::Partition;
use crate::norms::{NormDescriptor, ValueKind};
use crate::scalar::{q, Q};

pub fn rational<R: Rng>(rng: &mut R, range: i64, max_den: i64) -> Q {
    q(rng.gen_range(-range..=range), rng.gen_range(1..=max_den))
}

pub fn nonneg_rational<R: Rng>(rng: &mut R, range: i64, max_den: i64) -> Q {
    q(rng.gen_range(0..=range), rng.gen_range(1..=max_den))
}

/// Positive weights summing to 1.
pub fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| q(w, total)).collect()
}

fn refine<R: Rng>(rng: &mut R, p: &Partition) -> Partition {
    let mut cells = Vec::new();
    for c in p.cells() {
        if c.len() >= 2 && rng.gen_bool(0.6) {
            let mut c = c.clone();
            c.shuffle(rng);
            let cut = rng.gen_range(1..c.len());
            cells.push(c[..cut].to_vec());
            cells.push(c[cut..].to_vec());
        } else {
            cells.push(c.clone());
        }
    }
    Partition::new(p.atoms(), cells).expect("refinement of a partition")
}

/// A filtration on `1..=max_atoms` atoms with `1..=max_stages` stages, starting trivial.
pub fn filtration<R: Rng>(rng: &mut R, max_atoms: usize, max_stages: usize) -> Filtration {
    let n = rng.gen_range(1..=max_atoms);
    let k = rng.gen_range(1..=max_stages);
    let mut stages = vec![Partition::trivial(n)];
    while stages.len() < k {
        let next = refine(rng, stages.last().expect("nonempty"));
        stages.push(next);
    }
    Filtration::new(weights(rng, n), stages).expect("valid random filtration")
}

/// A per-atom `d`-vector function constant on the cells of stage `j`.
pub fn measurable_function<R: Rng>(rng: &mut R, filt: &Filtration, j: usize, d: usize) -> Vec<Vec<Q>> {
    let cells: Vec<Vec<Q>> = filt.stages()[j]
        .cells()
        .iter()
        .map(|_| (0..d).map(|_| rational(rng, 9, 4)).collect())
        .collect();
    filt.labeling(j).iter().map(|&c| cells[c].clone()).collect()
}

pub fn adapted<R: Rng>(rng: &mut R, filt: &Filtration, d: usize) -> AdaptedSequence {
    let values = (0..filt.len())
        .map(|j| measurable_function(rng, filt, j, d))
        .collect();
    let (kind, norm) = kind_for(d);
    AdaptedSequence::new(filt.clone(), kind, norm, values).expect("adapted by construction")
}

fn kind_for(d: usize) -> (ValueKind, NormDescriptor) {
    if d == 1 {
        (ValueKind::Real, NormDescriptor::l1())
    } else {
        (ValueKind::Vector, NormDescriptor::l2())
    }
}

/// `f_j = E(f | B_j)` for a random terminal `f`.
pub fn martingale<R: Rng>(rng: &mut R, filt: &Filtration, d: usize) -> AdaptedSequence {
    let last = filt.len() - 1;
    let f = measurable_function(rng, filt, last, d);
    let (kind, norm) = kind_for(d);
    AdaptedSequence::closed_by(filt.clone(), kind, norm, &f).expect("closed martingale")
}

/// A random stopping time; bounded by the last stage when `bounded`.
pub fn stopping_time<R: Rng>(rng: &mut R, filt: &Filtration, bounded: bool) -> StoppingTime {
    let mut values: Vec<Option<usize>> = vec![None; filt.atoms()];
    for n in 0..filt.len() {
        for cell in filt.stages()[n].cells() {
            if values[cell[0]].is_none() && rng.gen_bool(0.35) {
                for &a in cell {
                    values[a] = Some(n);
                }
            }
        }
    }
    if bounded {
        let last = filt.len() - 1;
        for v in values.iter_mut().filter(|v| v.is_none()) {
            *v = Some(last);
        }
    }
    StoppingTime::new(filt, values).expect("stopping time by construction")
}

/// A nonnegative submartingale on the dyadic filtration of depth `depth`: either the
/// modulus of a signed martingale or a nonnegative martingale plus a predictable
/// nondecreasing drift.
pub fn nonneg_dyadic_submartingale<R: Rng>(rng: &mut R, depth: u32) -> Result<AdaptedSequence> {
    let filt = Filtration::dyadic_standard(depth)?;
    let n = filt.atoms();
    if rng.gen_bool(0.5) {
        let f: Vec<Q> = (0..n).map(|_| rational(rng, 9, 3)).collect();
        AdaptedSequence::real_closed_by(filt, &f)?.norm_sequence()
    } else {
        let f: Vec<Q> = (0..n).map(|_| nonneg_rational(rng, 9, 3)).collect();
        let m = AdaptedSequence::real_closed_by(filt.clone(), &f)?;
        let mut drift = vec![Q::from_integer(0.into()); n];
        let mut values = Vec::with_capacity(m.len());
        for j in 0..m.len() {
            let stage = m.real_stage(j).expect("real");
            values.push(stage.iter().zip(&drift).map(|(x, a)| x + a).collect());
            let inc = measurable_function(rng, &filt, j, 1);
            for (a, v) in drift.iter_mut().zip(inc) {
                *a += v[0].abs();
            }
        }
        AdaptedSequence::real(filt, values)
    }
}

/// A nonnegative step density at level `depth` with small integer values.
pub fn density<R: Rng>(rng: &mut R, depth: u32) -> Vec<Q> {
    (0..1usize << depth).map(|_| q(rng.gen_range(0..=8), 1)).collect()
}
