use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::Zero;

use super::filtration::{AdaptedSequence, Filtration};
use super::ops::{classify, SeqClass};
use crate::error::{domain, Error, Result};
use crate::measure::Partition;
use crate::norms::NormValue;
use crate::scalar::Q;

/// A random time with values in the stage indices or `∞` (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoppingTime {
    values: Vec<Option<usize>>,
}

impl StoppingTime {
    /// Checks that `{τ ≤ n}` is a union of stage-`n` cells for every `n`.
    pub fn new(filtration: &Filtration, values: Vec<Option<usize>>) -> Result<Self> {
        if values.len() != filtration.atoms() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: filtration.atoms(),
            });
        }
        if let Some(&Some(v)) = values.iter().find(|v| v.is_some_and(|n| n >= filtration.len())) {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: filtration.len(),
            });
        }
        for n in 0..filtration.len() {
            let set: Vec<usize> = (0..values.len())
                .filter(|&a| values[a].is_some_and(|v| v <= n))
                .collect();
            if !filtration.stages()[n].is_measurable(&set) {
                return Err(Error::NotMeasurable(format!(
                    "{{τ ≤ {n}}} is not a union of stage-{n} cells"
                )));
            }
        }
        Ok(StoppingTime { values })
    }

    pub fn constant(filtration: &Filtration, n: usize) -> Result<Self> {
        StoppingTime::new(filtration, vec![Some(n); filtration.atoms()])
    }

    /// `min{n : ‖f_n‖ > t}`.
    pub fn first_passage(seq: &AdaptedSequence, t: &Q) -> Self {
        let tv = NormValue::Exact(t.clone());
        let mut values = vec![None; seq.filtration().atoms()];
        for j in 0..seq.len() {
            for (a, v) in seq.norms(j).iter().enumerate() {
                if values[a].is_none() && v.cmp_value(&tv) == Ordering::Greater {
                    values[a] = Some(j);
                }
            }
        }
        StoppingTime { values }
    }

    pub fn values(&self) -> &[Option<usize>] {
        &self.values
    }

    /// `max τ` when `τ` is finite everywhere.
    pub fn bound(&self) -> Option<usize> {
        self.values.iter().try_fold(0, |m, v| v.map(|v| m.max(v)))
    }

    /// `min(τ, N)`.
    pub fn truncated(&self, n: usize) -> StoppingTime {
        StoppingTime {
            values: self
                .values
                .iter()
                .map(|v| Some(v.map_or(n, |v| v.min(n))))
                .collect(),
        }
    }

    /// The partition generating `B_τ`: on `{τ = n}` the stage-`n` cells, on `{τ = ∞}`
    /// the cells of the last stage.
    pub fn sigma_algebra(&self, filtration: &Filtration) -> Partition {
        let last = filtration.len() - 1;
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (a, v) in self.values.iter().enumerate() {
            let n = v.unwrap_or(last);
            let key = (v.map_or(usize::MAX, |v| v), filtration.labeling(n)[a]);
            groups.entry(key).or_default().push(a);
        }
        Partition::new(filtration.atoms(), groups.into_values().collect())
            .expect("groups cover the atoms")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stopped {
    /// `f_τ(a)`, or `None` where `τ(a) = ∞`.
    pub values: Vec<Option<Vec<Q>>>,
    pub sigma: Partition,
}

/// `f_τ(x) = f_{τ(x)}(x)`. Atoms with `τ = ∞` are an error unless `allow_infinite`.
pub fn stop(seq: &AdaptedSequence, tau: &StoppingTime, allow_infinite: bool) -> Result<Stopped> {
    if tau.values.len() != seq.filtration().atoms() {
        return Err(Error::LengthMismatch {
            left: tau.values.len(),
            right: seq.filtration().atoms(),
        });
    }
    let mut values = Vec::with_capacity(tau.values.len());
    for (a, v) in tau.values.iter().enumerate() {
        match v {
            Some(n) if *n < seq.len() => values.push(Some(seq.stage_values(*n)[a].clone())),
            Some(n) => {
                return Err(Error::IndexOutOfRange {
                    index: *n,
                    len: seq.len(),
                })
            }
            None if allow_infinite => values.push(None),
            None => return domain(format!("τ = ∞ at atom {a}")),
        }
    }
    Ok(Stopped {
        values,
        sigma: tau.sigma_algebra(seq.filtration()),
    })
}

/// `g_n = f_{min(τ, n)}`.
pub fn stopped_sequence(seq: &AdaptedSequence, tau: &StoppingTime) -> Result<AdaptedSequence> {
    let values = (0..seq.len())
        .map(|n| {
            let t = tau.truncated(n);
            stop(seq, &t, false).map(|s| s.values.into_iter().map(|v| v.expect("finite")).collect())
        })
        .collect::<Result<_>>()?;
    seq.with_values(values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptionalStoppingReport {
    pub horizon: usize,
    pub cells: usize,
    pub holds: bool,
    /// Atoms of the first `B_τ` cell where `∫_A f_τ ≠ ∫_A f_N`.
    pub witness: Option<Vec<usize>>,
    pub stopped_mean: Vec<Q>,
    pub initial_mean: Vec<Q>,
}

/// `E(f_N | B_τ) = f_τ` for a martingale and `τ ≤ N`, the last stored stage, checked
/// as `∫_A f_τ = ∫_A f_N` on every generating cell `A` of `B_τ`.
pub fn optional_stopping_check(seq: &AdaptedSequence, tau: &StoppingTime) -> Result<OptionalStoppingReport> {
    let horizon = seq.len() - 1;
    match tau.bound() {
        Some(b) if b <= horizon => {}
        _ => return domain(format!("τ must be bounded by the last stage {horizon}")),
    }
    let class = classify(seq).class;
    if class != SeqClass::Martingale {
        return domain(format!("optional stopping needs a martingale, found {}", class.label()));
    }
    let stopped = stop(seq, tau, false)?;
    let filt = seq.filtration();
    let w = filt.weights();
    let d = seq.dim();
    let fn_last = seq.stage_values(horizon);
    let mut witness = None;
    let cell_integral = |cell: &[usize], f: &dyn Fn(usize) -> Vec<Q>| -> Vec<Q> {
        let mut acc = vec![Q::zero(); d];
        for &a in cell {
            for (x, y) in acc.iter_mut().zip(f(a)) {
                *x += &w[a] * y;
            }
        }
        acc
    };
    let ftau = |a: usize| stopped.values[a].clone().expect("finite");
    for cell in stopped.sigma.cells() {
        let lhs = cell_integral(cell, &ftau);
        let rhs = cell_integral(cell, &|a| fn_last[a].clone());
        if lhs != rhs && witness.is_none() {
            witness = Some(cell.clone());
        }
    }
    let all: Vec<usize> = (0..filt.atoms()).collect();
    Ok(OptionalStoppingReport {
        horizon,
        cells: stopped.sigma.cells().len(),
        holds: witness.is_none(),
        witness,
        stopped_mean: cell_integral(&all, &ftau),
        initial_mean: cell_integral(&all, &|a| seq.stage_values(0)[a].clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    fn density_four() -> AdaptedSequence {
        let filt = Filtration::dyadic_standard(2).unwrap();
        AdaptedSequence::real_closed_by(filt, &[qi(4), qi(0), qi(0), qi(0)]).unwrap()
    }

    #[test]
    fn first_passage_example() {
        let seq = density_four();
        let tau = StoppingTime::first_passage(&seq, &qi(1));
        assert_eq!(tau.values(), &[Some(1), Some(1), None, None]);
        assert!(StoppingTime::new(seq.filtration(), tau.values().to_vec()).is_ok());
        assert!(stop(&seq, &tau, false).is_err());
        let s = stop(&seq, &tau, true).unwrap();
        assert_eq!(s.values[0], Some(vec![qi(2)]));
        let t2 = tau.truncated(2);
        let r = optional_stopping_check(&seq, &t2).unwrap();
        assert!(r.holds);
        assert_eq!(r.stopped_mean, r.initial_mean);
    }

    #[test]
    fn constant_time_is_stage() {
        let seq = density_four();
        let tau = StoppingTime::constant(seq.filtration(), 1).unwrap();
        let s = stop(&seq, &tau, false).unwrap();
        assert_eq!(&s.sigma, &seq.filtration().stages()[1]);
        let g = stopped_sequence(&seq, &tau).unwrap();
        assert_eq!(classify(&g).class, SeqClass::Martingale);
    }

    #[test]
    fn rejects_anticipating_times() {
        let filt = Filtration::dyadic_standard(2).unwrap();
        assert!(StoppingTime::new(&filt, vec![Some(1), Some(2), Some(2), Some(2)]).is_err());
        assert!(StoppingTime::new(&filt, vec![Some(3); 4]).is_err());
    }
}
