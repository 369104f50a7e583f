use num::{BigInt, One, Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::measure::{AtomSpace, Partition};
use crate::norms::{NormDescriptor, NormValue, ValueKind};
use crate::scalar::{ComplexQ, Q};

/// An increasing chain of partition algebras on finitely many weighted atoms.
/// Stages are numbered from 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    weights: Vec<Q>,
    stages: Vec<Partition>,
    labels: Vec<Vec<usize>>,
    masses: Vec<Vec<Q>>,
}

impl Filtration {
    /// Every cell must carry positive mass and each stage must refine the previous one.
    pub fn new(weights: Vec<Q>, stages: Vec<Partition>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return domain("a filtration needs at least one atom");
        }
        if stages.is_empty() {
            return domain("a filtration needs at least one stage");
        }
        if weights.iter().any(Signed::is_negative) {
            return domain("atom weights must be nonnegative");
        }
        for (j, s) in stages.iter().enumerate() {
            if s.atoms() != n {
                return Err(Error::LengthMismatch {
                    left: s.atoms(),
                    right: n,
                });
            }
            if j > 0 && !stages[j - 1].is_refined_by(s) {
                return domain(format!("stage {j} does not refine stage {}", j - 1));
            }
        }
        let labels: Vec<Vec<usize>> = stages.iter().map(Partition::labeling).collect();
        let masses: Vec<Vec<Q>> = stages
            .iter()
            .map(|s| {
                s.cells()
                    .iter()
                    .map(|c| c.iter().map(|&a| &weights[a]).sum())
                    .collect()
            })
            .collect();
        for (j, m) in masses.iter().enumerate() {
            if let Some(c) = m.iter().position(Zero::is_zero) {
                return domain(format!("cell {c} of stage {j} has zero mass"));
            }
        }
        Ok(Filtration {
            weights,
            stages,
            labels,
            masses,
        })
    }

    pub fn on_space(space: &AtomSpace, stages: Vec<Partition>) -> Result<Self> {
        let w = space
            .base()
            .ok_or_else(|| Error::Invalid("the atom space carries no base weights".into()))?;
        Filtration::new(w.to_vec(), stages)
    }

    /// `[0,1)` cut into `2^resolution` atoms of equal mass, with the dyadic algebra of
    /// each listed level as a stage.
    pub fn dyadic(levels: &[u32], resolution: u32) -> Result<Self> {
        if levels.iter().any(|&l| l > resolution) {
            return domain("stage level exceeds the resolution");
        }
        if resolution > 16 {
            return Err(Error::Guard {
                size: resolution as usize,
                limit: 16,
                hint: "dyadic filtrations are stored atom by atom".into(),
            });
        }
        let n = 1usize << resolution;
        let w = Q::new(BigInt::one(), BigInt::from(n));
        let stages = levels
            .iter()
            .map(|&l| {
                let block = 1usize << (resolution - l);
                Partition::new(n, (0..n).step_by(block).map(|s| (s..s + block).collect()).collect())
            })
            .collect::<Result<_>>()?;
        Filtration::new(vec![w; n], stages)
    }

    /// Dyadic levels `0..=depth` at resolution `depth`.
    pub fn dyadic_standard(depth: u32) -> Result<Self> {
        Filtration::dyadic(&(0..=depth).collect::<Vec<_>>(), depth)
    }

    pub fn atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stages(&self) -> &[Partition] {
        &self.stages
    }

    pub fn stage(&self, j: usize) -> Result<&Partition> {
        self.stages.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.stages.len(),
        })
    }

    /// Cell index of each atom at stage `j`.
    pub fn labeling(&self, j: usize) -> &[usize] {
        &self.labels[j]
    }

    pub fn cell_masses(&self, j: usize) -> &[Q] {
        &self.masses[j]
    }

    pub fn total_mass(&self) -> Q {
        self.weights.iter().sum()
    }

    /// Whether a per-atom function is constant on the cells of stage `j`.
    pub fn is_measurable(&self, j: usize, f: &[Vec<Q>]) -> bool {
        self.stages[j]
            .cells()
            .iter()
            .all(|c| c.iter().all(|&a| f[a] == f[c[0]]))
    }

    /// `∫ f dμ` for a per-atom vector function.
    pub fn integral(&self, f: &[Vec<Q>]) -> Vec<Q> {
        let d = f.first().map_or(0, Vec::len);
        let mut acc = vec![Q::zero(); d];
        for (w, v) in self.weights.iter().zip(f) {
            for (x, y) in acc.iter_mut().zip(v) {
                *x += w * y;
            }
        }
        acc
    }

    /// `E(f | B_j)`, the cell averages of `f` at stage `j`, written per atom.
    pub fn average(&self, f: &[Vec<Q>], j: usize) -> Result<Vec<Vec<Q>>> {
        let stage = self.stage(j)?;
        if f.len() != self.atoms() {
            return Err(Error::LengthMismatch {
                left: f.len(),
                right: self.atoms(),
            });
        }
        let d = f.first().map_or(0, Vec::len);
        let mut out = vec![Vec::new(); self.atoms()];
        for (c, cell) in stage.cells().iter().enumerate() {
            let mut acc = vec![Q::zero(); d];
            for &a in cell {
                for (x, y) in acc.iter_mut().zip(&f[a]) {
                    *x += &self.weights[a] * y;
                }
            }
            let m = &self.masses[j][c];
            let avg: Vec<Q> = acc.into_iter().map(|x| x / m).collect();
            for &a in cell {
                out[a] = avg.clone();
            }
        }
        Ok(out)
    }
}

/// `E(f | B_j)` for `f` measurable at stage `l ≥ j`.
pub fn conditional_expectation(
    filtration: &Filtration,
    f: &[Vec<Q>],
    l: usize,
    j: usize,
) -> Result<Vec<Vec<Q>>> {
    if j > l {
        return domain(format!("target stage {j} is later than the source stage {l}"));
    }
    filtration.stage(l)?;
    if f.len() != filtration.atoms() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: filtration.atoms(),
        });
    }
    if !filtration.is_measurable(l, f) {
        return Err(Error::NotMeasurable(format!("function is not constant on stage-{l} cells")));
    }
    filtration.average(f, j)
}

/// Per-stage, per-atom values `f_j` adapted to a filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedSequence {
    filtration: Filtration,
    kind: ValueKind,
    norm: NormDescriptor,
    dim: usize,
    values: Vec<Vec<Vec<Q>>>,
}

impl AdaptedSequence {
    pub fn new(
        filtration: Filtration,
        kind: ValueKind,
        norm: NormDescriptor,
        values: Vec<Vec<Vec<Q>>>,
    ) -> Result<Self> {
        if values.is_empty() || values.len() > filtration.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: filtration.len(),
            });
        }
        let dim = values[0].first().map_or(0, Vec::len);
        match kind {
            ValueKind::Real if dim != 1 => return Err(Error::LengthMismatch { left: dim, right: 1 }),
            ValueKind::Complex if dim != 2 => return Err(Error::LengthMismatch { left: dim, right: 2 }),
            _ => {}
        }
        norm.check_dimension(dim)?;
        for (j, f) in values.iter().enumerate() {
            if f.len() != filtration.atoms() {
                return Err(Error::LengthMismatch {
                    left: f.len(),
                    right: filtration.atoms(),
                });
            }
            if let Some(v) = f.iter().find(|v| v.len() != dim) {
                return Err(Error::LengthMismatch {
                    left: v.len(),
                    right: dim,
                });
            }
            if !filtration.is_measurable(j, f) {
                return Err(Error::NotMeasurable(format!(
                    "stage-{j} values are not constant on stage-{j} cells"
                )));
            }
        }
        Ok(AdaptedSequence {
            filtration,
            kind,
            norm,
            dim,
            values,
        })
    }

    pub fn real(filtration: Filtration, values: Vec<Vec<Q>>) -> Result<Self> {
        let values = values
            .into_iter()
            .map(|f| f.into_iter().map(|x| vec![x]).collect())
            .collect();
        AdaptedSequence::new(filtration, ValueKind::Real, NormDescriptor::l1(), values)
    }

    pub fn complex(filtration: Filtration, values: Vec<Vec<ComplexQ>>) -> Result<Self> {
        let values = values
            .into_iter()
            .map(|f| f.into_iter().map(|z| vec![z.re, z.im]).collect())
            .collect();
        AdaptedSequence::new(filtration, ValueKind::Complex, NormDescriptor::l2(), values)
    }

    pub fn vector(filtration: Filtration, values: Vec<Vec<Vec<Q>>>, norm: NormDescriptor) -> Result<Self> {
        AdaptedSequence::new(filtration, ValueKind::Vector, norm, values)
    }

    /// Stage values given per cell rather than per atom.
    pub fn from_cells(
        filtration: Filtration,
        kind: ValueKind,
        norm: NormDescriptor,
        cells: Vec<Vec<Vec<Q>>>,
    ) -> Result<Self> {
        let values = cells
            .into_iter()
            .enumerate()
            .map(|(j, per_cell)| {
                let stage = filtration.stage(j)?;
                if per_cell.len() != stage.cells().len() {
                    return Err(Error::LengthMismatch {
                        left: per_cell.len(),
                        right: stage.cells().len(),
                    });
                }
                Ok(filtration
                    .labeling(j)
                    .iter()
                    .map(|&c| per_cell[c].clone())
                    .collect())
            })
            .collect::<Result<_>>()?;
        AdaptedSequence::new(filtration, kind, norm, values)
    }

    /// The martingale `f_j = E(f | B_j)` over every stage.
    pub fn closed_by(
        filtration: Filtration,
        kind: ValueKind,
        norm: NormDescriptor,
        f: &[Vec<Q>],
    ) -> Result<Self> {
        let values = (0..filtration.len())
            .map(|j| filtration.average(f, j))
            .collect::<Result<_>>()?;
        AdaptedSequence::new(filtration, kind, norm, values)
    }

    pub fn real_closed_by(filtration: Filtration, f: &[Q]) -> Result<Self> {
        let f: Vec<Vec<Q>> = f.iter().map(|x| vec![x.clone()]).collect();
        AdaptedSequence::closed_by(filtration, ValueKind::Real, NormDescriptor::l1(), &f)
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Vec<Vec<Q>>] {
        &self.values
    }

    pub fn stage_values(&self, j: usize) -> &[Vec<Q>] {
        &self.values[j]
    }

    /// Scalar values of stage `j`, when the sequence is real.
    pub fn real_stage(&self, j: usize) -> Option<Vec<Q>> {
        (self.kind == ValueKind::Real).then(|| self.values[j].iter().map(|v| v[0].clone()).collect())
    }

    pub fn is_real(&self) -> bool {
        self.kind == ValueKind::Real
    }

    /// `‖f_j(a)‖` for every atom.
    pub fn norms(&self, j: usize) -> Vec<NormValue> {
        self.values[j].iter().map(|v| self.norm.value(v)).collect()
    }

    /// The sequence `(‖f_j‖)` as a real adapted sequence, when every norm is rational.
    pub fn norm_sequence(&self) -> Result<AdaptedSequence> {
        let values = (0..self.len())
            .map(|j| {
                self.norms(j)
                    .into_iter()
                    .map(|v| match v {
                        NormValue::Exact(x) => Ok(x),
                        _ => domain("norm is irrational; no exact norm sequence"),
                    })
                    .collect::<Result<Vec<Q>>>()
            })
            .collect::<Result<_>>()?;
        AdaptedSequence::real(self.filtration.clone(), values)
    }

    pub(crate) fn with_values(&self, values: Vec<Vec<Vec<Q>>>) -> Result<AdaptedSequence> {
        AdaptedSequence::new(self.filtration.clone(), self.kind, self.norm.clone(), values)
    }

    /// The first `n + 1` stages.
    pub fn truncated(&self, n: usize) -> Result<AdaptedSequence> {
        if n >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.len(),
            });
        }
        self.with_values(self.values[..=n].to_vec())
    }
}
