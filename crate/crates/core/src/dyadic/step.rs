use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::scalar::{qi, Q};

pub const MAX_LEVEL: u32 = 24;

pub(crate) fn pow2(l: u32) -> Q {
    Q::from_integer(BigInt::one() << l as usize)
}

/// A function on `[0,1)` constant on the level-`l` dyadic intervals
/// `[j 2^{-l}, (j+1) 2^{-l})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicStep {
    level: u32,
    values: Vec<Q>,
}

impl DyadicStep {
    pub fn new(level: u32, values: Vec<Q>) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Guard {
                size: level as usize,
                limit: MAX_LEVEL as usize,
                hint: "dyadic level too deep".into(),
            });
        }
        if values.len() != 1usize << level {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: 1usize << level,
            });
        }
        Ok(DyadicStep { level, values })
    }

    pub fn from_ints(level: u32, values: &[i64]) -> Result<Self> {
        DyadicStep::new(level, values.iter().map(|&v| qi(v)).collect())
    }

    pub fn constant(c: Q) -> Self {
        DyadicStep {
            level: 0,
            values: vec![c],
        }
    }

    /// `c · 1_I` for the level-`l` interval with index `j`.
    pub fn indicator(level: u32, j: usize, c: Q) -> Result<Self> {
        let mut values = vec![Q::zero(); 1usize << level];
        *values.get_mut(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: 1usize << level,
        })? = c;
        DyadicStep::new(level, values)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// The same function written at a finer level.
    pub fn relevel(&self, level: u32) -> Result<DyadicStep> {
        if level < self.level {
            return domain(format!("cannot relevel {} down to {level}", self.level));
        }
        let rep = 1usize << (level - self.level);
        DyadicStep::new(
            level,
            self.values
                .iter()
                .flat_map(|v| std::iter::repeat_n(v.clone(), rep))
                .collect(),
        )
    }

    /// Drops redundant levels.
    pub fn canonical(&self) -> DyadicStep {
        let mut cur = self.clone();
        while cur.level > 0 && cur.values.chunks(2).all(|c| c[0] == c[1]) {
            cur = DyadicStep {
                level: cur.level - 1,
                values: cur.values.chunks(2).map(|c| c[0].clone()).collect(),
            };
        }
        cur
    }

    /// Value at `x ∈ [0,1)`.
    pub fn value_at(&self, x: &Q) -> Result<Q> {
        if x.is_negative() || x >= &Q::one() {
            return domain(format!("{x} is outside [0,1)"));
        }
        let j = (x * pow2(self.level)).floor().to_integer();
        Ok(self.values[j.to_usize().expect("index fits")].clone())
    }

    pub fn integral(&self) -> Q {
        self.values.iter().sum::<Q>() / pow2(self.level)
    }

    pub fn map(&self, f: impl Fn(&Q) -> Q) -> DyadicStep {
        DyadicStep {
            level: self.level,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn zip_with(&self, other: &DyadicStep, f: impl Fn(&Q, &Q) -> Q) -> DyadicStep {
        let l = self.level.max(other.level);
        let a = self.relevel(l).expect("finer level");
        let b = other.relevel(l).expect("finer level");
        DyadicStep {
            level: l,
            values: a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn add(&self, other: &DyadicStep) -> DyadicStep {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn mul(&self, other: &DyadicStep) -> DyadicStep {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: &Q) -> DyadicStep {
        self.map(|x| x * c)
    }

    /// `∫ f g`.
    pub fn inner(&self, other: &DyadicStep) -> Q {
        self.mul(other).integral()
    }

    pub fn l1_norm(&self) -> Q {
        self.map(|x| x.abs()).integral()
    }

    pub fn l2_norm_sq(&self) -> Q {
        self.inner(self)
    }

    pub fn sup_norm(&self) -> Q {
        self.values.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
    }

    /// `∫ |f|^p` for a positive integer `p`.
    pub fn moment(&self, p: u32) -> Q {
        self.map(|x| num::pow(x.abs(), p as usize)).integral()
    }
}

/// The conditional expectation onto level `l`: averages over level-`l` intervals.
pub fn dyadic_average(f: &DyadicStep, l: u32) -> Result<DyadicStep> {
    if l > f.level {
        return domain(format!("target level {l} exceeds the step level {}", f.level));
    }
    let block = 1usize << (f.level - l);
    let n = Q::from_integer(BigInt::from(block));
    DyadicStep::new(
        l,
        f.values
            .chunks(block)
            .map(|c| c.iter().sum::<Q>() / &n)
            .collect(),
    )
}

/// A dyadic rational in `[0,1)`.
pub fn check_dyadic_location(x: &Q) -> Result<()> {
    if x.is_negative() || x >= &Q::one() {
        return domain(format!("location {x} is outside [0,1)"));
    }
    let d = x.denom();
    if (d & (d - BigInt::one())) != BigInt::zero() {
        return domain(format!("location {x} is not a dyadic rational"));
    }
    Ok(())
}

/// A finite measure on `[0,1)`: a nonnegative step density plus point masses at
/// dyadic rationals. A point mass on an interval endpoint belongs to the interval
/// it opens.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicMeasure {
    density: DyadicStep,
    atoms: Vec<(Q, Q)>,
}

impl DyadicMeasure {
    pub fn new(density: DyadicStep, atoms: Vec<(Q, Q)>) -> Result<Self> {
        if density.values.iter().any(Signed::is_negative) {
            return domain("density must be nonnegative");
        }
        for (loc, mass) in &atoms {
            check_dyadic_location(loc)?;
            if !mass.is_positive() {
                return domain(format!("point mass at {loc} must be positive"));
            }
        }
        Ok(DyadicMeasure { density, atoms })
    }

    pub fn lebesgue() -> Self {
        DyadicMeasure {
            density: DyadicStep::constant(Q::one()),
            atoms: Vec::new(),
        }
    }

    pub fn point(loc: Q, mass: Q) -> Result<Self> {
        DyadicMeasure::new(DyadicStep::constant(Q::zero()), vec![(loc, mass)])
    }

    pub fn density(&self) -> &DyadicStep {
        &self.density
    }

    pub fn atoms(&self) -> &[(Q, Q)] {
        &self.atoms
    }

    pub fn total(&self) -> Q {
        self.density.integral() + self.atoms.iter().map(|(_, m)| m).sum::<Q>()
    }

    /// Finest level needed to resolve the density and the atom locations.
    pub fn resolution(&self) -> u32 {
        let atom_level = self
            .atoms
            .iter()
            .map(|(x, _)| x.denom().bits().saturating_sub(1) as u32)
            .max()
            .unwrap_or(0);
        self.density.level.max(atom_level)
    }

    /// Density mass of each level-`l` interval.
    pub fn density_masses(&self, l: u32) -> Vec<Q> {
        if l >= self.density.level {
            let w = pow2(l).recip();
            let fine = self.density.relevel(l).expect("finer level");
            fine.values.iter().map(|v| v * &w).collect()
        } else {
            let avg = dyadic_average(&self.density, l).expect("coarser level");
            let w = pow2(l).recip();
            avg.values.iter().map(|v| v * &w).collect()
        }
    }

    /// `μ(I)` for every level-`l` interval.
    pub fn interval_masses(&self, l: u32) -> Vec<Q> {
        let mut m = self.density_masses(l);
        let scale = pow2(l);
        for (x, mass) in &self.atoms {
            let j = (x * &scale).floor().to_integer().to_usize().expect("index fits");
            m[j] += mass;
        }
        m
    }

    /// `μ([j 2^{-l}, (j+1) 2^{-l}))`.
    pub fn interval_mass(&self, l: u32, j: usize) -> Q {
        let lo = Q::new(j.into(), BigInt::one() << l as usize);
        let hi = Q::new((j + 1).into(), BigInt::one() << l as usize);
        let dens = if l >= self.density.level {
            self.density.values[j >> (l - self.density.level)].clone() / pow2(l)
        } else {
            let block = 1usize << (self.density.level - l);
            self.density.values[j * block..(j + 1) * block].iter().sum::<Q>() / pow2(self.density.level)
        };
        dens + self
            .atoms
            .iter()
            .filter(|(x, _)| x >= &lo && x < &hi)
            .map(|(_, m)| m)
            .sum::<Q>()
    }
}
