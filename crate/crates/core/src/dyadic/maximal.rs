use num::{BigInt, One, Signed, Zero};

use super::step::{pow2, DyadicMeasure, DyadicStep};
use crate::error::{domain, Error, Result};
use crate::scalar::{lcm_of_denominators, Q};

/// `μ*_δ` truncated at depth `L`: on each level-`L` interval, the largest
/// `μ(I)/|I|` over its dyadic ancestors.
pub fn dyadic_maximal(mu: &DyadicMeasure, depth: u32) -> Result<DyadicStep> {
    let mut best: Vec<Q> = vec![mu.total(); 1];
    for l in 1..=depth {
        let ratios: Vec<Q> = mu
            .interval_masses(l)
            .into_iter()
            .map(|m| m * pow2(l))
            .collect();
        best = ratios
            .into_iter()
            .enumerate()
            .map(|(j, r)| r.max(best[j >> 1].clone()))
            .collect();
    }
    DyadicStep::new(depth, best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelSet {
    /// Maximal intervals as `(level, index)`.
    pub intervals: Vec<(u32, usize)>,
    pub lebesgue: Q,
    pub mass: Q,
    /// `t |E_t| < μ(E_t)` when `E_t` is nonempty; vacuously true otherwise.
    pub strict: bool,
}

/// `E_t`: the maximal dyadic intervals of level `≤ L` with `μ(I) > t |I|`.
pub fn maximal_level_sets(mu: &DyadicMeasure, t: &Q, depth: u32) -> Result<LevelSet> {
    if !t.is_positive() {
        return domain(format!("threshold must be positive, got {t}"));
    }
    let masses: Vec<Vec<Q>> = (0..=depth).map(|l| mu.interval_masses(l)).collect();
    let mut intervals = Vec::new();
    let mut stack = vec![(0u32, 0usize)];
    while let Some((l, j)) = stack.pop() {
        if masses[l as usize][j] > t / pow2(l) {
            intervals.push((l, j));
        } else if l < depth {
            stack.push((l + 1, 2 * j + 1));
            stack.push((l + 1, 2 * j));
        }
    }
    let lebesgue: Q = intervals.iter().map(|&(l, _)| pow2(l).recip()).sum();
    let mass: Q = intervals
        .iter()
        .map(|&(l, j)| masses[l as usize][j].clone())
        .sum();
    let strict = intervals.is_empty() || t * &lebesgue < mass;
    Ok(LevelSet {
        intervals,
        lebesgue,
        mass,
        strict,
    })
}

/// An open interval `(a, b)`.
pub type Open = (Q, Q);

/// A sublist of open intervals with the same union in which no point lies in more
/// than two of them; returned as indices into the input.
pub fn covering_reduce(intervals: &[Open]) -> Result<Vec<usize>> {
    if intervals.is_empty() {
        return Err(Error::Invalid("covering_reduce needs at least one interval".into()));
    }
    if let Some((a, b)) = intervals.iter().find(|(a, b)| a >= b) {
        return Err(Error::Invalid(format!("empty interval ({a}, {b})")));
    }
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = &intervals[i];
        let (c, d) = &intervals[j];
        a.cmp(c).then(d.cmp(b)).then(i.cmp(&j))
    });
    let mut kept = Vec::new();
    let mut k = 0;
    while k < order.len() {
        // Start a component at the leftmost unused interval.
        let first = order[k];
        kept.push(first);
        let mut reach = intervals[first].1.clone();
        k += 1;
        loop {
            let mut best: Option<usize> = None;
            while k < order.len() && intervals[order[k]].0 < reach {
                let i = order[k];
                if best.is_none_or(|b| intervals[i].1 > intervals[b].1) {
                    best = Some(i);
                }
                k += 1;
            }
            match best {
                Some(b) if intervals[b].1 > reach => {
                    kept.push(b);
                    reach = intervals[b].1.clone();
                }
                _ => break,
            }
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Largest number of intervals sharing a point, by endpoint sweep.
pub fn max_multiplicity(intervals: &[Open]) -> usize {
    let mut events: Vec<(&Q, i32)> = Vec::new();
    for (a, b) in intervals {
        events.push((a, 1));
        events.push((b, -1));
    }
    // Open intervals: at a shared coordinate, closings happen before openings.
    events.sort_by(|x, y| x.0.cmp(y.0).then(x.1.cmp(&y.1)));
    let (mut cur, mut best) = (0i32, 0i32);
    for (_, d) in events {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// The union as sorted disjoint open intervals.
pub fn union_of(intervals: &[Open]) -> Vec<Open> {
    let mut v: Vec<Open> = intervals.to_vec();
    v.sort();
    let mut out: Vec<Open> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a < last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct HlReport {
    /// `|E_t|` for the maximal function over open intervals with grid endpoints.
    pub lower: Q,
    /// `|E_t|` is at most this: every open interval sits in a grid interval at most
    /// `2h` longer.
    pub upper: Q,
    /// `2 μ([0,1)) / t`.
    pub bound: Q,
    pub holds: bool,
    /// Whether the grid level set also fits under `μ([0,1)) / t`.
    pub holds_constant_one: bool,
}

/// Hardy–Littlewood weak type on `[0,1)` over intervals with endpoints in
/// `2^{-L} ℤ`.
pub fn hl_maximal_weak_type(mu: &DyadicMeasure, t: &Q, depth: u32) -> Result<HlReport> {
    if !t.is_positive() {
        return domain(format!("threshold must be positive, got {t}"));
    }
    let n = 1usize << depth;
    let scale = pow2(depth);
    // Mass strictly inside each cell, and mass sitting on each grid point.
    let mut cell = mu.density_masses(depth);
    let mut point = vec![Q::zero(); n + 1];
    for (x, m) in mu.atoms() {
        let y = x * &scale;
        if y.is_integer() {
            let k: usize = y.to_integer().try_into().expect("grid index fits");
            point[k] += m;
        } else {
            let k: usize = y.floor().to_integer().try_into().expect("grid index fits");
            cell[k] += m;
        }
    }
    let den = lcm_of_denominators(cell.iter().chain(point.iter()));
    let to_int = |x: &Q| x.numer() * (&den / x.denom());
    let mut cell_pre = vec![BigInt::zero(); n + 1];
    let mut point_pre = vec![BigInt::zero(); n + 2];
    for k in 0..n {
        cell_pre[k + 1] = &cell_pre[k] + to_int(&cell[k]);
    }
    for k in 0..=n {
        point_pre[k + 1] = &point_pre[k] + to_int(&point[k]);
    }
    // μ((i h, j h)) · den
    let mass = |i: usize, j: usize| -> BigInt {
        let inner = if j > i + 1 {
            &point_pre[j] - &point_pre[i + 1]
        } else {
            BigInt::zero()
        };
        &cell_pre[j] - &cell_pre[i] + inner
    };
    // μ(J) > t (j - i) h  ⟺  mass · d > (j - i) · c, with t h den = c / d.
    let th = t / &scale * Q::from_integer(den.clone());
    let (c, d) = (th.numer().clone(), th.denom().clone());
    let mut lower_cover = vec![false; n];
    let mut upper_cover = vec![false; n];
    for i in 0..n {
        let mut lo_j = None;
        let mut up_j = None;
        for j in (i + 1..=n).rev() {
            let lhs = mass(i, j) * &d;
            let len = BigInt::from(j - i);
            if lo_j.is_none() && lhs > &len * &c {
                lo_j = Some(j);
            }
            if up_j.is_none() && lhs > (len - 2) * &c {
                up_j = Some(j);
            }
            if lo_j.is_some() && up_j.is_some() {
                break;
            }
        }
        if let Some(j) = lo_j {
            lower_cover[i..j].iter_mut().for_each(|c| *c = true);
        }
        if let Some(j) = up_j {
            upper_cover[i..j].iter_mut().for_each(|c| *c = true);
        }
    }
    let measure = |cover: &[bool]| Q::new(cover.iter().filter(|&&c| c).count().into(), BigInt::one() << depth as usize);
    let lower = measure(&lower_cover);
    let upper = measure(&upper_cover);
    let total = mu.total();
    let bound = Q::from_integer(2.into()) * &total / t;
    let holds = lower <= bound;
    let holds_constant_one = lower <= &total / t;
    Ok(HlReport {
        lower,
        upper,
        bound,
        holds,
        holds_constant_one,
    })
}

/// Two equal point masses on which the weak-type inequality fails with constant 1.
pub fn constant_one_witness(depth: u32) -> Result<(DyadicMeasure, Q, HlReport)> {
    let half = Q::new(1.into(), 2.into());
    let mu = DyadicMeasure::new(
        DyadicStep::constant(Q::zero()),
        vec![
            (Q::new(1.into(), 4.into()), half.clone()),
            (Q::new(3.into(), 4.into()), half),
        ],
    )?;
    let t = Q::from_integer(4.into());
    let report = hl_maximal_weak_type(&mu, &t, depth)?;
    if report.holds_constant_one {
        return Err(Error::Invalid(format!("grid at depth {depth} too coarse for the witness")));
    }
    Ok((mu, t, report))
}
