use std::f64::consts::PI;

use num::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::norms::NormDescriptor;
use crate::scalar::{q_to_f64, tolerance, Q};

pub const MAX_GRID_2D: usize = 1 << 20;
pub const MAX_GRID_3D: usize = 4096;

fn sphere_point(norm: &NormDescriptor, u: &[f64]) -> Vec<f64> {
    let r = norm.value_f64(u);
    u.iter().map(|x| x / r).collect()
}

fn circle_point(norm: &NormDescriptor, theta: f64) -> Vec<f64> {
    sphere_point(norm, &[theta.cos(), theta.sin()])
}

fn midpoint_norm(norm: &NormDescriptor, v: &[f64], w: &[f64]) -> f64 {
    let m: Vec<f64> = v.iter().zip(w).map(|(a, b)| (a + b) / 2.0).collect();
    norm.value_f64(&m)
}

fn distance(norm: &NormDescriptor, v: &[f64], w: &[f64]) -> f64 {
    let d: Vec<f64> = v.iter().zip(w).map(|(a, b)| a - b).collect();
    norm.value_f64(&d)
}

/// Evenly spread points on the unit sphere of `ℝ³` (Fibonacci lattice).
fn sphere_grid_3d(norm: &NormDescriptor, g: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..g)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / g as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            sphere_point(norm, &[r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn check_dimension(norm: &NormDescriptor, d: usize, grid: usize) -> Result<()> {
    if d == 0 || d > 3 {
        return Err(Error::Guard {
            size: d,
            limit: 3,
            hint: "sphere grids are limited to dimension 3".into(),
        });
    }
    norm.check_dimension(d)?;
    if grid < 4 {
        return domain("grid needs at least 4 points");
    }
    let limit = if d == 3 { MAX_GRID_3D } else { MAX_GRID_2D };
    if grid > limit {
        return Err(Error::Guard {
            size: grid,
            limit,
            hint: "sphere grid too fine".into(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusRow {
    pub eps: f64,
    /// `1 − max ‖(v+w)/2‖` over sampled pairs; an upper bound for the modulus.
    pub delta: f64,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

/// Largest midpoint norm over `w = w(φ)` with `φ ∈ (0, π]` along the unit circle from
/// `v` and `‖v − w‖ ≥ ε`: bisection for the first admissible angle, then a scan of the
/// admissible arc.
fn best_on_arc(norm: &NormDescriptor, theta: f64, eps: f64) -> Option<(f64, Vec<f64>)> {
    let v = circle_point(norm, theta);
    let at = |phi: f64| circle_point(norm, theta + phi);
    if distance(norm, &v, &at(PI)) < eps {
        return None;
    }
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..60 {
        let mid = (lo + hi) / 2.0;
        if distance(norm, &v, &at(mid)) >= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut best = (midpoint_norm(norm, &v, &at(hi)), at(hi));
    for k in 1..=64 {
        let phi = hi + (PI - hi) * k as f64 / 64.0;
        let w = at(phi);
        if distance(norm, &v, &w) >= eps {
            let m = midpoint_norm(norm, &v, &w);
            if m > best.0 {
                best = (m, w);
            }
        }
    }
    Some(best)
}

/// `δ̂(ε) = 1 − max{‖(v+w)/2‖ : ‖v‖ = ‖w‖ = 1, ‖v − w‖ ≥ ε}` over a sphere grid of
/// `grid` points, for each `ε` in `eps`.
pub fn uniform_convexity_modulus(norm: &NormDescriptor, d: usize, eps: &[f64], grid: usize) -> Result<Vec<ModulusRow>> {
    check_dimension(norm, d, grid)?;
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e <= 2.0)) {
        return domain(format!("ε = {e} is outside (0, 2]"));
    }
    eps.iter()
        .map(|&e| {
            let (mut best, mut pair) = (f64::NEG_INFINITY, (vec![], vec![]));
            match d {
                1 => {
                    best = 0.0;
                    pair = (vec![1.0], vec![-1.0]);
                }
                2 => {
                    for k in 0..grid {
                        let theta = 2.0 * PI * k as f64 / grid as f64;
                        if let Some((m, w)) = best_on_arc(norm, theta, e) {
                            if m > best {
                                best = m;
                                pair = (circle_point(norm, theta), w);
                            }
                        }
                    }
                }
                _ => {
                    let pts = sphere_grid_3d(norm, grid);
                    for (i, v) in pts.iter().enumerate() {
                        for w in &pts[i + 1..] {
                            if distance(norm, v, w) >= e {
                                let m = midpoint_norm(norm, v, w);
                                if m > best {
                                    best = m;
                                    pair = (v.clone(), w.clone());
                                }
                            }
                        }
                    }
                }
            }
            if best == f64::NEG_INFINITY {
                return domain(format!("no sampled pair is {e} apart"));
            }
            Ok(ModulusRow {
                eps: e,
                delta: 1.0 - best,
                v: pair.0,
                w: pair.1,
            })
        })
        .collect()
}

/// The Euclidean modulus `1 − √(1 − ε²/4)`.
pub fn l2_modulus(eps: f64) -> f64 {
    1.0 - (1.0 - eps * eps / 4.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AveragedConvexityReport {
    pub average: Vec<Q>,
    pub average_norm: f64,
    /// `Σ t_j ‖v_j − a‖`.
    pub spread: f64,
    pub premise: bool,
    pub conclusion: bool,
    /// The premise holds while the conclusion fails.
    pub counterexample: bool,
}

/// For `a = Σ t_j v_j`: if `‖a‖ > 1 − η` then `Σ t_j ‖v_j − a‖ < ε`.
pub fn averaged_convexity_check(
    norm: &NormDescriptor,
    vectors: &[Vec<Q>],
    weights: &[Q],
    eps: f64,
    eta: f64,
) -> Result<AveragedConvexityReport> {
    if vectors.len() != weights.len() || vectors.is_empty() {
        return Err(Error::LengthMismatch {
            left: vectors.len(),
            right: weights.len(),
        });
    }
    if weights.iter().any(|t| t < &Q::zero()) || weights.iter().sum::<Q>() != Q::one() {
        return domain("weights must be nonnegative and sum to 1");
    }
    let d = vectors[0].len();
    norm.check_dimension(d)?;
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::LengthMismatch { left: v.len(), right: d });
    }
    if let Some(v) = vectors.iter().find(|v| norm.value(v).to_f64() > 1.0 + tolerance()) {
        return domain(format!("vector {v:?} lies outside the unit ball"));
    }
    let mut average = vec![Q::zero(); d];
    for (v, t) in vectors.iter().zip(weights) {
        for (a, x) in average.iter_mut().zip(v) {
            *a += t * x;
        }
    }
    let average_norm = norm.value(&average).to_f64();
    let spread: f64 = vectors
        .iter()
        .zip(weights)
        .map(|(v, t)| {
            let diff: Vec<Q> = v.iter().zip(&average).map(|(x, a)| x - a).collect();
            q_to_f64(t) * norm.value(&diff).to_f64()
        })
        .sum();
    let premise = average_norm > 1.0 - eta;
    let conclusion = spread < eps;
    Ok(AveragedConvexityReport {
        average,
        average_norm,
        spread,
        premise,
        conclusion,
        counterexample: premise && !conclusion,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrictWitness {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
    pub separation: f64,
}

fn round_key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|c| (c * 1e6).round() as i64).collect()
}

fn better(cand: &StrictWitness, cur: &Option<StrictWitness>) -> bool {
    match cur {
        None => true,
        Some(c) if cand.separation > c.separation + 1e-9 => true,
        Some(c) if cand.separation > c.separation - 1e-9 => {
            (round_key(&cand.v), round_key(&cand.w)) > (round_key(&c.v), round_key(&c.w))
        }
        _ => false,
    }
}

fn oriented(v: Vec<f64>, w: Vec<f64>, separation: f64) -> StrictWitness {
    let (v, w) = if round_key(&v) >= round_key(&w) { (v, w) } else { (w, v) };
    StrictWitness { v, w, t: 0.5, separation }
}

/// Searches the sphere grid for distinct unit vectors whose midpoint still has norm 1
/// within `tol`, returning the most separated pair found.
pub fn strict_convexity_witness(norm: &NormDescriptor, d: usize, grid: usize, tol: f64) -> Result<Option<StrictWitness>> {
    check_dimension(norm, d, grid)?;
    let on_sphere = |v: &[f64], w: &[f64]| midpoint_norm(norm, v, w) >= 1.0 - tol;
    let mut best: Option<StrictWitness> = None;
    match d {
        1 => {}
        2 => {
            let pts: Vec<Vec<f64>> = (0..grid)
                .map(|k| circle_point(norm, 2.0 * PI * k as f64 / grid as f64))
                .collect();
            for i in 0..grid {
                // The midpoint norm falls as w moves away from v, so search the farthest
                // offset that stays on the sphere.
                let (mut lo, mut hi) = (0usize, grid / 2);
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if on_sphere(&pts[i], &pts[(i + mid) % grid]) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                if lo > 0 {
                    let w = pts[(i + lo) % grid].clone();
                    let sep = distance(norm, &pts[i], &w);
                    let cand = oriented(pts[i].clone(), w, sep);
                    if better(&cand, &best) {
                        best = Some(cand);
                    }
                }
            }
        }
        _ => {
            let pts = sphere_grid_3d(norm, grid);
            for (i, v) in pts.iter().enumerate() {
                for w in &pts[i + 1..] {
                    if on_sphere(v, w) {
                        let cand = oriented(v.clone(), w.clone(), distance(norm, v, w));
                        if better(&cand, &best) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}
