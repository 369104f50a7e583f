use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::filtration::{AdaptedSequence, Filtration};
use super::ops::{classify, maximal_function, SeqClass};
use super::random;
use super::stopping::{stopped_sequence, StoppingTime};
use crate::dyadic::{product_integral, rademacher_sum};
use crate::error::{domain, Error, Result};
use crate::measure::Partition;
use crate::norms::NormValue;
use crate::scalar::{q, qi, Scalar, Q};

pub const EXPERIMENTS: [&str; 4] = ["dirac_singular", "unit_square", "slln_average", "doubling"];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentParams {
    pub stages: Option<u32>,
    pub seed: u64,
    pub threshold: Option<Q>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            stages: None,
            seed: 1,
            threshold: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl TraceCheck {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        TraceCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A per-stage table plus the identities asserted along the way.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentTrace {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Scalar>>,
    pub checks: Vec<TraceCheck>,
}

impl ExperimentTrace {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Scalar>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

pub fn run_experiment(name: &str, params: &ExperimentParams) -> Result<ExperimentTrace> {
    match name {
        "dirac_singular" => dirac_singular(params.stages.unwrap_or(8)),
        "unit_square" => unit_square(params.stages.unwrap_or(4)),
        "slln_average" => slln_average(params.stages.unwrap_or(64)),
        "doubling" => doubling(
            params.stages.unwrap_or(6),
            params.seed,
            params.threshold.clone().unwrap_or_else(|| qi(2)),
        ),
        _ => Err(Error::Invalid(format!(
            "unknown experiment {name:?}; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

fn guard(stages: u32, limit: u32, what: &str) -> Result<()> {
    if stages == 0 {
        return domain(format!("{what} needs at least one stage"));
    }
    if stages > limit {
        return Err(Error::Guard {
            size: stages as usize,
            limit: limit as usize,
            hint: format!("{what} stores every atom"),
        });
    }
    Ok(())
}

fn pow2(j: u32) -> Q {
    Q::from_integer(num::BigInt::one() << j as usize)
}

fn star_mass(seq: &AdaptedSequence, j: usize, t: &Q) -> Q {
    let tv = NormValue::Exact(t.clone());
    let star = maximal_function(seq, j).expect("stage exists");
    seq.filtration()
        .weights()
        .iter()
        .zip(star)
        .filter(|(_, v)| v.cmp_value(&tv).is_gt())
        .map(|(w, _)| w)
        .sum()
}

/// `f_j = 2^j 1_{[1−2^{−j}, 1)}` for `j = 1..=stages`: every `‖f_j‖₁ = 1`, yet `f_j(x)`
/// is eventually 0 at each `x < 1`.
fn dirac_singular(stages: u32) -> Result<ExperimentTrace> {
    guard(stages, 16, "dirac_singular")?;
    let levels: Vec<u32> = (1..=stages).collect();
    let filt = Filtration::dyadic(&levels, stages)?;
    let n = filt.atoms();
    let values: Vec<Vec<Q>> = levels
        .iter()
        .map(|&j| {
            let start = n - (n >> j);
            (0..n).map(|a| if a >= start { pow2(j) } else { Q::zero() }).collect()
        })
        .collect();
    let seq = AdaptedSequence::real(filt, values)?;
    let samples: Vec<Q> = (0..stages).map(|k| Q::one() - pow2(k).recip()).collect();
    let atom_of = |x: &Q| (x * Q::from_integer(n.into())).floor().to_integer();
    let sample_atoms: Vec<usize> = samples
        .iter()
        .map(|x| atom_of(x).try_into().expect("index fits"))
        .collect();
    let mut columns = vec!["stage".to_string(), "l1".into(), "l2_sq".into(), "star_mass_t1".into()];
    columns.extend(samples.iter().map(|x| format!("f({x})")));
    let w = seq.filtration().weights().to_vec();
    let mut rows = Vec::new();
    let mut l1_ok = true;
    for (i, &j) in levels.iter().enumerate() {
        let f = seq.real_stage(i).expect("real");
        let l1: Q = w.iter().zip(&f).map(|(w, v)| w * v.abs()).sum();
        let l2: Q = w.iter().zip(&f).map(|(w, v)| w * v * v).sum();
        l1_ok &= l1.is_one();
        let mut row = vec![
            Scalar::Exact(qi(j as i64)),
            Scalar::Exact(l1),
            Scalar::Exact(l2),
            Scalar::Exact(star_mass(&seq, i, &qi(1))),
        ];
        row.extend(sample_atoms.iter().map(|&a| Scalar::Exact(f[a].clone())));
        rows.push(row);
    }
    let mut eventually_zero = true;
    for k in 0..=stages {
        let cut = Q::one() - pow2(k).recip();
        for (x, &a) in samples.iter().zip(&sample_atoms) {
            if x >= &cut {
                continue;
            }
            for (i, &j) in levels.iter().enumerate() {
                if j > k && !seq.stage_values(i)[a][0].is_zero() {
                    eventually_zero = false;
                }
            }
        }
    }
    let class = classify(&seq).class;
    let t = q(3, 2);
    let weak = &t * star_mass(&seq, seq.len() - 1, &t) <= Q::one();
    Ok(ExperimentTrace {
        name: "dirac_singular".into(),
        columns,
        rows,
        checks: vec![
            TraceCheck::new("l1_norm_one", l1_ok, "every stage has L1 norm 1"),
            TraceCheck::new(
                "eventually_zero",
                eventually_zero,
                "f_j(x) = 0 for j > k whenever x < 1 - 2^-k",
            ),
            TraceCheck::new("martingale", class == SeqClass::Martingale, class.label()),
            TraceCheck::new("weak_type_t3/2", weak, "t mu(f* > t) <= 1"),
        ],
    })
}

/// On `[0,1)²`, `f_j = 2^j` on the products `I × I` of equal level-`j` dyadic intervals.
fn unit_square(stages: u32) -> Result<ExperimentTrace> {
    guard(stages, 6, "unit_square")?;
    let side = 1usize << stages;
    let n = side * side;
    let partitions = (0..=stages)
        .map(|j| {
            let shift = stages - j;
            let blocks = 1usize << j;
            let mut cells = vec![Vec::new(); blocks * blocks];
            for a in 0..n {
                let (x, y) = (a / side, a % side);
                cells[(x >> shift) * blocks + (y >> shift)].push(a);
            }
            Partition::new(n, cells)
        })
        .collect::<Result<Vec<_>>>()?;
    let w = Q::new(1.into(), n.into());
    let filt = Filtration::new(vec![w.clone(); n], partitions)?;
    let values: Vec<Vec<Q>> = (0..=stages)
        .map(|j| {
            let shift = stages - j;
            (0..n)
                .map(|a| {
                    if (a / side) >> shift == (a % side) >> shift {
                        pow2(j)
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    let seq = AdaptedSequence::real(filt, values)?;
    let mut rows = Vec::new();
    let mut integral_ok = true;
    for j in 0..=stages as usize {
        let f = seq.real_stage(j).expect("real");
        let integral: Q = f.iter().map(|v| v * &w).sum();
        let l2: Q = f.iter().map(|v| v * v * &w).sum();
        let support: Q = f.iter().filter(|v| !v.is_zero()).map(|_| w.clone()).sum();
        integral_ok &= integral.is_one();
        rows.push(vec![
            Scalar::Exact(qi(j as i64)),
            Scalar::Exact(integral),
            Scalar::Exact(l2),
            Scalar::Exact(support),
        ]);
    }
    let class = classify(&seq).class;
    Ok(ExperimentTrace {
        name: "unit_square".into(),
        columns: ["stage", "integral", "l2_sq", "support"].map(String::from).to_vec(),
        rows,
        checks: vec![
            TraceCheck::new("integral_one", integral_ok, "the double integral of f_j is 1"),
            TraceCheck::new("martingale", class == SeqClass::Martingale, class.label()),
        ],
    })
}

/// Value of `r_l` at a rational point of `[0,1)`.
fn rademacher_at(l: u32, x: &Q) -> Q {
    let k = (x * pow2(l)).floor().to_integer();
    if (k % 2u32).is_zero() {
        qi(1)
    } else {
        qi(-1)
    }
}

/// `f_n = (1/n) Σ_{j≤n} r_j`, with `‖f_n‖₂²` summed from the exact products `∫ r_i r_j`.
fn slln_average(n: u32) -> Result<ExperimentTrace> {
    guard(n, 256, "slln_average")?;
    let samples = [q(1, 3), q(1, 5), q(2, 7)];
    let mut columns = vec!["n".to_string(), "l2_sq".into(), "l2".into()];
    columns.extend(samples.iter().map(|x| format!("f({x})")));
    let mut rows = Vec::new();
    let mut gram_sum = Q::zero();
    let mut partial: Vec<Q> = vec![Q::zero(); samples.len()];
    let mut reciprocal_ok = true;
    let mut steps_ok = true;
    for m in 1..=n {
        for i in 1..m {
            gram_sum += qi(2) * product_integral(&[i, m])?;
        }
        gram_sum += product_integral(&[m, m])?;
        let nq = qi(m as i64);
        let l2_sq = &gram_sum / (&nq * &nq);
        reciprocal_ok &= l2_sq == nq.recip();
        if m <= 12 {
            let coeffs = vec![nq.recip(); m as usize];
            steps_ok &= rademacher_sum(&coeffs, m)?.l2_norm_sq() == l2_sq;
        }
        for (p, x) in partial.iter_mut().zip(&samples) {
            *p += rademacher_at(m, x);
        }
        let mut row = vec![
            Scalar::Exact(nq.clone()),
            Scalar::Exact(l2_sq.clone()),
            Scalar::Float(crate::scalar::q_to_f64(&l2_sq).sqrt()),
        ];
        row.extend(partial.iter().map(|p| Scalar::Exact(p / &nq)));
        rows.push(row);
    }
    Ok(ExperimentTrace {
        name: "slln_average".into(),
        columns,
        rows,
        checks: vec![
            TraceCheck::new("l2_sq_is_reciprocal", reciprocal_ok, "||f_n||_2^2 = 1/n"),
            TraceCheck::new("matches_step_functions", steps_ok, "n <= 12 cross-checked on dyadic steps"),
        ],
    })
}

/// A nonnegative dyadic martingale, its doubling bound `f_{j+1} ≤ 2 f_j`, and the
/// sequence stopped at the first passage above `t`, which stays below `max(2t, f_0)`.
fn doubling(stages: u32, seed: u64, t: Q) -> Result<ExperimentTrace> {
    guard(stages, 12, "doubling")?;
    if !t.is_positive() {
        return domain("threshold must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filt = Filtration::dyadic_standard(stages)?;
    let density = random::density(&mut rng, stages);
    let seq = AdaptedSequence::real_closed_by(filt, &density)?;
    let tau = StoppingTime::first_passage(&seq, &t);
    let stopped = stopped_sequence(&seq, &tau.truncated(seq.len() - 1))?;
    let f0 = seq.real_stage(0).expect("real")[0].clone();
    let cap = (qi(2) * &t).max(f0);
    let w = seq.filtration().weights().to_vec();
    let mut rows = Vec::new();
    let mut doubling_ok = true;
    let mut capped = true;
    for j in 0..seq.len() {
        let f = seq.real_stage(j).expect("real");
        if j + 1 < seq.len() {
            let next = seq.real_stage(j + 1).expect("real");
            doubling_ok &= next.iter().zip(&f).all(|(a, b)| a <= &(qi(2) * b));
        }
        let g = stopped.real_stage(j).expect("real");
        let g_sup = g.iter().max().cloned().unwrap_or_else(Q::zero);
        capped &= g_sup <= cap;
        let stopped_mass: Q = tau
            .values()
            .iter()
            .zip(&w)
            .filter(|(v, _)| v.is_some_and(|v| v <= j))
            .map(|(_, w)| w)
            .sum();
        rows.push(vec![
            Scalar::Exact(qi(j as i64)),
            Scalar::Exact(w.iter().zip(&f).map(|(w, v)| w * v).sum()),
            Scalar::Exact(f.iter().max().cloned().unwrap_or_else(Q::zero)),
            Scalar::Exact(stopped_mass),
            Scalar::Exact(g_sup),
        ]);
    }
    let class = classify(&stopped).class;
    Ok(ExperimentTrace {
        name: "doubling".into(),
        columns: ["stage", "integral", "sup", "stopped_mass", "stopped_sup"]
            .map(String::from)
            .to_vec(),
        rows,
        checks: vec![
            TraceCheck::new("doubling", doubling_ok, "f_{j+1} <= 2 f_j"),
            TraceCheck::new("stopped_bounded", capped, format!("g_n <= {cap}")),
            TraceCheck::new("stopped_martingale", class == SeqClass::Martingale, class.label()),
        ],
    })
}
