use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use summa_core::martingale::{
    classify, conditional_expectation, doob_decompose, doob_lp_check, optional_stopping_check, random,
    stopped_sequence, weak_type_check, AdaptedSequence, Filtration, SeqClass,
};
use summa_core::scalar::{q, qi};
use summa_core::{NormDescriptor, Q};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn abs(x: &Q) -> Q {
    if x < &qi(0) { -x.clone() } else { x.clone() }
}

fn scalars(f: &[Vec<Q>]) -> Vec<Q> {
    f.iter().map(|v| v[0].clone()).collect()
}

fn lift(f: &[Q]) -> Vec<Vec<Q>> {
    f.iter().map(|x| vec![x.clone()]).collect()
}

fn integral(filt: &Filtration, f: &[Q]) -> Q {
    filt.weights().iter().zip(f).map(|(w, x)| w * x).sum()
}

fn random_pair(seed: u64) -> (ChaCha8Rng, Filtration, usize, usize) {
    let mut r = rng(seed);
    let filt = random::filtration(&mut r, 32, 5);
    let l = r.gen_range(0..filt.len());
    let j = r.gen_range(0..=l);
    (r, filt, l, j)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conditional_expectation_contracts(seed in any::<u64>()) {
        let (mut r, filt, l, j) = random_pair(seed);
        let f = scalars(&random::measurable_function(&mut r, &filt, l, 1));
        let e = scalars(&conditional_expectation(&filt, &lift(&f), l, j).unwrap());
        let l1 = |g: &[Q]| integral(&filt, &g.iter().map(abs).collect::<Vec<_>>());
        let l2 = |g: &[Q]| integral(&filt, &g.iter().map(|x| x * x).collect::<Vec<_>>());
        let sup = |g: &[Q]| g.iter().map(abs).max().unwrap();
        prop_assert!(l1(&e) <= l1(&f));
        prop_assert!(l2(&e) <= l2(&f));
        prop_assert!(sup(&e) <= sup(&f));
    }

    #[test]
    fn conditional_jensen(seed in any::<u64>()) {
        let (mut r, filt, l, j) = random_pair(seed);
        let f = scalars(&random::measurable_function(&mut r, &filt, l, 1));
        let e = scalars(&conditional_expectation(&filt, &lift(&f), l, j).unwrap());
        let phis: [fn(&Q) -> Q; 3] = [abs, |x| x * x, |x| x.clone().max(qi(0))];
        for phi in phis {
            let phi_f: Vec<Q> = f.iter().map(phi).collect();
            let rhs = scalars(&conditional_expectation(&filt, &lift(&phi_f), l, j).unwrap());
            for (a, b) in e.iter().zip(&rhs) {
                prop_assert!(phi(a) <= *b);
            }
        }
    }

    #[test]
    fn product_rule_and_tower(seed in any::<u64>()) {
        let (mut r, filt, l, j) = random_pair(seed);
        let i = r.gen_range(0..=j);
        let f = scalars(&random::measurable_function(&mut r, &filt, l, 1));
        let g = scalars(&random::measurable_function(&mut r, &filt, j, 1));
        let fg: Vec<Q> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
        let lhs = scalars(&conditional_expectation(&filt, &lift(&fg), l, j).unwrap());
        let ef = scalars(&conditional_expectation(&filt, &lift(&f), l, j).unwrap());
        let rhs: Vec<Q> = ef.iter().zip(&g).map(|(a, b)| a * b).collect();
        prop_assert_eq!(lhs, rhs);
        let twice = conditional_expectation(&filt, &lift(&ef), j, i).unwrap();
        prop_assert_eq!(twice, conditional_expectation(&filt, &lift(&f), l, i).unwrap());
    }

    #[test]
    fn vector_contraction(seed in any::<u64>(), d in 1usize..=4, k in 0usize..3) {
        let (mut r, filt, l, j) = random_pair(seed);
        let norm = [NormDescriptor::l1(), NormDescriptor::l2(), NormDescriptor::linf()][k].clone();
        let f = random::measurable_function(&mut r, &filt, l, d);
        let e = conditional_expectation(&filt, &f, l, j).unwrap();
        let norms: Vec<f64> = f.iter().map(|v| norm.value(v).to_f64()).collect();
        for cell in filt.stages()[j].cells() {
            let mass: Q = cell.iter().map(|&a| &filt.weights()[a]).sum();
            let avg: f64 = cell.iter().map(|&a| q_f(&filt.weights()[a]) * norms[a]).sum::<f64>() / q_f(&mass);
            let lhs = norm.value(&e[cell[0]]);
            if k == 1 {
                prop_assert!(lhs.to_f64() <= avg + 1e-9 * (1.0 + avg));
            } else {
                let exact: Q = cell.iter().map(|&a| &filt.weights()[a] * norm.value(&f[a]).to_scalar().as_exact().unwrap().clone()).sum::<Q>() / &mass;
                prop_assert!(lhs.to_scalar().as_exact().unwrap() <= &exact);
            }
        }
    }

    #[test]
    fn martingale_differences_are_orthogonal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let filt = random::filtration(&mut r, 32, 5);
        let m = random::martingale(&mut r, &filt, 1);
        let stage = |j: usize| m.real_stage(j).unwrap();
        let diff = |j: usize| -> Vec<Q> { stage(j + 1).iter().zip(stage(j)).map(|(a, b)| a - b).collect() };
        let inner = |a: &[Q], b: &[Q]| -> Q { filt.weights().iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum() };
        let n = m.len();
        let mut pythagoras = inner(&stage(0), &stage(0));
        for j in 0..n - 1 {
            prop_assert_eq!(inner(&stage(0), &diff(j)), qi(0));
            for l in j + 1..n - 1 {
                prop_assert_eq!(inner(&diff(j), &diff(l)), qi(0));
            }
            pythagoras += inner(&diff(j), &diff(j));
        }
        prop_assert_eq!(inner(&stage(n - 1), &stage(n - 1)), pythagoras);
    }

    #[test]
    fn doob_decomposition_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let depth = r.gen_range(1..=4);
        let seq = random::nonneg_dyadic_submartingale(&mut r, depth).unwrap();
        let dd = doob_decompose(&seq).unwrap();
        prop_assert_eq!(classify(&dd.martingale).class, SeqClass::Martingale);
        let filt = seq.filtration();
        let mean0 = integral(filt, &dd.martingale.real_stage(0).unwrap());
        for j in 0..seq.len() {
            let m = dd.martingale.real_stage(j).unwrap();
            let a = dd.compensator.real_stage(j).unwrap();
            let f = seq.real_stage(j).unwrap();
            prop_assert_eq!(m.iter().zip(&a).map(|(x, y)| x + y).collect::<Vec<_>>(), f);
            prop_assert_eq!(integral(filt, &m), mean0.clone());
            if j > 0 {
                // Predictable and nondecreasing.
                prop_assert!(filt.is_measurable(j - 1, &lift(&a)));
                let prev = dd.compensator.real_stage(j - 1).unwrap();
                prop_assert!(a.iter().zip(&prev).all(|(x, y)| x >= y));
            }
        }
    }

    #[test]
    fn stopping_preserves_martingales(seed in any::<u64>()) {
        let mut r = rng(seed);
        let filt = random::filtration(&mut r, 32, 5);
        let m = random::martingale(&mut r, &filt, 1);
        let tau = random::stopping_time(&mut r, &filt, false);
        let stopped = stopped_sequence(&m, &tau).unwrap();
        prop_assert_eq!(classify(&stopped).class, SeqClass::Martingale);
        let bounded = random::stopping_time(&mut r, &filt, true);
        let report = optional_stopping_check(&m, &bounded).unwrap();
        prop_assert!(report.holds, "{:?}", report);
        prop_assert_eq!(report.stopped_mean, report.initial_mean);
    }

    #[test]
    fn maximal_weak_type(seed in any::<u64>(), t in 1i64..=40) {
        let mut r = rng(seed);
        let filt = random::filtration(&mut r, 32, 5);
        let seq: AdaptedSequence = if r.gen_bool(0.5) {
            let d = r.gen_range(1..=3);
            random::martingale(&mut r, &filt, d)
        } else {
            let m = random::martingale(&mut r, &filt, 1);
            stopped_sequence(&m, &random::stopping_time(&mut r, &filt, false)).unwrap()
        };
        let rep = weak_type_check(&seq, &q(t, 4)).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }

    #[test]
    fn doob_lp_on_submartingales(seed in any::<u64>()) {
        let mut r = rng(seed);
        let depth = r.gen_range(1..=4);
        let seq = random::nonneg_dyadic_submartingale(&mut r, depth).unwrap();
        for p in [qi(2), q(3, 2)] {
            let rep = doob_lp_check(&seq, &p).unwrap();
            prop_assert!(rep.holds, "{:?}", rep);
        }
    }
}

fn q_f(x: &Q) -> f64 {
    summa_core::scalar::q_to_f64(x)
}
