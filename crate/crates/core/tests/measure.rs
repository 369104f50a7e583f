use proptest::prelude::*;
use summa_core::measure::{
    hahn_decompose, jordan_decompose, lebesgue_decompose, polar_density, radon_nikodym, reconstruct,
    symdiff_distance, total_variation, two_set_variation, Partition, SignedMeasure,
};
use summa_core::norms::NormValue;
use summa_core::scalar::{q, qi};
use summa_core::{NormDescriptor, Q};

fn rat() -> impl Strategy<Value = Q> {
    (-10i64..=10, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

fn real_measure(max: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rat(), 1..=max)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&a| m >> a & 1 == 1).collect())
}

fn first(v: Vec<Q>) -> Q {
    v.into_iter().next().unwrap()
}

/// `|x|` per atom as an independent oracle for the variation of a real measure.
fn abs_all(w: &[Q]) -> Vec<Q> {
    w.iter().map(|x| if x < &qi(0) { -x.clone() } else { x.clone() }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jordan_and_hahn(w in real_measure(10)) {
        let n = w.len();
        let mu = SignedMeasure::real(w.clone());
        let (pos, neg) = jordan_decompose(&mu).unwrap();
        let (p, qset) = hahn_decompose(&mu).unwrap();
        let (pw, nw) = (pos.real_weights().unwrap(), neg.real_weights().unwrap());
        for a in 0..n {
            prop_assert_eq!(&pw[a] - &nw[a], w[a].clone());
            prop_assert_eq!(&pw[a] + &nw[a], abs_all(&w)[a].clone());
        }
        for set in subsets(n) {
            let in_p: Vec<usize> = set.iter().copied().filter(|a| p.contains(a)).collect();
            let in_q: Vec<usize> = set.iter().copied().filter(|a| qset.contains(a)).collect();
            prop_assert_eq!(first(pos.measure_of(&set).unwrap()), first(mu.measure_of(&in_p).unwrap()));
            prop_assert_eq!(first(neg.measure_of(&set).unwrap()), -first(mu.measure_of(&in_q).unwrap()));
        }
    }

    #[test]
    fn two_set_formula(w in real_measure(8), cplx in prop::collection::vec((rat(), rat()), 1..=6)) {
        let mu = SignedMeasure::real(w.clone());
        let disc = Partition::discrete(w.len());
        for set in subsets(w.len()) {
            prop_assert_eq!(two_set_variation(&mu, &set).unwrap(), total_variation(&mu, &disc, &set).unwrap());
        }
        let nu = SignedMeasure::complex(cplx.iter().map(|(a, b)| num::Complex::new(a.clone(), b.clone())).collect());
        let all: Vec<usize> = (0..cplx.len()).collect();
        // For complex measures the two-set supremum is within a factor 2 of |μ|.
        let tv = total_variation(&nu, &Partition::discrete(cplx.len()), &all).unwrap();
        let two = two_set_variation(&nu, &all).unwrap();
        prop_assert!(two.le(&tv));
        prop_assert!(tv.le_scaled(&qi(2), &two));
    }

    #[test]
    fn variation_is_minimal(w in real_measure(8), extra in prop::collection::vec(0i64..=4, 8)) {
        let mu = SignedMeasure::real(w.clone());
        let rho: Vec<Q> = abs_all(&w).iter().zip(&extra).map(|(x, e)| x + q(*e, 3)).collect();
        let rho = SignedMeasure::real(rho);
        let disc = Partition::discrete(w.len());
        for set in subsets(w.len()) {
            let tv = total_variation(&mu, &disc, &set).unwrap();
            prop_assert!(tv.le(&NormValue::Exact(first(rho.measure_of(&set).unwrap()))));
        }
    }

    #[test]
    fn radon_nikodym_round_trip(w in real_measure(8), base in prop::collection::vec(0i64..=3, 8)) {
        let n = w.len();
        let nu = SignedMeasure::real(base[..n].iter().map(|&b| qi(b)).collect());
        let mu = SignedMeasure::real(w.clone());
        let lb = lebesgue_decompose(&mu, &nu).unwrap();
        for set in subsets(n) {
            let ac = first(lb.absolutely_continuous.measure_of(&set).unwrap());
            let sing = first(lb.singular.measure_of(&set).unwrap());
            prop_assert_eq!(&ac + &sing, first(mu.measure_of(&set).unwrap()));
            prop_assert_eq!(first(reconstruct(&lb.density, &nu, &set).unwrap()), ac);
        }
        let h = polar_density(&mu).unwrap();
        let tv_weights = abs_all(&w);
        let tv = SignedMeasure::real(tv_weights.clone());
        for a in 0..n {
            if tv_weights[a] != qi(0) {
                prop_assert!(h[a][0] == qi(1) || h[a][0] == qi(-1));
            }
        }
        for set in subsets(n) {
            prop_assert_eq!(first(reconstruct(&h, &tv, &set).unwrap()), first(mu.measure_of(&set).unwrap()));
            let abs_h: Vec<Vec<Q>> = h.iter().map(|x| abs_all(x)).collect();
            prop_assert_eq!(
                NormValue::Exact(first(reconstruct(&abs_h, &tv, &set).unwrap())),
                total_variation(&mu, &Partition::discrete(n), &set).unwrap()
            );
        }
        if let Ok(h) = radon_nikodym(&mu, &nu) {
            let all: Vec<usize> = (0..n).collect();
            prop_assert_eq!(reconstruct(&h, &nu, &all).unwrap(), mu.measure_of(&all).unwrap());
        }
    }

    #[test]
    fn symdiff_is_a_semimetric(w in prop::collection::vec(0i64..=5, 1..=6)) {
        let n = w.len();
        let mu = SignedMeasure::real(w.iter().map(|&x| qi(x)).collect());
        let sets: Vec<Vec<usize>> = subsets(n).collect();
        for a in &sets {
            for b in &sets {
                let ab = symdiff_distance(&mu, a, b).unwrap();
                prop_assert_eq!(&ab, &symdiff_distance(&mu, b, a).unwrap());
                for c in sets.iter().step_by(3) {
                    prop_assert!(symdiff_distance(&mu, a, c).unwrap() <= &ab + symdiff_distance(&mu, b, c).unwrap());
                }
            }
        }
    }

    #[test]
    fn vector_measure_subadditivity(ws in prop::collection::vec(prop::collection::vec(rat(), 3), 1..=7), k in 0usize..3) {
        let norm = [NormDescriptor::l1(), NormDescriptor::l2(), NormDescriptor::linf()][k].clone();
        let mu = SignedMeasure::vector(ws.clone(), norm).unwrap();
        let disc = Partition::discrete(ws.len());
        for set in subsets(ws.len()) {
            let value = mu.norm_of(&mu.measure_of(&set).unwrap());
            prop_assert!(value.le(&total_variation(&mu, &disc, &set).unwrap()));
        }
    }
}
